"""Reader for the IDX binary format plus a converter to sparse text.

IDX is the container used by the classic digit-image distributions: a magic
word (two zero bytes, a type code, a dimension count), big-endian uint32
sizes, then the raw array.  Only unsigned-byte payloads are supported here,
which covers the image and label files this tool targets.
"""

import struct

import numpy as np

from .data import DataError

_UBYTE = 0x08


def read_idx(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if len(magic) != 4 or magic[0] != 0 or magic[1] != 0:
            raise DataError(f"{path}: not an IDX file")
        type_code, ndim = magic[2], magic[3]
        if type_code != _UBYTE:
            raise DataError(f"{path}: unsupported IDX type 0x{type_code:02x}")
        dims = struct.unpack(f">{ndim}I", fh.read(4 * ndim))
        data = np.frombuffer(fh.read(), dtype=np.uint8)
    expected = int(np.prod(dims))
    if data.size != expected:
        raise DataError(f"{path}: expected {expected} bytes, found {data.size}")
    return data.reshape(dims)


def convert_idx_to_sparse(
    images_path,
    labels_path,
    out_path,
    digits: tuple[int, int] | None = None,
) -> int:
    """Write 'label index:value' lines; pixel values are scaled into [0, 1].

    With ``digits=(a, b)`` only those two classes are kept and mapped to
    +1 / -1; otherwise labels become the digit plus one (multiclass, 1-based).
    Returns the number of examples written.
    """
    images = read_idx(images_path)
    labels = read_idx(labels_path)
    if images.ndim < 2:
        raise DataError(f"{images_path}: expected at least 2 dimensions")
    if labels.ndim != 1:
        raise DataError(f"{labels_path}: expected a 1-d label array")
    count = images.shape[0]
    if labels.shape[0] != count:
        raise DataError(
            f"image count {count} != label count {labels.shape[0]}"
        )
    flat = images.reshape(count, -1).astype(float) / 255.0
    written = 0
    with open(out_path, "w") as fh:
        for i in range(count):
            digit = int(labels[i])
            if digits is not None:
                if digit == digits[0]:
                    label = 1
                elif digit == digits[1]:
                    label = -1
                else:
                    continue
            else:
                label = digit + 1
            feats = " ".join(
                f"{j + 1}:{flat[i, j]:.17g}"
                for j in np.flatnonzero(flat[i])
            )
            fh.write(f"{label} {feats}".rstrip() + "\n")
            written += 1
    return written
