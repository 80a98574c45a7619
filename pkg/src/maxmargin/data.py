"""Signed-example datasets and the margin functional.

A binary problem {(x_i, y_i)} with y_i in {-1, +1} is stored as the matrix
whose i-th row is z_i = -y_i x_i / s, where s is a single global scale chosen
so that every row has 2-norm at most one.  All solvers operate on this matrix
only; the margin of a classifier w is (-max_i <w, z_i>) / ||w||_2.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

ROW_NORM_SLACK = 1e-12


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


@dataclass(frozen=True)
class LabeledExample:
    x: np.ndarray
    y: int


@dataclass(frozen=True)
class Dataset:
    """Immutable signed-example matrix; safe to share across threads."""

    z: np.ndarray
    scale_factor: float = 1.0

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.ndim != 2 or z.shape[0] < 1 or z.shape[1] < 1:
            raise DataError("dataset must be a nonempty 2-d matrix")
        if not np.all(np.isfinite(z)):
            raise DataError("dataset contains non-finite values")
        norms = np.linalg.norm(z, axis=1)
        if np.any(norms > 1.0 + ROW_NORM_SLACK):
            raise DataError(
                f"row norm {norms.max():.6g} exceeds 1; normalize the inputs"
            )
        if not self.scale_factor > 0:
            raise DataError("scale_factor must be positive")
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def d(self) -> int:
        return self.z.shape[1]

    def scores(self, w: np.ndarray) -> np.ndarray:
        """Z w, the per-example signed scores."""
        return self.z @ w


def build_dataset(examples: Sequence[LabeledExample], normalize: bool = False) -> Dataset:
    """Assemble the signed matrix from labeled examples.

    With ``normalize`` set, all inputs are divided by the single global factor
    s = max(1, max_i ||x_i||); otherwise any input with norm above one is an
    error.  The global scale preserves the geometry: margins shrink by 1/s.
    """
    if len(examples) == 0:
        raise DataError("empty example sequence")
    d = np.asarray(examples[0].x).shape
    if len(d) != 1:
        raise DataError("example inputs must be 1-d vectors")
    d = d[0]
    xs = np.empty((len(examples), d))
    ys = np.empty(len(examples))
    for i, ex in enumerate(examples):
        x = np.asarray(ex.x, dtype=float)
        if x.shape != (d,):
            raise DataError(
                f"example {i}: dimension {x.shape} != ({d},) of first example"
            )
        if not np.all(np.isfinite(x)):
            raise DataError(f"example {i}: non-finite input")
        if ex.y not in (-1, 1):
            raise DataError(f"example {i}: label {ex.y!r} not in {{-1, +1}}")
        xs[i] = x
        ys[i] = ex.y
    max_norm = float(np.linalg.norm(xs, axis=1).max())
    if normalize:
        scale = max(1.0, max_norm)
    else:
        if max_norm > 1.0 + ROW_NORM_SLACK:
            raise DataError(
                f"input norm {max_norm:.6g} exceeds 1 and normalize is off"
            )
        scale = 1.0
    z = -(ys[:, None] * xs) / scale
    return Dataset(z=z, scale_factor=scale)


def margin(w: np.ndarray, ds: Dataset) -> float:
    """(-max_i <w, z_i>) / ||w||_2, with the zero classifier assigned margin 0."""
    w = np.asarray(w, dtype=float)
    if w.shape != (ds.d,):
        raise ValueError(f"w has shape {w.shape}, expected ({ds.d},)")
    if not np.all(np.isfinite(w)):
        raise ValueError("w contains non-finite values")
    if not np.any(w):
        return 0.0
    return float(-np.max(ds.z @ w) / np.linalg.norm(w))


def margin_from_scores(scores: np.ndarray, w_norm: float) -> float:
    """Margin from precomputed Z w and ||w||; used inside solver loops."""
    if w_norm == 0.0:
        return 0.0
    return float(-np.max(scores) / w_norm)


def _parse_label(token: str, lineno: int, multiclass: bool) -> int:
    try:
        value = float(token)
    except ValueError:
        raise DataError(f"line {lineno}: bad label {token!r}") from None
    if value != int(value):
        raise DataError(f"line {lineno}: non-integer label {token!r}")
    value = int(value)
    if multiclass:
        if value < 1:
            raise DataError(f"line {lineno}: multiclass label {value} < 1")
    elif value not in (-1, 1):
        raise DataError(f"line {lineno}: label {value} not in {{-1, +1}}")
    return value


def load_sparse_text(path, multiclass: bool = False) -> list[LabeledExample]:
    """Parse 'label index:value ...' lines with 1-based ascending indices.

    Unseen indices are zero; the dimension is the largest index in the file.
    """
    parsed = []  # (label, [(index, value), ...])
    max_index = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            label = _parse_label(tokens[0], lineno, multiclass)
            feats = []
            prev = 0
            for tok in tokens[1:]:
                try:
                    idx_s, val_s = tok.split(":", 1)
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise DataError(f"line {lineno}: bad feature {tok!r}") from None
                if idx <= prev:
                    raise DataError(
                        f"line {lineno}: index {idx} not ascending from {prev}"
                    )
                if not np.isfinite(val):
                    raise DataError(f"line {lineno}: non-finite value in {tok!r}")
                prev = idx
                feats.append((idx, val))
            if feats:
                max_index = max(max_index, feats[-1][0])
            parsed.append((label, feats))
    if not parsed:
        raise DataError(f"{path}: no examples")
    d = max(max_index, 1)
    examples = []
    for label, feats in parsed:
        x = np.zeros(d)
        for idx, val in feats:
            x[idx - 1] = val
        examples.append(LabeledExample(x=x, y=label))
    return examples


def load_dense_csv(path, multiclass: bool = False) -> list[LabeledExample]:
    """Parse CSV rows whose first column is the label."""
    examples = []
    d = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split(",")
            label = _parse_label(tokens[0], lineno, multiclass)
            try:
                x = np.array([float(t) for t in tokens[1:]])
            except ValueError:
                raise DataError(f"line {lineno}: bad feature value") from None
            if d is None:
                d = x.shape[0]
                if d == 0:
                    raise DataError(f"line {lineno}: no feature columns")
            elif x.shape[0] != d:
                raise DataError(
                    f"line {lineno}: {x.shape[0]} features, expected {d}"
                )
            if not np.all(np.isfinite(x)):
                raise DataError(f"line {lineno}: non-finite value")
            examples.append(LabeledExample(x=x, y=label))
    if not examples:
        raise DataError(f"{path}: no examples")
    return examples
