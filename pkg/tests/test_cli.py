import socket
import struct
import threading
import time

import numpy as np
import pytest

from maxmargin.cli import main
from maxmargin.data import load_sparse_text
from maxmargin.trace import read_trace_csv

TOY = """\
+1 1:0.9 2:0.1
-1 1:-0.8 2:0.2
+1 1:0.7 2:-0.3
-1 1:-0.6
"""

NONSEP = """\
+1 1:1
-1 1:1
"""


@pytest.fixture
def toy_file(tmp_path):
    path = tmp_path / "toy.txt"
    path.write_text(TOY)
    return path


class TestRunCommand:
    def test_row_count_contract(self, toy_file, tmp_path, capsys):
        out = tmp_path / "trace.csv"
        code = main([
            "run", "--method", "alg1", "--loss", "exp", "--steps", "100",
            "--data", str(toy_file), "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 102  # header + t = 0..100
        stdout = capsys.readouterr().out
        assert "final margin" in stdout
        assert "gamma^2 in [" in stdout

    def test_byte_identical_reruns(self, toy_file, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["run", "--method", "alg2", "--steps", "50", "--seed", "9",
                "--data", str(toy_file)]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_unsupported_combination_exit_2(self, toy_file, tmp_path, capsys):
        code = main([
            "run", "--method", "alg2", "--loss", "logistic", "--steps", "10",
            "--data", str(toy_file), "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 2
        assert "unsupported combination" in capsys.readouterr().err

    def test_unknown_method_exit_2(self, toy_file, tmp_path, capsys):
        code = main([
            "run", "--method", "newton", "--steps", "10",
            "--data", str(toy_file), "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 2
        assert "method" in capsys.readouterr().err

    def test_missing_file_exit_3(self, tmp_path, capsys):
        code = main([
            "run", "--method", "alg1", "--steps", "10",
            "--data", str(tmp_path / "absent.txt"), "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 3

    def test_malformed_line_exit_3_names_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("+1 1:0.5\n+1 oops\n")
        code = main([
            "run", "--method", "alg1", "--steps", "10",
            "--data", str(bad), "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 3
        assert "line 2" in capsys.readouterr().err

    def test_multiclass_run(self, tmp_path, capsys):
        data = tmp_path / "mc.txt"
        data.write_text("1 1:0.9\n2 2:0.8\n3 1:-0.7 2:-0.4\n")
        out = tmp_path / "trace.csv"
        code = main([
            "run", "--method", "alg1", "--steps", "100", "--multiclass",
            "--data", str(data), "--out", str(out),
        ])
        assert code == 0
        assert "multiclass margin" in capsys.readouterr().out

    def test_trace_parses_back(self, toy_file, tmp_path):
        out = tmp_path / "trace.csv"
        main(["run", "--method", "alg1", "--steps", "20",
              "--data", str(toy_file), "--out", str(out)])
        rows = read_trace_csv(out)
        assert rows[0].t == 0 and rows[-1].t == 20
        assert rows[-1].cert_lower is not None


class TestCertifyCommand:
    def test_separable_single_point(self, tmp_path, capsys):
        data = tmp_path / "one.txt"
        data.write_text("+1 1:1\n")
        code = main(["certify", "--data", str(data), "--steps", "10"])
        assert code == 0
        out = capsys.readouterr().out
        assert "separable" in out
        assert "not provably" not in out
        # the bracket collapses to {1} on the one-point problem
        assert "[1, 1]" in out.replace("0.99999999999999", "1").replace(
            "1.0000000000000002", "1").replace("1.0000000000000004", "1")

    def test_nonseparable_pair(self, tmp_path, capsys):
        data = tmp_path / "pair.txt"
        data.write_text(NONSEP)
        code = main(["certify", "--data", str(data), "--steps", "200"])
        assert code == 0
        assert "not provably separable at this horizon" in capsys.readouterr().out


class TestCompareCommand:
    def test_wide_csv(self, toy_file, tmp_path):
        out = tmp_path / "compare.csv"
        code = main([
            "compare", "--methods", "gd,ngd,alg1,batch_perceptron",
            "--steps", "60", "--data", str(toy_file), "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,margin_gd,margin_ngd,margin_alg1,margin_batch_perceptron"
        assert len(lines) == 62

    def test_nonseparable_warns(self, tmp_path, capsys):
        data = tmp_path / "pair.txt"
        data.write_text(NONSEP)
        out = tmp_path / "compare.csv"
        code = main([
            "compare", "--methods", "batch_perceptron,alg1", "--steps", "50",
            "--data", str(data), "--out", str(out),
        ])
        assert code == 0
        assert "nonseparable" in capsys.readouterr().err


def write_idx_images(path, images):
    count, rows, cols = images.shape
    with open(path, "wb") as fh:
        fh.write(bytes([0, 0, 0x08, 3]))
        fh.write(struct.pack(">3I", count, rows, cols))
        fh.write(images.astype(np.uint8).tobytes())


def write_idx_labels(path, labels):
    with open(path, "wb") as fh:
        fh.write(bytes([0, 0, 0x08, 1]))
        fh.write(struct.pack(">I", len(labels)))
        fh.write(bytes(labels))


class TestConvertIdx:
    def test_binary_digit_selection(self, tmp_path, capsys):
        images = np.zeros((3, 2, 2), dtype=np.uint8)
        images[0, 0, 0] = 255
        images[1, 1, 1] = 128
        images[2, 0, 1] = 64
        write_idx_images(tmp_path / "img.idx", images)
        write_idx_labels(tmp_path / "lab.idx", [0, 1, 7])
        out = tmp_path / "digits.txt"
        code = main([
            "convert-idx", "--images", str(tmp_path / "img.idx"),
            "--labels", str(tmp_path / "lab.idx"), "--out", str(out),
            "--digits", "0,1",
        ])
        assert code == 0
        assert "wrote 2 examples" in capsys.readouterr().out
        examples = load_sparse_text(out)
        assert examples[0].y == 1
        assert examples[0].x[0] == pytest.approx(1.0)
        assert examples[1].y == -1
        assert examples[1].x[3] == pytest.approx(128 / 255)

    def test_multiclass_conversion(self, tmp_path):
        images = np.full((2, 2, 2), 10, dtype=np.uint8)
        write_idx_images(tmp_path / "img.idx", images)
        write_idx_labels(tmp_path / "lab.idx", [4, 9])
        out = tmp_path / "mc.txt"
        assert main([
            "convert-idx", "--images", str(tmp_path / "img.idx"),
            "--labels", str(tmp_path / "lab.idx"), "--out", str(out),
        ]) == 0
        examples = load_sparse_text(out, multiclass=True)
        assert [e.y for e in examples] == [5, 10]

    def test_bad_digits_flag(self, tmp_path, capsys):
        code = main([
            "convert-idx", "--images", "x", "--labels", "y", "--out", "z",
            "--digits", "1",
        ])
        assert code == 2

    def test_bad_magic_exit_3(self, tmp_path):
        bad = tmp_path / "bad.idx"
        bad.write_bytes(b"\x01\x02\x03\x04")
        write_idx_labels(tmp_path / "lab.idx", [0])
        code = main([
            "convert-idx", "--images", str(bad),
            "--labels", str(tmp_path / "lab.idx"), "--out", str(tmp_path / "o.txt"),
        ])
        assert code == 3


@pytest.fixture(scope="module")
def live_server():
    import uvicorn

    from maxmargin.service import create_app

    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        port = sock.getsockname()[1]
    config = uvicorn.Config(
        create_app(), host="127.0.0.1", port=port, log_level="error"
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


class TestThinClientOverHttp:
    def test_run_matches_local(self, toy_file, tmp_path, live_server):
        local, remote = tmp_path / "local.csv", tmp_path / "remote.csv"
        argv = ["run", "--method", "alg1", "--steps", "40", "--data", str(toy_file)]
        assert main(argv + ["--out", str(local)]) == 0
        assert main(argv + ["--out", str(remote), "--server", live_server]) == 0
        assert local.read_bytes() == remote.read_bytes()

    def test_remote_config_error_exit_2(self, toy_file, tmp_path, live_server):
        code = main([
            "run", "--method", "alg2", "--loss", "logistic", "--steps", "5",
            "--data", str(toy_file), "--out", str(tmp_path / "t.csv"),
            "--server", live_server,
        ])
        assert code == 2

    def test_certify_over_http(self, tmp_path, capsys, live_server):
        data = tmp_path / "one.txt"
        data.write_text("+1 1:1\n")
        code = main([
            "certify", "--data", str(data), "--steps", "10",
            "--server", live_server,
        ])
        assert code == 0
        assert "separable" in capsys.readouterr().out
