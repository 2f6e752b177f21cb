"""CLI behavior: subcommands, determinism, exit codes."""

import json

import numpy as np
from heavinet.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    return code, capsys.readouterr().out


def test_build_square_with_guarantee(tmp_path, capsys):
    out = tmp_path / "net.json"
    code, _ = _run(capsys, "build", "square", "--L", "3", "--p1", "1",
                   "--skips", "1,0", "-o", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["meta"]["guarantee"]["sup_error_bound"] == 0.25
    assert doc["widths"] == [1, 1, 2, 3, 1]


def test_validate_and_eval(tmp_path, capsys):
    net = tmp_path / "net.json"
    _run(capsys, "build", "parity", "--d", "2", "-o", str(net))
    code, out = _run(capsys, "validate", str(net))
    assert code == 0 and out.strip() == "ok"

    pts = tmp_path / "pts.csv"
    pts.write_text("0.5,-0.3\n-1.0,-1.0\n")
    code, out = _run(capsys, "eval", str(net), "--points", str(pts))
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "x1,x2,y1"
    assert rows[1].endswith(",-1.0") and rows[2].endswith(",1.0")


def test_pieces_subcommand(tmp_path, capsys):
    net = tmp_path / "net.json"
    _run(capsys, "build", "square", "--L", "2", "--p1", "1", "--skips", "0",
         "-o", str(net))
    code, out = _run(capsys, "pieces", str(net), "--from", "0", "--to", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["piece_count"] == 2 and doc["breakpoints"] == [0.5]
    code, out = _run(capsys, "pieces", str(net), "--from", "0", "--to", "1",
                     "--sampled", "1000")
    assert code == 0 and out.strip() == "pieces,2"


def test_bounds_hand_value(capsys):
    code, out = _run(capsys, "bounds", "--kind", "skip", "--L", "4", "--p", "8", "--s", "1")
    assert code == 0
    assert ",38400.0," in out.splitlines()[1]


def test_shatter_certificate(tmp_path, capsys):
    cert = tmp_path / "cert.json"
    code, _ = _run(capsys, "shatter", "--kind", "skip", "--m", "1", "--n", "1",
                   "-o", str(cert))
    assert code == 0
    doc = json.loads(cert.read_text())
    assert doc["labelings_tried"] == 256 and doc["failures"] == []


def test_sweep_square_table(capsys):
    code, out = _run(capsys, "sweep", "square", "--L", "2..3", "--s", "1..1",
                     "--grid", "2000")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "L,s,bound,measured_sup_error,ratio"
    assert len(rows) == 3
    for row in rows[1:]:
        ratio = float(row.split(",")[-1])
        assert 0.5 <= ratio <= 1.0


def test_byte_identical_reruns(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _ = _run(capsys, "build", "decoder", "--kind", "lin", "--m", "1",
                       "--n", "0", "--t", "1", "--payload", "random",
                       "--seed", "7", "-o", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors(tmp_path, capsys):
    assert run(["no-such-command"]) == 2
    assert run(["build", "square", "--L", "3", "--p1", "1", "--skips", "1,1"]) == 2
    assert run(["eval", str(tmp_path / "missing.json"), "--grid", "3"]) == 2


def test_verification_failure_exit(tmp_path, capsys):
    # a parseable document with a broken skip budget trips validate: exit 1
    net = tmp_path / "net.json"
    _run(capsys, "build", "bits", "--radix", "2,2", "-o", str(net))
    doc = json.loads(net.read_text())
    doc["skip_counts"] = [0]  # the construction actually taps the input
    net.write_text(json.dumps(doc))
    code = run(["validate", str(net)])
    out = capsys.readouterr().out
    assert code == 1 and "skip budget exceeded" in out


def test_round_trip_reload_evaluates_identically(tmp_path, capsys):
    from heavinet.networks import evaluate_batch
    from heavinet.serialize import from_document

    net = tmp_path / "net.json"
    _run(capsys, "build", "bits", "--radix", "2,3,2", "-o", str(net))
    loaded = from_document(net.read_text())
    X = np.random.default_rng(0).uniform(0, 1, (50, 1))
    first = evaluate_batch(loaded.net, X)
    again = from_document(net.read_text())
    assert np.array_equal(first, evaluate_batch(again.net, X))


def test_sweep_holder_table(capsys):
    code, out = _run(capsys, "sweep", "holder", "--target", "x2", "--m", "1..1",
                     "--n", "1..1", "--grid", "500")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "m,n,q,bound,measured_sup_error,ratio"
    assert float(rows[1].split(",")[3]) == 0.15625


def test_build_bits_and_shatter_net(tmp_path, capsys):
    net = tmp_path / "bits.json"
    code, _ = _run(capsys, "build", "bits", "--kind", "lin", "--L", "3",
                   "--variant", "wide", "-o", str(net))
    assert code == 0
    assert run(["build", "bits", "--kind", "lin"]) == 2  # missing --L
    assert run(["build", "bits"]) == 2                   # missing --radix
    snet = tmp_path / "snet.json"
    code, _ = _run(capsys, "build", "shatter-net", "--kind", "skip", "--m", "1",
                   "--n", "1", "--labels", "10110010", "-o", str(snet))
    assert code == 0
    code, _ = _run(capsys, "build", "decoder", "--kind", "skip", "--m", "1",
                   "--n", "1", "--payload", "10101010", "--r-select", "1",
                   "-o", str(tmp_path / "slice.json"))
    assert code == 0


def test_eval_grid_cap(tmp_path, capsys):
    net = tmp_path / "net.json"
    _run(capsys, "build", "rect", "--a", "0,0,0", "--b", "1,1,1", "-o", str(net))
    assert run(["eval", str(net), "--grid", "4000"]) == 2  # 4001^3 over the cap
