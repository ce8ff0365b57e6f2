import json

import pytest

from cofinitary.cli import FAILED, OK, USAGE, main

from conftest import cond


def build(tmp_path, *extra):
    out = tmp_path / "t.json"
    code = main(["build", "--group", "trivial", "--z", "thue-morse", "--words", "X",
                 "--code-length", "32", "--budget", "200", "--out", str(out), *extra])
    return code, out


def test_build_example(tmp_path, capsys):
    code, out = build(tmp_path)
    assert code == OK
    data = json.loads(out.read_text())
    cert = data["certificates"]["coding"][0]
    assert (cert["word"], cert["parameter"]) == ("X", 0) and cert["length"] >= 32
    summary = capsys.readouterr().out
    assert "window B:" in summary and "coding certificates: 1" in summary and "witnesses: 1 (0 hit, 1 distinguish)" in summary


def test_build_to_stdout(capsys):
    assert main(["build", "--budget", "0"]) == OK
    captured = capsys.readouterr()
    data = json.loads(captured.out)
    assert data["steps"] == [] and data["window"] == 0
    assert "steps: 0" in captured.err


def test_build_rejects_periodic_stream(tmp_path, capsys):
    bits = tmp_path / "bits.txt"
    bits.write_text("0" * 300)
    code = main(["build", "--group", "swap", "--z", f"file:{bits}", "--words", "X", "--budget", "10",
                 "--out", str(tmp_path / "t.json")])
    assert code != OK
    assert "periodic" in capsys.readouterr().err


def test_build_reports_bad_names(capsys):
    assert main(["build", "--group", "nope", "--budget", "1"]) == USAGE
    assert main(["build", "--budget", "-1"]) == USAGE


def test_build_reports_failed_operation(tmp_path, capsys):
    code = main(["build", "--group", "swap-tail", "--words", "gamma X", "--target", "gamma",
                 "--budget", "200", "--out", str(tmp_path / "t.json")])
    assert code == FAILED
    assert "hit(target=gamma" in capsys.readouterr().err


def test_verify_fresh_and_tampered(tmp_path, capsys):
    _, out = build(tmp_path)
    assert main(["verify", str(out)]) == OK
    assert capsys.readouterr().out.strip().endswith(": OK")
    data = json.loads(out.read_text())
    i = next(i for i, st in enumerate(data["steps"]) if i > 5 and st["delta"]["s"])
    data["steps"][i]["delta"]["s"].pop()
    out.write_text(json.dumps(data))
    assert main(["verify", str(out)]) == FAILED
    assert f"FAIL step {i} " in capsys.readouterr().out


def test_verify_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["verify", str(bad)]) == USAGE
    assert "not valid JSON" in capsys.readouterr().err
    assert main(["verify", str(tmp_path / "missing.json")]) == USAGE


def test_decode_examples(tmp_path, capsys):
    table = tmp_path / "s.txt"
    table.write_text("0 3\n3 5\n5 8\n")
    assert main(["decode", str(table), "X", "0", "4"]) == OK
    assert capsys.readouterr().out == "0110\n"
    assert main(["decode", str(table), "X", "0", "0"]) == OK
    assert capsys.readouterr().out == "\n"
    table.write_text("0 3\n")
    assert main(["decode", str(table), "X", "0", "3"]) == FAILED
    assert "error at step 2" in capsys.readouterr().err


def test_decode_usage_errors(tmp_path, capsys):
    table = tmp_path / "s.txt"
    table.write_text("0 3\n0 4\n")
    assert main(["decode", str(table), "X", "0", "1"]) == USAGE
    table.write_text("0 1\n")
    assert main(["decode", str(table), "tau", "0", "1", "--group", "swap"]) == USAGE


def _write(tmp_path, name, c):
    path = tmp_path / name
    path.write_text(c.dumps())
    return str(path)


def test_leq_examples(tmp_path, capsys):
    p = _write(tmp_path, "p.json", cond("swap-tail", F=["X^-1 gamma X"]))
    q = _write(tmp_path, "q.json", cond("swap-tail", s=[(5, 0)], F=["X^-1 gamma X"]))
    assert main(["leq", p, p]) == OK
    assert main(["leq", q, p]) == OK
    assert capsys.readouterr().out.strip().endswith("q <= p")
    p = _write(tmp_path, "p2.json", cond(F=["X X"]))
    q = _write(tmp_path, "q2.json", cond(s=[(0, 1), (1, 0)], F=["X X"]))
    assert main(["leq", q, p]) == FAILED
    assert "NewFixedPointUnwitnessed(X X, 0)" in capsys.readouterr().out


def test_leq_context_mismatch(tmp_path, capsys):
    p = _write(tmp_path, "p.json", cond("swap"))
    q = _write(tmp_path, "q.json", cond("trivial"))
    assert main(["leq", q, p]) == USAGE


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == USAGE
