import json

import numpy as np
import pytest

from aop.cli import AopReport, build_report, main
from aop.matrix import OperatorMatrix, read_matrix


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _write


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_diag_json(write, capsys):
    code, out, _ = run(["analyze", write("d.txt", "2 2 R\n1 0\n0 2\n"), "--format", "json"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["eps_hat"] == pytest.approx(0.6, abs=1e-15)
    assert rep["dist_cv"] == 0.5 and rep["lambda_star"] == 1.5
    assert rep["stability"]["gap"] == pytest.approx(0.5)


def test_analyze_text_uses_twelve_digits(write, capsys):
    code, out, _ = run(["analyze", write("d.txt", "2 2 R\n1 0\n0 3\n")], capsys)
    assert code == 0
    assert "eps_hat      0.8" in out
    assert "1.33333333333 (earlier)" in out


def test_analyze_identity(write, capsys):
    code, out, _ = run(["--format", "json", "analyze", write("i.txt", "3 3 R\n1 0 0\n0 1 0\n0 0 1\n")], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["eps_hat"] == 0.0 and rep["dist_cv"] == 0.0


def test_analyze_wide_is_partial(write, capsys):
    code, out, err = run(["analyze", write("w.txt", "2 3 R\n1 0 0\n0 1 0\n"), "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["eps_hat"] == 1.0 and rep["dist_cv"] is None
    assert rep["warnings"] and "warning" in err


def test_analyze_with_oracle(write, capsys):
    path = write("d.txt", "2 2 R\n1 0\n0 2\n")
    code, out, _ = run(["analyze", path, "--oracle", "--samples", "500", "--refine", "50",
                        "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["oracle"]["agreement"] < 1e-3


def test_parse_error_exit_2(write, capsys):
    code, _, err = run(["analyze", write("bad.txt", "2 2 R\n1 2\n3 x\n")], capsys)
    assert code == 2 and "line 3" in err


def test_missing_file_exit_2(tmp_path, capsys):
    code, _, _ = run(["analyze", str(tmp_path / "none.txt")], capsys)
    assert code == 2


def test_json_round_trip(write, capsys):
    path = write("c.txt", "3 2 C\n1+i 0\n0 2\n1 -i\n")
    code, out, _ = run(["analyze", path, "--format", "json"], capsys)
    assert code == 0
    rep = AopReport.from_json(out)
    assert rep == AopReport.from_json(rep.to_json())
    assert rep == build_report(read_matrix(path), path)
    # the JSON is float-faithful, not rounded to 12 digits
    direct = build_report(read_matrix(path), path)
    assert rep.eps_hat == direct.eps_hat


def test_verify(write, capsys):
    code, out, _ = run(["verify", write("d.txt", "2 2 R\n1 0\n0 2\n"), "--samples", "10000"], capsys)
    assert code == 0 and "eps_hat_oracle" in out and "dist_brute_2x2" in out
    code, _, _ = run(["verify", write("i.txt", "3 3 R\n1 0 0\n0 1 0\n0 0 1\n"), "--samples", "200"], capsys)
    assert code == 0


def test_verify_fails_with_tiny_budget(write, capsys):
    # one sample and no refinement cannot reach 1e-12 agreement on a generic matrix
    path = write("g.txt", "3 3 R\n1 0.3 0.1\n-0.2 2 0.5\n0.4 0.1 5\n")
    code, _, err = run(["verify", path, "--samples", "1", "--refine", "0", "--tol", "1e-12"], capsys)
    assert code == 4 and "verification failed" in err


def test_verify_deterministic(write, capsys):
    path = write("g.txt", "3 3 R\n1 0.3 0.1\n-0.2 2 0.5\n0.4 0.1 5\n")
    argv = ["verify", path, "--samples", "800", "--refine", "20", "--seed", "11"]
    first = run(argv, capsys)
    assert run(argv, capsys) == first


def test_nearest(write, tmp_path, capsys):
    code, out, _ = run(["nearest", write("d.txt", "2 2 R\n4 0\n0 6\n")], capsys)
    assert code == 0 and out == "2 2 R\n5 0\n0 5\n"
    dest = tmp_path / "S.txt"
    code, _, _ = run(["nearest", write("d2.txt", "2 2 R\n1 0\n0 2\n"), "--out", str(dest)], capsys)
    assert code == 0
    np.testing.assert_array_equal(read_matrix(str(dest)).entries, 1.5 * np.eye(2))


def test_nearest_isometry(write, capsys):
    c, s = float(np.cos(0.3)), float(np.sin(0.3))
    code, out, _ = run(["nearest", write("r.txt", f"2 2 R\n{c!r} {-s!r}\n{s!r} {c!r}\n")], capsys)
    assert code == 0
    from aop.matrix import parse_matrix
    np.testing.assert_allclose(parse_matrix(out).entries, [[c, -s], [s, c]], atol=1e-15)


def test_nearest_wide_exit_3(write, capsys):
    code, _, _ = run(["nearest", write("w.txt", "2 3 R\n1 0 0\n0 1 0\n")], capsys)
    assert code == 3


def test_repro_tables(tmp_path, capsys):
    code, out, err = run(["repro", "delta-comparison", "--grid", "99"], capsys)
    assert code == 0 and out.count("\r\n") == 100 and "[FAIL]" not in err
    stem = tmp_path / "out" / "t"
    code, _, _ = run(["repro", "example-3.13", "--trunc-dim", "8", "--out", str(stem)], capsys)
    assert code == 0
    d = json.loads((tmp_path / "out" / "t.json").read_text())
    vals = next(c["values"] for c in d["columns"] if c["label"] == "eps_hat_ST")
    assert vals[0] == pytest.approx(0.6, abs=1e-12) and abs(vals[-1]) <= 1e-12
    assert (tmp_path / "out" / "t.csv").exists()


def test_repro_example_and_convergence(capsys):
    code, out, _ = run(["repro", "example-3.1", "--n-max", "3", "--samples", "500",
                        "--format", "json"], capsys)
    assert code == 0
    d = json.loads(out)
    dist = next(c["values"] for c in d["columns"] if c["label"] == "dist_cv")
    assert dist == pytest.approx([0.5, 1.0, 1.5], abs=1e-12)
    code, _, _ = run(["repro", "convergence-3.10", "--n-max", "6"], capsys)
    assert code == 0


def test_repro_bad_truncation_exit_4(capsys):
    code, _, _ = run(["repro", "example-3.13", "--trunc-dim", "7"], capsys)
    assert code == 4


def test_unknown_repro_exit_5(capsys):
    code, _, _ = run(["repro", "nope"], capsys)
    assert code == 5


def test_unknown_flag_exit_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "x.txt", "--bogus"])
    assert exc.value.code == 64


def test_help_lists_flags(capsys):
    for sub in ("analyze", "verify", "nearest", "repro"):
        with pytest.raises(SystemExit) as exc:
            main([sub, "--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        for flag in ("--seed", "--format", "--rank-tol"):
            assert flag in out
    with pytest.raises(SystemExit):
        main(["repro", "--help"])
    out = capsys.readouterr().out
    for flag in ("--n-max", "--grid", "--trunc-dim", "--out"):
        assert flag in out


def test_report_from_dict_rejects_unknown_keys():
    with pytest.raises(TypeError):
        AopReport.from_dict({"bogus": 1})


def test_build_report_single_column():
    rep = build_report(OperatorMatrix(np.array([[1.0], [2.0]])))
    assert rep.eps_hat is None and rep.warnings and rep.dist_cv == 0.0
