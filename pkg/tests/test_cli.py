import csv
import io
import json
import math

import numpy as np
import pytest

from mirrorless_fwm.cli import (
    EXIT_INVALID,
    EXIT_IO,
    EXIT_NO_CONVERGENCE,
    EXIT_OK,
    EXIT_TRIVIAL,
    build_parser,
    fmt,
    main,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array([[float(v) if v not in ("true", "false") else v == "true"
                               for v in r] for r in rows[1:]], dtype=object)


def test_threshold_flip(capsys):
    code, out, _ = run(capsys, "threshold", "--start", "1", "--stop", "2", "--step", "0.1")
    assert code == EXIT_OK
    header, rows = table(out)
    assert header == ["kL_over_delta", "above_threshold", "epsilon", "epsilon_squared"]
    assert len(rows) == 11
    flags = {round(float(r[0]), 6): r[1] for r in rows}
    assert flags[1.5] is False and flags[1.6] is True
    assert all(flags[k] for k in flags if k > 1.55)


def test_threshold_single_point(capsys):
    code, out, _ = run(capsys, "threshold", "--kl", "4.712")
    assert code == EXIT_OK
    eps2 = float(out.splitlines()[1].split(",")[3])
    assert eps2 == pytest.approx(0.95, abs=0.02)


def test_threshold_below(capsys):
    code, out, err = run(capsys, "threshold", "--kl", "1.0")
    assert code == EXIT_TRIVIAL
    assert out.splitlines()[1] == "1,false,0,0"
    assert "below threshold" in err


def test_curve(capsys):
    code, out, _ = run(capsys, "curve", "--start", "0.5", "--stop", "4.712389", "--n-points", "40")
    assert code == EXIT_OK
    header, rows = table(out)
    assert header == ["kL_over_delta", "epsilon", "epsilon_squared", "third_order_epsilon"]
    kl = rows[:, 0].astype(float)
    eps2 = rows[:, 2].astype(float)
    assert np.all(eps2[kl <= math.pi / 2] == 0)
    assert np.all(np.diff(eps2[kl > math.pi / 2]) > 0)
    assert eps2[-1] >= 0.95


def test_profiles(capsys):
    code, out, _ = run(capsys, "profiles", "--epsilon", "0.98", "--n-points", "11")
    assert code == EXIT_OK
    header, rows = table(out)
    assert header == ["z_over_L", "theta", "e1", "e2", "a1", "a2"]
    first, mid, last = rows[0].astype(float), rows[5].astype(float), rows[-1].astype(float)
    assert list(first) == pytest.approx([0, 0, 0, 0.98, 1, math.sqrt(1 - 0.98**2)])
    assert mid[1] == pytest.approx(math.pi / 4, abs=1e-11)
    assert last[2] == pytest.approx(0.98) and last[5] == pytest.approx(1.0)


def test_profiles_below_threshold(capsys):
    code, out, err = run(capsys, "profiles", "--kl", "1.2")
    assert code == EXIT_TRIVIAL
    assert out == "" and "threshold" in err


def test_profiles_needs_one_source(capsys):
    assert run(capsys, "profiles")[0] == EXIT_INVALID
    assert run(capsys, "profiles", "--kl", "3", "--epsilon", "0.5")[0] == EXIT_INVALID
    assert run(capsys, "profiles", "--epsilon", "1.5")[0] == EXIT_INVALID


def test_phase_check(capsys):
    code, out, err = run(capsys, "phase-check", "--epsilon", "0.2", "--n-steps", "100",
                         "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["columns"] == ["z_over_L", "xi_over_L", "psi"]
    assert len(doc["rows"]) == 101
    assert 0 < doc["summary"]["max_deviation"] < 1e-3
    assert "max |xi - z|/L" in err


def test_phase_check_without_self_phase(capsys):
    code, out, _ = run(capsys, "phase-check", "--epsilon", "0.9", "--no-ac-stark",
                       "--format", "json")
    assert json.loads(out)["summary"]["max_deviation"] < 1e-8


def test_bvp_matches_profiles(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, out, _ = run(capsys, "bvp", "--kl", "3", "--stride", "100", "--report", str(report))
    assert code == EXIT_OK
    rep = json.loads(report.read_text())
    assert rep["converged"] and not rep["trivial"] and rep["seed_index"] == 0
    header, rows = table(out)
    assert header[:4] == ["z", "kz_over_delta", "re_E1", "im_E1"]
    rows = rows.astype(float)
    assert len(rows) == 31
    z = rows[:, 1] / 3.0
    e1 = np.hypot(rows[:, 2], rows[:, 3])
    code, pout, _ = run(capsys, "profiles", "--kl", "3", "--n-points", "31")
    prof = table(pout)[1].astype(float)
    assert np.allclose(prof[:, 0], z, atol=1e-12)
    assert np.max(np.abs(prof[:, 2] - e1)) <= 1e-4
    # Manley-Rowe columns are constant
    assert np.ptp(rows[:, 10]) <= 1e-10 and np.ptp(rows[:, 12]) <= 1e-10


def test_bvp_below_threshold(capsys):
    code, out, err = run(capsys, "bvp", "--kl", "1.0", "--stride", "500")
    assert code == EXIT_TRIVIAL
    assert '"trivial": true' in err


def test_bvp_unequal_pumps(capsys):
    code, out, _ = run(capsys, "bvp", "--kl", "4.712", "--omega20", "0.8", "--stride", "1000")
    assert code == EXIT_OK
    rows = table(out)[1].astype(float)
    c = rows[:, 10:14]
    assert np.max(np.ptp(c[:, :3], axis=0)) <= 1e-9
    assert abs(complex(rows[-1, 4], rows[-1, 5])) <= 1e-9


def test_bvp_non_convergence(capsys):
    code, _, err = run(capsys, "bvp", "--kl", "8", "--max-iter", "1")
    assert code == EXIT_NO_CONVERGENCE
    assert "best_residual" in err


def test_deterministic_output(capsys):
    args = ("bvp", "--kl", "2.5", "--omega20", "0.9", "--stride", "50")
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second
    a = run(capsys, "curve", "--n-points", "7")[1]
    assert a == run(capsys, "curve", "--n-points", "7")[1]


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n_points": 3, "start": 2.0, "stop": 4.0}))
    _, out, _ = run(capsys, "curve", "--config", str(cfg))
    kls = [float(line.split(",")[0]) for line in out.splitlines()[1:]]
    assert kls == [2.0, 3.0, 4.0]
    _, out, _ = run(capsys, "curve", "--config", str(cfg), "--start", "3")
    kls = [float(line.split(",")[0]) for line in out.splitlines()[1:]]
    assert kls == [3.0, 3.5, 4.0]


def test_config_errors(capsys, tmp_path):
    assert run(capsys, "curve", "--config", str(tmp_path / "missing.json"))[0] == EXIT_IO
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "curve", "--config", str(bad))[0] == EXIT_INVALID
    unknown = tmp_path / "unknown.json"
    unknown.write_text('{"colour": 1}')
    assert run(capsys, "curve", "--config", str(unknown))[0] == EXIT_INVALID


def test_unwritable_output(capsys, tmp_path):
    target = tmp_path / "missing-dir" / "out.csv"
    assert run(capsys, "curve", "-o", str(target))[0] == EXIT_IO


def test_output_file(capsys, tmp_path):
    target = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "curve", "--n-points", "3", "-o", str(target))
    assert code == EXIT_OK and out == ""
    assert target.read_text().startswith("kL_over_delta,")


def test_usage_error_code():
    with pytest.raises(SystemExit) as info:
        main(["curve", "--bogus"])
    assert info.value.code == EXIT_INVALID


def test_help_documents_flags(capsys):
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["bvp", "--help"])
    text = capsys.readouterr().out
    for flag in ("--omega10", "--omega20", "--phase1", "--phase2", "--ac-stark", "--config",
                 "--format", "--report", "--stride", "--tol"):
        assert flag in text


def test_number_format():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(-0.0) == "0"
    assert fmt(True) == "true"
    assert fmt(12345678901234.0) == "1.23456789012e+13"
