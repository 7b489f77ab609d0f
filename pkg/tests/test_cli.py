import csv
import io
import json
import math

import pytest

from semiseries import cli


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_partition_harmonic(capsys):
    rc, out, _ = run(capsys, "partition", "--potential", "harmonic", "--g", "1", "--theta", "1")
    assert rc == 0
    r = rows(out)
    assert r[0] == list(cli.COLUMNS["partition"])
    assert float(r[1][1]) == pytest.approx(1 / (2 * math.sinh(0.5)), rel=1e-6)


def test_partition_quartic_monotone_and_deterministic(capsys, tmp_path):
    args = ["partition", "--g", "0.3", "--theta", "0.5:2:3", "--theta", "3"]
    rc, out, _ = run(capsys, *args)
    assert rc == 0
    r = rows(out)[1:]
    for col in (1, 2, 3):
        vals = [float(x[col]) for x in r]
        assert all(a > b for a, b in zip(vals, vals[1:]))
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--out", str(f1))[0] == 0
    assert run(capsys, *args, "--out", str(f2), "--jobs", "2")[0] == 0
    assert f1.read_bytes() == f2.read_bytes() == out.encode()


def test_full_precision(capsys):
    _, out, _ = run(capsys, "partition", "--potential", "harmonic", "--theta", "2")
    v = rows(out)[1][1]
    assert len(v.replace(".", "").lstrip("0")) >= 16


def test_table1(capsys):
    rc, out, _ = run(capsys, "table1")
    assert rc == 0
    r = rows(out)
    assert r[0] == ["g", "e0_semiclassical", "e0_exact", "error_percent"]
    by_g = {float(x[0]): [float(v) for v in x[1:]] for x in r[1:]}
    assert by_g[1.2] == pytest.approx([0.639765, 0.637992, 0.28], abs=0.005)
    assert by_g[4.0] == pytest.approx([0.823078, 0.803771, 2.40], abs=0.005)
    for semi, exact, pct in by_g.values():
        assert pct == pytest.approx(100 * (semi - exact) / exact, rel=1e-12)


def test_e0_json(capsys):
    rc, out, _ = run(capsys, "e0", "--g", "0.4", "--format", "json")
    assert rc == 0
    (rec,) = json.loads(out)
    assert rec["e0_semiclassical"] == pytest.approx(0.559258, abs=1e-4)


def test_heat(capsys):
    rc, out, _ = run(capsys, "heat", "--g", "0.3", "--temperature", "0.1", "--temperature", "3")
    assert rc == 0
    r = rows(out)
    assert r[0] == ["T", "C_semiclassical", "C_classical", "C_exact"]
    low, high = ([float(v) for v in x] for x in r[1:])
    assert low[1] < 0.05
    assert abs(high[1] - high[2]) / high[2] < 0.02
    rc, out, _ = run(capsys, "heat", "--potential", "harmonic", "--g", "1", "--theta", "2")
    assert float(rows(out)[1][1]) == pytest.approx(1 / math.sinh(1.0) ** 2, abs=1e-5)


def test_config_file_and_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# archived run\npotential = harmonic\ng = 0.5\ntheta = 1,2\nformat = json\n")
    rc, out, _ = run(capsys, "partition", "--config", str(cfg), "--format", "csv")
    assert rc == 0
    r = rows(out)
    assert [float(x[0]) for x in r[1:]] == [1.0, 2.0]


@pytest.mark.parametrize("argv", [
    ["partition", "--g", "-1"],
    ["partition", "--theta", "0"],
    ["partition", "--theta", "1:2"],
    ["partition", "--bogus"],
    ["table1", "--potential", "harmonic"],
    ["validate", "--only", "nosuch"],
    ["partition", "--config", "/nonexistent/file"],
])
def test_config_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(cli.main(argv))
    assert exc.value.code == cli.EXIT_CONFIG


def test_numeric_failure_exit_2(capsys):
    rc, _, err = run(capsys, "partition", "--g", "0.3", "--theta", "1", "--tol-rel", "1e-300",
                     "--tol-abs", "1e-300")
    assert rc == cli.EXIT_NUMERIC
    assert "numerical failure" in err


def test_validate_only_and_fault_injection(capsys):
    rc, out, _ = run(capsys, "validate", "--only", "elliptic")
    assert rc == 0
    assert out.count("PASS") == 4 and "fluctuations" not in out
    rc, out, err = run(capsys, "validate", "--only", "fluctuations", "--inject-green-offset", "1e-3")
    assert rc == cli.EXIT_VALIDATION
    assert "FAIL" in out and "failed:" in err


def test_validate_full(capsys):
    rc, out, _ = run(capsys, "validate")
    assert rc == 0, out
    assert "FAIL" not in out


def test_parse_thetas():
    assert cli.parse_thetas("1:3:3") == [1.0, 2.0, 3.0]
    assert cli.parse_thetas("0.5, 2") == [0.5, 2.0]
