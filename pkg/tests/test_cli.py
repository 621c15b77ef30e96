import contextlib
import io

import pytest

from tfbh.cli import (
    RunConfig,
    TableRow,
    builtin_exact,
    emit_surface,
    main,
    run_table,
)
from tfbh.errors import ConfigError


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        rc = main(argv)
    return rc, out.getvalue(), err.getvalue()


def test_builtin_exact_values():
    assert builtin_exact(1, (0.5, 0.5)) == pytest.approx(0.348645, abs=5e-7)
    assert builtin_exact(1, (0.0, 0.0)) == pytest.approx(0.5)
    assert builtin_exact(2, (0.5, 1 / 3)) == pytest.approx(0.774897, abs=5e-7)
    with pytest.raises(ConfigError):
        builtin_exact(1, (1.5, 0.5))
    with pytest.raises(ConfigError):
        builtin_exact(3, (0.5, 0.5))


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(example="ex1", n=0)
    with pytest.raises(ConfigError):
        RunConfig(example="ex1", alphas=(1.5,))
    with pytest.raises(ConfigError):
        RunConfig(example="ex1", tau_list=(2.0,))
    with pytest.raises(ConfigError):
        RunConfig(example="ex1", fmt="xml")


def test_run_table_rows_and_consistency():
    cfg = RunConfig(example="ex1", n=6, alphas=(0.9,), tau_list=(0.5,))
    tables = run_table(cfg, 0.9)
    assert len(tables) == 1
    tau, rows, l2, linf = tables[0]
    assert tau == 0.5
    assert len(rows) == 5
    for r in rows:
        assert isinstance(r, TableRow)
        assert r.abs_error == pytest.approx(abs(r.w_exact - r.w_approx),
                                            abs=1e-15)
    assert max(r.abs_error for r in rows) == pytest.approx(linf)
    assert linf <= 2e-2


def test_cli_pretty_and_determinism():
    argv = ["--example", "1", "--n", "6", "--alpha", "0.9", "--tau", "0.5"]
    rc1, out1, _ = _run(argv)
    rc2, out2, _ = _run(argv)
    assert rc1 == rc2 == 0
    assert out1 == out2  # byte-identical for identical config
    assert "alpha=0.9" in out1 and "n=6" in out1


def test_cli_csv_schema(tmp_path):
    out = tmp_path / "table.csv"
    rc, _, _ = _run(["--example", "1", "--n", "6", "--alpha", "0.9",
                     "--tau", "0.25,0.5", "--format", "csv",
                     "--out", str(out), "--seed-metadata"])
    assert rc == 0
    lines = out.read_text().splitlines()
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "tau,zeta,w_exact,w_approx,abs_error"
    data = [l for l in lines if not l.startswith("#")][1:]
    assert len(data) == 10  # 5 rows per tau
    for row in data:
        parts = row.split(",")
        assert len(parts) == 5
        assert "e" in parts[4]  # scientific notation for errors
        assert abs(abs(float(parts[2]) - float(parts[3])) - float(parts[4])) < 1e-6
    assert any(l.startswith("# n=6") for l in lines)
    assert any(l.startswith("# numpy=") for l in lines)


def test_surface_output():
    cfg = RunConfig(example="ex1", n=6, alphas=(0.9,))
    text = emit_surface(cfg, 0.9, 2)
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines[0] == "zeta,tau,w_exact,w_approx,error"
    assert len(lines) == 5  # header + 2x2 grid
    # tau = 0 rows: exact column equals the initial data
    for row in lines[1:]:
        z, t, ex, ap, err = (float(x) for x in row.split(","))
        if t == 0.0:
            assert ex == pytest.approx(builtin_exact(1, (z, 0.0)), abs=1e-6)
            assert ap == pytest.approx(ex, abs=1e-6)
    with pytest.raises(ConfigError):
        emit_surface(cfg, 0.9, 1)


def test_alpha_sweep_one_file_per_alpha(tmp_path):
    out = tmp_path / "surf.csv"
    rc, _, _ = _run(["--example", "1", "--n", "4", "--alpha", "0.5,0.75,0.9",
                     "--surface", "3", "--out", str(out)])
    assert rc == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["surf_alpha0.5.csv", "surf_alpha0.75.csv",
                     "surf_alpha0.9.csv"]


def test_exit_codes(tmp_path):
    rc, _, err = _run([])
    assert rc == 2 and "required" in err
    rc, _, _ = _run(["--example", "1", "--alpha", "1.5"])
    assert rc == 2
    rc, _, _ = _run(["--example", "1", "--alpha", "0.9;0.5"])
    assert rc == 2
    # divergence: absurd reaction strength through a config file
    cfg = tmp_path / "blowup.txt"
    cfg.write_text("alpha = 0.9\nnu = -1\nbeta = 1\neta = 1e160\n"
                   "gamma = 1\ndelta = 2\ndata = ex1\n")
    rc, _, err = _run(["--config", str(cfg), "--n", "6"])
    assert rc == 3 and "diverged" in err
    # I/O failure: unwritable output path
    rc, _, err = _run(["--example", "1", "--n", "4",
                       "--out", str(tmp_path / "no" / "such" / "dir.csv")])
    assert rc == 4


def test_grid_flag_forms():
    rc, out, _ = _run(["--example", "1", "--n", "6", "--grid", "3"])
    assert rc == 0
    assert "0.25000" in out and "0.75000" in out
    rc, out, _ = _run(["--example", "1", "--n", "6", "--grid", "0.1,0.9"])
    assert rc == 0
    assert "0.10000" in out and "0.90000" in out
    rc, _, _ = _run(["--example", "1", "--grid", "abc"])
    assert rc == 2
