"""Config parsing, presets, CSV round trips, subcommands, exit codes."""

import re
import subprocess
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memwave.cli import (PRESET_NAMES, ConfigError, main, parse_config,
                         preset, read_energy_csv, resolve_points,
                         serialize_manifest, write_energy_csv,
                         write_snapshots_csv, write_trace_csv)
from memwave.kernels import KdvbParams, KernelFamily, KsParams

BASE = """\
[model]
type = kdvb
w0 = 0.01
w1 = 1
w2 = 2
w3 = 6
w4 = 0.1

[kernel]
family = exponential
d1 = 2
d2 = 0.01

[grid]
M = 32
dt = 0.01
T = 0.05
L = 8
ds = 0.1

[run]
y0 = 1-cos(2*pi*x)
y1 = 0
"""

BASE_KS = """\
[model]
type = ks
n0 = 0.01
n1 = 1
n2 = 0.1
n3 = 0.1

[kernel]
family = exponential
d1 = 1
d2 = 0.1

[grid]
M = 32
dt = 0.01
T = 0.05
L = 8
ds = 0.1

[run]
y0 = 1-cos(2*pi*x)
y1 = 0
"""


def _swap(text, old, new):
    assert old in text
    return text.replace(old, new)


# -- parse errors ----------------------------------------------------------

def test_empty_text_rejected():
    with pytest.raises(ConfigError, match=r"missing \[model\] section"):
        parse_config("")


def test_malformed_section_header():
    with pytest.raises(ConfigError) as err:
        parse_config("[model\ntype = kdvb\n")
    assert str(err.value).startswith("line 1, col 1: malformed section header")


def test_unknown_section():
    with pytest.raises(ConfigError, match=(
            r"unknown section \[foo\]; expected one of "
            r"\[model\], \[kernel\], \[grid\], \[run\]")):
        parse_config("[foo]\n")


def test_key_outside_section():
    with pytest.raises(ConfigError) as err:
        parse_config("w0 = 1\n[model]\n")
    assert str(err.value) == "line 1, col 1: key outside any section"


def test_missing_equals_points_past_line_end():
    with pytest.raises(ConfigError) as err:
        parse_config("[model]\ntype kdvb\n")
    assert str(err.value) == "line 2, col 10: expected 'key = value'"


def test_unknown_key_reports_its_column():
    with pytest.raises(ConfigError) as err:
        parse_config("[model]\ntype = kdvb\n  bogus = 1\n")
    assert str(err.value) == "line 3, col 3: unknown key 'bogus' in [model]"


def test_duplicate_key():
    with pytest.raises(ConfigError, match=r"duplicate key 'w0' in \[model\]"):
        parse_config("[model]\ntype = kdvb\nw0 = 1\nw0 = 2\n")


def test_empty_value():
    with pytest.raises(ConfigError, match="empty value for 'type'"):
        parse_config("[model]\ntype =\n")


def test_invalid_number():
    with pytest.raises(ConfigError, match="invalid number 'abc' for w0"):
        parse_config(_swap(BASE, "w0 = 0.01", "w0 = abc"))


def test_invalid_integer():
    with pytest.raises(ConfigError, match=r"invalid integer '2.5' for M"):
        parse_config(_swap(BASE, "M = 32", "M = 2.5"))


def test_invalid_boolean():
    text = BASE + "strict_hypotheses = yep\n"
    with pytest.raises(ConfigError, match=(
            "invalid boolean 'yep' for strict_hypotheses; use true or false")):
        parse_config(text)


def test_unknown_model_type():
    with pytest.raises(ConfigError, match="unknown model type 'burgers'"):
        parse_config(_swap(BASE, "type = kdvb", "type = burgers"))


def test_cross_model_key_rejected():
    text = _swap(BASE, "w4 = 0.1", "w4 = 0.1\nn0 = 1")
    with pytest.raises(ConfigError,
                       match="key 'n0' does not apply to model 'kdvb'"):
        parse_config(text)


@pytest.mark.parametrize("text,message", [
    (_swap(BASE, "w0 = 0.01", "w0 = -0.1"), r"invariant violated: w0 >= 0"),
    (_swap(BASE, "w1 = 1", "w1 = 0"), r"invariant violated: w1 > 0"),
    (_swap(BASE, "w4 = 0.1", "w4 = 1.5"), r"invariant violated: \|w4\| < 1"),
    (_swap(BASE_KS, "n0 = 0.01", "n0 = 0"), r"invariant violated: n0 > 0"),
])
def test_model_invariants_fail_with_line(text, message):
    with pytest.raises(ConfigError, match=message) as err:
        parse_config(text)
    assert str(err.value).startswith("line ")


def test_unknown_kernel_family():
    with pytest.raises(ConfigError, match=(
            "unknown kernel family 'gaussian'; use exponential or "
            "polynomial")):
        parse_config(_swap(BASE, "family = exponential", "family = gaussian"))


def test_kernel_domain_error_carries_line():
    text = _swap(_swap(BASE, "family = exponential", "family = polynomial"),
                 "d1 = 2", "d1 = 1")
    with pytest.raises(ConfigError, match="d1") as err:
        parse_config(text)
    assert str(err.value).startswith("line ")


def test_unknown_initial_profile():
    with pytest.raises(ConfigError, match=r"unknown initial profile "
                                          r"'tanh\(x\)'"):
        parse_config(_swap(BASE, "y0 = 1-cos(2*pi*x)", "y0 = tanh(x)"))


def test_unknown_trace_history():
    with pytest.raises(ConfigError, match=r"unknown trace history "
                                          r"'cos\(t\)'"):
        parse_config(_swap(BASE, "y1 = 0", "y1 = cos(t)"))


def test_missing_required_key():
    with pytest.raises(ConfigError,
                       match=r"missing required key 'd1' in \[kernel\]"):
        parse_config(_swap(BASE, "d1 = 2\n", ""))


def test_empty_axis_element():
    with pytest.raises(ConfigError, match="empty element in list for M"):
        parse_config(_swap(BASE, "M = 32", "M = 16,,32"))


def test_snapshot_stride_floor():
    with pytest.raises(ConfigError,
                       match="snapshot_stride must be at least 1"):
        parse_config(BASE + "snapshot_stride = 0\n")


def test_grid_error_has_no_location():
    # SimConfig validation happens after scanning, so no line is known
    with pytest.raises(ConfigError, match="dt must be positive") as err:
        parse_config(_swap(BASE, "dt = 0.01", "dt = -0.01"))
    assert "line" not in str(err.value)


# -- positive parses and round trips ---------------------------------------

def test_parse_base_config():
    m = parse_config(BASE)
    cfg = m.config
    assert cfg.model == "kdvb"
    assert cfg.params == KdvbParams(0.01, 1.0, 2.0, 6.0, 0.1)
    assert cfg.kernel.family is KernelFamily.EXPONENTIAL
    assert (cfg.M, cfg.dt, cfg.T, cfg.L, cfg.ds) == (32, 0.01, 0.05, 8, 0.1)
    assert cfg.y0.label == "1-cos(2*pi*x)"
    assert cfg.y1.label == "0"
    assert m.axes == {}
    assert m.out_dir is None and m.snapshot_stride is None
    assert not m.emit_plots


def test_comments_and_blank_lines_ignored():
    text = "# leading comment\n\n" + BASE.replace(
        "w0 = 0.01", "w0 = 0.01  # tiny diffusion")
    assert parse_config(text).config.params.w0 == 0.01


def test_comma_lists_become_axes():
    text = _swap(_swap(BASE, "w0 = 0.01", "w0 = 0.01, 0.02"),
                 "M = 32", "M = 16, 32")
    m = parse_config(text)
    assert list(m.axes) == ["model.w0", "grid.M"]
    assert m.axes["model.w0"] == [0.01, 0.02]
    assert m.axes["grid.M"] == [16, 32]
    # first element seeds the base config
    assert m.config.params.w0 == 0.01 and m.config.M == 16


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_serialize_round_trip_presets(name):
    m = preset(name)
    assert parse_config(serialize_manifest(m)) == m


def test_serialize_round_trip_with_axes_and_outputs():
    text = _swap(BASE, "d2 = 0.01", "d2 = 0.01, 0.02")
    text += "snapshot_stride = 3\nout = some/dir\nemit_plots = true\n"
    m = parse_config(text)
    rendered = serialize_manifest(m)
    assert "d2 = 0.01, 0.02" in rendered
    assert "out = some/dir" in rendered
    assert parse_config(rendered) == m


@settings(max_examples=25, deadline=None)
@given(w0=st.floats(0.0, 10.0), w4=st.floats(-0.99, 0.99),
       d2=st.floats(1e-6, 5.0), dt=st.floats(1e-4, 1.0))
def test_round_trip_survives_arbitrary_numerics(w0, w4, d2, dt):
    text = _swap(_swap(_swap(_swap(BASE, "w0 = 0.01", f"w0 = {w0!r}"),
                             "w4 = 0.1", f"w4 = {w4!r}"),
                       "d2 = 0.01", f"d2 = {d2!r}"),
                 "dt = 0.01", f"dt = {dt!r}")
    m = parse_config(text)
    assert parse_config(serialize_manifest(m)) == m


# -- presets ---------------------------------------------------------------

_PRESET_TABLE = {
    "case1": ("kdvb", KdvbParams(0.01, 1.0, 2.0, 6.0, 0.1),
              KernelFamily.EXPONENTIAL, 2.0, 0.01,
              512, 0.0048828125, 5.0, 2048, 0.0146484375, "0"),
    "case2": ("kdvb", KdvbParams(0.005, 1.0, 2.0, 6.0, -0.9),
              KernelFamily.EXPONENTIAL, 1.0, 0.01,
              512, 0.0048828125, 5.0, 2048, 0.0146484375, "sin(t)/10"),
    "case3": ("ks", KsParams(0.01, 1.0, 0.1, 0.1),
              KernelFamily.EXPONENTIAL, 1.0, 0.1,
              256, 0.00390625, 1.0, 1024, 0.029296875, "0"),
    "case4": ("ks", KsParams(0.01, 1.0, 0.1, 0.1),
              KernelFamily.EXPONENTIAL, 1.0, 0.1,
              256, 0.009375, 0.6, 1024, 0.0244140625, "sin(t)/100"),
    "case5": ("ks", KsParams(0.05, 1.0, 0.1, 1.0),
              KernelFamily.POLYNOMIAL, 2.0, 0.01,
              256, 0.01953125, 5.0, 1024, 0.029296875, "0"),
}


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_preset_parameters(name):
    model, params, family, d1, d2, M, dt, T, L, ds, y1 = _PRESET_TABLE[name]
    cfg = preset(name).config
    assert cfg.model == model
    assert cfg.params == params
    assert cfg.kernel.family is family
    assert (cfg.kernel.d1, cfg.kernel.d2) == (d1, d2)
    assert (cfg.M, cfg.dt, cfg.T, cfg.L, cfg.ds) == (M, dt, T, L, ds)
    assert cfg.y0.label == "1-cos(2*pi*x)"
    assert cfg.y1.label == y1


def test_full_scale_grids():
    cfg = preset("case1", full_scale=True).config
    assert (cfg.M, cfg.L) == (8192, 16384)
    assert cfg.dt == 5.0 / 1023
    assert cfg.ds == 30.0 / 16384
    assert cfg.T == 5.0
    cfg = preset("case4", full_scale=True).config
    assert (cfg.M, cfg.L) == (515, 1023)
    assert cfg.dt == 0.6 / 63
    assert cfg.ds == 25.0 / 1023


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset 'case9'"):
        preset("case9")


# -- sweep point expansion -------------------------------------------------

def test_resolve_points_no_axes():
    pts = resolve_points(parse_config(BASE))
    assert len(pts) == 1
    assert pts[0].label == "point_000"
    assert pts[0].values == {}
    assert pts[0].config == parse_config(BASE).config


def test_resolve_points_cartesian_order():
    text = _swap(_swap(BASE, "w0 = 0.01", "w0 = 0.01, 0.02"),
                 "M = 32", "M = 16, 32")
    pts = resolve_points(parse_config(text))
    assert [p.label for p in pts] == [
        "point_000_w0=0.01_M=16", "point_001_w0=0.01_M=32",
        "point_002_w0=0.02_M=16", "point_003_w0=0.02_M=32"]
    assert pts[3].config.params.w0 == 0.02
    assert pts[3].config.M == 32
    assert pts[3].values == {"model.w0": 0.02, "grid.M": 32}


def test_resolve_points_kernel_axis():
    pts = resolve_points(parse_config(_swap(BASE, "d2 = 0.01",
                                            "d2 = 0.01, 0.03")))
    assert [p.config.kernel.d2 for p in pts] == [0.01, 0.03]
    assert pts[1].label == "point_001_d2=0.03"


# -- CSV emission ----------------------------------------------------------

def test_energy_csv_round_trip_is_exact(tmp_path):
    t = np.linspace(0.0, 2.0, 41)
    e = 1.5 * np.exp(-0.3 * t) + 1e-17 * np.arange(41)
    path = tmp_path / "energy.csv"
    write_energy_csv(path, t, e)
    assert path.read_text().startswith("t,E\n")
    series = read_energy_csv(path)
    assert np.array_equal(series.times, t)
    assert np.array_equal(series.energies, e)


def test_energy_csv_header_check(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,EN\n0,1\n")
    with pytest.raises(ValueError, match="unexpected energy header"):
        read_energy_csv(path)


def test_snapshots_csv_layout(tmp_path):
    x = np.linspace(0.0, 1.0, 5)
    snaps = [(0.0, np.arange(5.0)), (0.25, np.arange(5.0) ** 2)]
    path = tmp_path / "snapshots.csv"
    write_snapshots_csv(path, snaps, x)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,y"
    assert len(lines) == 1 + 2 * 5
    t, xv, yv = (float(p) for p in lines[-1].split(","))
    assert (t, xv, yv) == (0.25, 1.0, 16.0)


def test_trace_csv_layout(tmp_path):
    path = tmp_path / "trace.csv"
    write_trace_csv(path, [(0.0, 1.25, 0.5, -0.5), (0.1, 2.5, 0.25, 0.125)])
    lines = path.read_text().splitlines()
    assert lines[0] == "t,trace,y1_node,yM1_node"
    parsed = [float(p) for p in lines[2].split(",")]
    assert parsed == [0.1, 2.5, 0.25, 0.125]


# -- subcommands through main() --------------------------------------------

def _write_cfg(tmp_path, text, name="small.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_run_writes_outputs(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, BASE)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    for fname in ("energy.csv", "snapshots.csv", "trace.csv", "summary.txt"):
        assert (out / fname).is_file()
    # 5 steps of dt=0.01 over T=0.05, plus the initial row
    assert len((out / "energy.csv").read_text().splitlines()) == 7
    printed = capsys.readouterr().out
    assert "wrote" in printed and "over 5 steps" in printed
    assert (out / "plot.sh").exists() is False


def test_run_summary_schema(tmp_path):
    cfg = _write_cfg(tmp_path, BASE)
    out = tmp_path / "out"
    main(["run", "--config", str(cfg), "--out", str(out)])
    lines = (out / "summary.txt").read_text().splitlines()
    assert all(re.fullmatch(r"[A-Za-z0-9_]+ = .+", ln) for ln in lines)
    keys = [ln.split(" = ")[0] for ln in lines]
    assert keys == [
        "model", "kernel_family", "alpha0", "hypothesis_passed",
        "hypothesis_violations", "kappa", "kappa_eps", "predicted_rate",
        "M", "dt", "T", "L", "ds", "steps",
        "energy_initial", "energy_final", "monotonicity_defect",
        "max_boundary_residual", "max_picard_iters", "backend",
        "fit_window_lo", "fit_window_hi", "exp_rate", "exp_amplitude",
        "exp_r2", "poly_rate", "poly_amplitude", "poly_r2"]
    values = dict(ln.split(" = ", 1) for ln in lines)
    assert values["model"] == "kdvb"
    assert values["hypothesis_passed"] == "true"
    assert values["M"] == "32" and values["steps"] == "5"
    assert float(values["energy_initial"]) > 0.0
    assert float(values["exp_r2"]) <= 1.0


def test_run_default_out_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = _write_cfg(tmp_path, BASE, name="wave.cfg")
    assert main(["run", "--config", str(cfg)]) == 0
    assert (tmp_path / "runs" / "wave" / "energy.csv").is_file()


def test_run_out_key_and_flag_precedence(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = _write_cfg(tmp_path, BASE + "out = fromfile\n")
    assert main(["run", "--config", str(cfg)]) == 0
    assert (tmp_path / "fromfile" / "energy.csv").is_file()
    out = tmp_path / "flagged"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "energy.csv").is_file()


def test_run_emit_plots_writes_script(tmp_path):
    cfg = _write_cfg(tmp_path, BASE + "emit_plots = true\n")
    out = tmp_path / "out"
    main(["run", "--config", str(cfg), "--out", str(out)])
    script = out / "plot.sh"
    assert script.is_file()
    body = script.read_text()
    assert body.startswith("#!/bin/sh\n")
    assert 'plot-energy "$dir"' in body and 'plot-solution "$dir"' in body
    assert script.stat().st_mode & 0o111


def test_run_snapshot_stride(tmp_path):
    cfg = _write_cfg(tmp_path, BASE)
    out = tmp_path / "out"
    main(["run", "--config", str(cfg), "--out", str(out),
          "--snapshot-stride", "2"])
    lines = (out / "snapshots.csv").read_text().splitlines()[1:]
    times = sorted({float(ln.split(",")[0]) for ln in lines})
    # steps 0, 2, 4 plus the final step 5
    assert times == pytest.approx([0.0, 0.02, 0.04, 0.05])
    assert len(lines) == 4 * 33


def test_exactly_one_input_source(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, BASE)
    assert main(["run", "--config", str(cfg), "--preset", "case1"]) == 2
    assert main(["run"]) == 2
    err = capsys.readouterr().err
    assert "exactly one of --config or --preset is required" in err


def test_full_scale_requires_preset(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, BASE)
    assert main(["run", "--config", str(cfg), "--full-scale"]) == 2
    assert "--full-scale applies to presets only" in capsys.readouterr().err


def test_missing_config_file_is_io_error(tmp_path, capsys):
    missing = tmp_path / "nope.cfg"
    assert main(["run", "--config", str(missing)]) == 1
    assert capsys.readouterr().err.startswith("i/o error:")


def test_invariant_failure_exit_code(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, _swap(BASE, "w4 = 0.1", "w4 = 1.5"))
    assert main(["run", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("config error: line ")
    assert "invariant violated: |w4| < 1" in err


def test_check_case1_output(capsys):
    assert main(["check", "--preset", "case1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "case1: model kdvb, kernel exponential(d1=2.0, d2=0.01)"
    assert out[1] == "alpha0 = 0.005"
    rows = [ln for ln in out if ln.startswith("  ")]
    assert len(rows) == 4
    grammar = re.compile(r"  [a-z0-9_]+: value = \S+, bound = \S+ \[ok\]")
    assert all(grammar.fullmatch(ln) for ln in rows)
    smallness = next(ln for ln in rows if ln.startswith("  memory_smallness"))
    bound = float(smallness.split("bound = ")[1].split(" ")[0])
    assert bound == pytest.approx(0.45, abs=1e-12)
    assert any(ln.startswith("kappa = ") and "(eps = " in ln for ln in out)
    assert any(ln.startswith("predicted_rate = ") for ln in out)
    assert out[-1] == "PASS"


def test_check_case3_reports_violations(capsys):
    # non-strict check still exits 0; the report carries the failures
    assert main(["check", "--preset", "case3"]) == 0
    out = capsys.readouterr().out.splitlines()
    violated = [ln for ln in out if ln.endswith("[VIOLATED]")]
    assert len(violated) == 2
    assert any("n2_below_pi2_n0" in ln for ln in violated)
    assert any("memory_smallness" in ln for ln in violated)
    assert any(ln.startswith("vartheta = ") for ln in out)
    assert out[-1] == "FAIL (2 violations)"


def test_check_strict_exit_code(capsys):
    assert main(["check", "--preset", "case3", "--strict"]) == 3
    assert capsys.readouterr().err.startswith("hypothesis failure:")


def test_run_strict_exit_code(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--preset", "case3", "--strict", "--out", str(out)])
    assert rc == 3
    assert capsys.readouterr().err.startswith("hypothesis failure:")
    assert not out.exists()


def test_run_solver_failure_exit_code(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, BASE + "picard_max = 1\n")
    assert main(["run", "--config", str(cfg),
                 "--out", str(tmp_path / "out")]) == 4
    err = capsys.readouterr().err
    assert err.startswith("solver failure:")
    assert "Picard iteration did not converge" in err


@pytest.mark.parametrize("workers", ["1", "2"])
def test_sweep_runs_every_point(tmp_path, capsys, workers):
    cfg = _write_cfg(tmp_path, _swap(BASE, "M = 32", "M = 16, 32"))
    out = tmp_path / "sweep"
    rc = main(["sweep", "--config", str(cfg), "--out", str(out),
               "--workers", workers])
    assert rc == 0
    assert f"swept 2 points into {out} (2 ok, 0 failed)" \
        in capsys.readouterr().out
    lines = (out / "index.csv").read_text().splitlines()
    assert lines[0] == "label,dir,grid.M,status,energy_final"
    assert len(lines) == 3
    for label in ("point_000_M=16", "point_001_M=32"):
        row = next(ln for ln in lines[1:] if ln.startswith(label))
        assert row.split(",")[3] == "ok"
        assert (out / label / "energy.csv").is_file()
        assert (out / label / "summary.txt").is_file()


def test_sweep_reports_failed_points(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, _swap(BASE, "w1 = 1", "w1 = 1, -1"))
    out = tmp_path / "sweep"
    rc = main(["sweep", "--config", str(cfg), "--out", str(out),
               "--workers", "1"])
    assert rc == 2
    assert "(1 ok, 1 failed)" in capsys.readouterr().out
    lines = (out / "index.csv").read_text().splitlines()
    bad = next(ln for ln in lines if "point_001" in ln)
    fields = bad.split(",")
    assert fields[3] == "config_error"
    assert fields[4] == "nan"


def test_convergence_command(tmp_path, capsys):
    text = _swap(_swap(BASE, "M = 32", "M = 8"), "dt = 0.01", "dt = 0.0125")
    cfg = _write_cfg(tmp_path, text)
    assert main(["convergence", "--config", str(cfg),
                 "--levels", "8,16,32"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "levels = 8,16,32"
    assert out[1].startswith("observed_order = ")
    float(out[1].split(" = ")[1])


def test_plotscript_command(tmp_path, capsys):
    assert main(["plotscript", "--out", str(tmp_path)]) == 0
    assert "wrote" in capsys.readouterr().out
    assert (tmp_path / "plot.sh").is_file()
    missing = tmp_path / "absent"
    assert main(["plotscript", "--out", str(missing)]) == 2
    assert "does not exist" in capsys.readouterr().err


def test_console_script_smoke():
    proc = subprocess.run(["memwave", "check", "--preset", "case1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "PASS"
