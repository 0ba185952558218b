"""Command line front end: sectioned key-value configs, the case presets,
run/check/sweep/convergence/plotscript subcommands, and CSV emission."""

from __future__ import annotations

import argparse
import itertools
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from ._accel import BACKEND
from .analysis import EnergySeries, fit_exponential, fit_polynomial, \
    monotonicity_defect, self_convergence
from .history import HistorySpec
from .kernels import (KdvbParams, KernelFamily, KsParams, MemoryKernel,
                      kappa, predicted_decay_rate, vartheta)
from .stepper import (HypothesisError, InitialProfile, SimConfig, StepError,
                      hypothesis_report, run)

_SECTIONS = ("model", "kernel", "grid", "run")
_MODEL_PARAM_KEYS = {"kdvb": ("w0", "w1", "w2", "w3", "w4"),
                     "ks": ("n0", "n1", "n2", "n3")}
_KNOWN_KEYS = {
    "model": ("type", "w0", "w1", "w2", "w3", "w4", "n0", "n1", "n2", "n3"),
    "kernel": ("family", "d1", "d2"),
    "grid": ("M", "dt", "T", "L", "ds"),
    "run": ("y0", "y1", "picard_tol", "picard_max", "strict_hypotheses",
            "snapshot_stride", "out", "emit_plots"),
}
_INT_KEYS = {("grid", "M"), ("grid", "L"), ("run", "picard_max"),
             ("run", "snapshot_stride")}
# numeric model/kernel/grid keys may carry comma lists (sweep axes)
_SWEEPABLE_SECTIONS = ("model", "kernel", "grid")
PRESET_NAMES = ("case1", "case2", "case3", "case4", "case5")


class ConfigError(Exception):
    def __init__(self, message: str, line: Optional[int] = None,
                 col: Optional[int] = None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if col is not None:
                loc += f", col {col}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.col = col


@dataclass
class RunManifest:
    """A parsed config: the base SimConfig plus output options and any
    sweep axes. For an axis key, config holds the first listed value."""

    config: SimConfig
    out_dir: Optional[str] = None
    snapshot_stride: Optional[int] = None
    emit_plots: bool = False
    axes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SweepPoint:
    label: str
    config: SimConfig
    values: dict


def _scan(text: str):
    """First pass: sections and raw key/value strings with line numbers."""
    values: dict[tuple[str, str], str] = {}
    lines: dict[tuple[str, str], int] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not (body.endswith("]") and len(body) > 2):
                raise ConfigError("malformed section header", lineno, 1)
            name = body[1:-1].strip()
            if name not in _SECTIONS:
                allowed = ", ".join(f"[{s}]" for s in _SECTIONS)
                raise ConfigError(f"unknown section [{name}]; expected one of "
                                  f"{allowed}", lineno, 1)
            section = name
            continue
        if section is None:
            raise ConfigError("key outside any section", lineno, 1)
        if "=" not in body:
            raise ConfigError("expected 'key = value'", lineno,
                              len(raw.rstrip()) + 1)
        key, value = body.split("=", 1)
        key = key.strip()
        value = value.strip()
        col = raw.find(key) + 1 if key and key in raw else 1
        if not key:
            raise ConfigError("empty key", lineno, 1)
        if key not in _KNOWN_KEYS[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]",
                              lineno, col)
        if (section, key) in values:
            raise ConfigError(f"duplicate key {key!r} in [{section}]",
                              lineno, col)
        if not value:
            raise ConfigError(f"empty value for {key!r}", lineno, col)
        values[(section, key)] = value
        lines[(section, key)] = lineno
    return values, lines


def _parse_number(text: str, key: str, lineno: int, want_int: bool):
    try:
        if want_int:
            return int(text)
        return float(text)
    except ValueError:
        kind = "integer" if want_int else "number"
        raise ConfigError(f"invalid {kind} {text!r} for {key}",
                          lineno) from None


def _parse_bool(text: str, key: str, lineno: int) -> bool:
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    raise ConfigError(f"invalid boolean {text!r} for {key}; use true or false",
                      lineno)


def parse_config(text: str) -> RunManifest:
    """Parse and validate sectioned key-value config text.

    Numeric keys in [model], [kernel], and [grid] accept comma lists,
    which become sweep axes; the first element seeds the base config.
    """
    values, lines = _scan(text)

    def need(section: str, key: str) -> str:
        if (section, key) not in values:
            raise ConfigError(f"missing required key {key!r} in [{section}]")
        return values[(section, key)]

    def line_of(section: str, key: str) -> int:
        return lines.get((section, key), 0) or 1

    if not any(sec == "model" for sec, _ in values):
        raise ConfigError("missing [model] section")

    axes: dict[str, list] = {}

    def numeric(section: str, key: str):
        """Scalar value of a numeric key; a comma list registers an axis."""
        raw = need(section, key)
        lineno = line_of(section, key)
        want_int = (section, key) in _INT_KEYS
        if "," in raw and section in _SWEEPABLE_SECTIONS:
            parts = [p.strip() for p in raw.split(",")]
            if any(not p for p in parts):
                raise ConfigError(f"empty element in list for {key}", lineno)
            parsed = [_parse_number(p, key, lineno, want_int) for p in parts]
            axes[f"{section}.{key}"] = parsed
            return parsed[0]
        return _parse_number(raw, key, lineno, want_int)

    model_type = need("model", "type")
    if model_type not in ("kdvb", "ks"):
        raise ConfigError(f"unknown model type {model_type!r}; "
                          "use kdvb or ks", line_of("model", "type"))
    for other in _MODEL_PARAM_KEYS["ks" if model_type == "kdvb" else "kdvb"]:
        if ("model", other) in values:
            raise ConfigError(f"key {other!r} does not apply to model "
                              f"{model_type!r}", line_of("model", other))

    pvals = {k: numeric("model", k) for k in _MODEL_PARAM_KEYS[model_type]}
    if model_type == "kdvb":
        if pvals["w0"] < 0.0:
            raise ConfigError("invariant violated: w0 >= 0",
                              line_of("model", "w0"))
        if pvals["w1"] <= 0.0:
            raise ConfigError("invariant violated: w1 > 0",
                              line_of("model", "w1"))
        if abs(pvals["w4"]) >= 1.0:
            raise ConfigError("invariant violated: |w4| < 1",
                              line_of("model", "w4"))
        params = KdvbParams(**pvals)
    else:
        if pvals["n0"] <= 0.0:
            raise ConfigError("invariant violated: n0 > 0",
                              line_of("model", "n0"))
        params = KsParams(**pvals)

    family_raw = need("kernel", "family")
    try:
        family = KernelFamily(family_raw)
    except ValueError:
        raise ConfigError(f"unknown kernel family {family_raw!r}; use "
                          "exponential or polynomial",
                          line_of("kernel", "family")) from None
    try:
        kern = MemoryKernel(family, numeric("kernel", "d1"),
                            numeric("kernel", "d2"))
    except ValueError as exc:
        raise ConfigError(str(exc), line_of("kernel", "d1")) from None

    grid = {k: numeric("grid", k) for k in _KNOWN_KEYS["grid"]}

    y0_raw = need("run", "y0")
    try:
        y0 = InitialProfile.from_label(y0_raw)
    except ValueError as exc:
        raise ConfigError(str(exc), line_of("run", "y0")) from None
    y1_raw = values.get(("run", "y1"), "0")
    try:
        y1 = HistorySpec.from_label(y1_raw)
    except ValueError as exc:
        raise ConfigError(str(exc), line_of("run", "y1")) from None

    kwargs = {}
    if ("run", "picard_tol") in values:
        kwargs["picard_tol"] = _parse_number(values[("run", "picard_tol")],
                                             "picard_tol",
                                             line_of("run", "picard_tol"),
                                             False)
    if ("run", "picard_max") in values:
        kwargs["picard_max"] = _parse_number(values[("run", "picard_max")],
                                             "picard_max",
                                             line_of("run", "picard_max"),
                                             True)
    if ("run", "strict_hypotheses") in values:
        kwargs["strict_hypotheses"] = _parse_bool(
            values[("run", "strict_hypotheses")], "strict_hypotheses",
            line_of("run", "strict_hypotheses"))

    try:
        cfg = SimConfig(model=model_type, params=params, kernel=kern,
                        M=grid["M"], dt=grid["dt"], T=grid["T"],
                        L=grid["L"], ds=grid["ds"], y0=y0, y1=y1, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    stride = None
    if ("run", "snapshot_stride") in values:
        stride = _parse_number(values[("run", "snapshot_stride")],
                               "snapshot_stride",
                               line_of("run", "snapshot_stride"), True)
        if stride < 1:
            raise ConfigError("snapshot_stride must be at least 1",
                              line_of("run", "snapshot_stride"))
    emit_plots = False
    if ("run", "emit_plots") in values:
        emit_plots = _parse_bool(values[("run", "emit_plots")], "emit_plots",
                                 line_of("run", "emit_plots"))
    out_dir = values.get(("run", "out"))

    return RunManifest(config=cfg, out_dir=out_dir, snapshot_stride=stride,
                       emit_plots=emit_plots, axes=axes)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_manifest(manifest: RunManifest) -> str:
    """Config text that parses back to an equal manifest."""
    cfg = manifest.config

    def value_for(section: str, key: str, scalar) -> str:
        axis = manifest.axes.get(f"{section}.{key}")
        if axis is not None:
            return ", ".join(_fmt(v) for v in axis)
        return _fmt(scalar)

    out = ["[model]", f"type = {cfg.model}"]
    for k in _MODEL_PARAM_KEYS[cfg.model]:
        out.append(f"{k} = {value_for('model', k, getattr(cfg.params, k))}")
    out += ["", "[kernel]",
            f"family = {cfg.kernel.family.value}",
            f"d1 = {value_for('kernel', 'd1', cfg.kernel.d1)}",
            f"d2 = {value_for('kernel', 'd2', cfg.kernel.d2)}"]
    out += ["", "[grid]"]
    for k in _KNOWN_KEYS["grid"]:
        out.append(f"{k} = {value_for('grid', k, getattr(cfg, k))}")
    out += ["", "[run]",
            f"y0 = {cfg.y0.label}",
            f"y1 = {cfg.y1.label}",
            f"picard_tol = {_fmt(cfg.picard_tol)}",
            f"picard_max = {cfg.picard_max}",
            f"strict_hypotheses = {_fmt(cfg.strict_hypotheses)}"]
    if manifest.snapshot_stride is not None:
        out.append(f"snapshot_stride = {manifest.snapshot_stride}")
    if manifest.out_dir is not None:
        out.append(f"out = {manifest.out_dir}")
    if manifest.emit_plots:
        out.append("emit_plots = true")
    return "\n".join(out) + "\n"


def _apply_point(cfg: SimConfig, assignment: dict) -> SimConfig:
    params = cfg.params
    kern = cfg.kernel
    grid_updates = {}
    for dotted, value in assignment.items():
        section, key = dotted.split(".", 1)
        if section == "model":
            params = replace(params, **{key: value})
        elif section == "kernel":
            kern = replace(kern, **{key: value})
        else:
            grid_updates[key] = value
    return replace(cfg, params=params, kernel=kern, **grid_updates)


def resolve_points(manifest: RunManifest) -> list[SweepPoint]:
    """Cartesian expansion of the sweep axes, in config order."""
    if not manifest.axes:
        return [SweepPoint("point_000", manifest.config, {})]
    keys = list(manifest.axes)
    points = []
    for idx, combo in enumerate(itertools.product(*manifest.axes.values())):
        assignment = dict(zip(keys, combo))
        cfg = _apply_point(manifest.config, assignment)
        tag = "_".join(f"{k.split('.', 1)[1]}={v:g}"
                       for k, v in assignment.items())
        points.append(SweepPoint(f"point_{idx:03d}_{tag}", cfg, assignment))
    return points


# paper-scale grids, reconstructed from the printed step sizes
_FULL_GRIDS = {
    "case1": dict(M=8192, steps=1023, L=16384, horizon=30.0),
    "case2": dict(M=8192, steps=1023, L=16384, horizon=30.0),
    "case3": dict(M=1027, steps=255, L=1023, horizon=30.0),
    "case4": dict(M=515, steps=63, L=1023, horizon=25.0),
    "case5": dict(M=1027, steps=255, L=1023, horizon=30.0),
}


def preset(name: str, full_scale: bool = False) -> RunManifest:
    """Shipped configuration for one of the five study cases."""
    if name not in PRESET_NAMES:
        known = ", ".join(PRESET_NAMES)
        raise ConfigError(f"unknown preset {name!r}; one of: {known}")
    text = (resources.files("memwave") / "presets" / f"{name}.cfg").read_text()
    manifest = parse_config(text)
    if full_scale:
        g = _FULL_GRIDS[name]
        cfg = manifest.config
        manifest.config = replace(cfg, M=g["M"], dt=cfg.T / g["steps"],
                                  L=g["L"], ds=g["horizon"] / g["L"])
    return manifest


def write_energy_csv(path: Path, times, energies) -> None:
    with open(path, "w") as fh:
        fh.write("t,E\n")
        for t, e in zip(times, energies):
            fh.write(f"{t:.17g},{e:.17g}\n")


def read_energy_csv(path: Path) -> EnergySeries:
    times = []
    energies = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,E":
            raise ValueError(f"unexpected energy header {header!r}")
        for row in fh:
            t, e = row.strip().split(",")
            times.append(float(t))
            energies.append(float(e))
    return EnergySeries(times, energies)


def write_snapshots_csv(path: Path, snapshots, x_grid) -> None:
    with open(path, "w") as fh:
        fh.write("t,x,y\n")
        for t, profile in snapshots:
            for x, y in zip(x_grid, profile):
                fh.write(f"{t:.17g},{x:.17g},{y:.17g}\n")


def write_trace_csv(path: Path, rows) -> None:
    with open(path, "w") as fh:
        fh.write("t,trace,y1_node,yM1_node\n")
        for t, v, y1, ym1 in rows:
            fh.write(f"{t:.17g},{v:.17g},{y1:.17g},{ym1:.17g}\n")


def _summary_pairs(result, cfg: SimConfig) -> list[tuple[str, object]]:
    report = result.hypothesis
    pairs: list[tuple[str, object]] = [
        ("model", cfg.model),
        ("kernel_family", cfg.kernel.family.value),
        ("alpha0", cfg.kernel.alpha0),
        ("hypothesis_passed", report.passed),
        ("hypothesis_violations", len(report.violations)),
    ]
    if cfg.model == "kdvb":
        value, eps = kappa(cfg.kernel, cfg.params)
        pairs += [("kappa", value), ("kappa_eps", eps)]
        rate = predicted_decay_rate(cfg.kernel, cfg.params)
        if rate is not None:
            pairs.append(("predicted_rate", rate))
    else:
        value, eps = vartheta(cfg.kernel, cfg.params)
        pairs += [("vartheta", value), ("vartheta_eps", eps)]
    pairs += [("M", cfg.M), ("dt", cfg.dt), ("T", cfg.T), ("L", cfg.L),
              ("ds", cfg.ds), ("steps", cfg.steps)]
    series = EnergySeries(result.times, result.energies)
    pairs += [
        ("energy_initial", float(result.energies[0])),
        ("energy_final", float(result.energies[-1])),
        ("monotonicity_defect", monotonicity_defect(series)),
        ("max_boundary_residual", result.max_boundary_residual),
        ("max_picard_iters", result.max_picard_iters),
        ("backend", BACKEND),
    ]
    if len(series) >= 3:
        try:
            fe = fit_exponential(series)
            fp = fit_polynomial(series)
            pairs += [
                ("fit_window_lo", fe.window[0]),
                ("fit_window_hi", fe.window[1]),
                ("exp_rate", fe.rate), ("exp_amplitude", fe.amplitude),
                ("exp_r2", fe.r2),
                ("poly_rate", fp.rate), ("poly_amplitude", fp.amplitude),
                ("poly_r2", fp.r2),
            ]
        except ValueError as exc:
            pairs.append(("fit_error", str(exc)))
    return pairs


def write_summary(path: Path, pairs) -> None:
    with open(path, "w") as fh:
        for key, value in pairs:
            fh.write(f"{key} = {_fmt(value)}\n")


def _write_plot_script(out_dir: Path) -> Path:
    script = out_dir / "plot.sh"
    script.write_text(
        "#!/bin/sh\n"
        "# render the energy and solution figures for the run in this"
        " directory\n"
        'dir="$(cd "$(dirname "$0")" && pwd)"\n'
        'plot-energy "$dir"\n'
        'plot-solution "$dir"\n')
    script.chmod(0o755)
    return script


def _write_run_outputs(out_dir: Path, result, emit_plots: bool) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    write_energy_csv(out_dir / "energy.csv", result.times, result.energies)
    write_snapshots_csv(out_dir / "snapshots.csv", result.snapshots,
                        cfg.x_grid)
    write_trace_csv(out_dir / "trace.csv", result.trace_rows)
    write_summary(out_dir / "summary.txt", _summary_pairs(result, cfg))
    if emit_plots:
        _write_plot_script(out_dir)


def _load_manifest(args) -> tuple[RunManifest, str]:
    has_config = getattr(args, "config", None) is not None
    has_preset = getattr(args, "preset", None) is not None
    if has_config == has_preset:
        raise ConfigError("exactly one of --config or --preset is required")
    if has_preset:
        return (preset(args.preset, getattr(args, "full_scale", False)),
                args.preset)
    if getattr(args, "full_scale", False):
        raise ConfigError("--full-scale applies to presets only")
    path = Path(args.config)
    manifest = parse_config(path.read_text())
    return manifest, path.stem


def _out_dir(args, manifest: RunManifest, name: str) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    if manifest.out_dir:
        return Path(manifest.out_dir)
    return Path("runs") / name


def cmd_run(args) -> int:
    manifest, name = _load_manifest(args)
    cfg = manifest.config
    if args.strict:
        cfg.strict_hypotheses = True
    stride = args.snapshot_stride or manifest.snapshot_stride
    out_dir = _out_dir(args, manifest, name)
    result = run(cfg, snapshot_stride=stride)
    _write_run_outputs(out_dir, result, manifest.emit_plots)
    print(f"wrote {out_dir}/energy.csv, snapshots.csv, trace.csv, summary.txt")
    print(f"energy {result.energies[0]:.6g} -> {result.energies[-1]:.6g} "
          f"over {cfg.steps} steps")
    return 0


def cmd_check(args) -> int:
    manifest, name = _load_manifest(args)
    cfg = manifest.config
    report = hypothesis_report(cfg)
    print(f"{name}: model {cfg.model}, kernel {cfg.kernel.family.value}"
          f"(d1={_fmt(cfg.kernel.d1)}, d2={_fmt(cfg.kernel.d2)})")
    print(f"alpha0 = {_fmt(cfg.kernel.alpha0)}")
    for c in report.checks:
        status = "ok" if c.satisfied else "VIOLATED"
        note = f"  ({c.note})" if c.note else ""
        print(f"  {c.name}: value = {_fmt(c.lhs)}, bound = {_fmt(c.rhs)} "
              f"[{status}]{note}")
    if cfg.model == "kdvb":
        value, eps = kappa(cfg.kernel, cfg.params)
        print(f"kappa = {_fmt(value)} (eps = {_fmt(eps)})")
        rate = predicted_decay_rate(cfg.kernel, cfg.params)
        if rate is not None:
            print(f"predicted_rate = {_fmt(rate)}")
    else:
        value, eps = vartheta(cfg.kernel, cfg.params)
        print(f"vartheta = {_fmt(value)} (eps = {_fmt(eps)})")
    if report.passed:
        print("PASS")
    else:
        n = len(report.violations)
        plural = "violation" if n == 1 else "violations"
        print(f"FAIL ({n} {plural})")
        if args.strict:
            raise HypothesisError(report)
    return 0


def _sweep_worker(job) -> tuple[str, str, float]:
    label, text, out_dir, stride, strict = job
    try:
        manifest = parse_config(text)
        cfg = manifest.config
        if strict:
            cfg.strict_hypotheses = True
        result = run(cfg, snapshot_stride=stride)
        _write_run_outputs(Path(out_dir), result, manifest.emit_plots)
        return label, "ok", float(result.energies[-1])
    except HypothesisError:
        return label, "hypothesis_failure", float("nan")
    except StepError:
        return label, "solver_failure", float("nan")
    except (ConfigError, ValueError):
        return label, "config_error", float("nan")
    except OSError:
        return label, "io_error", float("nan")


def cmd_sweep(args) -> int:
    manifest, name = _load_manifest(args)
    points = resolve_points(manifest)
    out_root = _out_dir(args, manifest, name)
    out_root.mkdir(parents=True, exist_ok=True)
    stride = args.snapshot_stride or manifest.snapshot_stride
    jobs = []
    for pt in points:
        sub = RunManifest(config=pt.config, emit_plots=manifest.emit_plots)
        jobs.append((pt.label, serialize_manifest(sub),
                     str(out_root / pt.label), stride, args.strict))
    workers = args.workers or 2
    if workers == 1 or len(jobs) == 1:
        outcomes = [_sweep_worker(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_worker, jobs))

    axis_keys = list(manifest.axes)
    with open(out_root / "index.csv", "w") as fh:
        cols = ["label", "dir"] + axis_keys + ["status", "energy_final"]
        fh.write(",".join(cols) + "\n")
        for pt, (label, status, e_final) in zip(points, outcomes):
            vals = [f"{pt.values[k]:.17g}" for k in axis_keys]
            fh.write(",".join([label, str(out_root / label)] + vals
                              + [status, f"{e_final:.17g}"]) + "\n")
    bad = [s for _, s, _ in outcomes if s != "ok"]
    print(f"swept {len(points)} points into {out_root} "
          f"({len(points) - len(bad)} ok, {len(bad)} failed)")
    if not bad:
        return 0
    codes = {"config_error": 2, "hypothesis_failure": 3, "solver_failure": 4,
             "io_error": 1}
    return codes.get(bad[0], 4)


def cmd_convergence(args) -> int:
    manifest, _ = _load_manifest(args)
    levels = [int(part) for part in args.levels.split(",")]
    order = self_convergence(manifest.config, levels)
    print(f"levels = {','.join(str(m) for m in levels)}")
    print(f"observed_order = {order:.6g}")
    return 0


def cmd_plotscript(args) -> int:
    out_dir = Path(args.out) if args.out else Path(".")
    if not out_dir.is_dir():
        raise ConfigError(f"output directory {out_dir} does not exist")
    script = _write_plot_script(out_dir)
    print(f"wrote {script}")
    return 0


def _add_manifest_args(p: argparse.ArgumentParser,
                       full_scale: bool = True) -> None:
    p.add_argument("--config", help="path to a config file")
    p.add_argument("--preset", choices=PRESET_NAMES,
                   help="shipped case preset")
    if full_scale:
        p.add_argument("--full-scale", action="store_true",
                       dest="full_scale",
                       help="use the study-scale grids (slow)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memwave",
        description="Finite-difference runs of boundary-memory models "
                    "with energy tracking")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate and write CSV outputs")
    _add_manifest_args(p)
    p.add_argument("--out", help="output directory")
    p.add_argument("--strict", action="store_true",
                   help="abort when the model hypotheses fail")
    p.add_argument("--snapshot-stride", type=int, dest="snapshot_stride",
                   help="record every k-th profile")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("check", help="evaluate the model hypotheses")
    _add_manifest_args(p)
    p.add_argument("--strict", action="store_true",
                   help="exit nonzero when the check fails")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("sweep", help="run every point of the config's axes")
    _add_manifest_args(p)
    p.add_argument("--out", help="output root directory")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--workers", type=int, help="parallel worker count")
    p.add_argument("--snapshot-stride", type=int, dest="snapshot_stride")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("convergence", help="doubling refinement study")
    _add_manifest_args(p)
    p.add_argument("--levels", default="64,128,256",
                   help="comma list of doubling grid sizes")
    p.set_defaults(handler=cmd_convergence)

    p = sub.add_parser("plotscript",
                       help="write plot.sh for a run directory")
    p.add_argument("--out", help="run directory (default: current)")
    p.set_defaults(handler=cmd_plotscript)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HypothesisError as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return 3
    except StepError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
