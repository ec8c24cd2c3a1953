"""Command-line runner: ``vortexflow run <config.json> [--strict] [--out DIR]``."""
import argparse
import csv
import dataclasses
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import flow as pv
from . import plots, sphere
from .energy import VortexConfiguration
from .errors import ConfigError, PoleEscape, VortexFlowError
from .gl import (Grid, build_well_prepared, compare_to_ode, current_and_jacobian,
                 energy, gp_flow_step, heat_flow_step, jacobian_mass, locate_vortices)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 1, 2, 3
MODES = ("pv-run", "pv-annihilate-scan", "gl-evolve", "gp-evolve", "compare")


@dataclass
class RunConfig:
    mode: str
    out: str = None
    emit_plots: bool = False
    # initial vortices: chart [p1, p2, d] or sphere [x1, x2, x3, d] rows, or cap sampling
    vortices: list = None
    sphere_vortices: list = None
    n: int = None
    s: float = None
    seed: int = 0
    trials: int = None
    slack: float = None
    # FlowSpec fields
    kind: str = "gradient"
    rk_rel_tol: float = 1e-10
    rk_abs_tol: float = 1e-12
    collision_radius: float = 1e-3
    max_time: float = 10.0
    output_stride: float = 0.01
    continue_after_collision: bool = None
    pole_margin: float = 1e-6
    method: str = "DOP853"
    # field parameters
    epsilon: float = None
    L: float = 6.0
    N: int = 256
    dt: float = None
    steps: int = None
    scheme: str = "strang"
    sample_every: int = 10
    snapshot: bool = True
    far_field: str = "ansatz"
    # compare
    flow: str = "heat"
    horizon: float = None
    n_samples: int = 10
    tolerance: float = 0.05

    def flow_spec(self):
        return pv.FlowSpec(kind=self.kind, rk_rel_tol=self.rk_rel_tol, rk_abs_tol=self.rk_abs_tol,
                           collision_radius=self.collision_radius, max_time=self.max_time,
                           output_stride=self.output_stride,
                           continue_after_collision=self.continue_after_collision,
                           pole_margin=self.pole_margin, method=self.method)


_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_REQUIRED = {
    "pv-run": (),
    "pv-annihilate-scan": ("n", "s", "trials"),
    "gl-evolve": ("epsilon", "dt", "steps", "vortices"),
    "gp-evolve": ("epsilon", "dt", "steps", "vortices"),
    "compare": ("epsilon", "horizon", "vortices"),
}


def _check_type(key, value):
    want = _TYPES[key]
    if value is None:
        return
    ok = {
        str: isinstance(value, str),
        bool: isinstance(value, bool),
        int: isinstance(value, int) and not isinstance(value, bool),
        float: isinstance(value, (int, float)) and not isinstance(value, bool),
        list: isinstance(value, list),
    }[want]
    if not ok:
        raise ConfigError("key %r expects %s, got %r" % (key, want.__name__, value))


def parse_config(data):
    """Validate a flat JSON object and build a RunConfig."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - set(_TYPES))
    if unknown:
        raise ConfigError("unknown keys: %s" % ", ".join(unknown))
    if data.get("mode") not in MODES:
        raise ConfigError("mode must be one of %s" % ", ".join(MODES))
    for k, v in data.items():
        _check_type(k, v)
    mode = data["mode"]
    missing = [k for k in _REQUIRED[mode] if data.get(k) is None]
    if missing:
        raise ConfigError("mode %s requires %s" % (mode, ", ".join(missing)))
    cfg = RunConfig(**data)
    if mode == "pv-run" and cfg.vortices is None and cfg.sphere_vortices is None \
            and (cfg.n is None or cfg.s is None):
        raise ConfigError("pv-run needs vortices, sphere_vortices or cap sampling (n, s)")
    if cfg.epsilon is not None and not 0 < cfg.epsilon <= 0.5:
        raise ConfigError("epsilon must lie in (0, 0.5]")
    if cfg.s is not None and not 0 <= cfg.s < 1:
        raise ConfigError("s must lie in [0, 1)")
    for name, width in (("vortices", 3), ("sphere_vortices", 4)):
        rows = getattr(cfg, name)
        if rows is not None and any(not isinstance(r, list) or len(r) != width for r in rows):
            raise ConfigError("%s rows must have %d entries" % (name, width))
    try:
        cfg.flow_spec()
    except ValueError as exc:
        raise ConfigError(str(exc))
    return cfg


def initial_configuration(cfg):
    if cfg.vortices is not None:
        rows = np.array(cfg.vortices, dtype=float).reshape(-1, 3)
        vc = VortexConfiguration(rows[:, :2], rows[:, 2].astype(int))
    elif cfg.sphere_vortices is not None:
        rows = np.array(cfg.sphere_vortices, dtype=float).reshape(-1, 4)
        vc = VortexConfiguration.from_sphere(sphere.normalize(rows[:, :3]), rows[:, 3].astype(int))
    else:
        rng = np.random.default_rng(cfg.seed)
        vc = pv.sample_cap_configuration(rng, cfg.n, cfg.s, 10.0 * cfg.collision_radius)
    try:
        return vc.validate()
    except ValueError as exc:
        raise ConfigError(str(exc))


# -- output helpers ----------------------------------------------------------

def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def check(value, tolerance, passed=None):
    value = float(value)
    if passed is None:
        passed = bool(value <= tolerance)
    return {"pass": bool(passed), "residual": value, "tolerance": float(tolerance)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# -- point-vortex modes ------------------------------------------------------

def _trace_rows(trace):
    for s in trace.samples:
        c = s.config
        P = c.sphere_points
        for k in range(c.n):
            yield (s.time, int(c.ids[k]), int(c.degrees[k]), *P[k], *c.positions[k],
                   s.W, float(np.linalg.norm(s.V0)), s.pair_sum)


def _write_trace(out, trace, emit_plots):
    write_csv(out / "trace.csv", ["t", "vortex_id", "degree", "x1", "x2", "x3", "p1", "p2",
                                  "W", "V0_norm", "pair_sum"], _trace_rows(trace))
    write_csv(out / "collisions.csv",
              ["t", "x1", "x2", "x3", "participant_ids", "net_degree", "action"],
              ((e.time, *e.location, ";".join(str(i) for i in e.participant_ids),
                e.net_degree, e.action) for e in trace.collisions))
    if emit_plots:
        paths = {}
        for s in trace.samples:
            for k in range(s.config.n):
                key = int(s.config.ids[k])
                paths.setdefault(key, ([], int(s.config.degrees[k])))[0].append(
                    s.config.sphere_points[k])
        (out / "trajectory.svg").write_text(plots.sphere_paths_svg(
            [(np.array(p), d) for p, d in paths.values()]))
        (out / "energy.svg").write_text(plots.curves_svg(
            trace.times, {"W": [s.W for s in trace.samples]}, "renormalized energy W"))


def run_pv(cfg, out):
    spec = cfg.flow_spec()
    cfg0 = initial_configuration(cfg)
    summary = {"initial_vortices": cfg0.n}
    try:
        trace = pv.integrate(cfg0, spec)
    except PoleEscape as exc:
        if exc.trace is not None:
            _write_trace(out, exc.trace, cfg.emit_plots)
        raise
    _write_trace(out, trace, cfg.emit_plots)
    d = pv.diagnostics(trace)
    W0 = abs(trace.samples[0].W) if trace.samples else 0.0
    checks = {}
    if spec.kind == "gradient":
        v0max = max(float(np.linalg.norm(s.V0)) for s in trace.samples)
        # centred differences of the pair sum carry a (4/3) stride^2 |V0|^2 truncation error
        r3_tol = 1e-5 + 2.0 * spec.output_stride**2 * v0max**2
        checks["center_of_mass_law"] = check(d["r1_rel"], 1e-6)
        checks["pair_sum_rate"] = check(d["r3"], r3_tol)
        checks["W_nonincreasing"] = check(d["W_increase"], 1e-10 * max(1.0, W0))
    else:
        checks["W_conserved"] = check(d["W_drift"], 1e-6 * max(W0, np.pi))
    checks["degree_bookkeeping"] = check(0.0, 0.0, d["degree_bookkeeping"])
    checks["collisions_admissible"] = check(0.0, 0.0, d["collisions_admissible"])
    summary.update({
        "final_vortices": trace.final.n,
        "final_time": trace.samples[-1].time,
        "annihilation_time": trace.annihilation_time,
        "n_collisions": len(trace.collisions),
        "residuals": {k: d[k] for k in ("r1", "r1_rel", "r2", "r3", "W_increase", "W_drift")},
    })
    return summary, checks


def run_scan(cfg, out):
    spec = cfg.flow_spec()
    if cfg.max_time == RunConfig.max_time:
        _, bound = pv.annihilation_bound(cfg.n, cfg.s)
        spec = dataclasses.replace(spec, max_time=2.0 * bound + 1.0)
    rep = pv.annihilation_scan(cfg.n, cfg.s, cfg.trials, seed=cfg.seed, spec=spec,
                               slack=cfg.slack)
    write_csv(out / "scan.csv", ["trial", "completion_time", "n_collisions"],
              ((k, t, c) for k, (t, c) in enumerate(zip(rep.completion_times, rep.n_collisions))))
    summary = {"n": rep.n, "s": rep.s, "kappa": rep.kappa, "bound": rep.bound,
               "slack": rep.slack, "trials": rep.trials, "within_bound": rep.within_bound,
               "max_completion_time": rep.max_completion_time}
    excess = max(rep.max_completion_time - rep.bound, 0.0)
    checks = {"annihilated_within_bound": check(excess, rep.slack, rep.within_bound == rep.trials)}
    if cfg.emit_plots:
        t = np.sort(rep.completion_times)
        (out / "scan.svg").write_text(plots.curves_svg(
            t, {"trial": np.arange(1, len(t) + 1)}, "completion times"))
    return summary, checks


# -- field modes -------------------------------------------------------------

def _field_row(u):
    e = energy(u)
    nv = len(locate_vortices(u))
    return (u.time, e.E, *e.F, *e.moments, nv), e


def run_field(cfg, out):
    if cfg.far_field not in ("ansatz", "unit"):
        raise ConfigError("far_field must be 'ansatz' or 'unit'")
    if cfg.scheme not in ("strang", "rk4"):
        raise ConfigError("scheme must be 'strang' or 'rk4'")
    rows = np.array(cfg.vortices, dtype=float).reshape(-1, 3)
    grid = Grid(cfg.L, cfg.N)
    u = build_well_prepared(rows[:, :2], rows[:, 2].astype(int), cfg.epsilon, grid,
                            far_field=cfg.far_field)
    step = heat_flow_step if cfg.mode == "gl-evolve" else gp_flow_step
    row, e0 = _field_row(u)
    table, Es, mods = [row], [e0.E], [float(np.max(np.abs(u.values)))]
    for k in range(1, cfg.steps + 1):
        u = step(u, cfg.dt, cfg.scheme)
        if cfg.mode == "gl-evolve":
            mods.append(float(np.max(np.abs(u.values))))
        if k % cfg.sample_every == 0 or k == cfg.steps:
            row, e = _field_row(u)
            table.append(row)
            Es.append(e.E)
    write_csv(out / "energy.csv", ["t", "E", "F1", "F2", "F3", "m1", "m2", "m3", "n_vortices"],
              table)
    if cfg.snapshot:
        c = grid.coords
        write_csv(out / "field.csv", ["p1", "p2", "re_u", "im_u"],
                  zip(c[..., 0].ravel(), c[..., 1].ravel(), u.values.real.ravel(),
                      u.values.imag.ravel()))
    _, J = current_and_jacobian(u)
    Es = np.array(Es)
    checks = {"jacobian_total": check(abs(jacobian_mass(u, J=J)), 0.05 * np.pi)}
    if cfg.mode == "gl-evolve":
        checks["energy_nonincreasing"] = check(float(np.max(np.diff(Es), initial=0.0)), 1e-10)
        checks["modulus_bound"] = check(max(max(mods) - 1.0, 0.0), 1e-6)
    else:
        drift = float(np.max(np.abs(Es - Es[0]))) / Es[0] if Es[0] > 0 else \
            float(np.max(np.abs(Es - Es[0])))
        checks["energy_conserved"] = check(drift, 1e-6 * max(1.0, cfg.steps / 1000.0))
    if cfg.emit_plots:
        t = [r[0] for r in table]
        (out / "energy.svg").write_text(plots.curves_svg(
            t, {"E": [r[1] for r in table], "F1": [r[2] for r in table],
                "F2": [r[3] for r in table], "F3": [r[4] for r in table]}, "energies"))
    summary = {"final_time": u.time, "E_initial": float(Es[0]), "E_final": float(Es[-1]),
               "final_vortices": int(table[-1][-1]), "h": grid.h}
    return summary, checks


def run_compare(cfg, out):
    if cfg.flow not in ("heat", "gp"):
        raise ConfigError("flow must be 'heat' or 'gp'")
    rows = np.array(cfg.vortices, dtype=float).reshape(-1, 3)
    grid = Grid(cfg.L, cfg.N)
    rep = compare_to_ode(rows[:, :2], rows[:, 2].astype(int), cfg.epsilon, grid, cfg.horizon,
                         flow=cfg.flow, dt=cfg.dt, n_samples=cfg.n_samples, method=cfg.scheme)
    dev = sphere.chordal_distance_chart(rep.tracked, rep.predicted)
    write_csv(out / "compare.csv",
              ["t_pde", "t_ode", "vortex", "degree", "p1", "p2", "p1_ode", "p2_ode", "chordal_dev"],
              ((rep.pde_times[k], rep.ode_times[k], i, rep.degrees[i], *rep.tracked[k, i],
                *rep.predicted[k, i], dev[k, i])
               for k in range(len(rep.pde_times)) for i in range(len(rep.degrees))))
    checks = {"max_chordal_deviation": check(rep.max_deviation, cfg.tolerance)}
    cosines = rep.direction_cosines
    checks["direction_agrees"] = check(-float(np.min(cosines)), 0.0,
                                       bool(np.all(cosines > 0)))
    if cfg.flow == "heat":
        checks["energy_nonincreasing"] = check(max(rep.energy_increase, 0.0), 1e-10)
    if cfg.emit_plots:
        paths = [(sphere.stereo_unproject(rep.tracked[:, i]), rep.degrees[i])
                 for i in range(len(rep.degrees))]
        paths += [(sphere.stereo_unproject(rep.predicted[:, i]), rep.degrees[i])
                  for i in range(len(rep.degrees))]
        (out / "trajectory.svg").write_text(plots.sphere_paths_svg(paths, "PDE and ODE paths"))
    summary = {"max_deviation": rep.max_deviation, "max_drift": rep.max_drift, "h": rep.h,
               "direction_cosines": cosines, "pde_horizon": float(rep.pde_times[-1])}
    return summary, checks


RUNNERS = {"pv-run": run_pv, "pv-annihilate-scan": run_scan, "gl-evolve": run_field,
           "gp-evolve": run_field, "compare": run_compare}


def run(config_path, out=None, strict=False):
    """Execute one configuration; returns the process exit status."""
    try:
        data = json.loads(Path(config_path).read_text())
        cfg = parse_config(data)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out or cfg.out or "vortexflow_out")
    out.mkdir(parents=True, exist_ok=True)
    summary = {"mode": cfg.mode, "config": data}
    start = time.perf_counter()
    try:
        result, checks = RUNNERS[cfg.mode](cfg, out)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (VortexFlowError, FloatingPointError, RuntimeError, np.linalg.LinAlgError) as exc:
        summary.update({"status": "numerical_failure", "error": type(exc).__name__,
                        "message": str(exc), "module": type(exc).__module__})
        (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2) + "\n")
        print("%s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return EXIT_NUMERICAL
    summary.update(result)
    summary["invariants"] = checks
    summary["all_invariants_pass"] = all(c["pass"] for c in checks.values())
    summary["status"] = "ok"
    summary["elapsed_seconds"] = time.perf_counter() - start
    (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2) + "\n")
    if strict and not summary["all_invariants_pass"]:
        return EXIT_INVARIANT
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(prog="vortexflow")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a JSON configuration")
    p.add_argument("config")
    p.add_argument("--strict", action="store_true",
                   help="exit with status 3 when an invariant check fails")
    p.add_argument("--out", help="output directory (overrides the config)")
    args = parser.parse_args(argv)
    return run(args.config, args.out, args.strict)


if __name__ == "__main__":
    sys.exit(main())
