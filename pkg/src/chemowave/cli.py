"""Command-line entry point.

Subcommands: constants, simulate, wave, stability, speed, sweep, certify.
Configuration is a flat key=value file (# comments) plus flags; flags
override file values, and the CHEMOWAVE_OUT environment variable
overrides out_dir.  Exit codes: 0 success, 1 error, 2 a PASS/FAIL
experiment failed (including "speed below threshold" and
non-convergence), 64 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io as cw_io
from .cauchy import SimConfig, monitor_bounds, run
from .errors import (DomainError, NoConvergence, NoFront, RegimeError,
                     SpeedError)
from .fields import Field, Grid
from .params import Params, constants_report
from .speed import SWEEP_HEADER, spreading_speed, sweep_speeds
from .stability import PerturbSpec, default_eta, eta_window, run_stability
from .waves import (WaveProblem, construct, diagnose, normalize_translation,
                    settle)
from .barriers import certify

SUBCOMMANDS = ("constants", "simulate", "wave", "stability", "speed",
               "sweep", "certify")

DEFAULTS = {
    "chi": "0", "m": "1", "alpha": "1", "gamma": "1",
    "c": "3", "grid.left": "-100", "grid.right": "100", "grid.h": "0.05",
    "dt": "auto", "t_end": "50", "method": "FixedPoint", "eta": "auto",
    "seed": "0", "out_dir": "out",
}
_NUMERIC = ("chi", "m", "alpha", "gamma", "c", "grid.left", "grid.right",
            "grid.h", "t_end")


def parse_config(path: str | None, overrides: dict[str, str]) -> dict:
    """Defaults <- file <- flags; unknown keys and bad numbers rejected."""
    raw = dict(DEFAULTS)
    explicit: set[str] = set()
    if path is not None:
        for key, val in cw_io.read_config_file(path).items():
            if key not in DEFAULTS:
                raise DomainError(f"unknown config key {key!r}")
            raw[key] = val
            explicit.add(key)
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in DEFAULTS:
            raise DomainError(f"unknown config key {key!r}")
        raw[key] = val
        explicit.add(key)
    if os.environ.get("CHEMOWAVE_OUT"):
        raw["out_dir"] = os.environ["CHEMOWAVE_OUT"]
        explicit.add("out_dir")

    cfg: dict = {}
    for key in _NUMERIC:
        try:
            cfg[key] = float(raw[key])
        except ValueError:
            raise DomainError(f"malformed number for key {key!r}: {raw[key]!r}")
    for key in ("dt", "eta"):
        if raw[key] in ("auto", "", "none"):
            cfg[key] = None
        else:
            try:
                cfg[key] = float(raw[key])
            except ValueError:
                raise DomainError(f"malformed number for key {key!r}: {raw[key]!r}")
    try:
        cfg["seed"] = int(raw["seed"])
    except ValueError:
        raise DomainError(f"malformed number for key 'seed': {raw['seed']!r}")
    if raw["method"] not in ("FixedPoint", "CoupledRelax"):
        raise DomainError(f"unknown method {raw['method']!r}")
    cfg["method"] = raw["method"]
    cfg["out_dir"] = raw["out_dir"]
    cfg["_explicit"] = explicit
    return cfg


def _params(cfg: dict) -> Params:
    return Params(cfg["chi"], cfg["m"], cfg["alpha"], cfg["gamma"])


def _grid(cfg: dict) -> Grid:
    return Grid.from_bounds(cfg["grid.left"], cfg["grid.right"], cfg["grid.h"])


def _manifest(cfg: dict, extra: dict | None = None) -> None:
    payload = {k: cfg[k] for k in sorted(cfg) if not k.startswith("_")}
    cw_io.write_manifest(cfg["out_dir"], payload, extra)


def cmd_constants(cfg: dict) -> int:
    rep = constants_report(_params(cfg), c=cfg.get("c"))
    payload = rep.as_dict()
    os.makedirs(cfg["out_dir"], exist_ok=True)
    cw_io.write_json(os.path.join(cfg["out_dir"], "constants.json"), payload)
    _manifest(cfg)
    print(json.dumps(cw_io.jsonable(payload), indent=2, sort_keys=True,
                     allow_nan=False))
    return 0


def cmd_simulate(cfg: dict) -> int:
    p = _params(cfg)
    grid = _grid(cfg)
    sim = SimConfig(params=p, grid=grid, t_end=cfg["t_end"], dt=cfg["dt"],
                    output_every=max(cfg["t_end"] / 50.0, 1.0))
    u0 = Field(grid, 2.0 * np.exp(-grid.x ** 2))
    final, monitors, snapshots = run(sim, u0, out_dir=cfg["out_dir"])
    violations = monitor_bounds(final, p, u0_sup=u0.max())
    _manifest(cfg, {"violations": violations, "warnings": monitors.warnings})
    for v in violations:
        print(v)
    return 0


def _build_wave(cfg: dict):
    problem = WaveProblem(params=_params(cfg), c=cfg["c"], grid=_grid(cfg),
                          method=cfg["method"])
    return construct(problem)


def cmd_wave(cfg: dict) -> int:
    profile = _build_wave(cfg)
    profile = normalize_translation(profile)
    diag = diagnose(profile)
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    cw_io.write_profile_csv(os.path.join(out, "profile.csv"), profile)
    payload = {
        "c": profile.c, "kappa": profile.kappa, "kappa_fit": diag.kappa_fit,
        "kappa1": diag.kappa1, "left_limit": diag.left_limit,
        "right_limit": diag.right_limit,
        "monotonicity_violation": diag.monotonicity_violation,
        "sandwich_violation": profile.sandwich_violation,
        "outer_iters": profile.outer_iters, "method": profile.method,
        "refined_trend_slope": diag.refined_trend_slope,
    }
    cw_io.write_json(os.path.join(out, "diagnostics.json"), payload)
    _manifest(cfg)
    emit_plot(out, "profile")
    emit_plot(out, "log-decay")
    return 0


def cmd_stability(cfg: dict) -> int:
    # Stability weights the far tail by e^{2 eta x}; keep the right edge
    # shallow enough that round-off there cannot pollute the norm, and
    # polish the profile into a machine-exact fixed point first.
    if "grid.left" not in cfg["_explicit"]:
        cfg["grid.left"] = -60.0
    if "grid.right" not in cfg["_explicit"]:
        cfg["grid.right"] = 45.0
    p = _params(cfg)
    profile = settle(_build_wave(cfg))
    eta = cfg["eta"] if cfg["eta"] is not None else default_eta(p, cfg["c"])
    spec = PerturbSpec(eta=eta)
    t_end = cfg["t_end"] if "t_end" in cfg["_explicit"] else 20.0
    record = run_stability(profile, spec, t_end=t_end)
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    cw_io.write_decay_csv(os.path.join(out, "decay.csv"), record)
    km, kp = eta_window(p, cfg["c"])
    payload = {"lambda_pred": record.lambda_pred, "eta": record.eta,
               "kappa_minus": km, "kappa_plus": kp,
               "passed": record.passed, "rel_drop": record.rel_drop,
               "envelope_slack": record.envelope_slack,
               "W0": float(record.W[0]), "W_end": float(record.W[-1]),
               "supdiff_end": float(record.supdiff[-1])}
    cw_io.write_json(os.path.join(out, "stability.json"), payload)
    _manifest(cfg, {"tolerances": {"rel_drop": record.rel_drop,
                                   "envelope_slack": record.envelope_slack}})
    emit_plot(out, "stability")
    print(f"stability {'PASS' if record.passed else 'FAIL'}: "
          f"W(t_end)/W(0) = {record.W[-1] / record.W[0]:.3e}, "
          f"lambda_pred = {record.lambda_pred:.4f}")
    return 0 if record.passed else 2


def cmd_speed(cfg: dict) -> int:
    if "grid.left" not in cfg["_explicit"]:
        cfg["grid.left"] = -40.0
    if "grid.right" not in cfg["_explicit"]:
        cfg["grid.right"] = 150.0
    p = _params(cfg)
    grid = _grid(cfg)
    t_end = cfg["t_end"] if "t_end" in cfg["_explicit"] else 60.0
    sim = SimConfig(params=p, grid=grid, t_end=t_end, dt=cfg["dt"] or 0.02,
                    output_every=1.0)
    u0 = Field(grid, np.where(np.abs(grid.x) <= 1.0, 0.5, 0.0))
    track = spreading_speed(sim, u0)
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    cw_io.write_csv(os.path.join(out, "front.csv"), ("t", "x_front"),
                    zip(track.times, track.positions))
    cw_io.write_json(os.path.join(out, "speed.json"),
                     {"fitted_speed": track.fitted_speed, "r2": track.fit_r2,
                      "level": track.level, "extended": track.extended})
    _manifest(cfg)
    print(f"fitted_speed = {track.fitted_speed:.4f} (r2 = {track.fit_r2:.6f})")
    return 0


def cmd_sweep(cfg: dict, values: dict[str, list[float]], jobs: int) -> int:
    chis = values.get("chi") or [cfg["chi"]]
    ms = values.get("m") or [cfg["m"]]
    alphas = values.get("alpha") or [cfg["alpha"]]
    gammas = values.get("gamma") or [cfg["gamma"]]
    rows = sweep_speeds(chis, ms, alphas, gammas, jobs=jobs)
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    cw_io.write_csv(os.path.join(out, "speeds.csv"), SWEEP_HEADER, rows)
    _manifest(cfg, {"rows": len(rows)})
    return 0


def cmd_certify(cfg: dict) -> int:
    p = _params(cfg)
    report = certify(p, cfg["c"], seed=cfg["seed"])
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    cw_io.write_json(os.path.join(out, "certify.json"),
                     {"passed": report.passed,
                      "worst_excess": report.worst_excess,
                      "worst_location": report.worst_location,
                      "worst_check": report.worst_check,
                      "n_draws": report.n_draws})
    _manifest(cfg)
    print(f"certify {'PASS' if report.passed else 'FAIL'}: worst excess "
          f"{report.worst_excess:.3e} at x = {report.worst_location:.3f} "
          f"({report.worst_check})")
    return 0 if report.passed else 2


def emit_plot(out_dir: str, kind: str) -> str:
    """Write a deterministic matplotlib script referencing the CSV outputs."""
    sources = {
        "profile": ("profile.csv", PLOT_PROFILE),
        "log-decay": ("profile.csv", PLOT_LOGDECAY),
        "stability": ("decay.csv", PLOT_STABILITY),
    }
    if kind not in sources:
        raise DomainError(f"unknown plot kind {kind!r}")
    csv_name, template = sources[kind]
    csv_path = os.path.join(out_dir, csv_name)
    if not os.path.exists(csv_path):
        raise DomainError(f"missing CSV for plot: {csv_path}")
    with open(csv_path) as fh:
        if len(fh.readlines()) <= 1:
            raise DomainError(f"no data in {csv_path}")
    path = os.path.join(out_dir, f"plot_{kind.replace('-', '_')}.py")
    with open(path, "w", newline="\n") as fh:
        fh.write(template.format(csv=csv_name))
    return path


PLOT_PROFILE = '''"""Plot the wave profile (U, V against x)."""
import numpy as np
import matplotlib.pyplot as plt

x, U, V = np.loadtxt("{csv}", delimiter=",", skiprows=1, unpack=True)
fig, ax = plt.subplots()
ax.plot(x, U, label="U")
ax.plot(x, V, label="V", linestyle="--")
ax.set_xlabel("x")
ax.legend()
fig.savefig("profile.png", dpi=150)
'''

PLOT_LOGDECAY = '''"""Plot -log U against x to expose the exponential decay rate."""
import numpy as np
import matplotlib.pyplot as plt

x, U, V = np.loadtxt("{csv}", delimiter=",", skiprows=1, unpack=True)
mask = (U > 0) & (U < 0.5)
fig, ax = plt.subplots()
ax.plot(x[mask], -np.log(U[mask]))
ax.set_xlabel("x")
ax.set_ylabel("-log U")
fig.savefig("log_decay.png", dpi=150)
'''

PLOT_STABILITY = '''"""Semilog plot of the weighted norm W(t) with its predicted envelope."""
import json
import numpy as np
import matplotlib.pyplot as plt

t, W, supdiff = np.loadtxt("{csv}", delimiter=",", skiprows=1, unpack=True)
with open("stability.json") as fh:
    meta = json.load(fh)
fig, ax = plt.subplots()
ax.semilogy(t, W, label="W(t)")
lam = meta["lambda_pred"]
ax.semilogy(t, meta["envelope_slack"] * W[0] * np.exp(2 * lam * t),
            linestyle="--", label="envelope")
ax.set_xlabel("t")
ax.legend()
fig.savefig("stability.png", dpi=150)
'''


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chemowave",
        description="1D chemotaxis front toolkit: constants, Cauchy runs, "
                    "traveling waves, stability, spreading speeds, barrier "
                    "certificates.",
        epilog="Config keys (key=value file or flags): "
               + ", ".join(f"{k} (default {v})" for k, v in DEFAULTS.items()))
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="flat key=value config file")
    for key, default in DEFAULTS.items():
        flag = "--" + key.replace(".", "-").replace("_", "-")
        ap.add_argument(flag, dest=key, default=None, metavar="V",
                        help=f"default {default}")
    ap.add_argument("--jobs", type=int, default=1, help="sweep worker count")
    for key in ("chi", "m", "alpha", "gamma"):
        ap.add_argument(f"--{key}-values", dest=f"{key}_values", default=None,
                        metavar="LIST", help=f"comma list of {key} for sweep")
    return ap


def dispatch(subcommand: str, cfg: dict, values: dict | None = None,
             jobs: int = 1) -> int:
    handlers = {
        "constants": cmd_constants, "simulate": cmd_simulate,
        "wave": cmd_wave, "stability": cmd_stability, "speed": cmd_speed,
        "certify": cmd_certify,
    }
    if subcommand == "sweep":
        return cmd_sweep(cfg, values or {}, jobs)
    return handlers[subcommand](cfg)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if argv and argv[0] not in SUBCOMMANDS and not argv[0].startswith("-"):
        print(f"unknown subcommand {argv[0]!r}; expected one of "
              f"{', '.join(SUBCOMMANDS)}", file=sys.stderr)
        return 64
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 64
    overrides = {k: getattr(ns, k) for k in DEFAULTS}
    values = {}
    for key in ("chi", "m", "alpha", "gamma"):
        raw = getattr(ns, f"{key}_values")
        if raw:
            values[key] = [float(tok) for tok in raw.split(",") if tok.strip()]
    try:
        cfg = parse_config(ns.config, overrides)
        return dispatch(ns.subcommand, cfg, values, ns.jobs)
    except (SpeedError, NoConvergence) as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 2
    except (DomainError, RegimeError, NoFront, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
