"""CSV/JSON persistence: 15 significant digits, LF endings, deterministic."""

from __future__ import annotations

import json
import math
import os

from .errors import DomainError


def fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.15g}"
    return str(x)


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_field_csv(path: str, field, name: str = "value") -> None:
    write_csv(path, ("x", name), zip(field.x, field.values))


def write_profile_csv(path: str, profile) -> None:
    write_csv(path, ("x", "U", "V"),
              zip(profile.U.x, profile.U.values, profile.V.values))


def write_snapshot_csv(out_dir: str, state) -> str:
    path = os.path.join(out_dir, f"snap_t{state.t:g}.csv")
    write_csv(path, ("x", "u", "v"),
              zip(state.u.x, state.u.values, state.v.values))
    return path


def write_monitors_csv(path: str, monitors) -> None:
    write_csv(path, ("t", "sup_u", "inf_u", "front_x"),
              zip(monitors.times, monitors.sup_u, monitors.inf_u,
                  monitors.front_x))


def write_decay_csv(path: str, record) -> None:
    write_csv(path, ("t", "W", "supdiff"),
              zip(record.times, record.W, record.supdiff))


def write_run_outputs(out_dir: str, snapshots, monitors) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for s in snapshots:
        write_snapshot_csv(out_dir, s)
    write_monitors_csv(os.path.join(out_dir, "monitors.csv"), monitors)


def jsonable(value):
    """Recursively replace NaN/inf floats with None for strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(jsonable(payload), fh, indent=2, sort_keys=True,
                  allow_nan=False)
        fh.write("\n")


def write_manifest(out_dir: str, config: dict, extra: dict | None = None) -> None:
    from . import __version__
    os.makedirs(out_dir, exist_ok=True)
    payload = {"artifact": "chemowave", "version": __version__,
               "config": config}
    if extra:
        payload.update(extra)
    write_json(os.path.join(out_dir, "manifest.json"), payload)


def read_config_file(path: str) -> dict[str, str]:
    """Flat key=value lines; # starts a comment; blank lines ignored."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise DomainError(f"{path}:{lineno}: expected key=value, got {body!r}")
            key, value = body.split("=", 1)
            out[key.strip()] = value.strip()
    return out
