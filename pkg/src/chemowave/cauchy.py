"""Time integration of the parabolic equation, lab frame or moving frame.

The stepped equation (frame speed c, c = 0 for the lab frame) is

    u_t = u_xx + c u_x - chi (u^m v_x)_x + u (1 - u^alpha),
    0   = v_xx - v + u^gamma,

handled in the expanded, non-conservative form

    u_t = u_xx + w u_x - chi u^m (v - u^gamma) + u (1 - u^alpha),
    w   = c - chi m u^(m-1) v_x.

One IMEX step treats diffusion implicitly (tridiagonal solve), the
advective term w u_x explicitly with first-order upwinding on the sign
of w (a centered variant exists for the wave-construction lane), and
the reaction and chemotaxis source explicitly.  v is refreshed from u
after every step.  The automatic time step obeys

    dt <= min(0.5 h / Vmax, 0.1 / Rmax)

with Vmax the largest advective speed and Rmax the largest reaction
Jacobian magnitude, recomputed every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.linalg import solve_banded

from .elliptic import TailSpec, solve_pair
from .errors import BlowupDetected, DomainError, StiffnessError
from .fields import Field, Grid
from .params import Params, RegimeTag, M_chi, classify_regime, kappa_of_speed

DT_FLOOR = 1e-10
MONITOR_SLACK = 1e-6


@dataclass(frozen=True)
class NeumannZero:
    pass


@dataclass(frozen=True)
class Dirichlet:
    value: float


@dataclass(frozen=True)
class Robin:
    """Decay condition u_x = -kappa u at the right boundary."""

    kappa: float


BoundaryCondition = NeumannZero | Dirichlet | Robin


@dataclass(frozen=True)
class SimConfig:
    params: Params
    grid: Grid
    t_end: float
    frame_speed: float = 0.0
    dt: float | None = None          # None = automatic
    bc_left: BoundaryCondition = NeumannZero()
    bc_right: BoundaryCondition | None = None   # None = frame-appropriate default
    output_every: float = 1.0
    clamp_negative: bool = True
    front_level: float = 0.5
    scheme: str = "upwind"           # "upwind" | "centered"

    def __post_init__(self):
        if self.t_end <= 0:
            raise DomainError("t_end must be > 0")
        if self.output_every <= 0:
            raise DomainError("output_every must be > 0")
        if self.dt is not None and self.dt <= 0:
            raise DomainError("dt must be > 0 or None for automatic")
        if self.scheme not in ("upwind", "centered"):
            raise DomainError(f"unknown advection scheme {self.scheme!r}")

    def resolved_bc_right(self) -> BoundaryCondition:
        if self.bc_right is not None:
            return self.bc_right
        if self.frame_speed >= 2.0:
            return Robin(kappa_of_speed(self.frame_speed))
        return NeumannZero()


@dataclass(frozen=True)
class State:
    t: float
    u: Field
    v: Field


@dataclass
class Monitors:
    level: float = 0.5
    times: list = dc_field(default_factory=list)
    sup_u: list = dc_field(default_factory=list)
    inf_u: list = dc_field(default_factory=list)
    front_x: list = dc_field(default_factory=list)
    clamp_count: int = 0
    node_steps: int = 0
    warnings: list = dc_field(default_factory=list)

    def record(self, t: float, u: np.ndarray, x: np.ndarray):
        self.times.append(t)
        self.sup_u.append(float(u.max()))
        self.inf_u.append(float(u.min()))
        self.front_x.append(_rightmost_crossing(x, u, self.level))

    def finalize(self):
        if self.node_steps and self.clamp_count > 1e-3 * self.node_steps:
            self.warnings.append(
                f"clamp_count {self.clamp_count} exceeds 0.1% of node-steps")


def _rightmost_crossing(x: np.ndarray, u: np.ndarray, level: float) -> float:
    d = u - level
    sign_change = d[:-1] * d[1:] <= 0
    idx = np.flatnonzero(sign_change & ((d[:-1] != 0) | (d[1:] != 0)))
    if idx.size == 0:
        return math.nan
    i = idx[-1]
    if d[i + 1] == d[i]:
        return float(x[i])
    return float(x[i] + (x[i + 1] - x[i]) * d[i] / (d[i] - d[i + 1]))


def v_tails_for(p: Params, source: Field, frame_speed: float) -> TailSpec:
    """Closure for the v-solve: plateau left; exponential right in a moving frame."""
    if frame_speed >= 2.0:
        return TailSpec.wave_ends(source, p.gamma * kappa_of_speed(frame_speed))
    return TailSpec.constant_ends(source)


def solve_v(p: Params, u: Field, frame_speed: float = 0.0) -> tuple[Field, Field]:
    """(v, v_x) for the current density u."""
    src = u.with_values(np.power(u.values, p.gamma))
    tails = v_tails_for(p, src, frame_speed)
    return solve_pair(src, 1.0, 1.0, tails)


def _ghosts(u: np.ndarray, h: float, bc_left: BoundaryCondition,
            bc_right: BoundaryCondition) -> tuple[float, float]:
    if isinstance(bc_left, NeumannZero):
        gl = u[1]
    elif isinstance(bc_left, Dirichlet):
        gl = u[0]
    else:
        raise DomainError("left boundary must be NeumannZero or Dirichlet")
    if isinstance(bc_right, NeumannZero):
        gr = u[-2]
    elif isinstance(bc_right, Robin):
        gr = u[-2] - 2.0 * h * bc_right.kappa * u[-1]
    elif isinstance(bc_right, Dirichlet):
        gr = u[-1]
    else:
        raise DomainError("unsupported right boundary condition")
    return gl, gr


def advective_velocity(p: Params, u: np.ndarray, vx: np.ndarray, c: float) -> np.ndarray:
    return c - p.chi * p.m * np.power(u, p.m - 1.0) * vx


def reaction_source(p: Params, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (-p.chi * np.power(u, p.m) * (v - np.power(u, p.gamma))
            + u * (1.0 - np.power(u, p.alpha)))


def reaction_jacobian_bound(p: Params, u: np.ndarray, v: np.ndarray) -> float:
    du = (1.0 - (p.alpha + 1.0) * np.power(u, p.alpha)
          - p.chi * (p.m * np.power(u, p.m - 1.0) * (v - np.power(u, p.gamma))
                     - p.gamma * np.power(u, p.m + p.gamma - 1.0)))
    return float(np.abs(du).max())


def auto_dt(p: Params, u: np.ndarray, v: np.ndarray, vx: np.ndarray,
            c: float, h: float) -> float:
    w = advective_velocity(p, u, vx, c)
    vmax = float(np.abs(w).max())
    rmax = reaction_jacobian_bound(p, u, v)
    dt = math.inf
    if vmax > 0:
        dt = min(dt, 0.5 * h / vmax)
    if rmax > 0:
        dt = min(dt, 0.1 / rmax)
    return min(dt, 0.1)


def advance_imex(p: Params, u: np.ndarray, v: np.ndarray, vx: np.ndarray,
                 c: float, dt: float, grid: Grid,
                 bc_left: BoundaryCondition, bc_right: BoundaryCondition,
                 scheme: str = "upwind") -> np.ndarray:
    """One IMEX step of the expanded equation with frozen (v, v_x)."""
    h = grid.h
    n = grid.n
    gl, gr = _ghosts(u, h, bc_left, bc_right)
    ue = np.concatenate(([gl], u, [gr]))
    # non-finite intermediates are caught below and reported as blow-up
    with np.errstate(invalid="ignore", over="ignore"):
        w = advective_velocity(p, u, vx, c)
        if scheme == "upwind":
            fwd = (ue[2:] - ue[1:-1]) / h
            bwd = (ue[1:-1] - ue[:-2]) / h
            ux = np.where(w > 0, fwd, bwd)
        else:
            ux = (ue[2:] - ue[:-2]) / (2.0 * h)
        rhs = u + dt * (w * ux + reaction_source(p, u, v))
    if not np.all(np.isfinite(rhs)):
        i = int(np.flatnonzero(~np.isfinite(rhs))[0])
        raise BlowupDetected(
            f"non-finite update at x={grid.x0 + i * h:.6g}",
            x=grid.x0 + i * h)

    r = dt / h**2
    ab = np.zeros((3, n))
    ab[0, 1:] = -r          # superdiagonal
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r         # subdiagonal
    if isinstance(bc_left, NeumannZero):
        ab[0, 1] = -2.0 * r
    else:  # Dirichlet
        ab[0, 1] = 0.0
        ab[1, 0] = 1.0
        rhs[0] = bc_left.value
    if isinstance(bc_right, NeumannZero):
        ab[2, -2] = -2.0 * r
    elif isinstance(bc_right, Robin):
        ab[2, -2] = -2.0 * r
        ab[1, -1] = 1.0 + 2.0 * r * (1.0 + h * bc_right.kappa)
    else:  # Dirichlet
        ab[2, -2] = 0.0
        ab[1, -1] = 1.0
        rhs[-1] = bc_right.value
    return solve_banded((1, 1), ab, rhs)


def step(state: State, config: SimConfig) -> State:
    """Advance a single IMEX step; v is recomputed from the new u."""
    p = config.params
    u = state.u.values
    v, vx = solve_v(p, state.u, config.frame_speed)
    dt = config.dt if config.dt is not None else auto_dt(
        p, u, v.values, vx.values, config.frame_speed, config.grid.h)
    if dt < DT_FLOOR:
        raise StiffnessError(f"dt underflow: {dt:.3e}")
    un = advance_imex(p, u, v.values, vx.values, config.frame_speed, dt,
                      config.grid, config.bc_left, config.resolved_bc_right(),
                      config.scheme)
    if config.clamp_negative:
        un = np.maximum(un, 0.0)
    _check_finite(un, state.t + dt, config.grid)
    uf = Field(config.grid, un)
    vn, _ = solve_v(p, uf, config.frame_speed)
    return State(state.t + dt, uf, vn)


def _check_finite(u: np.ndarray, t: float, grid: Grid) -> None:
    if not np.all(np.isfinite(u)):
        i = int(np.flatnonzero(~np.isfinite(u))[0])
        raise BlowupDetected(
            f"non-finite state at t={t:.6g}, x={grid.x0 + i * grid.h:.6g}",
            t=t, x=grid.x0 + i * grid.h)


def run(config: SimConfig, u0: Field,
        out_dir: str | None = None) -> tuple[State, Monitors, list[State]]:
    """Integrate to t_end, recording monitors and snapshots every output_every."""
    p = config.params
    if u0.grid != config.grid:
        raise DomainError("u0 grid does not match config.grid")
    if u0.min() < 0:
        raise DomainError("u0 must be nonnegative")

    bc_right = config.resolved_bc_right()
    x = config.grid.x
    h = config.grid.h
    u = u0.values.copy()
    v, vx = solve_v(p, u0, config.frame_speed)
    monitors = Monitors(level=config.front_level)
    monitors.record(0.0, u, x)
    snapshots = [State(0.0, u0, v)]

    t = 0.0
    next_out = config.output_every
    while t < config.t_end - 1e-12:
        dt = config.dt if config.dt is not None else auto_dt(
            p, u, v.values, vx.values, config.frame_speed, h)
        if dt < DT_FLOOR:
            raise StiffnessError(f"dt underflow at t={t:.6g}: {dt:.3e}")
        dt = min(dt, next_out - t, config.t_end - t)
        u = advance_imex(p, u, v.values, vx.values, config.frame_speed, dt,
                         config.grid, config.bc_left, bc_right, config.scheme)
        if config.clamp_negative:
            neg = u < 0
            nneg = int(neg.sum())
            if nneg:
                monitors.clamp_count += nneg
                u = np.maximum(u, 0.0)
        monitors.node_steps += config.grid.n
        t += dt
        _check_finite(u, t, config.grid)
        uf = Field(config.grid, u)
        v, vx = solve_v(p, uf, config.frame_speed)
        if t >= next_out - 1e-12:
            monitors.record(t, u, x)
            snapshots.append(State(t, uf, v))
            next_out = round(next_out / config.output_every + 1) * config.output_every
    if t - snapshots[-1].t > 1e-12:
        monitors.record(t, u, x)
        snapshots.append(State(t, Field(config.grid, u), v))
    monitors.finalize()
    final = snapshots[-1]

    if out_dir is not None:
        from . import io as cw_io
        cw_io.write_run_outputs(out_dir, snapshots, monitors)
    return final, monitors, snapshots


def monitor_bounds(state: State, params: Params,
                   u0_sup: float | None = None) -> list[str]:
    """Named violations of the sup bounds; empty when all tracked bounds hold.

    chi <= 0: sup u <= max{1, sup u0}.  In the positive regime with
    alpha = m+gamma-1 the ODE envelope gives sup u <= max{M_chi, sup u0}.
    For chi > 0 with alpha > m+gamma-1 boundedness has no explicit
    constant, so the monitor only records; outside all regimes it is
    disabled.
    """
    sup_u = state.u.max()
    u0_sup = sup_u if u0_sup is None else u0_sup
    if params.chi <= 0:
        bound = max(1.0, u0_sup)
        if sup_u > bound + MONITOR_SLACK:
            return [f"sup exceeds max{{1, sup u0}}: {sup_u:.6g} > {bound:.6g}"]
        return []
    tag = classify_regime(params)
    if tag is RegimeTag.POS_CHI_ALPHA_EQ:
        bound = max(M_chi(params), u0_sup)
        if sup_u > bound + MONITOR_SLACK:
            return [f"sup exceeds max{{M_chi, sup u0}}: {sup_u:.6g} > {bound:.6g}"]
        return []
    if tag is RegimeTag.POS_CHI_ALPHA_GT:
        return [f"not applicable: no explicit bound in this regime (sup_u={sup_u:.6g})"]
    return ["not applicable: parameters outside tracked regimes"]
