"""Explicit finite differences for ``u_tt + u_t - u_xx + u^p = 0`` on a uniform grid.

The update at interior nodes is

    (u+ - 2u + u-)/dt^2 + (u+ - u-)/(2 dt) - D2 u + [nonlinear] |u|^{p-1} u = 0

with the three-point Laplacian ``D2``.  Boundary nodes keep their initial
values.  The stencil moves information at most ``dx/dt`` per unit time, so
the boundary cannot reach ``|x| <= L - t dx/dt`` by time ``t``; callers size
the domain with :func:`domain_for`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Grid, GridFunction

__all__ = [
    "SolverConfig",
    "SimulationState",
    "SimulationResult",
    "InstabilityError",
    "SignConditionError",
    "init_state",
    "step",
    "simulate",
    "signed_power",
    "domain_for",
]

log = logging.getLogger(__name__)


class InstabilityError(RuntimeError):
    """A non-finite value appeared during time stepping."""


class SignConditionError(ValueError):
    """Initial data violate ``u0 >= 0`` or ``u1 + u0/2 >= 0``."""


def signed_power(u, p):
    """``|u|^{p-1} u``: equals ``u^p`` for ``u >= 0`` and stays real otherwise."""
    if p == 2:
        return u * np.abs(u)
    return np.sign(u) * np.abs(u) ** p


def domain_for(x_obs: float, t_final: float, margin: float = 2.0, cfl: float = 0.9) -> float:
    """Half-width that keeps ``|x| <= x_obs`` outside the boundary's influence until ``t_final``.

    The three-point stencil propagates at ``dx/dt = 1/cfl``, slightly faster
    than the unit speed of the continuous equation, so that speed is used.
    """
    if not 0 < cfl <= 1:
        raise ValueError("cfl must lie in (0, 1]")
    return x_obs + t_final / cfl + margin


@dataclass(frozen=True)
class SolverConfig:
    grid: Grid
    dt: float
    t_final: float
    p: float = 2.0
    nonlinear: bool = True
    snapshot_times: tuple[float, ...] = ()
    check_sign: bool = False

    def __post_init__(self):
        object.__setattr__(self, "snapshot_times", tuple(float(s) for s in self.snapshot_times))
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.dt > self.grid.dx * (1 + 1e-12):
            raise ValueError(f"CFL violated: dt={self.dt} > dx={self.grid.dx}")
        if not self.t_final > 0:
            raise ValueError("t_final must be positive")
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        snaps = self.snapshot_times
        if any(b < a for a, b in zip(snaps, snaps[1:])):
            raise ValueError("snapshot_times must be sorted")
        if snaps and (snaps[0] < 0 or snaps[-1] > self.t_final + 0.5 * self.dt):
            raise ValueError("snapshot_times must lie in [0, t_final]")

    @classmethod
    def default(cls, grid: Grid, t_final: float, **kw) -> "SolverConfig":
        """``dt = 0.9 dx``."""
        return cls(grid=grid, dt=0.9 * grid.dx, t_final=t_final, **kw)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def step_of(self, t: float) -> int:
        return int(round(t / self.dt))


@dataclass
class SimulationState:
    """Two consecutive time levels ``u_prev`` (at ``t - dt``) and ``u_curr`` (at ``t``)."""

    u_prev: GridFunction
    u_curr: GridFunction
    t: float
    step_index: int
    min_value_seen: float
    dt: float = math.nan

    def __post_init__(self):
        if not self.u_prev.grid.same_as(self.u_curr.grid):
            raise ValueError("time levels must share one grid")


@dataclass
class SimulationResult:
    snapshots: list[tuple[float, GridFunction]]
    min_value_seen: float
    config: SolverConfig
    influence_radius: float
    meta: dict = field(default_factory=dict)

    def at(self, t: float) -> GridFunction:
        """Snapshot whose time is closest to ``t``."""
        best = min(self.snapshots, key=lambda s: abs(s[0] - t))
        return best[1]

    def metadata_text(self) -> str:
        g = self.config.grid
        rows = {
            "dx": g.dx,
            "dt": self.config.dt,
            "domain": f"[{g.x0:.17g}, {g.x_end:.17g}]",
            "p": self.config.p,
            "nonlinear": self.config.nonlinear,
            "t_final": self.config.t_final,
            "min_value_seen": self.min_value_seen,
            "influence_radius": self.influence_radius,
        }
        rows.update(self.meta)
        return "".join(f"{k} = {v}\n" for k, v in rows.items())


def _laplacian(v, dx):
    out = np.zeros_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (dx * dx)
    return out


def check_sign_condition(u0: GridFunction, u1: GridFunction, atol: float = 0.0):
    if np.any(u0.values < -atol):
        raise SignConditionError("u0 must be nonnegative")
    if np.any(u1.values + 0.5 * u0.values < -atol):
        raise SignConditionError("u1 + u0/2 must be nonnegative")


def init_state(u0: GridFunction, u1: GridFunction, cfg: SolverConfig) -> SimulationState:
    """Build the first two time levels with a second-order Taylor start."""
    if not (u0.grid.same_as(cfg.grid) and u1.grid.same_as(cfg.grid)):
        raise ValueError("initial data must live on the solver grid")
    if cfg.check_sign:
        check_sign_condition(u0, u1)
    a = u0.values
    b = u1.values
    src = _laplacian(a, cfg.grid.dx) - b
    if cfg.nonlinear:
        with np.errstate(over="ignore", invalid="ignore"):
            src = src - signed_power(a, cfg.p)
    nxt = a + cfg.dt * b + 0.5 * cfg.dt**2 * src
    nxt[0], nxt[-1] = a[0], a[-1]
    if not np.all(np.isfinite(nxt)):
        raise InstabilityError("non-finite value in the first step")
    m = float(min(a.min(), nxt.min()))
    return SimulationState(u0, GridFunction(cfg.grid, nxt), cfg.dt, 1, m, cfg.dt)


def _advance(prev, curr, cfg, dx2_inv, c_next, c_prev):
    lap = (curr[2:] - 2.0 * curr[1:-1] + curr[:-2]) * dx2_inv
    rhs = (2.0 * curr[1:-1] - prev[1:-1]) / cfg.dt**2 + c_prev * prev[1:-1] + lap
    if cfg.nonlinear:
        with np.errstate(over="ignore", invalid="ignore"):
            rhs -= signed_power(curr[1:-1], cfg.p)
    nxt = np.empty_like(curr)
    nxt[1:-1] = rhs / c_next
    nxt[0], nxt[-1] = curr[0], curr[-1]
    return nxt


def _coeffs(cfg):
    dt = cfg.dt
    return 1.0 / (cfg.grid.dx**2), 1.0 / dt**2 + 0.5 / dt, 0.5 / dt


def step(state: SimulationState, cfg: SolverConfig) -> SimulationState:
    """Advance one step; raises :class:`InstabilityError` on non-finite output."""
    dx2_inv, c_next, c_prev = _coeffs(cfg)
    nxt = _advance(state.u_prev.values, state.u_curr.values, cfg, dx2_inv, c_next, c_prev)
    if not np.all(np.isfinite(nxt)):
        raise InstabilityError(f"non-finite value at step {state.step_index + 1}")
    k = state.step_index + 1
    return SimulationState(state.u_curr, GridFunction(cfg.grid, nxt), k * cfg.dt, k, min(state.min_value_seen, float(nxt.min())), cfg.dt)


def simulate(u0: GridFunction, u1: GridFunction, cfg: SolverConfig, on_step=None) -> SimulationResult:
    """Run to ``cfg.t_final`` and collect snapshots at the steps nearest ``cfg.snapshot_times``.

    ``on_step(k, t, values)`` is called after every level (including the two
    initial ones) with a read-only array; it must not keep a reference.
    """
    state = init_state(u0, u1, cfg)
    want = {}
    for s in cfg.snapshot_times:
        want.setdefault(cfg.step_of(s), s)
    snaps = []
    if 0 in want:
        snaps.append((0.0, u0))
    if 1 in want:
        snaps.append((cfg.dt, state.u_curr))
    if on_step is not None:
        on_step(0, 0.0, u0.values)
        on_step(1, cfg.dt, state.u_curr.values)
    dx2_inv, c_next, c_prev = _coeffs(cfg)
    prev = state.u_prev.values.copy()
    curr = state.u_curr.values.copy()
    min_seen = state.min_value_seen
    n = cfg.n_steps
    check_every = 64
    for k in range(2, n + 1):
        nxt = _advance(prev, curr, cfg, dx2_inv, c_next, c_prev)
        if k % check_every == 0 or k == n or k in want:
            if not np.all(np.isfinite(nxt)):
                raise InstabilityError(f"non-finite value at or before step {k}")
        m = nxt.min()
        if m < min_seen:
            min_seen = float(m)
        prev, curr = curr, nxt
        if k in want:
            snaps.append((k * cfg.dt, GridFunction(cfg.grid, curr.copy())))
        if on_step is not None:
            curr.setflags(write=False)
            on_step(k, k * cfg.dt, curr)
    if not np.all(np.isfinite(curr)):
        raise InstabilityError("non-finite value in final state")
    log.debug("simulated %d steps, min value %.3e", n, min_seen)
    return SimulationResult(snaps, float(min_seen), cfg, cfg.t_final * cfg.grid.dx / cfg.dt)
