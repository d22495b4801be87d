"""High-level checks built on the kernels, the solver and the supersolutions.

Each check returns a :class:`~dampwave.core.CheckReport` (or a richer
result object carrying one) so the CLI can serialize it uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .core import (
    INF,
    CheckReport,
    Grid,
    GridFunction,
    ModelParams,
    japanese_bracket_profile,
    lq_norm,
)
from .heat import DecayFit, fit_decay, heat_apply, target_exponent
from .kernels import (
    apply_dt_s,
    apply_dtt_s,
    apply_s,
    interp_on_grid,
    linear_solution,
    linear_solution_general,
)
from .ode import g_fn, heat_g, residual_odest6, w_fn
from .solver import SolverConfig, _advance, _coeffs, check_sign_condition, domain_for, init_state, simulate

__all__ = [
    "DecayFit",
    "DominationReport",
    "check_phi_conditions",
    "main_theorem_bound",
    "pullback_bound",
    "check_domination",
    "MainTheoremRun",
    "main_theorem_experiment",
    "main_theorem_sweep",
    "fit_decay",
    "decay_rates",
    "far_field_tail",
    "comparison_experiment",
    "supersolution_experiment",
    "kernel_lemma_ratios",
    "apriori_bounds",
    "apriori_sandwich",
    "linear_lower_bound",
    "domination_transfer",
    "heat_envelope_check",
    "ode_residual_sweep",
]


# --------------------------------------------------------------------------
# data conditions


def _edge_stable(ratio: np.ndarray, absx: np.ndarray, reach: float, factor: float = 2.0):
    """A sampled sup is deemed finite if doubling the region grows it by < ``factor``."""
    inner = absx <= 0.5 * reach
    if not np.any(inner):
        return True
    return bool(np.isfinite(ratio).all() and ratio.max() <= factor * ratio[inner].max())


def check_phi_conditions(phi: GridFunction, deltas=(0.1, 0.5, 1.0)) -> CheckReport:
    """Empirical constants for the four structural conditions on ``phi``.

    * ``ic2``: ``phi(x) <= C inf_{(x-1, x+1)} phi``;
    * ``ic3``: ``phi(x) <= C inf_{|y| < 2|x|} phi``, on ``|x| <= X/2``;
    * ``ic4``: ``|phi'| <= C phi`` with centered differences;
    * ``ic5``: ``exp(-delta |x|) <= C_delta phi`` for each ``delta``.

    On a finite grid every sup is finite, so a constant is accepted only if
    it does not keep growing toward the grid edge: the sup over the whole
    range may exceed the sup over the inner half by at most a factor 2.
    Infima use grid nodes strictly inside the interval.
    """
    v = phi.values
    if np.any(v <= 0):
        raise ValueError("phi must be positive on the grid")
    x = phi.x
    dx = phi.grid.dx
    absx = np.abs(x)
    reach = min(-x[0], x[-1])
    details = {}

    # ic2: sliding minimum over (x-1, x+1)
    half = int(math.ceil(1.0 / dx - 1e-9)) - 1
    padded = np.pad(v, half, mode="edge")
    win = np.lib.stride_tricks.sliding_window_view(padded, 2 * half + 1)
    r2 = v / win.min(axis=1)
    inside = (x - 1 >= x[0]) & (x + 1 <= x[-1])
    details["ic2"] = (r2[inside], absx[inside])

    # ic3: prefix minimum by |y|
    order = np.argsort(absx, kind="stable")
    sorted_abs = absx[order]
    prefix_min = np.minimum.accumulate(v[order])
    sel3 = absx <= 0.5 * reach
    sel3 &= absx > 0
    idx = np.searchsorted(sorted_abs, 2 * absx[sel3] - 1e-12 * dx, side="left") - 1
    r3 = v[sel3] / prefix_min[np.maximum(idx, 0)]
    details["ic3"] = (r3, absx[sel3])

    # ic4
    r4 = np.abs(np.gradient(v, dx)) / v
    details["ic4"] = (r4[1:-1], absx[1:-1])

    for d in deltas:
        details[f"ic5[{d:g}]"] = (np.exp(-d * absx) / v, absx)

    constants = {}
    failed = []
    worst_name, worst_c, worst_x = None, -np.inf, math.nan
    for name, (ratio, ax) in details.items():
        if ratio.size == 0:
            constants[name] = 1.0
            continue
        c = float(ratio.max())
        j = int(np.argmax(ratio))
        sub_reach = reach * 0.5 if name == "ic3" else reach
        ok = _edge_stable(ratio, ax, sub_reach)
        constants[name] = c
        if not ok:
            failed.append(name)
        score = np.inf if not ok else c
        if score > worst_c or worst_name is None:
            worst_name, worst_c, worst_x = name, score, float(ax[j])
    passed = not failed
    worst_val = max(constants.values())
    return CheckReport(
        name="phi_conditions",
        passed=passed,
        worst_value=worst_val,
        worst_location=(0.0, worst_x),
        empirical_constant=worst_val,
        details={"constants": constants, "failed": failed, "worst_condition": worst_name},
    )


# --------------------------------------------------------------------------
# headline bound


def main_theorem_bound(t: float, u_L_at_shift: GridFunction, t0: float, p: float) -> GridFunction:
    """``(u_L^{p-1} / ((t + t0) u_L^{p-1} + 1))^{1/(p-1)}`` with ``u_L`` taken at ``t + t0``."""
    v = u_L_at_shift.values
    if np.any(v < 0):
        raise ValueError("u_L must be nonnegative")
    if t + t0 < 0:
        raise ValueError("t + t0 must be nonnegative")
    return GridFunction(u_L_at_shift.grid, v * (1.0 + (t + t0) * v ** (p - 1.0)) ** (-1.0 / (p - 1.0)))


def pullback_bound(t: float, u_L_at_shift: GridFunction, t0: float, p: float, alpha: float) -> GridFunction:
    """``H(t + t0, u_L(t + t0, x))``: the ODE supersolution pulled back through ``u_L``."""
    v = u_L_at_shift.values
    if np.any(v < 0):
        raise ValueError("u_L must be nonnegative")
    s = t + t0
    vals = np.where(v > 0, w_fn(s, alpha, p) * g_fn(s, np.where(v > 0, v, 1.0), p), 0.0)
    return GridFunction(u_L_at_shift.grid, vals)


@dataclass
class DominationReport:
    """Largest ratio ``u / bound`` over snapshots and nodes, and its violation count."""

    max_ratio: float
    argmax: tuple[float, float]
    violations: int
    tolerance: float
    per_time: list[tuple[float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_check(self, name="domination", constant=None) -> CheckReport:
        return CheckReport(name, self.passed, self.max_ratio, self.argmax, constant, {"violations": self.violations})


def check_domination(u_snapshots, bound_snapshots, tolerance: float = 1e-2) -> DominationReport:
    """Compare snapshot lists of ``(t, GridFunction)`` pointwise.

    Nodes where both vanish count as ratio 0; a positive ``u`` over a zero
    bound counts as an infinite ratio.
    """
    if len(u_snapshots) != len(bound_snapshots):
        raise ValueError("snapshot lists differ in length")
    best = (-np.inf, (math.nan, math.nan))
    violations = 0
    per_time = []
    for (tu, u), (tb, b) in zip(u_snapshots, bound_snapshots):
        if abs(tu - tb) > 1e-9 * max(1.0, abs(tu)):
            raise ValueError(f"snapshot times differ: {tu} vs {tb}")
        if not u.grid.same_as(b.grid):
            raise ValueError(f"grid mismatch at t={tu}")
        uv, bv = u.values, b.values
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(bv > 0, uv / np.where(bv > 0, bv, 1.0), np.where(uv > 0, np.inf, 0.0))
        j = int(np.argmax(ratio))
        per_time.append((float(tu), float(ratio[j])))
        violations += int(np.count_nonzero(ratio > 1.0 + tolerance))
        if ratio[j] > best[0]:
            best = (float(ratio[j]), (float(tu), float(u.x[j])))
    return DominationReport(best[0], best[1], violations, tolerance, per_time)


@dataclass
class MainTheoremRun:
    """One headline run for a fixed ``T0``."""

    t0: float
    calibration: float
    raw: DominationReport
    calibrated: DominationReport
    pullback_ratio: tuple[float, float]
    snapshots: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.calibrated.passed

    def to_check(self) -> CheckReport:
        """Worst value is the largest calibrated ratio after the calibration time."""
        rep = self.calibrated.to_check(f"main_theorem[T0={self.t0:g}]", self.calibration)
        later = [(r, t) for t, r in self.calibrated.per_time if t > 0]
        if later:
            r, t = max(later)
            rep.worst_value, rep.worst_location = r, (t, math.nan)
        rep.details.update(
            raw_max_ratio=self.raw.max_ratio,
            pullback_ratio_min=self.pullback_ratio[0],
            pullback_ratio_max=self.pullback_ratio[1],
        )
        return rep


DEFAULT_MAIN_TIMES = (0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 150.0, 200.0)


def _simulate_bracket(params: ModelParams, dx: float, x_obs: float, t_final: float, times, eps=None, dt=None):
    eps = params.eps if eps is None else eps
    dt = 0.9 * dx if dt is None else dt
    grid = Grid.symmetric(domain_for(x_obs, t_final, cfl=dt / dx), dx)
    u0 = GridFunction(grid, eps * (1.0 + grid.x**2) ** (-0.5 * params.rho))
    u1 = GridFunction.constant(grid, 0.0)
    cfg = SolverConfig(grid, dt, t_final, params.p, True, tuple(times), check_sign=True)
    return simulate(u0, u1, cfg), u0, u1


def main_theorem_experiment(
    params: ModelParams,
    dx: float = 0.05,
    x_obs: float = 200.0,
    t_final: float = 200.0,
    times=DEFAULT_MAIN_TIMES,
    tolerance: float = 1e-2,
    sim=None,
) -> MainTheoremRun:
    """Solve with data ``(eps phi, 0)`` and test ``u <= C * bound`` on ``|x| <= x_obs``.

    ``bound`` uses ``u_L = eps (S + dS/dt) phi`` at ``t + T0``.  ``C`` is
    calibrated as ``max u(0) / bound(0)`` over the window; the uncalibrated
    ratio is reported too.  ``sim`` lets a sweep reuse one simulation.
    """
    p, rho, eps, t0 = params.p, params.rho, params.eps, params.t0
    if sim is None:
        sim, _, _ = _simulate_bracket(params, dx, x_obs, t_final, times)
    data_grid = Grid.symmetric(x_obs + t_final + t0 + 2 * dx, dx)
    phi = japanese_bracket_profile(rho, data_grid)
    u_snaps, b_snaps, pb_ratios = [], [], []
    for t, u in sim.snapshots:
        uL = linear_solution(t + t0, phi, eps, window=x_obs)
        bound = main_theorem_bound(t, uL, t0, p)
        pb = pullback_bound(t, uL, t0, p, params.alpha)
        pb_ratios.append(pb.values / bound.values)
        u_snaps.append((t, u.window(x_obs)))
        b_snaps.append((t, bound))
    raw = check_domination(u_snaps, b_snaps, tolerance)
    calibration = float(np.max(u_snaps[0][1].values / b_snaps[0][1].values))
    scaled = [(t, GridFunction(b.grid, calibration * b.values)) for t, b in b_snaps]
    cal = check_domination(u_snaps, scaled, tolerance)
    allr = np.concatenate(pb_ratios)
    return MainTheoremRun(t0, calibration, raw, cal, (float(allr.min()), float(allr.max())))


def main_theorem_sweep(params: ModelParams, t0_values=(10.0, 50.0, 200.0), **kw):
    """Run the headline check for each ``T0``; returns ``(runs, smallest passing T0 or None)``."""
    dx = kw.get("dx", 0.05)
    x_obs = kw.get("x_obs", 200.0)
    t_final = kw.get("t_final", 200.0)
    times = kw.get("times", DEFAULT_MAIN_TIMES)
    sim, _, _ = _simulate_bracket(params, dx, x_obs, t_final, times)
    runs = []
    for t0 in sorted(t0_values):
        p2 = ModelParams(params.p, params.rho, params.alpha, params.sigma, params.eps, float(t0))
        runs.append(main_theorem_experiment(p2, sim=sim, **kw))
    passing = [r.t0 for r in runs if r.passed]
    return runs, (min(passing) if passing else None)


# --------------------------------------------------------------------------
# decay rates


def far_field_tail(t: float, p: float, rho: float, eps: float, q: float, x_max: float) -> float:
    """``2 int_{x_max}^inf G(t, eps <x>^{-rho})^q dx``.

    Far from the origin the data vary on scale ``|x|`` while diffusion acts
    on scale ``sqrt(t)``, so the solution follows the ODE flow of its own
    data.  Substituting ``x = x_max e^s`` makes the integrand decay
    exponentially in ``s``; the range is cut where the integrand has
    dropped by ``e^{-S (rho q - 1)}`` with ``S`` large enough for ``1e-20``.
    """
    if rho * q <= 1:
        raise ValueError("the far-field integral diverges for rho q <= 1")
    s_max = 46.0 / (rho * q - 1.0)

    def integrand(s):
        x = x_max * math.exp(s)
        return heat_g(t, eps * (1.0 + x * x) ** (-0.5 * rho), p) ** q * x

    val, _ = integrate.quad(integrand, 0.0, s_max, limit=200, epsabs=0.0, epsrel=1e-10)
    return 2.0 * val


def decay_rates(
    params: ModelParams,
    qs=(1.0, 2.0, INF),
    t_list=None,
    window=(100.0, 1000.0),
    dx: float = 0.1,
    x_obs: float | None = None,
    eps: float | None = None,
):
    """Fit ``||u(t)||_q`` slopes from a nonlinear run with data ``(eps phi, 0)``.

    Norms are taken on ``|x| <= x_obs`` (default ``window[1]``) plus the
    :func:`far_field_tail` beyond it.  Returns ``(fits, simulation)``.
    """
    if t_list is None:
        t_list = tuple(np.logspace(math.log10(window[0]), math.log10(window[1]), 9))
    t_list = tuple(float(t) for t in t_list)
    x_obs = window[1] if x_obs is None else x_obs
    eps = params.eps if eps is None else eps
    sim, _, _ = _simulate_bracket(params, dx, x_obs, t_list[-1], t_list, eps=eps)
    norms = {q: [] for q in qs}
    ts = []
    for t, u in sim.snapshots:
        ts.append(t)
        w = u.window(x_obs)
        for q in qs:
            n = lq_norm(w, q)
            if q is not INF:
                n = (n**q + far_field_tail(t, params.p, params.rho, eps, q, x_obs)) ** (1.0 / q)
            norms[q].append(n)
    fits = [fit_decay(ts, norms[q], window, target_exponent(q, params.rho, params.p), q) for q in qs]
    return fits, sim


# --------------------------------------------------------------------------
# comparison principle


def _sup_condition(a, b, p):
    return float(np.max(a + b)) ** (p - 1.0) <= 1.0 / (4.0 * p)


def comparison_experiment(u0_low, u1_low, u0_high, u1_high, cfg: SolverConfig, tol: float = 1e-6) -> CheckReport:
    """Evolve two ordered data sets side by side and report ``max (u_low - u_high)``.

    Preconditions: ``u0_low <= u0_high``, ``u1_low + u0_low/2 <= u1_high +
    u0_high/2``, both data sets satisfy the sign condition and
    ``sup (u0_low + u0_high)^{p-1} <= 1/(4p)``.  The smallness is also
    monitored along the run and reported.
    """
    if np.any(u0_low.values > u0_high.values):
        raise ValueError("ordering violated: u0_low > u0_high somewhere")
    if np.any(u1_low.values + 0.5 * u0_low.values > u1_high.values + 0.5 * u0_high.values):
        raise ValueError("ordering violated for u1 + u0/2")
    check_sign_condition(u0_low, u1_low)
    check_sign_condition(u0_high, u1_high)
    if not _sup_condition(u0_low.values, u0_high.values, cfg.p):
        raise ValueError("data too large for the comparison smallness condition")
    lo = init_state(u0_low, u1_low, cfg)
    hi = init_state(u0_high, u1_high, cfg)
    worst = (-np.inf, (math.nan, math.nan))
    sup_sum = 0.0
    coeffs = _coeffs(cfg)
    x = cfg.grid.x
    pl, cl = lo.u_prev.values, lo.u_curr.values
    ph, ch = hi.u_prev.values, hi.u_curr.values
    for k in range(0, cfg.n_steps + 1):
        if k >= 2:
            nl = _advance(pl, cl, cfg, *coeffs)
            nh = _advance(ph, ch, cfg, *coeffs)
            pl, cl, ph, ch = cl, nl, ch, nh
        a, b = (pl, ph) if k == 0 else (cl, ch)
        d = a - b
        j = int(np.argmax(d))
        if d[j] > worst[0]:
            worst = (float(d[j]), (k * cfg.dt, float(x[j])))
        sup_sum = max(sup_sum, float(np.max(a + b)))
    if not (np.isfinite(cl).all() and np.isfinite(ch).all()):
        raise RuntimeError("non-finite values in comparison run")
    passed = worst[0] <= tol
    return CheckReport(
        "comparison",
        passed,
        worst[0],
        worst[1],
        None,
        {"sup_sum_pow": sup_sum ** (cfg.p - 1.0), "sup_limit": 1.0 / (4.0 * cfg.p), "tolerance": tol},
    )


def supersolution_experiment(u0, u1, cfg: SolverConfig, supersolution, tol: float = 1e-6, name="supersolution") -> CheckReport:
    """Check ``u(t, x) <= supersolution(t)`` along a run, where the supersolution is constant in ``x``."""
    worst = [-np.inf, (math.nan, math.nan)]
    x = cfg.grid.x

    def watch(k, t, vals):
        d = vals - supersolution(t)
        j = int(np.argmax(d))
        if d[j] > worst[0]:
            worst[0], worst[1] = float(d[j]), (t, float(x[j]))

    simulate(u0, u1, cfg, on_step=watch)
    return CheckReport(name, worst[0] <= tol, worst[0], worst[1], None, {"tolerance": tol})


# --------------------------------------------------------------------------
# linear estimates


def kernel_lemma_ratios(phi: GridFunction, sigma: float, t_list, window: float = 20.0, quad_dx=None) -> CheckReport:
    """Empirical ``sup_x |d^k/dt^k S phi| / (t^{-2k(1-sigma)} S phi)`` for ``k = 1, 2``.

    Passes when, for both ``k``, no constant from the median time onward
    exceeds 10 times the median constant: growth in ``t`` fails, decay
    (as for constant data, where the ratio falls like ``e^{-t}``) does not.
    """
    if not 0.5 < sigma < 1:
        raise ValueError("sigma must lie in (1/2, 1)")
    t_list = [float(t) for t in t_list]
    if min(t_list) < 2:
        raise ValueError("times must be >= 2")
    c1, c2 = [], []
    for t in t_list:
        s = apply_s(t, phi, quad_dx, window=window)
        d1 = apply_dt_s(t, phi, quad_dx, window=window)
        d2 = apply_dtt_s(t, phi, None, quad_dx, window=window)
        c1.append(float(np.max(np.abs(d1.values) / (t ** (-2 * (1 - sigma)) * s.values))))
        c2.append(float(np.max(np.abs(d2.values) / (t ** (-4 * (1 - sigma)) * s.values))))
    c1, c2 = np.array(c1), np.array(c2)
    late = np.asarray(t_list) >= np.median(t_list)
    ok = bool(c1[late].max() <= 10 * np.median(c1) and c2[late].max() <= 10 * np.median(c2))
    j = int(np.argmax(np.maximum(c1, c2)))
    return CheckReport(
        f"kernel_lemma_ratios[sigma={sigma:g}]",
        ok,
        float(max(c1.max(), c2.max())),
        (t_list[j], math.nan),
        float(max(c1.max(), c2.max())),
        {"t": t_list, "c_dt": c1.tolist(), "c_dtt": c2.tolist()},
    )


def linear_lower_bound(phi: GridFunction, t: float, eps: float = 1.0, window: float = 20.0, quad_dx=None) -> CheckReport:
    """Empirical ``c`` in ``u_L(t, x) >= c t^{-1/2} phi(x)`` on ``|x| <= window``."""
    uL = linear_solution(t, phi, eps, quad_dx, window=window)
    ph = phi.restrict(uL.grid).values
    ratio = uL.values / (eps * t**-0.5 * ph)
    j = int(np.argmin(ratio))
    c = float(ratio[j])
    return CheckReport(f"linear_lower_bound[t={t:g}]", c > 0, c, (t, float(uL.x[j])), c)


def apriori_bounds(t: float, u0: GridFunction, u1: GridFunction, window: float, quad_dx=None, half_integral=True):
    """Lower and upper a priori bounds for the nonnegative solution at time ``t``.

    Lower: ``e^{-t/2} (u0(x+t) + u0(x-t))/2 + c e^{-t/2} int_{x-t}^{x+t} (u1 + u0/2)``
    with ``c = 1/2`` (d'Alembert's factor) or ``c = 1`` when
    ``half_integral`` is false.  Upper: the free solution with the same data.
    """
    upper = linear_solution_general(t, u0, u1, quad_dx, window=window)
    xs = upper.x
    if t == 0:
        return GridFunction(upper.grid, u0.restrict(upper.grid).values), upper
    v = u1.values + 0.5 * u0.values
    # cumulative trapezoid, then linear interpolation at x +- t
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * u0.grid.dx)))
    prim = GridFunction(u0.grid, cum)
    integral = interp_on_grid(prim, xs + t) - interp_on_grid(prim, xs - t)
    e = math.exp(-0.5 * t)
    c = 0.5 if half_integral else 1.0
    lower = e * 0.5 * (interp_on_grid(u0, xs + t) + interp_on_grid(u0, xs - t)) + c * e * integral
    return GridFunction(upper.grid, lower), upper


def apriori_sandwich(sim, u0, u1, window: float, tol: float, quad_dx=None, half_integral=True) -> CheckReport:
    """Check ``lower - tol <= u <= upper + tol`` at every snapshot of ``sim``."""
    worst = (-np.inf, (math.nan, math.nan))
    rows = []
    for t, u in sim.snapshots:
        lower, upper = apriori_bounds(t, u0, u1, window, quad_dx, half_integral)
        uu = u.restrict(upper.grid).values
        excess = np.maximum(uu - upper.values, lower.values - uu)
        j = int(np.argmax(excess))
        rows.append((t, float((uu - upper.values).max()), float((lower.values - uu).max())))
        if excess[j] > worst[0]:
            worst = (float(excess[j]), (t, float(upper.x[j])))
    name = "apriori_sandwich" + ("" if half_integral else "[literal]")
    return CheckReport(name, worst[0] <= tol, worst[0], worst[1], None, {"per_time": rows, "tolerance": tol})


def domination_transfer(phi: GridFunction, t_list, window: float = 20.0, quad_dx=None) -> CheckReport:
    """Empirical ``C`` with ``S(t) phi <= C e^{t Delta} phi`` on ``|x| <= window``."""
    cs = []
    worst = (-np.inf, (math.nan, math.nan))
    for t in t_list:
        s = apply_s(float(t), phi, quad_dx, window=window)
        h = heat_apply(float(t), phi, window=window)
        r = s.values / h.values
        j = int(np.argmax(r))
        cs.append(float(r[j]))
        if r[j] > worst[0]:
            worst = (float(r[j]), (float(t), float(s.x[j])))
    return CheckReport("domination_transfer", bool(np.isfinite(worst[0])), worst[0], worst[1], worst[0], {"per_time": cs})


def heat_envelope_check(rho: float, p: float, t_list, dx: float = 0.25) -> CheckReport:
    """Constants in the two-regime envelope of ``e^{t Delta} <x>^{-rho}``.

    With ``R = t^{1/(rho(p-1))}``: the value is at most ``C_in`` on
    ``|x| <= R`` and lies between ``c_out |x|^{-rho}`` and ``C_out
    |x|^{-rho}`` on ``R <= |x| <= 4R``.
    """
    c_in, c_lo, c_hi = 0.0, np.inf, 0.0
    for t in t_list:
        R = t ** (1.0 / (rho * (p - 1.0)))
        reach = 4 * R + 8 * math.sqrt(t) + 2 * dx
        grid = Grid.symmetric(reach, dx)
        h = heat_apply(t, japanese_bracket_profile(rho, grid), window=4 * R)
        ax = np.abs(h.x)
        c_in = max(c_in, float(h.values[ax <= R].max()))
        out = ax >= R
        r = h.values[out] * ax[out] ** rho
        c_lo, c_hi = min(c_lo, float(r.min())), max(c_hi, float(r.max()))
    ok = c_in < np.inf and c_lo > 0 and c_hi < np.inf
    return CheckReport(
        "heat_envelope", ok, c_hi, (float(t_list[-1]), math.nan), c_hi, {"c_inner": c_in, "c_outer_low": c_lo, "c_outer_high": c_hi}
    )


# --------------------------------------------------------------------------
# ODE sweep


def ode_residual_sweep(ps=(1.5, 2.0, 2.5, 3.0), alphas=(0.25, 0.5, 1.0), epss=(1e-3, 1e-2), t_grid=None):
    """Evaluate both residuals over a parameter sweep.

    Returns ``(report, rows)`` where rows are
    ``(p, alpha, eps, t, residual_main, residual_halfdamp)``.
    """
    if t_grid is None:
        t_grid = np.concatenate(([0.0], np.logspace(-3, 4, 63)))
    t_grid = np.asarray(t_grid, dtype=float)
    rows = []
    worst = (np.inf, None)
    for p in ps:
        for a in alphas:
            for e in epss:
                main, half = residual_odest6(t_grid, e, p, a)
                for t, m, h in zip(t_grid, main, half):
                    rows.append((p, a, e, float(t), float(m), float(h)))
                j = int(np.argmin(np.minimum(main, half)))
                v = float(min(main[j], half[j]))
                if v < worst[0]:
                    worst = (v, (p, a, e, float(t_grid[j])))
    report = CheckReport(
        "ode_residuals", worst[0] >= 0, worst[0], (worst[1][3], math.nan), None, {"argmin": worst[1]}
    )
    return report, rows
