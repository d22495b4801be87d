"""Named verification jobs grouped into CLI scenarios.

Every job is a module-level function ``job(cfg) -> JobResult`` so it can be
shipped to a worker process.  Jobs never read the clock or a random source
without a fixed seed, which keeps their CSV output bit-reproducible.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import analysis, heat, kernels, ode, special_functions
from .config import ConfigError, ScenarioConfig
from .core import INF, CheckReport, Grid, GridFunction, gaussian_profile, japanese_bracket_profile
from .solver import SolverConfig, domain_for, simulate


@dataclass
class JobResult:
    reports: list[CheckReport]
    files: dict[str, str] = field(default_factory=dict)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def _qname(q):
    return "inf" if q is INF else f"{q:g}"


# --------------------------------------------------------------------------
# special functions


BESSEL_ORACLE_RTOL = 1e-10


def job_bessel_oracle(cfg: ScenarioConfig) -> JobResult:
    x = np.round(np.arange(0, 3001) * 0.01, 12)
    series = special_functions.bessel_i(0, x)
    oracle = special_functions.i0_integral_oracle(x)
    rel = np.abs(series / oracle - 1.0)
    j = int(np.argmax(rel))
    rep = CheckReport("bessel_oracle", bool(rel[j] <= BESSEL_ORACLE_RTOL), float(rel[j]), (math.nan, float(x[j])))
    rows = [(x[i], series[i], oracle[i], rel[i]) for i in range(0, x.size, 50)]
    return JobResult([rep], {"bessel_oracle.csv": _csv(["x", "series", "oracle", "rel_err"], rows)})


def job_i0_lower_bound(cfg: ScenarioConfig) -> JobResult:
    x = np.round(np.arange(1, 5001) * 0.01, 12)
    val = special_functions.bessel_i_scaled(0, x)
    lb = special_functions.i0_lower_bound(x)
    margin = val / lb - 1.0
    j = int(np.argmin(margin))
    rep = CheckReport("i0_lower_bound", bool(margin[j] >= 0), float(margin[j]), (math.nan, float(x[j])))
    return JobResult([rep])


# --------------------------------------------------------------------------
# kernels


KERNEL_TIMES = (1.0, 2.0, 5.0, 10.0, 20.0)
KERNEL_ATOL = 1e-6
CONE_TIMES = (1.0, 5.0, 20.0)
CONE_RTOL = 1e-6


def job_kernel_identities(cfg: ScenarioConfig) -> JobResult:
    rows, worst = [], (-1.0, (math.nan, math.nan), "")
    for t in KERNEL_TIMES:
        qd = 1e-3 * t
        one = GridFunction.constant(Grid.symmetric(t + 1.0 + 2 * qd, qd), 1.0)
        et = math.exp(-t)
        for name, op, exact in (
            ("S", lambda: kernels.apply_s(t, one, qd, window=1.0), 1.0 - et),
            ("dS", lambda: kernels.apply_dt_s(t, one, qd, window=1.0), et),
            ("ddS", lambda: kernels.apply_dtt_s(t, one, None, qd, window=1.0), -et),
        ):
            vals = op().values
            err = float(np.max(np.abs(vals - exact)))
            rows.append((t, name, float(vals[vals.size // 2]), exact, err))
            if err > worst[0]:
                worst = (err, (t, 0.0), name)
    rep = CheckReport("kernel_identities", worst[0] <= KERNEL_ATOL, worst[0], worst[1], None, {"operator": worst[2]})
    return JobResult([rep], {"kernel_identities.csv": _csv(["t", "operator", "value", "exact", "abs_err"], rows)})


def job_cone_limit(cfg: ScenarioConfig) -> JobResult:
    omega = 1e-6
    rows, worst = [], (-1.0, math.nan)
    for t in CONE_TIMES:
        y = math.sqrt(t * t - omega * omega)
        for name, k, lim in (("k1", kernels.k1, kernels.k1_cone_limit), ("k2", kernels.k2, kernels.k2_cone_limit)):
            val, ref = float(k(t, y)), lim(t)
            rel = abs(val / ref - 1.0)
            rows.append((t, name, val, ref, rel))
            if rel > worst[0]:
                worst = (rel, t)
    rep = CheckReport("cone_limit", worst[0] <= CONE_RTOL, worst[0], (worst[1], math.nan))
    return JobResult([rep], {"cone_limit.csv": _csv(["t", "kernel", "value", "cone_limit", "rel_err"], rows)})


# --------------------------------------------------------------------------
# ODE supersolution


DERIV_RTOL = 1e-6
DERIV_SAMPLES = 100
DERIV_SEED = 20240601


def _h_mp(t, e, p, a):
    g = (p * (p + 1) * e ** (p - 1) / ((p - 1) ** 2 * e ** (p - 1) * t + p * p + p)) ** (1 / (p - 1))
    w = (mpmath.mpf(1) / 2 + (2 ** (1 / a) + t) ** (-a)) ** (-1 / (p - 1))
    return w * g


def fd_derivatives(t, e, p, a, dps=40):
    """Central differences of ``H`` in extended precision, in :class:`~dampwave.ode.HDerivs` order."""
    with mpmath.workdps(dps):
        t, e, p, a = (mpmath.mpf(float(v)) for v in (t, e, p, a))
        h = mpmath.mpf(10) ** (-(dps // 3))
        ht, he = h * max(t, 1), h * e

        def F(s, r):
            return _h_mp(s, r, p, a)

        c = F(t, e)
        out = (
            (F(t + ht, e) - F(t - ht, e)) / (2 * ht),
            (F(t, e + he) - F(t, e - he)) / (2 * he),
            (F(t + ht, e + he) - F(t + ht, e - he) - F(t - ht, e + he) + F(t - ht, e - he)) / (4 * ht * he),
            (F(t, e + he) - 2 * c + F(t, e - he)) / he**2,
            (F(t + ht, e) - 2 * c + F(t - ht, e)) / ht**2,
        )
        return tuple(float(v) for v in out)


def job_ode_residuals(cfg: ScenarioConfig) -> JobResult:
    rep, rows = analysis.ode_residual_sweep()
    header = ["p", "alpha", "eps", "t", "residual_main", "residual_halfdamp"]
    return JobResult([rep], {"ode_residuals.csv": _csv(header, rows)})


def job_ode_derivatives(cfg: ScenarioConfig) -> JobResult:
    rng = np.random.default_rng(DERIV_SEED)
    names = ("dt", "deps", "dt_deps", "deps2", "dt2")
    rows, worst = [], (-1.0, None)
    for _ in range(DERIV_SAMPLES):
        p = float(rng.uniform(1.5, 3.0))
        a = float(rng.uniform(0.25, 1.0))
        e = float(10 ** rng.uniform(-3, -1))
        t = float(10 ** rng.uniform(-1, 3))
        closed = ode.h_derivs(t, e, p, a).as_tuple()
        fd = fd_derivatives(t, e, p, a)
        for name, c, f in zip(names, closed, fd):
            rel = abs(float(c) / f - 1.0)
            rows.append((p, a, e, t, name, float(c), f, rel))
            if rel > worst[0]:
                worst = (rel, (t, name))
    rep = CheckReport("ode_derivatives", worst[0] <= DERIV_RTOL, worst[0], (worst[1][0], math.nan), None, {"quantity": worst[1][1]})
    header = ["p", "alpha", "eps", "t", "quantity", "closed_form", "finite_difference", "rel_err"]
    return JobResult([rep], {"ode_derivatives.csv": _csv(header, rows)})


# --------------------------------------------------------------------------
# heat supersolution


HEAT_TIMES = tuple(np.logspace(2, 5, 13))
HEAT_SLOPE_TOL = 0.05
HEAT_BAND = 4.0


def job_heat_rates(cfg: ScenarioConfig) -> JobResult:
    fits = [heat.heat_rate_check(cfg.p, cfg.rho, q, HEAT_TIMES) for q in cfg.q]
    reps = [
        CheckReport(
            f"heat_rate[q={_qname(f.q)}]",
            abs(f.deviation) <= HEAT_SLOPE_TOL,
            f.slope,
            (math.nan, math.nan),
            None,
            {"target": f.target, "deviation": f.deviation, "stderr": f.slope_stderr},
        )
        for f in fits
    ]
    return JobResult(reps, {"heat_rates.csv": heat.rate_table_csv(fits)})


def job_heat_log_band(cfg: ScenarioConfig) -> JobResult:
    p, rho, q = 2.0, 3.0, 2.0
    fit = heat.heat_rate_check(p, rho, q, HEAT_TIMES)
    rep = CheckReport("heat_log_band", fit.band_factor <= HEAT_BAND, fit.band_factor, (math.nan, math.nan), None, {"band": fit.band})
    rows = [(t, n, r) for t, n, r in zip(fit.t, fit.norms, fit.ratios)]
    return JobResult([rep], {"heat_log_band.csv": _csv(["t", "norm", "ratio"], rows)})


def job_heat_envelope(cfg: ScenarioConfig) -> JobResult:
    return JobResult([analysis.heat_envelope_check(cfg.rho, cfg.p, (10.0, 100.0, 1000.0))])


# --------------------------------------------------------------------------
# simulation


SIM_DX, SIM_T = 0.01, 10.0
SIM_OBS = 15.0
LINEAR_ERR_TOL = 1e-3
LINEAR_RATIO_MIN = 3.0


def _linear_error(dx, dt, t_final, nonlinear, p):
    grid = Grid.symmetric(domain_for(SIM_OBS, t_final, margin=3.0, cfl=dt / dx), dx)
    u0 = gaussian_profile(grid)
    u1 = GridFunction.constant(grid, 0.0)
    cfg = SolverConfig(grid, dt, t_final, p, nonlinear, (0.0, 0.5 * t_final, t_final))
    sim = simulate(u0, u1, cfg)
    t_end, u_end = sim.snapshots[-1]
    err = math.nan
    if not nonlinear:
        ref = kernels.linear_solution_general(t_end, u0, u1, quad_dx=0.25 * dx, window=SIM_OBS)
        err = float(np.max(np.abs(u_end.restrict(ref.grid).values - ref.values)))
    return sim, err


def job_linear_consistency(cfg: ScenarioConfig) -> JobResult:
    dx, dt, t_final = cfg.resolved(SIM_DX, SIM_T)
    sim, err = _linear_error(dx, dt, t_final, cfg.nonlinear, cfg.p)
    files = {}
    for t, u in sim.snapshots:
        files[f"snapshot_t{t:.6f}.csv"] = u.to_csv(header_lines=(f"t={t:.17g}",))
    meta = dict(data="gaussian", u1="0")
    sim.meta.update(meta)
    files["simulate_meta.txt"] = sim.metadata_text()
    if cfg.nonlinear:
        rep = CheckReport("simulate_nonlinear", sim.min_value_seen > -1e-12, sim.min_value_seen, (math.nan, math.nan))
        return JobResult([rep], files)
    _, err2 = _linear_error(0.5 * dx, 0.5 * dt, t_final, False, cfg.p)
    ratio = err / err2 if err2 > 0 else math.inf
    rows = [(dx, dt, sim.snapshots[-1][0], err), (0.5 * dx, 0.5 * dt, sim.snapshots[-1][0], err2)]
    files["linear_error.csv"] = _csv(["dx", "dt", "t", "linf_error"], rows)
    rep = CheckReport(
        "linear_consistency",
        err <= LINEAR_ERR_TOL and ratio >= LINEAR_RATIO_MIN,
        err,
        (sim.snapshots[-1][0], math.nan),
        ratio,
        {"refined_error": err2},
    )
    return JobResult([rep], files)


APRIORI_TIMES = (1.0, 5.0, 20.0, 100.0)
APRIORI_DX, APRIORI_OBS = 0.05, 40.0


def job_apriori(cfg: ScenarioConfig) -> JobResult:
    dx, dt, t_final = cfg.resolved(APRIORI_DX, max(APRIORI_TIMES))
    times = tuple(t for t in APRIORI_TIMES if t <= t_final)
    grid = Grid.symmetric(domain_for(APRIORI_OBS, t_final, cfl=dt / dx), dx)
    u0 = GridFunction(grid, cfg.eps * japanese_bracket_profile(cfg.rho, grid).values)
    u1 = GridFunction.constant(grid, 0.0)
    sim = simulate(u0, u1, SolverConfig(grid, dt, t_final, cfg.p, True, times, check_sign=True))
    tol = 10 * dx * dx
    reps = [analysis.apriori_sandwich(sim, u0, u1, APRIORI_OBS, tol, half_integral=h) for h in (True, False)]
    rows = []
    for rep in reps:
        for t, up, lo in rep.details["per_time"]:
            rows.append((rep.name, t, up, lo))
    return JobResult(reps, {"apriori.csv": _csv(["bound", "t", "max_u_minus_upper", "max_lower_minus_u"], rows)})


# --------------------------------------------------------------------------
# headline bound and decay rates


MAIN_DX = 0.05
MAIN_TOL = 1e-2


def job_phi_conditions(cfg: ScenarioConfig) -> JobResult:
    grid = Grid.symmetric(cfg.x_obs, cfg.resolved(MAIN_DX, 1.0)[0])
    rep = analysis.check_phi_conditions(japanese_bracket_profile(cfg.rho, grid))
    rows = sorted(rep.details["constants"].items())
    return JobResult([rep], {"phi_conditions.csv": _csv(["condition", "constant"], rows)})


def job_main_theorem(cfg: ScenarioConfig) -> JobResult:
    dx, dt, t_final = cfg.resolved(MAIN_DX, 200.0)
    times = tuple(t for t in analysis.DEFAULT_MAIN_TIMES if t < t_final) + (t_final,)
    sweep = tuple(sorted(set(cfg.t0_sweep) | {cfg.t0}))
    params = cfg.model()
    sim, _, _ = analysis._simulate_bracket(params, dx, cfg.x_obs, t_final, times, dt=dt)
    reps, rows = [], []
    passing = []
    for t0 in sweep:
        p2 = type(params)(params.p, params.rho, params.alpha, params.sigma, params.eps, t0)
        run = analysis.main_theorem_experiment(p2, dx, cfg.x_obs, t_final, times, MAIN_TOL, sim=sim)
        reps.append(run.to_check())
        if run.passed:
            passing.append(t0)
        for (t, cal), (_, raw) in zip(run.calibrated.per_time, run.raw.per_time):
            rows.append((t0, t, cal, raw, run.calibration))
    best = min(passing) if passing else math.nan
    headline = [r for r in reps if r.name == f"main_theorem[T0={cfg.t0:g}]"][0]
    summary = CheckReport(
        "main_theorem",
        bool(passing),
        headline.worst_value,
        headline.worst_location,
        best,
        {"smallest_passing_t0": best, "violations": headline.details["violations"]},
    )
    files = {"domination.csv": _csv(["t0", "t", "max_ratio_calibrated", "max_ratio_raw", "calibration"], rows)}
    return JobResult([summary] + reps, files)


RATE_DX = 0.1
RATE_WINDOW = (100.0, 1000.0)
RATE_TOL = 0.1


def job_decay_rates(cfg: ScenarioConfig) -> JobResult:
    dx, _, t_final = cfg.resolved(RATE_DX, RATE_WINDOW[1])
    if t_final <= RATE_WINDOW[0]:
        raise ConfigError(f"t_final must exceed {RATE_WINDOW[0]:g} for the rate fit")
    window = (RATE_WINDOW[0], t_final)
    fits, sim = analysis.decay_rates(cfg.model(), tuple(cfg.q), None, window, dx, eps=cfg.rate_eps)
    reps = [
        CheckReport(
            f"decay_rate[q={_qname(f.q)}]",
            abs(f.deviation) <= RATE_TOL,
            f.slope,
            (math.nan, math.nan),
            None,
            {"target": f.target, "deviation": f.deviation, "eps": cfg.rate_eps},
        )
        for f in fits
    ]
    reps.append(CheckReport("decay_positivity", sim.min_value_seen >= 0, sim.min_value_seen))
    return JobResult(reps, {"decay_rates.csv": heat.rate_table_csv(fits)})


# --------------------------------------------------------------------------
# comparison principle


CMP_DX, CMP_T, CMP_HALF = 0.05, 100.0, 150.0
CMP_TOL = 1e-6


def _cmp_setup(cfg):
    dx, dt, t_final = cfg.resolved(CMP_DX, CMP_T)
    grid = Grid.symmetric(CMP_HALF, dx)
    phi = japanese_bracket_profile(cfg.rho, grid)
    zero = GridFunction.constant(grid, 0.0)
    return SolverConfig(grid, dt, t_final, cfg.p, True), phi, zero


def job_comparison_double(cfg: ScenarioConfig) -> JobResult:
    scfg, phi, zero = _cmp_setup(cfg)
    lo = GridFunction(phi.grid, cfg.eps * phi.values)
    hi = GridFunction(phi.grid, 2 * cfg.eps * phi.values)
    rep = analysis.comparison_experiment(lo, zero, hi, zero, scfg, CMP_TOL)
    rep.name = "comparison_double"
    return JobResult([rep])


def job_comparison_identical(cfg: ScenarioConfig) -> JobResult:
    scfg, phi, zero = _cmp_setup(cfg)
    u = GridFunction(phi.grid, cfg.eps * phi.values)
    rep = analysis.comparison_experiment(u, zero, u, zero, scfg, CMP_TOL)
    rep.name = "comparison_identical"
    return JobResult([rep])


def job_comparison_ode(cfg: ScenarioConfig) -> JobResult:
    scfg, phi, zero = _cmp_setup(cfg)
    u0 = GridFunction(phi.grid, cfg.eps * phi.values)
    eps, p, a = cfg.eps, cfg.p, cfg.alpha
    ode.OdeSupersolutionParams(p, a, eps)

    def sup(t):
        return ode.h_fn(t, eps, p, a)

    rep = analysis.supersolution_experiment(u0, zero, scfg, sup, CMP_TOL, name="comparison_ode")
    return JobResult([rep])


# --------------------------------------------------------------------------
# linear estimates


RATIO_TIMES = (2.0, 5.0, 10.0, 20.0, 50.0)
RATIO_WINDOW, RATIO_DX = 20.0, 0.05


def _ratio_phi(cfg):
    dx = cfg.dx if cfg.dx is not None else RATIO_DX
    tmax = max(RATIO_TIMES)
    reach = max(tmax, heat.GAUSS_WINDOW * math.sqrt(tmax))
    return japanese_bracket_profile(cfg.rho, Grid.symmetric(RATIO_WINDOW + reach + 10 * dx, dx))


def job_kernel_lemma(cfg: ScenarioConfig) -> JobResult:
    rep = analysis.kernel_lemma_ratios(_ratio_phi(cfg), cfg.sigma, RATIO_TIMES, RATIO_WINDOW)
    rows = list(zip(rep.details["t"], rep.details["c_dt"], rep.details["c_dtt"]))
    return JobResult([rep], {"lemma_ratios.csv": _csv(["t", "ratio_dt", "ratio_dtt"], rows)})


def job_domination_transfer(cfg: ScenarioConfig) -> JobResult:
    return JobResult([analysis.domination_transfer(_ratio_phi(cfg), RATIO_TIMES, RATIO_WINDOW)])


def job_linear_lower_bound(cfg: ScenarioConfig) -> JobResult:
    phi = _ratio_phi(cfg)
    return JobResult([analysis.linear_lower_bound(phi, t, 1.0, RATIO_WINDOW) for t in (10.0, 50.0)])


# --------------------------------------------------------------------------
# registry


SCENARIOS: dict[str, dict[str, object]] = {
    "bessel-check": {"bessel_oracle": job_bessel_oracle, "i0_lower_bound": job_i0_lower_bound},
    "kernel-check": {"kernel_identities": job_kernel_identities, "cone_limit": job_cone_limit},
    "ode-check": {"ode_residuals": job_ode_residuals, "ode_derivatives": job_ode_derivatives},
    "heat-rates": {"heat_rates": job_heat_rates, "heat_log_band": job_heat_log_band, "heat_envelope": job_heat_envelope},
    "simulate": {"linear_consistency": job_linear_consistency},
    "apriori": {"apriori": job_apriori},
    "main-theorem": {"phi_conditions": job_phi_conditions, "main_theorem": job_main_theorem},
    "rates": {"decay_rates": job_decay_rates},
    "comparison": {
        "comparison_double": job_comparison_double,
        "comparison_identical": job_comparison_identical,
        "comparison_ode": job_comparison_ode,
    },
    "lemma-ratios": {
        "kernel_lemma": job_kernel_lemma,
        "domination_transfer": job_domination_transfer,
        "linear_lower_bound": job_linear_lower_bound,
    },
}


def jobs_for(scenario: str, checks=()) -> list[tuple[str, object]]:
    """Ordered ``(name, job)`` pairs for a scenario, filtered by ``checks``."""
    if scenario == "all":
        table = {k: v for group in SCENARIOS.values() for k, v in group.items()}
    elif scenario in SCENARIOS:
        table = SCENARIOS[scenario]
    else:
        raise ConfigError(f"unknown scenario {scenario!r}")
    unknown = [c for c in checks if c not in table]
    if unknown:
        raise ConfigError(f"unknown checks for {scenario}: {', '.join(unknown)}")
    names = list(checks) if checks else list(table)
    return [(n, table[n]) for n in names]
