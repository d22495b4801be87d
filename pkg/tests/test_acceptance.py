"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

The lines are also repeated in the pytest terminal summary.
"""

import math
import time

import pytest

from conftest import ACCEPTANCE_LINES
from dampwave import scenarios as sc
from dampwave.cli import main
from dampwave.config import ScenarioConfig

CFG = ScenarioConfig()


def record(number, title, passed, detail, elapsed, budget):
    within = elapsed < budget
    status = "PASS" if passed and within else "FAIL"
    limit = f"budget {budget:g} s" if math.isfinite(budget) else "no budget"
    line = f"[{status}] criterion {number:>2}: {title}: {detail} ({elapsed:.2f} s, {limit})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed and within


def timed(job, cfg=CFG):
    t0 = time.perf_counter()
    res = job(cfg)
    return res, time.perf_counter() - t0


def by_name(reports):
    return {r.name: r for r in reports}


def test_criterion_01_bessel():
    t0 = time.perf_counter()
    oracle = sc.job_bessel_oracle(CFG).reports[0]
    lower = sc.job_i0_lower_bound(CFG).reports[0]
    dt = time.perf_counter() - t0
    ok = oracle.worst_value <= 1e-10 and lower.worst_value >= 0
    detail = f"max rel err vs integral {oracle.worst_value:.2e} (tol 1e-10); lower-bound min margin {lower.worst_value:.2e} (>= 0)"
    assert record(1, "Bessel series vs integral, I0 lower bound", ok, detail, dt, 1.0)


def test_criterion_02_kernel_identities():
    res, dt = timed(sc.job_kernel_identities)
    rep = res.reports[0]
    ok = rep.worst_value <= 1e-6
    assert record(2, "S/dS/ddS of constant data", ok, f"max abs err {rep.worst_value:.2e} (tol 1e-6)", dt, 10.0)


def test_criterion_03_cone_limit():
    res, dt = timed(sc.job_cone_limit)
    rep = res.reports[0]
    ok = rep.worst_value <= 1e-6
    assert record(3, "k2 light-cone limit", ok, f"max rel err {rep.worst_value:.2e} (tol 1e-6)", dt, 1.0)


def test_criterion_04_ode_supersolution():
    t0 = time.perf_counter()
    resid = sc.job_ode_residuals(CFG).reports[0]
    deriv = sc.job_ode_derivatives(CFG).reports[0]
    dt = time.perf_counter() - t0
    ok = resid.worst_value >= 0 and deriv.worst_value <= 1e-6
    detail = f"min residual {resid.worst_value:.2e} (>= 0); derivative max rel err {deriv.worst_value:.2e} (tol 1e-6)"
    assert record(4, "ODE supersolution residuals and derivatives", ok, detail, dt, 1.0)


def test_criterion_05_linear_consistency():
    res, dt = timed(sc.job_linear_consistency)
    rep = res.reports[0]
    ok = rep.worst_value <= 1e-3 and rep.empirical_constant >= 3
    detail = f"L-inf err {rep.worst_value:.2e} (tol 1e-3), refinement ratio {rep.empirical_constant:.2f} (>= 3)"
    assert record(5, "FD linear mode vs kernel evaluation", ok, detail, dt, 120.0)


def test_criterion_06_apriori_sandwich():
    res, dt = timed(sc.job_apriori)
    reps = by_name(res.reports)
    main_rep, literal = reps["apriori_sandwich"], reps["apriori_sandwich[literal]"]
    tol = 10 * sc.APRIORI_DX**2
    ok = main_rep.worst_value <= tol
    detail = (
        f"max bound excess {main_rep.worst_value:.2e} (tol 10 dx^2 = {tol:g}); "
        f"full-integral lower form excess {literal.worst_value:.2e} at t={literal.worst_location[0]:.3g}"
    )
    assert record(6, "a priori sandwich at t in {1,5,20,100}", ok, detail, dt, 120.0)


def test_criterion_07_main_theorem():
    res, dt = timed(sc.job_main_theorem)
    reps = by_name(res.reports)
    head = reps["main_theorem"]
    t0_best = head.empirical_constant
    per_t0 = ", ".join(
        f"T0={name.split('=')[1][:-1]}: viol {r.details['violations']}, max ratio {r.worst_value:.3f}, raw {r.details['raw_max_ratio']:.2f}"
        for name, r in reps.items()
        if name.startswith("main_theorem[")
    )
    ok = head.passed and head.details["violations"] == 0
    detail = f"smallest passing T0 {t0_best:g}; {per_t0}"
    assert record(7, "domination by the main bound, |x| <= 200, t <= 200", ok, detail, dt, 300.0)


def test_criterion_08_decay_rates():
    res, dt = timed(sc.job_decay_rates)
    rates = [r for r in res.reports if r.name.startswith("decay_rate[")]
    ok = all(abs(r.details["deviation"]) <= 0.1 for r in rates) and len(rates) == 3
    detail = "; ".join(f"{r.name[11:-1]}: slope {r.worst_value:.3f} vs {r.details['target']:.3f}" for r in rates)
    detail += f" (tol 0.1, eps={CFG.rate_eps:g})"
    assert record(8, "nonlinear L^q decay slopes on [1e2, 1e3]", ok, detail, dt, 900.0)


def test_criterion_09_heat_rates():
    t0 = time.perf_counter()
    fits = sc.job_heat_rates(CFG).reports
    band = sc.job_heat_log_band(CFG).reports[0]
    dt = time.perf_counter() - t0
    ok = all(abs(r.details["deviation"]) <= 0.05 for r in fits) and band.worst_value <= 4
    detail = "; ".join(f"{r.name[10:-1]}: slope {r.worst_value:.3f} vs {r.details['target']:.3f}" for r in fits)
    detail += f" (tol 0.05); (2,3) log band factor {band.worst_value:.3f} (<= 4)"
    assert record(9, "heat supersolution rates", ok, detail, dt, 60.0)


def test_criterion_10_comparison():
    t0 = time.perf_counter()
    reps = [job(CFG).reports[0] for job in (sc.job_comparison_identical, sc.job_comparison_double, sc.job_comparison_ode)]
    dt = time.perf_counter() - t0
    ok = all(r.worst_value <= 1e-6 for r in reps)
    detail = "; ".join(f"{r.name}: max(u_low - u_high) {r.worst_value:.2e}" for r in reps) + " (tol 1e-6)"
    assert record(10, "ordering preserved through t = 100", ok, detail, dt, 300.0)


@pytest.mark.slow
def test_criterion_11_determinism(tmp_path):
    t0 = time.perf_counter()
    a, b = tmp_path / "a", tmp_path / "b"
    code_a = main(["all", "--out", str(a), "--jobs", "1"])
    code_b = main(["all", "--out", str(b), "--jobs", "4"])
    dt = time.perf_counter() - t0
    csvs = sorted(p.name for p in a.glob("*.csv"))
    differing = [n for n in csvs if (a / n).read_bytes() != (b / n).read_bytes()]
    ok = code_a == 0 and code_b == 0 and bool(csvs) and not differing and csvs == sorted(p.name for p in b.glob("*.csv"))
    detail = f"{len(csvs)} CSV files compared, {len(differing)} differ; exit codes {code_a}, {code_b}"
    assert record(11, "bit-identical CSVs across reruns", ok, detail, dt, math.inf)
