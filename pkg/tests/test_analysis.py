import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dampwave.analysis import (
    apriori_bounds,
    check_domination,
    check_phi_conditions,
    comparison_experiment,
    far_field_tail,
    kernel_lemma_ratios,
    main_theorem_bound,
    pullback_bound,
)
from dampwave.core import Grid, GridFunction, gaussian_profile, japanese_bracket_profile
from dampwave.ode import heat_g
from dampwave.solver import SolverConfig


def gf(grid, v):
    return GridFunction(grid, np.broadcast_to(np.asarray(v, dtype=float), (grid.n,)))


# data conditions


def test_bracket_profile_passes_conditions():
    rep = check_phi_conditions(japanese_bracket_profile(1.5, Grid.symmetric(200.0, 0.05)))
    assert rep.passed
    c = rep.details["constants"]
    assert c["ic3"] <= 4**0.75 + 1e-9
    assert c["ic4"] <= 1.5 * 0.5 + 1e-6


def test_gaussian_fails_exponential_condition():
    rep = check_phi_conditions(gaussian_profile(Grid.symmetric(20.0, 0.05)))
    assert not rep.passed
    assert any(name.startswith("ic5") for name in rep.details["failed"])


def test_constant_profile_constants():
    rep = check_phi_conditions(GridFunction.constant(Grid.symmetric(50.0, 0.1), 1.0))
    assert rep.passed
    c = rep.details["constants"]
    assert c["ic2"] == c["ic3"] == 1.0
    assert all(v == 1.0 for k, v in c.items() if k.startswith("ic5"))
    assert c["ic4"] == 0.0


def test_nonpositive_profile_rejected():
    with pytest.raises(ValueError):
        check_phi_conditions(GridFunction.constant(Grid.symmetric(5.0, 0.1), 0.0))


# main bound


def test_bound_reduces_to_data_at_zero_shift():
    g = Grid.symmetric(5.0, 0.5)
    uL = japanese_bracket_profile(1.5, g)
    np.testing.assert_array_equal(main_theorem_bound(0.0, uL, 0.0, 2.0).values, uL.values)


@pytest.mark.parametrize("p", [1.5, 2.0, 2.8])
def test_bound_for_constant_data(p):
    g = Grid.symmetric(1.0, 0.5)
    c = 0.3
    vals = [main_theorem_bound(t, gf(g, c), 5.0, p).values[0] for t in (0.0, 10.0, 100.0)]
    expected = [(c ** (p - 1) / ((t + 5.0) * c ** (p - 1) + 1)) ** (1 / (p - 1)) for t in (0.0, 10.0, 100.0)]
    np.testing.assert_allclose(vals, expected, rtol=1e-14)
    assert vals[0] > vals[1] > vals[2]


def test_bound_flat_core_limit():
    g = Grid.symmetric(1.0, 0.5)
    s = 1e8
    v = main_theorem_bound(s, gf(g, 0.5), 0.0, 2.0).values
    np.testing.assert_allclose(v, s ** -1.0, rtol=1e-7)


def test_bound_rejects_negative():
    g = Grid.symmetric(1.0, 0.5)
    with pytest.raises(ValueError):
        main_theorem_bound(1.0, gf(g, -0.1), 1.0, 2.0)


def test_pullback_ratio_bounded():
    g = Grid.symmetric(1.0, 0.5)
    for c in (1e-6, 1e-3, 0.1):
        for s in (0.0, 10.0, 1e4):
            b = main_theorem_bound(s, gf(g, c), 0.0, 2.0).values[0]
            h = pullback_bound(s, gf(g, c), 0.0, 2.0, 0.5).values[0]
            assert 1.0 <= h / b <= 2.0 * 6.0 + 1e-12


# domination


def test_domination_examples():
    g = Grid.symmetric(2.0, 0.5)
    b = gf(g, np.linspace(1, 2, g.n))
    half = gf(g, 0.5 * b.values)
    rep = check_domination([(0.0, half), (1.0, half)], [(0.0, b), (1.0, b)], 1e-2)
    assert rep.max_ratio == pytest.approx(0.5) and rep.violations == 0 and rep.passed
    zero = gf(g, 0.0)
    assert check_domination([(0.0, zero)], [(0.0, b)]).max_ratio == 0.0


def test_domination_counts_violations():
    g = Grid.symmetric(2.0, 0.5)
    b = gf(g, 1.0)
    u = gf(g, [0.5, 1.005, 1.02, 1.5, 0.0, 0.0, 0.0, 0.0, 0.0])
    rep = check_domination([(0.0, u)], [(0.0, b)], 1e-2)
    assert rep.violations == 2
    assert rep.argmax == (0.0, g.x[3])


def test_domination_mismatch_errors():
    g = Grid.symmetric(2.0, 0.5)
    with pytest.raises(ValueError):
        check_domination([(0.0, gf(g, 1.0))], [(1.0, gf(g, 1.0))])
    with pytest.raises(ValueError):
        check_domination([(0.0, gf(g, 1.0))], [(0.0, gf(Grid.symmetric(1.0, 0.5), 1.0))])
    with pytest.raises(ValueError):
        check_domination([], [(0.0, gf(g, 1.0))])


@given(st.floats(1e-3, 1e3), st.lists(st.floats(0.0, 2.0), min_size=5, max_size=5))
def test_domination_scale_invariant(scale, u_vals):
    g = Grid.symmetric(1.0, 0.5)
    u = gf(g, u_vals)
    b = gf(g, [1.0, 0.5, 2.0, 1.0, 0.3])
    r1 = check_domination([(0.0, u)], [(0.0, b)])
    r2 = check_domination([(0.0, gf(g, scale * u.values))], [(0.0, gf(g, scale * b.values))])
    assert r2.violations == r1.violations
    assert r2.max_ratio == pytest.approx(r1.max_ratio, rel=1e-12)


# a priori bounds


def test_literal_lower_bound_fails_for_constant_data():
    # constant data c: the free solution stays c, while
    # e^{-t/2} (c + 2 t c / 2) = c (1 + t) e^{-t/2} > c at t = 1
    c, t = 0.1, 1.0
    g = Grid.symmetric(6.0, 0.01)
    u0, u1 = gf(g, c), gf(g, 0.0)
    lower_full, upper = apriori_bounds(t, u0, u1, 2.0, half_integral=False)
    np.testing.assert_allclose(upper.values, c, rtol=1e-6)
    assert lower_full.values.max() == pytest.approx(c * 2 * math.exp(-0.5), rel=1e-9)
    assert lower_full.values.max() > upper.values.max()
    lower, _ = apriori_bounds(t, u0, u1, 2.0)
    assert np.all(lower.values <= upper.values)


@given(st.floats(0.1, 8.0))
def test_dalembert_bound_below_free_solution(t):
    g = Grid.symmetric(t + 3.0, 0.02)
    u0 = japanese_bracket_profile(1.5, g)
    u1 = gf(g, 0.0)
    lower, upper = apriori_bounds(t, u0, u1, 2.0)
    assert np.all(lower.values <= upper.values + 1e-9)


# comparison


def test_comparison_identical_zero_and_preconditions():
    g = Grid.symmetric(20.0, 0.1)
    phi = japanese_bracket_profile(1.5, g)
    lo = gf(g, 0.01 * phi.values)
    z = gf(g, 0.0)
    cfg = SolverConfig(g, 0.09, 5.0)
    assert comparison_experiment(lo, z, lo, z, cfg).worst_value == 0.0
    hi = gf(g, 0.02 * phi.values)
    with pytest.raises(ValueError):
        comparison_experiment(hi, z, lo, z, cfg)
    big = gf(g, 0.2 * phi.values)
    with pytest.raises(ValueError):
        comparison_experiment(lo, z, big, z, cfg)


def test_comparison_ordered_data():
    g = Grid.symmetric(30.0, 0.1)
    phi = japanese_bracket_profile(1.5, g)
    z = gf(g, 0.0)
    rep = comparison_experiment(gf(g, 0.01 * phi.values), z, gf(g, 0.02 * phi.values), z, SolverConfig(g, 0.09, 10.0))
    assert rep.passed and rep.worst_value < 0


# misc


def test_kernel_lemma_constant_data_bounded():
    rep = kernel_lemma_ratios(GridFunction.constant(Grid.symmetric(80.0, 0.1), 1.0), 0.6, [2, 5, 10, 20, 50], 5.0)
    # d/dt S 1 / S 1 = e^{-t}/(1 - e^{-t})
    expected = [math.exp(-t) / (1 - math.exp(-t)) / t ** (-0.8) for t in (2, 5, 10, 20, 50)]
    # quadrature error is absolute (about 1e-8 at dx = 0.1), hence atol
    np.testing.assert_allclose(rep.details["c_dt"], expected, rtol=1e-3, atol=1e-5)
    assert rep.passed


def test_kernel_lemma_monotone_in_sigma():
    phi = japanese_bracket_profile(1.5, Grid.symmetric(40.0, 0.1))
    a = kernel_lemma_ratios(phi, 0.55, [5.0, 10.0], 5.0).details["c_dt"]
    b = kernel_lemma_ratios(phi, 0.7, [5.0, 10.0], 5.0).details["c_dt"]
    assert all(x >= y for x, y in zip(a, b))
    with pytest.raises(ValueError):
        kernel_lemma_ratios(phi, 0.4, [5.0], 5.0)
    with pytest.raises(ValueError):
        kernel_lemma_ratios(phi, 0.6, [1.0], 5.0)


def test_far_field_tail_against_direct_quadrature():
    from scipy import integrate

    t, p, rho, eps, q, X = 300.0, 2.0, 1.5, 0.25, 1.0, 500.0
    f = lambda x: heat_g(t, eps * (1 + x * x) ** (-rho / 2), p) ** q  # noqa: E731
    edges = X * 10.0 ** np.arange(0, 13)
    direct = sum(integrate.quad(f, a, b, limit=200)[0] for a, b in zip(edges[:-1], edges[1:]))
    # beyond 1e12 * X the integrand is eps x^{-rho} to many digits
    direct += eps * edges[-1] ** (1 - rho) / (rho - 1)
    direct *= 2
    assert far_field_tail(t, p, rho, eps, q, X) == pytest.approx(direct, rel=1e-4)
    with pytest.raises(ValueError):
        far_field_tail(t, p, 0.5, eps, 1.0, X)
