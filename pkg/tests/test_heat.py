import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dampwave.core import INF, Grid, GridFunction, gaussian_profile, japanese_bracket_profile
from dampwave.heat import (
    DecayFit,
    fit_decay,
    heat_apply,
    heat_rate_check,
    heat_supersolution,
    heat_tail_mass,
    log_loss_exponent,
    rate_table_csv,
    target_exponent,
)


def test_gaussian_closed_form():
    t = 2.0
    f = gaussian_profile(Grid.symmetric(40.0, 0.02))
    h = heat_apply(t, f, window=10.0)
    # e^{-x^2} evolves to (1+4t)^{-1/2} e^{-x^2/(1+4t)}
    ref = np.exp(-h.x**2 / (1 + 4 * t)) / math.sqrt(1 + 4 * t)
    assert np.max(np.abs(h.values - ref)) < 1e-8


def test_constant_preserved_and_identity_at_zero():
    g = Grid.symmetric(30.0, 0.1)
    c = GridFunction.constant(g, 0.7)
    np.testing.assert_allclose(heat_apply(3.0, c).values, 0.7, rtol=1e-14)
    f = gaussian_profile(g)
    assert heat_apply(0.0, f) is f
    with pytest.raises(ValueError):
        heat_apply(-1.0, f)
    with pytest.raises(ValueError):
        heat_apply(1e-4, f)


def test_tail_mass():
    assert heat_tail_mass() == pytest.approx(math.erfc(4.0))
    assert heat_tail_mass() < 1e-7


def test_supersolution_below_heat_flow():
    g = Grid.symmetric(60.0, 0.1)
    phi = japanese_bracket_profile(1.5, g)
    s = heat_supersolution(5.0, phi, 2.0, window=20.0)
    h = heat_apply(5.0, phi, window=20.0)
    assert np.all(s.values <= h.values)
    with pytest.raises(ValueError):
        heat_supersolution(1.0, GridFunction.constant(g, 0.0), 2.0)


def test_target_exponents():
    assert target_exponent(1.0, 1.5, 2.0) == pytest.approx(-1 / 3)
    assert target_exponent(2.0, 1.5, 2.0) == pytest.approx(-2 / 3)
    assert target_exponent(INF, 1.5, 2.0) == pytest.approx(-1.0)
    assert target_exponent(2.0, 3.0, 2.0) == pytest.approx(-0.75)
    assert log_loss_exponent(2.0, 2.0) == pytest.approx(-0.75)


def test_fit_exact_power_law():
    t = np.logspace(1, 4, 10)
    fit = fit_decay(t, 3.0 * t**-0.5)
    assert abs(fit.slope + 0.5) < 1e-12
    assert fit.slope_stderr < 1e-12


def test_fit_perturbed_power_law():
    t = np.logspace(3, 5, 15)
    fit = fit_decay(t, 2.0 * t ** (-1 / 3) * (1 + t**-0.5), target=-1 / 3)
    assert abs(fit.deviation) < 0.02


def test_fit_errors():
    with pytest.raises(ValueError):
        fit_decay([1.0, 2.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        fit_decay([1.0, 2.0, 3.0], [1.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        fit_decay([1.0, 2.0, 3.0], [1.0, 1.0, 1.0], window=(5.0, 5.0))
    with pytest.raises(ValueError):
        DecayFit(1.0, (2.0, 1.0), -1.0, 0.0, -1.0)
    with pytest.raises(ValueError):
        DecayFit(1.0, (1.0, 2.0), math.nan, 0.0, -1.0)


def test_rate_check_and_table():
    fit = heat_rate_check(2.0, 1.5, 2.0, np.logspace(2, 4, 5))
    assert abs(fit.deviation) < 0.06
    table = rate_table_csv([fit]).splitlines()
    assert table[0] == "t,q,norm,target_exponent"
    assert len(table) == 6


def test_log_band_recorded_for_fast_decay():
    fit = heat_rate_check(2.0, 3.0, 2.0, np.logspace(2, 4, 5))
    assert fit.band is not None and fit.band_factor < 4


@given(st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=1), st.floats(0.1, 10.0))
def test_fit_recovers_random_exponent(slope, c):
    t = np.logspace(0, 3, 7)
    fit = fit_decay(t, c * t ** slope[0])
    assert fit.slope == pytest.approx(slope[0], abs=1e-12)


@given(st.floats(0.5, 20.0))
def test_heat_flow_contracts_sup(t):
    f = japanese_bracket_profile(1.2, Grid.symmetric(50.0, 0.1))
    assert heat_apply(t, f, window=10.0).values.max() <= 1.0 + 1e-12
