"""Heat semigroup, the closed-form heat supersolution, and its L^q decay rates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .core import INF, Grid, GridFunction, TruncationError, japanese_bracket_profile, lq_norm
from .kernels import _cone_convolution, _resolve_window
from .ode import heat_g

__all__ = [
    "GAUSS_WINDOW",
    "heat_apply",
    "heat_supersolution",
    "heat_tail_mass",
    "target_exponent",
    "log_loss_exponent",
    "DecayFit",
    "fit_decay",
    "heat_supersolution_norm",
    "heat_rate_check",
    "rate_table_csv",
]

# Gaussian truncated at |y| <= GAUSS_WINDOW * sqrt(t)
GAUSS_WINDOW = 8.0


def heat_tail_mass(width: float = GAUSS_WINDOW) -> float:
    """Mass of the heat kernel outside ``|y| <= width sqrt(t)``: ``erfc(width/2)``."""
    return math.erfc(0.5 * width)


def heat_apply(t: float, f: GridFunction, quad_dx: float | None = None, window: float | None = None) -> GridFunction:
    """Gaussian convolution ``e^{t Delta} f`` on the nodes that keep the kernel window in the grid.

    The kernel ``(4 pi t)^{-1/2} exp(-y^2 / 4t)`` is truncated to
    ``|y| <= 8 sqrt(t)`` and its discrete weights are renormalized to unit
    mass, so sums of nonnegative data are preserved.  The discarded mass is
    :func:`heat_tail_mass`.  ``t = 0`` is the identity.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        if window is not None:
            return f.window(window)
        return f
    reach = GAUSS_WINDOW * math.sqrt(t)
    qd = f.grid.dx if quad_dx is None else float(quad_dx)
    # kernel must be resolved: at least a handful of nodes per standard deviation
    if math.sqrt(2 * t) < 2 * min(qd, f.grid.dx):
        raise ValueError(f"t={t} too small for quadrature step {qd}")
    lo, hi = _resolve_window(f, reach, window)

    def kernel(y):
        return np.exp(-(y * y) / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)

    vals = _cone_convolution(f, reach, qd, kernel, lo, hi, normalize=True)
    return GridFunction(f.grid.subgrid(lo, hi), vals)


def heat_supersolution(t: float, phi: GridFunction, p: float, quad_dx: float | None = None, window=None) -> GridFunction:
    """``G*(t, x) = G(t, e^{t Delta} phi(x))`` with ``G(t, f) = ((p-1) t + f^{1-p})^{-1/(p-1)}``."""
    if np.any(phi.values < 0):
        raise ValueError("phi must be nonnegative")
    if not np.any(phi.values > 0):
        raise ValueError("phi must be nontrivial")
    heated = heat_apply(t, phi, quad_dx, window)
    # convolution roundoff may leave -1e-17 where phi vanishes
    return GridFunction(heated.grid, heat_g(t, np.maximum(heated.values, 0.0), p))


def target_exponent(q, rho: float, p: float) -> float:
    """Decay exponent of ``||u(t)||_q`` for slowly decaying data.

    ``1/(q rho (p-1)) - 1/(p-1)`` when ``rho < 2/(p-1)`` and
    ``1/(2q) - 1/(p-1)`` otherwise; ``q = INF`` drops the first term.
    """
    inv_q = 0.0 if q is INF else 1.0 / float(q)
    if rho < 2.0 / (p - 1.0):
        return inv_q / (rho * (p - 1.0)) - 1.0 / (p - 1.0)
    return 0.5 * inv_q - 1.0 / (p - 1.0)


def log_loss_exponent(q, p: float) -> float:
    """Power of ``t`` in the ``t^{1/(2q) - 1/(p-1)} sqrt(log t)`` lower bound."""
    inv_q = 0.0 if q is INF else 1.0 / float(q)
    return 0.5 * inv_q - 1.0 / (p - 1.0)


@dataclass
class DecayFit:
    """Least-squares slope of ``log norm`` against ``log t`` inside a window.

    For data with ``rho >= 2/(p-1)`` the rate check also fills ``ratios``:
    the norm divided by ``t^{1/(2q) - 1/(p-1)} sqrt(log t)``, with its
    spread in ``band``.
    """

    q: object
    window: tuple[float, float]
    slope: float
    slope_stderr: float
    target: float
    intercept: float = math.nan
    t: np.ndarray = field(default_factory=lambda: np.empty(0))
    norms: np.ndarray = field(default_factory=lambda: np.empty(0))
    ratios: np.ndarray | None = None
    band: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.window[0] < self.window[1]:
            raise ValueError("window must satisfy t_min < t_max")
        if not math.isfinite(self.slope):
            raise ValueError("slope must be finite")

    @property
    def deviation(self) -> float:
        return self.slope - self.target

    @property
    def band_factor(self) -> float:
        if self.band is None:
            return math.nan
        return self.band[1] / self.band[0]


def fit_decay(t_list, norms, window=None, target: float = math.nan, q=None) -> DecayFit:
    """Fit ``log norm = slope * log t + c`` over samples inside ``window``.

    Ordinary least squares in closed form; ``slope_stderr`` is the usual
    standard error from the residuals (zero for an exact power law).
    Needs at least 3 samples in the window and positive norms.
    """
    t = np.asarray(t_list, dtype=float)
    n = np.asarray(norms, dtype=float)
    if t.shape != n.shape:
        raise ValueError("t_list and norms must have equal length")
    if window is None:
        window = (float(t.min()), float(t.max()))
    lo, hi = window
    if not lo < hi:
        raise ValueError("degenerate window")
    sel = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    if sel.sum() < 3:
        raise ValueError(f"need at least 3 samples in window {window}, found {int(sel.sum())}")
    if np.any(n[sel] <= 0) or np.any(t[sel] <= 0):
        raise ValueError("times and norms must be positive")
    X = np.log(t[sel])
    Y = np.log(n[sel])
    xm, ym = X.mean(), Y.mean()
    sxx = float(((X - xm) ** 2).sum())
    if sxx == 0:
        raise ValueError("degenerate window")
    slope = float(((X - xm) * (Y - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    resid = Y - (intercept + slope * X)
    dof = X.size - 2
    stderr = math.sqrt(float((resid**2).sum()) / dof / sxx) if dof > 0 else 0.0
    return DecayFit(q, (float(lo), float(hi)), slope, stderr, float(target), intercept, t[sel], n[sel])


def _heat_grid(t: float, rho: float, p: float, dx: float) -> tuple[Grid, float]:
    core = 100.0 * math.sqrt(t)
    if rho < 2.0 / (p - 1.0):
        core = max(core, 4.0 * t ** (1.0 / (rho * (p - 1.0))))
    core = max(core, 50.0)
    half = core + GAUSS_WINDOW * math.sqrt(t) + 2 * dx
    return Grid.symmetric(half, dx), core


def heat_supersolution_norm(t: float, p: float, rho: float, qs, dx: float = 0.25) -> dict:
    """``||G*(t)||_q`` for ``phi = <x>^{-rho}`` including the far field.

    ``G*`` is computed on ``|x| <= X`` with ``X = max(100 sqrt(t), 4
    t^{1/(rho(p-1))}, 50)``; beyond ``X`` the heat flow barely moves the
    slowly varying data, so ``e^{t Delta} phi ~ phi + t phi''`` and the
    remaining integral of ``G(t, phi + t phi'')^q`` is done by adaptive
    quadrature.
    """
    grid, core = _heat_grid(t, rho, p, dx)
    phi = japanese_bracket_profile(rho, grid)
    gstar = heat_supersolution(t, phi, p, window=core)
    out = {}
    for q in qs:
        if q is INF:
            out[q] = lq_norm(gstar, INF)
            continue
        q = float(q)
        inner = lq_norm(gstar, q) ** q

        def far(s):
            # x = core e^s turns the algebraic tail into an exponential one
            x = core * math.exp(s)
            b = (1.0 + x * x) ** (-0.5 * rho)
            b2 = rho * ((rho + 2.0) * x * x * (1.0 + x * x) ** (-0.5 * rho - 2.0) - (1.0 + x * x) ** (-0.5 * rho - 1.0))
            return heat_g(t, b + t * b2, p) ** q * x

        if rho * q <= 1:
            raise ValueError("the far-field integral diverges for rho q <= 1")
        s_max = 46.0 / (rho * q - 1.0)
        tail, _ = integrate.quad(far, 0.0, s_max, limit=200, epsabs=0, epsrel=1e-10)
        out[q] = (inner + 2.0 * tail) ** (1.0 / q)
    return out


def heat_rate_check(p: float, rho: float, q, t_list, grid: Grid | None = None, window=None, dx: float = 0.25) -> DecayFit:
    """Measure the decay of ``||G*(t)||_q`` for ``phi = <x>^{-rho}``.

    Below ``rho = 2/(p-1)`` the result carries the fitted log-log slope and
    the target ``1/(q rho (p-1)) - 1/(p-1)``.  From ``rho = 2/(p-1)`` on it
    also records the ratios to ``t^{1/(2q) - 1/(p-1)} sqrt(log t)`` and
    their min/max band.  ``grid``, when given, fixes the spacing; the
    extent is always sized per ``t``.
    """
    t_arr = np.asarray(t_list, dtype=float)
    if np.any(np.diff(t_arr) <= 0):
        raise ValueError("t_list must be increasing")
    if t_arr.size < 3:
        raise ValueError("need at least 3 times")
    if grid is not None:
        dx = grid.dx
    norms = np.array([heat_supersolution_norm(float(t), p, rho, [q], dx)[q] for t in t_arr])
    win = window or (float(t_arr[0]), float(t_arr[-1]))
    fit = fit_decay(t_arr, norms, win, target_exponent(q, rho, p), q)
    if rho >= 2.0 / (p - 1.0):
        ref = t_arr ** log_loss_exponent(q, p) * np.sqrt(np.log(t_arr))
        ratios = norms / ref
        sel = (t_arr >= win[0]) & (t_arr <= win[1])
        fit.ratios = ratios
        fit.band = (float(ratios[sel].min()), float(ratios[sel].max()))
    return fit


def rate_table_csv(fits) -> str:
    """Rows ``t,q,norm,target_exponent`` for a collection of :class:`DecayFit`."""
    lines = ["t,q,norm,target_exponent"]
    for fit in fits:
        for t, n in zip(fit.t, fit.norms):
            lines.append(f"{t:.17g},{fit.q},{n:.17g},{fit.target:.17g}")
    return "\n".join(lines) + "\n"
