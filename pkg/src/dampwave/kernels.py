r"""Solution operator of the linear damped wave equation in one dimension.

``S(t) f`` solves ``v'' + v' - v_xx = 0`` with ``v(0) = 0``, ``v'(0) = f``:

.. math::
    S(t) f(x) = \frac{e^{-t/2}}{2} \int_{-t}^{t} I_0(\omega/2) f(x - y)\,dy,
    \qquad \omega = \sqrt{t^2 - y^2}.

Its first two time derivatives are a boundary (light-cone) term plus a
convolution with the kernels ``K1`` and ``K2`` below.  Writing
``z = omega/2`` and ``A_n(z) = I_n(z) / z^n``, the kernels are

.. math::
    e^{t/2} K_1 = \tfrac14 \left(\tfrac{t}{2} A_1 - A_0\right), \qquad
    e^{t/2} K_2 = \tfrac{t^2}{32} A_2 - \tfrac{t}{8} A_1 + \tfrac18 (A_0 + A_1).

The second form follows from the textbook expression of ``K2`` after the
recurrence ``I_0 - I_2 = 2 I_1 / z`` removes the ``omega^{-2}`` and
``omega^{-3}`` poles; it is exact, not an expansion, so no near-cone
switch is needed.  ``k1_direct`` / ``k2_direct`` keep the raw formulas
as an independent evaluation path.

Every kernel is evaluated as ``exp((omega - t)/2) * [exp(-z) A_n(z)]``,
which stays finite for any ``t``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import signal

from .core import Grid, GridFunction, TruncationError
from .special_functions import bessel_i, bessel_i_over_power_scaled

__all__ = [
    "ConeCoordinate",
    "s_kernel",
    "k1",
    "k2",
    "k1_direct",
    "k2_direct",
    "k1_cone_limit",
    "k2_cone_limit",
    "valid_subgrid",
    "apply_s",
    "apply_dt_s",
    "apply_dtt_s",
    "linear_solution",
    "linear_solution_general",
    "interp_on_grid",
]

# product size above which the convolution switches to FFT
_DIRECT_CONV_LIMIT = 4e8


class ConeCoordinate:
    """Point ``(t, y)`` inside the light cone together with ``omega = sqrt(t^2 - y^2)``."""

    __slots__ = ("t", "y", "omega")

    def __init__(self, t: float, y: float):
        if not t > 0:
            raise ValueError("t must be positive")
        if abs(y) > t:
            raise ValueError("|y| must not exceed t")
        self.t = float(t)
        self.y = float(y)
        # (t - |y|)(t + |y|) avoids the cancellation of t^2 - y^2 near the cone
        self.omega = math.sqrt((t - abs(y)) * (t + abs(y)))

    def __repr__(self):
        return f"ConeCoordinate(t={self.t}, y={self.y}, omega={self.omega})"


def _omega(t, y):
    ay = np.abs(y)
    return np.sqrt(np.maximum((t - ay) * (t + ay), 0.0))


def _check_t(t):
    if not (np.isfinite(t) and t > 0):
        raise ValueError(f"t must be positive and finite, got {t}")


def _scaled_parts(t, y):
    """Return (exp((omega - t)/2), e^{-z}A_0, e^{-z}A_1, e^{-z}A_2) for z = omega/2."""
    z = 0.5 * _omega(t, y)
    env = np.exp(z - 0.5 * t)
    return env, bessel_i_over_power_scaled(0, z), bessel_i_over_power_scaled(1, z), bessel_i_over_power_scaled(2, z)


def s_kernel(t, y):
    """Kernel of ``S(t)``: ``(e^{-t/2}/2) I_0(omega/2)`` inside the cone, 0 outside."""
    _check_t(t)
    y = np.asarray(y, dtype=float)
    z = 0.5 * _omega(t, y)
    out = 0.5 * np.exp(z - 0.5 * t) * bessel_i_over_power_scaled(0, z)
    return np.where(np.abs(y) <= t, out, 0.0)


def k1(t, y):
    """Kernel ``K1(t, y)`` of ``d/dt S(t)``; finite up to and including ``|y| = t``."""
    _check_t(t)
    y = np.asarray(y, dtype=float)
    env, a0, a1, _ = _scaled_parts(t, y)
    out = 0.25 * env * (0.5 * t * a1 - a0)
    out = np.where(np.abs(y) <= t, out, 0.0)
    return float(out) if out.ndim == 0 else out


def k2(t, y):
    """Kernel ``K2(t, y)`` of ``d^2/dt^2 S(t)``; finite up to and including ``|y| = t``."""
    _check_t(t)
    y = np.asarray(y, dtype=float)
    env, a0, a1, a2 = _scaled_parts(t, y)
    out = env * (t * t * a2 / 32.0 - t * a1 / 8.0 + (a0 + a1) / 8.0)
    out = np.where(np.abs(y) <= t, out, 0.0)
    return float(out) if out.ndim == 0 else out


def k1_direct(t: float, y: float) -> float:
    """``K1`` from the textbook formula with unscaled Bessel values (``t <= 1400``, ``|y| < t``)."""
    _check_t(t)
    w = ConeCoordinate(t, y).omega
    if w == 0:
        raise ValueError("raw formula is singular on the light cone")
    z = 0.5 * w
    return 0.25 * math.exp(-0.5 * t) * (t / w * bessel_i(1, z) - bessel_i(0, z))


def k2_direct(t: float, y: float) -> float:
    """``K2`` from the textbook formula; loses digits as ``omega -> 0``."""
    _check_t(t)
    w = ConeCoordinate(t, y).omega
    if w == 0:
        raise ValueError("raw formula is singular on the light cone")
    z = 0.5 * w
    i0, i1, i2 = bessel_i(0, z), bessel_i(1, z), bessel_i(2, z)
    return math.exp(-0.5 * t) * (
        t * t / (16 * w * w) * i2
        - (t / (4 * w) + y * y / (4 * w**3)) * i1
        + (0.125 + t * t / (16 * w * w)) * i0
    )


def k1_cone_limit(t: float) -> float:
    """Value of ``K1`` on the light cone: ``e^{-t/2} (t/4 - 1) / 4``."""
    return 0.25 * math.exp(-0.5 * t) * (0.25 * t - 1.0)


def k2_cone_limit(t: float) -> float:
    """Value of ``K2`` on the light cone: ``e^{-t/2} (t^2/256 - t/16 + 3/16)``."""
    return math.exp(-0.5 * t) * (t * t / 256.0 - t / 16.0 + 3.0 / 16.0)


# --------------------------------------------------------------------------
# convolution machinery


def valid_subgrid(grid: Grid, reach: float) -> tuple[int, int]:
    """Index range ``[lo, hi)`` of nodes whose ``[x - reach, x + reach]`` lies in ``grid``."""
    lo = int(math.ceil(reach / grid.dx - 1e-9))
    hi = grid.n - lo
    if hi - lo < 2:
        raise TruncationError(
            f"cone of half-width {reach} does not fit in grid [{grid.x0}, {grid.x_end}]"
        )
    return lo, hi


def interp_on_grid(f: GridFunction, xq) -> np.ndarray:
    """Linear interpolation of ``f`` at ``xq``; points outside the grid raise."""
    xq = np.asarray(xq, dtype=float)
    g = f.grid
    tol = 1e-9 * g.dx
    if np.any(xq < g.x0 - tol) or np.any(xq > g.x_end + tol):
        raise TruncationError("interpolation point outside the grid")
    return np.interp(xq, f.x, f.values)


def _convolve(a, b):
    if a.size * b.size > _DIRECT_CONV_LIMIT:
        return signal.fftconvolve(a, b)
    return np.convolve(a, b)


def _cone_convolution(f: GridFunction, t: float, quad_dx: float, kernel, lo: int, hi: int, normalize=False):
    """Trapezoidal ``int_{-t}^{t} kernel(y) f(x - y) dy`` at nodes ``lo..hi-1``.

    Quadrature nodes are ``y_k = k h`` with ``h = dx / r`` plus the endpoints
    ``+-t``; ``f`` between grid nodes is linearly interpolated.  Each residue
    class ``k mod r`` is one discrete convolution on the grid.  With
    ``normalize`` the quadrature weights are rescaled to sum to one.
    """
    g = f.grid
    r = max(1, int(math.ceil(g.dx / quad_dx - 1e-9)))
    h = g.dx / r
    M = int(math.floor(t / h + 1e-9))
    delta = t - M * h
    if delta < 1e-9 * h:
        delta = 0.0
    if M < 1 and delta == 0.0:
        raise ValueError("quadrature step too coarse for this t")
    k = np.arange(-M, M + 1)
    y = k * h
    w = np.full(k.shape, h)
    w[0] = w[-1] = 0.5 * h + 0.5 * delta
    if M == 0:
        w[:] = delta
    kv = kernel(y) * w
    kend = kernel(np.array([-t, t])) * (0.5 * delta) if delta > 0 else np.zeros(2)
    if normalize:
        total = kv.sum() + kend.sum()
        kv, kend = kv / total, kend / total
    vals = f.values
    out = np.zeros(hi - lo)
    m_all = np.floor_divide(k, r)
    s_all = k - r * m_all
    for s in range(r):
        sel = s_all == s
        if not np.any(sel):
            continue
        m = m_all[sel]
        frac = s / r
        # f(x_i - s h) by linear interpolation between nodes i-1 and i
        fs = vals if s == 0 else (1 - frac) * vals + frac * np.concatenate(([vals[0]], vals[:-1]))
        c = np.zeros(m.max() - m.min() + 1)
        np.add.at(c, m - m.min(), kv[sel])
        full = _convolve(fs, c)
        # (c * fs)[j] with c indexed from m_min sits at full[j - m_min]
        out += full[lo - m.min() : hi - m.min()]
    if delta > 0:
        xs = g.x[lo:hi]
        out += kend[0] * interp_on_grid(f, xs + t) + kend[1] * interp_on_grid(f, xs - t)
    return out


def _resolve_window(f: GridFunction, reach: float, window):
    lo, hi = valid_subgrid(f.grid, reach)
    if window is not None:
        g = f.grid
        x_lo, x_hi = g.x0 + lo * g.dx, g.x0 + (hi - 1) * g.dx
        if -window < x_lo - 1e-9 * g.dx or window > x_hi + 1e-9 * g.dx:
            raise TruncationError(
                f"window |x| <= {window} needs data on [{-window - reach}, {window + reach}], "
                f"grid covers [{g.x0}, {g.x_end}]"
            )
        xs = g.x
        lo2 = int(np.flatnonzero(xs >= -window - 1e-9 * g.dx)[0])
        hi2 = int(np.flatnonzero(xs <= window + 1e-9 * g.dx)[-1]) + 1
        lo, hi = max(lo, lo2), min(hi, hi2)
    return lo, hi


def _wrap(f, lo, hi, vals):
    return GridFunction(f.grid.subgrid(lo, hi), vals)


def _default_quad(f, quad_dx):
    return f.grid.dx if quad_dx is None else float(quad_dx)


def apply_s(t: float, f: GridFunction, quad_dx: float | None = None, window: float | None = None) -> GridFunction:
    """Evaluate ``S(t) f`` on every node whose light cone fits inside ``f``'s grid.

    Parameters
    ----------
    t : float
        Time, ``t >= 0``.
    f : GridFunction
        Data; must extend at least ``t`` beyond every output node.
    quad_dx : float, optional
        Quadrature step in ``y``; defaults to the grid spacing.  Steps finer
        than ``dx`` interpolate ``f`` linearly between nodes.
    window : float, optional
        If given, output is restricted to ``|x| <= window`` and a
        :class:`TruncationError` is raised when the data cannot support it.

    Returns
    -------
    GridFunction
        On the subgrid of valid nodes (the full grid when ``t = 0``).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    qd = _default_quad(f, quad_dx)
    lo, hi = _resolve_window(f, t, window)
    if t == 0:
        return _wrap(f, lo, hi, np.zeros(hi - lo))
    return _wrap(f, lo, hi, _cone_convolution(f, t, qd, lambda y: s_kernel(t, y), lo, hi))


def _boundary_sum(f, t, lo, hi):
    xs = f.grid.x[lo:hi]
    return interp_on_grid(f, xs + t), interp_on_grid(f, xs - t)


def apply_dt_s(t: float, f: GridFunction, quad_dx: float | None = None, window: float | None = None) -> GridFunction:
    """Evaluate ``d/dt S(t) f = e^{-t/2} (f(x+t) + f(x-t))/2 + K1 * f``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    qd = _default_quad(f, quad_dx)
    lo, hi = _resolve_window(f, t, window)
    if t == 0:
        return _wrap(f, lo, hi, f.values[lo:hi].copy())
    fp, fm = _boundary_sum(f, t, lo, hi)
    vals = 0.5 * math.exp(-0.5 * t) * (fp + fm) + _cone_convolution(f, t, qd, lambda y: k1(t, y), lo, hi)
    return _wrap(f, lo, hi, vals)


def apply_dtt_s(
    t: float,
    f: GridFunction,
    f_prime: GridFunction | None = None,
    quad_dx: float | None = None,
    window: float | None = None,
) -> GridFunction:
    """Evaluate ``d^2/dt^2 S(t) f``.

    The light-cone part is ``e^{-t/2} (f'(x+t) - f'(x-t))/2 +
    e^{-t/2} (t/16 - 1/2)(f(x+t) + f(x-t))``; ``f'`` defaults to centered
    differences of ``f``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    qd = _default_quad(f, quad_dx)
    if f_prime is None:
        f_prime = GridFunction(f.grid, np.gradient(f.values, f.grid.dx))
    elif not f_prime.grid.same_as(f.grid):
        raise ValueError("f_prime must live on f's grid")
    lo, hi = _resolve_window(f, t, window)
    if t == 0:
        # v'' = v_xx - v' at t = 0 with v(0) = 0, v'(0) = f
        return _wrap(f, lo, hi, -f.values[lo:hi].copy())
    fp, fm = _boundary_sum(f, t, lo, hi)
    dp, dm = _boundary_sum(f_prime, t, lo, hi)
    e = math.exp(-0.5 * t)
    vals = 0.5 * e * (dp - dm) + e * (t / 16.0 - 0.5) * (fp + fm) + _cone_convolution(f, t, qd, lambda y: k2(t, y), lo, hi)
    return _wrap(f, lo, hi, vals)


def linear_solution(
    t: float, phi: GridFunction, eps: float = 1.0, quad_dx: float | None = None, window: float | None = None
) -> GridFunction:
    """``u_L(t) = eps (S(t) phi + d/dt S(t) phi)``: free solution with data ``(eps phi, 0)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    qd = _default_quad(phi, quad_dx)
    lo, hi = _resolve_window(phi, t, window)
    if t == 0:
        return _wrap(phi, lo, hi, eps * phi.values[lo:hi])
    fp, fm = _boundary_sum(phi, t, lo, hi)

    def kernel(y):
        return s_kernel(t, y) + k1(t, y)

    vals = 0.5 * math.exp(-0.5 * t) * (fp + fm) + _cone_convolution(phi, t, qd, kernel, lo, hi)
    return _wrap(phi, lo, hi, eps * vals)


def linear_solution_general(
    t: float, u0: GridFunction, u1: GridFunction, quad_dx: float | None = None, window: float | None = None
) -> GridFunction:
    """Free solution ``S(t)(u0 + u1) + d/dt S(t) u0`` for data ``(u0, u1)``."""
    if not u0.grid.same_as(u1.grid):
        raise ValueError("u0 and u1 must share a grid")
    s = apply_s(t, GridFunction(u0.grid, u0.values + u1.values), quad_dx, window)
    d = apply_dt_s(t, u0, quad_dx, window)
    return GridFunction(s.grid, s.values + d.values)
