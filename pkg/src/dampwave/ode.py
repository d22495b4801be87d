r"""Explicit supersolution of ``f'' + f' + f^p = 0`` and its derivatives.

``H(t, eps) = w(t) g(t, eps)`` where

.. math::
    g(t,\varepsilon) = \Big(\frac{p(p+1)\varepsilon^{p-1}}
        {(p-1)^2\varepsilon^{p-1} t + p^2 + p}\Big)^{1/(p-1)}, \qquad
    w(t) = \Big(\tfrac12 + (2^{1/\alpha} + t)^{-\alpha}\Big)^{-1/(p-1)}.

``g`` decays like ``t^{-1/(p-1)}`` and ``w`` increases from 1 to
``2^{1/(p-1)}``.  All functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "OdeSupersolutionParams",
    "g_fn",
    "w_fn",
    "w_derivs",
    "h_fn",
    "h_derivs",
    "HDerivs",
    "residual_odest6",
    "residual_constants",
    "heat_g",
    "max_damping_ratio",
]


def _check(p, alpha=None):
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if alpha is not None and not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")


def max_damping_ratio(p):
    """``(p-1)/(p(p+1))``: the coefficient in ``dg/dt = -ratio * g^p``."""
    return (p - 1.0) / (p * (p + 1.0))


@dataclass(frozen=True)
class OdeSupersolutionParams:
    """``p > 1``, ``alpha`` in (0, 1] and an ``eps`` small enough for ``H' + H/2 >= 0``.

    The smallness condition used is ``(p-1)/(p(p+1)) eps^{p-1} <= 1/2``.
    ``p`` outside (1, 3) is accepted up to 4 and flagged as exploratory.
    """

    p: float
    alpha: float
    eps: float

    def __post_init__(self):
        _check(self.p, self.alpha)
        if self.p >= 4:
            raise ValueError("p must be below 4")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if max_damping_ratio(self.p) * self.eps ** (self.p - 1) > 0.5:
            raise ValueError(f"eps={self.eps} too large for p={self.p}")

    @property
    def exploratory(self) -> bool:
        return not 1 < self.p < 3


def g_fn(t, eps, p):
    """Decaying factor ``g(t, eps)``; ``g(0, eps) = eps`` and ``g <= eps``."""
    _check(p)
    t = np.asarray(t, dtype=float)
    e1 = np.asarray(eps, dtype=float) ** (p - 1.0)
    out = (p * (p + 1.0) * e1 / ((p - 1.0) ** 2 * e1 * t + p * p + p)) ** (1.0 / (p - 1.0))
    return out[()] if out.ndim == 0 else out


def _s(t, alpha):
    return 2.0 ** (1.0 / alpha) + np.asarray(t, dtype=float)


def w_fn(t, alpha, p):
    """Increasing factor ``w(t)``; ``w(0) = 1`` and ``w -> 2^{1/(p-1)}``."""
    _check(p, alpha)
    out = (0.5 + _s(t, alpha) ** (-alpha)) ** (-1.0 / (p - 1.0))
    return out[()] if out.ndim == 0 else out


def w_derivs(t, alpha, p):
    """Return ``(w, w', w'')``.

    ``w' = alpha/(p-1) s^{-(alpha+1)} w^p`` with ``s = 2^{1/alpha} + t`` and
    ``w'' = (p alpha/(p-1) s^{-(alpha+1)} w^{p-1} - (alpha+1)/s) w'``.
    """
    s = _s(t, alpha)
    w = w_fn(t, alpha, p)
    c = alpha / (p - 1.0) * s ** (-(alpha + 1.0))
    dw = c * w**p
    ddw = (p * c * w ** (p - 1.0) - (alpha + 1.0) / s) * dw
    return w, dw, ddw


def h_fn(t, eps, p, alpha):
    """``H(t, eps) = w(t) g(t, eps)``."""
    return w_fn(t, alpha, p) * g_fn(t, eps, p)


@dataclass(frozen=True)
class HDerivs:
    """Partial derivatives of ``H``; arrays broadcast like the inputs."""

    dt: np.ndarray
    deps: np.ndarray
    dt_deps: np.ndarray
    deps2: np.ndarray
    dt2: np.ndarray

    def as_tuple(self):
        return (self.dt, self.deps, self.dt_deps, self.deps2, self.dt2)


def h_derivs(t, eps, p, alpha) -> HDerivs:
    """Closed-form ``(H_t, H_eps, H_t,eps, H_eps,eps, H_tt)``.

    ``H_t = (alpha w^{p-1} / ((p-1) s^{alpha+1}) - k g^{p-1}) H`` with
    ``k = (p-1)/(p(p+1))``, ``H_eps = H g^{p-1} eps^{-p}``,
    ``H_eps,eps = p (g^{2p-2} eps^{-2p} - g^{p-1} eps^{-p-1}) H <= 0``; the
    mixed and second time derivatives follow from the product rule with
    ``g_t = -k g^p`` and ``g_tt = (p-1)^2/(p(p+1)^2) g^{2p-1}``.
    """
    _check(p, alpha)
    eps = np.asarray(eps, dtype=float)
    w, dw, ddw = w_derivs(t, alpha, p)
    g = g_fn(t, eps, p)
    H = w * g
    gp1 = g ** (p - 1.0)
    k = max_damping_ratio(p)
    s = _s(t, alpha)
    growth = alpha * w ** (p - 1.0) / ((p - 1.0) * s ** (alpha + 1.0))
    dg = -k * g**p
    ddg = (p - 1.0) ** 2 / (p * (p + 1.0) ** 2) * g ** (2.0 * p - 1.0)
    dt = (growth - k * gp1) * H
    deps = H * gp1 * eps ** (-p)
    dt_deps = (growth * gp1 * eps ** (-p) - (p - 1.0) / (p + 1.0) * gp1**2 * eps ** (-p)) * H
    # g^{p-1} eps^{1-p} - 1 = -(p-1)^2 eps^{p-1} t / D, written without cancellation
    e1 = eps ** (p - 1.0)
    D = (p - 1.0) ** 2 * e1 * np.asarray(t, dtype=float) + p * p + p
    deps2 = -p * gp1 * eps ** (-p - 1.0) * H * (p - 1.0) ** 2 * e1 * t / D
    dt2 = ddw * g + 2.0 * dw * dg + w * ddg
    return HDerivs(dt, deps, dt_deps, deps2, dt2)


def residual_constants(p, alpha):
    """Explicit constants ``(C1, C2)`` for the lower bound on ``H'' + H' + H^p``.

    ``C1 = 2/(p+1) - 2 alpha / (p (p+1) 2^{1/alpha})`` multiplies ``w g^p``
    and ``C2 = alpha/(p-1)`` multiplies ``(2^{(alpha+1)/alpha} + t)^{-(alpha+1)} H``.
    """
    _check(p, alpha)
    c1 = 2.0 / (p + 1.0) - 2.0 * alpha / (p * (p + 1.0) * 2.0 ** (1.0 / alpha))
    c2 = alpha / (p - 1.0)
    return c1, c2


def residual_odest6(t, eps, p, alpha):
    """Signed residuals ``(main, halfdamp)`` of the two differential inequalities.

    ``main = H'' + H' + H^p - C1 w g^p - C2 (2^{(alpha+1)/alpha} + t)^{-(alpha+1)} H``
    and ``halfdamp = H' + H/2``.  Both are nonnegative when ``H`` is a
    supersolution with the stated constants.
    """
    d = h_derivs(t, eps, p, alpha)
    w = w_fn(t, alpha, p)
    g = g_fn(t, eps, p)
    H = w * g
    c1, c2 = residual_constants(p, alpha)
    decay = (2.0 ** ((alpha + 1.0) / alpha) + np.asarray(t, dtype=float)) ** (-(alpha + 1.0))
    main = d.dt2 + d.dt + H**p - c1 * w * g**p - c2 * decay * H
    half = d.dt + 0.5 * H
    return main, half


def heat_g(t, f, p):
    """Flow of ``g' = -g^p`` from ``g(0) = f``: ``((p-1) t + f^{1-p})^{-1/(p-1)}``.

    ``f = 0`` maps to 0.  Written as ``f (1 + (p-1) t f^{p-1})^{-1/(p-1)}``,
    which is the same function without the ``f^{1-p}`` overflow.
    """
    _check(p)
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise ValueError("f must be nonnegative")
    out = f * (1.0 + (p - 1.0) * t * f ** (p - 1.0)) ** (-1.0 / (p - 1.0))
    return out[()] if out.ndim == 0 else out
