"""Grids, grid functions, parameter bundles, check reports and data profiles."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

__all__ = [
    "INF",
    "Grid",
    "GridFunction",
    "ModelParams",
    "CheckReport",
    "TruncationError",
    "japanese_bracket_profile",
    "gaussian_profile",
    "lq_norm",
    "bracket_tail_bound",
    "lq_norm_report",
]


class _Infinity:
    """Sentinel exponent for the sup norm."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


class TruncationError(ValueError):
    """Raised when a convolution cone or window leaves the available grid."""


@dataclass(frozen=True)
class Grid:
    """Uniform 1D grid ``x_j = x0 + j*dx`` for ``j = 0..n-1``."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.x0) and math.isfinite(self.dx)):
            raise ValueError("grid endpoints must be finite")
        if self.dx <= 0:
            raise ValueError(f"dx must be positive, got {self.dx}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.n}")

    @classmethod
    def symmetric(cls, half_width: float, dx: float) -> "Grid":
        """Grid on ``[-half_width, half_width]`` with a node at 0."""
        m = int(round(half_width / dx))
        return cls(-m * dx, dx, 2 * m + 1)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def x_end(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    def subgrid(self, start: int, stop: int) -> "Grid":
        return Grid(self.x0 + start * self.dx, self.dx, stop - start)

    def same_as(self, other: "Grid", rtol: float = 1e-12) -> bool:
        return (
            self.n == other.n
            and abs(self.dx - other.dx) <= rtol * self.dx
            and abs(self.x0 - other.x0) <= rtol * max(1.0, abs(self.x0)) + 1e-9 * self.dx
        )


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values sampled on a :class:`Grid`; the array is read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridFunction":
        return cls(grid, np.broadcast_to(fn(grid.x), (grid.n,)))

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.n, float(c)))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def __len__(self):
        return self.grid.n

    def restrict(self, grid: Grid) -> "GridFunction":
        """Restrict to a subgrid that shares nodes with this one."""
        offset = (grid.x0 - self.grid.x0) / self.grid.dx
        start = int(round(offset))
        if abs(offset - start) > 1e-6 or abs(grid.dx - self.grid.dx) > 1e-12 * self.grid.dx:
            raise ValueError("grid is not aligned with this grid function")
        if start < 0 or start + grid.n > self.grid.n:
            raise TruncationError(
                f"requested [{grid.x0}, {grid.x_end}] outside [{self.grid.x0}, {self.grid.x_end}]"
            )
        return GridFunction(grid, self.values[start : start + grid.n])

    def window(self, half_width: float) -> "GridFunction":
        """Restrict to the nodes with ``|x| <= half_width``."""
        tol = 1e-9 * self.grid.dx
        if self.grid.x0 > -half_width + tol or self.grid.x_end < half_width - tol:
            raise TruncationError(
                f"window |x| <= {half_width} exceeds grid [{self.grid.x0}, {self.grid.x_end}]"
            )
        idx = np.flatnonzero(np.abs(self.x) <= half_width + tol)
        return GridFunction(self.grid.subgrid(idx[0], idx[-1] + 1), self.values[idx[0] : idx[-1] + 1])

    def map(self, fn) -> "GridFunction":
        return GridFunction(self.grid, fn(self.values))

    def to_csv(self, path=None, header_lines: tuple[str, ...] = ()) -> str:
        """Serialize as ``x,value`` rows with 17 significant digits."""
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "value"])
        for xv, v in zip(self.x, self.values):
            writer.writerow([f"{xv:.17g}", f"{v:.17g}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "GridFunction":
        """Inverse of :meth:`to_csv`; accepts a path or the CSV text."""
        text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
        rows = [r for r in text.splitlines() if r and not r.startswith("#")]
        if rows[0].replace(" ", "") != "x,value":
            raise ValueError("missing 'x,value' header")
        data = np.array([[float(c) for c in r.split(",")] for r in rows[1:]])
        xs, vals = data[:, 0], data[:, 1]
        if xs.size < 2:
            raise ValueError("need at least two rows")
        dx = (xs[-1] - xs[0]) / (xs.size - 1)
        if not np.allclose(np.diff(xs), dx, rtol=1e-9, atol=0):
            raise ValueError("x column is not uniformly spaced")
        return cls(Grid(float(xs[0]), float(dx), xs.size), vals)


@dataclass(frozen=True)
class ModelParams:
    """Exponent, data decay, supersolution tuning, data size and time shift."""

    p: float = 2.0
    rho: float = 1.5
    alpha: float = 0.5
    sigma: float = 0.6
    eps: float = 0.01
    t0: float = 50.0

    def __post_init__(self):
        problems = []
        if not self.p > 1:
            problems.append(f"p must exceed 1 (got {self.p})")
        if not self.rho > 1:
            problems.append(f"rho must exceed 1 (got {self.rho})")
        if not 0 < self.alpha <= 1:
            problems.append(f"alpha must lie in (0, 1] (got {self.alpha})")
        if not 0.5 < self.sigma < 0.75:
            problems.append(f"sigma must lie in (1/2, 3/4) (got {self.sigma})")
        if not self.eps > 0:
            problems.append(f"eps must be positive (got {self.eps})")
        if not self.t0 >= 0:
            problems.append(f"t0 must be nonnegative (got {self.t0})")
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def exploratory(self) -> bool:
        """True outside the subcritical range 1 < p < 3."""
        return not 1 < self.p < 3


@dataclass
class CheckReport:
    """Outcome of one verification.

    ``worst_value`` is the quantity compared against the check's threshold
    (a residual minimum, a ratio maximum, ...), located at ``worst_location``.
    ``empirical_constant`` carries a fitted constant where the underlying
    estimate only asserts existence of one.
    """

    name: str
    passed: bool
    worst_value: float
    worst_location: tuple[float, float] = (math.nan, math.nan)
    empirical_constant: float | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def csv_row(self) -> list[str]:
        t, x = self.worst_location
        const = "" if self.empirical_constant is None else f"{self.empirical_constant:.17g}"
        return [self.name, str(bool(self.passed)).lower(), f"{self.worst_value:.17g}", f"{t:.17g}", f"{x:.17g}", const]

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        t, x = self.worst_location
        line = f"[{status}] {self.name}: worst={self.worst_value:.6g} at (t={t:.6g}, x={x:.6g})"
        if self.empirical_constant is not None:
            line += f", constant={self.empirical_constant:.6g}"
        return line


def japanese_bracket_profile(rho: float, grid: Grid) -> GridFunction:
    """Sample ``<x>^{-rho} = (1 + x^2)^{-rho/2}`` on ``grid``."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    return GridFunction(grid, (1.0 + grid.x**2) ** (-0.5 * rho))


def gaussian_profile(grid: Grid, width: float = 1.0, center: float = 0.0) -> GridFunction:
    """Sample ``exp(-(x - center)^2 / width^2)``."""
    return GridFunction(grid, np.exp(-(((grid.x - center) / width) ** 2)))


def bracket_tail_bound(rho: float, x_max: float) -> float:
    """Bound on ``int_{|x| > x_max} <x>^{-rho} dx``, namely ``2 x_max^{1-rho} / (rho - 1)``."""
    if not rho > 1:
        raise ValueError("tail is infinite unless rho > 1")
    return 2.0 * x_max ** (1.0 - rho) / (rho - 1.0)


def _check_q(q):
    if q is INF:
        return q
    if isinstance(q, str) and q.lower() in ("inf", "infinity"):
        return INF
    q = float(q)
    if math.isinf(q):
        raise ValueError("use the INF sentinel for the sup norm")
    if not q >= 1:
        raise ValueError(f"q must be >= 1, got {q}")
    return q


def lq_norm(f: GridFunction, q) -> float:
    """``L^q`` norm by the trapezoidal rule; ``q=INF`` gives ``max |f|``."""
    q = _check_q(q)
    a = np.abs(f.values)
    if q is INF:
        return float(a.max())
    scale = a.max()
    if scale == 0:
        return 0.0
    b = (a / scale) ** q
    integral = f.grid.dx * (b.sum() - 0.5 * (b[0] + b[-1]))
    return float(scale * integral ** (1.0 / q))


def lq_norm_report(f: GridFunction, q, rho: float) -> tuple[float, float]:
    """Norm of ``f`` on its grid together with the analytic bound on the missing tail.

    For data dominated by ``<x>^{-rho}`` the ``q``-th power of the norm misses
    at most ``2 X^{1 - q rho} / (q rho - 1)`` beyond ``|x| = X``.  For the
    sup norm the returned tail bound is ``X^{-rho}``.
    """
    q = _check_q(q)
    x_max = min(abs(f.grid.x0), abs(f.grid.x_end))
    if q is INF:
        return lq_norm(f, q), x_max ** (-rho)
    return lq_norm(f, q), bracket_tail_bound(q * rho, x_max)
