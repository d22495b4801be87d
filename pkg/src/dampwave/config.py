"""Flat ``key = value`` scenario configuration.

Lines starting with ``#`` (or the part of a line after ``#``) are comments.
Lists are comma separated.  Unset numeric resolution knobs (``dx``, ``dt``,
``t_final``) fall back to the per-scenario defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .core import INF, ModelParams


class ConfigError(ValueError):
    """Malformed or out-of-range configuration."""


def parse_q(text):
    if text is INF:
        return INF
    s = str(text).strip().lower()
    if s in ("inf", "infinity", "oo"):
        return INF
    try:
        q = float(s)
    except ValueError as exc:
        raise ConfigError(f"bad q value {text!r}") from exc
    if math.isinf(q):
        return INF
    if not q >= 1:
        raise ConfigError(f"q must be >= 1, got {q}")
    return q


def _fmt_q(q):
    return "inf" if q is INF else f"{q:g}"


def _parse_bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean {s!r}")


def _parse_opt_float(s):
    v = s.strip().lower()
    if v in ("", "auto", "none"):
        return None
    return float(v)


def _parse_floats(s):
    return tuple(float(v) for v in s.split(",") if v.strip())


def _parse_names(s):
    return tuple(v.strip() for v in s.split(",") if v.strip())


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "all"
    p: float = 2.0
    rho: float = 1.5
    alpha: float = 0.5
    sigma: float = 0.6
    eps: float = 0.01
    t0: float = 50.0
    dx: float | None = None
    dt: float | None = None
    t_final: float | None = None
    q: tuple = (1.0, 2.0, INF)
    out: str = "out"
    jobs: int = 1
    checks: tuple = ()
    x_obs: float = 200.0
    t0_sweep: tuple = (10.0, 50.0, 200.0)
    rate_eps: float = 0.25
    nonlinear: bool = False

    def model(self) -> ModelParams:
        try:
            return ModelParams(self.p, self.rho, self.alpha, self.sigma, self.eps, self.t0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self):
        self.model()
        if self.dx is not None and not self.dx > 0:
            raise ConfigError("dx must be positive")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.dx is not None and self.dt is not None and self.dt > self.dx:
            raise ConfigError(f"CFL violated: dt={self.dt} > dx={self.dx}")
        if self.t_final is not None and not self.t_final > 0:
            raise ConfigError("t_final must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not self.q:
            raise ConfigError("at least one q is required")
        if not self.rate_eps > 0 or not self.x_obs > 0:
            raise ConfigError("rate_eps and x_obs must be positive")
        if any(not t >= 0 for t in self.t0_sweep):
            raise ConfigError("t0_sweep entries must be nonnegative")
        return self

    def resolved(self, dx: float, t_final: float) -> tuple[float, float, float]:
        """``(dx, dt, t_final)`` with scenario defaults filled in."""
        dx = self.dx if self.dx is not None else dx
        dt = self.dt if self.dt is not None else 0.9 * dx
        if dt > dx:
            raise ConfigError(f"CFL violated: dt={dt} > dx={dx}")
        return dx, dt, self.t_final if self.t_final is not None else t_final

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "q":
                s = ", ".join(_fmt_q(x) for x in v)
            elif isinstance(v, tuple):
                s = ", ".join(f"{x:g}" if isinstance(x, float) else str(x) for x in v)
            elif v is None:
                s = "auto"
            elif isinstance(v, bool):
                s = "true" if v else "false"
            elif isinstance(v, float):
                s = repr(v)
            else:
                s = str(v)
            lines.append(f"{f.name} = {s}")
        return "\n".join(lines) + "\n"


_PARSERS = {
    "scenario": str.strip,
    "p": float,
    "rho": float,
    "alpha": float,
    "sigma": float,
    "eps": float,
    "t0": float,
    "dx": _parse_opt_float,
    "dt": _parse_opt_float,
    "t_final": _parse_opt_float,
    "q": lambda s: tuple(parse_q(v) for v in s.split(",") if v.strip()),
    "out": str.strip,
    "jobs": int,
    "checks": _parse_names,
    "x_obs": float,
    "t0_sweep": _parse_floats,
    "rate_eps": float,
    "nonlinear": _parse_bool,
}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into a dict of typed overrides."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _PARSERS[key](value)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def build_config(file_text: str | None = None, **overrides) -> ScenarioConfig:
    """Defaults, then the file, then explicit overrides (``None`` values are skipped)."""
    values = parse_config_text(file_text) if file_text else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return replace(ScenarioConfig(), **values).validate()
