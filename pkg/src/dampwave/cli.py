"""Command-line scenario runner.

    dampwave <scenario> [--config PATH] [--out DIR] [--jobs N] [overrides...]

Exit status is 0 when every selected check passes, 1 when one fails and 2
for configuration errors.  Each run writes ``report.csv``, ``summary.txt``,
the resolved ``config.txt`` and the scenario's own CSV artifacts.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import ConfigError, build_config, parse_q
from .scenarios import SCENARIOS, jobs_for

log = logging.getLogger("dampwave")

REPORT_HEADER = "check,passed,worst_value,t,x,constant"

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def write_atomic(path: Path, text: str):
    """Write via a temporary file in the same directory and rename into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _run_job(job, cfg):
    return job(cfg)


def run_scenario(cfg):
    """Execute the configured scenario; returns ``(reports, files)`` in job order."""
    jobs = jobs_for(cfg.scenario, cfg.checks)
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(jobs))) as pool:
            futures = [pool.submit(_run_job, job, cfg) for _, job in jobs]
            results = [f.result() for f in futures]
    else:
        results = [job(cfg) for _, job in jobs]
    reports, files = [], {}
    for res in results:
        reports.extend(res.reports)
        files.update(res.files)
    return reports, files


def report_csv(reports) -> str:
    return REPORT_HEADER + "\n" + "".join(",".join(r.csv_row()) + "\n" for r in reports)


def summary_text(cfg, reports) -> str:
    failed = [r.name for r in reports if not r.passed]
    lines = [f"scenario: {cfg.scenario}", f"checks: {len(reports)}, failed: {len(failed)}"]
    lines += [r.summary() for r in reports]
    if failed:
        lines.append("failing: " + ", ".join(failed))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dampwave", description="Verification runs for the damped wave equation with absorption.")
    ap.add_argument("scenario", choices=sorted(SCENARIOS) + ["all"])
    ap.add_argument("--config", type=Path, help="flat key = value config file")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--jobs", type=int)
    ap.add_argument("--checks", help="comma-separated subset of the scenario's checks")
    for name in ("dx", "dt", "p", "rho", "alpha", "sigma", "eps", "t0", "t-final", "x-obs", "rate-eps"):
        ap.add_argument(f"--{name}", type=float)
    ap.add_argument("--q", action="append", help="Lebesgue exponent, repeatable; 'inf' allowed")
    ap.add_argument("--nonlinear", action=argparse.BooleanOptionalAction, default=None)
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        text = args.config.read_text() if args.config else None
        overrides = dict(
            scenario=args.scenario,
            out=args.out,
            jobs=args.jobs,
            dx=args.dx,
            dt=args.dt,
            p=args.p,
            rho=args.rho,
            alpha=args.alpha,
            sigma=args.sigma,
            eps=args.eps,
            t0=args.t0,
            t_final=args.t_final,
            x_obs=args.x_obs,
            rate_eps=args.rate_eps,
            nonlinear=args.nonlinear,
            q=tuple(parse_q(v) for v in args.q) if args.q else None,
            checks=tuple(c.strip() for c in args.checks.split(",") if c.strip()) if args.checks else None,
        )
        cfg = build_config(text, **overrides)
        jobs_for(cfg.scenario, cfg.checks)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(cfg.out)
    write_atomic(out / "config.txt", cfg.to_text())
    try:
        reports, files = run_scenario(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        log.exception("run aborted")
        print(f"run error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for name, content in sorted(files.items()):
        write_atomic(out / name, content)
    write_atomic(out / "report.csv", report_csv(reports))
    summary = summary_text(cfg, reports)
    write_atomic(out / "summary.txt", summary)
    sys.stdout.write(summary)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
