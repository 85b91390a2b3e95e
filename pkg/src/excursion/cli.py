"""Command line front end.

    excursion density {ustar,theta,xi,joint}   evaluate densities on a grid
    excursion cdf {ustar,xi,arcsine}           evaluate CDFs on a grid
    excursion sample {xi,lambda,joint,lindley} draw samples
    excursion estimate {rect,expect}           weighted Monte Carlo estimates
    excursion converge                         discrete-to-continuous report
    excursion selfcheck                        cross-route and oracle checks

Output is CSV on stdout (or ``--output``) preceded by ``#`` metadata lines.
Exit status: 0 success, 1 runtime or accuracy failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from . import series as S
from .errors import AccuracyError, ConfigurationError, DomainError, ExcursionError
from .rng import RngStream, seed_from_env

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    t: float = 1.0
    xs: list[float] = field(default_factory=list)
    ys: list[float] = field(default_factory=list)
    n: int = 100_000
    seed: int = 0
    stream: int = 0
    abs_tol: float = 1e-10
    max_terms: int = 100_000
    quadrature_points: int = 32
    threads: int = 1
    output: str | None = None

    @property
    def policy(self) -> S.SeriesPolicy:
        return S.SeriesPolicy(self.abs_tol, self.max_terms, self.quadrature_points)

    def rng(self) -> RngStream:
        return RngStream(self.seed, self.stream)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def parse_grid(spec: str, log: bool = False) -> list[float]:
    """``start:stop:count`` inclusive, linear or geometric."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like start:stop:count, got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad grid {spec!r}") from None
    if count < 1:
        raise UsageError("grid count must be positive")
    if log:
        if start <= 0.0 or stop <= 0.0:
            raise UsageError("log grid endpoints must be positive")
        return [float(v) for v in np.geomspace(start, stop, count)]
    return [float(v) for v in np.linspace(start, stop, count)]


def parse_values(spec: str) -> list[float]:
    try:
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad value list {spec!r}") from None


# -- parser ---------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _common(p: argparse.ArgumentParser, mc: bool = False):
    p.add_argument("--t", type=float, default=1.0, help="time horizon (default: 1)")
    p.add_argument("--abs-tol", type=float, default=1e-10, help="series truncation tolerance (default: 1e-10)")
    p.add_argument("--max-terms", type=int, default=100_000, help="series term budget")
    p.add_argument("--quad-points", type=int, default=32, help="Gauss-Legendre points per panel")
    p.add_argument("--output", "-o", help="write CSV here instead of stdout")
    if mc:
        p.add_argument("--n", type=int, default=100_000, help="sample count (default: 1e5)")
        p.add_argument("--seed", type=int, default=None, help="64-bit seed (default: $EXCURSION_SEED or built-in)")
        p.add_argument("--stream", type=int, default=0, help="base stream id (default: 0)")
        p.add_argument("--threads", type=int, default=1, help="worker threads; output does not depend on it")
        p.add_argument("--tail-tol", type=float, default=None, help="expected truncated tail of lambda(x)")


def _grid_args(p: argparse.ArgumentParser, axis: str = "x"):
    g = p.add_mutually_exclusive_group()
    g.add_argument(f"--{axis}", help=f"comma separated {axis} values")
    g.add_argument(f"--{axis}-grid" if axis != "x" else "--grid", dest=f"{axis}_grid", metavar="START:STOP:COUNT", help="inclusive linear grid")
    g.add_argument(f"--{axis}-log-grid" if axis != "x" else "--log-grid", dest=f"{axis}_log_grid", metavar="START:STOP:COUNT", help="inclusive geometric grid")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="excursion", description="Laws of the highest complete excursion of reflected Brownian motion.")
    ap.add_argument("--version", action="version", version=f"excursion {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("density", help="evaluate a density on a grid")
    p.add_argument("target", choices=["ustar", "theta", "xi", "joint"])
    _grid_args(p, "x")
    _grid_args(p, "y")
    _common(p, mc=True)

    p = sub.add_parser("cdf", help="evaluate a CDF on a grid")
    p.add_argument("target", choices=["ustar", "xi", "arcsine"])
    p.add_argument("--route", choices=[r.value for r in S.Route], default="termwise", help="route for the U* CDF")
    _grid_args(p, "x")
    _common(p)

    p = sub.add_parser("sample", help="draw samples")
    p.add_argument("target", choices=["xi", "lambda", "joint", "lindley"])
    p.add_argument("--x", type=float, default=1.0, help="argument of lambda(x)")
    p.add_argument("--dist", choices=["rademacher", "gaussian", "uniform"], default="rademacher", help="walk step law")
    p.add_argument("--length", type=int, default=1024, help="walk length for lindley samples")
    _common(p, mc=True)

    p = sub.add_parser("estimate", help="weighted Monte Carlo estimates")
    p.add_argument("target", choices=["rect", "expect"])
    p.add_argument("--a", type=float, default=math.inf, help="U* corner (default: inf)")
    p.add_argument("--b", type=float, default=None, help="theta* corner (default: t)")
    p.add_argument(
        "--f",
        choices=["one", "u_le", "theta_le", "exp_u", "theta_frac"],
        default="one",
        help="integrand for expect: 1, 1{u<=a}, 1{theta<=b}, exp(-u), theta/t",
    )
    _common(p, mc=True)

    p = sub.add_parser("converge", help="KS and rectangle report for Lindley statistics")
    p.add_argument("--dist", choices=["rademacher", "gaussian", "uniform"], default="rademacher")
    p.add_argument("--n-grid", default="64,4096", help="comma separated increasing path lengths")
    p.add_argument("--reps", type=int, default=20_000)
    p.add_argument("--n-reference", type=int, default=10**6, help="weighted draws for rectangle references")
    _common(p, mc=True)

    p = sub.add_parser("selfcheck", help="run cross-route and oracle checks")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.add_argument("--max-terms", type=int, default=100_000)
    p.add_argument("--quad-points", type=int, default=32)
    p.add_argument("--output", "-o")
    return ap


def _axis(args, axis: str) -> list[float]:
    vals = getattr(args, axis, None)
    grid = getattr(args, f"{axis}_grid", None)
    lgrid = getattr(args, f"{axis}_log_grid", None)
    if vals is not None:
        return parse_values(vals)
    if grid is not None:
        return parse_grid(grid)
    if lgrid is not None:
        return parse_grid(lgrid, log=True)
    return []


def make_config(args) -> RunConfig:
    seed = args.seed if getattr(args, "seed", None) is not None else seed_from_env()
    cfg = RunConfig(
        command=args.command,
        target=getattr(args, "target", None),
        t=getattr(args, "t", 1.0),
        n=getattr(args, "n", 100_000),
        seed=seed,
        stream=getattr(args, "stream", 0),
        abs_tol=args.abs_tol,
        max_terms=args.max_terms,
        quadrature_points=args.quad_points,
        threads=getattr(args, "threads", 1),
        output=args.output,
    )
    if args.command in ("density", "cdf"):
        cfg.xs = _axis(args, "x")
        cfg.ys = _axis(args, "y") if args.command == "density" else []
        if not cfg.xs:
            raise UsageError("give --x, --grid or --log-grid")
        if cfg.target == "joint" and not cfg.ys:
            raise UsageError("density joint needs --y, --y-grid or --y-log-grid")
    if not cfg.t > 0.0 or not math.isfinite(cfg.t):
        raise UsageError("--t must be positive and finite")
    if cfg.n < 1:
        raise UsageError("--n must be positive")
    if cfg.threads < 1:
        raise UsageError("--threads must be positive")
    if not 0 <= cfg.seed < 2**64 or not 0 <= cfg.stream < 2**64:
        raise UsageError("--seed and --stream must be unsigned 64-bit integers")
    try:
        cfg.policy
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return cfg


# -- commands -------------------------------------------------------------------------------


def _trunc(args):
    from .samplers import DEFAULT_TRUNCATION, LambdaTruncation

    tol = getattr(args, "tail_tol", None)
    return DEFAULT_TRUNCATION if tol is None else LambdaTruncation(tail_tol=tol)


def _cmd_density(cfg: RunConfig, args):
    pol = cfg.policy
    if cfg.target == "joint":
        from .joint import joint_density_grid

        est = joint_density_grid(cfg.xs, cfg.ys, cfg.t, cfg.n, cfg.rng(), _trunc(args), pol, cfg.threads)
        header = ["x", "y", "value", "std_error", "n"]
        rows = [[x, y, e.mean, e.std_error, e.n_samples] for x, row in zip(cfg.xs, est) for y, e in zip(cfg.ys, row)]
        return header, rows
    header = ["x", "value", "est_error", "terms_used"]
    rows = []
    for x in cfg.xs:
        if cfg.target == "ustar":
            r = S.ustar_density(x, cfg.t, pol) if x > 0 else S.EvalResult(0.0, 0.0, 0)
        elif cfg.target == "theta":
            r = S.thetastar_density(x, cfg.t, pol)
        else:
            r = S.xi_density(x, pol) if x > 0 else S.EvalResult(0.0, 0.0, 0)
        rows.append([x, r.value, r.est_error, r.terms_used])
    return header, rows


def _cmd_cdf(cfg: RunConfig, args):
    pol = cfg.policy
    rows = []
    for x in cfg.xs:
        if cfg.target == "ustar":
            if x <= 0.0:
                r = S.EvalResult(0.0, 0.0, 0)
            else:
                sf = S.ustar_survival(x, cfg.t, pol, S.Route(args.route))
                r = S.EvalResult(1.0 - sf.value, sf.est_error, sf.terms_used)
        elif cfg.target == "xi":
            r = S.xi_cdf(max(x, 0.0), pol)
        else:
            r = S.EvalResult(S.arcsine_cdf(x), 0.0, 0)
        rows.append([x, r.value, r.est_error, r.terms_used])
    return ["x", "value", "est_error", "terms_used"], rows


def _cmd_sample(cfg: RunConfig, args):
    from . import samplers

    rng = cfg.rng()
    if cfg.target == "xi":
        return ["xi"], [[v] for v in samplers.sample_xi(rng, cfg.n, cfg.threads)]
    if cfg.target == "lambda":
        v = samplers.sample_lambda(args.x, rng, cfg.n, _trunc(args), cfg.threads)
        return ["lambda"], [[x] for x in v]
    if cfg.target == "joint":
        w = samplers.sample_joint_weighted(cfg.t, rng, cfg.n, _trunc(args), cfg.threads)
        return ["u", "theta", "weight"], [list(r) for r in zip(w.u, w.theta, w.weight)]
    from .lindley import StepDistribution, batch_simulate

    if args.length < 1:
        raise UsageError("--length must be positive")
    b = batch_simulate(StepDistribution(args.dist), args.length, cfg.n, rng, cfg.threads)
    return ["ustar", "theta", "degenerate"], [list(r) for r in zip(b.ustar, b.theta, b.degenerate)]


_INTEGRANDS = {
    "one": lambda a, b, t: (lambda u, th: np.ones_like(u)),
    "u_le": lambda a, b, t: (lambda u, th: (u <= a).astype(float)),
    "theta_le": lambda a, b, t: (lambda u, th: (th <= b).astype(float)),
    "exp_u": lambda a, b, t: (lambda u, th: np.exp(-u)),
    "theta_frac": lambda a, b, t: (lambda u, th: th / t),
}


def _cmd_estimate(cfg: RunConfig, args):
    from .joint import estimate_expectation, rect_prob

    if cfg.n < 2:
        raise UsageError("--n must be at least 2")
    b = cfg.t if args.b is None else args.b
    rng = cfg.rng()
    if cfg.target == "rect":
        e = rect_prob(args.a, b, cfg.t, cfg.n, rng, _trunc(args), cfg.threads)
        label = f"P(U*<={args.a!r},theta*<={b!r})"
    else:
        f = _INTEGRANDS[args.f](args.a, b, cfg.t)
        e = estimate_expectation(f, cfg.t, cfg.n, rng, _trunc(args), cfg.threads)
        label = f"E[{args.f}]"
    return ["quantity", "mean", "std_error", "n_samples", "seed"], [[label, e.mean, e.std_error, e.n_samples, e.seed]]


def _cmd_converge(cfg: RunConfig, args, out):
    from .convergence import convergence_report, write_reports_csv
    from .lindley import StepDistribution

    grid = [int(v) for v in parse_values(args.n_grid)]
    if args.reps < 1:
        raise UsageError("--reps must be positive")
    reports = convergence_report(
        StepDistribution(args.dist),
        grid,
        args.reps,
        cfg.rng(),
        cfg.policy,
        n_reference=args.n_reference,
        trunc=_trunc(args),
        threads=cfg.threads,
    )
    write_reports_csv(reports, out)


def _metadata(cfg: RunConfig, argv: Sequence[str]) -> list[str]:
    from .kernels import BACKEND

    p = cfg.policy
    return [
        f"# excursion {__version__}",
        f"# command: {' '.join(argv)}",
        f"# seed: {cfg.seed}",
        f"# stream: {cfg.stream}",
        f"# policy: abs_tol={p.abs_tol!r} max_terms={p.max_terms} quadrature_points={p.quadrature_points}",
        f"# backend: {BACKEND}",
    ]


_HIDDEN_FLAGS = ("--threads", "--output", "-o")


def _canonical(argv: Sequence[str]) -> list[str]:
    """argv without flags that must not change the output (threads, output path)."""
    out = []
    skip = False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in _HIDDEN_FLAGS:
            skip = True
            continue
        if any(a.startswith(f + "=") for f in _HIDDEN_FLAGS):
            continue
        out.append(a)
    return out


@contextlib.contextmanager
def _open(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _run(argv: Sequence[str]) -> int:
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("missing subcommand")
    cfg = make_config(args)
    body = io.StringIO()
    status = EXIT_OK
    if cfg.command == "selfcheck":
        from .selfcheck import run_all

        checks = run_all(cfg.policy, cfg.seed)
        w = csv.writer(body, lineterminator="\n")
        w.writerow(["check", "status", "detail"])
        for c in checks:
            w.writerow([c.name, "pass" if c.ok else "FAIL", c.detail])
            if not c.ok:
                print(f"selfcheck: {c.name} failed: {c.detail}", file=sys.stderr)
        status = EXIT_OK if all(c.ok for c in checks) else EXIT_RUNTIME
    elif cfg.command == "converge":
        _cmd_converge(cfg, args, body)
    else:
        handler = {"density": _cmd_density, "cdf": _cmd_cdf, "sample": _cmd_sample, "estimate": _cmd_estimate}[cfg.command]
        header, rows = handler(cfg, args)
        w = csv.writer(body, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    with _open(cfg.output) as out:
        for line in _metadata(cfg, _canonical(argv)):
            out.write(line + "\n")
        out.write(body.getvalue())
    return status


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Run one command; returns the exit status instead of exiting."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _run(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ConfigurationError) as exc:
        print(f"excursion: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AccuracyError as exc:
        print(f"excursion: accuracy failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ExcursionError, ArithmeticError, OSError) as exc:
        print(f"excursion: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(dispatch())
