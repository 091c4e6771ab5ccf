"""Command line front end.

Every subcommand writes one table, either as CSV (header, rows, then
``#``-prefixed trailer lines) or as a single JSON object::

    {"schema_version": 1, "subcommand": ..., "params": ..., "results": ..., "diagnostics": ...}

Floats are written in their shortest round-trip form.  Exit codes: 0 on
success, 1 on a domain error, 2 on numerical non-convergence and 3 on a
usage error.  Errors are reported as one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .errors import ConvergenceError, DomainError
from .fude import (
    CoefficientPair,
    ConstantDriver,
    SinusoidDriver,
    SmoothDriver,
    check_first_gap,
    make_driver,
    picard_solve,
    uniform_grid,
    verify_driver_identity,
)
from .jumarie import (
    Constant,
    DiracDelta,
    FractionalOrder,
    Function,
    Power,
    QuadratureConfig,
    closed_form,
    jumarie_integral,
)
from .riemann_probe import PartitionScheme, side_by_side

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_CONVERGENCE = 2
EXIT_USAGE = 3

IDENTITY_TOLERANCE = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# {{{ argument types


def parse_integrand(spec: str):
    """Map a named integrand (``const:c``, ``pow:g``, ``exp``, ``sin:w``,
    ``poly:c0,c1,...``, ``delta``) to an integrand object."""
    name, _, arg = spec.partition(":")
    try:
        if name == "const":
            return Constant(float(arg) if arg else 1.0)
        if name == "pow":
            return Power(float(arg))
        if name == "exp" and not arg:
            return Function(np.exp)
        if name == "sin":
            omega = float(arg) if arg else 1.0
            return Function(lambda u: np.sin(omega * u))
        if name == "poly":
            coeffs = [float(c) for c in arg.split(",")]
            return Function(lambda u: np.polynomial.polynomial.polyval(u, coeffs))
        if name == "delta" and not arg:
            return DiracDelta()
    except ValueError as exc:
        raise DomainError(f"bad integrand {spec!r}: {exc}") from None
    raise UsageError(f"unknown integrand {spec!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


PRESETS: dict[str, tuple[Callable, Callable, float]] = {
    "zero": (lambda t, x: 0.0 * x, lambda t, x: 0.0 * x, 1.0),
    "linear": (lambda t, x: x, lambda t, x: 0.0 * x, 1.0),
    "driver": (lambda t, x: 0.0 * x, lambda t, x: 1.0 + 0.0 * x, 1.0),
    "affine": (
        lambda t, x: -0.5 * x + 0.5 * np.cos(t),
        lambda t, x: 0.5 + 0.5 * np.sin(x),
        1.0,
    ),
    "sine": (lambda t, x: np.sin(x), lambda t, x: 0.5 * np.cos(x), 1.0),
}


def parse_driver(spec: str, seed: int):
    name, _, arg = spec.partition(":")
    try:
        vals = [float(v) for v in arg.split(",")] if arg else []
        if name == "constant":
            return ConstantDriver(*vals[:1])
        if name == "sinusoid":
            return SinusoidDriver(*vals[:2])
        if name == "smooth":
            return SmoothDriver(seed=seed, modes=int(vals[0]) if vals else 3)
    except ValueError as exc:
        raise DomainError(f"bad driver {spec!r}: {exc}") from None
    raise UsageError(f"unknown driver {spec!r}")


# }}}


# {{{ output


def fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@dataclass
class Table:
    header: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    trailer: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([fmt(v) for v in row])
        for line in self.trailer:
            buf.write(f"# {line}\n")
        return buf.getvalue()


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    fmt: str
    out: str | None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        skip = {"command", "format", "out", "handler"}
        params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
        return cls(args.command, params, args.format, args.out)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def render(run: RunConfig, table: Table, results: dict, diagnostics: dict) -> str:
    if run.fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "subcommand": run.subcommand,
            "params": _jsonable(run.params),
            "results": _jsonable(results),
            "diagnostics": _jsonable(diagnostics),
        }
        return json.dumps(doc, sort_keys=True) + "\n"
    return table.to_csv()


# }}}


# {{{ subcommands


def _config(args) -> QuadratureConfig:
    return QuadratureConfig(
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        max_evals=args.max_evals,
        scheme=getattr(args, "scheme", "substitution"),
        force_numeric=getattr(args, "numeric", False),
    )


def cmd_integrate(args):
    f = parse_integrand(args.f)
    order = FractionalOrder(args.alpha)
    res = jumarie_integral(f, order, args.t, _config(args))
    table = Table(
        ["f", "alpha", "t", "value", "error_estimate", "evals", "converged"],
        [[args.f, order.alpha, float(args.t), res.value, res.error_estimate, res.evals, res.converged]],
    )
    return table, res.to_dict(), {"converged": res.converged}, res.converged


def cmd_table(args):
    cfg = QuadratureConfig(args.rel_tol, args.abs_tol, args.max_evals, args.scheme, True)
    table = Table(["alpha", "gamma", "t", "closed_form", "quadrature", "error_estimate",
                   "rel_err", "evals", "converged"])
    rows = []
    ok = True
    for a in args.alphas:
        order = FractionalOrder(a)
        for g in args.gammas:
            f = Power(g)
            for t in args.ts:
                exact = closed_form(f, order, t)
                res = jumarie_integral(f, order, t, cfg)
                rel = abs(res.value - exact) / abs(exact) if exact else abs(res.value)
                ok &= res.converged
                table.rows.append([order.alpha, f.gamma_exp, float(t), exact, res.value,
                                   res.error_estimate, rel, res.evals, res.converged])
                rows.append({"alpha": order.alpha, "gamma": f.gamma_exp, "t": float(t),
                             "closed_form": exact, "quadrature": res.to_dict(), "rel_err": rel})
    worst = max((r["rel_err"] for r in rows), default=0.0)
    table.trailer.append(f"max_rel_err={fmt(worst)}")
    return table, {"rows": rows}, {"max_rel_err": worst, "all_converged": ok}, ok


def cmd_probe(args):
    f = parse_integrand(args.f)
    order = FractionalOrder(args.alpha)
    out = side_by_side(f, order, args.t, args.ns, PartitionScheme(sample_point=args.sample),
                       _config(args))
    rep = out.report
    table = Table(["n", "sum", "alpha", "t"],
                  [[n, s, order.alpha, float(args.t)] for n, s in zip(rep.ns, rep.sums)])
    table.trailer.append(
        f"slope={fmt(rep.fitted_exponent)} r2={fmt(rep.fitted_r2)} "
        f"verdict={rep.verdict} definition_value={fmt(out.definition_value)}"
    )
    return table, out.to_dict(), {"verdict": rep.verdict}, True


def _problem(args):
    g, h, L = PRESETS[args.preset]
    coeffs = CoefficientPair(g, h, L if args.growth_l is None else args.growth_l)
    grid = uniform_grid(args.horizon, args.m)
    model = parse_driver(args.driver, args.seed)
    path = make_driver(model, args.kappa, args.alpha, grid)
    return coeffs, path


def cmd_solve(args):
    coeffs, path = _problem(args)
    trace = picard_solve(coeffs, args.x0, path, tol=args.tol, max_iter=args.max_iter)
    table = Table(["t", "x"], [[t, x] for t, x in zip(path.grid, trace.solution)])
    for n, gap in enumerate(trace.gaps):
        table.trailer.append(f"iteration={n} gap={fmt(gap)}")
    table.trailer.append(
        f"converged={fmt(trace.converged)} iterations={trace.iterations_used} "
        f"residual={fmt(trace.residual)} contraction_factor={fmt(trace.contraction_factor)}"
    )
    results = {
        "grid": path.grid,
        "solution": trace.solution,
        "phi": path.phi,
        "trace": trace.to_dict(),
    }
    diagnostics = {"converged": trace.converged, "residual": trace.residual}
    return table, results, diagnostics, trace.converged


def cmd_verify(args):
    coeffs, path = _problem(args)
    gap = check_first_gap(coeffs, args.x0, path, tol=args.rel_tol)
    w = np.abs(coeffs.diffusion(path.grid, np.full(path.grid.size, float(args.x0))))
    t = path.horizon if args.t is None else args.t
    residual = verify_driver_identity(w, path.grid, path.kappa, path.alpha, t, _config(args))
    identity_ok = residual <= IDENTITY_TOLERANCE
    table = Table(
        ["check", "value", "bound", "passed"],
        [
            ["first_gap", gap.d0, gap.bound, gap.satisfied],
            ["driver_identity", residual, IDENTITY_TOLERANCE, identity_ok],
        ],
    )
    results = {
        "first_gap": {"d0": gap.d0, "bound": gap.bound, "satisfied": gap.satisfied},
        "driver_identity": {"residual": residual, "t": float(t), "passed": identity_ok},
    }
    return table, results, {"all_passed": gap.satisfied and identity_ok}, True


# }}}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.add_argument("--max-evals", type=int, default=100_000)


def _add_problem(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), default="linear")
    p.add_argument("--growth-l", type=float, default=None,
                   help="override the preset's growth/Lipschitz constant")
    p.add_argument("--driver", default="constant:1",
                   help="constant:LEVEL | sinusoid:AMP,FREQ | smooth:MODES")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--m", type=int, default=128, help="number of grid intervals")
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--seed", type=_u64, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dtalpha", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("integrate", help="one integral with respect to (dt)^alpha")
    p.add_argument("--f", default="const:1",
                   help="const:C | pow:G | exp | sin:W | poly:C0,C1,... | delta")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--scheme", choices=("substitution", "gauss_jacobi"), default="substitution")
    p.add_argument("--numeric", action="store_true",
                   help="use quadrature even when a closed form exists")
    _add_common(p)
    p.set_defaults(handler=cmd_integrate)

    p = sub.add_parser("table", help="power rule: closed form against quadrature")
    p.add_argument("--alphas", type=_float_list, default=[0.1, 0.3, 0.5, 0.7, 0.9])
    p.add_argument("--gammas", type=_float_list, default=[0.0, 0.5, 1.0, 2.0, 3.7])
    p.add_argument("--ts", type=_float_list, default=[0.5, 1.0, 2.0])
    p.add_argument("--scheme", choices=("substitution", "gauss_jacobi"), default="substitution")
    _add_common(p)
    p.set_defaults(handler=cmd_table)

    p = sub.add_parser("probe", help="Riemann-sum divergence next to the integral value")
    p.add_argument("--f", default="const:1")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--ns", type=_int_list, default=[16, 64, 256, 1024, 4096])
    p.add_argument("--sample", choices=("left", "right", "midpoint"), default="right")
    _add_common(p)
    p.set_defaults(handler=cmd_probe)

    p = sub.add_parser("solve", help="Picard iteration for one driver path")
    _add_problem(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=50)
    _add_common(p)
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("verify", help="first-gap bound and driver integral identity")
    _add_problem(p)
    p.add_argument("--t", type=float, default=None, help="grid node for the identity check")
    _add_common(p)
    p.set_defaults(handler=cmd_verify)
    return parser


def _report(kind: str, exc: BaseException, stream) -> None:
    record = {"error": kind, "type": type(exc).__name__, "message": str(exc).replace("\n", " ")}
    stream.write(json.dumps(record, sort_keys=True) + "\n")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the subcommand and return the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        run_cfg = RunConfig.from_args(args)
        table, results, diagnostics, ok = args.handler(args)
        text = render(run_cfg, table, results, diagnostics)
        if run_cfg.out is None:
            stdout.write(text)
        else:
            with open(run_cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except UsageError as exc:
        _report("usage", exc, stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        _report("convergence", exc, stderr)
        return EXIT_CONVERGENCE
    except (DomainError, OverflowError) as exc:
        _report("domain", exc, stderr)
        return EXIT_DOMAIN
    if not ok:
        _report("convergence", ConvergenceError("result did not reach the requested tolerance"), stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
