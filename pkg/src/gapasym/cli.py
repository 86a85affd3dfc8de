"""Command-line entry point.

Exit codes: 0 on success, 1 for usage errors and violated preconditions,
2 for numerical failures and unwritable output. Diagnostics are one line on
standard error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Any, Callable

from threadpoolctl import threadpool_limits

from . import asymptotics as asy
from . import structured as sd
from .kernels import DEFAULT_AIRY_CUTOFF, fredholm_det_airy, fredholm_det_sine
from .report import emit, format_csv, format_json
from .specfun import constants

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _real(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real number, got {text!r}")
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return x


def _real_list(text: str) -> list[float]:
    return [_real(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", default=None, help="output file (default: stdout)")

    parser = _Parser(prog="gapasym", description="Gap probabilities and structured determinants.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("constants", parents=[common], help="zeta'(-1), c0 and chi")

    p = sub.add_parser("sine-det", parents=[common], help="sine-kernel determinant on (0, 2s)")
    p.add_argument("--s", type=_real, required=True)
    p.add_argument("--m", type=int)

    p = sub.add_parser("airy-det", parents=[common], help="Airy-kernel determinant on (-s, inf)")
    p.add_argument("--s", type=_real, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--cutoff", type=_real, default=DEFAULT_AIRY_CUTOFF)

    for name, text in (("toeplitz", "arc-symbol Toeplitz determinant"), ("hankel", "truncated-weight Hankel determinant")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--alpha", type=_real, required=True)

    for name, text in (("hankel-full", "full-line Laguerre-type Hankel determinant"), ("selberg", "Selberg product ln A_n")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("verify", parents=[common], help="check an identity at one (n, alpha)")
    p.add_argument("--identity", choices=("2det2", "idinterm", "diff", "di2", "smallarc"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=_real, required=True)
    p.add_argument("--h", type=_real)

    p = sub.add_parser("sweep", parents=[common], help="convergence sweep over orders")
    p.add_argument("--target", choices=("limT", "limH", "asf", "intD2"), required=True)
    p.add_argument("--s", type=_real)
    p.add_argument("--alpha", type=_real)
    p.add_argument("--orders", type=_int_list, required=True)

    p = sub.add_parser("residual", parents=[common], help="residual series against an expansion")
    p.add_argument("kind", choices=("dyson", "tw", "selberg-delta", "hankel-delta"))
    p.add_argument("--s", type=_real_list)
    p.add_argument("--orders", type=_int_list)
    return parser


def thread_count() -> int:
    raw = os.environ.get("GAPASYM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"GAPASYM_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise UsageError(f"GAPASYM_THREADS must be a positive integer, got {raw!r}")
    return n


@contextmanager
def _mapper(threads: int):
    """An order-preserving map, parallel when threads > 1."""
    if threads == 1:
        yield map
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield pool.map


# --- commands ---------------------------------------------------------------
# each returns (schema, parameters, rows)


def _cmd_constants(args, pmap):
    c = constants()
    rows = [
        {"name": "zeta_prime_minus_one", "value": c.zeta_prime_minus_one},
        {"name": "c0", "value": c.c0},
        {"name": "chi_tw", "value": c.chi_tw},
    ]
    return "constants", {}, rows


def _cmd_sine_det(args, pmap):
    r = fredholm_det_sine(args.s, args.m)
    row = {"s": r.s, "m": r.config.m, "log_det": r.log_det, "error_estimate": r.error_estimate}
    return "sine-det", {"s": args.s, "m": args.m}, [row]


def _cmd_airy_det(args, pmap):
    r = fredholm_det_airy(args.s, args.m, args.cutoff)
    row = {
        "s": float(r.s),
        "m": r.config.m,
        "cutoff": r.config.airy_cutoff,
        "log_det": r.log_det,
        "error_estimate": r.error_estimate,
    }
    return "airy-det", {"s": args.s, "m": args.m, "cutoff": args.cutoff}, [row]


def _cmd_toeplitz(args, pmap):
    v = sd.toeplitz_logdet_arc(args.n, args.alpha).log_abs
    return "toeplitz", {"n": args.n, "alpha": args.alpha}, [{"n": args.n, "alpha": args.alpha, "log_det": v}]


def _cmd_hankel(args, pmap):
    v = sd.hankel_logdet_trunc(args.n, args.alpha).log_abs
    return "hankel", {"n": args.n, "alpha": args.alpha}, [{"n": args.n, "alpha": args.alpha, "log_det": v}]


def _cmd_hankel_full(args, pmap):
    v = sd.hankel_logdet_laguerre_full(args.n).log_abs
    return "hankel-full", {"n": args.n}, [{"n": args.n, "log_det": v}]


def _cmd_selberg(args, pmap):
    v = sd.selberg_logA(args.n).log_abs
    return "selberg", {"n": args.n}, [{"n": args.n, "log_A": v}]


def _verify_row(identity: str, n: int, alpha: float, h: float | None):
    if identity == "smallarc":
        if h is not None:
            raise ValueError("the small-arc check takes no step --h")
        lhs, rhs = sd.toeplitz_smallarc_sides(n, alpha)
        return 0.0, lhs, rhs, abs(math.expm1(lhs - rhs))
    step = sd.default_step(alpha) if h is None else h
    sides: dict[str, Callable] = {
        "2det2": sd.toeplitz_identity_sides,
        "idinterm": sd.hankel_identity_sides,
        "diff": asy.circle_derivative_sides,
        "di2": asy.halfline_derivative_sides,
    }
    lhs, rhs = sides[identity](n, alpha, step)
    if identity in ("2det2", "idinterm"):
        disc = abs(lhs - rhs) / abs(rhs)
    else:
        disc = abs(lhs - rhs)
    return step, lhs, rhs, disc


def _cmd_verify(args, pmap):
    h, lhs, rhs, disc = _verify_row(args.identity, args.n, args.alpha, args.h)
    row = {
        "identity": args.identity,
        "n": args.n,
        "alpha": args.alpha,
        "h": h,
        "lhs": lhs,
        "rhs": rhs,
        "discrepancy": disc,
    }
    params = {"identity": args.identity, "n": args.n, "alpha": args.alpha, "h": args.h}
    return "verify", params, [row]


def _expansion_point(target: str, n: int, alpha: float):
    if target == "asf":
        exp = asy.asf_eval(n, alpha).total
        value = sd.toeplitz_logdet_arc(n, alpha).log_abs
    else:
        exp = asy.intD2_eval(n, alpha).total
        value = sd.hankel_logdet_trunc(n, alpha).log_abs - sd.hankel_logdet_laguerre_full(n).log_abs
    return {"n": n, "alpha": alpha, "expansion": exp, "value": value, "abs_error": abs(exp - value)}


def _cmd_sweep(args, pmap):
    orders = args.orders
    params = {"target": args.target, "s": args.s, "alpha": args.alpha, "orders": orders}
    if args.target in ("limT", "limH"):
        if args.s is None or args.alpha is not None:
            raise UsageError(f"--target {args.target} takes --s and no --alpha")
        driver = sd.scaling_limit_sine if args.target == "limT" else sd.scaling_limit_airy
        seq = driver(args.s, orders, map=pmap)
        rows = [
            {"n": n, "value": v, "target": seq.target, "abs_error": e}
            for n, v, e in zip(seq.orders, seq.values, seq.errors)
        ]
        return "sweep-limit", params, rows

    if (args.s is None) == (args.alpha is None):
        raise UsageError(f"--target {args.target} takes exactly one of --s or --alpha")
    if not orders:
        raise ValueError("need at least one order")
    if args.alpha is not None:
        alphas = [args.alpha] * len(orders)
    elif args.target == "asf":
        alphas = [2.0 * args.s / n for n in orders]
    else:
        alphas = [1.0 - args.s / (2.0 * n) ** (2.0 / 3.0) for n in orders]
    rows = list(pmap(lambda na: _expansion_point(args.target, *na), list(zip(orders, alphas))))
    return "sweep-expansion", params, rows


def _cmd_residual(args, pmap):
    kind = args.kind
    if kind in ("dyson", "tw"):
        if args.s is None or args.orders is not None:
            raise UsageError(f"residual {kind} takes --s and no --orders")
        series = asy.constant_recovery("dyson" if kind == "dyson" else "tracy_widom", args.s, map=pmap)
        params = {"kind": kind, "s": args.s}
    else:
        if args.orders is None or args.s is not None:
            raise UsageError(f"residual {kind} takes --orders and no --s")
        func = asy.selberg_delta_n if kind == "selberg-delta" else asy.hankel_delta_tilde_n
        series = func(args.orders)
        params = {"kind": kind, "orders": args.orders}
    rows = [
        {"parameter": p, "residual": r, "extrapolated_limit": series.extrapolated_limit}
        for p, r in zip(series.parameter, series.residual)
    ]
    return "residual", params, rows


_COMMANDS: dict[str, Callable[[Any, Callable], tuple]] = {
    "constants": _cmd_constants,
    "sine-det": _cmd_sine_det,
    "airy-det": _cmd_airy_det,
    "toeplitz": _cmd_toeplitz,
    "hankel": _cmd_hankel,
    "hankel-full": _cmd_hankel_full,
    "selberg": _cmd_selberg,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "residual": _cmd_residual,
}


def _fail(code: int, message: str) -> int:
    first = str(message).strip().splitlines()[0] if str(message).strip() else "error"
    sys.stderr.write(f"gapasym: {first}\n")
    return code


def run(argv: list[str] | None = None) -> int:
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        threads = thread_count()
        with threadpool_limits(limits=1), _mapper(threads) as pmap:
            schema, params, rows = _COMMANDS[args.command](args, pmap)
            if args.format == "csv":
                text = format_csv(schema, rows)
            else:
                text = format_json(args.command, schema, params, rows)
    except UsageError as exc:
        return _fail(EXIT_USAGE, f"usage: {exc}")
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    except ArithmeticError as exc:
        return _fail(EXIT_NUMERICAL, f"numerical failure: {exc}")
    except Exception as exc:  # keep the exit-code contract for anything unforeseen
        return _fail(EXIT_NUMERICAL, f"internal error: {type(exc).__name__}: {exc}")
    try:
        emit(text, args.output)
    except OSError as exc:
        return _fail(EXIT_NUMERICAL, f"cannot write output: {exc}")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
