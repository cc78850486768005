"""Command-line interface.

Subcommands:

  compute      evaluate p_{r,s}(n) by the convergent series and certify it
  oracle       print the dynamic-programming count (no series involved)
  convergence  emit the partial-sum table S_1..S_N with differences
  verify       sweep a grid of (r,s,n) comparing series against oracle
  selftest     run the fast invariant batteries

Output goes to stdout or --out; --format selects text, json (big integers
as decimal strings, canonical field order), or csv (convergence only).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import gmpy2

from .floats import workprec
from .hrr import EvaluationError, HrrParams, TruncationPolicy, evaluate
from .numtheory import (
    dedekind_sum,
    dedekind_sum_definition,
    eta_transform_check,
    is_squarefree,
    omega_ratio,
    omega_ratio_closed,
)
from .qseries import IntSeries, euler_product, generating_coeffs, oracle_prs, series_div, series_mul
from .rademacher import bessel_i32, bessel_i32_series, evaluate_p

__all__ = ["RunConfig", "main", "cmd_compute", "cmd_oracle", "cmd_convergence", "cmd_verify", "cmd_selftest"]


@dataclass
class RunConfig:
    """Parsed invocation: one command plus its validated flags."""

    command: str
    r: Optional[int] = None
    s: Optional[int] = None
    n: Optional[int] = None
    N_max: Optional[int] = None
    precision_override: Optional[int] = None
    output_format: str = "text"
    output_path: Optional[str] = None
    allow_non_squarefree: bool = False
    emit_svg: bool = False
    svg_path: Optional[str] = None
    decimals: int = 4
    seed: Optional[int] = None
    inject_fault: bool = False


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        # newline="" so the LF endings written here survive on any platform
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_compute(cfg: RunConfig) -> int:
    params = HrrParams(cfg.r, cfg.s, cfg.n, allow_non_squarefree=cfg.allow_non_squarefree)
    policy = TruncationPolicy(N_max=cfg.N_max, precision_bits=cfg.precision_override)
    report = evaluate(params, policy)
    if cfg.output_format == "json":
        _emit(cfg, _json_text({
            "r": str(cfg.r),
            "s": str(cfg.s),
            "n": str(cfg.n),
            "value": str(report.value),
            "N_used": report.N_used,
            "residual": f"{float(report.residual):.6e}",
            "precision_bits": report.precision_bits,
            "oracle_checked": report.oracle_checked,
        }))
    elif cfg.output_format == "text":
        _emit(cfg, (
            f"p_({cfg.r},{cfg.s})({cfg.n}) = {report.value}\n"
            f"N_used={report.N_used} residual={float(report.residual):.6e} "
            f"precision_bits={report.precision_bits}\n"
        ))
    else:
        raise ValueError(f"compute does not support --format {cfg.output_format}")
    return 0


def cmd_oracle(cfg: RunConfig) -> int:
    value = oracle_prs(cfg.r, cfg.s, cfg.n)
    if cfg.output_format == "json":
        _emit(cfg, _json_text({
            "r": str(cfg.r), "s": str(cfg.s), "n": str(cfg.n), "value": str(value),
        }))
    elif cfg.output_format == "text":
        _emit(cfg, f"p_({cfg.r},{cfg.s})({cfg.n}) = {value}\n")
    else:
        raise ValueError(f"oracle does not support --format {cfg.output_format}")
    return 0


def cmd_convergence(cfg: RunConfig) -> int:
    if cfg.N_max is None or cfg.N_max < 1:
        raise ValueError("convergence needs --N-max >= 1")
    params = HrrParams(cfg.r, cfg.s, cfg.n, allow_non_squarefree=cfg.allow_non_squarefree)
    policy = TruncationPolicy(
        N=cfg.N_max, precision_bits=cfg.precision_override, keep_trace=True
    )
    report = evaluate(params, policy)
    exact = oracle_prs(cfg.r, cfg.s, cfg.n)
    d = cfg.decimals
    with workprec(report.precision_bits):
        rows = [
            (k, f"{partial:.{d}f}", f"{partial - exact:.{d}f}")
            for k, partial in report.partial_sums
        ]
    if cfg.output_format == "csv":
        body = "".join(f"{k},{sn},{diff}\n" for k, sn, diff in rows)
        _emit(cfg, "N,S_N,diff\n" + body)
    elif cfg.output_format == "json":
        _emit(cfg, _json_text({
            "r": str(cfg.r),
            "s": str(cfg.s),
            "n": str(cfg.n),
            "exact": str(exact),
            "rows": [[k, sn, diff] for k, sn, diff in rows],
        }))
    elif cfg.output_format == "text":
        wn = max(len("N"), *(len(str(k)) for k, _, _ in rows))
        ws = max(len("S_N"), *(len(sn) for _, sn, _ in rows))
        lines = [f"{'N':>{wn}}  {'S_N':>{ws}}  diff"]
        lines += [f"{k:>{wn}}  {sn:>{ws}}  {diff}" for k, sn, diff in rows]
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        raise ValueError(f"convergence does not support --format {cfg.output_format}")
    if cfg.emit_svg:
        _write_svg(cfg.svg_path, [(k, float(diff)) for k, _, diff in rows])
    return 0


def _write_svg(path: str, points: Sequence[Tuple[int, float]]) -> None:
    """Minimal polyline chart of (N, diff); a convenience, not an interface."""
    width, height, pad = 640, 320, 10
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    xspan = (x1 - x0) or 1
    yspan = (y1 - y0) or 1.0

    def sx(x):
        return pad + (x - x0) * (width - 2 * pad) / xspan

    def sy(y):
        return height - pad - (y - y0) * (height - 2 * pad) / yspan

    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}">\n'
        f'  <rect width="{width}" height="{height}" fill="white"/>\n'
        f'  <polyline fill="none" stroke="#1f6feb" stroke-width="1.5" points="{pts}"/>\n'
        f"</svg>\n"
    )
    with open(path, "w", newline="") as fh:
        fh.write(svg)


def _verify_pairs(r_max: int, s_max: int) -> List[Tuple[int, int]]:
    return [
        (r, s)
        for r in range(2, r_max + 1)
        for s in range(r + 1, s_max + 1)
        if gcd(r, s) == 1 and is_squarefree(r) and is_squarefree(s)
    ]


def cmd_verify(cfg: RunConfig) -> int:
    r_max = cfg.r if cfg.r is not None else 15
    s_max = cfg.s if cfg.s is not None else 15
    n_max = cfg.n if cfg.n is not None else 150
    pairs = _verify_pairs(r_max, s_max)
    total = 0
    mismatches = 0
    for r, s in pairs:
        params = HrrParams(r, s, 1)  # n is per-case; this validates (r,s) once
        n_lo = int(params.R) + 1
        count = 0
        for n in range(n_lo, n_max + 1):
            report = evaluate(HrrParams(r, s, n))
            expected = oracle_prs(r, s, n)
            total += 1
            count += 1
            if report.value != expected:
                mismatches += 1
                print(
                    f"MISMATCH r={r} s={s} n={n}: series {report.value} != oracle {expected}",
                    flush=True,
                )
        print(f"r={r:>2} s={s:>2}: {count} cases ok", flush=True)
    print(f"{total} cases, {mismatches} mismatches")
    return 1 if mismatches else 0


class _CheckFailure(AssertionError):
    pass


def _require(cond: bool, detail: str) -> None:
    if not cond:
        raise _CheckFailure(detail)


def _selftest_checks(rng: random.Random, inject_fault: bool) -> Iterable[Tuple[str, Callable[[], None]]]:
    def dedekind_reciprocity():
        for f in range(2, 121):
            for e in range(1, f):
                if gcd(e, f) != 1:
                    continue
                lhs = dedekind_sum(e, f) + dedekind_sum(f, e)
                rhs = Fraction(-1, 4) + (Fraction(e, f) + Fraction(f, e) + Fraction(1, e * f)) / 12
                _require(lhs == rhs, f"reciprocity fails at (e,f)=({e},{f})")

    def dedekind_definition():
        for _ in range(250):
            f = rng.randrange(2, 401)
            e = rng.randrange(1, f)
            if gcd(e, f) != 1:
                continue
            _require(
                dedekind_sum(e, f) == dedekind_sum_definition(e, f),
                f"recursion != definition at (e,f)=({e},{f})",
            )

    def lemma2_closed_form():
        for r, s in [(2, 3), (5, 6), (14, 15)]:
            for k in range(1, 37):
                for h in range(1, k + 1):
                    if gcd(h, k) != 1:
                        continue
                    a = omega_ratio(h, k, r, s)
                    b = omega_ratio_closed(h, k, r, s)
                    _require(a == b, f"closed form differs at (h,k,r,s)=({h},{k},{r},{s})")

    def eta_transformation():
        bound = gmpy2.mpfr("1e-50", 64)
        for _ in range(6):
            c = rng.randrange(1, 6)
            while True:
                d = rng.randrange(-20, 21)
                if gcd(d, c) == 1 and (c > 1 or d != 0):
                    break
            a = pow(d, -1, c) if c > 1 else 0
            b = (a * d - 1) // c
            # tau chosen so both truncated products converge far below 1e-50
            u = rng.uniform(0.05, 0.3)
            v = rng.uniform(0.6, 1.2)
            tau = complex((-d + u) / c, v / c)
            res = eta_transform_check(a, b, c, d, tau, M=200, prec=256)
            _require(res < bound, f"eta residual {float(res):.3e} at (a,b,c,d)=({a},{b},{c},{d})")

    def bessel_dual_path():
        from .hrr import bessel_i1

        prec = 192
        tol = gmpy2.exp2(-prec + 8)
        for x in (Fraction(1, 2), 1, 5, 20):
            closed = bessel_i32(x, prec)
            series = bessel_i32_series(x, prec)
            _require(abs(closed - series) <= tol * abs(series), f"I_3/2 paths differ at x={x}")
        # I_1 spot value, summed independently offline to 72 digits
        i1_2 = gmpy2.mpfr(
            "1.59063685463732906338225442499966624795447815949553664713228798460854504", 256
        )
        got = bessel_i1(2, prec)
        _require(abs(got - i1_2) <= tol * i1_2, f"I_1(2) = {got} off reference")

    def pentagonal_vs_naive():
        M = 60
        for t in range(1, 7):
            naive = IntSeries.one(M)
            j = t
            while j <= M:
                factor = [0] * (M + 1)
                factor[0] = 1
                factor[j] = -1
                naive = series_mul(naive, IntSeries(factor))
                j += t
            _require(naive == euler_product(t, M), f"pentagonal mismatch at t={t}")

    def series_round_trip():
        for _ in range(25):
            order = rng.randrange(4, 21)
            a = IntSeries([rng.randrange(-4, 5) for _ in range(order + 1)])
            b_coeffs = [rng.choice((1, -1))] + [rng.randrange(-4, 5) for _ in range(order)]
            b = IntSeries(b_coeffs)
            _require(series_div(series_mul(a, b), b) == a, "round-trip (a*b)/b != a")

    def generating_vs_oracle():
        for r, s in [(2, 3), (3, 5), (4, 9), (5, 6)]:
            coeffs = generating_coeffs(r, s, 60).coeffs
            for n in range(61):
                _require(
                    coeffs[n] == oracle_prs(r, s, n),
                    f"generating function != oracle at (r,s,n)=({r},{s},{n})",
                )

    def series_evaluation():
        rep = evaluate(HrrParams(2, 3, 30), TruncationPolicy(oracle_check=True))
        _require(rep.value == 60 and rep.oracle_checked, f"p_(2,3)(30) = {rep.value}, want 60")
        rep = evaluate(HrrParams(5, 6, 80), TruncationPolicy(oracle_check=True))
        _require(rep.oracle_checked, "p_(5,6)(80) oracle check failed")
        rep = evaluate_p(60, oracle_check=True)
        _require(rep.oracle_checked, "p(60) oracle check failed")

    checks = [
        ("dedekind-reciprocity", dedekind_reciprocity),
        ("dedekind-definition", dedekind_definition),
        ("lemma2-closed-form", lemma2_closed_form),
        ("eta-transformation", eta_transformation),
        ("bessel-dual-path", bessel_dual_path),
        ("pentagonal-vs-naive", pentagonal_vs_naive),
        ("series-round-trip", series_round_trip),
        ("generating-vs-oracle", generating_vs_oracle),
        ("series-evaluation", series_evaluation),
    ]
    if inject_fault:
        def injected():
            raise _CheckFailure("forced failure requested via --inject-fault")

        checks.append(("injected-fault", injected))
    return checks


def cmd_selftest(cfg: RunConfig) -> int:
    rng = random.Random(cfg.seed if cfg.seed is not None else 20240901)
    failures = 0
    for name, fn in _selftest_checks(rng, cfg.inject_fault):
        try:
            fn()
        except Exception as exc:  # report and keep running the battery
            failures += 1
            print(f"FAIL {name}: {exc}", flush=True)
        else:
            print(f"ok {name}", flush=True)
    if failures:
        print(f"selftest: {failures} check(s) failed")
        return 1
    print("selftest: all checks passed")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regpart",
        description="Exact and series-based computation of (r,s)-regular partition counts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_rsn(p: argparse.ArgumentParser, required: bool) -> None:
        p.add_argument("--r", type=int, required=required, help="first excluded divisor")
        p.add_argument("--s", type=int, required=required, help="second excluded divisor")
        p.add_argument("--n", type=int, required=required, help="number being partitioned")

    def add_io(p: argparse.ArgumentParser, formats: Sequence[str]) -> None:
        p.add_argument("--format", dest="output_format", choices=list(formats), default="text")
        p.add_argument("--out", dest="output_path", default=None, help="write output to this file")

    p = sub.add_parser("compute", help="evaluate p_{r,s}(n) by the convergent series")
    add_rsn(p, required=True)
    p.add_argument("--N-max", dest="N_max", type=int, default=None, help="hard cap on summed terms")
    p.add_argument("--precision-bits", dest="precision_override", type=int, default=None)
    p.add_argument("--allow-non-squarefree", action="store_true")
    add_io(p, ("text", "json"))

    p = sub.add_parser("oracle", help="print the dynamic-programming count")
    add_rsn(p, required=True)
    add_io(p, ("text", "json"))

    p = sub.add_parser("convergence", help="emit the partial-sum table S_1..S_N")
    add_rsn(p, required=True)
    p.add_argument("--N-max", dest="N_max", type=int, required=True, help="table length")
    p.add_argument("--precision-bits", dest="precision_override", type=int, default=None)
    p.add_argument("--allow-non-squarefree", action="store_true")
    p.add_argument("--decimals", type=int, default=4, help="decimal places for S_N and diff")
    p.add_argument("--svg", dest="svg_path", default=None, help="also write a diff polyline SVG here")
    add_io(p, ("text", "json", "csv"))

    p = sub.add_parser("verify", help="sweep series-vs-oracle over a grid")
    p.add_argument("--r", type=int, default=None, help="max r (default 15)")
    p.add_argument("--s", type=int, default=None, help="max s (default 15)")
    p.add_argument("--n", type=int, default=None, help="max n (default 150)")

    p = sub.add_parser("selftest", help="run the fast invariant batteries")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized cases")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for name in (
        "r", "s", "n", "N_max", "precision_override", "output_format", "output_path",
        "allow_non_squarefree", "svg_path", "decimals", "seed", "inject_fault",
    ):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    cfg.emit_svg = cfg.svg_path is not None
    return cfg


_DISPATCH = {
    "compute": cmd_compute,
    "oracle": cmd_oracle,
    "convergence": cmd_convergence,
    "verify": cmd_verify,
    "selftest": cmd_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = _config_from_args(args)
    try:
        return _DISPATCH[cfg.command](cfg)
    except (ValueError, EvaluationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
