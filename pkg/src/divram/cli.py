"""Command-line entry point.

Every subcommand prints one JSON object with the result (big integers as
decimal strings) and the op tally of the counted context.  Exit codes:
0 success, 1 ``--check`` mismatch, 2 usage error, 3 forbidden primitive,
4 violated precondition.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction

import gmpy2

from . import COST_MODEL_REVISION, __version__
from . import linalg, native64, numtheory, packing, polyeval
from .errors import DomainExceeded, ForbiddenOp, PreconditionError
from .opcore import CountedContext, format_int, parse_int
from .poly import MultiPoly, Poly

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_FORBIDDEN, EXIT_PRECONDITION = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc.msg}") from None


def _int_arg(text):
    try:
        return parse_int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fraction_arg(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _encode(value):
    """JSON-safe view: ints become decimal strings, containers recurse."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return format_int(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, linalg.IntMat):
        return [[format_int(v) for v in r] for r in value.tolist()]
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


# result fields holding big integers; everything else is small metadata
_BIG_FIELDS = {"value", "modulus", "radix", "divisor"}


def _check(ok: bool, what: str):
    if not ok:
        raise CheckFailed(f"oracle mismatch: {what}")


def _oracle():
    return CountedContext()


def _poly(args) -> Poly:
    try:
        return Poly.from_json(args.poly)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--poly: {exc}") from None


def _mat(data, name) -> linalg.IntMat:
    try:
        return linalg.IntMat.from_json(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{name}: {exc}") from None


def _ints(data, name):
    try:
        return [parse_int(v) for v in data]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{name}: {exc}") from None


# ---------------------------------------------------------------------------
# Subcommand handlers: each returns a dict merged into the output


def cmd_eval(ctx, args):
    p, x = _poly(args), args.x
    method = args.method
    extra = {}
    if method == "horner":
        value = polyeval.eval_horner(ctx, p, x)
    elif method == "blocked":
        value = polyeval.eval_blocked(ctx, p, x, k=args.block)
    elif method == "prepared":
        if args.domain is None:
            raise UsageError("--method prepared needs --domain X")
        prep = polyeval.prepare(p, args.domain)
        extra["radix"] = prep.radix
        value = polyeval.eval_prepared(ctx, prep, x)
    else:
        value = polyeval.eval_adaptive(ctx, polyeval.prepare_adaptive(p), x)
    if args.check:
        _check(value == polyeval.eval_horner(_oracle(), p, x), "Horner")
    return {"value": value, **extra}


def cmd_eval_multi(ctx, args):
    try:
        p = MultiPoly.from_json(args.poly, d=args.d)
    except (TypeError, ValueError, KeyError) as exc:
        raise UsageError(f"--poly: {exc}") from None
    xs = _ints(args.x, "--x")
    if args.method == "prepared":
        if args.domain is None:
            raise UsageError("--method prepared needs --domain X")
        value = polyeval.eval_multi(ctx, polyeval.prepare_multi(p, args.domain), xs)
    else:
        value = polyeval.eval_adaptive_multi(ctx, polyeval.prepare_adaptive_multi(p), xs)
    if args.check:
        _check(value == p.at(xs), "monomial sum")
    return {"value": value}


def cmd_seq(ctx, args):
    if (args.values is None) == (args.language is None):
        raise UsageError("give exactly one of --values or --language")
    if args.values is not None:
        ys = _ints(args.values, "--values")
        prep = polyeval.prepare_sequence(ys)
        value = polyeval.eval_prepared(ctx, prep, args.query) if 0 <= args.query < len(ys) else None
        if value is None:
            raise DomainExceeded(f"query {args.query} outside 0..{len(ys) - 1}")
        if args.check:
            _check(value == ys[args.query], "direct lookup")
    else:
        members = _ints(args.language, "--language")
        prep = polyeval.prepare_language(members, args.N)
        value = polyeval.decide_finite_language(ctx, prep, args.query)
        if args.check:
            _check(value == (args.query in members), "membership")
    return {"value": value, "divisor": prep.divisor, "radix": prep.radix}


def cmd_pow_tower(ctx, args):
    b = args.b if args.b is not None else 2 * args.a ** (1 << args.k)
    value = polyeval.pow_tower(ctx, args.a, args.k, b)
    if args.check:
        _check(value == args.a ** (1 << args.k), "repeated squaring")
    return {"value": value}


def cmd_matmul(ctx, args):
    A, B = _mat(args.a, "--a"), _mat(args.b, "--b")
    fn = linalg.matmul_packed if args.method == "packed" else linalg.matmul_naive
    C = fn(ctx, A, B)
    if args.check:
        _check(C == linalg.matmul_naive(_oracle(), A, B), "naive product")
    return {"value": C}


def cmd_perm(ctx, args):
    A = _mat(args.matrix, "--matrix")
    fn = linalg.permanent_packed if args.method == "packed" else linalg.permanent_naive
    value = fn(ctx, A)
    if args.check:
        _check(value == linalg.permanent_naive(_oracle(), A), "permutation sum")
    return {"value": value}


def cmd_det(ctx, args):
    A = _mat(args.matrix, "--matrix")
    value = linalg.det_bareiss(ctx, A)
    if args.check:
        _check(value == linalg.det_cofactor(A), "cofactor expansion")
    return {"value": value}


def cmd_matpow(ctx, args):
    A = _mat(args.matrix, "--matrix")
    if args.witness is not None:
        B = _mat(args.witness, "--witness")
    else:
        B = linalg.make_power_witness_oracle(A, args.k)
    value = linalg.matpow_tower(ctx, A, args.k, B)
    if args.check:
        _check(value == linalg.matpow_naive(_oracle(), A, args.k), "repeated squaring")
    return {"value": value, "witness_bits": max(abs(v) for v in B.entries()).bit_length()}


def cmd_crt(ctx, args):
    try:
        system = [numtheory.Congruence(parse_int(a), parse_int(m)) for a, m in args.congruences]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--congruences: {exc}") from None
    x, N = numtheory.crt_tree(ctx, system)
    if args.check:
        _check(all((x - c.residue) % c.modulus == 0 for c in system), "direct remainders")
    return {"value": x, "modulus": N}


def cmd_coprime(ctx, args):
    chain = numtheory.coprime_chain(ctx, args.r, args.count)
    return {"value": chain}


def cmd_gcd_floor(ctx, args):
    xs = numtheory.gcd_floor_point(ctx, args.d, args.r, args.s, args.source)
    if args.check:
        _check(numtheory.verify_gcd_floor(xs, args.r, args.s), "exhaustive offsets")
    return {"value": xs}


def cmd_prime(ctx, args):
    info = {}
    rng = random.Random(args.seed)
    p = numtheory.find_prime_above(ctx, args.above, rng, args.attempts, info)
    if args.check:
        _check(p >= args.above and bool(gmpy2.is_prime(p, 50)), "independent primality test")
    return {"value": p, "attempts": info["attempts"]}


def cmd_threesum(ctx, args):
    x, y, z = _ints(args.x, "--x"), _ints(args.y, "--y"), _ints(args.z, "--z")
    value = packing.threesum_packed(ctx, x, y, z)
    if args.check:
        zs = set(z)
        _check(value == any(a + b in zs for a in x for b in y), "brute force")
    return {"value": value}


def cmd_newton(ctx, args):
    q = _poly(args)
    info = {}
    value = numtheory.newton_approx(ctx, q, args.bits, (args.lo, args.hi), info=info)
    if args.check:
        _check(numtheory.certify_root_interval(q, value, args.bits), "sign change")
    return {"value": value, "iterations": info.get("iterations", 0)}


def cmd_mills(ctx, args):
    value = numtheory.mills_floor(ctx, args.n)
    if args.check:
        _check(bool(gmpy2.is_prime(value, 50)), "primality of the output")
    return {"value": value}


def cmd_rho(ctx, args):
    p = _poly(args)
    code = numtheory.rho_encode(p, args.m)
    value = numtheory.rho_extract(ctx, code, args.n)
    if args.check:
        _check(value == p.at((1 << code.k) << args.n), "direct evaluation")
    return {"value": value, "k": code.k, "R_bits": code.R.bit_length()}


def cmd_recurrence(ctx, args):
    p = _poly(args)
    a = numtheory.find_recurrence(p, args.c)
    if args.check:
        d = len(a) - 1
        ok = all(a[0] * p.at(args.c ** (n + 1)) ==
                 sum(a[i] * p.at(args.c ** (n + 1 - i)) for i in range(1, d + 1))
                 for n in range(d, d + 11))
        _check(ok, "recurrence on n = d..d+10")
    return {"value": list(a)}


def cmd_validate(ctx, args):
    classes = [native64.get_class(args.cls)] if args.cls else native64.builtin_classes()
    reports = [native64.validate_class(c) for c in classes]
    if not all(r.ok for r in reports):
        raise CheckFailed("eval64 disagrees with word Horner: "
                          + json.dumps([r.mismatches for r in reports if not r.ok]))
    return {"value": all(r.ok for r in reports), "classes": [r.as_dict() for r in reports]}


def cmd_bench(ctx, args):
    classes = [native64.get_class(args.cls)] if args.cls else None
    return {"csv": native64.bench(classes, repeat=args.repeat)}


# ---------------------------------------------------------------------------
# Parser


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--ops", default=default,
                        help="permitted instruction set, e.g. '+,-,*,div' (default: all)")
    parser.add_argument("--seed", type=int, default=default, help="random seed")
    parser.add_argument("--tally", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="report every counter, including zeros")
    parser.add_argument("--json", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="compact single-line JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divram",
        description="Exact integer algorithms with division and bitwise AND, with op counts.")
    parser.add_argument("--version", action="version",
                        version=f"divram {__version__} (cost model revision {COST_MODEL_REVISION})")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    checkable = argparse.ArgumentParser(add_help=False)
    checkable.add_argument("--check", action="store_true", help="also run the oracle")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, handler, help_, check=True):
        sp = sub.add_parser(name, help=help_, parents=[common] + ([checkable] if check else []))
        sp.set_defaults(handler=handler, check=False)
        return sp

    sp = add("eval", cmd_eval, "evaluate a univariate polynomial")
    sp.add_argument("--method", choices=["horner", "blocked", "prepared", "adaptive"],
                    default="prepared")
    sp.add_argument("--poly", required=True, help="JSON coefficient array, low order first")
    sp.add_argument("--x", type=_int_arg, required=True)
    sp.add_argument("--domain", type=_int_arg, help="domain bound X (prepared)")
    sp.add_argument("--block", type=int, help="block size k (blocked)")

    sp = add("eval-multi", cmd_eval_multi, "evaluate a multivariate polynomial")
    sp.add_argument("--method", choices=["prepared", "adaptive"], default="prepared")
    sp.add_argument("--poly", required=True, help='JSON [{"exponents": [...], "coeff": "..."}]')
    sp.add_argument("--x", type=_json_arg, required=True, help="JSON argument vector")
    sp.add_argument("--domain", type=_int_arg)
    sp.add_argument("--d", type=int, help="per-variable degree bound (exponents < d)")

    sp = add("seq", cmd_seq, "compile a finite sequence or language and query it")
    sp.add_argument("--values", type=_json_arg, help="JSON list y_0..y_N")
    sp.add_argument("--language", type=_json_arg, help="JSON list of members")
    sp.add_argument("--N", type=int, help="language universe 0..N")
    sp.add_argument("--query", type=int, required=True)

    sp = add("pow-tower", cmd_pow_tower, "a^(2^k) with a witness b")
    sp.add_argument("--a", type=_int_arg, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--b", type=_int_arg, help="witness (default 2*a^(2^k))")

    sp = add("matmul", cmd_matmul, "integer matrix product")
    sp.add_argument("--method", choices=["naive", "packed"], default="packed")
    sp.add_argument("--a", type=_json_arg, required=True)
    sp.add_argument("--b", type=_json_arg, required=True)

    sp = add("perm", cmd_perm, "matrix permanent")
    sp.add_argument("--method", choices=["naive", "packed"], default="packed")
    sp.add_argument("--matrix", type=_json_arg, required=True)

    sp = add("det", cmd_det, "determinant (fraction-free elimination)")
    sp.add_argument("--matrix", type=_json_arg, required=True)

    sp = add("matpow", cmd_matpow, "A^(2^k) via the gcd congruence tower")
    sp.add_argument("--matrix", type=_json_arg, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--witness", type=_json_arg, help="witness matrix B (default: constructed)")

    sp = add("crt", cmd_crt, "solve a system of congruences")
    sp.add_argument("--congruences", type=_json_arg, required=True,
                    help='JSON [[residue, modulus], ...]')

    sp = add("coprime", cmd_coprime, "pairwise coprime chain", check=False)
    sp.add_argument("--r", type=_int_arg, required=True)
    sp.add_argument("--count", type=int, required=True)

    sp = add("gcd-floor", cmd_gcd_floor, "point whose offsets all have a large gcd")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--r", type=_int_arg, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--source", choices=["primes", "chain"], default="primes")

    sp = add("prime", cmd_prime, "randomized prime search above N")
    sp.add_argument("--above", type=_int_arg, required=True)
    sp.add_argument("--attempts", type=int)

    sp = add("threesum", cmd_threesum, "packed 3SUM decision")
    sp.add_argument("--x", type=_json_arg, required=True)
    sp.add_argument("--y", type=_json_arg, required=True)
    sp.add_argument("--z", type=_json_arg, required=True)

    sp = add("newton", cmd_newton, "certified rational root approximation")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--bits", type=int, required=True)
    sp.add_argument("--lo", type=_fraction_arg, default=Fraction(1))
    sp.add_argument("--hi", type=_fraction_arg, default=Fraction(2))

    sp = add("mills", cmd_mills, "floor(theta^(3^n)) from the stored constant")
    sp.add_argument("--n", type=int, required=True)

    sp = add("rho", cmd_rho, "encode p(Y 2^n) for n <= m and extract one term")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add("recurrence", cmd_recurrence, "linear recurrence of p(c^n)")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--c", type=_int_arg, required=True)

    sp = add("validate-ranges", cmd_validate, "exhaustive word-size class validation", check=False)
    sp.add_argument("--class", dest="cls", type=int)

    sp = add("bench", cmd_bench, "CSV timings of the word-size evaluators", check=False)
    sp.add_argument("--class", dest="cls", type=int)
    sp.add_argument("--repeat", type=int, default=3)
    return parser


def _tally_view(ctx, full):
    snap = ctx.snapshot()
    counts = snap.as_dict() if full else {k: v for k, v in snap.items() if v}
    return {"counts": counts, "total": snap.total()}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ctx = CountedContext(ops=args.ops)
    except ValueError as exc:
        print(f"divram: error: --ops: {exc}", file=stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        result = args.handler(ctx, args)
    except ForbiddenOp as exc:
        print(f"divram: forbidden: {exc}", file=stderr)
        return EXIT_FORBIDDEN
    except PreconditionError as exc:
        print(f"divram: precondition: {exc}", file=stderr)
        return EXIT_PRECONDITION
    except UsageError as exc:
        print(f"divram: error: {exc}", file=stderr)
        return EXIT_USAGE
    except CheckFailed as exc:
        print(f"divram: check failed: {exc}", file=stderr)
        return EXIT_MISMATCH
    elapsed = time.perf_counter() - t0
    if "csv" in result:
        stdout.write(result["csv"])
        return EXIT_OK
    body = {k: (_encode(v) if k in _BIG_FIELDS else v) for k, v in result.items()}
    out = {"command": args.command, **body,
           "tally": _tally_view(ctx, args.tally), "elapsed": round(elapsed, 6)}
    if args.seed is not None:
        out["seed"] = args.seed
    if args.check:
        out["check"] = "passed"
    print(json.dumps(out, indent=None if args.json else 2), file=stdout)
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
