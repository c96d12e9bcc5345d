"""Polynomial evaluation with and without non-arithmetic primitives.

Evaluators, roughly in order of how much they lean on division / AND:

``eval_horner``          d mul + d add; the reference oracle.
``eval_blocked``         table of all small block polynomials, O(d / log_P d).
``eval_prepared``        constant number of ops on a bounded domain, given
                         precomputed radix constants (one division does the
                         geometric series, one multiplication does the sum).
``eval_multi``           the same for n variables, O(n) ops.
``eval_adaptive``        unbounded domain: pick the radix from ``x`` and
                         recover ``p(Z)`` from a stored ``p(Y)`` by masking.
``eval_adaptive_multi``  multivariate version of the above.
``pow_tower``            ``a**(2**k)`` in O(sqrt k) ops given a large witness.

All radices are powers of two.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import (
    CoefficientOutOfRange,
    DomainExceeded,
    RadixTooSmall,
    WitnessTooSmall,
)
from .opcore import CountedContext
from .poly import MultiPoly, Poly

__all__ = [
    "radix_bound",
    "PreparedPoly",
    "PreparedMultiPoly",
    "AdaptivePoly",
    "AdaptiveMultiPoly",
    "eval_horner",
    "eval_blocked",
    "default_block_size",
    "prepare",
    "eval_prepared",
    "interpolate",
    "prepare_sequence",
    "prepare_language",
    "decide_finite_language",
    "prepare_multi",
    "eval_multi",
    "prepare_adaptive",
    "eval_adaptive",
    "prepare_adaptive_multi",
    "eval_adaptive_multi",
    "pow_tower",
]


def _signed_abs(ctx: CountedContext, x):
    """``(|x|, x < 0)`` at one cmp plus one sub whatever the sign."""
    if ctx.cmp(x, 0) < 0:
        return ctx.sub(0, x), True
    return ctx.sub(x, 0), False


def _with_sign(ctx: CountedContext, v, negative: bool):
    return ctx.sub(0, v) if negative else ctx.sub(v, 0)


def _pow2_above(bound: int) -> int:
    """Smallest power of two strictly greater than ``bound``."""
    return 1 << max(bound, 0).bit_length()


# ---------------------------------------------------------------------------
# Horner and blocked evaluation


def eval_horner(ctx: CountedContext, p: Poly, x):
    c = p.coeffs
    if not c:
        return 0
    acc = c[-1]
    for ci in reversed(c[:-1]):
        acc = ctx.add(ctx.mul(acc, x), ci)
    return acc


def default_block_size(d: int, P: int, budget: int = 1 << 24) -> int:
    """``max(1, floor(log_P d - log_P log_P d))``, shrunk until ``P**k <= budget``."""
    k = 1
    if d > P:
        L = math.log(d, P)
        if L > 1:
            k = max(1, math.floor(L - math.log(L, P)))
    while k > 1 and P**k > budget:
        k -= 1
    return k


def eval_blocked(ctx: CountedContext, p: Poly, x, k: int | None = None,
                 P: int | None = None, budget: int = 1 << 24):
    """Evaluate ``p`` (coefficients in ``[0, P)``) at ``x`` in O(d / log_P d) ops.

    Every degree-<k polynomial with coefficients below P gets its value at x
    in a table (each entry costs one mul and one add from a shorter entry);
    ``p`` is then Horner-evaluated in ``Y = x**k`` over its k-blocks.
    """
    coeffs = p.coeffs
    if P is None:
        P = max(max(coeffs, default=0) + 1, 2)
    if P < 2:
        raise CoefficientOutOfRange("coefficient bound P must be at least 2")
    for c in coeffs:
        if not 0 <= c < P:
            raise CoefficientOutOfRange(f"coefficient {c} outside [0, {P})")
    if not coeffs:
        return 0
    if k is None:
        k = default_block_size(len(coeffs), P, budget)
    if k < 1:
        raise ValueError("block size k must be positive")

    size = P**k
    table = list(range(P)) + [0] * (size - P)
    for idx in range(P, size):
        # idx = c0 + P * rest  <->  c0 + x * (polynomial encoded by rest)
        table[idx] = ctx.add(ctx.mul(x, table[idx // P]), idx % P)
    Y = x if k == 1 else ctx.mul(x, table[P ** (k - 1)])

    blocks = []
    for start in range(0, len(coeffs), k):
        idx = 0
        for j, c in enumerate(coeffs[start:start + k]):
            idx += c * P**j
        blocks.append(idx)
    acc = table[blocks[-1]]
    for idx in reversed(blocks[:-1]):
        acc = ctx.add(ctx.mul(acc, Y), table[idx])
    return acc


# ---------------------------------------------------------------------------
# Prepared (bounded-domain) evaluation


def radix_bound(d: int, P: int, X: int) -> int:
    """Any radix strictly above ``max(X^d * P, (X^d + 1) * X)`` works."""
    return max(X**d * P, (X**d + 1) * X)


@dataclass(frozen=True)
class PreparedPoly:
    degree: int
    domain: int
    radix: int
    Zd: int
    Zd1: int
    pos: int
    neg: int
    mirror_pos: int
    mirror_neg: int
    divisor: int = 1
    nodes: int | None = None

    def constants(self) -> dict:
        return {"Z": self.radix, "Z^d": self.Zd, "Z^(d+1)": self.Zd1,
                "p+(Z)": self.pos, "p-(Z)": self.neg, "M": self.divisor}


def prepare(p: Poly, X: int, degree: int | None = None, radix: int | None = None,
            divisor: int = 1, nodes: int | None = None) -> PreparedPoly:
    """Precompute ``Z``, ``Z^d``, ``Z^(d+1)`` and the packed ``p+(Z)``, ``p-(Z)``.

    ``radix`` overrides the default (smallest power of two above the bound)
    and is checked against the bound.
    """
    if X < 1:
        raise DomainExceeded("domain bound X must be at least 1")
    d = p.degree if degree is None else degree
    if d < p.degree:
        raise ValueError(f"degree bound {d} below actual degree {p.degree}")
    bound = radix_bound(d, p.norm1, X)
    Z = _pow2_above(bound) if radix is None else radix
    if Z <= bound:
        raise RadixTooSmall(f"radix Z={Z} must exceed max(X^d*P, (X^d+1)*X) = {bound}")
    pos, neg = p.split()
    mpos, mneg = p.mirror().split()
    return PreparedPoly(
        degree=d, domain=X, radix=Z, Zd=Z**d, Zd1=Z ** (d + 1),
        pos=pos.at(Z), neg=neg.at(Z), mirror_pos=mpos.at(Z), mirror_neg=mneg.at(Z),
        divisor=divisor, nodes=nodes,
    )


def _extract(ctx, q, packed, Zd, Z):
    # digit d of q * p(Z) in base Z
    return ctx.rem(ctx.div(ctx.mul(q, packed), Zd), Z)


def eval_prepared(ctx: CountedContext, prep: PreparedPoly, x):
    """``p(x) div M`` for ``|x| <= X`` with a fixed number of model ops."""
    if abs(x) > prep.domain:
        raise DomainExceeded(f"|x| = {abs(x)} exceeds the prepared domain bound X = {prep.domain}")
    ax, negative = _signed_abs(ctx, x)
    pos, neg = (prep.mirror_pos, prep.mirror_neg) if negative else (prep.pos, prep.neg)
    q = ctx.div(prep.Zd1, ctx.sub(prep.radix, ax))
    value = ctx.sub(_extract(ctx, q, pos, prep.Zd, prep.radix),
                    _extract(ctx, q, neg, prep.Zd, prep.radix))
    if prep.divisor != 1:
        mag, vneg = _signed_abs(ctx, value)
        value = _with_sign(ctx, ctx.div(mag, prep.divisor), vneg)
    return value


# ---------------------------------------------------------------------------
# Finite sequences and languages


def _falling_factorial_coeffs(k: int):
    """Integer coefficients of ``n (n-1) ... (n-k+1)``."""
    c = [1]
    for j in range(k):
        nxt = [0] * (len(c) + 1)
        for i, a in enumerate(c):
            nxt[i + 1] += a
            nxt[i] -= j * a
        c = nxt
    return c


def interpolate(ys):
    """Rational coefficients of the degree-<=N polynomial through ``(n, ys[n])``.

    Uses the forward-difference form ``sum_k D^k y_0 * C(n, k)``.
    """
    diffs, row = [], [Fraction(v) for v in ys]
    while row:
        diffs.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    coeffs = [Fraction(0)] * len(ys)
    for k, delta in enumerate(diffs):
        if not delta:
            continue
        scale = delta / math.factorial(k)
        for i, a in enumerate(_falling_factorial_coeffs(k)):
            coeffs[i] += scale * a
    return coeffs


def prepare_sequence(ys) -> PreparedPoly:
    """Constant-op evaluator for ``n -> ys[n]`` on ``0..N``.

    Interpolates exactly, clears denominators with ``M = lcm(...)`` and
    prepares ``M * p``; evaluation divides by M at the end.
    """
    ys = [int(v) for v in ys]
    if not ys:
        raise ValueError("sequence must have at least one term")
    coeffs = interpolate(ys)
    M = 1
    for c in coeffs:
        M = math.lcm(M, c.denominator)
    scaled = Poly(tuple(int(c * M) for c in coeffs))
    N = len(ys) - 1
    return prepare(scaled, max(N, 1), divisor=M, nodes=N)


def prepare_language(members, N: int | None = None) -> PreparedPoly:
    """Prepared characteristic sequence of a finite ``L`` within ``0..N``."""
    members = set(members)
    if any(m < 0 for m in members):
        raise ValueError("language members must be nonnegative")
    if N is None:
        N = max(members, default=0)
    if members and max(members) > N:
        raise DomainExceeded(f"member {max(members)} exceeds N = {N}")
    return prepare_sequence([1 if n in members else 0 for n in range(N + 1)])


def decide_finite_language(ctx: CountedContext, prep: PreparedPoly, n: int) -> bool:
    top = prep.nodes if prep.nodes is not None else prep.domain
    if not 0 <= n <= top:
        raise DomainExceeded(f"query {n} outside 0..{top}")
    return ctx.cmp(eval_prepared(ctx, prep, n), 1) == 0


# ---------------------------------------------------------------------------
# Multivariate prepared evaluation


@dataclass(frozen=True)
class PreparedMultiPoly:
    nvars: int
    d: int
    domain: int
    radix: int
    tower: tuple          # Z^(d^j) for j = 0..n
    top: int              # Z^(d^n - 1)
    variants: dict        # sign tuple -> (packed p+, packed p-)


def _pack_multi(p: MultiPoly, base: int) -> int:
    return sum(c * base ** p.index(e) for e, c in p.terms.items())


def prepare_multi(p: MultiPoly, X: int) -> PreparedMultiPoly:
    """Radix ``Z`` = smallest power of two above ``|p|_1 * d^n * (X+1)^(d^n)``."""
    if X < 1:
        raise DomainExceeded("domain bound X must be at least 1")
    n, d = p.nvars, p.d
    D = d**n
    # d = 1 needs Z > 2X for each floor division to be exact
    Z = _pow2_above(max(max(p.norm1, 1) * D * (X + 1) ** D, X**d + X))
    tower = tuple(Z ** (d**j) for j in range(n + 1))
    variants = {}
    for signs in itertools.product((1, -1), repeat=n):
        pos, neg = p.sign_variant(signs).split()
        variants[signs] = (_pack_multi(pos, Z), _pack_multi(neg, Z))
    return PreparedMultiPoly(n, d, X, Z, tower, Z ** (D - 1), variants)


def _geometric_product(ctx, tower, ax):
    """``prod_k (T_{k+1} div (T_k - x_k))`` = ``sum_i Z^(D-1-idx(i)) * x^i``."""
    G = None
    for k, xk in enumerate(ax):
        F = ctx.div(tower[k + 1], ctx.sub(tower[k], xk))
        G = F if G is None else ctx.mul(G, F)
    return G


def eval_multi(ctx: CountedContext, prep: PreparedMultiPoly, xs):
    xs = list(xs)
    if len(xs) != prep.nvars:
        raise ValueError(f"expected {prep.nvars} arguments, got {len(xs)}")
    if any(abs(v) > prep.domain for v in xs):
        raise DomainExceeded(f"every |x_i| must be <= X = {prep.domain}")
    ax, signs = [], []
    for v in xs:
        a, negative = _signed_abs(ctx, v)
        ax.append(a)
        signs.append(-1 if negative else 1)
    pos, neg = prep.variants[tuple(signs)]
    G = _geometric_product(ctx, prep.tower, ax)
    Z = prep.radix
    return ctx.sub(_extract(ctx, G, pos, prep.top, Z), _extract(ctx, G, neg, prep.top, Z))


# ---------------------------------------------------------------------------
# Adaptive (unbounded-domain) evaluation


@dataclass(frozen=True)
class AdaptivePoly:
    degree: int
    k: int                # Y = 2^k > |p|_1
    Y: int
    Yd1: int              # Y^(d+1)
    pos: int
    neg: int
    mirror_pos: int
    mirror_neg: int


def _mask_exponent(norm: int) -> int:
    return max(norm.bit_length(), 1)


def prepare_adaptive(p: Poly) -> AdaptivePoly:
    """Store ``p+(Y)``, ``p-(Y)`` (and the mirrored pair) for ``Y = 2^k > |p|_1``."""
    k = _mask_exponent(p.norm1)
    Y = 1 << k
    d = p.degree
    pos, neg = p.split()
    mpos, mneg = p.mirror().split()
    return AdaptivePoly(d, k, Y, Y ** (d + 1), pos.at(Y), neg.at(Y), mpos.at(Y), mneg.at(Y))


def _lift_packed(ctx, pY, S, mask):
    # p(Y) * sum Z'^i has p_i * (Z'Y)^i on the mask blocks and junk elsewhere
    return ctx.and_(ctx.mul(pY, S), mask)


def eval_adaptive(ctx: CountedContext, ap: AdaptivePoly, x):
    """Exact ``p(x)`` for any integer ``x`` in O(log d) model ops.

    The radix is ``Z = Z' * Y`` with ``Z' = 2^((d+2) * max(bitlen x, k))``.
    """
    ax, negative = _signed_abs(ctx, x)
    pos, neg = (ap.mirror_pos, ap.mirror_neg) if negative else (ap.pos, ap.neg)
    d = ap.degree
    b = ctx.bitlen(ax)
    if ctx.cmp(b, ap.k) < 0:
        b = ap.k
    Zp = ctx.pow(ctx.pow2(b), d + 2)
    Zp_d1 = ctx.pow(Zp, d + 1)
    S = ctx.div(Zp_d1, ctx.sub(Zp, 1))
    Z = ctx.mul(Zp, ap.Y)
    Zd1 = ctx.mul(Zp_d1, ap.Yd1)
    mask = ctx.mul(ap.Y - 1, ctx.div(Zd1, ctx.sub(Z, 1)))
    Zd = ctx.div(Zd1, Z)
    q = ctx.div(Zd1, ctx.sub(Z, ax))
    hi = _extract(ctx, q, _lift_packed(ctx, pos, S, mask), Zd, Z)
    lo = _extract(ctx, q, _lift_packed(ctx, neg, S, mask), Zd, Z)
    return ctx.sub(hi, lo)


@dataclass(frozen=True)
class AdaptiveMultiPoly:
    nvars: int
    d: int
    k: int
    Y: int
    YD: int               # Y^(d^n)
    variants: dict        # sign tuple -> (p+(Y, Y^d, ...), p-(Y, Y^d, ...))


def prepare_adaptive_multi(p: MultiPoly) -> AdaptiveMultiPoly:
    k = _mask_exponent(p.norm1)
    Y = 1 << k
    variants = {}
    for signs in itertools.product((1, -1), repeat=p.nvars):
        pos, neg = p.sign_variant(signs).split()
        variants[signs] = (_pack_multi(pos, Y), _pack_multi(neg, Y))
    return AdaptiveMultiPoly(p.nvars, p.d, k, Y, Y ** (p.d**p.nvars), variants)


def eval_adaptive_multi(ctx: CountedContext, ap: AdaptiveMultiPoly, xs):
    """Exact multivariate evaluation on all of Z^n in O(n log d) model ops."""
    xs = list(xs)
    if len(xs) != ap.nvars:
        raise ValueError(f"expected {ap.nvars} arguments, got {len(xs)}")
    n, d = ap.nvars, ap.d
    D = d**n
    ax, signs = [], []
    b = ap.k
    for v in xs:
        a, negative = _signed_abs(ctx, v)
        ax.append(a)
        signs.append(-1 if negative else 1)
        bl = ctx.bitlen(a)
        if ctx.cmp(bl, b) > 0:
            b = bl
    pos, neg = ap.variants[tuple(signs)]
    Zp = ctx.pow(ctx.pow2(b), D)
    ZpD = ctx.pow(Zp, D)
    S = ctx.div(ZpD, ctx.sub(Zp, 1))
    Z = ctx.mul(Zp, ap.Y)
    ZD = ctx.mul(ZpD, ap.YD)
    mask = ctx.mul(ap.Y - 1, ctx.div(ZD, ctx.sub(Z, 1)))
    tower = [Z]
    for _ in range(n):
        tower.append(ctx.pow(tower[-1], d))
    top = ctx.div(ZD, Z)
    G = _geometric_product(ctx, tower, ax)
    hi = _extract(ctx, G, _lift_packed(ctx, pos, S, mask), top, Z)
    lo = _extract(ctx, G, _lift_packed(ctx, neg, S, mask), top, Z)
    return ctx.sub(hi, lo)


# ---------------------------------------------------------------------------
# Power tower


def pow_tower(ctx: CountedContext, a: int, k: int, b: int) -> int:
    """``a**(2**k)`` in O(sqrt k) ops, given a witness ``b >= 2 * a**(2**k)``.

    With ``l = ceil(sqrt k)`` and ``c = b**(2**l)`` computed once, each step
    ``cur -> c rem (b - cur)`` raises ``cur`` to the ``2**l``-th power
    because ``b = cur (mod b - cur)``.  Leftover exponent is closed by squaring.
    """
    if a < 0 or k < 0:
        raise ValueError("need a >= 0 and k >= 0")
    if a in (0, 1) or k == 0:
        return a
    step = isqrt(k - 1) + 1
    c = b
    for _ in range(step):
        c = ctx.square(c)
    cur, done = a, 0
    while done + step <= k:
        modulus = ctx.sub(b, cur)
        if modulus <= cur:
            raise WitnessTooSmall(f"witness b={b} is not above the running power (step {done // step + 1})")
        nxt = ctx.rem(c, modulus)
        lo = (cur.bit_length() - 1) * (1 << step) + 1
        hi = cur.bit_length() << step
        if not (nxt > cur and lo <= nxt.bit_length() <= hi):
            raise WitnessTooSmall(f"remainder inconsistent with a 2^{step}-th power at step "
                                  f"{done // step + 1}: need b >= 2*a^(2^k)")
        cur, done = nxt, done + step
    while done < k:
        cur = ctx.square(cur)
        done += 1
    return cur
