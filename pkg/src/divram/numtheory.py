"""Number-theoretic constructions over the counted integer model.

Chinese remaindering and gcd floor points over coprime families; Wilson and
randomized prime search; exact Newton refinement of algebraic numbers and
Mills-prime extraction by interval powering; the fixed-point encoding of
the values ``p(Y * 2^n)`` and linear recurrences of ``p(c^n)``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .errors import (
    AttemptsExhausted,
    CoefficientOutOfRange,
    IndexOutOfRange,
    NoConvergence,
    NotCoprime,
    PrecisionInsufficient,
    ScaleExceeded,
)
from .opcore import CountedContext
from .poly import Poly

__all__ = [
    "Congruence",
    "smod",
    "crt_pair",
    "crt_tree",
    "crt_fold",
    "coprime_chain",
    "primes_from",
    "gcd_floor_point",
    "verify_gcd_floor",
    "wilson_is_prime",
    "wilson_scan",
    "is_probable_prime",
    "find_prime_above",
    "newton_approx",
    "certify_root_interval",
    "MILLS_THETA",
    "MILLS_ERROR",
    "mills_floor",
    "RhoCode",
    "rho_encode",
    "rho_extract",
    "find_recurrence",
]

SCALE_LIMIT = 10**6
CHAIN_LIMIT = 6


@dataclass(frozen=True)
class Congruence:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")


def _congruence(c) -> Congruence:
    return c if isinstance(c, Congruence) else Congruence(int(c[0]), int(c[1]))


# ---------------------------------------------------------------------------
# Chinese remaindering


def smod(ctx: CountedContext, a: int, m: int) -> int:
    """Least nonnegative residue of a signed ``a`` using nonnegative rem."""
    if ctx.cmp(a, 0) >= 0:
        return ctx.rem(a, m)
    r = ctx.rem(ctx.sub(0, a), m)
    return ctx.sub(m, r) if r else 0


def crt_pair(ctx: CountedContext, c1, c2):
    """``(x, m1*m2)`` with ``x = a_i (mod m_i)``, ``0 <= x < m1*m2``; one gcdex."""
    c1, c2 = _congruence(c1), _congruence(c2)
    m1, m2 = c1.modulus, c2.modulus
    g, s, _ = ctx.gcdex(m1, m2)
    if g != 1:
        raise NotCoprime(f"moduli {m1} and {m2} share the factor {g}", pair=(m1, m2))
    a1 = smod(ctx, c1.residue, m1)
    a2 = smod(ctx, c2.residue, m2)
    # s * m1 = 1 (mod m2)
    t = smod(ctx, ctx.mul(ctx.sub(a2, a1), s), m2)
    return ctx.add(a1, ctx.mul(m1, t)), ctx.mul(m1, m2)


def crt_tree(ctx: CountedContext, congruences):
    """Solve a pairwise-coprime system by merging neighbours level by level.

    Exactly ``n - 1`` gcdex calls.  ``NotCoprime.pair`` names two original
    moduli that are not coprime.
    """
    nodes = [(_congruence(c), [i]) for i, c in enumerate(congruences)]
    if not nodes:
        raise ValueError("need at least one congruence")
    originals = [c.modulus for c, _ in nodes]
    if len(nodes) == 1:
        c = nodes[0][0]
        return smod(ctx, c.residue, c.modulus), c.modulus
    while len(nodes) > 1:
        merged = []
        for left, right in itertools.zip_longest(nodes[0::2], nodes[1::2]):
            if right is None:
                merged.append(left)
                continue
            try:
                x, m = crt_pair(ctx, left[0], right[0])
            except NotCoprime:
                i, j = next((i, j) for i in left[1] for j in right[1]
                            if math.gcd(originals[i], originals[j]) != 1)
                raise NotCoprime(f"moduli #{i} ({originals[i]}) and #{j} ({originals[j]}) "
                                 f"are not coprime", pair=(i, j)) from None
            merged.append((Congruence(x, m), left[1] + right[1]))
        nodes = merged
    c = nodes[0][0]
    return c.residue, c.modulus


def crt_fold(ctx: CountedContext, congruences):
    """Sequential left fold of ``crt_pair`` (reference for ``crt_tree``)."""
    it = iter(congruences)
    acc = _congruence(next(it))
    acc = Congruence(smod(ctx, acc.residue, acc.modulus), acc.modulus)
    for c in it:
        acc = Congruence(*crt_pair(ctx, acc, c))
    return acc.residue, acc.modulus


# ---------------------------------------------------------------------------
# Coprime families and gcd floor points


def coprime_chain(ctx: CountedContext, r: int, count: int):
    """``r, r+1, r(r+1)+1, ...``: each term is the product of all earlier ones plus 1."""
    if r < 2 or count < 1:
        raise ValueError("need r >= 2 and count >= 1")
    out = [r]
    prod = r
    if count > 1:
        out.append(ctx.add(r, 1))
        prod = ctx.mul(prod, out[-1])
    while len(out) < count:
        out.append(ctx.add(prod, 1))
        prod = ctx.mul(prod, out[-1])
    return out


def _sieve(limit: int):
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = bytearray(len(flags[p * p::p]))
    return [i for i, f in enumerate(flags) if f]


def primes_from(r: int, count: int):
    """The first ``count`` primes that are ``>= r`` (segmented sieve from r)."""
    out, lo = [], max(r, 2)
    width = max(64, 32 * count)
    while len(out) < count:
        hi = lo + width
        flags = bytearray([1]) * width
        for p in _sieve(math.isqrt(hi)):
            start = max(p * p, -(-lo // p) * p)
            flags[start - lo::p] = bytearray(len(flags[start - lo::p]))
        out.extend(lo + i for i, f in enumerate(flags) if f)
        lo = hi
    return out[:count]


def gcd_floor_point(ctx: CountedContext, d: int, r: int, s: int, source: str = "primes"):
    """``x`` with ``gcd(x_1 + v_1, ..., x_d + v_d) >= r`` for every ``v`` in ``{0..s-1}^d``.

    Each offset vector v gets its own modulus ``p_v >= r`` (pairwise
    coprime); ``x_i`` is the CRT solution of ``x_i = -j (mod u_ij)`` where
    ``u_ij`` multiplies the ``p_v`` with ``v_i = j``.  Then ``p_v`` divides
    every ``x_i + v_i``.
    """
    if d < 1 or s < 1 or r < 1:
        raise ValueError("need d, s, r >= 1")
    count = s**d
    if count > SCALE_LIMIT:
        raise ScaleExceeded(f"s^d = {count} offsets exceeds the desk limit {SCALE_LIMIT}")
    if source == "primes":
        moduli = primes_from(max(r, 2), count)
    elif source == "chain":
        if count > CHAIN_LIMIT:
            raise ScaleExceeded(f"chain source limited to s^d <= {CHAIN_LIMIT}, got {count}")
        moduli = coprime_chain(ctx, max(r, 2), count)
    else:
        raise ValueError(f"unknown modulus source {source!r}")
    offsets = list(itertools.product(range(s), repeat=d))
    xs = []
    for i in range(d):
        system = []
        for j in range(s):
            u = 1
            for v, p in zip(offsets, moduli):
                if v[i] == j:
                    u = ctx.mul(u, p)
            system.append(Congruence(-j, u))
        x, U = crt_tree(ctx, system)
        # a zero coordinate would make gcd(0, ...) vacuous; U is congruent too
        xs.append(x if x else U)
    return xs


def verify_gcd_floor(xs, r: int, s: int) -> bool:
    """Exhaustive check of the gcd bound over all ``s^len(xs)`` offsets."""
    xs = [gmpy2.mpz(x) for x in xs]
    for off in itertools.product(range(s), repeat=len(xs)):
        g = xs[0] + off[0]
        for x, v in zip(xs[1:], off[1:]):
            g = gmpy2.gcd(g, x + v)
        if g < r:
            return False
    return True


# ---------------------------------------------------------------------------
# Primality


def wilson_is_prime(ctx: CountedContext, n: int) -> bool:
    """``(n-1)! = n-1 (mod n)``, reducing the factorial modulo n as it grows."""
    if n > SCALE_LIMIT:
        raise ScaleExceeded(f"Wilson test limited to n <= {SCALE_LIMIT}")
    if n < 2:
        return False
    f = 1
    for i in range(2, n):
        f = ctx.rem(ctx.mul(f, i), n)
    return ctx.cmp(f, n - 1) == 0


def wilson_scan(ctx: CountedContext, N: int):
    """Wilson verdicts for ``2..N`` from one running factorial.

    Adjacent factorials differ by one multiplication, so each verdict costs
    one mul and one rem.
    """
    if N > SCALE_LIMIT:
        raise ScaleExceeded(f"Wilson scan limited to N <= {SCALE_LIMIT}")
    out, f = {}, 1
    for n in range(2, N + 1):
        if n > 2:
            f = ctx.mul(f, n - 1)
        out[n] = ctx.cmp(ctx.rem(f, n), n - 1) == 0
    return out


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
                 67, 71, 73, 79, 83, 89, 97)
# prime bases 2..41 are deterministic below 3.3e24; 2..37 only below 3.2e23
_MR_BASES = _SMALL_PRIMES[:13]
_MR_LIMIT = 3317044064679887385961981


def _powmod(ctx, b, e, m):
    result = 1
    for bit in bin(e)[2:]:
        result = ctx.rem(ctx.mul(result, result), m)
        if bit == "1":
            result = ctx.rem(ctx.mul(result, b), m)
    return result


def is_probable_prime(ctx: CountedContext, n: int) -> bool:
    """Strong-pseudoprime test; deterministic below ``3.3e24``.

    Above that all 25 bases below 100 are used.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if ctx.rem(n, p) == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES if n < _MR_LIMIT else _SMALL_PRIMES
    for a in bases:
        x = _powmod(ctx, a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = ctx.rem(ctx.mul(x, x), n)
            if x == n - 1:
                break
        else:
            return False
    return True


def find_prime_above(ctx: CountedContext, N: int, rng: random.Random | None = None,
                     max_attempts: int | None = None, info: dict | None = None) -> int:
    """A prime in ``[N, 2N + K]`` with ``K = 2 bitlen(N)``.

    Each attempt draws ``M`` uniformly from ``[0, N]`` and scans the window
    ``N+M .. N+M+K``.  ``info`` (if given) receives the attempt count.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    rng = rng or random.Random()
    bits = ctx.bitlen(N)
    K = 2 * bits
    attempts = max_attempts if max_attempts is not None else 4 * bits
    for attempt in range(1, attempts + 1):
        start = ctx.add(N, rng.randint(0, N))
        for offset in range(K + 1):
            cand = ctx.add(start, offset)
            if is_probable_prime(ctx, cand):
                if info is not None:
                    info["attempts"] = attempt
                    info["window_start"] = start
                return cand
    raise AttemptsExhausted(f"no prime found in {attempts} windows of length {K + 1} above {N}")


# ---------------------------------------------------------------------------
# Newton refinement and Mills primes


def _hom_eval(ctx, coeffs, u, v):
    """``v^deg * q(u/v)`` for integer coefficients, homogeneous Horner."""
    if not coeffs:
        return 0
    acc, vpow = coeffs[-1], 1
    for c in reversed(coeffs[:-1]):
        vpow = ctx.mul(vpow, v)
        acc = ctx.add(ctx.mul(acc, u), ctx.mul(c, vpow))
    return acc


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def certify_root_interval(q: Poly, x: Fraction, n: int) -> bool:
    """True iff q vanishes at x or changes sign on ``[x - 2^-n, x + 2^-n]``."""
    eps = Fraction(1, 1 << n)
    lo, hi = q.at(x - eps), q.at(x + eps)
    return q.at(x) == 0 or _sign(lo) * _sign(hi) <= 0


def newton_approx(ctx: CountedContext, q: Poly, n: int, seed=(1, 2),
                  max_iter: int | None = None, info: dict | None = None) -> Fraction:
    """Rational ``u/v`` within ``2^-n`` of the root of q bracketed by ``seed``.

    Newton steps in homogeneous integer form (``u' = u Q' - Q``,
    ``v' = v Q'`` with ``Q = v^deg q(u/v)`` and ``Q' = v^(deg-1) q'(u/v)``),
    falling back to bisection whenever a step leaves the bracket.  Stops
    once q changes sign across ``u/v +- 2^-n``.
    """
    coeffs = q.coeffs
    if len(coeffs) < 2:
        raise NoConvergence("q must have positive degree")
    if len(coeffs) == 2:
        return Fraction(-coeffs[0], coeffs[1])
    dcoeffs = tuple(i * c for i, c in enumerate(coeffs) if i)
    lo, hi = Fraction(seed[0]), Fraction(seed[1])
    if lo > hi:
        lo, hi = hi, lo
    s_lo, s_hi = _sign(q.at(lo)), _sign(q.at(hi))
    if s_lo == 0:
        return lo
    if s_hi == 0:
        return hi
    if s_lo == s_hi:
        raise NoConvergence(f"q has no sign change on the seed bracket [{lo}, {hi}]")
    if max_iter is None:
        max_iter = 8 * (n.bit_length() + 1) + 64
    mid = (lo + hi) / 2
    u, v = mid.numerator, mid.denominator
    for it in range(1, max_iter + 1):
        Q = _hom_eval(ctx, coeffs, u, v)
        s_x = _sign(Q)
        # certificate: sign change across u/v -+ 2^-n
        un = ctx.shl(u, n)
        s_minus = _sign(_hom_eval(ctx, coeffs, ctx.sub(un, v), ctx.shl(v, n)))
        s_plus = _sign(_hom_eval(ctx, coeffs, ctx.add(un, v), ctx.shl(v, n)))
        if s_x == 0 or s_minus * s_plus <= 0:
            if info is not None:
                info["iterations"] = it
            return Fraction(u, v)
        x = Fraction(u, v)
        if s_x == s_lo:
            lo = x
        else:
            hi = x
        Qd = _hom_eval(ctx, dcoeffs, u, v)
        stepped = None
        if Qd != 0:
            nu, nv = ctx.sub(ctx.mul(u, Qd), Q), ctx.mul(v, Qd)
            if nv < 0:
                nu, nv = -nu, -nv
            g = ctx.gcd(abs(nu), nv)
            nu, nv = ctx.div(nu, g) if nu >= 0 else -ctx.div(-nu, g), ctx.div(nv, g)
            cand = Fraction(nu, nv)
            if lo < cand < hi:
                stepped = cand
        if stepped is None:
            stepped = (lo + hi) / 2
        u, v = stepped.numerator, stepped.denominator
    raise NoConvergence(f"no certified approximation after {max_iter} iterations")


MILLS_THETA = Fraction("1.30637788386308069046861449260")
MILLS_ERROR = Fraction(1, 10**29)


def mills_floor(ctx: CountedContext, n: int, theta: Fraction = MILLS_THETA,
                e: Fraction = MILLS_ERROR) -> int:
    """``floor(theta^(3^n))`` certified over the whole interval ``[theta - e, theta + e]``."""
    if n < 0:
        raise ValueError("need n >= 0")
    E = 3**n
    lo, hi = Fraction(theta) - e, Fraction(theta) + e
    if lo <= 0:
        raise PrecisionInsufficient("interval must be positive")
    floors = []
    for bound in (lo, hi):
        num = ctx.pow(bound.numerator, E)
        den = ctx.pow(bound.denominator, E)
        floors.append(ctx.div(num, den))
    if floors[0] != floors[1]:
        raise PrecisionInsufficient(
            f"theta^(3^{n}) straddles an integer for theta +- {float(e):.3g}; "
            f"floors {floors[0]} and {floors[1]} differ")
    return floors[0]


# ---------------------------------------------------------------------------
# Fixed-point encoding of p(Y * 2^n)


@dataclass(frozen=True)
class RhoCode:
    poly: Poly
    k: int            # Y = 2^k > |p|_1
    d: int            # d > deg p
    K: int            # k (d + 1)
    m: int            # last stored index
    R: int            # sum_n p(Z_n) 2^(off(m) - off(n))

    def offset(self, n: int) -> int:
        return n * (self.K + self.d * n)


def rho_encode(p: Poly, m: int) -> RhoCode:
    """Scaled integer holding ``p(Y 2^n)`` in a ``K + dn``-bit block for ``n <= m``.

    Blocks are disjoint because ``p(Z_n) < 2^(K+dn)``, so extraction never
    sees a carry.
    """
    if any(c < 0 for c in p.coeffs):
        raise CoefficientOutOfRange("rho encoding needs nonnegative coefficients")
    if m < 0:
        raise IndexOutOfRange("term count must be nonnegative")
    k = p.norm1.bit_length() if p.norm1 else 0
    d = p.degree + 1
    K = k * (d + 1)
    code = RhoCode(p, k, d, K, m, 0)
    top = code.offset(m)
    R = sum(p.at((1 << k) << n) << (top - code.offset(n)) for n in range(m + 1))
    return RhoCode(p, k, d, K, m, R)


def rho_extract(ctx: CountedContext, code: RhoCode, n: int) -> int:
    """``p(Z_n)`` as ``(R div 2^(off(m) - off(n))) rem 2^(K + dn)``."""
    if not 0 <= n <= code.m:
        raise IndexOutOfRange(f"index {n} outside 0..{code.m}")
    shifted = ctx.shr(code.R, code.offset(code.m) - code.offset(n))
    return ctx.rem(shifted, ctx.pow2(code.K + code.d * n))


# ---------------------------------------------------------------------------
# Recurrences of p(c^n)


def _nullvector(columns):
    """A nonzero rational null vector of the matrix with these columns, or None."""
    rows = len(columns[0])
    ncols = len(columns)
    M = [[Fraction(columns[j][i]) for j in range(ncols)] for i in range(rows)]
    pivots, r = [], 0
    for c in range(ncols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    free = next((c for c in range(ncols) if c not in pivots), None)
    if free is None:
        return None
    vec = [Fraction(0)] * ncols
    vec[free] = Fraction(1)
    for row, c in enumerate(pivots):
        vec[c] = -M[row][free]
    return vec


def find_recurrence(p: Poly, c: int):
    """``(a_0, ..., a_d)`` with ``a_0 p(c^(n+1)) = sum_i a_i p(c^(n+1-i))``.

    ``d = deg p + 1``.  The polynomials ``p(cx), p(x), p(x/c), ...`` all lie
    in the span of the monomials present in p, so the shortest dependent
    prefix gives the relation; its ``p(cx)`` coefficient is nonzero because
    the rest of the prefix is independent.
    """
    if p.is_zero():
        raise ValueError("p must be nonzero")
    if c < 2:
        raise ValueError("need c >= 2")
    d = p.degree + 1
    c = Fraction(c)

    def family(i):
        scale = c if i == 0 else c ** (1 - i)
        return [p.coeff(j) * scale**j for j in range(d)]

    cols = [family(0)]
    for i in range(1, d + 1):
        cols.append(family(i))
        vec = _nullvector(cols)
        if vec is not None:
            break
    else:  # pragma: no cover - d+1 vectors in a d-dim space are dependent
        raise AssertionError("no dependency found")
    lcm = 1
    for v in vec:
        lcm = math.lcm(lcm, v.denominator)
    ints = [int(v * lcm) for v in vec]
    g = math.gcd(*ints)
    ints = [v // g for v in ints]
    if ints[0] < 0:
        ints = [-v for v in ints]
    # q_0 P_0 + q_1 P_1 + ... = 0  ->  a_0 = q_0, a_i = -q_i
    coeffs = [ints[0]] + [-v for v in ints[1:]]
    return tuple(coeffs + [0] * (d + 1 - len(coeffs)))
