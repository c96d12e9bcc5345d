"""Radix-Z digit packing and word-parallel (SWAR) comparisons.

Everything here is the machinery the fast algorithms share: the geometric
series obtained from a single division, packing a vector into one
integer, per-slot ``>=`` masks and the linear-op 3SUM decision.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DigitOverflow, RadixTooSmall, SlotOverflow
from .opcore import CountedContext

__all__ = [
    "PackedVec",
    "geom_series",
    "geom_series_from_power",
    "pack",
    "unpack",
    "ones",
    "high_bits",
    "ge_mask",
    "exists_equal",
    "all_pairwise_sums",
    "threesum_packed",
    "threesum_slot_width",
]


@dataclass(frozen=True)
class PackedVec:
    radix: int
    length: int
    value: int

    def digits(self):
        """Uncounted decode, for display and tests."""
        out, v = [], self.value
        for _ in range(self.length):
            v, r = divmod(v, self.radix)
            out.append(r)
        return out


def geom_series(ctx: CountedContext, Z: int, x: int, d: int) -> int:
    """``Z**d + Z**(d-1)*x + ... + x**d`` as ``Z**(d+1) div (Z - x)``.

    Requires ``Z > (x**d + 1) * x`` so the tail of the infinite series
    stays below one.
    """
    if x < 0 or d < 0:
        raise RadixTooSmall("geom_series needs x >= 0 and d >= 0")
    if not Z > (x**d + 1) * x:
        raise RadixTooSmall(f"radix Z={Z} must exceed (x^d+1)*x = {(x**d + 1) * x}")
    return ctx.div(ctx.pow(Z, d + 1), ctx.sub(Z, x))


def geom_series_from_power(ctx: CountedContext, Z: int, Zd1: int, x: int) -> int:
    """Same identity when ``Z**(d+1)`` is already known (no check)."""
    return ctx.div(Zd1, ctx.sub(Z, x))


def pack(ctx: CountedContext, digits, Z: int) -> PackedVec:
    """``sum(digits[i] * Z**i)``, built Horner-style from the top digit."""
    digits = list(digits)
    for dgt in digits:
        if not 0 <= dgt < Z:
            raise DigitOverflow(f"digit {dgt} outside [0, {Z})")
    value = 0
    for i, dgt in enumerate(reversed(digits)):
        value = dgt if i == 0 else ctx.add(ctx.mul(value, Z), dgt)
    return PackedVec(Z, len(digits), value)


def unpack(ctx: CountedContext, v: PackedVec) -> list:
    out, rest = [], v.value
    for _ in range(v.length):
        rest, r = ctx.div_rem(rest, v.radix)
        out.append(r)
    return out


def ones(ctx: CountedContext, t: int, N: int) -> int:
    """Replicating constant ``sum_{s<N} 2**(t*s)`` = ``(2**(tN)-1) div (2**t-1)``."""
    if N == 0:
        return 0
    if t == 1:
        return ctx.sub(ctx.pow2(N), 1)
    return geom_series(ctx, ctx.pow2(t), 1, N - 1)


def high_bits(ctx: CountedContext, t: int, N: int) -> int:
    """``C = sum_i 2**(t-1+t*i)``: the top bit of every slot."""
    return ctx.shl(ones(ctx, t, N), t - 1)


def _check_slots(A, t, N, C):
    if A < 0 or A >> (t * N) or A & C:
        raise SlotOverflow(f"every slot must hold a value < 2^{t - 1} (t={t}, N={N})")


def ge_mask(ctx: CountedContext, A: int, B: int, t: int, N: int, high=None) -> int:
    """``(A + C - B) & C``: bit ``t-1+t*i`` set iff slot i of A >= slot i of B."""
    if t < 2:
        raise SlotOverflow("slot width t must be at least 2")
    C = high_bits(ctx, t, N) if high is None else high
    _check_slots(A, t, N, C)
    _check_slots(B, t, N, C)
    return ctx.and_(ctx.sub(ctx.add(A, C), B), C)


def exists_equal(ctx: CountedContext, A: int, B: int, t: int, N: int, high=None) -> bool:
    """True iff some slot holds the same value in A and B; O(1) model ops."""
    C = high_bits(ctx, t, N) if high is None else high
    both = ctx.and_(ge_mask(ctx, A, B, t, N, C), ge_mask(ctx, B, A, t, N, C))
    return ctx.cmp(both, 0) != 0


def all_pairwise_sums(ctx: CountedContext, x, y, t: int) -> PackedVec:
    """Slot ``i + n*j`` holds ``x[i] + y[j]`` (``n = len(x)``); O(n) model ops.

    Built as ``X * sum_j 2^(t n j) + Y * sum_i 2^(t i)`` where X packs x at
    width t and Y packs y at width ``t*n``.
    """
    n, m = len(x), len(y)
    if n == 0 or m == 0:
        return PackedVec(1 << t, 0, 0)
    limit = 1 << (t - 1)
    if min(x) < 0 or min(y) < 0 or max(x) + max(y) >= limit:
        raise SlotOverflow(f"pairwise sums must lie in [0, 2^{t - 1})")
    X = pack(ctx, x, 1 << t).value
    Y = pack(ctx, y, 1 << (t * n)).value
    inner = ones(ctx, t, n)
    outer = ones(ctx, t * n, m)
    S = ctx.add(ctx.mul(X, outer), ctx.mul(Y, inner))
    return PackedVec(1 << t, n * m, S)


def threesum_slot_width(x, y, z) -> int:
    """Slot width with headroom: ``bitlen(max value) + 2``."""
    top = max([max(x, default=0) + max(y, default=0)] + list(z) + [0])
    return top.bit_length() + 2


def threesum_packed(ctx: CountedContext, x, y, z, t: int | None = None) -> bool:
    """Decide whether ``x[i] + y[j] == z[k]`` for some i, j, k in O(n) ops.

    Negative inputs are shifted to the nonnegative range first
    (``x+m``, ``y+m``, ``z+2m``), which preserves every equation.
    """
    x, y, z = list(x), list(y), list(z)
    if not (x and y and z):
        return False
    low = min(x + y + z)
    if low < 0:
        x = [v - low for v in x]
        y = [v - low for v in y]
        z = [v - 2 * low for v in z]
    if t is None:
        t = threesum_slot_width(x, y, z)
    if max(z) >= 1 << (t - 1):
        raise SlotOverflow(f"z values must lie in [0, 2^{t - 1})")
    S = all_pairwise_sums(ctx, x, y, t)
    N = S.length
    rep = ones(ctx, t, N)
    C = ctx.shl(rep, t - 1)
    for zk in z:
        if exists_equal(ctx, S.value, ctx.mul(zk, rep), t, N, C):
            return True
    return False
