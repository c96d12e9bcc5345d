"""Integer matrices: packed products and permanents, plus powering by gcd congruences.

The packed product encodes A row-wise and B column-wise as radix-Z
integers so that one big multiplication lays every inner product on its own
digit.  The permanent uses the same idea with one variable per column.
``matpow_tower`` raises a matrix to ``2**k`` in O(sqrt k) packed products
given a large witness matrix B, by reducing ``B^(2^l)`` modulo the gcd of
``B - current``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from math import isqrt

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    TooLarge,
    WitnessInsufficient,
    ZeroModulus,
)
from .opcore import CountedContext, format_int, parse_int

__all__ = [
    "IntMat",
    "MatModulus",
    "matmul_naive",
    "matmul_packed",
    "matpow_naive",
    "permanent_naive",
    "permanent_packed",
    "det_bareiss",
    "det_cofactor",
    "mat_gcd",
    "mat_rem",
    "matpow_tower",
    "witness_bounds",
    "make_power_witness_oracle",
]


class IntMat:
    """Immutable dense integer matrix."""

    __slots__ = ("_rows",)

    def __init__(self, rows):
        rows = tuple(tuple(parse_int(v) for v in r) for r in rows)
        if not rows or not rows[0]:
            raise DimensionMismatch("matrix dimensions must be positive")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("matrix rows have unequal lengths")
        self._rows = rows

    @classmethod
    def identity(cls, n: int) -> "IntMat":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "IntMat":
        return cls([[0] * c for _ in range(r)])

    @property
    def rows(self) -> int:
        return len(self._rows)

    @property
    def cols(self) -> int:
        return len(self._rows[0])

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def row(self, i):
        return self._rows[i]

    def entries(self):
        return (v for r in self._rows for v in r)

    def max_abs(self) -> int:
        return max(abs(v) for v in self.entries())

    def tolist(self):
        return [list(r) for r in self._rows]

    def __eq__(self, other):
        if isinstance(other, IntMat):
            return self._rows == other._rows
        return NotImplemented

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"IntMat({self.tolist()!r})"

    def to_json(self) -> str:
        return json.dumps([[format_int(v) for v in r] for r in self._rows])

    @classmethod
    def from_json(cls, text) -> "IntMat":
        data = json.loads(text) if isinstance(text, str) else text
        return cls(data)


def _as_mat(A) -> IntMat:
    return A if isinstance(A, IntMat) else IntMat(A)


def _signed_div(ctx: CountedContext, a, b):
    """Exact quotient of signed integers via nonnegative div."""
    neg = (a < 0) != (b < 0)
    q = ctx.div(abs(a), abs(b))
    return ctx.sub(0, q) if neg else q


# ---------------------------------------------------------------------------
# Products


def matmul_naive(ctx: CountedContext, A, B) -> IntMat:
    A, B = _as_mat(A), _as_mat(B)
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    out = []
    for i in range(A.rows):
        row = []
        for j in range(B.cols):
            acc = ctx.mul(A[i, 0], B[0, j])
            for l in range(1, A.cols):
                acc = ctx.add(acc, ctx.mul(A[i, l], B[l, j]))
            row.append(acc)
        out.append(row)
    return IntMat(out)


def matpow_naive(ctx: CountedContext, A, k: int) -> IntMat:
    """``A^(2^k)`` by k naive squarings (oracle)."""
    A = _as_mat(A)
    for _ in range(k):
        A = matmul_naive(ctx, A, A)
    return A


def _pack_rows(ctx, M, Z, Zrow, high_first):
    """Horner-pack every row of M into one integer, rows ``Zrow`` apart.

    Within a row, ``M[i][0]`` lands on the highest digit if ``high_first``
    and on ``Z^0`` otherwise.
    """
    acc = 0
    for i in reversed(range(len(M))):
        row = M[i] if high_first else M[i][::-1]
        packed = 0
        for t, v in enumerate(row):
            packed = v if t == 0 else ctx.add(ctx.mul(packed, Z), v)
        acc = packed if i == len(M) - 1 else ctx.add(ctx.mul(acc, Zrow), packed)
    return acc


def _decode(ctx, gamma, k, m, n, Z, Zn1, Z2n, Zrow):
    out = []
    rest = gamma
    for _ in range(k):
        rest, block = ctx.div_rem(rest, Zrow)
        row = []
        for _ in range(m):
            block, window = ctx.div_rem(block, Z2n)
            row.append(ctx.rem(ctx.div(window, Zn1), Z))
        out.append(row)
    return out


def matmul_packed(ctx: CountedContext, A, B) -> IntMat:
    """Exact ``A @ B`` in O((k+m) n) packing ops plus O(km) digit extraction.

    ``alpha`` puts ``a[i][l]`` at digit ``l + 2nm*i`` and ``beta`` puts
    ``b[l][j]`` at digit ``(n-1-l) + 2n*j``; in ``alpha * beta`` digit
    ``(n-1) + 2n*j + 2nm*i`` is then exactly ``c[i][j]``.  Signed inputs
    are split into nonnegative parts.
    """
    A, B = _as_mat(A), _as_mat(B)
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    k, n, m = A.rows, A.cols, B.cols
    bound = ctx.add(ctx.mul(ctx.mul(n, A.max_abs()), B.max_abs()), 1)
    Z = ctx.pow2(ctx.bitlen(bound))
    Zn1 = ctx.pow(Z, n - 1)
    Z2n = ctx.pow(Z, 2 * n)
    Zrow = ctx.pow(Z2n, m)

    def parts(M):
        pos = [[max(v, 0) for v in r] for r in M.tolist()]
        neg = [[max(-v, 0) for v in r] for r in M.tolist()]
        return pos, (neg if any(any(r) for r in neg) else None)

    Ap, An = parts(A)
    Bp, Bn = parts(B)
    Bt = lambda M: [list(c) for c in zip(*M)]  # noqa: E731
    alpha = [_pack_rows(ctx, Ap, Z, Zrow, False)]
    beta = [_pack_rows(ctx, Bt(Bp), Z, Z2n, True)]
    alpha.append(_pack_rows(ctx, An, Z, Zrow, False) if An else None)
    beta.append(_pack_rows(ctx, Bt(Bn), Z, Z2n, True) if Bn else None)

    def product(a, b):
        return None if a is None or b is None else ctx.mul(a, b)

    def total(x, y):
        if x is None:
            return y
        return x if y is None else ctx.add(x, y)

    gp = total(product(alpha[0], beta[0]), product(alpha[1], beta[1]))
    gn = total(product(alpha[0], beta[1]), product(alpha[1], beta[0]))
    C = _decode(ctx, gp, k, m, n, Z, Zn1, Z2n, Zrow)
    if gn is not None:
        Cn = _decode(ctx, gn, k, m, n, Z, Zn1, Z2n, Zrow)
        C = [[ctx.sub(x, y) for x, y in zip(r, s)] for r, s in zip(C, Cn)]
    return IntMat(C)


# ---------------------------------------------------------------------------
# Permanent and determinant


def permanent_naive(ctx: CountedContext, A) -> int:
    A = _as_mat(A)
    n = A.rows
    if A.cols != n:
        raise DimensionMismatch("permanent needs a square matrix")
    if n > 9:
        raise TooLarge(f"naive permanent limited to n <= 9, got {n}")
    total = 0
    for perm in itertools.permutations(range(n)):
        term = A[0, perm[0]]
        for i in range(1, n):
            term = ctx.mul(term, A[i, perm[i]])
        total = ctx.add(total, term)
    return total


def permanent_packed(ctx: CountedContext, A) -> int:
    """``perm(A)`` for nonnegative A in O(n^2) model ops.

    Column j gets the variable ``T_j = Z^(2^j)``.  The product over rows of
    ``sum_j a_ij T_j`` has ``Z``-exponent ``sum 2^(j_i)`` for each choice of
    columns; that equals ``2^n - 1`` exactly when the choice is a
    permutation (n powers of two with popcount n cannot carry).  With
    ``Z`` above the product of row sums no digit overflows, so digit
    ``2^n - 1`` is the permanent.
    """
    A = _as_mat(A)
    n = A.rows
    if A.cols != n:
        raise DimensionMismatch("permanent needs a square matrix")
    if any(v < 0 for v in A.entries()):
        raise NegativeEntry("permanent_packed requires nonnegative entries")
    bound = 1
    for i in range(n):
        s = A[i, 0]
        for j in range(1, n):
            s = ctx.add(s, A[i, j])
        bound = ctx.mul(bound, s)
    Z = ctx.pow2(ctx.bitlen(bound))
    tower = [Z]
    for _ in range(n):
        tower.append(ctx.square(tower[-1]))
    V = None
    for i in range(n):
        s = ctx.mul(A[i, 0], tower[0])
        for j in range(1, n):
            s = ctx.add(s, ctx.mul(A[i, j], tower[j]))
        V = s if V is None else ctx.mul(V, s)
    top = ctx.div(tower[n], Z)
    return ctx.rem(ctx.div(V, top), Z)


def det_bareiss(ctx: CountedContext, A) -> int:
    """Fraction-free Gaussian elimination; every division is exact."""
    A = _as_mat(A)
    n = A.rows
    if A.cols != n:
        raise DimensionMismatch("determinant needs a square matrix")
    M = A.tolist()
    sign, prev = 1, 1
    for c in range(n - 1):
        if M[c][c] == 0:
            swap = next((r for r in range(c + 1, n) if M[r][c] != 0), None)
            if swap is None:
                return 0
            M[c], M[swap] = M[swap], M[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                num = ctx.sub(ctx.mul(M[i][j], M[c][c]), ctx.mul(M[i][c], M[c][j]))
                M[i][j] = _signed_div(ctx, num, prev)
        prev = M[c][c]
    return sign * M[n - 1][n - 1]


def det_cofactor(A) -> int:
    """Uncounted Laplace expansion (oracle for small n)."""
    M = _as_mat(A).tolist()

    def rec(M):
        if len(M) == 1:
            return M[0][0]
        return sum((-1) ** j * M[0][j] * rec([r[:j] + r[j + 1:] for r in M[1:]])
                   for j in range(len(M)) if M[0][j])

    return rec(M)


# ---------------------------------------------------------------------------
# Matrix gcd congruences


@dataclass(frozen=True)
class MatModulus:
    C: IntMat
    g: int

    @classmethod
    def of(cls, C) -> "MatModulus":
        C = _as_mat(C)
        return cls(C, math.gcd(*C.entries()))


def mat_gcd(ctx: CountedContext, C) -> int:
    if isinstance(C, MatModulus):
        return C.g
    g = 0
    for v in _as_mat(C).entries():
        g = ctx.gcd(g, abs(v))
    return g


def mat_rem(ctx: CountedContext, X, C) -> IntMat:
    """``X rem C``: every entry reduced into ``[0, gcd(C))``."""
    g = C if isinstance(C, int) else mat_gcd(ctx, C)
    if g == 0:
        raise ZeroModulus("X rem C needs C != 0 (gcd of entries is 0)")
    out = []
    for r in _as_mat(X).tolist():
        row = []
        for v in r:
            if v >= 0:
                row.append(ctx.rem(v, g))
            else:
                t = ctx.rem(ctx.sub(0, v), g)
                row.append(ctx.sub(g, t) if t else 0)
        out.append(row)
    return IntMat(out)


def _tower_step(k: int):
    step = isqrt(k)
    return step, k // step


def witness_bounds(cur: IntMat, step: int) -> int:
    """Entry bound ``d^(2^l - 1) * max(cur)^(2^l)`` for ``cur^(2^l)``."""
    e = 1 << step
    return cur.rows ** (e - 1) * cur.max_abs() ** e


def matpow_tower(ctx: CountedContext, A, k: int, B) -> IntMat:
    """``A^(2^k)`` for nonnegative A in O(d^2 sqrt k) ops after setup.

    ``l = isqrt(k)``; ``B^(2^l)`` is formed once.  Each of the ``k // l``
    steps replaces ``cur`` by ``B^(2^l) rem (B - cur)``, which equals
    ``cur^(2^l)`` provided ``gcd(B - cur)`` exceeds its entries; that
    premise is checked before every step.  Leftover exponent is closed by
    packed squaring.
    """
    A, B = _as_mat(A), _as_mat(B)
    if A.rows != A.cols or B.shape != A.shape:
        raise DimensionMismatch("A and B must be square of equal size")
    if any(v < 0 for v in A.entries()):
        raise NegativeEntry("matpow_tower requires nonnegative A")
    if k == 0:
        return A
    step, m = _tower_step(k)
    c = B
    for _ in range(step):
        c = matmul_packed(ctx, c, c)
    cur = A
    for j in range(1, m + 1):
        diff = IntMat([[ctx.sub(b, a) for a, b in zip(ra, rb)]
                       for ra, rb in zip(cur.tolist(), B.tolist())])
        g = mat_gcd(ctx, diff)
        if not ctx.cmp(g, witness_bounds(cur, step)) > 0:
            raise WitnessInsufficient(
                f"step {j}: gcd(B - A^(2^{step * (j - 1)})) = {g} does not exceed "
                f"the entry bound of the next power", step=j)
        cur = mat_rem(ctx, c, g)
    for _ in range(k - m * step):
        cur = matmul_packed(ctx, cur, cur)
    return cur


def make_power_witness_oracle(A, k: int) -> IntMat:
    """A witness B that passes every premise check of ``matpow_tower(A, k, B)``.

    Uses moduli ``q_j = 1 + j*N`` with ``N = m! * max bound``: they are
    pairwise coprime (a common prime would divide ``(j - i) N`` yet not N)
    and each exceeds its step bound.  B is the CRT lift of
    ``B = A^(2^(l(j-1))) (mod q_j)``, shifted by the modulus product so no
    step sees ``B - cur = 0``.
    """
    A = _as_mat(A)
    d = A.rows
    if k == 0:
        return A
    step, m = _tower_step(k)
    trajectory, cur = [], A
    scratch = CountedContext()
    for _ in range(m):
        trajectory.append(cur)
        for _ in range(step):
            cur = matmul_naive(scratch, cur, cur)
    bound = max(witness_bounds(t, step) for t in trajectory)
    N = math.factorial(m) * max(bound, 1)
    moduli = [1 + j * N for j in range(1, m + 1)]
    Q = math.prod(moduli)
    out = []
    for r in range(d):
        row = []
        for c in range(d):
            x = 0
            for q, t in zip(moduli, trajectory):
                Mq = Q // q
                x += t[r, c] * Mq * pow(Mq, -1, q)
            row.append(x % Q + Q)
        out.append(row)
    return IntMat(out)
