"""Prepared evaluation on 64-bit words with double-width intermediates.

Every arithmetic step is done on ``numpy.uint64`` arrays: a 64x64->128
multiply built from 32-bit halves and a 128/64 division by two-digit long
division (base ``2^32``).  For a power-of-two radix the final digit
extraction is a double-word shift plus mask; otherwise it is a second
division followed by ``rem Z``.  No Python big integers touch the data path.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassViolation, DomainExceeded
from .poly import Poly
from .polyeval import radix_bound

__all__ = [
    "RangeClass",
    "Prepared64",
    "builtin_classes",
    "get_class",
    "mul64",
    "divlu",
    "prepare64",
    "eval64",
    "eval64_packed",
    "horner64",
    "enumerate_class",
    "ValidationReport",
    "validate_class",
    "bench",
]

U64 = np.uint64
M32 = U64(0xFFFFFFFF)
B32 = U64(1 << 32)


@dataclass(frozen=True)
class RangeClass:
    index: int
    d: int
    P: int
    X: int
    Z: int

    @property
    def pow2(self) -> bool:
        return self.Z & (self.Z - 1) == 0

    @property
    def count(self) -> int:
        """Nonnegative polynomials with degree <= d and norm <= P."""
        return math.comb(self.P + self.d + 1, self.d + 1)

    def check(self) -> None:
        bound = radix_bound(self.d, self.P, self.X)
        if not self.Z > bound:
            raise ClassViolation(f"class {self.index}: Z={self.Z:#x} not above {bound}")
        Zd = self.Z**self.d
        if self.P * Zd >= 1 << 64:
            raise ClassViolation(f"class {self.index}: P*Z^d does not fit 64 bits")
        if (self.Z ** (self.d + 1) // (self.Z - self.X)) * self.P * Zd >= 1 << 128:
            raise ClassViolation(f"class {self.index}: product does not fit 128 bits")


_CLASSES = (
    RangeClass(1, 5, 5, 4, 0x1401),
    RangeClass(2, 5, 15, 3, 0x1000),
    RangeClass(3, 4, 9, 8, 0x9001),
    RangeClass(4, 4, 13, 7, 0x8000),
    RangeClass(5, 4, 23, 6, 0x7471),
    RangeClass(6, 3, 56, 21, 0x80000),
)
for _c in _CLASSES:
    _c.check()


def builtin_classes():
    return list(_CLASSES)


def get_class(k: int) -> RangeClass:
    if not 1 <= k <= len(_CLASSES):
        raise ValueError(f"class index must be in 1..{len(_CLASSES)}")
    return _CLASSES[k - 1]


# ---------------------------------------------------------------------------
# Double-width word primitives


def _u64(a) -> np.ndarray:
    return np.asarray(a, dtype=U64)


def mul64(a, b):
    """Full product of uint64 arrays as ``(hi, lo)``."""
    a, b = _u64(a), _u64(b)
    with np.errstate(over="ignore"):
        a0, a1 = a & M32, a >> U64(32)
        b0, b1 = b & M32, b >> U64(32)
        p00, p01, p10, p11 = a0 * b0, a0 * b1, a1 * b0, a1 * b1
        mid = (p00 >> U64(32)) + (p01 & M32) + (p10 & M32)
        lo = (mid << U64(32)) | (p00 & M32)
        hi = p11 + (p01 >> U64(32)) + (p10 >> U64(32)) + (mid >> U64(32))
    return hi, lo


def _nlz(v):
    """Leading zero count of nonzero uint64 values."""
    v = v.copy()
    n = np.zeros(v.shape, dtype=U64)
    for k in (32, 16, 8, 4, 2, 1):
        small = (v >> U64(64 - k)) == 0
        n = np.where(small, n + U64(k), n)
        v = np.where(small, v << U64(k), v)
    return n


def divlu(u1, u0, v):
    """``(u1*2^64 + u0) divmod v`` for uint64 arrays with ``u1 < v``.

    Normalise v to have its top bit set, then two base-2^32 quotient digits,
    each estimated from the top two dividend digits and corrected at most
    twice.
    """
    u1, u0, v = np.broadcast_arrays(_u64(u1), _u64(u0), _u64(v))
    if np.any(v == 0) or np.any(u1 >= v):
        raise OverflowError("divlu needs v > 0 and a quotient below 2^64")
    with np.errstate(over="ignore"):
        s = _nlz(v)
        v = v << s
        vn1, vn0 = v >> U64(32), v & M32
        spill = np.where(s == 0, U64(0), u0 >> ((U64(64) - s) & U64(63)))
        un32 = (u1 << s) | spill
        un10 = u0 << s
        un1, un0 = un10 >> U64(32), un10 & M32

        def digit(top, low):
            q = top // vn1
            rhat = top - q * vn1
            for _ in range(2):
                fix = (q >= B32) | ((rhat < B32) & (q * vn0 > B32 * rhat + low))
                q = np.where(fix, q - U64(1), q)
                rhat = np.where(fix, rhat + vn1, rhat)
            return q

        q1 = digit(un32, un1)
        un21 = un32 * B32 + un1 - q1 * v
        q0 = digit(un21, un0)
        r = (un21 * B32 + un0 - q0 * v) >> s
    return q1 * B32 + q0, r


def horner64(coeffs, x):
    """Word Horner; ``coeffs`` is ``(..., d+1)`` low-order first."""
    coeffs = _u64(coeffs)
    x = _u64(x)
    with np.errstate(over="ignore"):
        acc = np.broadcast_to(coeffs[..., -1], np.broadcast_shapes(coeffs.shape[:-1], x.shape))
        for i in range(coeffs.shape[-1] - 2, -1, -1):
            acc = acc * x + coeffs[..., i]
    return acc


# ---------------------------------------------------------------------------
# Prepared evaluation


@dataclass(frozen=True)
class Prepared64:
    cls: RangeClass
    pZ: int
    Zd: int
    Zd1: tuple        # (hi, lo) words of Z^(d+1)
    mask: int         # Z - 1 (power-of-two radix)
    shift: int        # 64 - d log2 Z (power-of-two radix)
    coeffs: tuple = field(default=())


def _class_constants(cls: RangeClass):
    Zd = horner64(np.array([0] * cls.d + [1]), U64(cls.Z))
    hi, lo = mul64(Zd, U64(cls.Z))
    shift = 64 - cls.d * (cls.Z.bit_length() - 1) if cls.pow2 else 0
    return int(Zd), (int(hi), int(lo)), shift


def prepare64(p, cls: RangeClass) -> Prepared64:
    """Word constants for ``p`` in ``cls`` (nonnegative, deg <= d, norm <= P)."""
    coeffs = p.coeffs if isinstance(p, Poly) else tuple(int(c) for c in p)
    if any(c < 0 for c in coeffs):
        raise ClassViolation("coefficients must be nonnegative")
    if len(coeffs) > cls.d + 1 and any(coeffs[cls.d + 1:]):
        raise ClassViolation(f"degree exceeds class bound d={cls.d}")
    coeffs = tuple(coeffs[:cls.d + 1]) + (0,) * (cls.d + 1 - len(coeffs[:cls.d + 1]))
    if sum(coeffs) > cls.P:
        raise ClassViolation(f"norm {sum(coeffs)} exceeds class bound P={cls.P}")
    Zd, Zd1, shift = _class_constants(cls)
    pZ = int(horner64(np.array(coeffs), U64(cls.Z)))
    return Prepared64(cls, pZ, Zd, Zd1, cls.Z - 1, shift, coeffs)


def eval64_packed(cls: RangeClass, pZ, x):
    """Vectorised kernel: ``p(x)`` from ``p(Z)`` words and arguments ``x``."""
    Zd, (h, l), shift = _class_constants(cls)
    x = _u64(x)
    q, _ = divlu(U64(h), U64(l), U64(cls.Z) - x)
    hi, lo = mul64(q, pZ)
    if cls.pow2:
        with np.errstate(over="ignore"):
            top = (hi << U64(shift)) | (lo >> U64(64 - shift))
        return top & U64(cls.Z - 1)
    q2, _ = divlu(hi, lo, U64(Zd))
    return q2 % U64(cls.Z)


def eval64(prep: Prepared64, x):
    """``p(x)`` for ``0 <= x <= X``; scalar in, Python int out."""
    xs = np.asarray(x)
    if np.any(xs < 0) or np.any(xs > prep.cls.X):
        raise DomainExceeded(f"x must lie in [0, {prep.cls.X}]")
    out = eval64_packed(prep.cls, U64(prep.pZ), xs.astype(U64))
    return int(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Exhaustive validation and benchmark


def enumerate_class(cls: RangeClass) -> np.ndarray:
    """All coefficient vectors (rows) with nonnegative entries summing to <= P.

    Stars and bars: d+1 sorted bar positions among ``P + d + 1`` slots.
    """
    n, k = cls.P + cls.d + 1, cls.d + 1
    bars = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(n), k)),
                       dtype=np.int64).reshape(-1, k)
    coeffs = np.diff(bars, axis=1, prepend=-1) - 1
    return coeffs.astype(U64)


@dataclass
class ValidationReport:
    cls: RangeClass
    polynomials: int
    evaluations: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def as_dict(self) -> dict:
        return {"class": self.cls.index, "d": self.cls.d, "P": self.cls.P, "X": self.cls.X,
                "Z": hex(self.cls.Z), "pow2": self.cls.pow2, "polynomials": self.polynomials,
                "evaluations": self.evaluations, "mismatches": len(self.mismatches),
                "ok": self.ok}


def validate_class(cls: RangeClass, limit_report: int = 10) -> ValidationReport:
    coeffs = enumerate_class(cls)
    pZ = horner64(coeffs, U64(cls.Z))
    mismatches, evals = [], 0
    for x in range(cls.X + 1):
        got = eval64_packed(cls, pZ, np.full(pZ.shape, x, dtype=U64))
        want = horner64(coeffs, U64(x))
        bad = np.nonzero(got != want)[0]
        evals += len(pZ)
        for i in bad[:max(limit_report - len(mismatches), 0)]:
            mismatches.append({"coeffs": coeffs[i].tolist(), "x": x,
                               "got": int(got[i]), "want": int(want[i])})
        if len(bad) and not mismatches:
            mismatches.append({"x": x, "count": int(len(bad))})
    return ValidationReport(cls, len(coeffs), evals, mismatches)


def bench(classes=None, repeat: int = 3) -> str:
    """CSV timing of eval64 against word Horner and table lookup baselines per class corpus.

    Timings are of vectorised passes divided by the evaluation count.
    """
    classes = classes or builtin_classes()
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["class", "method", "count", "ns_per_eval"])
    for cls in classes:
        coeffs = enumerate_class(cls)
        pZ = horner64(coeffs, U64(cls.Z))
        xs = np.arange(cls.X + 1, dtype=U64)
        table = np.stack([horner64(coeffs, U64(x)) for x in range(cls.X + 1)], axis=1)
        n = len(coeffs) * (cls.X + 1)
        methods = {
            "eval64": lambda: [eval64_packed(cls, pZ, np.full(pZ.shape, x, dtype=U64)) for x in xs],
            "horner": lambda: [horner64(coeffs, x) for x in xs],
            "table": lambda: [table[:, int(x)].copy() for x in xs],
        }
        for name, fn in methods.items():
            best = math.inf
            for _ in range(repeat):
                t0 = time.perf_counter_ns()
                fn()
                best = min(best, time.perf_counter_ns() - t0)
            w.writerow([cls.index, name, n, f"{best / n:.3f}"])
    return out.getvalue()
