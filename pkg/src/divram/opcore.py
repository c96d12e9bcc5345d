"""Integer values and the instrumented evaluation context.

Values are plain Python ``int`` objects (unbounded, immutable).  Every
algorithm in the package performs its model-relevant arithmetic through a
:class:`CountedContext`, which

* counts one unit per primitive call (the unit-cost RAM model),
* refuses primitives outside its enabled instruction set, and
* optionally stops materialising values above a size budget, returning
  :class:`Phantom` placeholders so the op count of a straight-line
  algorithm can still be measured at sizes that would not fit in memory.

Large operands are routed through GMP (``gmpy2``) for speed; that is an
implementation detail of the primitive and never changes a count.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping

import gmpy2

from .errors import BothZero, ForbiddenOp, NegativeOperand, ZeroDivisor

__all__ = [
    "PRIMITIVES",
    "HEADLINE",
    "OpTally",
    "CountedContext",
    "Phantom",
    "parse_int",
    "format_int",
    "parse_ops",
    "div_rem",
    "gcdex",
    "bitlen",
    "tally_snapshot",
]

PRIMITIVES = ("add", "sub", "mul", "div", "rem", "and", "gcd", "gcdex", "shift", "cmp")
# cmp is reported but kept out of headline totals: tests are implicitly free.
HEADLINE = tuple(k for k in PRIMITIVES if k != "cmp")

# Primitives that are always permitted regardless of the instruction set.
ALWAYS_ENABLED = frozenset({"cmp", "shift"})

_TOKENS = {
    "+": {"add"},
    "add": {"add"},
    "-": {"sub"},
    "sub": {"sub"},
    "*": {"mul"},
    "x": {"mul"},
    "mul": {"mul"},
    "div": {"div", "rem"},
    "rem": {"rem"},
    "&": {"and"},
    "and": {"and"},
    "gcd": {"gcd"},
    "gcdex": {"gcdex"},
    "shift": {"shift"},
    "cmp": {"cmp"},
}

_GMP_BITS = 4096


def parse_ops(text) -> frozenset:
    """Turn ``"+,-,*,div"`` (or an iterable of tokens) into primitive kinds."""
    if text is None:
        return frozenset(PRIMITIVES)
    if isinstance(text, str):
        text = [t for t in text.replace(" ", "").split(",") if t]
    kinds = set(ALWAYS_ENABLED)
    for token in text:
        try:
            kinds |= _TOKENS[token.lower()]
        except KeyError:
            raise ValueError(f"unknown instruction token {token!r}") from None
    return frozenset(kinds)


def parse_int(text) -> int:
    """Parse a decimal string, or hexadecimal with a ``0x`` prefix."""
    if isinstance(text, int):
        return text
    s = str(text).strip().replace("_", "")
    neg = s.startswith("-")
    body = s[1:] if neg or s.startswith("+") else s
    if body.lower().startswith("0x"):
        value = int(gmpy2.mpz(body[2:], 16))
    else:
        if not body.isdigit():
            raise ValueError(f"not an integer literal: {text!r}")
        value = int(gmpy2.mpz(body, 10))
    return -value if neg else value


def format_int(value: int, base: int = 10) -> str:
    """Decimal (default) or ``0x``-prefixed hexadecimal string."""
    if base == 16:
        return ("-" if value < 0 else "") + "0x" + format(abs(value), "x")
    return str(gmpy2.mpz(value))


class OpTally(Mapping):
    """Per-primitive counters.  Immutable; ``+`` merges componentwise."""

    __slots__ = ("_counts",)

    def __init__(self, counts=None, **kwargs):
        data = dict.fromkeys(PRIMITIVES, 0)
        for src in (counts or {}, kwargs):
            for kind, n in src.items():
                if kind not in data:
                    raise KeyError(f"unknown primitive {kind!r}")
                if n < 0:
                    raise ValueError("counters are nonnegative")
                data[kind] += int(n)
        self._counts = data

    def __getitem__(self, kind):
        return self._counts[kind]

    def __iter__(self):
        return iter(PRIMITIVES)

    def __len__(self):
        return len(PRIMITIVES)

    def __add__(self, other):
        if not isinstance(other, OpTally):
            return NotImplemented
        return OpTally({k: self[k] + other[k] for k in PRIMITIVES})

    def __sub__(self, other):
        """Delta between two snapshots of the same context."""
        if not isinstance(other, OpTally):
            return NotImplemented
        return OpTally({k: self[k] - other[k] for k in PRIMITIVES})

    def __eq__(self, other):
        if isinstance(other, OpTally):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == OpTally(other)._counts
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._counts.values()))

    def __repr__(self):
        nz = ", ".join(f"{k}={v}" for k, v in self._counts.items() if v)
        return f"OpTally({nz})"

    def total(self, kinds: Iterable[str] = HEADLINE) -> int:
        return sum(self[k] for k in kinds)

    def as_dict(self) -> dict:
        return dict(self._counts)

    def to_json(self) -> str:
        return json.dumps(self._counts)

    @classmethod
    def from_json(cls, text: str) -> "OpTally":
        return cls(json.loads(text))


class Phantom:
    """Placeholder for a value whose size exceeded the context's budget.

    Only an estimate of the bit length is kept.  Any primitive with a
    phantom operand yields a phantom result (and is still counted).
    """

    __slots__ = ("bits",)

    def __init__(self, bits):
        self.bits = max(int(bits), 0)

    def bit_length(self):
        return self.bits

    def __repr__(self):
        return f"Phantom(~{self.bits} bits)"


def _bits(v):
    return v.bits if isinstance(v, Phantom) else abs(v).bit_length()


def _is_pow2(b):
    return b > 0 and b & (b - 1) == 0


def _gmp(a, b):
    return a.bit_length() > _GMP_BITS and b.bit_length() > _GMP_BITS


def _raw_mul(a, b):
    # power-of-two radices are the common case; still counted as one mul
    if _is_pow2(b):
        return a << (b.bit_length() - 1)
    if _is_pow2(a):
        return b << (a.bit_length() - 1)
    if _gmp(a, b) or (a.bit_length() + b.bit_length()) > 8 * _GMP_BITS:
        return int(gmpy2.mpz(a) * gmpy2.mpz(b))
    return a * b


def _raw_divmod(a, b):
    if _is_pow2(b):
        s = b.bit_length() - 1
        return a >> s, a & (b - 1)
    if a.bit_length() > _GMP_BITS:
        q, r = gmpy2.f_divmod(gmpy2.mpz(a), gmpy2.mpz(b))
        return int(q), int(r)
    return divmod(a, b)


def _raw_gcd(a, b):
    if _gmp(a, b):
        return int(gmpy2.gcd(a, b))
    return math.gcd(a, b)


def _raw_gcdex(a, b):
    """Extended Euclid on nonnegative ``a, b``: ``(g, s, t)`` with ``g = s*a + t*b``."""
    if a.bit_length() > _GMP_BITS or b.bit_length() > _GMP_BITS:
        g, s, t = gmpy2.gcdext(a, b)
        return int(g), int(s), int(t)
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


class CountedContext:
    """Evaluation context: counts primitives and enforces an instruction set.

    Parameters
    ----------
    ops:
        Permitted instruction set, e.g. ``"+,-,*,div"``; ``None`` allows
        everything.  ``cmp`` and ``shift`` are always permitted.
    max_bits:
        If given, results whose size would exceed this many bits are not
        computed; a :class:`Phantom` is returned instead.

    A context is single-owner.  For parallel work give each worker its own
    context and merge the snapshots with ``+``.
    """

    def __init__(self, ops=None, max_bits=None):
        self.enabled_ops = parse_ops(ops)
        self.max_bits = max_bits
        self._counts = dict.fromkeys(PRIMITIVES, 0)

    def __repr__(self):
        return f"CountedContext({self.snapshot()!r})"

    # -- bookkeeping -----------------------------------------------------
    def _tick(self, kind, n=1):
        if kind not in self.enabled_ops:
            raise ForbiddenOp(kind, self.enabled_ops)
        self._counts[kind] += n

    def snapshot(self) -> OpTally:
        return OpTally(self._counts)

    def allows(self, *kinds) -> bool:
        return all(k in self.enabled_ops for k in kinds)

    def _phantom(self, *operands, bits):
        if any(isinstance(v, Phantom) for v in operands):
            return Phantom(bits)
        if self.max_bits is not None and bits > self.max_bits:
            return Phantom(bits)
        return None

    # -- ring operations -------------------------------------------------
    def add(self, a, b):
        self._tick("add")
        ph = self._phantom(a, b, bits=max(_bits(a), _bits(b)) + 1)
        return ph if ph is not None else a + b

    def sub(self, a, b):
        self._tick("sub")
        ph = self._phantom(a, b, bits=max(_bits(a), _bits(b)) + 1)
        return ph if ph is not None else a - b

    def neg(self, a):
        return self.sub(0, a)

    def mul(self, a, b):
        self._tick("mul")
        ph = self._phantom(a, b, bits=_bits(a) + _bits(b))
        return ph if ph is not None else _raw_mul(a, b)

    def square(self, a):
        return self.mul(a, a)

    def pow(self, a, e: int):
        """``a**e`` by left-to-right repeated squaring; counts every mul."""
        if e < 0:
            raise ValueError("negative exponent")
        if e == 0:
            return 1
        result = a
        for bit in bin(e)[3:]:
            result = self.mul(result, result)
            if bit == "1":
                result = self.mul(result, a)
        return result

    # -- non-arithmetic primitives --------------------------------------
    def _check_div(self, a, b):
        if not isinstance(b, Phantom) and b == 0:
            raise ZeroDivisor("divisor must be positive (b > 0)")
        if (not isinstance(a, Phantom) and a < 0) or (not isinstance(b, Phantom) and b < 0):
            raise NegativeOperand("div/rem are defined for nonnegative operands only")

    def div(self, a, b):
        self._tick("div")
        self._check_div(a, b)
        ph = self._phantom(a, b, bits=max(_bits(a) - _bits(b) + 1, 1))
        return ph if ph is not None else _raw_divmod(a, b)[0]

    def rem(self, a, b):
        self._tick("rem")
        self._check_div(a, b)
        ph = self._phantom(a, b, bits=_bits(b))
        return ph if ph is not None else _raw_divmod(a, b)[1]

    def div_rem(self, a, b):
        """Floor quotient and remainder; counts one div and one rem."""
        self._tick("div")
        self._tick("rem")
        self._check_div(a, b)
        if isinstance(a, Phantom) or isinstance(b, Phantom):
            return Phantom(max(_bits(a) - _bits(b) + 1, 1)), Phantom(_bits(b))
        return _raw_divmod(a, b)

    def and_(self, a, b):
        self._tick("and")
        ph = self._phantom(a, b, bits=min(_bits(a), _bits(b)))
        return ph if ph is not None else a & b

    def gcd(self, a, b):
        self._tick("gcd")
        ph = self._phantom(a, b, bits=min(_bits(a), _bits(b)))
        return ph if ph is not None else _raw_gcd(a, b)

    def gcdex(self, a, b):
        self._tick("gcdex")
        if a < 0 or b < 0:
            raise NegativeOperand("gcdex takes nonnegative operands")
        if a == 0 and b == 0:
            raise BothZero("gcdex(0, 0) is undefined")
        return _raw_gcdex(a, b)

    # -- shift family ----------------------------------------------------
    def bitlen(self, a) -> int:
        """``0`` for ``a == 0`` else ``floor(log2 a) + 1``; one shift op."""
        self._tick("shift")
        return _bits(a)

    def shl(self, a, k: int):
        self._tick("shift")
        ph = self._phantom(a, bits=_bits(a) + k)
        return ph if ph is not None else a << k

    def shr(self, a, k: int):
        self._tick("shift")
        ph = self._phantom(a, bits=max(_bits(a) - k, 0))
        return ph if ph is not None else a >> k

    def pow2(self, k: int):
        return self.shl(1, k)

    # -- tests -----------------------------------------------------------
    def cmp(self, a, b) -> int:
        self._tick("cmp")
        return (a > b) - (a < b)


def div_rem(ctx: CountedContext, a, b):
    return ctx.div_rem(a, b)


def gcdex(ctx: CountedContext, a, b):
    return ctx.gcdex(a, b)


def bitlen(ctx: CountedContext, a) -> int:
    return ctx.bitlen(a)


def tally_snapshot(ctx: CountedContext) -> OpTally:
    return ctx.snapshot()
