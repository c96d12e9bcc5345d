"""Dense univariate and sparse multivariate integer polynomials.

JSON forms: a univariate polynomial is an array of decimal coefficient
strings indexed by exponent; a multivariate one is a list of
``{"exponents": [...], "coeff": "..."}`` objects.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

from .opcore import format_int, parse_int

__all__ = ["Poly", "MultiPoly"]


@dataclass(frozen=True)
class Poly:
    """``sum(coeffs[i] * x**i)``; trailing zeros are stripped."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = [parse_int(v) for v in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        # The zero polynomial is given degree 0 so radix bounds stay defined.
        return max(len(self.coeffs) - 1, 0)

    @cached_property
    def norm1(self) -> int:
        return sum(abs(c) for c in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def split(self):
        """``(p_plus, p_minus)`` with nonnegative coefficients, ``p = p_plus - p_minus``."""
        return (Poly(tuple(max(c, 0) for c in self.coeffs)),
                Poly(tuple(max(-c, 0) for c in self.coeffs)))

    def mirror(self) -> "Poly":
        """``p(-x)``."""
        return Poly(tuple(-c if i % 2 else c for i, c in enumerate(self.coeffs)))

    def scaled(self, m: int) -> "Poly":
        return Poly(tuple(m * c for c in self.coeffs))

    def at(self, x):
        """Plain uncounted evaluation."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_json(self) -> str:
        return json.dumps([format_int(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text) -> "Poly":
        data = json.loads(text) if isinstance(text, str) else text
        return cls(tuple(parse_int(v) for v in data))


@dataclass(frozen=True)
class MultiPoly:
    """Sparse polynomial in ``nvars`` variables, every exponent below ``d``."""

    nvars: int
    d: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.nvars < 1 or self.d < 1:
            raise ValueError("need nvars >= 1 and d >= 1")
        clean = {}
        for exps, c in dict(self.terms).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars:
                raise ValueError(f"exponent vector {exps} has wrong length")
            if any(not 0 <= e < self.d for e in exps):
                raise ValueError(f"exponents {exps} must lie in [0, {self.d})")
            c = parse_int(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v})

    def __hash__(self):
        return hash((self.nvars, self.d, tuple(sorted(self.terms.items()))))

    @cached_property
    def norm1(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    def index(self, exps) -> int:
        """Mixed-radix position ``e_0 + d*e_1 + d^2*e_2 + ...``."""
        return sum(e * self.d**k for k, e in enumerate(exps))

    def sign_variant(self, signs) -> "MultiPoly":
        """``p(s_0 x_0, s_1 x_1, ...)`` for signs in {+1, -1}."""
        out = {}
        for exps, c in self.terms.items():
            flip = sum(e for e, s in zip(exps, signs) if s < 0) % 2
            out[exps] = -c if flip else c
        return MultiPoly(self.nvars, self.d, out)

    def split(self):
        pos = {e: c for e, c in self.terms.items() if c > 0}
        neg = {e: -c for e, c in self.terms.items() if c < 0}
        return MultiPoly(self.nvars, self.d, pos), MultiPoly(self.nvars, self.d, neg)

    def at(self, xs):
        """Plain uncounted monomial-sum evaluation."""
        total = 0
        for exps, c in self.terms.items():
            term = c
            for x, e in zip(xs, exps):
                term *= x**e
            total += term
        return total

    def exponent_vectors(self):
        return itertools.product(range(self.d), repeat=self.nvars)

    def to_json(self) -> str:
        return json.dumps([{"exponents": list(e), "coeff": format_int(c)}
                           for e, c in sorted(self.terms.items())])

    @classmethod
    def from_json(cls, text, d=None) -> "MultiPoly":
        data = json.loads(text) if isinstance(text, str) else text
        if not data:
            raise ValueError("empty multivariate polynomial needs explicit shape")
        terms = {tuple(t["exponents"]): parse_int(t["coeff"]) for t in data}
        nvars = len(next(iter(terms)))
        top = max(max(e) for e in terms) + 1
        return cls(nvars, max(top, d or 1), terms)
