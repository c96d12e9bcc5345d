"""
Constant-operation polynomial evaluation
========================================

A polynomial known in advance can be evaluated at any argument of a
bounded domain with a fixed handful of integer operations, independent of
its degree.  The trick is a single division that produces all powers of x
at once, in base Z.
"""

from divram.opcore import CountedContext
from divram.packing import geom_series
from divram.poly import Poly
from divram.polyeval import (decide_finite_language, eval_horner, eval_prepared, prepare,
                             prepare_language, prepare_sequence)

# Z^3 div (Z - x) lists x^0, x^1, x^2 as base-Z digits
ctx = CountedContext()
Z, x = 1000, 7
print(geom_series(ctx, Z, x, 2), "=", "1 007 049 in base 1000")
print("ops:", ctx.snapshot())

###############################################################################
# Preparing a polynomial fixes the radix and stores p(Z).

p = Poly((3, 2, 1))
prep = prepare(p, X=4)
print("radix", prep.radix)

for x in range(-4, 5):
    print(x, eval_prepared(CountedContext(), prep, x), eval_horner(CountedContext(), p, x))

###############################################################################
# The cost does not grow with the degree.

for d in (2, 20, 200):
    q = Poly(tuple(range(1, d + 2)))
    ctx = CountedContext()
    eval_prepared(ctx, prepare(q, X=10), 9)
    hctx = CountedContext()
    eval_horner(hctx, q, 9)
    print(f"degree {d:3d}: prepared {ctx.snapshot().total()} ops, Horner {hctx.snapshot().total()} ops")

###############################################################################
# Any finite sequence becomes a prepared polynomial with a divisor.

seq = prepare_sequence([1, 0, 1, 0, 1])
print([eval_prepared(CountedContext(), seq, n) for n in range(5)], "divisor", seq.divisor)

# and membership in a finite set of naturals is a constant-op test
L = prepare_language({2, 3, 5, 7, 11, 13}, 15)
print([n for n in range(16) if decide_finite_language(CountedContext(), L, n)])

###############################################################################
# Restricting the instruction set shows which primitives an algorithm needs.

try:
    eval_prepared(CountedContext(ops="+,-,*"), prep, 2)
except Exception as exc:
    print(type(exc).__name__, exc)
