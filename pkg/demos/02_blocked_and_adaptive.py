"""
Blocked and adaptive evaluation
===============================

Two ways to beat Horner's d multiplications.  Small coefficients allow a
table of all short blocks, cutting the cost by a log factor.  With bitwise
AND available, a radix chosen from the argument itself gives O(log d)
operations for any integer x.
"""

import random

from divram.opcore import CountedContext
from divram.poly import MultiPoly, Poly
from divram.polyeval import (eval_adaptive, eval_adaptive_multi, eval_blocked, eval_horner,
                             pow_tower, prepare_adaptive, prepare_adaptive_multi)

rng = random.Random(0)

# coefficients in {0, 1}: blocks of k coefficients are looked up, not computed
for d in (256, 1024, 4096, 16384):
    p = Poly(tuple(rng.randint(0, 1) for _ in range(d)) + (1,))
    ctx = CountedContext()
    value = eval_blocked(ctx, p, 3, P=2)
    assert value == p.at(3)
    snap = ctx.snapshot()
    print(f"d={d:5d}: blocked add+mul {snap['add'] + snap['mul']:5d}, Horner {2 * d}")

###############################################################################
# Adaptive evaluation: the count grows by two per doubling of the degree.

x = rng.getrandbits(256)
for d in (8, 64, 512):
    p = Poly(tuple(rng.randint(-9, 9) for _ in range(d)) + (1,))
    ctx = CountedContext()
    assert eval_adaptive(ctx, prepare_adaptive(p), x) == eval_horner(CountedContext(), p, x)
    print(f"d={d:4d}: {ctx.snapshot().total()} ops")

# several variables at once
m = MultiPoly(2, 3, {(2, 1): 4, (0, 0): -7})
print(eval_adaptive_multi(CountedContext(), prepare_adaptive_multi(m), (10**20, -3)))

###############################################################################
# a^(2^k) with O(sqrt k) operations, given any b >= 2 a^(2^k)

ctx = CountedContext()
v = pow_tower(ctx, 3, 16, 2 * 3**65536)
print(v.bit_length(), "bits with", ctx.snapshot().total(), "ops")
