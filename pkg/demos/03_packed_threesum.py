"""
Word-parallel comparisons and 3SUM
==================================

Packing many small numbers into one big integer lets a single subtraction
compare all of them.  A high guard bit per slot survives exactly where the
slot of A is at least the slot of B.
"""

import random

from divram.opcore import CountedContext
from divram.packing import all_pairwise_sums, exists_equal, ge_mask, pack, threesum_packed

ctx = CountedContext()
t = 8
a = pack(ctx, [5, 17, 3, 90], 1 << t)
b = pack(ctx, [5, 20, 1, 90], 1 << t)
mask = ge_mask(ctx, a.value, b.value, t, 4)
print([bool(mask >> (t * i + t - 1) & 1) for i in range(4)])
print("some slot equal:", exists_equal(ctx, a.value, b.value, t, 4))

###############################################################################
# All n^2 pairwise sums come from two multiplications.

S = all_pairwise_sums(ctx, [1, 2, 3], [10, 20], 8)
print(S.digits())

###############################################################################
# 3SUM: is some x_i + y_j equal to some z_k?  The count is linear in n.

rng = random.Random(1)
for n in (32, 64, 128):
    xs = [2 * rng.randint(0, 1000) for _ in range(n)]
    zs = [2 * rng.randint(0, 1000) + 1 for _ in range(n)]
    ctx = CountedContext()
    found = threesum_packed(ctx, xs, xs, zs)
    print(f"n={n:3d}: found={found}, {ctx.snapshot().total()} ops")
