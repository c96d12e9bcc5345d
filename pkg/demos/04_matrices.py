"""
Matrices in one integer
=======================

Products and permanents of integer matrices, plus repeated squaring, each
reduced to a few operations on very large integers.
"""

import random

import numpy as np

from divram.linalg import (IntMat, make_power_witness_oracle, matmul_packed, matpow_naive,
                           matpow_tower, permanent_naive, permanent_packed)
from divram.numtheory import gcd_floor_point
from divram.opcore import CountedContext

rng = random.Random(2)
A = IntMat([[rng.randint(-2**63, 2**63) for _ in range(5)] for _ in range(7)])
B = IntMat([[rng.randint(-2**63, 2**63) for _ in range(3)] for _ in range(5)])
ctx = CountedContext()
C = matmul_packed(ctx, A, B)
ref = np.dot(np.array(A.tolist(), dtype=object), np.array(B.tolist(), dtype=object))
print("matches:", C.tolist() == ref.tolist(), ctx.snapshot())

###############################################################################
# The permanent is one digit of a product of n row polynomials.

M = IntMat([[rng.randint(0, 9) for _ in range(6)] for _ in range(6)])
fast, slow = CountedContext(), CountedContext()
print(permanent_packed(fast, M), permanent_naive(slow, M))
print("ops:", fast.snapshot().total(), "vs", slow.snapshot().total())

###############################################################################
# Powering by remainders against a witness matrix B.

A = IntMat([[1, 1], [1, 0]])
B = make_power_witness_oracle(A, 9)
print("witness bits:", max(v.bit_length() for v in B.entries()))
print(matpow_tower(CountedContext(), A, 9, B) == matpow_naive(CountedContext(), A, 9))

# a permutation matrix only needs a gcd floor point as witness
P = IntMat([[0, 1], [1, 0]])
xs = gcd_floor_point(CountedContext(), 4, 8, 9)
W = IntMat([[xs[0] + 7, xs[1] + 7], [xs[2] + 7, xs[3] + 7]])
print(matpow_tower(CountedContext(), P, 4, W))
