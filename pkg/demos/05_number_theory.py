"""
Number theory toolkit
=====================

Chinese remaindering, prime search, exact root approximation, Mills'
primes and linear recurrences.
"""

import random

from divram.numtheory import (coprime_chain, crt_tree, find_prime_above, find_recurrence,
                              gcd_floor_point, mills_floor, newton_approx, rho_encode,
                              rho_extract, verify_gcd_floor, wilson_scan)
from divram.opcore import CountedContext
from divram.poly import Poly

ctx = CountedContext()
print(crt_tree(ctx, [(1, 2), (2, 3), (3, 5)]), "gcdex calls:", ctx.snapshot()["gcdex"])
print(coprime_chain(ctx, 3, 5))

# every offset in {0,1,2}^2 shifts x onto a vector with gcd >= 10
xs = gcd_floor_point(ctx, 2, 10, 3)
print(xs, verify_gcd_floor(xs, 10, 3))

###############################################################################
# Primes: Wilson's theorem for small n, random windows for large N.

verdicts = wilson_scan(CountedContext(), 50)
print([n for n, is_p in verdicts.items() if is_p])
info = {}
p = find_prime_above(CountedContext(), 2**64, random.Random(3), info=info)
print(p, "after", info["attempts"], "window(s)")

###############################################################################
# Newton in exact rationals, certified by a sign change.

info = {}
r = newton_approx(CountedContext(), Poly((-2, 0, 1)), 64, info=info)
print(float(r), "iterations:", info["iterations"], "denominator bits:", r.denominator.bit_length())

print([mills_floor(CountedContext(), n) for n in (1, 2, 3)])

###############################################################################
# Many values of a polynomial packed into one number, and their recurrence.

code = rho_encode(Poly((1, 2, 3)), 5)
print([rho_extract(CountedContext(), code, n) for n in range(6)])
print(find_recurrence(Poly((1, 0, 1)), 3))
