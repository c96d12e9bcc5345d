"""
Sixty-four bit evaluation
=========================

For tiny polynomials everything fits in machine words: p(Z) in one word,
Z^(d+1) in two.  The evaluation is one 128/64 division, one 64x64
multiplication and a digit extraction, vectorised over numpy arrays.
"""

import numpy as np

from divram.native64 import (bench, builtin_classes, eval64, get_class, horner64, prepare64,
                             validate_class)
from divram.poly import Poly

for c in builtin_classes():
    print(c.index, f"d={c.d} P={c.P} X={c.X} Z={c.Z:#x}", "pow2" if c.pow2 else "", c.count)

c6 = get_class(6)
prep = prepare64(Poly((3, 2, 0, 1)), c6)
print(eval64(prep, 21), 21**3 + 2 * 21 + 3)
print(eval64(prep, np.arange(22)))
print(horner64(np.array([3, 2, 0, 1], dtype=np.uint64), np.arange(22, dtype=np.uint64)))

###############################################################################
# Exhaustive check of the largest class: every polynomial, every argument.

report = validate_class(c6)
print(report.as_dict())

print(bench([get_class(1)], repeat=1))
