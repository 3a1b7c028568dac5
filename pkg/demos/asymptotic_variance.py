"""
The asymptotic variance V(d, ell)
=================================

How the limiting variance of the estimator depends on the memory
parameter, the number of scales and the wavelet.
"""

import math

import longmem as lm

db2, db4 = lm.make_wavelet("db2"), lm.make_wavelet("db4")

# At d = 0 every orthonormal wavelet gives the same infinite-range value.
bound = 1 / (8 * math.log(2) ** 2)
print(f"V(0, inf): db2 {lm.V(0.0, lm.INF, db2):.6f}  db4 {lm.V(0.0, lm.INF, db4):.6f}  (1/(8 log^2 2) = {bound:.6f})")

# Using more scales always helps, with diminishing returns.
print("\n ell   V(0.3, ell) db4")
for ell in (2, 3, 4, 6, 8, 12, lm.INF):
    print(f"{ell!s:>4}   {lm.V(0.3, ell, db4):.5f}")

# The dependence on d differs between filters; the Shannon wavelet, with
# an ideal band-pass transform, serves as a reference.
print("\n   d     db2      db4    shannon   (ell = inf)")
for d in (-0.3, 0.0, 0.3, 0.6, 1.0, 1.5):
    print(f"{d:5.2f}  {lm.V(d, lm.INF, db2):.4f}  {lm.V(d, lm.INF, db4):.4f}  {lm.shannon_V(d, lm.INF):.4f}")

# Outside (1/2 - alpha, M] the variance is undefined for that wavelet,
# and the library says so rather than returning a number.
try:
    lm.V(2.5, 6, db2)
except ValueError as err:
    print(f"\nV(2.5, 6, db2): {err}")
