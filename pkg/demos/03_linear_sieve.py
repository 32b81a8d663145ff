# The beta = 2 linear sieve: Rosser weights, the sandwich, and the sieve functions.
# Run: python3 demos/03_linear_sieve.py
import numpy as np

from twinphase.sieve import (LOWER, UPPER, WeightedSequence, rosser_weights, sandwich_violations,
                             sieve_bounds, sieve_functions, well_separable_split)

up = rosser_weights(1000, 31, UPPER)
lo = rosser_weights(1000, 31, LOWER)
print(f"D = 1000, z = 31: {len(up)} upper and {len(lo)} lower weights")
print("first upper weights:", list(up.support.items())[:10])

# sum_{d|n} lambda^- <= [n has no prime factor < z] <= sum_{d|n} lambda^+
print("sandwich violations for n <= 1e5:", sandwich_violations(10**5, 1000, 31).size)

# every supported d factors as h s with h <= H, s <= D/H
d = max(up.support)
for H in (2, 32, 500):
    print(f"d = {d}, H = {H}: split", well_separable_split(d, 1000, H, 1000 / H))

# integers up to 1e4 sifted by 2, 3, 5, 7
A = WeightedSequence.unweighted(np.arange(1, 10**4 + 1))
b = sieve_bounds(A, 10, 100, lambda p: 1.0)
print(f"lower {b.lower:.0f} <= exact {b.exact:.0f} <= upper {b.upper:.0f}")

tab = sieve_functions(10, 1e-3)
for s in (2, 3, 4, 6, 10):
    print(f"s = {s:2d}: F = {tab.F(s):.6f}  f = {tab.f(s):.6f}")
