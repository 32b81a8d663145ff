# Fixed-point phases and rational approximation.
# Run: python3 demos/01_phases_and_convergents.py
import numpy as np

from twinphase.arith import dist_nearest_int, fixed_from_sqrt, frac_mul, frac_quadratic, to_words
from twinphase.diophantine import convergents, select_denominator

alpha = fixed_from_sqrt(2)
print("sqrt(2) ~", float(alpha), "carried with 192 fractional bits")

# frac(alpha m) stays exact to ~2^-125 even for m near 1e20
for m in (10, 10**6, 10**20):
    t = frac_mul(alpha, m)
    print(f"m = {m:>22d}  frac = {float(t):.15f}  ||alpha m|| = {dist_nearest_int(t):.3e}")

# convergents a/q with |alpha - a/q| < 1/q^2
cs = convergents(alpha, 12)
print("convergents:", ", ".join(str(c) for c in cs))
print("largest q below 100:", select_denominator(alpha, 10, 100))

# quadratic phases alpha n^2 as 64-bit words; their distances to Z look uniform
ns = np.arange(1, 200001)
hi, _ = to_words(frac_quadratic(alpha, None, ns.tolist()))
d = np.abs(hi.view(np.int64).astype(float)) / 2.0**64
hist, _ = np.histogram(d, bins=10, range=(0, 0.5))
print("||alpha n^2|| histogram (10 bins on [0, 1/2]):", hist)
