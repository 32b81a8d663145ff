# Exponential sums: geometric progressions, min-sums, the sum W and its bound.
# Run: python3 demos/02_exponential_sums.py
import math

from twinphase.arith import fixed_from_sqrt
from twinphase.diophantine import select_denominator
from twinphase.expsum import (CoefficientTable, WeightTable, eval_G, eval_W_direct, lemma3_check,
                              remark2_window, theorem1_bound, trivial_W_bound)
from twinphase.params import SieveParams
from twinphase.vaughan import vaughan_decompose

alpha = fixed_from_sqrt(2)

# |sum e(alpha n)| over a progression vs min(X/d + 1, 1/(2||alpha d||))
for d in (1, 12, 29, 70):
    r = lemma3_check(alpha, 10**6, d, 1 % d)
    print(f"d = {d:3d}: |S| = {r.abs_sum:10.4f}  bound = {r.bound:10.4f}")

# the triple min-sum G against its two bounds
q = select_denominator(alpha, 1, 1e7).q
G, r9, r10 = eval_G(alpha, 8, 8, 8, 1e7, 2, 2, 2, q)
print(f"G = {G:.1f}, ratio to first bound = {r9:.3f}, to second bound = {r10:.3f}, q = {q}")

# Vaughan's identity splits sum Lambda(n) g(n) into three bilinear pieces
dec = vaughan_decompose(10**4)
parts = dec.evaluate(lambda n: n * 0 + 1.0)
print("psi-type sum by pieces:", {k: round(v.real, 3) for k, v in parts.items()})
print("direct:", round(dec.direct(lambda n: n * 0 + 1.0).real, 3))

# W at a small scale, next to the trivial bound
p = SieveParams.from_exponents(2e5, 0.004, 0.14, strict=False)
coeffs = CoefficientTable.unit(min(p.K, 20))
W = eval_W_direct(p, WeightTable.singleton(1), coeffs, -2, alpha)
print(f"|W| = {abs(W):.1f}, trivial = {trivial_W_bound(p, WeightTable.singleton(1), coeffs, -2):.1f}")

# the five-term bound only wins at astronomically large x
for x in (1e6, 1e100):
    p = SieveParams.from_exponents(x, 1 / 1300, 32.5 / 1300)
    w = remark2_window(p)
    if w.empty:
        print(f"x = {x:.0e}: admissible q window is empty")
        continue
    b = theorem1_bound(p, math.exp(w.log_geometric_mean))
    print(f"x = {x:.0e}: bound / trivial = {b.total / (p.x * p.K):.3e}")
