# Primes p with p + 2 = P_2 and ||sqrt(2) p^2|| < p^-theta, counted and sieved.
# Run: python3 demos/04_twin_phase_experiment.py [x]
import sys

from twinphase.experiment import ExperimentConfig, run_experiment

x = int(sys.argv[1]) if len(sys.argv) > 1 else 10**5
cfg = ExperimentConfig.sqrt(2, theta=0.3, x=x, delta=0.05, c0_cutoff=10**6)
rep = run_experiment(cfg, threads=2)

print(f"x = {x}, theta = 0.3")
print(f"direct count {rep.direct_count}, heuristic {rep.expected_count:.1f}")
print("first witnesses:", [w["p"] for w in rep.witnesses[:10]])
print(f"S1..S4 = {rep.S1:.2f}, {rep.S2:.2f}, {rep.S3:.2f}, {rep.S4:.2f}")
print(f"S1 - S2/2 - S3/2 - S4 = {rep.decomposition:.2f}  vs  S(A, x^(1/3)) = {rep.S_exact:.2f}")
for name, piece in rep.pieces.items():
    print(f"  {name}: {piece['lower']:.2f} <= {piece['exact']:.2f} <= {piece['upper']:.2f}")
print(f"assembled Rosser lower bound {rep.lower_bound_estimate:.2f}")
print(f"C0 ~ {rep.C0:.7f}; sum |R1(d)| / (x / log^3 x) = {rep.r1_stats['ratios'][3]:.3f}")
