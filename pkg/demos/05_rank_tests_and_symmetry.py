"""Mann-Whitney tests, the class matrix, and time-reversal symmetry.

Small tie-free samples take the exact enumeration route; large ones the
tie-corrected normal approximation. The symmetry check compares a sample
of log growth rates with its own mirror image, using the null variance
derived for that dependent pairing.
"""

import numpy as np

from pagegrowth.stats import (
    class_test_matrix,
    detailed_balance_check,
    format_p,
    mann_whitney,
)

print("exact route on a tiny sample:")
r = mann_whitney([4, 5, 6], [1, 2, 3], alternative="greater")
print(f"  U={r.u_statistic:.0f}, p={r.p_value} ({r.method}); "
      "only 1 of C(6,3)=20 rank assignments is as extreme")

rng = np.random.default_rng(1)
x = rng.normal(0.3, 1.0, size=500)
y = rng.normal(0.0, 1.0, size=500)
r = mann_whitney(x, y, alternative="greater")
print(f"\nshifted large samples: p={format_p(r.p_value)} ({r.method})")

print("\npairwise class matrix under the null (all bins identical law):")
bins = {f"class{i}": list(rng.normal(size=400)) for i in range(4)}
for cell in class_test_matrix(bins, alternatives=("greater",)):
    print(f"  {cell.row} > {cell.col}: p={format_p(cell.result.p_value)}")

print("\ndetailed balance (time-reversal symmetry) of growth rates:")
sym = rng.laplace(0.0, 1.0, size=100_000)
r = detailed_balance_check(sym)
print(f"  symmetric Laplace(0,1):   p={format_p(r.p_value)} (no violation)")
drift = rng.laplace(0.3, 1.0, size=100_000)
r = detailed_balance_check(drift)
print(f"  drifting Laplace(0.3,1):  p={format_p(r.p_value)} (violation detected)")
