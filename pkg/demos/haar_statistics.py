"""
Random states on the four-fold level
====================================

Draw Haar-random superpositions of the four first-level determinants and
histogram their entanglement. The exact answer follows from the Beta(2, 2)
law of ``|c1|^2 + |c2|^2``.
"""

from mosh_ent.perturbation import HAAR_BINS, entanglement_distribution, haar_exact_statistics

stats = entanglement_distribution(2_000_000, seed=12345)
exact, mean = haar_exact_statistics()

for lo, hi, mc, ex in zip(HAAR_BINS[:-1], HAAR_BINS[1:], stats.bins, exact):
    print(f"({lo}, {hi}]  sampled {100 * mc:6.3f}%   exact {100 * ex:6.3f}%")
print(f"mean {stats.mean:.5f} (exact {mean} = {float(mean):.5f}), max {stats.max:.6f}")

# Same seed, same numbers, whatever the worker count.
assert entanglement_distribution(200_000, seed=1, workers=1) == entanglement_distribution(200_000, seed=1, workers=2)
