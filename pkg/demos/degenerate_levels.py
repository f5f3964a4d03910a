"""
Weak coupling on degenerate levels
==================================

At vanishing coupling the eigenstates of a degenerate level are fixed by
the perturbation restricted to that level. Their entanglement is finite
even though the coupling itself goes to zero.
"""

import numpy as np

from mosh_ent.perturbation import (
    BLOCK_NAMES,
    distinct_orbital_count,
    epsilon_finite,
    epsilon_mixture,
    epsilon_upper_bound,
    mixture_root,
    named_block,
)

for name in BLOCK_NAMES:
    r = named_block(name)
    blk = r.block
    print(f"{name}: {blk.size} determinants, scale {r.fit.scale:.4f}, shift {r.fit.shift:.4f}, "
          f"residual {r.fit.residual:.1e}")
    print("   eigenvalues", np.round(blk.eigenvalues, 6))
    print("   epsilon    ", [str(f) for f in blk.entanglement_fractions()])

# The printed four-by-four matrix lists its basis in a different order.
print("\n3e-first row permutation:", named_block("3e-first").fit.permutation)

# Inside the six-fold cluster the choice of basis matters: orthonormalizing
# changes two of the values.
second = named_block("3e-second").block
print("row-echelon  ", [str(f) for f in second.entanglement_fractions()])
print("orthonormal  ", [str(f) for f in second.entanglement_fractions(orthonormal=True)])

# Sweeping between the last two cluster vectors traces eps(p).
v5, v6 = second.cluster_vectors(2)[:, 4:].T
for p in (0.0, 0.5, 0.9, 1.0):
    psi = p * v5 + np.sqrt(1 - p * p) * v6
    print(f"p = {p:.1f}: eps = {epsilon_finite(psi, second.basis):.6f}  formula {epsilon_mixture(p):.6f}")
print("p reaching 43/108:", round(mixture_root(), 5))

m = distinct_orbital_count(second.basis)
print(f"\nupper bound with {m} orbitals: {epsilon_upper_bound(3, m):.4f}")
