"""
Three electrons in a harmonic trap
==================================

Entanglement of the low-lying eigenstates as the pair coupling grows,
checked against a brute-force quadrature of the one-body density matrix.
"""

import math

import numpy as np

from mosh_ent import Interaction, ModelParams3e, StateLabel3e
from mosh_ent.model3e import (
    SUPPORTED_3E,
    TAU_CRITICAL,
    build_state_3e,
    decoupled_limit_3e,
    energy_3e,
    epsilon_closed_3e,
    epsilon_oracle_3e,
    epsilon_theta_mixture_3e,
)

states = [StateLabel3e(*q) for q in SUPPORTED_3E]

# At zero coupling the values are exact rationals; only the ground state is
# a single determinant.
print("decoupled limits:", {str(s): str(decoupled_limit_3e(s)) for s in states})

# Attractive coupling: every state climbs monotonically toward 1.
taus = np.linspace(0, 3, 7)
print("\ntau   " + "  ".join(f"{s}   " for s in states))
for t in taus:
    p = ModelParams3e.from_tau(t)
    print(f"{t:4.1f}  " + "  ".join(f"{epsilon_closed_3e(s, p):.4f}" for s in states))

# Repulsive coupling is bounded by tau < 1/sqrt(3).
p = ModelParams3e.from_tau(0.99 * TAU_CRITICAL, Interaction.REPULSIVE)
print(f"\nrepulsive, tau = {p.tau:.4f}:", {str(s): round(epsilon_closed_3e(s, p), 4) for s in states})

# The closed forms against the quadrature oracle
p = ModelParams3e.from_tau(0.5)
for s in states[:3]:
    r = epsilon_oracle_3e(s, p)
    print(f"{s}: closed {epsilon_closed_3e(s, p):.12f}  oracle {r.value:.12f}  (order step {r.convergence:.1e})")

# The cyclic frame functions overlap: the Gram matrix of |010> has -1/2 off the diagonal.
print("\nGram matrix of |010>:\n", np.round(build_state_3e(states[0], p).gram, 12))

# The degenerate pair |110>, |011> swaps order with the sign of the coupling.
for sign in Interaction:
    q = ModelParams3e.from_tau(0.3, sign)
    e110, e011 = (energy_3e(StateLabel3e.parse(lab), q) for lab in ("110", "011"))
    print(f"{sign.name.lower():>11}: E(110) = {e110:.4f}, E(011) = {e011:.4f}")

# Mixing the two S_z partners leaves the entanglement unchanged.
s = StateLabel3e.parse("011")
q = ModelParams3e.from_tau(0.4)
print("\ntheta mixing:", [round(epsilon_theta_mixture_3e(s, th, q), 10) for th in (0, math.pi / 5, math.pi / 2)])
