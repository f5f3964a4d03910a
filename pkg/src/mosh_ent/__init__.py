"""Entanglement of eigenstates of Moshinsky atoms (harmonically coupled fermions in a harmonic trap).

Two models are covered: three electrons on a line with harmonic pair coupling,
and two electrons in a 3D harmonic trap with a uniform magnetic field. For
each, entanglement (linear entropy of the one-body reduced density matrix) is
available in closed form and from an independent quadrature oracle. The
``perturbation`` module treats the weak-coupling limit of degenerate levels.
"""
from .common import (
    ConvergenceError,
    DegeneracyError,
    DomainError,
    EntanglementResult,
    Interaction,
    NormalizationError,
    PauliError,
    Spin,
    UnboundModelError,
    UnsupportedStateError,
    linear_entropy,
)
from .oscillator import (
    OrbitalIndex1D,
    QuadratureRule,
    assoc_laguerre,
    chi_z,
    gauss_hermite,
    hermite,
    ho_wavefunction_1d,
    radial_2d,
)
from .model3e import (
    ModelParams3e,
    SpinResolvedState3e,
    StateLabel3e,
    Sz,
    build_state_3e,
    decoupled_limit_3e,
    energy_3e,
    epsilon_closed_3e,
    epsilon_oracle_3e,
    epsilon_theta_mixture_3e,
    jacobi_coordinates,
)
from .model2e import (
    ModelParams2e,
    SpinConfig,
    StateLabel2e,
    decoupled_limit_2e,
    energy_2e,
    epsilon_asymptotic_2e,
    epsilon_closed_2e,
    epsilon_oracle_2e,
    single_particle_entropies,
)
from .perturbation import (
    DegenerateBlock,
    FiniteRDM,
    OrbitalIndex3D,
    SlaterDeterminant,
    build_block,
    entanglement_distribution,
    enumerate_level_2e,
    enumerate_level_3e,
    epsilon_finite,
    epsilon_gen_ent,
    epsilon_mixture,
    epsilon_upper_bound,
    haar_sample,
    haar_samples,
    named_block,
)

__version__ = "0.1.0"
