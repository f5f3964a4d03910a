"""Degenerate perturbation theory in the weak-coupling limit.

A degenerate level of the non-interacting Hamiltonian is spanned by Slater
determinants. The harmonic pair interaction ``1/2 sum_{i<j} (r_i - r_j)^2``
is projected onto that space with the Slater-Condon rules; the eigenvectors of
the projected matrix are the ``lambda -> 0`` limits of the interacting
eigenstates, and their entanglement is evaluated from the one-body RDM in the
finite orbital basis.

Also here: the random-perturbation (Haar) statistics of the four-fold
three-electron level and a few closed-form helpers.
"""
from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .common import (
    DegeneracyError,
    DomainError,
    NormalizationError,
    PauliError,
    Spin,
    linear_entropy,
)
from .model2e import fock_darwin, axial, reduced_energy
from .oscillator import OrbitalIndex1D, gauss_hermite, ho_wavefunction_1d


# ---------------------------------------------------------------------------
# orbitals and determinants

@dataclass(frozen=True)
class OrbitalIndex3D:
    """Spin-orbital ``|nu m n, spin>``: Fock-Darwin state in the plane times an axial oscillator state."""

    nu: int
    m: int
    n: int
    spin: Spin

    def __post_init__(self):
        if int(self.nu) != self.nu or self.nu < 0 or int(self.n) != self.n or self.n < 0:
            raise DomainError(f"nu and n must be non-negative integers, got {self.nu!r}, {self.n!r}")
        if int(self.m) != self.m:
            raise DomainError(f"m must be an integer, got {self.m!r}")
        object.__setattr__(self, "spin", Spin.parse(self.spin))

    @property
    def spatial(self) -> tuple:
        return (self.nu, self.m, self.n)

    @property
    def k_plus(self) -> int:
        return self.nu + (abs(self.m) + self.m) // 2

    @property
    def k_minus(self) -> int:
        return self.nu + (abs(self.m) - self.m) // 2

    @property
    def sort_key(self) -> tuple:
        return (self.nu, abs(self.m), -self.m, self.n, self.spin.sort_key)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return f"({self.nu},{self.m},{self.n}){self.spin.symbol}"


def _spatial(orb) -> tuple:
    return orb.spatial if isinstance(orb, OrbitalIndex3D) else (orb.n,)


def _orbital_energy(orb, omega: float, y: float) -> float:
    if isinstance(orb, OrbitalIndex3D):
        return omega * reduced_energy(orb.nu, orb.m, orb.n, y)
    return omega * (orb.n + 0.5)


def _permutation_parity(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


@dataclass(frozen=True)
class SlaterDeterminant:
    """Antisymmetrized product ``|a, b, c|`` of distinct spin-orbitals in canonical order."""

    orbitals: tuple

    def __post_init__(self):
        orbs = tuple(self.orbitals)
        if len(set(orbs)) != len(orbs):
            raise PauliError(f"repeated spin-orbital in determinant {[str(o) for o in orbs]}")
        keys = [o.sort_key for o in orbs]
        if keys != sorted(keys):
            raise DomainError("orbitals must be in canonical order; use SlaterDeterminant.canonical")
        object.__setattr__(self, "orbitals", orbs)

    @classmethod
    def canonical(cls, orbitals) -> tuple:
        """``(determinant, sign)`` with ``sign`` the parity of the sorting permutation."""
        orbitals = list(orbitals)
        order = sorted(range(len(orbitals)), key=lambda i: orbitals[i].sort_key)
        return cls(tuple(orbitals[i] for i in order)), _permutation_parity(order)

    @classmethod
    def parse(cls, text: str) -> "SlaterDeterminant":
        """Parse a 1D determinant such as ``'0+,0-,2+'``."""
        det, sign = cls.canonical(OrbitalIndex1D.parse(t) for t in text.strip("| ").split(","))
        if sign != 1:
            raise DomainError(f"{text!r} is not in canonical order")
        return det

    @property
    def n_particles(self) -> int:
        return len(self.orbitals)

    @property
    def sort_key(self) -> tuple:
        return tuple(o.sort_key for o in self.orbitals)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def energy(self, omega: float = 1.0, y: float = 1.0) -> float:
        """Non-interacting energy; ``y`` is the field factor of the 3D orbitals."""
        return sum(_orbital_energy(o, omega, y) for o in self.orbitals)

    @property
    def sz(self) -> Fraction:
        return Fraction(sum(o.spin.value for o in self.orbitals), 2)

    def __str__(self) -> str:
        return "|" + ",".join(str(o) for o in self.orbitals) + "|"


def enumerate_level_3e(excitation: str = "first") -> list:
    """Determinants of the first (``E = 7/2``) or second (``E = 9/2``) excited level, both ``S_z`` sectors."""
    target = {"first": 2, "second": 3}.get(str(excitation).lower())
    if target is None:
        raise DomainError(f"excitation must be 'first' or 'second', got {excitation!r}")
    orbs = sorted(OrbitalIndex1D(n, s) for n in range(target + 1) for s in Spin)
    dets = [SlaterDeterminant(c) for c in itertools.combinations(orbs, 3)
            if sum(o.n for o in c) == target]
    return sorted(dets)


def enumerate_level_2e(excitation: str = "numr") -> list:
    """Two-electron degenerate levels of the field-free-coupling Hamiltonian.

    ``'numr'``: one quantum in ``nu`` or ``|m|`` (``sum K+ = sum K- = 1``);
    ``'nur'``: one axial quantum (``sum n = 1``).
    """
    pattern = {"numr": (1, 1, 0), "nur": (0, 0, 1)}.get(str(excitation).lower())
    if pattern is None:
        raise DomainError(f"excitation must be 'numr' or 'nur', got {excitation!r}")
    orbs = []
    for nu, m, n, s in itertools.product(range(2), range(-2, 3), range(2), Spin):
        o = OrbitalIndex3D(nu, m, n, s)
        if o.k_plus <= pattern[0] and o.k_minus <= pattern[1] and n <= pattern[2]:
            orbs.append(o)
    orbs.sort()
    dets = []
    for a, b in itertools.combinations(orbs, 2):
        if (a.k_plus + b.k_plus, a.k_minus + b.k_minus, a.n + b.n) == pattern:
            dets.append(SlaterDeterminant((a, b)))
    return sorted(dets)


# ---------------------------------------------------------------------------
# one-body integrals

class Perturbation(enum.Enum):
    HARMONIC_PAIR_3E = "harmonic_pair_3e"
    HARMONIC_PAIR_2E = "harmonic_pair_2e"

    @classmethod
    def parse(cls, value) -> "Perturbation":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


_INTEGRAL_ORDER = 16


def _spatial_integrals(spatials: list, three_d: bool, omega: float, b: float):
    """Matrices of ``r^2`` and of each Cartesian coordinate between spatial orbitals."""
    if three_d:
        big = math.sqrt(omega * omega + b * b)
        rxy = gauss_hermite(_INTEGRAL_ORDER, 1.0 / math.sqrt(big))
        rz = gauss_hermite(_INTEGRAL_ORDER, 1.0 / math.sqrt(omega))
        x, y, z = np.meshgrid(rxy.points, rxy.points, rz.points, indexing="ij")
        w = np.einsum("i,j,k->ijk", rxy.folded_weights, rxy.folded_weights, rz.folded_weights)
        vals = [fock_darwin(nu, m, big, x, y) * axial(n, omega, z) for nu, m, n in spatials]
        coords = (x, y, z)
    else:
        rule = gauss_hermite(_INTEGRAL_ORDER, 1.0 / math.sqrt(omega))
        x = rule.points
        w = rule.folded_weights
        vals = [ho_wavefunction_1d(n, omega * omega, x) for (n,) in spatials]
        coords = (x,)
    f = np.array([np.ravel(v) for v in vals], dtype=complex)
    fw = f.conj() * np.ravel(w)
    r2 = sum(c * c for c in coords)
    r2_mat = fw @ (f * np.ravel(r2)).T
    dip = [fw @ (f * np.ravel(c)).T for c in coords]
    return r2_mat, dip


class _Integrals:
    """One- and two-body integrals of the harmonic pair interaction over spin-orbitals."""

    def __init__(self, orbitals, n_particles: int, three_d: bool, omega: float, b: float):
        spatials = sorted({_spatial(o) for o in orbitals})
        self.index = {s: i for i, s in enumerate(spatials)}
        self.r2, self.dip = _spatial_integrals(spatials, three_d, omega, b)
        self.one_body_coeff = 0.5 * (n_particles - 1)

    def h(self, a, c) -> complex:
        if a.spin is not c.spin:
            return 0.0
        return self.one_body_coeff * self.r2[self.index[_spatial(a)], self.index[_spatial(c)]]

    def g(self, a, b, c, d) -> complex:
        """``<a(1) b(2)| -r1.r2 |c(1) d(2)>``."""
        if a.spin is not c.spin or b.spin is not d.spin:
            return 0.0
        ia, ib, ic, id_ = (self.index[_spatial(o)] for o in (a, b, c, d))
        return -sum(m[ia, ic] * m[ib, id_] for m in self.dip)


def _align(bra: SlaterDeterminant, ket: SlaterDeterminant):
    """Reorder ``ket`` for maximum coincidence with ``bra``.

    Returns ``(sign, aligned_ket, positions)``: the parity of the reordering,
    the reordered orbital list and the positions where it differs from ``bra``.
    Returns ``None`` when more than two orbitals differ.
    """
    bset, kset = set(bra.orbitals), set(ket.orbitals)
    extra = [o for o in ket.orbitals if o not in bset]
    if len(extra) > 2:
        return None
    aligned = list(bra.orbitals)
    positions = [i for i, o in enumerate(bra.orbitals) if o not in kset]
    for pos, o in zip(positions, extra):
        aligned[pos] = o
    where = {o: i for i, o in enumerate(ket.orbitals)}
    sign = _permutation_parity([where[o] for o in aligned])
    return sign, aligned, positions


def slater_condon(bra: SlaterDeterminant, ket: SlaterDeterminant, ints: _Integrals) -> complex:
    al = _align(bra, ket)
    if al is None:
        return 0.0
    sign, aligned, pos = al
    orbs = bra.orbitals
    if not pos:
        val = sum(ints.h(a, a) for a in orbs)
        for a, b in itertools.combinations(orbs, 2):
            val += ints.g(a, b, a, b) - ints.g(a, b, b, a)
        return val
    if len(pos) == 1:
        a, p = orbs[pos[0]], aligned[pos[0]]
        val = ints.h(a, p)
        for j, o in enumerate(orbs):
            if j != pos[0]:
                val += ints.g(a, o, p, o) - ints.g(a, o, o, p)
        return sign * val
    a, b = orbs[pos[0]], orbs[pos[1]]
    p, q = aligned[pos[0]], aligned[pos[1]]
    return sign * (ints.g(a, b, p, q) - ints.g(a, b, q, p))


# ---------------------------------------------------------------------------
# degenerate blocks

CLUSTER_GAP = 1e-9
_RREF_TOL = 1e-8


def _rref_null_space(mat: np.ndarray, tol: float = _RREF_TOL) -> np.ndarray:
    """Null-space basis from the reduced row-echelon form, columns left to right.

    Each free column contributes one vector (that variable set to 1, other
    free variables 0), normalized but not orthogonalized. Returns shape ``(n, k)``.
    """
    a = np.array(mat, dtype=float)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= tol:
            continue
        a[[r, p]] = a[[p, r]]
        a[r] /= a[r, c]
        for i in range(rows):
            if i != r:
                a[i] -= a[i, c] * a[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    out = np.zeros((cols, len(free)))
    for k, f in enumerate(free):
        out[f, k] = 1.0
        for i, pc in enumerate(pivots):
            out[pc, k] = -a[i, f]
        out[:, k] /= np.linalg.norm(out[:, k])
    return out


def _clusters(values: np.ndarray, gap: float = CLUSTER_GAP) -> list:
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] < gap * max(1.0, abs(values[i])):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


@dataclass(frozen=True, eq=False)
class DegenerateBlock:
    """Projected perturbation on a degenerate level with its eigen-decomposition.

    ``eigenvalues`` ascend. Inside a degenerate cluster ``eigenvectors`` is the
    row-echelon null-space basis of ``H - e I`` (deterministic and sparse, but
    not mutually orthogonal); ``orthonormal_eigenvectors`` is its Gram-Schmidt
    orthonormalization in the same order. Both are stored as columns.
    """

    basis: tuple
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    orthonormal_eigenvectors: np.ndarray
    clusters: tuple = field(default=())

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def n_particles(self) -> int:
        return self.basis[0].n_particles

    def entanglements(self, orthonormal: bool = False) -> list:
        vecs = self.orthonormal_eigenvectors if orthonormal else self.eigenvectors
        return [epsilon_finite(vecs[:, k], self.basis, self.n_particles) for k in range(self.size)]

    def entanglement_fractions(self, orthonormal: bool = False, max_denominator: int = 1000) -> list:
        return [Fraction(e).limit_denominator(max_denominator) for e in self.entanglements(orthonormal)]

    def cluster_vectors(self, index: int, orthonormal: bool = False) -> np.ndarray:
        """Eigenvectors (columns) of the ``index``-th degenerate cluster."""
        vecs = self.orthonormal_eigenvectors if orthonormal else self.eigenvectors
        return vecs[:, list(self.clusters[index])]


def diagonalize_block(matrix: np.ndarray, gap: float = CLUSTER_GAP):
    """Eigenvalues (ascending), row-echelon eigenvectors and orthonormalized eigenvectors."""
    h = np.asarray(matrix, dtype=float)
    vals, vecs = np.linalg.eigh(h)
    groups = _clusters(vals, gap)
    rref = np.empty_like(vecs)
    ortho = np.empty_like(vecs)
    for grp in groups:
        lam = float(np.mean(vals[grp]))
        vals[grp] = lam
        null = _rref_null_space(h - lam * np.eye(len(h)))
        if null.shape[1] != len(grp):
            null = vecs[:, grp]
        rref[:, grp] = null
        q, r = np.linalg.qr(null)
        ortho[:, grp] = q * np.sign(np.diag(r))
    return vals, rref, ortho, tuple(tuple(g) for g in groups)


def build_block(basis: Sequence[SlaterDeterminant], perturbation="harmonic_pair_3e",
                params=None, energy_tol: float = 1e-12) -> DegenerateBlock:
    """Matrix of the harmonic pair interaction on a degenerate basis, diagonalized.

    ``params`` supplies ``omega`` (and ``b`` for the 3D model); defaults to unit
    frequency and zero field.
    """
    perturbation = Perturbation.parse(perturbation)
    basis = tuple(basis)
    if not basis:
        raise DomainError("empty basis")
    omega = getattr(params, "omega", 1.0)
    b = getattr(params, "b", 0.0)
    three_d = perturbation is Perturbation.HARMONIC_PAIR_2E
    if any(isinstance(o, OrbitalIndex3D) != three_d for d in basis for o in d.orbitals):
        raise DomainError(f"basis orbitals do not match perturbation {perturbation.value}")
    n = basis[0].n_particles
    if any(d.n_particles != n for d in basis):
        raise DomainError("all determinants must have the same particle number")
    y = math.sqrt(1.0 + (b / omega) ** 2) + b / omega
    e0 = basis[0].energy(omega, y)
    for d in basis[1:]:
        if abs(d.energy(omega, y) - e0) > energy_tol * max(1.0, abs(e0)):
            raise DegeneracyError(
                f"{basis[0]} (E={e0!r}) and {d} (E={d.energy(omega, y)!r}) are not degenerate"
            )
    orbitals = {o for d in basis for o in d.orbitals}
    ints = _Integrals(orbitals, n, three_d, omega, b)
    h = np.array([[slater_condon(bi, bj, ints) for bj in basis] for bi in basis])
    if np.max(np.abs(h.imag)) > 1e-10:
        raise DomainError("projected perturbation has a non-negligible imaginary part")
    h = h.real
    h = 0.5 * (h + h.T)
    h[np.abs(h) < 1e-13] = 0.0
    vals, rref, ortho, groups = diagonalize_block(h)
    return DegenerateBlock(basis, h, vals, rref, ortho, groups)


# ---------------------------------------------------------------------------
# finite-basis entanglement

@dataclass(frozen=True, eq=False)
class FiniteRDM:
    """One-body RDM over the distinct spin-orbitals of a determinant family (unit trace)."""

    orbitals: tuple
    entries: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.orbitals)


NORM_TOL = 1e-10


def finite_rdm(coefficients, basis: Sequence[SlaterDeterminant], n_particles: Optional[int] = None) -> FiniteRDM:
    c = np.asarray(coefficients, dtype=complex)
    basis = tuple(basis)
    if len(c) != len(basis):
        raise DomainError(f"{len(c)} coefficients for a basis of {len(basis)} determinants")
    norm2 = float(np.sum(np.abs(c) ** 2))
    if abs(norm2 - 1.0) > NORM_TOL:
        raise NormalizationError(f"coefficients have squared norm {norm2!r}, expected 1")
    n = basis[0].n_particles if n_particles is None else n_particles
    orbs = tuple(sorted({o for d in basis for o in d.orbitals}))
    idx = {o: i for i, o in enumerate(orbs)}
    gamma = np.zeros((len(orbs), len(orbs)), dtype=complex)
    for i, bra in enumerate(basis):
        for j, ket in enumerate(basis):
            amp = np.conj(c[i]) * c[j]
            if amp == 0:
                continue
            al = _align(bra, ket)
            if al is None:
                continue
            sign, aligned, pos = al
            if not pos:
                for o in bra.orbitals:
                    gamma[idx[o], idx[o]] += amp
            elif len(pos) == 1:
                # <bra| a+_a a_p |ket>: gamma_{p a}
                gamma[idx[aligned[pos[0]]], idx[bra.orbitals[pos[0]]]] += sign * amp
    return FiniteRDM(orbs, gamma / n)


def epsilon_finite(coefficients, basis: Sequence[SlaterDeterminant], N: Optional[int] = None) -> float:
    """``1 - N Tr[rho^2]`` of a normalized superposition of determinants."""
    rdm = finite_rdm(coefficients, basis, N)
    n = basis[0].n_particles if N is None else N
    return linear_entropy(rdm.entries, n)


def distinct_orbital_count(basis: Sequence[SlaterDeterminant]) -> int:
    return len({o for d in basis for o in d.orbitals})


def epsilon_upper_bound(N: int, m_tilde: int) -> float:
    """Largest entanglement available with ``m_tilde`` orbitals: ``1 - N / m_tilde``."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    if int(m_tilde) != m_tilde or m_tilde < N:
        raise PauliError(f"{m_tilde} orbitals cannot hold {N} fermions")
    return 1.0 - N / m_tilde


def epsilon_gen_ent(c) -> float:
    """Entanglement of ``sum_i c_i |psi_i>`` over the four first-level determinants."""
    c = np.asarray(c, dtype=complex)
    if c.shape != (4,):
        raise DomainError(f"expected 4 coefficients, got shape {c.shape}")
    p = np.abs(c) ** 2
    if abs(p.sum() - 1.0) > 1e-12:
        raise NormalizationError(f"coefficients have squared norm {p.sum()!r}, expected 1")
    return float(_gen_ent(p[None, :])[0])


def _gen_ent(p: np.ndarray) -> np.ndarray:
    u = p[:, 0] + p[:, 1]
    v = p[:, 2] + p[:, 3]
    return 1.0 - (2.0 * u * u + 2.0 * v * v + 1.0) / 3.0


def epsilon_mixture(p: float) -> float:
    """Entanglement of ``p psi_5' + sqrt(1 - p^2) psi_6'`` in the second level: ``(4/147) p^2 (8 p^2 + 7)``."""
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    # exact for Fraction input
    coeff = Fraction(4, 147) if isinstance(p, Fraction) else 4.0 / 147.0
    return coeff * p * p * (8 * p * p + 7)


def mixture_root(target: float = 43 / 108) -> float:
    """``p`` in [0, 1] with ``epsilon_mixture(p) == target``."""
    if not 0.0 <= target <= 20 / 49:
        raise DomainError(f"target must lie in [0, 20/49], got {target!r}")
    return brentq(lambda p: epsilon_mixture(p) - target, 0.0, 1.0, xtol=1e-15)


# ---------------------------------------------------------------------------
# reference matrices and fitting

_H3 = math.sqrt(3.0) / 2.0
_R2 = 1.0 / math.sqrt(2.0)

PRINTED_3E_FIRST = np.array([
    [4.0, 0.0, _R2, 0.0],
    [0.0, 4.0, 0.0, _R2],
    [_R2, 0.0, 3.5, 0.0],
    [0.0, _R2, 0.0, 3.5],
])

PRINTED_3E_SECOND = np.array([
    [4.5, 0, 0, 0, -_H3, 0, _H3, 0, 0, 0],
    [0, 4.5, 0, 0, 0, -_H3, 0, _H3, 0, 0],
    [0, 0, 6, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 5, 1, 0, 0, 0, 0, 0],
    [-_H3, 0, 0, 1, 4.5, 0, 0.5, 0, 0, 0],
    [0, -_H3, 0, 0, 0, 5.5, 0, 0.5, 0, 0],
    [_H3, 0, 0, 0, 0.5, 0, 5.5, 0, 0, 0],
    [0, _H3, 0, 0, 0, 0.5, 0, 4.5, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 5, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 6],
])


def c1_2e(omega: float = 1.0, b: float = 0.0) -> float:
    return 1.0 / (2.0 * omega) + 2.0 / math.sqrt(b * b + omega * omega)


def d1_2e(omega: float = 1.0, b: float = 0.0) -> float:
    return 1.0 / omega + 1.0 / math.sqrt(b * b + omega * omega)


def d2_2e(omega: float = 1.0, b: float = 0.0) -> float:
    return 1.0 / (2.0 * omega)


def printed_2e_numr(c1: float, c2: float) -> np.ndarray:
    h = c1 * np.eye(8)
    for i, j, s in ((1, 5, 1), (1, 6, -1), (2, 5, -1), (2, 6, 1)):
        h[i, j] = h[j, i] = s * c2
    return h


def printed_2e_nur(d1: float, d2: float) -> np.ndarray:
    return np.array([
        [d1 + d2, 0, 0, 0],
        [0, d1, d2, 0],
        [0, d2, d1, 0],
        [0, 0, 0, d1 + d2],
    ])


@dataclass(frozen=True)
class MatrixFit:
    """``computed ~ scale * P @ printed @ P.T + shift * I`` with ``P`` a signed permutation.

    ``permutation[i]`` is the printed row matched to computed row ``i``.
    """

    scale: float
    shift: float
    permutation: tuple
    signs: tuple
    residual: float

    @property
    def is_identity(self) -> bool:
        return self.permutation == tuple(range(len(self.permutation))) and all(s == 1 for s in self.signs)

    def transform(self, printed: np.ndarray) -> np.ndarray:
        p = np.zeros((len(self.permutation),) * 2)
        for i, (j, s) in enumerate(zip(self.permutation, self.signs)):
            p[i, j] = s
        return self.scale * p @ np.asarray(printed) @ p.T + self.shift * np.eye(len(p))


FIT_THRESHOLD = 1e-9


def _signs_for(target: np.ndarray, template: np.ndarray, perm: Sequence[int], tol: float):
    n = len(perm)
    t = template[np.ix_(perm, perm)]
    signs = [0] * n
    for start in range(n):
        if signs[start]:
            continue
        signs[start] = 1
        queue = [start]
        while queue:
            i = queue.pop()
            for j in range(n):
                if i == j or abs(t[i, j]) <= tol:
                    continue
                s = signs[i] * int(np.sign(target[i, j] * t[i, j]))
                if signs[j] == 0:
                    signs[j] = s
                    queue.append(j)
                elif signs[j] != s:
                    return None
    return tuple(signs)


def fit_signed_permutation(computed, printed, tol: float = 1e-7) -> MatrixFit:
    """Find positive scale, shift and signed permutation mapping ``printed`` onto ``computed``.

    Scale and shift come from a least-squares fit of the sorted spectra; the
    permutation is found by backtracking over rows whose diagonal and
    off-diagonal magnitudes agree, and the signs by propagation along nonzero
    couplings. Raises ``DomainError`` when no consistent assignment exists.
    """
    h = np.asarray(computed, dtype=float)
    t = np.asarray(printed, dtype=float)
    if h.shape != t.shape:
        raise DomainError(f"shape mismatch {h.shape} vs {t.shape}")
    n = len(h)
    eh = np.linalg.eigvalsh(h)
    et = np.linalg.eigvalsh(t)
    design = np.column_stack([et, np.ones(n)])
    (scale, shift), *_ = np.linalg.lstsq(design, eh, rcond=None)
    if not scale > 0:
        raise DomainError(f"no positive scale relates the spectra (fitted {scale!r})")
    target = (h - shift * np.eye(n)) / scale
    tol_abs = tol * max(1.0, float(np.max(np.abs(t))))

    best = None
    perm = [-1] * n
    used = [False] * n

    def search(i):
        nonlocal best
        if i == n:
            signs = _signs_for(target, t, perm, tol_abs)
            if signs is None:
                return False
            fit = MatrixFit(float(scale), float(shift), tuple(perm), signs, 0.0)
            res = float(np.linalg.norm(h - fit.transform(t)))
            best = MatrixFit(float(scale), float(shift), tuple(perm), signs, res)
            return res < FIT_THRESHOLD * max(1.0, float(np.linalg.norm(h)))
        for j in range(n):
            if used[j] or abs(target[i, i] - t[j, j]) > tol_abs:
                continue
            if any(abs(abs(target[i, k]) - abs(t[j, perm[k]])) > tol_abs for k in range(i)):
                continue
            perm[i], used[j] = j, True
            if search(i + 1):
                return True
            perm[i], used[j] = -1, False
        return False

    search(0)
    if best is None:
        raise DomainError("no signed permutation maps the printed matrix onto the computed one")
    return best


# ---------------------------------------------------------------------------
# named blocks

BLOCK_NAMES = ("3e-first", "3e-second", "2e-numr", "2e-nur")


@dataclass(frozen=True, eq=False)
class BlockReport:
    name: str
    block: DegenerateBlock
    printed: np.ndarray
    fit: MatrixFit
    expected_entanglements: tuple


def named_block(name: str, omega: float = 1.0, b: float = 0.0) -> BlockReport:
    """Build one of the four reference blocks and fit it against its printed form."""
    from types import SimpleNamespace

    params = SimpleNamespace(omega=omega, b=b)
    if name == "3e-first":
        block = build_block(enumerate_level_3e("first"), "harmonic_pair_3e", params)
        printed = PRINTED_3E_FIRST
        expected = (Fraction(8, 27),)
    elif name == "3e-second":
        block = build_block(enumerate_level_3e("second"), "harmonic_pair_3e", params)
        printed = PRINTED_3E_SECOND
        expected = (Fraction(0), Fraction(1, 4), Fraction(20, 49), Fraction(4, 9))
    elif name == "2e-numr":
        block = build_block(enumerate_level_2e("numr"), "harmonic_pair_2e", params)
        # the reference form leaves the coupling symbolic; read it off the spectrum
        c2 = float(block.eigenvalues[-1] - block.eigenvalues[0]) / 4.0
        printed = printed_2e_numr(c1_2e(omega, b), c2)
        expected = (Fraction(0), Fraction(1, 2), Fraction(3, 4))
    elif name == "2e-nur":
        block = build_block(enumerate_level_2e("nur"), "harmonic_pair_2e", params)
        printed = printed_2e_nur(d1_2e(omega, b), d2_2e(omega, b))
        expected = (Fraction(0), Fraction(1, 2))
    else:
        raise DomainError(f"unknown block {name!r}; choose from {', '.join(BLOCK_NAMES)}")
    fit = fit_signed_permutation(block.matrix, printed)
    return BlockReport(name, block, printed, fit, expected)


# ---------------------------------------------------------------------------
# Haar statistics

def haar_sample(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unitarily invariant random unit vector in ``C^dim``."""
    if int(dim) != dim or dim < 1:
        raise DomainError(f"dim must be a positive integer, got {dim!r}")
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def haar_samples(count: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent Haar vectors as rows, shape ``(count, dim)``."""
    if int(dim) != dim or dim < 1:
        raise DomainError(f"dim must be a positive integer, got {dim!r}")
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


HAAR_BINS = (Fraction(0), Fraction(1, 9), Fraction(2, 9), Fraction(1, 3))
CHUNK = 1 << 20


@dataclass(frozen=True)
class HaarStatistics:
    samples: int
    bins: tuple
    mean: float
    max: float
    counts: tuple


def _chunk_stats(seed_seq: np.random.SeedSequence, size: int):
    rng = np.random.default_rng(seed_seq)
    z = rng.standard_normal((size, 8))
    p = z[:, :4] ** 2 + z[:, 4:] ** 2
    p /= p.sum(axis=1, keepdims=True)
    eps = _gen_ent(p)
    edges = np.array([float(e) for e in HAAR_BINS])
    counts = tuple(int(np.count_nonzero((eps > lo) & (eps <= hi))) for lo, hi in zip(edges[:-1], edges[1:]))
    return counts, float(np.sum(eps)), float(np.max(eps))


def default_workers() -> int:
    env = os.environ.get("MOSH_ENT_WORKERS")
    if env:
        try:
            n = int(env)
        except ValueError:
            n = 0
        if n < 1:
            raise DomainError(f"MOSH_ENT_WORKERS must be a positive integer, got {env!r}")
        return n
    return 1


def entanglement_distribution(samples: int, seed: int = 0, workers: Optional[int] = None) -> HaarStatistics:
    """Haar-sample the four-determinant first level and bin the entanglement.

    Work is split into fixed-size chunks, each with its own child seed, and
    merged in chunk order, so the result depends only on ``(seed, samples)``.
    """
    if int(samples) != samples or samples < 1:
        raise DomainError(f"samples must be a positive integer, got {samples!r}")
    if int(seed) != seed or seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise DomainError(f"workers must be positive, got {workers!r}")
    n_chunks = -(-int(samples) // CHUNK)
    sizes = [CHUNK] * (n_chunks - 1) + [int(samples) - CHUNK * (n_chunks - 1)]
    seqs = np.random.SeedSequence(int(seed)).spawn(n_chunks)
    if workers == 1:
        results = [_chunk_stats(s, k) for s, k in zip(seqs, sizes)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk_stats, seqs, sizes))
    counts = np.sum([r[0] for r in results], axis=0)
    total = math.fsum(r[1] for r in results)
    return HaarStatistics(
        samples=int(samples),
        bins=tuple(float(c) / samples for c in counts),
        mean=total / samples,
        max=max(r[2] for r in results),
        counts=tuple(int(c) for c in counts),
    )


def haar_exact_statistics() -> tuple:
    """Exact bin probabilities and mean for Haar-random first-level states.

    With ``u = |c1|^2 + |c2|^2`` Beta(2, 2)-distributed, ``eps = 1/3 - (4/3)(u - 1/2)^2``.
    """
    def cdf(t):
        return 3 * t * t - 2 * t ** 3

    def prob_below(e):
        # P(eps <= e) = P(|u - 1/2| >= d)
        d = math.sqrt(max(0.0, (1.0 / 3.0 - e) * 0.75))
        return 2.0 * cdf(0.5 - d)

    edges = [float(e) for e in HAAR_BINS]
    bins = tuple(prob_below(hi) - prob_below(lo) for lo, hi in zip(edges[:-1], edges[1:]))
    return bins, Fraction(4, 15)
