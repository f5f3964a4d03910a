"""One-dimensional Moshinsky atom with three electrons.

Eigenstates are built from products of oscillator functions in Jacobi
coordinates, combined over the three cyclic Jacobi frames and the spin
triples with two electrons up and one down (or the reverse), so that the full
spin-orbital wavefunction is antisymmetric.

Entanglement is available two ways: exact closed forms in the relative
frequency ratio ``A = Lambda / omega`` and a quadrature oracle that builds the
spin-resolved one-body reduced density matrix on a grid.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .common import (
    ConvergenceError,
    DomainError,
    EntanglementResult,
    Interaction,
    Spin,
    UnboundModelError,
    UnsupportedStateError,
    linear_entropy,
    reduced_density_matrix,
)
from .oscillator import QuadratureRule, gauss_hermite, ho_wavefunction_1d

TAU_CRITICAL = 1.0 / math.sqrt(3.0)
_REPULSIVE_GUARD = 1e-12

FRAMES = ("plain", "primed", "double_primed")

_S2, _S3, _S6 = math.sqrt(2.0), math.sqrt(3.0), math.sqrt(6.0)


@dataclass(frozen=True)
class ModelParams3e:
    """Trap frequency ``omega``, coupling frequency ``lam`` and coupling sign."""

    omega: float = 1.0
    lam: float = 0.0
    sign: Interaction = Interaction.ATTRACTIVE

    def __post_init__(self):
        object.__setattr__(self, "sign", Interaction.parse(self.sign))
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega!r}")
        if not self.lam >= 0:
            raise DomainError(f"lambda must be non-negative, got {self.lam!r}")
        if self.sign is Interaction.REPULSIVE and not self.tau < TAU_CRITICAL - _REPULSIVE_GUARD:
            raise UnboundModelError(
                f"repulsive coupling requires tau < 1/sqrt(3) ~ {TAU_CRITICAL:.6f}; "
                f"got tau = {self.tau!r} (no bound states)"
            )

    @classmethod
    def from_tau(cls, tau: float, sign=Interaction.ATTRACTIVE, omega: float = 1.0) -> "ModelParams3e":
        return cls(omega=omega, lam=tau * omega, sign=sign)

    @property
    def tau(self) -> float:
        return self.lam / self.omega

    @property
    def A(self) -> float:
        return math.sqrt(1.0 + self.sign.value * 3.0 * self.tau ** 2)

    @property
    def Lambda(self) -> float:
        return self.omega * self.A

    @property
    def betas(self) -> tuple:
        return (self.omega ** 2, self.Lambda ** 2, self.Lambda ** 2)


class Sz(enum.Enum):
    PLUS_HALF = 1
    MINUS_HALF = -1

    @classmethod
    def parse(cls, value) -> "Sz":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        if key in ("+", "+1/2", "1/2", "0.5", "+0.5", "plus_half", "1"):
            return cls.PLUS_HALF
        if key in ("-", "-1/2", "-0.5", "minus_half", "-1"):
            return cls.MINUS_HALF
        raise DomainError(f"unknown S_z value {value!r}")


SUPPORTED_3E = ((0, 1, 0), (1, 1, 0), (0, 1, 1), (2, 1, 0), (1, 1, 1), (0, 1, 2), (0, 2, 1), (0, 0, 3))


@dataclass(frozen=True)
class StateLabel3e:
    """Jacobi-mode quanta ``|n1 n2 n3>`` plus the total ``S_z``."""

    n1: int
    n2: int
    n3: int
    sz: Sz = Sz.PLUS_HALF

    def __post_init__(self):
        for name in ("n1", "n2", "n3"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
        object.__setattr__(self, "sz", Sz.parse(self.sz))

    @classmethod
    def parse(cls, text: str, sz=Sz.PLUS_HALF) -> "StateLabel3e":
        digits = text.strip().strip("|>").replace(",", "")
        if len(digits) != 3 or not digits.isdigit():
            raise DomainError(f"three-electron state label must look like '010', got {text!r}")
        return cls(int(digits[0]), int(digits[1]), int(digits[2]), sz)

    @property
    def quanta(self) -> tuple:
        return (self.n1, self.n2, self.n3)

    @property
    def uses_cyclic_form(self) -> bool:
        """Odd ``n3``: one frame function per spin triple; even: frame differences."""
        return self.n3 % 2 == 1

    @property
    def supported(self) -> bool:
        return self.quanta in SUPPORTED_3E

    def with_sz(self, sz) -> "StateLabel3e":
        return StateLabel3e(self.n1, self.n2, self.n3, sz)

    def __str__(self) -> str:
        return f"{self.n1}{self.n2}{self.n3}"


def jacobi_coordinates(x1, x2, x3, frame: str = "plain"):
    """Jacobi coordinates ``(R1, R2, R3)`` of the requested cyclic frame."""
    r1 = (x1 + x2 + x3) / _S3
    if frame == "plain":
        return r1, (-2 * x1 + x2 + x3) / _S6, (x2 - x3) / _S2
    if frame == "primed":
        return r1, (x1 - 2 * x2 + x3) / _S6, (x3 - x1) / _S2
    if frame == "double_primed":
        return r1, (x1 + x2 - 2 * x3) / _S6, (x1 - x2) / _S2
    raise DomainError(f"unknown Jacobi frame {frame!r}")


def energy_3e(state: StateLabel3e, params: ModelParams3e) -> float:
    """``omega (n1 + 1/2) + Lambda (n2 + n3 + 1)``."""
    return params.omega * (state.n1 + 0.5) + params.Lambda * (state.n2 + state.n3 + 1)


def frame_function(quanta, params: ModelParams3e, frame: str, x1, x2, x3):
    """Product of oscillator functions of the given frame's Jacobi coordinates."""
    coords = jacobi_coordinates(x1, x2, x3, frame)
    out = 1.0
    for n, beta, r in zip(quanta, params.betas, coords):
        out = out * ho_wavefunction_1d(n, beta, r)
    return out


UP, DOWN = Spin.UP, Spin.DOWN
_TRIPLES_PLUS = ((UP, UP, DOWN), (UP, DOWN, UP), (DOWN, UP, UP))


def _spin_index(s: Spin) -> int:
    return 0 if s is Spin.UP else 1


def default_scale(params: ModelParams3e) -> float:
    """Grid dilation matching the diagonal Gaussian envelope ``(omega + 2 Lambda) / 3``."""
    return math.sqrt(3.0 / (params.omega + 2.0 * params.Lambda))


@dataclass(frozen=True, eq=False)
class SpinResolvedState3e:
    """``N * sum_k |Phi_k> |spins_k>`` with ``Phi_k`` a combination of frame functions.

    ``components`` holds ``(spin_triple, (c_plain, c_primed, c_double_primed))``.
    ``normalization`` is ``N``; ``gram`` is the frame-function overlap matrix it
    was computed from.
    """

    quanta: tuple
    params: ModelParams3e
    components: tuple
    normalization: float
    gram: np.ndarray

    def coordinate_part(self, spins, x1, x2, x3):
        spins = tuple(Spin.parse(s) for s in spins)
        total = 0.0
        for triple, coeffs in self.components:
            if triple != spins:
                continue
            for c, frame in zip(coeffs, FRAMES):
                if c:
                    total = total + c * frame_function(self.quanta, self.params, frame, x1, x2, x3)
        return self.normalization * total

    def __call__(self, x1, s1, x2, s2, x3, s3):
        """Amplitude ``Psi(x1 s1, x2 s2, x3 s3)``."""
        return self.coordinate_part((s1, s2, s3), x1, x2, x3)

    def amplitude_tensor(self, rule: QuadratureRule, weighted: bool = True) -> np.ndarray:
        """Amplitudes on the tensor grid, shape ``(n, n, n, 2, 2, 2)``.

        With ``weighted`` the square roots of the folded quadrature weights are
        multiplied in, so plain sums over the array approximate integrals.
        """
        n = rule.order
        x1, x2, x3 = np.meshgrid(rule.points, rule.points, rule.points, indexing="ij")
        frames = {f: frame_function(self.quanta, self.params, f, x1, x2, x3) for f in FRAMES}
        psi = np.zeros((n, n, n, 2, 2, 2))
        for triple, coeffs in self.components:
            idx = tuple(_spin_index(s) for s in triple)
            psi[(Ellipsis,) + idx] += self.normalization * sum(
                c * frames[f] for c, f in zip(coeffs, FRAMES) if c
            )
        if weighted:
            sw = np.sqrt(rule.folded_weights)
            psi *= np.einsum("i,j,k->ijk", sw, sw, sw)[..., None, None, None]
        return psi

    def norm(self, rule: QuadratureRule) -> float:
        return float(np.sqrt(np.sum(self.amplitude_tensor(rule) ** 2)))

    def one_body_rdm(self, rule: QuadratureRule) -> np.ndarray:
        """Spin-resolved one-body RDM on the grid, shape ``(2n, 2n)``, unit trace.

        Rows/columns are ordered ``(x_i, spin)``; entries carry ``sqrt(w_i w_j)``.
        """
        psi = self.amplitude_tensor(rule)
        psi = psi.transpose(0, 3, 1, 4, 2, 5)
        return reduced_density_matrix(psi, keep=2)

    def superpose(self, other: "SpinResolvedState3e", a: float, b: float,
                  rule: Optional[QuadratureRule] = None) -> "SpinResolvedState3e":
        """Normalized ``a |self> + b |other>`` (same quanta and parameters)."""
        if other.quanta != self.quanta or other.params != self.params:
            raise DomainError("can only superpose states with identical quanta and parameters")
        merged: dict = {}
        for state, amp in ((self, a), (other, b)):
            for triple, coeffs in state.components:
                acc = merged.setdefault(triple, np.zeros(3))
                acc += amp * state.normalization * np.asarray(coeffs)
        comps = tuple((t, tuple(float(c) for c in v)) for t, v in merged.items())
        return _normalized(self.quanta, self.params, comps, self.gram)


def _normalized(quanta, params, comps, gram) -> "SpinResolvedState3e":
    norm2 = sum(float(np.asarray(c) @ gram @ np.asarray(c)) for _, c in comps)
    scale = sum(float(np.dot(c, c)) for _, c in comps) * float(np.max(np.abs(gram)))
    if norm2 <= 1e-12 * scale:
        raise UnsupportedStateError(
            f"the antisymmetrized combination for |{''.join(map(str, quanta))}> vanishes identically"
        )
    return SpinResolvedState3e(quanta, params, comps, 1.0 / math.sqrt(norm2), gram)


def frame_gram(quanta, params: ModelParams3e, rule: Optional[QuadratureRule] = None) -> np.ndarray:
    """Overlap matrix of the three cyclic-frame coordinate functions."""
    if rule is None:
        rule = gauss_hermite(48, default_scale(params))
    x1, x2, x3 = np.meshgrid(rule.points, rule.points, rule.points, indexing="ij")
    w = np.einsum("i,j,k->ijk", rule.folded_weights, rule.folded_weights, rule.folded_weights)
    f = np.stack([frame_function(quanta, params, fr, x1, x2, x3).ravel() for fr in FRAMES])
    return (f * w.ravel()) @ f.T


_MAX_BUILD_QUANTUM = 12


def build_state_3e(state: StateLabel3e, params: ModelParams3e,
                   rule: Optional[QuadratureRule] = None) -> SpinResolvedState3e:
    """Antisymmetric ``S_z``-eigenstate for the label.

    Even ``n3``: differences of frame functions on each spin triple; odd
    ``n3``: one frame function per spin triple. ``S_z = -1/2`` flips every
    spin. The normalization constant comes from the numerically computed
    frame overlap matrix.
    """
    if max(state.quanta) > _MAX_BUILD_QUANTUM:
        raise UnsupportedStateError(f"quanta above {_MAX_BUILD_QUANTUM} are not supported: {state}")
    if state.uses_cyclic_form:
        # |++-> R'',  |+-+> R',  |-++> R
        coeffs = ((0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0))
    else:
        # |++-> R - R',  |+-+> R'' - R,  |-++> R' - R''
        coeffs = ((1.0, -1.0, 0.0), (-1.0, 0.0, 1.0), (0.0, 1.0, -1.0))
    triples = _TRIPLES_PLUS
    if state.sz is Sz.MINUS_HALF:
        triples = tuple(tuple(s.flipped for s in t) for t in triples)
    comps = tuple(zip(triples, coeffs))
    gram = frame_gram(state.quanta, params, rule)
    return _normalized(state.quanta, params, comps, gram)


# (denominator constant, exponent of (2+A)(1+2A), palindromic numerator coefficients)
_CLOSED_FORMS = {
    (0, 1, 0): (4, 2.5, (59, 232, 390, 232, 59)),
    (1, 1, 0): (4, 4.5, (177, 1034, 6213, 12582, 15392, 12582, 6213, 1034, 177)),
    (0, 1, 1): (64, 4.5, (3057, 24608, 93180, 196704, 251366, 196704, 93180, 24608, 3057)),
    (2, 1, 0): (16, 6.5, (2419, 19480, 218138, 564200, 1466241, 2943840, 3743124,
                          2943840, 1466241, 564200, 218138, 19480, 2419)),
    (1, 1, 1): (64, 6.5, (9171, 80546, 700555, 2659770, 6668841, 11416740, 13615794,
                          11416740, 6668841, 2659770, 700555, 80546, 9171)),
    (0, 1, 2): (256, 6.5, (42739, 506008, 3123242, 11179160, 26922957, 44982480, 53234988,
                           44982480, 26922957, 11179160, 3123242, 506008, 42739)),
    (0, 2, 1): (4096, 6.5, (727363, 8982520, 54219206, 196856600, 469858317, 776694000,
                            915625428, 776694000, 469858317, 196856600, 54219206, 8982520,
                            727363)),
    (0, 0, 3): (4096, 6.5, (762395, 9419160, 61156086, 232139320, 576896949, 982782000,
                            1171448436, 982782000, 576896949, 232139320, 61156086, 9419160,
                            762395)),
}

_DECOUPLED_3E = {
    (0, 1, 0): Fraction(0),
    (1, 1, 0): Fraction(8, 27),
    (0, 1, 1): Fraction(8, 27),
    (2, 1, 0): Fraction(4, 9),
    (1, 1, 1): Fraction(4, 9),
    (0, 1, 2): Fraction(4, 9),
    (0, 2, 1): Fraction(43, 108),
    (0, 0, 3): Fraction(1, 4),
}


def _require_supported(state: StateLabel3e):
    if not state.supported:
        raise UnsupportedStateError(
            f"no closed form for |{state}>; supported: "
            + ", ".join("".join(map(str, q)) for q in SUPPORTED_3E)
        )


def decoupled_limit_3e(state: StateLabel3e) -> Fraction:
    """Exact ``tau -> 0`` entanglement."""
    _require_supported(state)
    return _DECOUPLED_3E[state.quanta]


def epsilon_closed_from_A(quanta, A: float) -> float:
    denom, power, coeffs = _CLOSED_FORMS[tuple(quanta)]
    poly = P.polyval(A, coeffs)
    return 1.0 - math.sqrt(A) * poly / (denom * ((2.0 + A) * (1.0 + 2.0 * A)) ** power)


def epsilon_closed_3e(state: StateLabel3e, params: ModelParams3e) -> float:
    """Exact entanglement of a supported eigenstate."""
    _require_supported(state)
    if params.tau == 0.0:
        return float(_DECOUPLED_3E[state.quanta])
    return epsilon_closed_from_A(state.quanta, params.A)


ORACLE_ORDER = 48
ORACLE_CHECK_ORDER = 64
ORACLE_TOLERANCE = 1e-7


def _oracle_value(built: SpinResolvedState3e, rule: QuadratureRule) -> float:
    return linear_entropy(built.one_body_rdm(rule), 3)


def _oracle(make_state, params, rule, check_order):
    if rule is None:
        rule = gauss_hermite(ORACLE_ORDER, default_scale(params))
    if check_order is None:
        check_order = max(rule.order + 16, ORACLE_CHECK_ORDER) if rule.order < ORACLE_CHECK_ORDER \
            else min(rule.order + 16, 128)
    check = gauss_hermite(check_order, rule.scale)
    first = _oracle_value(make_state(rule), rule)
    second = _oracle_value(make_state(check), check)
    delta = abs(second - first)
    if delta > ORACLE_TOLERANCE:
        raise ConvergenceError(
            f"oracle not converged: order {rule.order} -> {first!r}, order {check.order} -> {second!r}",
            (first, second),
        )
    return EntanglementResult(second, "oracle", delta, (rule.order, check.order))


def epsilon_oracle_3e(state: StateLabel3e, params: ModelParams3e,
                      rule: Optional[QuadratureRule] = None,
                      check_order: Optional[int] = None) -> EntanglementResult:
    """Entanglement from the quadrature one-body RDM, with an order-refinement check."""
    return _oracle(lambda r: build_state_3e(state, params, r), params, rule, check_order)


def theta_mixture_state(state: StateLabel3e, theta: float, params: ModelParams3e,
                        rule: Optional[QuadratureRule] = None) -> SpinResolvedState3e:
    """``cos(theta) |state>_+ + sin(theta) |state>_-``."""
    if state.quanta not in ((0, 1, 1), (1, 1, 0)):
        raise UnsupportedStateError(f"theta mixtures are defined for |011> and |110>, got |{state}>")
    plus = build_state_3e(state.with_sz(Sz.PLUS_HALF), params, rule)
    minus = build_state_3e(state.with_sz(Sz.MINUS_HALF), params, rule)
    return plus.superpose(minus, math.cos(theta), math.sin(theta))


def epsilon_theta_mixture_3e(state: StateLabel3e, theta: float, params: ModelParams3e,
                             rule: Optional[QuadratureRule] = None) -> float:
    if not 0.0 <= theta < 2.0 * math.pi:
        raise DomainError(f"theta must lie in [0, 2*pi), got {theta!r}")
    result = _oracle(lambda r: theta_mixture_state(state, theta, params, r), params, rule, None)
    return result.value
