"""Three-dimensional two-electron Moshinsky atom in a uniform magnetic field.

The centre-of-mass ``R = (r1 + r2)/sqrt(2)`` and relative ``r = (r1 - r2)/sqrt(2)``
coordinates decouple. Each separates into a transverse Fock-Darwin problem
(frequency ``sqrt(omega^2 + b^2)`` for ``R``, ``sqrt(omega^2 + b^2 +- lambda^2)``
for ``r``) and an axial oscillator (``omega`` and ``sqrt(omega^2 +- lambda^2)``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .common import (
    ConvergenceError,
    DomainError,
    EntanglementResult,
    Interaction,
    UnboundModelError,
    UnsupportedStateError,
)
from .oscillator import QuadratureRule, assoc_laguerre, chi_z, gauss_hermite

_REPULSIVE_GUARD = 1e-12


@dataclass(frozen=True)
class ModelParams2e:
    """Trap frequency, coupling frequency, field parameter ``b = B/2c`` and coupling sign."""

    omega: float = 1.0
    lam: float = 0.0
    b: float = 0.0
    sign: Interaction = Interaction.ATTRACTIVE

    def __post_init__(self):
        object.__setattr__(self, "sign", Interaction.parse(self.sign))
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega!r}")
        if not self.lam >= 0:
            raise DomainError(f"lambda must be non-negative, got {self.lam!r}")
        if not self.b >= 0:
            raise DomainError(f"b must be non-negative, got {self.b!r}")
        if self.sign is Interaction.REPULSIVE and not self.tau < 1.0 - _REPULSIVE_GUARD:
            raise UnboundModelError(
                f"repulsive coupling requires lambda < omega (tau < 1); got tau = {self.tau!r}"
            )

    @classmethod
    def from_tau_sigma(cls, tau: float, sigma: float = 0.0, sign=Interaction.ATTRACTIVE,
                       omega: float = 1.0) -> "ModelParams2e":
        return cls(omega=omega, lam=tau * omega, b=sigma * omega, sign=sign)

    @property
    def tau(self) -> float:
        return self.lam / self.omega

    @property
    def sigma(self) -> float:
        return self.b / self.omega

    @property
    def omega_r(self) -> float:
        """Axial relative frequency ``sqrt(omega^2 +- lambda^2)``."""
        return math.sqrt(self.omega ** 2 + self.sign.value * self.lam ** 2)

    @property
    def y_R(self) -> float:
        s = self.sigma
        return math.sqrt(1.0 + s * s) + s

    @property
    def y_r(self) -> float:
        q = self.b / self.omega_r
        return math.sqrt(1.0 + q * q) + q

    @property
    def transverse_frequencies(self) -> tuple:
        """``(Omega_R, Omega_r)`` of the Fock-Darwin problems."""
        w2, b2 = self.omega ** 2, self.b ** 2
        return math.sqrt(w2 + b2), math.sqrt(w2 + b2 + self.sign.value * self.lam ** 2)

    @property
    def axial_frequencies(self) -> tuple:
        return self.omega, self.omega_r


class SpinConfig(enum.Enum):
    ANTIPARALLEL = 1
    PARALLEL = 2

    @property
    def alpha(self) -> int:
        return self.value

    @classmethod
    def parse(cls, value) -> "SpinConfig":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        if key in ("antiparallel", "a", "anti"):
            return cls.ANTIPARALLEL
        if key in ("parallel", "p", "par"):
            return cls.PARALLEL
        raise DomainError(f"unknown spin configuration {value!r}")


SUPPORTED_2E = (
    ((0, 0, 0), (0, 0, 0)),
    ((1, 0, 0), (0, 0, 0)),
    ((0, 0, 0), (1, 0, 0)),
    ((0, 0, 1), (0, 0, 0)),
    ((0, 0, 0), (0, 0, 1)),
)


@dataclass(frozen=True)
class StateLabel2e:
    """``|nuR mR nR, nur mr nr>`` with a spin configuration."""

    nuR: int
    mR: int
    nR: int
    nur: int
    mr: int
    nr: int
    spin: SpinConfig = SpinConfig.ANTIPARALLEL

    def __post_init__(self):
        for name in ("nuR", "nR", "nur", "nr"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
        for name in ("mR", "mr"):
            v = getattr(self, name)
            if int(v) != v:
                raise DomainError(f"{name} must be an integer, got {v!r}")
        object.__setattr__(self, "spin", SpinConfig.parse(self.spin))
        if self.spin is SpinConfig.PARALLEL and self.exchange_parity != -1:
            raise DomainError(
                f"parallel spin needs an antisymmetric coordinate part; |{self.label}> is symmetric"
            )

    @classmethod
    def parse(cls, text: str, spin=SpinConfig.ANTIPARALLEL) -> "StateLabel2e":
        """Parse ``'100,000'`` (digits ``nu m n`` for CM then relative)."""
        parts = text.strip().strip("{}|>").split(",")
        if len(parts) != 2 or not all(len(p.strip()) == 3 and p.strip().isdigit() for p in parts):
            raise DomainError(f"two-electron state label must look like '100,000', got {text!r}")
        cm, rel = (tuple(int(c) for c in p.strip()) for p in parts)
        return cls(*cm, *rel, spin)

    @property
    def cm(self) -> tuple:
        return (self.nuR, self.mR, self.nR)

    @property
    def rel(self) -> tuple:
        return (self.nur, self.mr, self.nr)

    @property
    def label(self) -> str:
        return "{}{}{},{}{}{}".format(*self.cm, *self.rel)

    @property
    def exchange_parity(self) -> int:
        """Sign of the coordinate part under ``r1 <-> r2`` (i.e. ``r -> -r``)."""
        return -1 if (abs(self.mr) + self.nr) % 2 else 1

    @property
    def alpha(self) -> int:
        return self.spin.alpha

    @property
    def supported(self) -> bool:
        return (self.cm, self.rel) in SUPPORTED_2E

    def __str__(self) -> str:
        return self.label


def reduced_energy(nu: int, m: int, n: int, y: float) -> float:
    """Dimensionless sector energy ``E'`` for frequency factor ``y``."""
    am = abs(m)
    return 0.5 * y * (2 * nu + am + m + 1) + (2 * nu + am - m + 1) / (2.0 * y) + (n + 0.5)


def energy_2e(state: StateLabel2e, params: ModelParams2e) -> float:
    return (params.omega * reduced_energy(*state.cm, params.y_R)
            + params.omega_r * reduced_energy(*state.rel, params.y_r))


def _family(state: StateLabel2e) -> str:
    if not state.supported:
        raise UnsupportedStateError(
            f"no closed form for |{state.label}>; supported: "
            + ", ".join("{}{}{},{}{}{}".format(*c, *r) for c, r in SUPPORTED_2E)
        )
    if state.nuR + state.nur == 1:
        return "100"
    if state.nR + state.nr == 1:
        return "001"
    return "000"


_DECOUPLED_2E = {
    ("000", 1): Fraction(0),
    ("100", 1): Fraction(3, 4),
    ("001", 1): Fraction(1, 2),
    ("001", 2): Fraction(0),
}


def decoupled_limit_2e(state: StateLabel2e) -> Fraction:
    """Exact ``tau -> 0`` entanglement (any field strength)."""
    return _DECOUPLED_2E[(_family(state), state.alpha)]


def _closed_terms(family: str, t2: float, s2: float, alpha: int) -> float:
    c = math.sqrt(1.0 + t2)
    a = math.sqrt(1.0 + s2 + t2)
    b = math.sqrt(1.0 + s2)
    if family == "000":
        return 8.0 * a * b * math.sqrt(c) / ((1.0 + c) * (a + b) ** 2)
    if family == "100":
        return 4.0 * a * b * math.sqrt(c) * (8.0 * a * a * b * b + t2 * t2) / ((1.0 + c) * (a + b) ** 6)
    return alpha * 2.0 * a * b * (6.0 + 3.0 * t2 + 2.0 * c) * math.sqrt(c) / ((1.0 + c) ** 3 * (a + b) ** 2)


def epsilon_closed_2e(state: StateLabel2e, params: ModelParams2e) -> float:
    """Exact entanglement of a supported state.

    Evaluated in an algebraically simplified form (with ``a = sqrt(1+sigma^2+-tau^2)``,
    ``b = sqrt(1+sigma^2)``, ``c = sqrt(1+-tau^2)``) that avoids the cancellation the
    expanded expressions suffer at small ``tau``.
    """
    family = _family(state)
    if params.tau == 0.0:
        return float(_DECOUPLED_2E[(family, state.alpha)])
    t2 = params.sign.value * params.tau ** 2
    return 1.0 - _closed_terms(family, t2, params.sigma ** 2, state.alpha)


def epsilon_closed_2e_expanded(state: StateLabel2e, params: ModelParams2e) -> float:
    """The closed forms as originally written (unsimplified); prone to cancellation near ``tau = 0``."""
    family = _family(state)
    t2 = params.sign.value * params.tau ** 2
    s = params.sigma
    c = math.sqrt(1 + t2)
    a = math.sqrt(1 + s * s + t2)
    b = math.sqrt(1 + s * s)
    if family == "000":
        num = 8 * b * c * a * (2 + 2 * s * s + t2 - 2 * b * a)
        den = (t2 ** 2 * (1 + c) * math.sqrt(1 / (1 - 4 / t2 + (4 + 5 * t2) / (t2 * c)))
               * math.sqrt((t2 + 2 * (1 + 3 * c)) / (1 + c)))
        return 1 - num / den
    root = math.sqrt((1 + t2 + c) / (2 + t2 + 6 * c)) * math.sqrt((2 + t2 + 6 * c) / (1 + c))
    if family == "100":
        num = 4 * b * c * a * (8 + 8 * s ** 4 + 8 * t2 + t2 ** 2 + 8 * s * s * (2 + t2))
        return 1 - num / ((1 + c) * root * (b + a) ** 6)
    return 1 - state.alpha * 2 * b * a * (6 + 3 * t2 + 2 * c) * root / ((1 + c) ** 3 * (b + a) ** 2)


def epsilon_asymptotic_2e(state: StateLabel2e, tau: float, sign=Interaction.ATTRACTIVE,
                          spin=None) -> float:
    """``sigma -> infinity`` limit of the closed forms."""
    sign = Interaction.parse(sign)
    if not tau >= 0:
        raise DomainError(f"tau must be non-negative, got {tau!r}")
    if sign is Interaction.REPULSIVE and not tau < 1.0 - _REPULSIVE_GUARD:
        raise UnboundModelError(f"repulsive coupling requires tau < 1; got {tau!r}")
    family = _family(state)
    alpha = state.alpha if spin is None else SpinConfig.parse(spin).alpha
    t2 = sign.value * tau * tau
    c = math.sqrt(1.0 + t2)
    if family == "000":
        return 1.0 - 2.0 * math.sqrt(c) / (1.0 + c)
    if family == "100":
        return 1.0 - math.sqrt(c) / (2.0 * (1.0 + c))
    return 1.0 - alpha * (6.0 + 3.0 * t2 + 2.0 * c) * math.sqrt(c) / (2.0 * (1.0 + c) ** 3)


def single_particle_entropies(omega: float, b: float) -> tuple:
    """Linear and von Neumann entropies of the one-electron ground-state density."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    if not b >= 0:
        raise DomainError(f"b must be non-negative, got {b!r}")
    s_l = 1.0 - math.sqrt(omega) * math.sqrt(b * b + omega * omega) / (2.0 * math.sqrt(2.0) * math.pi ** 1.5)
    s_vn = 0.5 * (3.0 * (1.0 + math.log(math.pi)) - math.log(omega) - math.log(b * b + omega * omega))
    return s_l, s_vn


def fock_darwin(nu: int, m: int, freq: float, x, y):
    """Normalized transverse eigenfunction ``R_{nu|m|}(sqrt(freq) rho) e^{i m phi}``."""
    am = abs(m)
    xi2 = freq * (x * x + y * y)
    norm = math.sqrt(freq * math.factorial(nu) / (math.pi * math.factorial(nu + am)))
    radial = norm * xi2 ** (0.5 * am) * np.exp(-0.5 * xi2) * assoc_laguerre(nu, am, xi2)
    if m == 0:
        return radial
    return radial * np.exp(1j * m * np.arctan2(y, x))


def axial(n: int, freq: float, z):
    """Normalized axial oscillator function of the given frequency."""
    return freq ** 0.25 * chi_z(n, math.sqrt(freq) * z)


XY_ORDER = 16
Z_ORDER = 32
ORACLE_TOLERANCE = 1e-7
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _xy_purity(state: StateLabel2e, params: ModelParams2e, rule: QuadratureRule) -> float:
    om_R, om_r = params.transverse_frequencies
    p = rule.points
    x1, y1, x2, y2 = np.meshgrid(p, p, p, p, indexing="ij")
    amp = (fock_darwin(state.nuR, state.mR, om_R, (x1 + x2) * _INV_SQRT2, (y1 + y2) * _INV_SQRT2)
           * fock_darwin(state.nur, state.mr, om_r, (x1 - x2) * _INV_SQRT2, (y1 - y2) * _INV_SQRT2))
    sw = np.sqrt(rule.folded_weights)
    amp = amp * np.einsum("i,j,k,l->ijkl", sw, sw, sw, sw)
    m = amp.reshape(rule.order ** 2, -1)
    rho = m @ m.conj().T
    rho /= np.trace(rho).real
    return float(np.real(np.sum(rho * rho.conj())))


def _z_purity(state: StateLabel2e, params: ModelParams2e, rule: QuadratureRule) -> float:
    om_R, om_r = params.axial_frequencies
    z1, z2 = np.meshgrid(rule.points, rule.points, indexing="ij")
    amp = axial(state.nR, om_R, (z1 + z2) * _INV_SQRT2) * axial(state.nr, om_r, (z1 - z2) * _INV_SQRT2)
    sw = np.sqrt(rule.folded_weights)
    amp = amp * np.outer(sw, sw)
    rho = amp @ amp.T
    rho /= np.trace(rho)
    return float(np.sum(rho * rho))


def default_scales(params: ModelParams2e) -> tuple:
    """Grid dilations for the transverse and axial sectors."""
    om_R, om_r = params.transverse_frequencies
    az_R, az_r = params.axial_frequencies
    return math.sqrt(2.0 / (om_R + om_r)), math.sqrt(2.0 / (az_R + az_r))


def coordinate_purity_2e(state: StateLabel2e, params: ModelParams2e,
                         xy_rule: QuadratureRule, z_rule: QuadratureRule) -> float:
    """``Tr[(rho^(c))^2]`` as the product of transverse and axial purities."""
    return _xy_purity(state, params, xy_rule) * _z_purity(state, params, z_rule)


def epsilon_oracle_2e(state: StateLabel2e, params: ModelParams2e,
                      rule: Optional[QuadratureRule] = None,
                      z_rule: Optional[QuadratureRule] = None) -> EntanglementResult:
    """Entanglement from quadrature purities of the coordinate RDM.

    ``rule`` drives the 4-dimensional transverse grid and ``z_rule`` the
    axial grid. Both are re-run at a higher order to estimate convergence.
    """
    s_xy, s_z = default_scales(params)
    if rule is None:
        rule = gauss_hermite(XY_ORDER, s_xy)
    if z_rule is None:
        z_rule = gauss_hermite(Z_ORDER, s_z)
    fine_xy = gauss_hermite(min(rule.order + 8, 128), rule.scale)
    fine_z = gauss_hermite(min(z_rule.order + 16, 128), z_rule.scale)
    first = 1.0 - state.alpha * coordinate_purity_2e(state, params, rule, z_rule)
    second = 1.0 - state.alpha * coordinate_purity_2e(state, params, fine_xy, fine_z)
    delta = abs(second - first)
    if delta > ORACLE_TOLERANCE:
        raise ConvergenceError(
            f"oracle not converged: orders ({rule.order}, {z_rule.order}) -> {first!r}, "
            f"({fine_xy.order}, {fine_z.order}) -> {second!r}",
            (first, second),
        )
    return EntanglementResult(second, "oracle", delta, ((rule.order, z_rule.order), (fine_xy.order, fine_z.order)))
