"""Shared enums, result containers and exceptions."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class DomainError(ValueError):
    """Parameters or labels outside the admissible domain of a model."""


class UnboundModelError(DomainError):
    """Repulsive coupling at or beyond the critical value: no bound states."""


class UnsupportedStateError(DomainError):
    """A state label for which no construction / closed form is available."""


class NormalizationError(DomainError):
    """Coefficient vector is not normalized."""


class PauliError(DomainError):
    """Repeated spin-orbital, or fewer orbitals than particles."""


class DegeneracyError(DomainError):
    """Basis determinants do not share one unperturbed energy."""


class ConvergenceError(RuntimeError):
    """A numerical procedure did not reach its tolerance.

    ``values`` carries whatever estimates were obtained so callers can report them.
    """

    def __init__(self, message: str, values: tuple = ()):
        super().__init__(message)
        self.values = tuple(values)


class Interaction(enum.Enum):
    """Sign of the harmonic electron-electron coupling."""

    ATTRACTIVE = 1
    REPULSIVE = -1

    @classmethod
    def parse(cls, value) -> "Interaction":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        if key in ("attractive", "+", "+1", "1", "att"):
            return cls.ATTRACTIVE
        if key in ("repulsive", "-", "-1", "rep"):
            return cls.REPULSIVE
        raise DomainError(f"unknown interaction sign {value!r}")


class Spin(enum.Enum):
    """Single-electron spin projection."""

    UP = 1
    DOWN = -1

    @property
    def symbol(self) -> str:
        return "+" if self is Spin.UP else "-"

    @property
    def flipped(self) -> "Spin":
        return Spin.DOWN if self is Spin.UP else Spin.UP

    @property
    def sort_key(self) -> int:
        # up before down: |0+,0-,...| ordering
        return 0 if self is Spin.UP else 1

    @classmethod
    def parse(cls, value) -> "Spin":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        if key in ("+", "up", "u", "1", "+1"):
            return cls.UP
        if key in ("-", "down", "d", "-1"):
            return cls.DOWN
        raise DomainError(f"unknown spin {value!r}")


@dataclass(frozen=True)
class EntanglementResult:
    """Value of the linear-entropy entanglement plus provenance.

    ``method`` is one of ``"closed-form"``, ``"oracle"`` or ``"finite-RDM"``.
    For oracle results ``convergence`` is the absolute change between the two
    quadrature orders listed in ``orders``.
    """

    value: float
    method: str
    convergence: Optional[float] = None
    orders: tuple = field(default=())

    def __float__(self) -> float:
        return float(self.value)


def linear_entropy(rho: np.ndarray, n_particles: int) -> float:
    """``1 - N Tr[rho^2]`` for a unit-trace one-body density matrix."""
    rho = np.asarray(rho)
    purity = float(np.real(np.sum(rho * rho.conj())))
    return 1.0 - n_particles * purity


def reduced_density_matrix(psi: np.ndarray, keep: int) -> np.ndarray:
    """One-body reduced density matrix from a weighted amplitude tensor.

    ``psi`` holds wavefunction values multiplied by the square roots of the
    quadrature weights, with the legs of the kept particle in the first ``keep``
    axes. The result is normalized to unit trace.
    """
    psi = np.asarray(psi)
    dim = int(np.prod(psi.shape[:keep]))
    m = psi.reshape(dim, -1)
    rho = m @ m.conj().T
    return rho / np.trace(rho).real
