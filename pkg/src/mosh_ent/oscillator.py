"""Hermite/Laguerre polynomials, oscillator eigenfunctions and Gauss-Hermite rules.

All functions accept scalars or numpy arrays for the coordinate argument and
broadcast over it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .common import ConvergenceError, DomainError, Spin

MAX_DEGREE = 60
MAX_ORDER = 128


def _check_degree(n: int, name: str = "n") -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {n!r}")
    if n > MAX_DEGREE:
        raise DomainError(
            f"{name}={n} exceeds the supported degree cap {MAX_DEGREE}; "
            "use scaled (Hermite-function) evaluation instead"
        )
    return int(n)


def hermite(n: int, x):
    """Physicists' Hermite polynomial ``H_n(x)`` by upward recurrence."""
    n = _check_degree(n)
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def assoc_laguerre(nu: int, k: int, x):
    """Associated Laguerre polynomial ``L_nu^k(x)``."""
    nu = _check_degree(nu, "nu")
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    x = np.asarray(x, dtype=float)
    l_prev = np.ones_like(x)
    if nu == 0:
        return l_prev if l_prev.ndim else float(l_prev)
    l_cur = 1.0 + k - x
    for j in range(1, nu):
        l_prev, l_cur = l_cur, ((2 * j + 1 + k - x) * l_cur - (j + k) * l_prev) / (j + 1)
    return l_cur if l_cur.ndim else float(l_cur)


def hermite_functions(nmax: int, xi) -> np.ndarray:
    """Unit-frequency oscillator eigenfunctions ``psi_0 .. psi_nmax`` at ``xi``.

    Uses the normalized three-term recurrence, so it stays finite far beyond
    the polynomial degree cap. Returns an array of shape ``(nmax + 1,) + xi.shape``.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.empty((nmax + 1,) + xi.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for k in range(1, nmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * xi * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def ho_wavefunction_1d(n: int, beta: float, x):
    """Normalized 1D oscillator eigenfunction for potential ``beta x^2 / 2``.

    ``(beta^{1/4} / (2^n n! sqrt(pi)))^{1/2} exp(-sqrt(beta) x^2 / 2) H_n(beta^{1/4} x)``
    """
    n = _check_degree(n)
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    b4 = beta ** 0.25
    norm = math.sqrt(b4 / (2.0 ** n * math.factorial(n) * math.sqrt(math.pi)))
    x = np.asarray(x, dtype=float)
    out = norm * np.exp(-0.5 * math.sqrt(beta) * x * x) * hermite(n, b4 * x)
    return out if np.ndim(out) else float(out)


def chi_z(n: int, z):
    """Unit-frequency 1D oscillator eigenstate (the axial factor in cylindrical states)."""
    return ho_wavefunction_1d(n, 1.0, z)


def radial_2d(nu: int, abs_m: int, rho):
    """Normalized 2D oscillator radial function, ``int_0^inf R^2 rho drho = 1``."""
    nu = _check_degree(nu, "nu")
    if int(abs_m) != abs_m or abs_m < 0:
        raise DomainError(f"abs_m must be a non-negative integer, got {abs_m!r}")
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("rho must be non-negative")
    norm = math.sqrt(2.0 * math.factorial(nu) / math.factorial(nu + abs_m))
    out = norm * rho ** abs_m * np.exp(-0.5 * rho * rho) * assoc_laguerre(nu, abs_m, rho * rho)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Hermite rule on a dilated grid.

    ``nodes``/``weights`` are the standard rule for the weight ``exp(-x^2)``
    (so ``sum(weights * p(nodes))`` is exact for polynomials of degree
    ``<= 2*order - 1``). The integration grid is ``points = scale * nodes`` and
    ``folded_weights`` absorb both the dilation and ``exp(+node^2)``, so that
    ``sum(folded_weights * f(points))`` approximates ``int f(x) dx``.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    scale: float
    folded_weights: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return self.scale * self.nodes

    def integrate(self, f) -> float:
        """``int f(x) dx`` for a callable or for values sampled on ``points``."""
        vals = f(self.points) if callable(f) else np.asarray(f)
        return float(np.dot(self.folded_weights, vals))

    def rescaled(self, scale: float) -> "QuadratureRule":
        return gauss_hermite(self.order, scale)


@lru_cache(maxsize=64)
def _standard_rule(order: int):
    # Golub-Welsch: eigenvalues of the Jacobi matrix as starting guesses
    off = np.sqrt(np.arange(1, order) / 2.0)
    guess = np.linalg.eigvalsh(np.diag(off, 1) + np.diag(off, -1))
    x = np.sort(guess)
    for _ in range(100):
        psi = hermite_functions(order, x)
        deriv = math.sqrt(2.0 * order) * psi[order - 1] - x * psi[order]
        step = psi[order] / deriv
        x = x - step
        if np.max(np.abs(step)) <= 1e-14 * max(1.0, float(np.max(np.abs(x)))):
            break
    else:
        raise ConvergenceError(f"Gauss-Hermite node iteration did not converge for order {order}")
    x = 0.5 * (x - x[::-1])
    psi_last = hermite_functions(order - 1, x)[order - 1]
    folded = 1.0 / (order * psi_last * psi_last)
    folded = 0.5 * (folded + folded[::-1])
    weights = folded * np.exp(-x * x)
    x.setflags(write=False)
    weights.setflags(write=False)
    folded.setflags(write=False)
    return x, weights, folded


def gauss_hermite(order: int, scale: float = 1.0) -> QuadratureRule:
    """Gauss-Hermite rule of the given order on the grid ``scale * nodes``."""
    if int(order) != order or not 2 <= order <= MAX_ORDER:
        raise DomainError(f"order must be an integer in [2, {MAX_ORDER}], got {order!r}")
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale!r}")
    x, w, folded = _standard_rule(int(order))
    fw = scale * folded
    fw.setflags(write=False)
    return QuadratureRule(int(order), x, w, float(scale), fw)


@dataclass(frozen=True)
class OrbitalIndex1D:
    """Spin-orbital ``|n, spin>`` of a single 1D oscillator."""

    n: int
    spin: Spin

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"n must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "spin", Spin.parse(self.spin))

    @property
    def sort_key(self) -> tuple:
        return (self.n, self.spin.sort_key)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return f"{self.n}{self.spin.symbol}"

    @classmethod
    def parse(cls, text: str) -> "OrbitalIndex1D":
        text = text.strip()
        return cls(int(text[:-1]), Spin.parse(text[-1]))
