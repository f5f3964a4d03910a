import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mosh_ent.common import ConvergenceError, DomainError, Interaction, UnboundModelError, UnsupportedStateError
from mosh_ent.model2e import (
    SUPPORTED_2E,
    ModelParams2e,
    SpinConfig,
    StateLabel2e,
    axial,
    decoupled_limit_2e,
    energy_2e,
    epsilon_asymptotic_2e,
    epsilon_closed_2e,
    epsilon_closed_2e_expanded,
    epsilon_oracle_2e,
    fock_darwin,
    reduced_energy,
    single_particle_entropies,
)
from mosh_ent.oscillator import gauss_hermite

ATT, REP = Interaction.ATTRACTIVE, Interaction.REPULSIVE
LABELS = ["{}{}{},{}{}{}".format(*c, *r) for c, r in SUPPORTED_2E]
S = StateLabel2e.parse


def test_params():
    p = ModelParams2e.from_tau_sigma(0.6, 0.5, omega=2.0)
    assert (p.tau, p.sigma) == pytest.approx((0.6, 0.5))
    assert p.transverse_frequencies == pytest.approx((math.sqrt(5), math.sqrt(5 + 1.44)))
    assert p.axial_frequencies == pytest.approx((2.0, math.sqrt(4 + 1.44)))
    q = ModelParams2e.from_tau_sigma(0.6, 0.0, REP)
    assert q.omega_r == pytest.approx(0.8)
    assert p.y_R == pytest.approx(math.sqrt(1.25) + 0.5)


def test_param_guards():
    ModelParams2e.from_tau_sigma(0.999, 0.0, REP)
    for tau in (1.0, 1 - 1e-13, 1.5):
        with pytest.raises(UnboundModelError):
            ModelParams2e.from_tau_sigma(tau, 0.0, REP)
    with pytest.raises(DomainError):
        ModelParams2e(b=-1.0)
    with pytest.raises(DomainError):
        ModelParams2e(omega=-1.0)


def test_labels_and_parity():
    s = S("100,000")
    assert (s.cm, s.rel, s.alpha) == ((1, 0, 0), (0, 0, 0), 1) and s.supported
    assert S("000,001").exchange_parity == -1 and S("001,000").exchange_parity == 1
    assert S("000,001", "parallel").alpha == 2
    with pytest.raises(DomainError, match="symmetric"):
        S("001,000", SpinConfig.PARALLEL)
    assert not S("010,000").supported
    for bad in ("100", "10,000", "1a0,000", "100;000"):
        with pytest.raises(DomainError):
            S(bad)
    with pytest.raises(DomainError):
        SpinConfig.parse("sideways")


def test_energy_examples():
    assert reduced_energy(0, 0, 0, 1.0) == 1.5
    p = ModelParams2e()
    assert energy_2e(S("000,000"), p) == 3.0
    assert energy_2e(S("100,000"), p) == 5.0
    assert energy_2e(S("000,001"), p) == 4.0
    # y = sqrt(1 + 9/16) + 3/4 = 2 in both sectors at lambda = 0
    assert energy_2e(S("000,000"), ModelParams2e(b=0.75)) == pytest.approx(3.5, abs=1e-14)
    assert energy_2e(S("100,000"), p) == energy_2e(S("000,100"), p)


@pytest.mark.parametrize("nu,m", [(0, 0), (1, 0), (0, 2), (0, -2), (1, -1), (2, 3)])
@pytest.mark.parametrize("sigma", [0.0, 0.7, 3.0])
def test_reduced_energy_matches_fock_darwin(nu, m, sigma):
    # Fock-Darwin: E = (2nu + |m| + 1) Omega + m b (units omega = 1), plus the axial 1/2
    y = math.sqrt(1 + sigma**2) + sigma
    expected = (2 * nu + abs(m) + 1) * math.sqrt(1 + sigma**2) + m * sigma + 0.5
    assert reduced_energy(nu, m, 0, y) == pytest.approx(expected, rel=1e-13)


# ---------------------------------------------------------------- limits

def test_decoupled_limits():
    assert decoupled_limit_2e(S("000,000")) == 0
    assert decoupled_limit_2e(S("100,000")) == Fraction(3, 4)
    assert decoupled_limit_2e(S("000,100")) == Fraction(3, 4)
    assert decoupled_limit_2e(S("001,000")) == Fraction(1, 2)
    assert decoupled_limit_2e(S("000,001")) == Fraction(1, 2)
    assert decoupled_limit_2e(S("000,001", "parallel")) == 0


@pytest.mark.parametrize("lab", LABELS)
@pytest.mark.parametrize("sigma", [0.0, 1.0, 10.0])
def test_small_tau_approaches_limit(lab, sigma):
    s = S(lab)
    lim = float(decoupled_limit_2e(s))
    assert epsilon_closed_2e(s, ModelParams2e.from_tau_sigma(0.0, sigma)) == lim
    for sign in (ATT, REP):
        v = epsilon_closed_2e(s, ModelParams2e.from_tau_sigma(1e-5, sigma, sign))
        assert abs(v - lim) < 1e-9


def test_repulsive_trend_toward_one():
    s = S("000,000")
    vals = [epsilon_closed_2e(s, ModelParams2e.from_tau_sigma(t, 0.0, REP)) for t in (0.5, 0.9, 0.99, 0.99999)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1


@pytest.mark.parametrize("lab", LABELS)
@pytest.mark.parametrize("tau,sigma,sign", [(0.6, 0.5, ATT), (2.0, 3.0, ATT), (0.4, 0.0, REP), (0.9, 1.5, REP)])
def test_stable_matches_expanded(lab, tau, sigma, sign):
    p = ModelParams2e.from_tau_sigma(tau, sigma, sign)
    s = S(lab)
    assert abs(epsilon_closed_2e(s, p) - epsilon_closed_2e_expanded(s, p)) < 1e-10


def test_expanded_loses_digits_near_zero():
    p = ModelParams2e.from_tau_sigma(1e-6, 0.0)
    s = S("000,000")
    assert abs(epsilon_closed_2e(s, p)) < 1e-11
    assert abs(epsilon_closed_2e_expanded(s, p) - epsilon_closed_2e(s, p)) > 1e-11


def test_unsupported():
    with pytest.raises(UnsupportedStateError):
        epsilon_closed_2e(S("010,000"), ModelParams2e())


# ---------------------------------------------------------------- oracle

@pytest.mark.parametrize("lab,spin", [(l, "antiparallel") for l in LABELS] + [("000,001", "parallel")])
@pytest.mark.parametrize("tau,sigma,sign", [(0.6, 0.5, ATT), (1.5, 2.0, ATT), (0.6, 0.0, REP)])
def test_oracle_matches_closed(lab, spin, tau, sigma, sign):
    p = ModelParams2e.from_tau_sigma(tau, sigma, sign)
    s = S(lab, spin)
    r = epsilon_oracle_2e(s, p)
    assert abs(r.value - epsilon_closed_2e(s, p)) < 1e-8


def test_oracle_unsupported_state_in_range():
    r = epsilon_oracle_2e(S("010,000"), ModelParams2e.from_tau_sigma(0.5, 0.3))
    assert 0 <= r.value <= 1


def test_oracle_nonconvergence():
    p = ModelParams2e.from_tau_sigma(3.0, 2.0)
    with pytest.raises(ConvergenceError):
        epsilon_oracle_2e(S("100,000"), p, rule=gauss_hermite(2, 1.0), z_rule=gauss_hermite(2, 1.0))


def test_fock_darwin_and_axial_normalized():
    rule = gauss_hermite(24, 1.0)
    x, y = np.meshgrid(rule.points, rule.points, indexing="ij")
    w = np.outer(rule.folded_weights, rule.folded_weights)
    for nu, m in ((0, 0), (1, 0), (0, -1), (1, 2)):
        f = fock_darwin(nu, m, 1.3, x, y)
        assert np.sum(w * np.abs(f) ** 2) == pytest.approx(1.0, abs=1e-12)
    assert np.sum(w * np.conj(fock_darwin(0, 1, 1.3, x, y)) * fock_darwin(0, -1, 1.3, x, y)) == pytest.approx(0, abs=1e-12)
    assert rule.integrate(axial(2, 0.7, rule.points) ** 2) == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------------------ asymptotics

@pytest.mark.parametrize("lab", LABELS)
@pytest.mark.parametrize("tau,sign", [(0.3, ATT), (1.0, ATT), (0.5, REP)])
def test_asymptotic_is_large_field_limit(lab, tau, sign):
    s = S(lab)
    big = epsilon_closed_2e(s, ModelParams2e.from_tau_sigma(tau, 1e6, sign))
    assert abs(big - epsilon_asymptotic_2e(s, tau, sign)) < 1e-9


def test_asymptotic_spin_relation():
    # the axial family obeys 1 - eps_parallel = 2 (1 - eps_antiparallel)
    s = S("000,001")
    for tau in (0.2, 0.8, 3.0):
        anti = epsilon_asymptotic_2e(s, tau)
        par = epsilon_asymptotic_2e(s, tau, spin="parallel")
        assert 1 - par == pytest.approx(2 * (1 - anti), rel=1e-14)
    with pytest.raises(UnboundModelError):
        epsilon_asymptotic_2e(s, 1.0, REP)


# ------------------------------------------------------------- entropies

def _entropy_oracle(omega, b):
    ft = math.sqrt(omega**2 + b**2)
    rule_t = gauss_hermite(40, 1 / math.sqrt(ft))
    rule_z = gauss_hermite(40, 1 / math.sqrt(omega))
    x, y, z = np.meshgrid(rule_t.points, rule_t.points, rule_z.points, indexing="ij")
    w = np.einsum("i,j,k->ijk", rule_t.folded_weights, rule_t.folded_weights, rule_z.folded_weights)
    rho = (ft / math.pi) * math.sqrt(omega / math.pi) * np.exp(-ft * (x * x + y * y) - omega * z * z)
    return 1 - np.sum(w * rho * rho), -np.sum(w * rho * np.log(rho))


@pytest.mark.parametrize("omega,b", [(1.0, 0.0), (1.0, 2.0), (0.5, 0.3), (3.0, 10.0)])
def test_entropies_vs_quadrature(omega, b):
    s_l, s_vn = single_particle_entropies(omega, b)
    o_l, o_vn = _entropy_oracle(omega, b)
    assert s_l == pytest.approx(o_l, abs=1e-12)
    assert s_vn == pytest.approx(o_vn, abs=1e-10)


def test_entropies_zero_field():
    s_l, s_vn = single_particle_entropies(1.0, 0.0)
    assert s_vn == pytest.approx(1.5 * (1 + math.log(math.pi)), rel=1e-15)
    assert s_l == pytest.approx(1 - 1 / (2 * math.sqrt(2) * math.pi**1.5), rel=1e-15)


def test_entropies_decrease_with_field():
    prev = single_particle_entropies(1.0, 0.0)
    for b in (0.5, 1.0, 2.0):
        cur = single_particle_entropies(1.0, b)
        assert cur[0] < prev[0] and cur[1] < prev[1]
        prev = cur
    with pytest.raises(DomainError):
        single_particle_entropies(0.0, 1.0)


# ------------------------------------------------------------ properties

@settings(max_examples=80, deadline=None)
@given(lab=st.sampled_from(LABELS), tau=st.floats(0, 50), sigma=st.floats(0, 100))
def test_bounds(lab, tau, sigma):
    v = epsilon_closed_2e(S(lab), ModelParams2e.from_tau_sigma(tau, sigma))
    assert -1e-14 <= v <= 1


@settings(max_examples=60, deadline=None)
@given(lab=st.sampled_from(LABELS), tau=st.floats(0.01, 5), s1=st.floats(0, 20), s2=st.floats(0, 20))
def test_field_lowers_entanglement(lab, tau, s1, s2):
    lo, hi = sorted((s1, s2))
    s = S(lab)
    a = epsilon_closed_2e(s, ModelParams2e.from_tau_sigma(tau, lo))
    b = epsilon_closed_2e(s, ModelParams2e.from_tau_sigma(tau, hi))
    assert b <= a + 1e-13


@settings(max_examples=60, deadline=None)
@given(lab=st.sampled_from(LABELS), sigma=st.floats(0, 20), t1=st.floats(0, 0.999), t2=st.floats(0, 0.999))
def test_coupling_raises_entanglement(lab, sigma, t1, t2):
    lo, hi = sorted((t1, t2))
    s = S(lab)
    for sign in (ATT, REP):
        a = epsilon_closed_2e(s, ModelParams2e.from_tau_sigma(lo, sigma, sign))
        b = epsilon_closed_2e(s, ModelParams2e.from_tau_sigma(hi, sigma, sign))
        assert a <= b + 1e-13


@pytest.mark.parametrize("pair", [("100,000", "000,100"), ("001,000", "000,001")])
def test_cm_rel_symmetry(pair):
    p = ModelParams2e.from_tau_sigma(0.7, 1.2)
    assert epsilon_closed_2e(S(pair[0]), p) == pytest.approx(epsilon_closed_2e(S(pair[1]), p), abs=1e-15)
