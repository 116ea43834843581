import math

import numpy as np
import pytest

from designlab.brauer import Pairing
from designlab.designs import (
    annihilation_route,
    lemma1_residuals,
    mixed_state_gap,
    permutation_coefficients,
    pure_moment_input,
    rank_two_state,
    simplified_rank_two_coefficients,
    state_design_test,
)
from designlab.errors import DomainError, NormalizationError, ParityError, ValidationError
from designlab.reps import rising_factorial
from designlab.weingarten import build_basis, twirl

MIXED_GAP_BASELINE_D4 = 0.045643546458763846


def basis_state(d, k=0):
    psi = np.zeros(d, dtype=complex)
    psi[k] = 1
    return psi


def random_state(d, seed):
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


def test_lemma1_cup_cap_d2():
    res = lemma1_residuals(2, 2, basis_state(2))
    r = res[Pairing(2, ((1, 2), (3, 4)))]
    assert not r.permutation
    assert r.state_left <= 1e-12 and r.state_right <= 1e-12
    assert r.sym_left <= 1e-12 and r.sym_right <= 1e-12


def test_lemma1_swap_control():
    r = lemma1_residuals(2, 2, basis_state(2))[Pairing.from_permutation((1, 0))]
    assert r.permutation
    assert r.state_left == pytest.approx(1) and r.state_right == pytest.approx(1)


@pytest.mark.parametrize("seed", range(3))
def test_lemma1_t3_random_state(seed):
    res = lemma1_residuals(3, 4, random_state(4, seed))
    rest = [r for r in res.values() if not r.permutation]
    assert len(rest) == 9
    assert max(r.max_residual() for r in rest) <= 1e-10


def test_lemma1_needs_normalized_state():
    with pytest.raises(NormalizationError):
        lemma1_residuals(2, 4, np.ones(4))


def test_lemma1_needs_even_d():
    with pytest.raises(ParityError):
        lemma1_residuals(2, 3, basis_state(3))


def test_lemma1_state_dimension():
    with pytest.raises(ValidationError):
        lemma1_residuals(2, 4, basis_state(2))


def test_symplectic_exact_design_t3():
    rep = state_design_test("sp", 3, 4)
    assert rep.distance <= 1e-10 and rep.verdict and rep.mode == "exact"


@pytest.mark.parametrize("t, d", [(1, 3), (2, 2), (2, 5), (3, 3), (4, 2)])
def test_unitary_exact_design(t, d):
    rep = state_design_test("unitary", t, d)
    assert rep.distance <= 1e-10 and rep.verdict


def test_symplectic_mc_design_t2():
    rep = state_design_test("sp", 2, 4, mode="monte_carlo", n=100_000, seed=1)
    assert rep.samples == 100_000
    assert rep.tolerance == pytest.approx(5 / math.sqrt(100_000))
    assert rep.verdict


def test_orthogonal_is_not_a_state_design():
    # real rotations keep |0> real, so the moment misses Pi_sym
    assert not state_design_test("orthogonal", 2, 4).verdict


def test_verdict_is_distance_vs_tolerance():
    rep = state_design_test("sp", 2, 4, tolerance=0.0)
    assert rep.verdict == (rep.distance <= 0.0)


def test_unknown_mode():
    with pytest.raises(ValidationError):
        state_design_test("sp", 2, 4, mode="guess")


@pytest.mark.parametrize("t", [2, 3])
def test_reference_state_independence(t):
    base = state_design_test("sp", t, 4).distance
    for seed in range(5):
        other = state_design_test("sp", t, 4, psi=random_state(4, 100 + seed)).distance
        assert abs(other - base) <= 1e-10


@pytest.mark.parametrize("t, d", [(2, 4), (3, 4), (3, 6)])
def test_both_proof_routes_agree(t, d):
    psi = random_state(d, t)
    direct = twirl(pure_moment_input(psi, t), build_basis("sp", t, d)).operator.dense()
    assert np.linalg.norm(direct - annihilation_route(t, d, psi)) <= 1e-10


@pytest.mark.parametrize("t, d", [(2, 4), (3, 4), (3, 6)])
def test_permutation_coefficient_sum(t, d):
    c_perm, c_rest = permutation_coefficients(t, d)
    assert np.sum(c_perm).real == pytest.approx(math.factorial(t) / rising_factorial(d, t))
    assert np.max(np.abs(c_rest)) <= 1e-12


def test_mc_distance_shrinks_with_n():
    def median(n):
        return np.median([
            state_design_test("sp", 2, 4, mode="monte_carlo", n=n, seed=s).distance
            for s in range(10)
        ])

    assert median(4000) <= median(2000)


def test_mixed_gap_pure_state_closes():
    rep = mixed_state_gap(1.0, 4)
    assert rep.gap <= 1e-10


def test_mixed_gap_half_mixture():
    rep = mixed_state_gap(0.5, 4)
    assert rep.gap > 1e-3
    assert rep.gap == pytest.approx(MIXED_GAP_BASELINE_D4, abs=1e-12)
    assert rep.lam0 + rep.lam1 == pytest.approx(1)


@pytest.mark.parametrize("d", [4, 6])
@pytest.mark.parametrize("embedding", ["basis", "extremal", "conjugate"])
@pytest.mark.parametrize("lam0", [0.0, 0.3, 0.5, 1.0])
def test_mixed_gap_closed_forms(d, embedding, lam0):
    rep = mixed_state_gap(lam0, d, embedding)
    assert rep.closed_form_applicable
    assert rep.closed_form_error_u <= 1e-10
    assert rep.closed_form_error_sp <= 1e-10
    assert rep.simplified_applicable == (embedding == "conjugate")
    if rep.simplified_applicable:
        assert rep.simplified_error <= 1e-10


def test_simplified_form_needs_paired_eigenvectors():
    d, lam0 = 4, 0.5
    rho = rank_two_state(lam0, d, "basis")
    b = build_basis("sp", 2, d)
    exact = twirl(np.kron(rho, rho), b).operator.dense()
    _, ssp = simplified_rank_two_coefficients(lam0, d)
    assert np.linalg.norm(b.combine(ssp) - exact) > 1e-3


def test_mixed_gap_d2_is_flagged():
    rep = mixed_state_gap(0.5, 2)
    assert not rep.closed_form_applicable
    assert rep.closed_form_error_sp is None
    # at d=2 the symplectic group is SU(2) and the twirls coincide
    assert rep.gap <= 1e-10


@pytest.mark.parametrize("lam0", [-0.1, 1.5])
def test_mixed_gap_domain(lam0):
    with pytest.raises(DomainError):
        mixed_state_gap(lam0, 4)


def test_mixed_gap_parity():
    with pytest.raises(ParityError):
        mixed_state_gap(0.5, 5)
