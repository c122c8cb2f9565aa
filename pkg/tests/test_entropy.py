import math
from math import comb, log

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fermirdm.entropy import EntropyProfile, entropy_profile, relative_entropy, von_neumann
from fermirdm.fermion import maximally_mixed, random_state, random_unitary, rdm, slater
from fermirdm.linalg import InvariantError, partial_trace_full


def random_density(n, seed, rank=None):
    rng = np.random.default_rng(seed)
    r = rank or n
    a = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def test_von_neumann_examples():
    v = np.array([1, 1j, 0]) / math.sqrt(2)
    assert von_neumann(np.outer(v, v.conj())) == pytest.approx(0, abs=1e-12)
    assert von_neumann(maximally_mixed(4, 2)) == pytest.approx(1.791759469228055, abs=1e-12)
    assert von_neumann(rdm(slater(8, range(4)), 2)) == pytest.approx(log(6), abs=1e-12)


def test_von_neumann_against_scipy_logm():
    # independent route: matrix logarithm instead of the spectrum
    from scipy.linalg import logm

    rho = random_density(6, 3)
    assert von_neumann(rho) == pytest.approx(-np.trace(rho @ logm(rho)).real, abs=1e-10)


def test_von_neumann_rejects_invalid():
    with pytest.raises(InvariantError):
        von_neumann(np.diag([0.7, 0.7]))
    with pytest.raises(InvariantError):
        von_neumann(np.diag([1.2, -0.2]))


def test_von_neumann_bounds():
    for n in (2, 5, 9):
        s = von_neumann(random_density(n, n))
        assert 0 <= s <= log(n) + 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_von_neumann_unitary_invariance(n, seed):
    rho = random_density(n, seed)
    u = random_unitary(n, seed)
    assert von_neumann(u @ rho @ u.conj().T) == pytest.approx(von_neumann(rho), abs=1e-9)


def test_relative_entropy_self_is_zero():
    rho = random_density(5, 1)
    assert abs(relative_entropy(rho, rho)) < 1e-12
    low = random_density(5, 2, rank=2)
    assert abs(relative_entropy(low, low)) < 1e-10


@pytest.mark.parametrize("d,k,r", [(4, 2, 3), (5, 2, 0), (6, 3, 7)])
def test_relative_entropy_pure_vs_flat(d, k, r):
    rho = np.zeros((comb(d, k), comb(d, k)))
    rho[r, r] = 1
    assert relative_entropy(rho, maximally_mixed(d, k).matrix) == pytest.approx(log(comb(d, k)), abs=1e-12)


def test_relative_entropy_kernel_case_split():
    rho = np.diag([0.5, 0.5, 0.0])
    sigma = np.diag([1.0, 0.0, 0.0])
    assert relative_entropy(rho, sigma) == math.inf
    # ker sigma inside ker rho: finite, computed on the support of sigma
    assert relative_entropy(sigma, rho) == pytest.approx(log(2), abs=1e-12)


def test_relative_entropy_against_closed_form_commuting():
    p = np.array([0.5, 0.3, 0.2])
    q = np.array([0.2, 0.2, 0.6])
    assert relative_entropy(np.diag(p), np.diag(q)) == pytest.approx(float(np.sum(p * np.log(p / q))), abs=1e-13)


def test_relative_entropy_dimension_mismatch():
    with pytest.raises(ValueError):
        relative_entropy(np.eye(2) / 2, np.eye(3) / 3)


@pytest.mark.parametrize("seed", range(10))
def test_relative_entropy_to_flat_state_matches_entropy_deficit(seed):
    psi = random_state(6, 3, seed)
    for k in (1, 2, 3):
        g = rdm(psi, k).matrix
        d_rel = relative_entropy(g, maximally_mixed(6, k).matrix)
        assert d_rel == pytest.approx(log(comb(6, k)) - von_neumann(g), abs=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_klein_inequality_on_wedge_pairs(seed):
    psi, phi = random_state(6, 3, seed), random_state(6, 3, seed + 100)
    rho, sigma = rdm(psi, 2).matrix, rdm(phi, 2).matrix
    d_rel = relative_entropy(rho, sigma)
    # rank(gamma_2) <= C(6,1) < C(6,2), so the kernels generically differ
    assert d_rel == math.inf or d_rel >= -1e-8
    d_self = relative_entropy(rdm(psi, 1).matrix, rdm(psi, 1).matrix)
    assert abs(d_self) <= 1e-8
    d_pos = relative_entropy(rdm(psi, 1).matrix, rdm(phi, 1).matrix)
    assert d_pos > 1e-8 and np.max(np.abs(rdm(psi, 1).matrix - rdm(phi, 1).matrix)) > 1e-8


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("seed", range(15))
def test_monotonicity_under_partial_trace(d, seed):
    rho = random_density(d * d, seed)
    sigma = random_density(d * d, seed + 1000)
    big = relative_entropy(rho, sigma)
    small = relative_entropy(partial_trace_full(rho, d, 2, 1), partial_trace_full(sigma, d, 2, 1))
    assert big >= small - 1e-8


def test_entropy_profile_examples():
    prof = entropy_profile(slater(8, range(4)))
    np.testing.assert_allclose(prof.values, [log(4), log(6), log(4), 0], atol=1e-12)
    assert prof[4] == 0.0
    prof = entropy_profile(random_state(6, 3, 11))
    assert abs(prof[1] - prof[2]) <= 1e-8
    assert prof[3] <= 1e-10


def test_entropy_profile_bits():
    prof = entropy_profile(slater(8, range(4))).in_bits()
    assert prof.base == "bits"
    assert prof[2] == pytest.approx(math.log2(6), abs=1e-12)


def test_entropy_profile_invariants():
    with pytest.raises(InvariantError):
        EntropyProfile(4, 2, (0.5, 0.1))
    with pytest.raises(IndexError):
        entropy_profile(slater(4, (0, 1)))[3]
