import itertools
import json
from math import comb, log, sqrt

import numpy as np
import pytest

from fermirdm.combinadics import rank, subsets
from fermirdm.entropy import entropy_profile, von_neumann
from fermirdm.fermion import (
    WedgeState,
    apply_one_body_unitary,
    compound_matrix,
    embed_full,
    load_state,
    maximally_mixed,
    random_state,
    random_unitary,
    rdm,
    save_state,
    slater,
    support_dimension,
    wedge_embedding,
)
from fermirdm.linalg import InvariantError, partial_trace_full

SMALL = [(d, n) for d in range(1, 6) for n in range(1, min(d, 3) + 1)]


def test_slater_examples():
    psi = slater(4, (0, 1, 2))
    np.testing.assert_array_equal(psi.coeffs, [1, 0, 0, 0])
    assert slater(3, (0, 1, 2)).coeffs.tolist() == [1]
    prof = entropy_profile(slater(8, range(4)))
    np.testing.assert_allclose(prof.values, [log(comb(4, k)) for k in range(1, 5)], atol=1e-12)


def test_slater_rejects_bad_subset():
    with pytest.raises(ValueError):
        slater(4, (2, 1))
    with pytest.raises(ValueError):
        slater(3, (0, 3))


def test_wedge_state_is_immutable_and_validated():
    psi = random_state(5, 2, 0)
    with pytest.raises(ValueError):
        psi.coeffs[0] = 1.0
    with pytest.raises(InvariantError):
        WedgeState(3, 1, [1.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        WedgeState(3, 1, [1.0, 0.0])


def test_random_state_deterministic_and_normalized():
    a = random_state(6, 3, 42)
    b = random_state(6, 3, 42)
    assert a.coeffs.tobytes() == b.coeffs.tobytes()
    assert abs(np.linalg.norm(a.coeffs) - 1) < 1e-12
    assert not np.array_equal(a.coeffs, random_state(6, 3, 43).coeffs)


def test_random_state_one_dimensional():
    psi = random_state(4, 4, 9)
    assert psi.coeffs.size == 1
    assert abs(abs(psi.coeffs[0]) - 1) < 1e-15


def test_rdm_slater_example():
    gamma = rdm(slater(4, (0, 1, 2)), 2).matrix
    expected = np.zeros(6)
    expected[[0, 1, 3]] = 1 / 3
    np.testing.assert_allclose(gamma, np.diag(expected), atol=1e-15)


def test_rdm_full_is_projector():
    psi = random_state(5, 3, 1)
    gamma = rdm(psi, 3).matrix
    np.testing.assert_allclose(gamma, np.outer(psi.coeffs, psi.coeffs.conj()), atol=1e-15)
    assert von_neumann(gamma) == pytest.approx(0, abs=1e-12)


def test_rdm_rejects_bad_k():
    with pytest.raises(ValueError):
        rdm(random_state(5, 3, 1), 0)
    with pytest.raises(ValueError):
        rdm(random_state(5, 3, 1), 4)


@pytest.mark.parametrize("d,n,seed", [(4, 2, 0), (5, 3, 7), (6, 3, 1), (7, 4, 2), (8, 4, 3)])
def test_rdm_invariants(d, n, seed):
    psi = random_state(d, n, seed)
    for k in range(1, n + 1):
        g = rdm(psi, k).matrix
        assert g.shape == (comb(d, k),) * 2
        np.testing.assert_allclose(g, g.conj().T, atol=1e-15)
        assert abs(np.trace(g) - 1) <= 1e-10
        assert np.linalg.eigvalsh(g).min() >= -1e-10


@pytest.mark.parametrize("d,n,seed", [(5, 3, 7), (6, 2, 3), (6, 4, 5), (8, 3, 1)])
def test_one_body_eigenvalues_bounded_by_inverse_n(d, n, seed):
    assert rdm(random_state(d, n, seed), 1).spectrum().max() <= 1 / n + 1e-9


def test_embed_two_fermion_singlet():
    np.testing.assert_allclose(embed_full(slater(2, (0, 1))), [0, 1 / sqrt(2), -1 / sqrt(2), 0], atol=1e-15)


def _antisymmetrizer_oracle(d, n, occupied):
    # explicit sum over permutations with determinant signs
    v = np.zeros(d**n)
    for perm in itertools.permutations(range(n)):
        sign = round(np.linalg.det(np.eye(n)[list(perm)]))
        idx = 0
        for p in perm:
            idx = idx * d + occupied[p]
        v[idx] += sign
    return v / np.linalg.norm(v)


@pytest.mark.parametrize("d,n", [(3, 2), (4, 3), (5, 3)])
def test_embedding_columns_match_permutation_sum(d, n):
    e = wedge_embedding(d, n)
    for r, occ in enumerate(subsets(d, n)):
        np.testing.assert_allclose(e[:, r], _antisymmetrizer_oracle(d, n, occ), atol=1e-15)


@pytest.mark.parametrize("d,n,seed", [(4, 3, 0), (5, 2, 1), (5, 3, 2)])
def test_embed_norm_and_antisymmetry(d, n, seed):
    v = embed_full(random_state(d, n, seed))
    assert abs(np.linalg.norm(v) - 1) <= 1e-12
    t = v.reshape([d] * n)
    np.testing.assert_allclose(np.swapaxes(t, 0, 1), -t, atol=1e-15)


def test_embed_cap():
    with pytest.raises(ValueError):
        embed_full(random_state(9, 4, 0))


@pytest.mark.parametrize("d,n", SMALL)
def test_rdm_matches_tensor_partial_trace(d, n):
    # the full d^k matrix of the oracle equals the wedge RDM pushed through the embedding
    for trial in range(20):
        psi = random_state(d, n, 1000 * d + 10 * n + trial)
        v = embed_full(psi)
        rho = np.outer(v, v.conj())
        for k in range(1, n + 1):
            oracle = partial_trace_full(rho, d, n, k)
            e = wedge_embedding(d, k)
            np.testing.assert_allclose(e @ rdm(psi, k).matrix @ e.T, oracle, atol=1e-12)
            fast = np.sort(rdm(psi, k).spectrum())[::-1]
            slow = np.sort(np.linalg.eigvalsh(oracle))[::-1]
            np.testing.assert_allclose(fast, slow[: fast.size], atol=1e-9)
            np.testing.assert_allclose(slow[fast.size:], 0, atol=1e-9)


def test_oracle_example_slater_433():
    psi = slater(4, (0, 1, 2))
    v = embed_full(psi)
    g = partial_trace_full(np.outer(v, v), 4, 3, 2)
    w = np.sort(np.linalg.eigvalsh(g))[::-1]
    np.testing.assert_allclose(w[:3], [1 / 3] * 3, atol=1e-12)
    np.testing.assert_allclose(w[3:], 0, atol=1e-12)


def test_random_unitary_is_unitary_and_seeded():
    u = random_unitary(6, 3)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(6), atol=1e-12)
    np.testing.assert_array_equal(u, random_unitary(6, 3))


def test_compound_matrix_oracle():
    # oracle: explicit determinants, and Cauchy-Binet multiplicativity
    u = random_unitary(5, 1)
    v = random_unitary(5, 2)
    c = compound_matrix(u, 2)
    sets = subsets(5, 2)
    assert abs(c[3, 7] - np.linalg.det(u[np.ix_(sets[3], sets[7])])) < 1e-14
    np.testing.assert_allclose(compound_matrix(u @ v, 2), c @ compound_matrix(v, 2), atol=1e-12)


def test_apply_identity_and_phases():
    psi = random_state(5, 3, 4)
    np.testing.assert_allclose(apply_one_body_unitary(psi, np.eye(5)).coeffs, psi.coeffs, atol=1e-15)
    phases = np.exp(1j * np.arange(5) * 0.7)
    out = apply_one_body_unitary(psi, np.diag(phases))
    expected = np.array([psi.coeffs[r] * np.prod(phases[list(s)]) for r, s in enumerate(subsets(5, 3))])
    np.testing.assert_allclose(out.coeffs, expected, atol=1e-14)


def test_rotated_slater_profile():
    out = apply_one_body_unitary(slater(4, (0, 1, 2)), random_unitary(4, 11))
    np.testing.assert_allclose(entropy_profile(out).values, [log(3), log(3), 0], atol=1e-10)


@pytest.mark.parametrize("trial", range(20))
def test_profile_invariant_under_one_body_unitary(trial):
    d = 3 + trial % 4
    n = 1 + trial % (d - 1)
    psi = random_state(d, n, trial)
    out = apply_one_body_unitary(psi, random_unitary(d, 100 + trial))
    assert abs(np.linalg.norm(out.coeffs) - 1) <= 1e-9
    np.testing.assert_allclose(entropy_profile(out).values, entropy_profile(psi).values, atol=1e-8)


def test_apply_rejects_non_unitary():
    with pytest.raises(ValueError):
        apply_one_body_unitary(random_state(4, 2, 0), 2 * np.eye(4))


def test_maximally_mixed_examples():
    pi = maximally_mixed(4, 2)
    np.testing.assert_allclose(pi.matrix, np.eye(6) / 6)
    assert abs(von_neumann(pi.matrix) - log(6)) < 1e-12
    np.testing.assert_allclose(maximally_mixed(3, 3).matrix, [[1]])
    assert np.trace(maximally_mixed(7, 3).matrix).real == pytest.approx(1, abs=1e-15)


def test_support_dimension_examples():
    assert support_dimension(rdm(slater(6, (0, 1, 2)), 1)) == 3
    assert support_dimension(rdm(random_state(5, 3, 3), 1)) == 5
    assert support_dimension(rdm(random_state(4, 4, 0), 1)) == 4
    with pytest.raises(ValueError):
        support_dimension(rdm(slater(6, (0, 1, 2)), 2))


def test_state_file_roundtrip(tmp_path):
    psi = random_state(6, 3, 5)
    path = tmp_path / "psi.json"
    save_state(psi, path)
    data = json.loads(path.read_text())
    assert set(data) == {"d", "N", "coeffs"}
    assert len(data["coeffs"]) == comb(6, 3)
    back = load_state(path)
    np.testing.assert_allclose(back.coeffs, psi.coeffs, atol=1e-15)


def test_state_file_rejects_bad_norm(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"d": 3, "N": 1, "coeffs": [[1, 0], [0.01, 0], [0, 0]]}))
    with pytest.raises(ValueError):
        load_state(path)
    # within 1e-6 is accepted and renormalized
    path.write_text(json.dumps({"d": 3, "N": 1, "coeffs": [[1 + 1e-8, 0], [0, 0], [0, 0]]}))
    assert np.linalg.norm(load_state(path).coeffs) == pytest.approx(1, abs=1e-15)


def test_rank_convention_matches_coefficients():
    psi = slater(6, (1, 3, 4))
    assert psi.coeffs[rank((1, 3, 4), 6)] == 1
