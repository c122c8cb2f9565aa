"""Fermionic pure states in the wedge basis and their reduced density matrices.

A state of N fermions in d orbitals is stored as its C(d, N) coefficients
over the lexicographic basis e_I, I a sorted N-subset of range(d). The k-body
reduced density matrix lives on Lambda^k C^d, so it is a C(d, k) square
matrix; the d^k tensor-space form is only built by the oracle helpers.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, sqrt
from typing import Sequence

import numpy as np

from . import combinadics as cb
from .linalg import ORACLE_CAP, InvariantError, eigvalsh

NORM_TOL = 1e-12
FILE_NORM_TOL = 1e-6
UNITARY_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WedgeState:
    d: int
    n_particles: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n_particles <= self.d:
            raise ValueError(f"need 1 <= N <= d, got N={self.n_particles}, d={self.d}")
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size != cb.binomial(self.d, self.n_particles):
            raise ValueError(f"expected {cb.binomial(self.d, self.n_particles)} coefficients, got {c.size}")
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvariantError(f"state norm {norm!r} is not one")
        object.__setattr__(self, "coeffs", _readonly(c))

    @classmethod
    def from_vector(cls, d: int, n: int, vec) -> "WedgeState":
        """Build a state from an arbitrary nonzero vector, normalizing it."""
        vec = np.asarray(vec, dtype=complex)
        norm = np.linalg.norm(vec)
        if norm == 0.0 or not np.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(d, n, vec / norm)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "N": self.n_particles,
            "coeffs": [[float(z.real), float(z.imag)] for z in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WedgeState":
        d, n = int(data["d"]), int(data["N"])
        vec = np.array([complex(re, im) for re, im in data["coeffs"]])
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > FILE_NORM_TOL:
            raise ValueError(f"state file norm {norm!r} deviates from one by more than {FILE_NORM_TOL}")
        return cls.from_vector(d, n, vec)


def save_state(psi: WedgeState, path) -> None:
    with open(path, "w") as fh:
        json.dump(psi.to_dict(), fh)
        fh.write("\n")


def load_state(path) -> WedgeState:
    with open(path) as fh:
        return WedgeState.from_dict(json.load(fh))


@dataclass(frozen=True)
class ReducedDensityMatrix:
    d: int
    n_particles: int
    k: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = cb.binomial(self.d, self.k)
        if m.shape != (dim, dim):
            raise ValueError(f"RDM shape {m.shape} does not match C(d,k) = {dim}")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        return eigvalsh(self.matrix)


@dataclass(frozen=True)
class MaximallyMixed:
    """pi_k = P_k / C(d, k); P_k is the identity on the wedge basis."""

    d: int
    k: int

    @property
    def dim(self) -> int:
        return cb.binomial(self.d, self.k)

    @property
    def matrix(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex) / self.dim

    def spectrum(self) -> np.ndarray:
        return np.full(self.dim, 1.0 / self.dim)


def maximally_mixed(d: int, k: int) -> MaximallyMixed:
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got k={k}, d={d}")
    return MaximallyMixed(d, k)


def slater(d: int, occupied: Sequence[int]) -> WedgeState:
    occ = cb.validate_subset(occupied, d)
    if not occ:
        raise ValueError("a Slater determinant needs at least one occupied orbital")
    c = np.zeros(cb.binomial(d, len(occ)), dtype=complex)
    c[cb.rank(occ, d)] = 1.0
    return WedgeState(d, len(occ), c)


def random_state(d: int, n: int, seed: int) -> WedgeState:
    """Normalized complex Gaussian state; deterministic in ``seed``."""
    if not 1 <= n <= d:
        raise ValueError(f"need 1 <= N <= d, got N={n}, d={d}")
    size = cb.binomial(d, n)
    for counter in itertools.count():
        rng = np.random.default_rng([seed, counter])
        vec = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        if np.linalg.norm(vec) > 1e-150:
            return WedgeState.from_vector(d, n, vec)


def random_unitary(d: int, seed: int) -> np.ndarray:
    """Seeded unitary from a QR factorization with the phases of R's diagonal removed."""
    rng = np.random.default_rng([seed, 0x5EED])
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


@lru_cache(maxsize=64)
def contraction_table(d: int, n: int, k: int):
    """Index arrays for the map c -> M with M[A, C] = sign(A, C) c_{A u C}.

    Returns (rows, cols, targets, signs) over every disjoint pair (A, C) with
    |A| = k, |C| = n - k. Rows index A in Lambda^k, cols index C in Lambda^{n-k},
    targets index A u C in Lambda^n.
    """
    rows, cols, targets, signs = [], [], [], []
    ra = cb.rank_table(d, k)
    rc = cb.rank_table(d, n - k)
    for t, full in enumerate(cb.subsets(d, n)):
        for a in itertools.combinations(full, k):
            c = tuple(x for x in full if x not in a)
            _, s = cb.merge_sign(a, c)
            rows.append(ra[a])
            cols.append(rc[c])
            targets.append(t)
            signs.append(s)
    arrays = [np.array(x, dtype=np.intp) for x in (rows, cols, targets)]
    arrays.append(np.array(signs, dtype=float))
    for a in arrays:
        a.setflags(write=False)
    return tuple(arrays)


def schmidt_matrix(coeffs: np.ndarray, d: int, n: int, k: int) -> np.ndarray:
    """C(d,k) x C(d,n-k) matrix whose Gram matrix, divided by C(n,k), is gamma_k."""
    rows, cols, targets, signs = contraction_table(d, n, k)
    m = np.zeros((cb.binomial(d, k), cb.binomial(d, n - k)), dtype=complex)
    m[rows, cols] = signs * coeffs[targets]
    return m


def rdm(psi: WedgeState, k: int) -> ReducedDensityMatrix:
    """k-body reduced density matrix gamma_k in the wedge basis of Lambda^k C^d.

    gamma_k[A, B] = C(N,k)^{-1} sum_C sign(A,C) sign(B,C) c_{A u C} conj(c_{B u C}).
    """
    n = psi.n_particles
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside [1, {n}]")
    m = schmidt_matrix(psi.coeffs, psi.d, n, k)
    gamma = (m @ m.conj().T) / cb.binomial(n, k)
    return ReducedDensityMatrix(psi.d, n, k, gamma)


@lru_cache(maxsize=16)
def _signed_permutations(n: int):
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(-1, n)
    signs = np.array([_perm_sign(p) for p in perms], dtype=float)
    return perms, signs


def _perm_sign(p) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inv % 2 else 1


def wedge_embedding(d: int, n: int, cap: int = ORACLE_CAP) -> np.ndarray:
    """d^n x C(d,n) isometry whose columns are the wedge basis vectors in tensor space.

    Factor 1 is the most significant digit of the tensor index.
    """
    full = d**n
    if full > cap:
        raise ValueError(f"d^N = {full} exceeds the oracle cap {cap}")
    basis = np.array(cb.subsets(d, n), dtype=np.intp).reshape(-1, n)
    perms, signs = _signed_permutations(n)
    weights = d ** np.arange(n - 1, -1, -1)
    # tensor index of every permuted basis label: (n_basis, n_perms)
    idx = basis[:, perms] @ weights
    e = np.zeros((full, basis.shape[0]))
    e[idx, np.arange(basis.shape[0])[:, np.newaxis]] = signs[np.newaxis, :] / sqrt(factorial(n))
    return e


def embed_full(psi: WedgeState, cap: int = ORACLE_CAP) -> np.ndarray:
    """The state as a unit vector in (C^d)^{tensor N}."""
    return wedge_embedding(psi.d, psi.n_particles, cap) @ psi.coeffs


def compound_matrix(u: np.ndarray, n: int) -> np.ndarray:
    """n-th compound matrix: entry (J, I) is det(u[J, I])."""
    d = u.shape[0]
    sets = np.array(cb.subsets(d, n), dtype=np.intp).reshape(-1, n)
    blocks = u[sets[:, None, :, None], sets[None, :, None, :]]
    return np.linalg.det(blocks)


def apply_one_body_unitary(psi: WedgeState, u) -> WedgeState:
    u = np.asarray(u, dtype=complex)
    if u.shape != (psi.d, psi.d):
        raise ValueError(f"unitary shape {u.shape} does not match d={psi.d}")
    if np.max(np.abs(u.conj().T @ u - np.eye(psi.d))) > UNITARY_TOL:
        raise ValueError("one-body matrix is not unitary")
    out = compound_matrix(u, psi.n_particles) @ psi.coeffs
    return WedgeState.from_vector(psi.d, psi.n_particles, out)


def support_dimension(gamma1: ReducedDensityMatrix, tol: float = 1e-10) -> int:
    if gamma1.k != 1:
        raise ValueError(f"support dimension is defined for gamma_1, got k={gamma1.k}")
    return int(np.count_nonzero(gamma1.spectrum() > tol))
