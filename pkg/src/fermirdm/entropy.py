"""Von Neumann entropy, quantum relative entropy and entropy profiles (in nats)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .fermion import WedgeState, rdm
from .linalg import InvariantError, as_matrix, density_spectrum, eigh

# Shared floor for the 0 log 0 convention and for the kernel test.
EIG_FLOOR = 1e-12
KERNEL_LEAK_TOL = 1e-10
TRACE_TOL = 1e-8


def entropy_of_spectrum(w) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > EIG_FLOOR]
    return float(-np.sum(w * np.log(w))) + 0.0  # no -0.0 for pure states


def von_neumann(rho) -> float:
    """S(rho) = -Tr[rho ln rho] for a trace-one PSD matrix."""
    # a pure spectrum can round to 1 + 1e-16 and give -1e-16; entropy is non-negative
    return max(entropy_of_spectrum(density_spectrum(rho, trace_tol=TRACE_TOL)), 0.0)


def relative_entropy(rho, sigma) -> float:
    """D(rho || sigma) in nats; ``math.inf`` when ker sigma is not inside ker rho."""
    rho = as_matrix(rho)
    sigma = as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    lam = density_spectrum(rho, trace_tol=TRACE_TOL)
    density_spectrum(sigma, trace_tol=TRACE_TOL)
    mu, w = eigh(sigma)
    kernel = mu < EIG_FLOOR
    if np.any(kernel):
        wk = w[:, kernel]
        leak = np.real(np.einsum("ij,ik,kj->j", wk.conj(), rho, wk))
        if np.any(leak >= KERNEL_LEAK_TOL):
            return math.inf
    ws = w[:, ~kernel]
    # Tr[rho log sigma] restricted to the support of sigma
    cross = np.real(np.einsum("ij,ik,kj->j", ws.conj(), rho, ws))
    lam = lam[lam > EIG_FLOOR]
    return float(np.sum(lam * np.log(lam)) - np.sum(cross * np.log(mu[~kernel])))


@dataclass(frozen=True)
class EntropyProfile:
    d: int
    n_particles: int
    values: Tuple[float, ...]
    base: str = "nats"

    def __post_init__(self):
        if any(v < -1e-10 for v in self.values):
            raise InvariantError(f"negative entropy in profile {self.values}")
        if self.values and self.values[-1] > 1e-10 * (1 if self.base == "nats" else 1 / math.log(2)):
            raise InvariantError(f"S_N = {self.values[-1]} is not zero for a pure state")

    def __getitem__(self, k: int) -> float:
        """S_k for 1 <= k <= N."""
        if not 1 <= k <= self.n_particles:
            raise IndexError(f"k={k} outside [1, {self.n_particles}]")
        return self.values[k - 1]

    def __len__(self) -> int:
        return len(self.values)

    def in_bits(self) -> "EntropyProfile":
        if self.base == "bits":
            return self
        return EntropyProfile(self.d, self.n_particles, tuple(v / math.log(2) for v in self.values), "bits")

    def to_dict(self) -> dict:
        return {"d": self.d, "N": self.n_particles, "base": self.base, "values": list(self.values)}


def entropy_profile(psi: WedgeState) -> EntropyProfile:
    values = tuple(von_neumann(rdm(psi, k).matrix) for k in range(1, psi.n_particles + 1))
    return EntropyProfile(psi.d, psi.n_particles, values)
