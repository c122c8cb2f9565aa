"""Dense complex Hermitian linear algebra.

Two eigensolvers are available: LAPACK through numpy (the default, used on
every hot path) and a cyclic complex Jacobi iteration written here, which is
kept as an independent cross-check. ``partial_trace_full`` contracts tensor
indices literally and is only meant for small oracle computations.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_RTOL = 1e-10
PSD_TOL = 1e-10
JACOBI_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100
KRON_MAX_ENTRIES = 10**8
ORACLE_CAP = 4096


class InvariantError(ArithmeticError):
    """A numerical invariant (hermiticity, positivity, trace, norm) was violated."""


class ConvergenceError(ArithmeticError):
    pass


def as_matrix(m) -> np.ndarray:
    m = np.asarray(getattr(m, "matrix", m), dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def check_hermitian(h, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"matrix is not square: {h.shape}")
    scale = np.max(np.abs(h)) if h.size else 0.0
    if h.size and np.max(np.abs(h - h.conj().T)) > rtol * max(scale, np.finfo(float).tiny):
        raise InvariantError("matrix is not Hermitian within tolerance")
    return h


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _jacobi_eigh(h: np.ndarray, rtol: float, max_sweeps: int):
    a = h.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    threshold = rtol * np.linalg.norm(h)
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                diag = abs(a[p, p].real) + abs(a[q, q].real)
                if mag <= 1e-300 or mag <= 1e-18 * diag:
                    a[p, q] = a[q, p] = 0.0
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s * phase], [-s * np.conj(phase), c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = a[q, p] = 0.0
    else:
        if _off_norm(a) > threshold:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigh(h, method: str = "lapack", rtol: float = JACOBI_RTOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix.

    ``method`` is ``"lapack"`` or ``"jacobi"``.
    """
    h = check_hermitian(h)
    if method == "lapack":
        # symmetrize so LAPACK sees an exactly Hermitian input
        w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
        return w, v
    if method == "jacobi":
        return _jacobi_eigh(0.5 * (h + h.conj().T), rtol, max_sweeps)
    raise ValueError(f"unknown eigensolver {method!r}")


def eigvalsh(h, method: str = "lapack") -> np.ndarray:
    if method == "lapack":
        h = check_hermitian(h)
        return np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    return eigh(h, method=method)[0]


def density_spectrum(rho, psd_tol: float = PSD_TOL, trace_tol: float | None = None) -> np.ndarray:
    """Eigenvalues of a density matrix, with rounding-level negatives clamped to zero.

    Raises InvariantError when the minimum eigenvalue is below ``-psd_tol`` or,
    if ``trace_tol`` is given, when the trace is off from one by more than that.
    """
    w = eigvalsh(rho)
    if w.size and w[0] < -psd_tol:
        raise InvariantError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    if trace_tol is not None and abs(w.sum() - 1.0) > trace_tol:
        raise InvariantError(f"trace {w.sum():.12f} differs from one")
    return np.clip(w, 0.0, None)


def matrix_function(h, f) -> np.ndarray:
    w, v = eigh(h)
    return (v * f(w)) @ v.conj().T


def kron(a, b, max_entries: int = KRON_MAX_ENTRIES) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.size * b.size > max_entries:
        raise ValueError(f"Kronecker product would have {a.size * b.size} entries (cap {max_entries})")
    return np.kron(a, b)


def partial_trace_full(m, d: int, n: int, keep: int, cap: int = ORACLE_CAP) -> np.ndarray:
    """Trace out the last ``n - keep`` factors of an operator on (C^d)^{tensor n}."""
    m = as_matrix(m)
    full = d**n
    if full > cap:
        raise ValueError(f"d^n = {full} exceeds the oracle cap {cap}")
    if m.shape != (full, full):
        raise ValueError(f"matrix shape {m.shape} does not match d^n = {full}")
    if not 1 <= keep <= n:
        raise ValueError(f"keep={keep} outside [1, {n}]")
    a = d**keep
    b = d ** (n - keep)
    return np.einsum("ijkj->ik", m.reshape(a, b, a, b))


def partial_trace_pure(v, d: int, n: int, keep: int, cap: int = ORACLE_CAP) -> np.ndarray:
    """partial_trace_full applied to |v><v| without forming the outer product."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    full = d**n
    if full > cap:
        raise ValueError(f"d^n = {full} exceeds the oracle cap {cap}")
    if v.size != full:
        raise ValueError(f"vector length {v.size} does not match d^n = {full}")
    if not 1 <= keep <= n:
        raise ValueError(f"keep={keep} outside [1, {n}]")
    a = v.reshape(d**keep, d ** (n - keep))
    return a @ a.conj().T
