"""Projected gradient descent of S(gamma_k) over the unit sphere of Lambda^N C^d.

The search works on the 2 C(d,N) real coordinates (real parts, then imaginary
parts) of the coefficient vector. Each step moves against the tangential part
of the Euclidean gradient, renormalizes, and backtracks until the entropy
decreases sufficiently. The conjectured floor ln C(N,k) is only compared
against, never assumed: anything found below it is kept verbatim.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import combinadics as cb
from .entropy import EIG_FLOOR, entropy_of_spectrum, von_neumann
from .fermion import WedgeState, contraction_table, random_state, rdm, schmidt_matrix
from .linalg import InvariantError

log = logging.getLogger(__name__)

CREATE_FLOOR = 1e-14
ARMIJO = 1e-4
MIN_STEP = 1e-18
TIE_TOL = 1e-10
FLOOR_TOL = 1e-8
MAX_DIM = 10**5
STALL_ITERS = 20


@dataclass
class OptimizationConfig:
    d: int
    n_particles: int
    k: int
    restarts: int = 32
    max_iters: int = 2000
    step: float = 0.1
    shrink: float = 0.5
    grad_tol: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k <= self.n_particles <= self.d:
            raise ValueError(f"need 1 <= k <= N <= d, got k={self.k}, N={self.n_particles}, d={self.d}")
        if cb.binomial(self.d, self.n_particles) > MAX_DIM:
            raise ValueError(f"C(d,N) = {cb.binomial(self.d, self.n_particles)} exceeds {MAX_DIM}")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink factor must lie in (0, 1)")
        if self.step <= 0.0 or self.grad_tol <= 0.0:
            raise ValueError("step and gradient threshold must be positive")


@dataclass
class RestartTrace:
    restart: int
    seed: int
    value: float
    grad_norm: float
    iterations: int
    converged: bool
    stop_reason: str
    history: List[tuple] = field(default_factory=list)


@dataclass
class OptimizationResult:
    config: OptimizationConfig
    best_state: WedgeState
    best_value: float
    conjectured_floor: float
    slater_proximity: float
    converged: bool
    best_restart: int
    traces: List[RestartTrace]
    subfloor_states: List[dict] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.best_value - self.conjectured_floor

    @property
    def below_floor(self) -> bool:
        return self.gap < -FLOOR_TOL

    def to_dict(self, include_traces: bool = False) -> dict:
        out = {
            "config": asdict(self.config),
            "best_value": self.best_value,
            "conjectured_floor": self.conjectured_floor,
            "gap": self.gap,
            "slater_proximity": self.slater_proximity,
            "converged": self.converged,
            "best_restart": self.best_restart,
            "below_floor": self.below_floor,
            "best_state": self.best_state.to_dict(),
            "restarts": [
                {k: v for k, v in asdict(t).items() if k != "history"} for t in self.traces
            ],
            "subfloor_states": self.subfloor_states,
        }
        if include_traces:
            out["traces"] = {t.restart: [list(h) for h in t.history] for t in self.traces}
        return out


def restart_seed(master: int, restart: int) -> int:
    """Seed of restart ``restart``: first 32-bit word of SeedSequence([master, restart])."""
    return int(np.random.SeedSequence([master, restart]).generate_state(1)[0])


def _spectral(coeffs: np.ndarray, d: int, n: int, k: int):
    m = schmidt_matrix(coeffs, d, n, k)
    gamma = (m @ m.conj().T) / cb.binomial(n, k)
    w, v = np.linalg.eigh(gamma)
    return m, w, v


def _value(w: np.ndarray) -> float:
    return entropy_of_spectrum(np.clip(w, 0.0, None))


def _gradient(coeffs, d, n, k, m, w, v, face: bool = False) -> np.ndarray:
    """Complex form g = dS/dx + i dS/dy of the Euclidean gradient.

    Eigenvalues at or below EIG_FLOOR get no logarithm term. With ``face=True``
    they instead get the weight of the smallest support eigenvalue, which
    removes the component that would drain them past the spectrum floor (the
    true weight there tends to -inf and the line search forbids that move).
    """
    rows, cols, targets, signs = contraction_table(d, n, k)
    weights = np.zeros_like(w)
    support = w > EIG_FLOOR
    weights[support] = np.log(w[support]) + 1.0
    if face and support.any() and not support.all():
        weights[~support] = weights[support].min()
    gm = ((v * weights) @ v.conj().T) @ m
    contrib = signs * gm[rows, cols]
    size = coeffs.size
    g = np.bincount(targets, contrib.real, size) + 1j * np.bincount(targets, contrib.imag, size)
    return -2.0 / cb.binomial(n, k) * g


def entropy_gradient(psi: WedgeState, k: int) -> np.ndarray:
    """Gradient of S(gamma_k) in the real coordinates (Re c, Im c), before projection."""
    d, n = psi.d, psi.n_particles
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside [1, {n}]")
    c = np.asarray(psi.coeffs)
    g = _gradient(c, d, n, k, *_spectral(c, d, n, k))
    return np.concatenate([g.real, g.imag])


def entropy_objective(x: np.ndarray, d: int, n: int, k: int) -> float:
    """S(gamma_k) as a function of the raw real coordinates, no normalization applied."""
    half = x.size // 2
    c = x[:half] + 1j * x[half:]
    return _value(_spectral(c, d, n, k)[1])


def tangent(coeffs: np.ndarray, g: np.ndarray) -> np.ndarray:
    return g - np.real(np.vdot(coeffs, g)) * coeffs


def slater_proximity(psi: WedgeState) -> float:
    """Distance between the spectrum of gamma_1 and (1/N, ..., 1/N, 0, ..., 0)."""
    n = psi.n_particles
    w = np.sort(rdm(psi, 1).spectrum())[::-1]
    target = np.zeros_like(w)
    target[:n] = 1.0 / n
    return float(np.linalg.norm(w - target))


def _creates_tiny(w, tw) -> bool:
    """True if a supported eigenvalue (> EIG_FLOOR) fell below CREATE_FLOOR in one step.

    Eigenvalues already off the support carry no log term and may drift freely.
    """
    more_tiny = np.count_nonzero(tw < CREATE_FLOOR) > np.count_nonzero(w < CREATE_FLOOR)
    left_support = np.count_nonzero(tw <= EIG_FLOOR) > np.count_nonzero(w <= EIG_FLOOR)
    return bool(more_tiny and left_support)


def _descend(config: OptimizationConfig, restart: int):
    d, n, k = config.d, config.n_particles, config.k
    seed = restart_seed(config.seed, restart)
    c = np.array(random_state(d, n, seed).coeffs)
    m, w, v = _spectral(c, d, n, k)
    value = _value(w)
    history = []
    step = config.step
    converged = False
    reason = "max_iters"
    gnorm = math.inf
    stalled = 0
    it = 0
    for it in range(config.max_iters + 1):
        g = tangent(c, _gradient(c, d, n, k, m, w, v, face=True))
        gnorm = float(np.linalg.norm(g))
        history.append((it, value, gnorm))
        if gnorm <= config.grad_tol:
            converged = True
            reason = "gradient"
            break
        if it == config.max_iters:
            break
        t = step
        while t >= MIN_STEP:
            trial = c - t * g
            trial /= np.linalg.norm(trial)
            tm, tw, tv = _spectral(trial, d, n, k)
            tval = _value(tw)
            if not _creates_tiny(w, tw) and tval <= value - ARMIJO * t * gnorm**2:
                break
            t *= config.shrink
        else:
            reason = "line_search"
            break
        # Near a spectrum-boundary minimizer the only admissible steps are
        # ones that no longer change the value at double precision.
        stalled = stalled + 1 if value - tval <= 1e-15 * max(1.0, abs(value)) else 0
        if abs(np.linalg.norm(trial) - 1.0) > 1e-10:
            raise InvariantError("iterate left the unit sphere")
        c, m, w, v, value = trial, tm, tw, tv, tval
        step = min(t / config.shrink, config.step)
        if stalled >= STALL_ITERS:
            reason = "stagnated"
            break
    trace = RestartTrace(restart, seed, value, gnorm, it, converged, reason, history)
    return WedgeState.from_vector(d, n, c), trace


def minimize_entropy(config: OptimizationConfig, preserve_dir: Optional[str] = None) -> OptimizationResult:
    """Best S(gamma_k) found over ``config.restarts`` seeded descents.

    Terminal states whose entropy falls below ln C(N,k) - 1e-8 are serialized
    into ``subfloor_states`` and, if ``preserve_dir`` is given, written there.
    """
    floor = math.log(cb.binomial(config.n_particles, config.k))
    best = None
    traces = []
    subfloor = []
    for r in range(config.restarts):
        psi, trace = _descend(config, r)
        trace.value = von_neumann(rdm(psi, config.k))
        traces.append(trace)
        if trace.value < floor - FLOOR_TOL:
            record = _preserve(psi, trace, config, floor, preserve_dir)
            subfloor.append(record)
        if best is None or trace.value < best[1].value - TIE_TOL:
            best = (psi, trace)
    psi, trace = best
    return OptimizationResult(
        config=config,
        best_state=psi,
        best_value=trace.value,
        conjectured_floor=floor,
        slater_proximity=slater_proximity(psi),
        converged=trace.converged,
        best_restart=trace.restart,
        traces=traces,
        subfloor_states=subfloor,
    )


def _preserve(psi, trace, config, floor, preserve_dir) -> dict:
    state = psi.to_dict()
    # reproducibility: re-evaluate from the serialized form
    again = von_neumann(rdm(WedgeState.from_dict(json.loads(json.dumps(state))), config.k))
    record = {
        "restart": trace.restart,
        "seed": trace.seed,
        "value": trace.value,
        "reevaluated": again,
        "floor": floor,
        "reproducible": again < floor - FLOOR_TOL,
        "state": state,
    }
    log.warning("restart %d reached S_%d = %.12g below ln C(N,k) = %.12g",
                trace.restart, config.k, trace.value, floor)
    if preserve_dir is not None:
        os.makedirs(preserve_dir, exist_ok=True)
        name = f"subfloor_d{config.d}_N{config.n_particles}_k{config.k}_seed{config.seed}_r{trace.restart}.json"
        with open(os.path.join(preserve_dir, name), "w") as fh:
            json.dump(record, fh, indent=2)
        record["path"] = os.path.join(preserve_dir, name)
    return record
