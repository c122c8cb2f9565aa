"""Executable checks of the entropy identities and inequalities.

Each check returns :class:`CheckResult` records carrying the measured slack
(LHS - RHS for inequalities, the absolute residual for identities).
``run_suite`` sweeps them over Slater determinants, seeded random states and
rotated Slater determinants and collects a JSON-serializable report.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import combinadics as cb
from .entropy import EntropyProfile, entropy_profile, relative_entropy
from .fermion import (
    WedgeState,
    apply_one_body_unitary,
    embed_full,
    maximally_mixed,
    random_state,
    random_unitary,
    rdm,
    slater,
    support_dimension,
    wedge_embedding,
)
from .linalg import ORACLE_CAP, partial_trace_full

INEQUALITY_TOL = 1e-8
IDENTITY_TOL = 1e-8
ORACLE_TOL = 1e-9
LEMMA_PI_TOL = 1e-10
EQUALITY_TOL = 1e-8

CLAIM_IDS = (
    "eq:symm",
    "eq:main11",
    "eq:main12",
    "coleman",
    "eq:main21",
    "eq:kbound",
    "lem:key",
    "lem:pi",
    "oracle:rdm",
)

LEMMA_PI_CASES = ((3, 2, 1), (4, 2, 1), (4, 3, 1), (4, 3, 2), (5, 3, 1))


@dataclass
class CheckResult:
    claim_id: str
    passed: bool
    slack: float
    tolerance: float
    context: dict = field(default_factory=dict)
    kind: str = "inequality"
    informational: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _inequality(claim_id, slack, tol, context, informational=False) -> CheckResult:
    slack = float(slack)
    return CheckResult(claim_id, slack >= -tol, slack, tol, context, "inequality", informational)


def _identity(claim_id, residual, tol, context) -> CheckResult:
    residual = float(residual)
    return CheckResult(claim_id, abs(residual) <= tol, residual, tol, context, "identity")


def _context(psi: WedgeState, **extra) -> dict:
    ctx = {"d": psi.d, "N": psi.n_particles}
    ctx.update(extra)
    return ctx


def _profile(psi, profile):
    return profile if profile is not None else entropy_profile(psi)


def check_symmetry(psi: WedgeState, tol: float = IDENTITY_TOL, profile: Optional[EntropyProfile] = None,
                   **ctx) -> List[CheckResult]:
    s = _profile(psi, profile)
    n = psi.n_particles
    return [_identity("eq:symm", abs(s[k] - s[n - k]), tol, _context(psi, k=k, **ctx)) for k in range(1, n)]


def check_monotonicity(psi: WedgeState, tol: float = INEQUALITY_TOL, profile: Optional[EntropyProfile] = None,
                       **ctx) -> List[CheckResult]:
    """S_{k+1} - S_k on the proven range k <= (N-1)/2.

    For even N the step k = N/2 lies outside that range; it is reported as
    informational and never fails.
    """
    s = _profile(psi, profile)
    n = psi.n_particles
    proven = (n - 1) // 2
    wider = min(n // 2, n - 1)
    out = []
    for k in range(1, max(proven, wider) + 1):
        info = k > proven
        out.append(_inequality("eq:main11", s[k + 1] - s[k], tol, _context(psi, k=k, **ctx), informational=info))
    return out


def check_concavity(psi: WedgeState, tol: float = INEQUALITY_TOL, profile: Optional[EntropyProfile] = None,
                    **ctx) -> List[CheckResult]:
    s = _profile(psi, profile)
    n = psi.n_particles
    return [
        _inequality("eq:main12", s[k] - 0.5 * (s[k + 1] + s[k - 1]), tol, _context(psi, k=k, **ctx))
        for k in range(2, n)
    ]


def check_coleman(psi: WedgeState, tol: float = INEQUALITY_TOL, profile: Optional[EntropyProfile] = None,
                  **ctx) -> CheckResult:
    s = _profile(psi, profile)
    slack = s[1] - math.log(psi.n_particles)
    return _inequality("coleman", slack, tol, _context(psi, equality=bool(abs(slack) <= EQUALITY_TOL), **ctx))


def clr_rhs(s1: float, n: int, d: int) -> float:
    return s1 + math.log((n - 1) / (d - n + 2))


def check_clr_bound(psi: WedgeState, tol: float = INEQUALITY_TOL, profile: Optional[EntropyProfile] = None,
                    support: bool = False, **ctx) -> CheckResult:
    """S_2 >= S_1 + ln((N-1)/(d-N+2)); with ``support=True`` d is replaced by rank(gamma_1)."""
    n = psi.n_particles
    if n < 2:
        raise ValueError("the two-body bound needs N >= 2")
    s = _profile(psi, profile)
    if support:
        dim = support_dimension(rdm(psi, 1))
        variant = "d_psi"
    else:
        dim = psi.d
        variant = "d"
    slack = s[2] - clr_rhs(s[1], n, dim)
    return _inequality("eq:main21", slack, tol, _context(psi, variant=variant, dim=dim, **ctx))


def k_bound_rhs(s1: float, n: int, d: int, k: int) -> float:
    """S_1 + sum_{j=2}^{k} ln((N-j+1)/(d-N+j))."""
    return s1 + sum(math.log((n - j + 1) / (d - n + j)) for j in range(2, k + 1))


def check_k_bound(psi: WedgeState, k: int, tol: float = INEQUALITY_TOL, profile: Optional[EntropyProfile] = None,
                  **ctx) -> CheckResult:
    n = psi.n_particles
    if not 2 <= k <= n - 1:
        raise ValueError(f"k={k} outside [2, {n - 1}]")
    s = _profile(psi, profile)
    slack = s[k] - k_bound_rhs(s[1], n, psi.d, k)
    return _inequality("eq:kbound", slack, tol, _context(psi, k=k, **ctx))


def check_lemma_key(psi: WedgeState, k: int, tol: float = IDENTITY_TOL, profile: Optional[EntropyProfile] = None,
                    **ctx) -> CheckResult:
    s = _profile(psi, profile)
    gamma = rdm(psi, k)
    pi = maximally_mixed(psi.d, k)
    d_rel = relative_entropy(gamma.matrix, pi.matrix)
    residual = abs(s[k] + d_rel - math.log(cb.binomial(psi.d, k)))
    return _identity("lem:key", residual, tol, _context(psi, k=k, **ctx))


def full_maximally_mixed(d: int, m: int, cap: int = ORACLE_CAP) -> np.ndarray:
    """pi_m as a d^m square matrix: projector onto the antisymmetric subspace over C(d, m)."""
    e = wedge_embedding(d, m, cap)
    return (e @ e.T) / cb.binomial(d, m)


def check_lemma_pi(d: int, m: int, l: int, tol: float = LEMMA_PI_TOL, cap: int = ORACLE_CAP) -> CheckResult:
    """Tracing the last ``l`` factors out of pi_m leaves pi_{m-l}."""
    if not 1 <= l < m:
        raise ValueError(f"need 1 <= l < m, got l={l}, m={m}")
    if m > d:
        raise ValueError(f"m={m} exceeds d={d}")
    reduced = partial_trace_full(full_maximally_mixed(d, m, cap), d, m, m - l, cap)
    target = full_maximally_mixed(d, m - l, cap)
    residual = float(np.max(np.abs(reduced - target)))
    return _identity("lem:pi", residual, tol, {"d": d, "m": m, "l": l})


def check_rdm_oracle(psi: WedgeState, k: int, tol: float = ORACLE_TOL, cap: int = ORACLE_CAP,
                     **ctx) -> CheckResult:
    """Compare the wedge-basis spectrum of gamma_k with the literal partial trace.

    Tr_{k+1..N} |v><v| = V V^dagger for V the d^k x d^(N-k) reshape of the tensor
    vector, so its spectrum is the squared singular values of V padded with zeros.
    """
    d, n = psi.d, psi.n_particles
    if d**n > cap:
        raise ValueError(f"d^N = {d**n} exceeds the oracle cap {cap}")
    v = embed_full(psi, cap).reshape(d**k, d ** (n - k))
    slow = np.zeros(d**k)
    sv = np.linalg.svd(v, compute_uv=False)
    slow[: sv.size] = sv**2
    fast = np.sort(rdm(psi, k).spectrum())[::-1]
    # the oracle carries d^k - C(d,k) extra zeros off the antisymmetric subspace
    residual = max(float(np.max(np.abs(fast - slow[: fast.size]))),
                   float(np.max(np.abs(slow[fast.size:]), initial=0.0)))
    return _identity("oracle:rdm", residual, tol, _context(psi, k=k, **ctx))


@dataclass
class SuiteConfig:
    min_d: int = 2
    max_d: int = 8
    max_n: int = 4
    trials: int = 50
    seed: int = 42
    inequality_tol: float = INEQUALITY_TOL
    identity_tol: float = IDENTITY_TOL
    oracle_tol: float = ORACLE_TOL
    lemma_pi_tol: float = LEMMA_PI_TOL
    oracle_cap: int = ORACLE_CAP
    claims: tuple = CLAIM_IDS

    def __post_init__(self):
        if self.min_d < 1 or self.max_d < self.min_d:
            raise ValueError(f"invalid d range [{self.min_d}, {self.max_d}]")
        if self.max_n < 1:
            raise ValueError("max_n must be positive")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        unknown = set(self.claims) - set(CLAIM_IDS)
        if unknown:
            raise ValueError(f"unknown claim ids {sorted(unknown)}")
        self.claims = tuple(self.claims)

    def grid(self):
        return [(d, n) for d in range(self.min_d, self.max_d + 1) for n in range(1, min(d, self.max_n) + 1)]


@dataclass
class VerificationReport:
    config: dict
    results: List[CheckResult]

    @property
    def enforced(self) -> List[CheckResult]:
        return [r for r in self.results if not r.informational]

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.enforced if not r.passed]

    @property
    def all_passed(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        enforced = self.enforced
        failed = sum(1 for r in enforced if not r.passed)
        per_claim = {}
        for r in self.results:
            entry = per_claim.setdefault(r.claim_id, {"total": 0, "passed": 0, "failed": 0, "informational": 0,
                                                      "min_slack": None})
            if r.informational:
                entry["informational"] += 1
                continue
            entry["total"] += 1
            entry["passed" if r.passed else "failed"] += 1
            if r.kind == "inequality":
                if entry["min_slack"] is None or r.slack < entry["min_slack"]:
                    entry["min_slack"] = r.slack
        return {
            "total": len(enforced),
            "passed": len(enforced) - failed,
            "failed": failed,
            "informational": len(self.results) - len(enforced),
            "claims": per_claim,
        }

    def to_dict(self) -> dict:
        return {"config": self.config, "results": [r.to_dict() for r in self.results], "summary": self.summary()}

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def trial_seed(master: int, index: int) -> int:
    """Seed of trial ``index``: first 32-bit word of SeedSequence([master, index])."""
    return int(np.random.SeedSequence([master, index]).generate_state(1)[0])


def _state_checks(psi: WedgeState, config: SuiteConfig, **ctx) -> List[CheckResult]:
    claims = set(config.claims)
    ineq, ident = config.inequality_tol, config.identity_tol
    n = psi.n_particles
    out: List[CheckResult] = []
    profile = entropy_profile(psi)
    if "eq:symm" in claims:
        out += check_symmetry(psi, ident, profile, **ctx)
    if "eq:main11" in claims:
        out += check_monotonicity(psi, ineq, profile, **ctx)
    if "eq:main12" in claims and n >= 3:
        out += check_concavity(psi, ineq, profile, **ctx)
    if "coleman" in claims:
        out.append(check_coleman(psi, ineq, profile, **ctx))
    if "eq:main21" in claims and n >= 2:
        out.append(check_clr_bound(psi, ineq, profile, **ctx))
        out.append(check_clr_bound(psi, ineq, profile, support=True, **ctx))
    if "eq:kbound" in claims:
        out += [check_k_bound(psi, k, ineq, profile, **ctx) for k in range(2, n)]
    if "lem:key" in claims:
        out += [check_lemma_key(psi, k, ident, profile, **ctx) for k in range(1, n + 1)]
    if "oracle:rdm" in claims and psi.d**n <= config.oracle_cap:
        out += [check_rdm_oracle(psi, k, config.oracle_tol, config.oracle_cap, **ctx) for k in range(1, n + 1)]
    return out


def _guarded(fn, claim_id, ctx) -> List[CheckResult]:
    try:
        res = fn()
    except Exception as exc:  # one broken case must not stop the suite
        return [CheckResult(claim_id, False, float("nan"), 0.0, dict(ctx, error=f"{type(exc).__name__}: {exc}"),
                            "error")]
    return res if isinstance(res, list) else [res]


def run_suite(config: Optional[SuiteConfig] = None) -> VerificationReport:
    config = config or SuiteConfig()
    results: List[CheckResult] = []

    # deterministic cases: first-N-orbital Slater determinants and the d = N states
    for d, n in config.grid():
        psi = slater(d, range(n))
        ctx = {"source": "slater"}
        results += _guarded(lambda: _state_checks(psi, config, **ctx), "suite", _context(psi, **ctx))
    for n in range(1, config.max_n + 1):
        if config.min_d <= n <= config.max_d:
            psi = random_state(n, n, config.seed)
            ctx = {"source": "d=N", "seed": config.seed}
            results += _guarded(lambda: _state_checks(psi, config, **ctx), "suite", _context(psi, **ctx))

    grid = [(d, n) for d, n in config.grid() if n >= 2] or config.grid()
    for i in range(config.trials):
        seed = trial_seed(config.seed, i)
        d, n = grid[i % len(grid)]
        psi = random_state(d, n, seed)
        ctx = {"source": "random", "seed": seed, "trial": i}
        results += _guarded(lambda: _state_checks(psi, config, **ctx), "suite", _context(psi, **ctx))
        rotated = apply_one_body_unitary(slater(d, range(n)), random_unitary(d, seed))
        ctx = {"source": "rotated_slater", "seed": seed, "trial": i}
        results += _guarded(lambda: _state_checks(rotated, config, **ctx), "suite", _context(rotated, **ctx))

    if "lem:pi" in config.claims:
        for d, m, l in LEMMA_PI_CASES:
            if d**m <= config.oracle_cap:
                results += _guarded(lambda: check_lemma_pi(d, m, l, config.lemma_pi_tol, config.oracle_cap),
                                    "lem:pi", {"d": d, "m": m, "l": l})

    cfg = asdict(config)
    cfg["claims"] = list(config.claims)
    return VerificationReport(cfg, results)
