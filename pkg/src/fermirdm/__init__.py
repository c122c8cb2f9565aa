"""Entropies of fermionic reduced density matrices."""

from .combinadics import binomial, merge_sign, rank, unrank
from .entropy import EntropyProfile, entropy_profile, relative_entropy, von_neumann
from .fermion import (
    MaximallyMixed,
    ReducedDensityMatrix,
    WedgeState,
    apply_one_body_unitary,
    embed_full,
    load_state,
    maximally_mixed,
    random_state,
    random_unitary,
    rdm,
    save_state,
    slater,
    support_dimension,
)
from .optimize import OptimizationConfig, OptimizationResult, entropy_gradient, minimize_entropy, slater_proximity
from .verify import CheckResult, SuiteConfig, VerificationReport, run_suite

__version__ = "0.1.0"
