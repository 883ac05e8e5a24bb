"""
Benchmarks for quantum amplifiers acting on Gaussian-distributed coherent states.

Modules
-------
fock      truncated Fock-space states and operators
gaussian  covariance-matrix states and channels
channels  Kraus-form operations (Gaussian amplifier/attenuator, NLA, random)
ensemble  prior-averaged MSDs, fidelity and homodyne-sample estimators
bounds    closed-form limits and margin reports
nla       closed-form noiseless-linear-amplifier performance
epr       EPR uncertainty and distillation certificates
figures   figure data tables
verify    property suites
cli       command-line entry point
"""

from .bounds import (AupInput, BoundReport, aup_evaluate, bound_table, fidelity_bound, fidelity_margin,
                     gaussian_min_msd, gaussian_optimal_gain, symmetric_msd_bound, theorem1_margin,
                     theorem1_rhs, theorem2_rhs)
from .channels import KrausChannel, NlaConfig, apply, apply_bipartite, build_channel, random_operation, to_gaussian
from .ensemble import (IntegrationGrid, MomentSummary, Prior, SampleRecord, Task, estimate_from_samples,
                       fidelity_estimate, jackknife_errors, msd_estimate, read_samples, summarize, write_samples)
from .epr import Certificate, EprValue, choi_msd_identity, delta_from_msd, distillation_certificate, epr_tmss, \
    epr_uncertainty
from .errors import (ConstructionError, InsufficientDataError, IntegrationError, InvalidInputError,
                     PreconditionError, TruncationWarning)
from .gaussian import GaussianChannelSpec, GaussianState, apply_gaussian_channel
from .nla import NlaPerformance, nla_asymptote, nla_msd, nla_optimal_gain

__all__ = [
    "AupInput",
    "BoundReport",
    "aup_evaluate",
    "bound_table",
    "fidelity_bound",
    "fidelity_margin",
    "gaussian_min_msd",
    "gaussian_optimal_gain",
    "symmetric_msd_bound",
    "theorem1_margin",
    "theorem1_rhs",
    "theorem2_rhs",
    "KrausChannel",
    "NlaConfig",
    "apply",
    "apply_bipartite",
    "build_channel",
    "random_operation",
    "to_gaussian",
    "IntegrationGrid",
    "MomentSummary",
    "Prior",
    "SampleRecord",
    "Task",
    "estimate_from_samples",
    "fidelity_estimate",
    "jackknife_errors",
    "msd_estimate",
    "read_samples",
    "summarize",
    "write_samples",
    "Certificate",
    "EprValue",
    "choi_msd_identity",
    "delta_from_msd",
    "distillation_certificate",
    "epr_tmss",
    "epr_uncertainty",
    "ConstructionError",
    "InsufficientDataError",
    "IntegrationError",
    "InvalidInputError",
    "PreconditionError",
    "TruncationWarning",
    "GaussianChannelSpec",
    "GaussianState",
    "apply_gaussian_channel",
    "NlaPerformance",
    "nla_asymptote",
    "nla_msd",
    "nla_optimal_gain",
]

__version__ = "0.1.0"
