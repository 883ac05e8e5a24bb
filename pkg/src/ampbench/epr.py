"""
EPR uncertainty, the MSD-to-EPR bridge and entanglement-distillation certificates.

For a two-mode state J the EPR uncertainty is

    Delta(J) = min{1, (1/2)[Var(x_A - x_B) + Var(p_A + p_B)]}.

At eta_x = eta_p = 1 + lam the ensemble MSDs of a channel equal the EPR
second moments of (E (x) I)(psi_xi) with lam = (1 - xi^2)/xi^2, giving
Delta = M - 1/2 where M is the average normalized MSD. Certificates compare M
against three thresholds: 1/2 (any operation), the Gaussian-operation floor,
and 3/2 (entanglement breaking).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .bounds import theorem2_rhs
from .channels import KrausChannel, apply_bipartite
from .ensemble import IntegrationGrid, MomentSummary, Prior, Task, msd_estimate
from .errors import InvalidInputError, PreconditionError, TruncationWarning
from .gaussian import GaussianState

NORM_TOL = 1e-9
VERDICT_TOL = 1e-9
GAIN_TOL = 1e-12
TMSS_TAIL_TOL = 1e-6


@dataclass(frozen=True)
class EprValue:
    delta: float
    raw: float

    @classmethod
    def from_raw(cls, raw: float) -> "EprValue":
        return cls(min(1.0, max(0.0, raw)), raw)


@dataclass(frozen=True)
class Certificate:
    summary: MomentSummary
    delta: EprValue
    physical: bool
    beats_gaussian: bool
    beats_eb: bool
    margins: dict
    thresholds: dict
    errors: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        s = self.summary
        out = {
            "p_s": s.p_s,
            "vbar_x_prob": s.vbar_x_prob,
            "vbar_p_prob": s.vbar_p_prob,
            "delta_raw": self.delta.raw,
            "delta": self.delta.delta,
            "thresholds": dict(self.thresholds),
            "verdicts": {"physical": self.physical, "beats_gaussian": self.beats_gaussian,
                         "beats_eb": self.beats_eb},
            "margins": dict(self.margins),
            "lambda": s.lam,
        }
        if self.errors:
            out["standard_errors"] = dict(self.errors)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def epr_tmss(xi: float) -> float:
    """(1 - xi)^2 / (1 - xi^2)."""
    if not 0.0 <= xi < 1.0:
        raise InvalidInputError(f"xi must lie in [0, 1), got {xi}")
    return (1.0 - xi) ** 2 / (1.0 - xi * xi)


def _two_mode_moment(state, A, B):
    """<A (x) B> for a two-mode vector or density matrix."""
    D = state.dim
    if isinstance(state, fock.StateVector):
        psi = state.amplitudes.reshape(D, D)
        return complex(np.trace(psi.conj().T @ A @ psi @ B.T))
    t = state.entries.reshape(D, D, D, D)
    return complex(np.einsum("ki,lj,ijkl->", A, B, t, optimize=True))


def epr_second_moments(state, g_x: float = 1.0, g_p: float = 1.0):
    """tr[(x_A - g_x x_B)^2 J] and tr[(p_A + g_p p_B)^2 J] with the first moments.

    Returns ((m2_x, m1_x), (m2_p, m1_p)).
    """
    D = state.dim
    eye = np.eye(D)
    x = fock.quadrature_operator("x", D).entries
    p = fock.quadrature_operator("p", D).entries
    x2 = fock.quadrature_square("x", D).entries
    p2 = fock.quadrature_square("p", D).entries
    mom = lambda a, b: _two_mode_moment(state, a, b).real  # noqa: E731
    m2x = mom(x2, eye) + g_x * g_x * mom(eye, x2) - 2.0 * g_x * mom(x, x)
    m1x = mom(x, eye) - g_x * mom(eye, x)
    m2p = mom(p2, eye) + g_p * g_p * mom(eye, p2) + 2.0 * g_p * mom(p, p)
    m1p = mom(p, eye) + g_p * mom(eye, p)
    return (m2x, m1x), (m2p, m1p)


def epr_uncertainty(J) -> EprValue:
    """EPR uncertainty of a normalized two-mode state (Fock vector/matrix or Gaussian)."""
    if isinstance(J, GaussianState):
        if J.modes != 2:
            raise InvalidInputError("EPR uncertainty needs a two-mode state")
        V = J.cov
        raw = 0.5 * ((V[0, 0] + V[2, 2] - 2 * V[0, 2]) + (V[1, 1] + V[3, 3] + 2 * V[1, 3]))
        return EprValue(min(1.0, raw), raw)
    if J.modes != 2:
        raise InvalidInputError("EPR uncertainty needs a two-mode state")
    norm = J.norm2 if isinstance(J, fock.StateVector) else J.trace
    if abs(norm - 1.0) > NORM_TOL:
        raise InvalidInputError(f"state must be normalized (trace {norm}); normalize first")
    (m2x, m1x), (m2p, m1p) = epr_second_moments(J)
    raw = 0.5 * ((m2x - m1x * m1x) + (m2p - m1p * m1p))
    return EprValue(min(1.0, raw), raw)


def _check_bridge(summary: MomentSummary):
    t, lam = summary.task, summary.lam
    target = 1.0 + lam
    if t.conjugate or abs(t.eta_x - target) > GAIN_TOL * target or abs(t.eta_p - target) > GAIN_TOL * target:
        raise PreconditionError(
            f"the MSD-EPR correspondence needs a normal task with eta_x = eta_p = 1 + lam = {target}; "
            f"got {t}"
        )


def average_normalized_msd(summary: MomentSummary) -> float:
    return 0.5 * (summary.vbar_x + summary.vbar_p) / summary.p_s


def delta_from_msd(summary: MomentSummary) -> EprValue:
    """EPR uncertainty of the Choi-type state implied by ensemble MSDs at eta = 1 + lam."""
    _check_bridge(summary)
    return EprValue.from_raw(average_normalized_msd(summary) - 0.5)


def distillation_certificate(summary: MomentSummary, errors: dict | None = None,
                             sigmas: float = 0.0) -> Certificate:
    """Classify a summary against the physical, Gaussian and entanglement-breaking thresholds.

    With M the average normalized MSD: physical iff M >= 1/2, beats_gaussian
    iff physical and M is strictly below the Gaussian floor, beats_eb iff
    M < 3/2. Margins are M minus each threshold.

    For estimates from data, pass ``errors`` (see ``jackknife_errors``) and
    ``sigmas`` > 0. A threshold then counts as beaten only if M lies more than
    ``sigmas`` standard errors below it, and data count as unphysical only if
    M lies that far below 1/2.
    """
    _check_bridge(summary)
    if sigmas < 0:
        raise InvalidInputError("sigmas must be nonnegative")
    M = average_normalized_msd(summary)
    slack = sigmas * float((errors or {}).get("average_msd", 0.0))
    th = {"physical": 0.5, "gaussian": theorem2_rhs(summary.lam), "eb": 1.5}
    margins = {k: M - v for k, v in th.items()}
    physical = margins["physical"] >= -VERDICT_TOL - slack
    beats_gaussian = physical and margins["gaussian"] < -VERDICT_TOL - slack
    beats_eb = margins["eb"] < -VERDICT_TOL - slack
    return Certificate(summary, EprValue.from_raw(M - 0.5), bool(physical), bool(beats_gaussian),
                       bool(beats_eb), margins, th, dict(errors or {}))


def choi_msd_identity(channel: KrausChannel, xi: float, g_x: float = 1.0, g_p: float = 1.0,
                      grid: IntegrationGrid | None = None):
    """Compare Choi-state second moments with the ensemble MSD expression.

    lhs_z = tr[(z_A -+ g_z z_B)^2 J] with J = (E (x) I)(psi_xi)/P_s, and
    rhs_z = vbar_z/P_s - eta_z/(2(1+lam)) with eta_z = (1+lam) g_z^2 and
    lam = (1 - xi^2)/xi^2. A negative ``g_p`` selects the conjugating task.
    Returns (lhs, rhs, max_abs_diff).
    """
    if not 0.0 < xi < 1.0:
        raise InvalidInputError(f"xi must lie in (0, 1), got {xi}")
    if g_x < 0:
        raise InvalidInputError("g_x must be nonnegative")
    D = channel.dim
    lam = (1.0 - xi * xi) / (xi * xi)
    tail = xi ** (2 * D)
    if tail > TMSS_TAIL_TOL:
        warnings.warn(f"TMSS xi={xi} keeps weight {tail:.1e} above D={D}", TruncationWarning, stacklevel=2)
    psi = fock.two_mode_squeezed_state(xi, D)
    out, weight = apply_bipartite(channel, psi)
    J = fock.DensityMatrix(D, 2, out.entries / weight, check=False)
    (m2x, _), (m2p, _) = epr_second_moments(J, g_x, g_p)
    lhs = (m2x, m2p)

    task = Task((1.0 + lam) * g_x * g_x, (1.0 + lam) * g_p * g_p, conjugate=g_p < 0)
    s = msd_estimate(channel, task, Prior(lam), grid)
    rhs = (s.vbar_x_prob - task.eta_x / (2.0 * (1.0 + lam)),
           s.vbar_p_prob - task.eta_p / (2.0 * (1.0 + lam)))
    return lhs, rhs, max(abs(lhs[0] - rhs[0]), abs(lhs[1] - rhs[1]))
