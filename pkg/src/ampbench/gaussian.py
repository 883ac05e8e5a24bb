"""
Moment-level calculus for Gaussian states and channels.

Quadrature ordering is (x1, p1[, x2, p2]) throughout; coherent states have
covariance I/2. Single-mode channels act as

    mean -> X mean,    cov -> X cov X^T + Y

with (X, Y) fixed by the channel kind. On two-mode states a channel acts on
mode A unless told otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-10

KINDS = ("amplifier", "attenuator", "squeezer", "mp_conjugator", "identity")


def symplectic_form(modes: int) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def is_physical(cov, tol: float = PHYSICAL_TOL) -> bool:
    """True when cov + (i/2) Omega is positive semidefinite within ``tol``."""
    cov = np.asarray(cov, dtype=float)
    modes = cov.shape[0] // 2
    return bool(np.linalg.eigvalsh(cov + 0.5j * symplectic_form(modes)).min() >= -tol)


@dataclass(frozen=True)
class GaussianState:
    modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if self.modes not in (1, 2):
            raise InvalidInputError("only one- and two-mode Gaussian states are supported")
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        n = 2 * self.modes
        if mean.shape != (n,) or cov.shape != (n, n):
            raise InvalidInputError("mean/cov shapes do not match the number of modes")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidInputError("moments must be finite")
        if np.abs(cov - cov.T).max() > SYMMETRY_TOL * max(1.0, np.abs(cov).max()):
            raise InvalidInputError("covariance matrix is not symmetric")
        if not is_physical(cov):
            raise InvalidInputError("covariance violates the uncertainty principle")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class GaussianChannelSpec:
    kind: str
    parameter: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown Gaussian channel kind {self.kind!r}")
        p = float(self.parameter)
        if not math.isfinite(p):
            raise InvalidInputError("channel parameter must be finite")
        if self.kind == "amplifier" and p < 1.0:
            raise InvalidInputError(f"amplifier gain must be >= 1, got {p}")
        if self.kind == "attenuator" and not 0.0 <= p <= 1.0:
            raise InvalidInputError(f"attenuator transmissivity must lie in [0, 1], got {p}")
        if self.kind == "mp_conjugator" and p < 0.0:
            raise InvalidInputError(f"measure-and-prepare gain must be >= 0, got {p}")
        object.__setattr__(self, "parameter", p)

    @classmethod
    def phase_insensitive(cls, G: float) -> "GaussianChannelSpec":
        """Quantum-limited amplifier for G >= 1, attenuator for G < 1."""
        return cls("amplifier", G) if G >= 1.0 else cls("attenuator", G)

    def matrices(self):
        """Return (X, Y) for the single-mode action."""
        G = self.parameter
        eye = np.eye(2)
        if self.kind == "identity":
            return eye, np.zeros((2, 2))
        if self.kind == "amplifier":
            return math.sqrt(G) * eye, 0.5 * (G - 1.0) * eye
        if self.kind == "attenuator":
            return math.sqrt(G) * eye, 0.5 * (1.0 - G) * eye
        if self.kind == "squeezer":
            return np.diag([math.exp(-G), math.exp(G)]), np.zeros((2, 2))
        # heterodyne (adds I/2), conjugate, rescale by G, re-prepare (adds I/2)
        return math.sqrt(G) * np.diag([1.0, -1.0]), 0.5 * (G + 1.0) * eye

    def to_dict(self) -> dict:
        return {"kind": self.kind, "parameter": self.parameter}


def vacuum(modes: int = 1) -> GaussianState:
    return GaussianState(modes, np.zeros(2 * modes), 0.5 * np.eye(2 * modes))


def coherent(alpha: complex) -> GaussianState:
    alpha = complex(alpha)
    return GaussianState(1, math.sqrt(2.0) * np.array([alpha.real, alpha.imag]), 0.5 * np.eye(2))


def two_mode_squeezed(xi: float) -> GaussianState:
    """Moments of sqrt(1 - xi^2) sum xi^n |n>|n>."""
    if not 0.0 <= xi < 1.0:
        raise InvalidInputError(f"xi must lie in [0, 1), got {xi}")
    c = (1.0 + xi * xi) / (1.0 - xi * xi)
    s = 2.0 * xi / (1.0 - xi * xi)
    z = np.diag([1.0, -1.0])
    cov = 0.5 * np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])
    return GaussianState(2, np.zeros(4), cov)


def apply_gaussian_channel(state: GaussianState, spec, mode: str = "A") -> GaussianState:
    """Apply a channel spec (or a sequence of specs, first applied first)."""
    if not isinstance(spec, GaussianChannelSpec):
        for s in spec:
            state = apply_gaussian_channel(state, s, mode)
        return state
    X, Y = spec.matrices()
    if state.modes == 2:
        idx = {"A": 0, "B": 2}[mode]
        Xf, Yf = np.eye(4), np.zeros((4, 4))
        Xf[idx:idx + 2, idx:idx + 2] = X
        Yf[idx:idx + 2, idx:idx + 2] = Y
        X, Y = Xf, Yf
    return GaussianState(state.modes, X @ state.mean, X @ state.cov @ X.T + Y)


def moments(state: GaussianState):
    """Per-mode (mean_x, mean_p, var_x, var_p) tuples; a single tuple for one mode."""
    out = []
    for k in range(state.modes):
        i = 2 * k
        out.append((float(state.mean[i]), float(state.mean[i + 1]),
                    float(state.cov[i, i]), float(state.cov[i + 1, i + 1])))
    return out[0] if state.modes == 1 else tuple(out)


def coherent_overlap(state: GaussianState, beta: complex) -> float:
    """<beta| rho |beta> for a single-mode Gaussian rho."""
    beta = complex(beta)
    d = state.mean - math.sqrt(2.0) * np.array([beta.real, beta.imag])
    m = state.cov + 0.5 * np.eye(2)
    return float(math.exp(-0.5 * d @ np.linalg.solve(m, d)) / math.sqrt(np.linalg.det(m)))
