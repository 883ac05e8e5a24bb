"""
Truncated Fock-space numerics.

States and operators live on span{|0>, ..., |D-1>} per mode with hbar = 1 and
[x, p] = i, so a coherent state has variance 1/2 in each quadrature. Two-mode
objects use the Kronecker ordering A (x) B, i.e. index ``n_A * D + n_B``.

Second-moment operators (``x2``, ``p2``) are the truncations P x^2 P of the
infinite-dimensional squares, not the squares of the truncated ``x``/``p``.
Expectation values of states supported in the truncated space are therefore
exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import InvalidInputError, TruncationWarning

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12
R_MAX = 2.0


def default_dim(max_amplitude: float) -> int:
    """Truncation dimension ``ceil(m^2 + 10 m + 20)`` for amplitude magnitude ``m``."""
    m = abs(float(max_amplitude))
    return int(math.ceil(m * m + 10.0 * m + 20.0))


def _check_dim(D):
    if int(D) != D or D < 2:
        raise InvalidInputError(f"truncation dimension must be an integer >= 2, got {D!r}")
    return int(D)


@dataclass(frozen=True)
class StateVector:
    dim: int
    modes: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_dim(self.dim)
        if self.modes not in (1, 2):
            raise InvalidInputError("only one- and two-mode states are supported")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.dim**self.modes,):
            raise InvalidInputError(
                f"expected {self.dim**self.modes} amplitudes, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidInputError("amplitudes must be finite")
        if np.vdot(amps, amps).real > 1.0 + NORM_TOL:
            raise InvalidInputError("state is super-normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "StateVector":
        n = math.sqrt(self.norm2)
        if n == 0.0:
            raise InvalidInputError("cannot normalize the zero vector")
        return StateVector(self.dim, self.modes, self.amplitudes / n)

    def density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(self.dim, self.modes, np.outer(a, a.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    dim: int
    modes: int
    entries: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        _check_dim(self.dim)
        if self.modes not in (1, 2):
            raise InvalidInputError("only one- and two-mode states are supported")
        rho = np.asarray(self.entries, dtype=complex)
        n = self.dim**self.modes
        if rho.shape != (n, n):
            raise InvalidInputError(f"expected a {n}x{n} matrix, got shape {rho.shape}")
        if self.check:
            scale = max(1.0, float(np.abs(rho).max(initial=0.0)))
            if np.abs(rho - rho.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
                raise InvalidInputError("density matrix is not Hermitian")
            if np.trace(rho).real > 1.0 + NORM_TOL:
                raise InvalidInputError("trace exceeds one")
            if n <= 4096 and np.linalg.eigvalsh(rho).min() < -PSD_TOL:
                raise InvalidInputError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def normalized(self) -> "DensityMatrix":
        t = self.trace
        if t <= 0.0:
            raise InvalidInputError("cannot normalize a zero-trace operator")
        return DensityMatrix(self.dim, self.modes, self.entries / t, check=False)


@dataclass(frozen=True)
class OperatorMatrix:
    dim: int
    entries: np.ndarray
    tag: str = "custom"
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __matmul__(self, other):
        other = other.entries if isinstance(other, OperatorMatrix) else other
        return self.entries @ other


def annihilation(D: int) -> np.ndarray:
    D = _check_dim(D)
    return np.diag(np.sqrt(np.arange(1, D, dtype=float)), k=1).astype(complex)


def number_operator(D: int) -> np.ndarray:
    return np.diag(np.arange(_check_dim(D), dtype=float)).astype(complex)


def quadrature_operator(which: str, D: int) -> OperatorMatrix:
    """Truncated x = (a + a^dag)/sqrt2 or p = (a - a^dag)/(i sqrt2)."""
    a = annihilation(D)
    ad = a.conj().T
    if which == "x":
        m = (a + ad) / math.sqrt(2.0)
    elif which == "p":
        m = (a - ad) / (1j * math.sqrt(2.0))
    else:
        raise InvalidInputError(f"unknown quadrature {which!r}")
    return OperatorMatrix(D, m, tag=which)


def quadrature_square(which: str, D: int) -> OperatorMatrix:
    """Truncation of x^2 or p^2 taken from the untruncated operator.

    x^2 = (a^2 + a^dag^2 + 2 n + 1) / 2 and p^2 = (2 n + 1 - a^2 - a^dag^2) / 2.
    """
    D = _check_dim(D)
    n = np.arange(D, dtype=float)
    off = np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0)) / 2.0
    if which == "x":
        sign = 1.0
    elif which == "p":
        sign = -1.0
    else:
        raise InvalidInputError(f"unknown quadrature {which!r}")
    m = np.diag(n + 0.5) + sign * (np.diag(off, 2) + np.diag(off, -2))
    return OperatorMatrix(D, m.astype(complex), tag=which + "2")


def squeeze_operator(r: float, D: int, r_max: float = R_MAX, leakage_tol: float = 1e-10,
                     faithful_dim: int | None = None) -> OperatorMatrix:
    """Squeezer S(r) = exp(r (a^2 - a^dag^2) / 2) on the truncated space.

    The truncated generator is anti-Hermitian, so the result is unitary on the
    D-dimensional space, but its matrix elements near the cutoff differ from
    the true squeezer. ``metadata['leakage']`` is the largest probability that
    the true S maps |n>, n < faithful_dim (default D/4), outside the truncated
    space, estimated with a 2D reference. A ``TruncationWarning`` is issued
    above ``leakage_tol``.
    """
    D = _check_dim(D)
    r = float(r)
    if not math.isfinite(r) or abs(r) > r_max:
        raise InvalidInputError(f"|r| must be <= {r_max}, got {r}")
    s = _squeezer_matrix(r, D)
    defect = float(np.abs(s.conj().T @ s - np.eye(D)).max())
    leakage = 0.0
    if r != 0.0:
        ref = _squeezer_matrix(r, 2 * D)
        cols = ref[:, : max(1, faithful_dim or D // 4)]
        leakage = float(np.max(1.0 - np.sum(np.abs(cols[:D]) ** 2, axis=0)))
        if leakage > leakage_tol:
            warnings.warn(
                f"squeezer r={r} leaks {leakage:.2e} outside D={D}", TruncationWarning, stacklevel=2
            )
    return OperatorMatrix(D, s, tag=f"squeezer({r})",
                          metadata={"unitarity_defect": defect, "leakage": leakage})


def squeeze_compression(r: float, D: int, factor: int = 2) -> np.ndarray:
    """Top-left D x D block of a squeezer built on ``factor * D`` levels.

    This approximates P S(r) P, the compression of the true squeezer onto the
    truncated space. It is a contraction rather than a unitary, so composing
    it with a channel gives a trace-non-increasing operation whose action is
    faithful up to the cutoff.
    """
    D = _check_dim(D)
    r = float(r)
    if not math.isfinite(r) or abs(r) > R_MAX:
        raise InvalidInputError(f"|r| must be <= {R_MAX}, got {r}")
    return _squeezer_matrix(r, factor * D)[:D, :D]


def _squeezer_matrix(r, D):
    a = annihilation(D)
    gen = 0.5 * r * (a @ a - a.conj().T @ a.conj().T)
    return expm(gen)


def coherent_amplitudes(alpha, D: int, normalized: bool = True) -> np.ndarray:
    """Fock amplitudes of |alpha> for an array of amplitudes, shape ``alpha.shape + (D,)``.

    With ``normalized=False`` the prefactor exp(-|alpha|^2/2) is omitted,
    leaving alpha^n / sqrt(n!).
    """
    D = _check_dim(D)
    alpha = np.asarray(alpha, dtype=complex)
    n = np.arange(D)
    mag = np.abs(alpha)[..., None]
    phase = np.exp(1j * np.angle(alpha))[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logmag = n * np.log(mag) - 0.5 * gammaln(n + 1)
    # 0 ** 0 = 1
    logmag = np.where((mag == 0) & (n == 0), 0.0, logmag)
    if normalized:
        logmag = logmag - 0.5 * mag**2
    return np.exp(logmag) * phase**n


def coherent_state(alpha: complex, D: int) -> StateVector:
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise InvalidInputError("coherent amplitude must be finite")
    return StateVector(_check_dim(D), 1, coherent_amplitudes(alpha, D))


def fock_state(n: int, D: int) -> StateVector:
    D = _check_dim(D)
    if not 0 <= n < D:
        raise InvalidInputError(f"photon number {n} outside truncation {D}")
    amps = np.zeros(D, dtype=complex)
    amps[n] = 1.0
    return StateVector(D, 1, amps)


def two_mode_squeezed_state(xi: float, D: int) -> StateVector:
    """sqrt(1 - xi^2) sum_n xi^n |n>|n>, truncated at n < D."""
    D = _check_dim(D)
    xi = float(xi)
    if not 0.0 <= xi < 1.0:
        raise InvalidInputError(f"xi must lie in [0, 1), got {xi}")
    amps = np.zeros(D * D, dtype=complex)
    diag = math.sqrt(1.0 - xi * xi) * xi ** np.arange(D, dtype=float)
    amps[np.arange(D) * (D + 1)] = diag
    return StateVector(D, 2, amps)


def partial_trace(rho, keep: str) -> DensityMatrix:
    """Reduce a two-mode state (vector or density matrix) to mode ``keep``."""
    if isinstance(rho, StateVector):
        if rho.modes != 2:
            raise InvalidInputError("partial trace needs a two-mode state")
        psi = rho.amplitudes.reshape(rho.dim, rho.dim)
        if keep == "A":
            red = psi @ psi.conj().T
        elif keep == "B":
            red = psi.T @ psi.conj()
        else:
            raise InvalidInputError(f"keep must be 'A' or 'B', got {keep!r}")
        return DensityMatrix(rho.dim, 1, red, check=False)
    if rho.modes != 2:
        raise InvalidInputError("partial trace needs a two-mode state")
    D = rho.dim
    t = rho.entries.reshape(D, D, D, D)
    if keep == "A":
        red = np.einsum("ajbj->ab", t)
    elif keep == "B":
        red = np.einsum("jajb->ab", t)
    else:
        raise InvalidInputError(f"keep must be 'A' or 'B', got {keep!r}")
    return DensityMatrix(D, 1, red, check=False)


def expectation(op, state) -> complex:
    """tr[op rho] (unnormalized) for a state vector or density matrix."""
    m = op.entries if isinstance(op, OperatorMatrix) else np.asarray(op)
    if isinstance(state, StateVector):
        v = state.amplitudes
        return complex(np.vdot(v, m @ v))
    return complex(np.trace(m @ state.entries))


def embed(op, mode: str, D: int) -> np.ndarray:
    """Lift a single-mode operator to the two-mode space."""
    m = op.entries if isinstance(op, OperatorMatrix) else np.asarray(op)
    eye = np.eye(D)
    if mode == "A":
        return np.kron(m, eye)
    if mode == "B":
        return np.kron(eye, m)
    raise InvalidInputError(f"mode must be 'A' or 'B', got {mode!r}")
