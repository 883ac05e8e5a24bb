"""
Kraus-form quantum operations on the truncated Fock space.

Channel descriptors are plain dicts (JSON-serializable)::

    {"kind": "identity"}
    {"kind": "gaussian_amp", "G": 2.0}
    {"kind": "gaussian_attenuator", "G": 0.5}
    {"kind": "nla", "g": 1.2, "N": 10, "normalization": null}
    {"kind": "squeezer_conjugated", "r": 0.3, "inner": {...}}
    {"kind": "mp_conjugator", "G": 1.0}          # moment backend only

``build_channel`` turns a descriptor into a ``KrausChannel``; ``to_gaussian``
turns the Gaussian ones into moment-level specs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from . import fock
from .errors import ConstructionError, InvalidInputError
from .gaussian import GaussianChannelSpec

TNI_TOL = 1e-10


@dataclass(frozen=True)
class KrausChannel:
    dim: int
    kraus_ops: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        ops = np.asarray(self.kraus_ops, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[1:] != (self.dim, self.dim):
            raise ConstructionError(f"Kraus operators must have shape (k, {self.dim}, {self.dim})")
        ops.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        excess = np.linalg.eigvalsh(self.effect()).max() - 1.0
        if excess > TNI_TOL:
            raise ConstructionError(
                f"sum K^dag K exceeds identity by {excess:.3e} for channel {self.label!r}"
            )

    def effect(self) -> np.ndarray:
        """Sum K^dag K."""
        return self.dual(np.eye(self.dim))

    def dual(self, op) -> np.ndarray:
        """Heisenberg-picture image sum K^dag O K."""
        m = op.entries if isinstance(op, fock.OperatorMatrix) else np.asarray(op)
        K = self.kraus_ops
        return np.einsum("kji,jl,klm->im", K.conj(), m, K, optimize=True)


@dataclass(frozen=True)
class NlaConfig:
    g: float
    N: int
    normalization: float | None = None

    def __post_init__(self):
        g, N = float(self.g), self.N
        if not (math.isfinite(g) and g >= 1.0):
            raise InvalidInputError(f"NLA gain must be >= 1, got {g}")
        if int(N) != N or N < 0:
            raise InvalidInputError(f"NLA cutoff must be a nonnegative integer, got {N}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "N", int(N))
        log_cap = -2.0 * int(N) * math.log(g)
        if self.normalization is None:
            log_norm = log_cap
        else:
            norm = float(self.normalization)
            if not norm > 0.0:
                raise InvalidInputError("NLA normalization must be positive")
            log_norm = math.log(norm)
            if log_norm > log_cap + 1e-12:
                raise InvalidInputError(
                    f"normalization {norm} exceeds g^(-2N) = {math.exp(log_cap)}; "
                    "the filter would not be trace-non-increasing"
                )
        object.__setattr__(self, "normalization", math.exp(log_norm))
        object.__setattr__(self, "log_normalization", log_norm)

    def to_dict(self) -> dict:
        # None marks the default g^(-2N), which may underflow as a float
        default = self.log_normalization == -2.0 * self.N * math.log(self.g)
        return {"kind": "nla", "g": self.g, "N": self.N,
                "normalization": None if default else self.normalization}


def _amplifier_kraus(G, D):
    # <n+k| A_k |n> = sqrt(C(n+k, k)) ((G-1)/G)^(k/2) G^(-(n+1)/2)
    n = np.arange(D)
    ops = np.zeros((D, D, D))
    logt = 0.5 * math.log((G - 1.0) / G) if G > 1.0 else -np.inf
    for k in range(D if G > 1.0 else 1):
        src = n[: D - k]
        logv = 0.5 * (gammaln(src + k + 1) - gammaln(k + 1) - gammaln(src + 1))
        logv = logv - 0.5 * (src + 1) * math.log(G) + (k * logt if k else 0.0)
        ops[k, src + k, src] = np.exp(logv)
    return ops


def _attenuator_kraus(T, D):
    # <n-k| B_k |n> = sqrt(C(n, k)) T^((n-k)/2) (1-T)^(k/2)
    ops = np.zeros((D, D, D))
    for k in range(D):
        src = np.arange(k, D)
        binom = np.exp(0.5 * (gammaln(src + 1) - gammaln(k + 1) - gammaln(src - k + 1)))
        ops[k, src - k, src] = binom * T ** (0.5 * (src - k)) * (1.0 - T) ** (0.5 * k)
    return ops


def nla_operator(config: NlaConfig, D: int) -> np.ndarray:
    """Q_N = normalization^(1/2) sum_{n<=N} g^n |n><n| on a D-dimensional space."""
    diag = np.zeros(D)
    n = np.arange(min(config.N + 1, D))
    diag[n] = np.exp(0.5 * config.log_normalization + n * math.log(config.g))
    return np.diag(diag).astype(complex)


def build_channel(spec, D: int) -> KrausChannel:
    """Build the Kraus representation of a channel descriptor at truncation D."""
    if isinstance(spec, NlaConfig):
        spec = spec.to_dict()
    kind = spec["kind"]
    if kind == "identity":
        return KrausChannel(D, np.eye(D)[None], "identity")
    if kind == "gaussian_amp":
        G = float(spec["G"])
        if G < 1.0:
            raise InvalidInputError(f"amplifier gain must be >= 1, got {G}")
        return KrausChannel(D, _amplifier_kraus(G, D), f"gaussian_amp(G={G})")
    if kind == "gaussian_attenuator":
        G = float(spec["G"])
        if not 0.0 <= G <= 1.0:
            raise InvalidInputError(f"attenuator transmissivity must lie in [0, 1], got {G}")
        return KrausChannel(D, _attenuator_kraus(G, D), f"gaussian_attenuator(G={G})")
    if kind == "nla":
        cfg = NlaConfig(spec["g"], spec["N"], spec.get("normalization"))
        if cfg.N >= D:
            raise InvalidInputError(f"NLA cutoff N={cfg.N} needs D > N, got D={D}")
        return KrausChannel(D, nla_operator(cfg, D)[None], f"nla(g={cfg.g}, N={cfg.N})")
    if kind == "squeezer_conjugated":
        inner = build_channel(spec["inner"], D)
        s = fock.squeeze_compression(float(spec["r"]), D)
        return KrausChannel(D, s[None] @ inner.kraus_ops, f"S({spec['r']}) {inner.label} S^dag")
    if kind == "mp_conjugator":
        raise InvalidInputError("the measure-and-prepare channel has no finite Kraus form; "
                                "use to_gaussian() or measure_prepare_fock()")
    raise InvalidInputError(f"unknown channel kind {kind!r}")


def gaussian_amp_or_att(G: float) -> dict:
    """Descriptor of the quantum-limited phase-insensitive channel with gain G."""
    return {"kind": "gaussian_amp", "G": G} if G >= 1.0 else {"kind": "gaussian_attenuator", "G": G}


def to_gaussian(spec) -> list[GaussianChannelSpec]:
    """Moment-level equivalent of a Gaussian descriptor (applied left to right)."""
    kind = spec["kind"]
    if kind == "identity":
        return [GaussianChannelSpec("identity")]
    if kind == "gaussian_amp":
        return [GaussianChannelSpec("amplifier", spec["G"])]
    if kind == "gaussian_attenuator":
        return [GaussianChannelSpec("attenuator", spec["G"])]
    if kind == "mp_conjugator":
        return [GaussianChannelSpec("mp_conjugator", spec["G"])]
    if kind == "squeezer_conjugated":
        return to_gaussian(spec["inner"]) + [GaussianChannelSpec("squeezer", spec["r"])]
    raise InvalidInputError(f"channel kind {kind!r} is not Gaussian")


def spec_to_json(spec) -> str:
    if isinstance(spec, NlaConfig):
        spec = spec.to_dict()
    return json.dumps(spec, sort_keys=True)


def spec_from_json(text: str) -> dict:
    spec = json.loads(text)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidInputError("channel descriptor must be an object with a 'kind' key")
    return spec


def apply(channel: KrausChannel, rho):
    """Return (sum K rho K^dag, its trace)."""
    if isinstance(rho, fock.StateVector):
        if rho.modes != 1 or rho.dim != channel.dim:
            raise InvalidInputError("state and channel dimensions differ")
        vs = channel.kraus_ops @ rho.amplitudes
        out = vs.T @ vs.conj()
    else:
        if rho.modes != 1 or rho.dim != channel.dim:
            raise InvalidInputError("state and channel dimensions differ")
        K = channel.kraus_ops
        out = np.einsum("kij,jl,kml->im", K, rho.entries, K.conj(), optimize=True)
    out = 0.5 * (out + out.conj().T)
    return fock.DensityMatrix(channel.dim, 1, out, check=False), float(np.trace(out).real)


def apply_bipartite(channel: KrausChannel, J, acting_on: str = "A"):
    """(E (x) I)(J) for a two-mode vector or density matrix, with its trace."""
    D = channel.dim
    if J.modes != 2 or J.dim != D:
        raise InvalidInputError("bipartite state and channel dimensions differ")
    K = channel.kraus_ops
    if isinstance(J, fock.StateVector):
        psi = J.amplitudes.reshape(D, D)
        outs = K @ psi if acting_on == "A" else psi[None] @ np.transpose(K, (0, 2, 1))
        vecs = outs.reshape(len(K), D * D)
        out = vecs.T @ vecs.conj()
    else:
        t = J.entries.reshape(D, D, D, D)
        if acting_on == "A":
            out = np.einsum("kia,ajbl,kmb->ijml", K, t, K.conj(), optimize=True)
        else:
            out = np.einsum("kjb,iblc,kmc->ijlm", K, t, K.conj(), optimize=True)
        out = out.reshape(D * D, D * D)
    return fock.DensityMatrix(D, 2, out, check=False), float(np.trace(out).real)


def random_operation(D: int, k: int = 1, trace_decreasing: bool = False, seed=None) -> KrausChannel:
    """Random channel from the blocks of a Haar-like isometry.

    With ``trace_decreasing`` a random strict contraction is applied first so
    that sum K^dag K < I.
    """
    if k < 1:
        raise InvalidInputError("need at least one Kraus operator")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((k * D, D)) + 1j * rng.standard_normal((k * D, D))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    ops = q.reshape(k, D, D)
    label = f"random(D={D}, k={k}, seed={seed})"
    if trace_decreasing:
        u = _haar_unitary(rng, D)
        v = _haar_unitary(rng, D)
        s = rng.uniform(0.05, 0.95, size=D)
        ops = ops @ (u @ np.diag(s) @ v)
        label += " contracted"
    return KrausChannel(D, ops, label)


def _haar_unitary(rng, D):
    z = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def dilation_kraus(kind: str, G: float, D: int, D_anc: int) -> np.ndarray:
    """Kraus operators <j|_E U |0>_E from an explicit two-mode unitary dilation.

    ``kind='attenuator'`` uses a beam splitter with transmissivity G,
    ``kind='amplifier'`` a two-mode squeezer with cosh^2 r = G. Intended as a
    small-D cross-check of the closed-form ladder families.
    """
    a = fock.annihilation(D)
    b = fock.annihilation(D_anc)
    A = np.kron(a, np.eye(D_anc))
    B = np.kron(np.eye(D), b)
    if kind == "attenuator":
        theta = math.acos(math.sqrt(G))
        U = expm(theta * (A.conj().T @ B - A @ B.conj().T))
    elif kind == "amplifier":
        r = math.acosh(math.sqrt(G))
        U = expm(r * (A.conj().T @ B.conj().T - A @ B))
    else:
        raise InvalidInputError(f"unknown dilation kind {kind!r}")
    U = U.reshape(D, D_anc, D, D_anc)
    return np.transpose(U[:, :, :, 0], (1, 0, 2))


def measure_prepare_fock(rho, G: float, order: int | None = None) -> fock.DensityMatrix:
    """Heterodyne-and-prepare map rho -> (1/pi) int <a|rho|a> |sqrt(G) a*><sqrt(G) a*| d^2a.

    The integrand is exp(-(1+G)|a|^2) times a polynomial of degree below
    4D per axis on the truncated space, so Gauss-Hermite quadrature of order
    ``2 D`` is exact there.
    """
    if isinstance(rho, fock.StateVector):
        rho = rho.density()
    D = rho.dim
    order = order or 2 * D
    t, w = np.polynomial.hermite.hermgauss(order)
    s = 1.0 / math.sqrt(1.0 + G)
    re, im = np.meshgrid(t, t, indexing="ij")
    alpha = (s * (re + 1j * im)).ravel()
    weight = (np.outer(w, w).ravel()) * s * s / math.pi
    u_in = fock.coherent_amplitudes(alpha, D, normalized=False)
    q = np.einsum("ni,ij,nj->n", u_in.conj(), rho.entries, u_in).real
    u_out = fock.coherent_amplitudes(math.sqrt(G) * alpha.conj(), D, normalized=False)
    out = np.einsum("n,ni,nj->ij", weight * q, u_out, u_out.conj())
    out = 0.5 * (out + out.conj().T)
    return fock.DensityMatrix(D, 1, out, check=False)
