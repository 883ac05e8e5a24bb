"""
Observables averaged over the Gaussian-distributed coherent-state ensemble.

The prior is p(alpha) = (lam/pi) exp(-lam |alpha|^2). Two backends evaluate
the same integrals:

* Fock (``KrausChannel``): truncated coherent states carry an exact
  exp(-|alpha|^2) factor, so Gauss-Hermite nodes are placed for the weight
  exp(-(1+lam)|alpha|^2) and the remaining integrand is a polynomial. Order
  ``D + 1`` per axis integrates the truncated model exactly.
* Moments (``GaussianChannelSpec`` or a list of them): the integrand is a
  quadratic polynomial in alpha times the prior.

Monte Carlo sampling from the prior is available for both as an independent
check.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import fock
from .channels import KrausChannel
from .errors import InsufficientDataError, IntegrationError, InvalidInputError, TruncationWarning
from .gaussian import GaussianChannelSpec

SQRT2 = math.sqrt(2.0)
DEFAULT_ORDER = 48
SAMPLE_HEADER = ["shot_id", "alpha_re", "alpha_im", "quad", "value", "herald"]


@dataclass(frozen=True)
class Prior:
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise InvalidInputError(f"prior inverse width must be positive, got {self.lam}")

    def sample(self, n: int, rng) -> np.ndarray:
        s = math.sqrt(0.5 / self.lam)
        return s * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


@dataclass(frozen=True)
class Task:
    eta_x: float
    eta_p: float
    conjugate: bool = False

    def __post_init__(self):
        if not (self.eta_x > 0 and self.eta_p > 0):
            raise InvalidInputError("task gains must be strictly positive")

    @classmethod
    def symmetric(cls, eta: float, conjugate: bool = False) -> "Task":
        return cls(eta, eta, conjugate)

    @property
    def eta(self) -> float:
        return math.sqrt(self.eta_x * self.eta_p)

    def targets(self, alpha):
        """Target quadrature means (sqrt(eta_x) x_a, +-sqrt(eta_p) p_a)."""
        alpha = np.asarray(alpha)
        sign = -1.0 if self.conjugate else 1.0
        return (math.sqrt(self.eta_x) * SQRT2 * alpha.real,
                sign * math.sqrt(self.eta_p) * SQRT2 * alpha.imag)

    def to_dict(self) -> dict:
        return {"eta_x": self.eta_x, "eta_p": self.eta_p, "conjugate": self.conjugate}


@dataclass(frozen=True)
class IntegrationGrid:
    scheme: str = "gauss_hermite"
    order: int | None = DEFAULT_ORDER
    samples: int = 100_000
    seed: int | None = 0

    def __post_init__(self):
        if self.scheme == "gauss_hermite":
            if self.order is not None and self.order < 8:
                raise InvalidInputError("Gauss-Hermite order must be >= 8")
        elif self.scheme == "monte_carlo":
            if self.samples < 10_000:
                raise InvalidInputError("Monte Carlo needs at least 1e4 samples")
        else:
            raise InvalidInputError(f"unknown integration scheme {self.scheme!r}")

    @classmethod
    def gauss_hermite(cls, order: int | None = DEFAULT_ORDER) -> "IntegrationGrid":
        return cls("gauss_hermite", order=order)

    @classmethod
    def monte_carlo(cls, samples: int = 100_000, seed: int = 0) -> "IntegrationGrid":
        return cls("monte_carlo", order=None, samples=samples, seed=seed)

    def nodes(self, width: float, order: int | None = None):
        """Nodes and weights for int (width/pi) exp(-width |a|^2) f(a) d^2a."""
        if self.scheme == "monte_carlo":
            rng = np.random.default_rng(self.seed)
            alpha = Prior(width).sample(self.samples, rng)
            return alpha, np.full(self.samples, 1.0 / self.samples)
        n = order or self.order or DEFAULT_ORDER
        t, w = np.polynomial.hermite.hermgauss(n)
        re, im = np.meshgrid(t, t, indexing="ij")
        alpha = ((re + 1j * im) / math.sqrt(width)).ravel()
        weight = np.outer(w, w).ravel() / math.pi
        return alpha, weight


@dataclass(frozen=True)
class MomentSummary:
    p_s: float
    vbar_x: float
    vbar_p: float
    task: Task
    lam: float
    fidelity: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not 0.0 < self.p_s <= 1.0 + 1e-10:
            raise InvalidInputError(f"success probability must lie in (0, 1], got {self.p_s}")
        for v in (self.vbar_x, self.vbar_p):
            if not (math.isfinite(v) and v >= 0.0):
                raise InvalidInputError(f"mean square deviations must be finite and >= 0, got {v}")
        if self.fidelity is not None and not -1e-12 <= self.fidelity <= 1.0 + 1e-10:
            raise InvalidInputError(f"fidelity must lie in [0, 1], got {self.fidelity}")

    @property
    def vbar_x_prob(self) -> float:
        return self.vbar_x / self.p_s

    @property
    def vbar_p_prob(self) -> float:
        return self.vbar_p / self.p_s


@dataclass(frozen=True)
class SampleRecord:
    alpha_re: float
    alpha_im: float
    quad: str
    value: float
    herald: int

    def __post_init__(self):
        if self.quad not in ("x", "p"):
            raise InvalidInputError(f"quad must be 'x' or 'p', got {self.quad!r}")
        if self.herald not in (0, 1):
            raise InvalidInputError(f"herald must be 0 or 1, got {self.herald!r}")
        if not all(math.isfinite(v) for v in (self.alpha_re, self.alpha_im, self.value)):
            raise InvalidInputError("sample fields must be finite")


def prior_moment(lam: float, k: int) -> float:
    """int p_lam(a) exp(-|a|^2) |a|^(2k) d^2a = lam k! / (1+lam)^(k+1)."""
    if not lam > 0:
        raise InvalidInputError("lam must be positive")
    if k < 0 or int(k) != k:
        raise InvalidInputError("k must be a nonnegative integer")
    k = int(k)
    if k <= 170:
        return lam * math.factorial(k) / (1.0 + lam) ** (k + 1)
    return math.exp(math.log(lam) + math.lgamma(k + 1) - (k + 1) * math.log1p(lam))


def gaussian_amp_msd_closed(G: float, eta: float, lam: float) -> float:
    """MSD of the phase-insensitive Gaussian channel with gain G for target gain eta."""
    return (math.sqrt(G) - math.sqrt(eta)) ** 2 / lam + 0.5 * (G + abs(G - 1.0))


def _fsum(a) -> float:
    return math.fsum(np.asarray(a, dtype=float).ravel())


def _check_truncation(D, lam):
    tail = (1.0 + lam) ** (-D) * D
    if tail > 1e-10:
        warnings.warn(
            f"D={D} leaves prior photon-number tail ~{tail:.1e} at lam={lam}",
            TruncationWarning, stacklevel=3,
        )


def _as_gaussian(channel):
    if isinstance(channel, GaussianChannelSpec):
        return [channel]
    if isinstance(channel, (list, tuple)) and all(isinstance(c, GaussianChannelSpec) for c in channel):
        return list(channel)
    return None


def _compose(specs):
    X, Y = np.eye(2), np.zeros((2, 2))
    for s in specs:
        Xs, Ys = s.matrices()
        X, Y = Xs @ X, Xs @ Y @ Xs.T + Ys
    return X, Y


def _fock_msd(channel: KrausChannel, task, prior, grid):
    D = channel.dim
    lam = prior.lam
    _check_truncation(D, lam)
    ops = {
        "1": np.eye(D),
        "x": fock.quadrature_operator("x", D),
        "p": fock.quadrature_operator("p", D),
        "x2": fock.quadrature_square("x", D),
        "p2": fock.quadrature_square("p", D),
    }
    duals = {k: channel.dual(v) for k, v in ops.items()}
    if grid.scheme == "gauss_hermite":
        order = grid.order or max(DEFAULT_ORDER, D + 1)
        alpha, weight = grid.nodes(1.0 + lam, order)
        weight = weight * lam / (1.0 + lam)
        vecs = fock.coherent_amplitudes(alpha, D, normalized=False)
    else:
        alpha, weight = grid.nodes(lam)
        vecs = fock.coherent_amplitudes(alpha, D, normalized=True)
    q = {k: np.einsum("ni,ij,nj->n", vecs.conj(), m, vecs, optimize=True).real
         for k, m in duals.items()}
    tx, tp = task.targets(alpha)
    dx = q["x2"] - 2.0 * tx * q["x"] + tx * tx * q["1"]
    dp = q["p2"] - 2.0 * tp * q["p"] + tp * tp * q["1"]
    p_s = _fsum(weight * q["1"])
    if not (math.isfinite(p_s) and p_s > 0.0):
        raise IntegrationError(f"success probability integrated to {p_s}")
    return p_s, _fsum(weight * dx), _fsum(weight * dp)


def _gauss_msd(specs, task, prior, grid):
    X, Y = _compose(specs)
    cov = 0.5 * X @ X.T + Y
    alpha, weight = grid.nodes(prior.lam)
    mean = X @ (SQRT2 * np.vstack([alpha.real, alpha.imag]))
    tx, tp = task.targets(alpha)
    dx = cov[0, 0] + (mean[0] - tx) ** 2
    dp = cov[1, 1] + (mean[1] - tp) ** 2
    return _fsum(weight), _fsum(weight * dx), _fsum(weight * dp)


def msd_estimate(channel, task: Task, prior: Prior, grid: IntegrationGrid | None = None) -> MomentSummary:
    """Success probability and unnormalized MSDs of a channel on the ensemble.

    ``channel`` is a ``KrausChannel`` (Fock backend) or one or more
    ``GaussianChannelSpec`` (moment backend, applied in order).
    """
    grid = grid or IntegrationGrid.gauss_hermite(None)
    specs = _as_gaussian(channel)
    if specs is not None:
        p_s, vx, vp = _gauss_msd(specs, task, prior, grid)
        backend = "moments"
    elif isinstance(channel, KrausChannel):
        p_s, vx, vp = _fock_msd(channel, task, prior, grid)
        backend = "fock"
    else:
        raise InvalidInputError(f"unsupported channel type {type(channel).__name__}")
    # exact-arithmetic values are >= 0; clip quadrature roundoff only
    vx, vp = max(vx, 0.0), max(vp, 0.0)
    return MomentSummary(min(p_s, 1.0 + 1e-10), vx, vp, task, prior.lam,
                         meta={"backend": backend, "scheme": grid.scheme})


def _fock_fidelity(channel, task, prior, grid, chunk=512):
    D = channel.dim
    lam, eta = prior.lam, task.eta
    _check_truncation(D, lam)
    K = channel.kraus_ops
    if grid.scheme == "gauss_hermite":
        width = 1.0 + lam + eta
        alpha, weight = grid.nodes(width, grid.order or max(DEFAULT_ORDER, D + 1))
        weight = weight * lam / width
        normalized = False
    else:
        alpha, weight = grid.nodes(lam)
        normalized = True
    beta = math.sqrt(eta) * (alpha.conj() if task.conjugate else alpha)
    total = []
    for s in range(0, len(alpha), chunk):
        ua = fock.coherent_amplitudes(alpha[s:s + chunk], D, normalized)
        ub = fock.coherent_amplitudes(beta[s:s + chunk], D, normalized)
        amp = np.einsum("ni,kij,nj->nk", ub.conj(), K, ua, optimize=True)
        total.append(weight[s:s + chunk] * np.sum(np.abs(amp) ** 2, axis=1))
    return _fsum(np.concatenate(total))


def _gauss_fidelity(specs, task, prior, grid):
    X, Y = _compose(specs)
    sigma = 0.5 * X @ X.T + Y + 0.5 * np.eye(2)
    T = np.diag([1.0, -1.0]) if task.conjugate else np.eye(2)
    A = SQRT2 * (X - math.sqrt(task.eta) * T)
    Q = A.T @ np.linalg.solve(sigma, A)
    # widen the nodes to the Gaussian envelope of the integrand
    kappa = max(0.0, float(np.linalg.eigvalsh(0.5 * (Q + Q.T)).max()) / 2.0)
    width = prior.lam + kappa
    alpha, weight = grid.nodes(width)
    v = np.vstack([alpha.real, alpha.imag])
    expo = -0.5 * np.einsum("in,ij,jn->n", v, Q, v) + kappa * np.abs(alpha) ** 2
    vals = np.exp(expo) / math.sqrt(np.linalg.det(sigma))
    return _fsum(weight * vals) * prior.lam / width


def fidelity_estimate(channel, task: Task, prior: Prior, grid: IntegrationGrid | None = None) -> float:
    """Average fidelity to |sqrt(eta) alpha> (or its conjugate), eta = sqrt(eta_x eta_p).

    The result is unnormalized: divide by P_s for the heralded fidelity.
    """
    grid = grid or IntegrationGrid.gauss_hermite(None)
    specs = _as_gaussian(channel)
    if specs is not None:
        return _gauss_fidelity(specs, task, prior, grid)
    if isinstance(channel, KrausChannel):
        return _fock_fidelity(channel, task, prior, grid)
    raise InvalidInputError(f"unsupported channel type {type(channel).__name__}")


def summarize(channel, task: Task, prior: Prior, grid: IntegrationGrid | None = None) -> MomentSummary:
    """``msd_estimate`` with the fidelity filled in."""
    s = msd_estimate(channel, task, prior, grid)
    f = fidelity_estimate(channel, task, prior, grid if grid and grid.scheme == "monte_carlo" else None)
    return MomentSummary(s.p_s, s.vbar_x, s.vbar_p, task, prior.lam, min(max(f, 0.0), s.p_s), s.meta)


# -- homodyne samples -------------------------------------------------------------


def _record_arrays(records):
    a = np.array([complex(r.alpha_re, r.alpha_im) for r in records])
    quad = np.array([r.quad for r in records])
    value = np.array([r.value for r in records], dtype=float)
    herald = np.array([r.herald for r in records], dtype=int)
    return a, quad, value, herald


def _msd_from_arrays(a, quad, value, herald, task):
    n = len(a)
    if n == 0:
        raise InsufficientDataError("no shots recorded")
    p_s = float(herald.sum()) / n
    tx, tp = task.targets(a)
    out = []
    for z, t in (("x", tx), ("p", tp)):
        sel = (quad == z) & (herald == 1)
        if not sel.any():
            raise InsufficientDataError(f"no heralded {z}-quadrature shots")
        out.append(p_s * _fsum((value[sel] - t[sel]) ** 2) / sel.sum())
    return p_s, out[0], out[1]


def estimate_from_samples(records, task: Task, prior_lambda: float) -> MomentSummary:
    """MomentSummary from homodyne shots.

    P_s is the heralded fraction and each MSD is P_s times the heralded mean
    of (value - target)^2 for that quadrature.
    """
    p_s, vx, vp = _msd_from_arrays(*_record_arrays(records), task)
    return MomentSummary(p_s, vx, vp, task, prior_lambda,
                         meta={"backend": "samples", "shots": len(records)})


def jackknife_errors(records, task: Task, blocks: int = 50):
    """Delete-a-block jackknife standard errors.

    Keys: p_s, vbar_x, vbar_p, vbar_x_prob, vbar_p_prob and average_msd,
    the last being (vbar_x + vbar_p) / (2 p_s).
    """
    arrs = _record_arrays(records)
    n = len(arrs[0])
    blocks = min(blocks, n)
    if blocks < 2:
        raise InsufficientDataError("need at least two shots for error estimates")
    edges = np.linspace(0, n, blocks + 1).astype(int)
    reps = []
    for b in range(blocks):
        keep = np.ones(n, dtype=bool)
        keep[edges[b]:edges[b + 1]] = False
        p, vx, vp = _msd_from_arrays(*(x[keep] for x in arrs), task)
        reps.append((p, vx, vp, vx / p, vp / p, 0.5 * (vx + vp) / p))
    reps = np.array(reps)
    var = (blocks - 1) / blocks * np.sum((reps - reps.mean(axis=0)) ** 2, axis=0)
    keys = ("p_s", "vbar_x", "vbar_p", "vbar_x_prob", "vbar_p_prob", "average_msd")
    return {k: float(v) for k, v in zip(keys, np.sqrt(var))}


def write_samples(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLE_HEADER)
        for i, r in enumerate(records):
            w.writerow([i, f"{r.alpha_re:.17g}", f"{r.alpha_im:.17g}", r.quad,
                        f"{r.value:.17g}", r.herald])


def read_samples(path) -> list[SampleRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return records
        if [h.strip() for h in header] != SAMPLE_HEADER:
            raise InvalidInputError(f"line 1: expected header {','.join(SAMPLE_HEADER)}")
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(SAMPLE_HEADER):
                raise InvalidInputError(f"line {line}: expected {len(SAMPLE_HEADER)} fields, got {len(row)}")
            try:
                records.append(SampleRecord(float(row[1]), float(row[2]), row[3].strip(),
                                            float(row[4]), int(row[5])))
            except (ValueError, InvalidInputError) as exc:
                raise InvalidInputError(f"line {line}: {exc}") from None
    return records


def homodyne_sample(rho, quad: str, size: int, rng, grid_points: int = 4001) -> np.ndarray:
    """Draw quadrature outcomes from a (normalized) single-mode Fock density matrix."""
    entries = rho.entries if isinstance(rho, fock.DensityMatrix) else np.asarray(rho)
    xs, psi = _quadrature_basis(entries.shape[0], quad, grid_points)
    dens = np.einsum("mx,mn,nx->x", psi.conj(), entries, psi).real
    return _inverse_cdf(xs, dens, rng.random(size))


def _inverse_cdf(xs, dens, u):
    """Invert trapezoid CDFs of densities on ``xs`` (one row per draw, or one shared row)."""
    dens = np.clip(np.atleast_2d(dens), 0.0, None)
    cdf = np.concatenate([np.zeros((dens.shape[0], 1)),
                          np.cumsum(0.5 * (dens[:, 1:] + dens[:, :-1]) * np.diff(xs), axis=1)], axis=1)
    cdf /= cdf[:, -1:]
    if cdf.shape[0] == 1:
        return np.interp(u, cdf[0], xs)
    return np.array([np.interp(ui, c, xs) for ui, c in zip(u, cdf)])


@lru_cache(maxsize=16)
def _quadrature_basis(D, quad, grid_points):
    half = math.sqrt(2.0 * D + 1.0) + 6.0
    xs = np.linspace(-half, half, grid_points)
    # rows hold <n|q>: real Hermite functions for x, i^n times them for p
    psi = np.zeros((D, grid_points))
    psi[0] = math.pi ** -0.25 * np.exp(-0.5 * xs * xs)
    if D > 1:
        psi[1] = SQRT2 * xs * psi[0]
    for n in range(2, D):
        psi[n] = math.sqrt(2.0 / n) * xs * psi[n - 1] - math.sqrt((n - 1) / n) * psi[n - 2]
    if quad == "p":
        psi = psi * (1j ** np.arange(D))[:, None]
    elif quad != "x":
        raise InvalidInputError(f"quad must be 'x' or 'p', got {quad!r}")
    psi.setflags(write=False)
    return xs, psi


def simulate_records(channel, task: Task, lam: float, shots: int, seed: int = 0,
                     chunk: int = 256) -> list[SampleRecord]:
    """Synthetic homodyne data for a channel acting on the ensemble.

    Each shot draws alpha from the prior, a quadrature uniformly, heralds with
    probability tr E(rho_alpha) and, if heralded, samples the normalized output.
    """
    rng = np.random.default_rng(seed)
    alphas = Prior(lam).sample(shots, rng)
    quads = np.where(rng.random(shots) < 0.5, "x", "p")
    specs = _as_gaussian(channel)
    records = []
    if specs is not None:
        X, Y = _compose(specs)
        cov = 0.5 * X @ X.T + Y
        mean = X @ (SQRT2 * np.vstack([alphas.real, alphas.imag]))
        noise = rng.standard_normal(shots)
        for i in range(shots):
            j = 0 if quads[i] == "x" else 1
            v = mean[j, i] + math.sqrt(cov[j, j]) * noise[i]
            records.append(SampleRecord(alphas[i].real, alphas[i].imag, str(quads[i]), float(v), 1))
        return records
    K = channel.kraus_ops
    herald = np.zeros(shots, dtype=bool)
    values = np.zeros(shots)
    bases = {q: _quadrature_basis(channel.dim, q, 4001) for q in ("x", "p")}
    for s in range(0, shots, chunk):
        sl = slice(s, min(s + chunk, shots))
        vecs = fock.coherent_amplitudes(alphas[sl], channel.dim)
        outs = np.einsum("kij,nj->nki", K, vecs)
        branch = np.sum(np.abs(outs) ** 2, axis=2)
        weight = branch.sum(axis=1)
        hit = rng.random(len(weight)) < weight
        # the output is a mixture over Kraus branches: pick one, then sample its pure state
        u = rng.random(len(weight))[:, None] * weight[:, None]
        k = np.minimum((np.cumsum(branch, axis=1) < u).sum(axis=1), K.shape[0] - 1)
        picked = outs[np.arange(len(k)), k]
        herald[sl] = hit
        for q, (xs, basis) in bases.items():
            sel = np.flatnonzero(hit & (quads[sl] == q))
            if len(sel):
                dens = np.abs(picked[sel] @ basis.conj()) ** 2
                values[s + sel] = _inverse_cdf(xs, dens, rng.random(len(sel)))
    for i in range(shots):
        a = alphas[i]
        records.append(SampleRecord(a.real, a.imag, str(quads[i]), float(values[i]), int(herald[i])))
    return records
