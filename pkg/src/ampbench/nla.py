"""Closed-form performance of the noiseless linear amplifier on the ensemble."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .bounds import gaussian_min_msd, symmetric_msd_bound
from .channels import NlaConfig
from .errors import InvalidInputError


@dataclass(frozen=True)
class NlaPerformance:
    vbar: float
    p_s: float
    vbar_prob: float
    config: NlaConfig
    lam: float
    eta: float


def nla_msd(config: NlaConfig, lam: float, eta: float) -> NlaPerformance:
    """Unnormalized MSD, success probability and their ratio for the NLA.

    With r = g^2/(1+lam) and c = normalization * lam/(1+lam):

        vbar = c [ (g - sqrt(eta))^2 sum_{n<N} r^n (n+1)/(1+lam)
                   + eta r^N (N+1)/(1+lam) + (1/2) sum_{n<=N} r^n ]
        p_s  = c sum_{n<=N} r^n

    All terms are nonnegative; they are accumulated as exp(log-term - max)
    with ``math.fsum`` so that r > 1 with large N does not overflow.
    """
    if not (lam > 0 and eta > 0):
        raise InvalidInputError("lam and eta must be positive")
    g, N = config.g, config.N
    log_r = 2.0 * math.log(g) - math.log1p(lam)
    log_c = config.log_normalization + math.log(lam) - math.log1p(lam)
    n = np.arange(N + 1, dtype=float)
    base = n * log_r

    logs = [base]
    weights = [np.full(N + 1, 0.5)]
    if N > 0 and g != math.sqrt(eta):
        logs.append(base[:N] + math.log((g - math.sqrt(eta)) ** 2) - math.log1p(lam))
        weights.append(n[:N] + 1.0)
    logs.append(np.array([base[N] + math.log(eta) - math.log1p(lam)]))
    weights.append(np.array([N + 1.0]))

    all_logs = np.concatenate(logs)
    top = max(all_logs.max(), base.max())
    vbar_scaled = math.fsum(np.concatenate(weights) * np.exp(all_logs - top))
    ps_scaled = math.fsum(np.exp(base - top))
    vbar_prob = vbar_scaled / ps_scaled
    vbar = math.exp(log_c + top) * vbar_scaled if log_c + top < 700 else math.inf
    p_s = math.exp(log_c + top) * ps_scaled if log_c + top < 700 else math.inf
    return NlaPerformance(vbar, p_s, vbar_prob, config, lam, eta)


def nla_optimal_gain(eta: float, lam: float) -> float:
    """NLA gain that drives vbar_prob to the bound inside the non-Gaussian window."""
    if not 1.0 < eta < (1.0 + lam) ** 2:
        raise InvalidInputError(f"eta={eta} lies outside the window (1, (1+lam)^2) = (1, {(1 + lam) ** 2})")
    if eta <= 1.0 + lam:
        return math.sqrt(eta)
    return (1.0 + lam) / math.sqrt(eta)


def nla_gain_for_cutoff(eta: float, lam: float, N: int) -> float:
    """Gain minimizing vbar_prob at fixed cutoff N.

    Inside the window the large-N optimum converges slowly when g^2/(1+lam)
    is close to 1 (and not at all at eta = 1 + lam, where that ratio is
    exactly 1), so finite-N studies should use this gain instead.
    """
    if not 1.0 < eta < (1.0 + lam) ** 2:
        raise InvalidInputError(f"eta={eta} lies outside the window (1, (1+lam)^2) = (1, {(1 + lam) ** 2})")
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    def f(g):
        return nla_msd(NlaConfig(g, N), lam, eta).vbar_prob

    # coarse scan first so the bounded refinement starts in the right basin
    grid = np.linspace(1.0, 1.5 * max(math.sqrt(eta), math.sqrt(1.0 + lam)), 201)
    i = int(np.argmin([f(g) for g in grid]))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    return float(res.x) if res.fun <= f(grid[i]) else float(grid[i])


def nla_asymptote(eta: float, lam: float) -> float:
    """Large-N limit of vbar_prob at the optimal gain (equal to the symmetric bound)."""
    if not 0.0 < eta < (1.0 + lam) ** 2:
        raise InvalidInputError(f"eta={eta} lies outside (0, (1+lam)^2)")
    return symmetric_msd_bound(eta, lam, conjugate=False)


SWEEP_COLUMNS = ["g", "N", "lambda", "eta", "p_s", "vbar", "vbar_prob", "asymptote", "gaussian_min"]


def sweep(gs, Ns, lams, etas):
    rows = []
    for lam in lams:
        for eta in etas:
            asym = nla_asymptote(eta, lam) if 0 < eta < (1 + lam) ** 2 else float("nan")
            for g in gs:
                for N in Ns:
                    perf = nla_msd(NlaConfig(g, N), lam, eta)
                    rows.append({"g": g, "N": N, "lambda": lam, "eta": eta, "p_s": perf.p_s,
                                 "vbar": perf.vbar, "vbar_prob": perf.vbar_prob,
                                 "asymptote": asym, "gaussian_min": gaussian_min_msd(eta, lam)})
    return rows


def write_sweep(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([r["N"] if c == "N" else f"{r[c]:.17g}" for c in SWEEP_COLUMNS])


def read_sweep(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: int(v) if k == "N" else float(v) for k, v in row.items()} for row in reader]
