"""
Property suites behind ``ampbench verify``.

Each suite returns a list of ``Check`` records. A check passes when its margin
is nonnegative; margins are phrased so that larger means safer.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fock
from .bounds import gaussian_min_msd, theorem1_margin, theorem2_rhs
from .channels import NlaConfig, build_channel, gaussian_amp_or_att, nla_operator, random_operation, to_gaussian
from .ensemble import IntegrationGrid, Prior, Task, msd_estimate
from .epr import choi_msd_identity, delta_from_msd, epr_tmss, epr_uncertainty
from .errors import TruncationWarning
from .gaussian import GaussianChannelSpec, apply_gaussian_channel, two_mode_squeezed
from .nla import nla_gain_for_cutoff, nla_msd

SUITES = ("theorem1", "gaussian", "nla", "epr", "backends")


@dataclass
class Check:
    suite: str
    name: str
    margin: float
    passed: bool
    details: dict = field(default_factory=dict)


def _check(suite, name, margin, **details):
    return Check(suite, name, float(margin), bool(margin >= 0.0), details)


def random_channel(D: int, index: int, seed: int):
    """Deterministic mix of Kraus ranks and trace-preserving/decreasing maps."""
    k = 1 + index % 4
    return random_operation(D, k=k, trace_decreasing=bool(index % 2), seed=seed * 100_003 + index)


def theorem1_suite(seed: int = 1, channels: int = 200, D: int = 14,
                   lams=(0.4, 1.0), etas=(0.8, 1.4, 2.5), tol: float = 1e-9):
    """MSD-product-bound margins of seeded random operations for both tasks."""
    out = []
    for i in range(channels):
        ch = random_channel(D, i, seed)
        worst = math.inf
        for lam in lams:
            for eta in etas:
                for conj in (False, True):
                    rep = theorem1_margin(msd_estimate(ch, Task(eta, eta, conj), Prior(lam)))
                    worst = min(worst, rep.margin)
        out.append(_check("theorem1", f"random_channel[{i}]", worst + tol, worst_margin=worst))
    return out


def gaussian_suite(lam: float = 0.4, D: int = 120, r: float = 0.3, tol: float = 1e-6):
    """Quantum-limited Gaussian channels at the optimal gain saturate the MSD product bound."""
    out = []
    for eta in (0.5, 0.8, 2.0, 2.5):
        G = eta if eta <= 1.0 else eta / (1.0 + lam) ** 2
        for rr in (0.0, r):
            inner = gaussian_amp_or_att(G)
            if rr:
                spec = {"kind": "squeezer_conjugated", "r": rr, "inner": inner}
                task = Task(eta * math.exp(-2 * rr), eta * math.exp(2 * rr))
            else:
                spec, task = inner, Task(eta, eta)
            rep = theorem1_margin(msd_estimate(build_channel(spec, D), task, Prior(lam)))
            # saturated means 0 <= margin <= tol
            out.append(_check("gaussian", f"saturation eta={eta} r={rr}",
                              min(tol - rep.margin, rep.margin + 1e-9),
                              theorem1_margin=rep.margin, G=G))
    return out


def nla_suite(lam: float = 0.4, tol: float = 1e-6):
    """Closed-form NLA performance against the Fock simulation for N <= 12."""
    out = []
    for g in (1.1, 1.2, 1.5):
        for N in (0, 3, 7, 12):
            cfg = NlaConfig(g, N)
            for eta in (1.2, 1.7):
                perf = nla_msd(cfg, lam, eta)
                s = msd_estimate(build_channel(cfg, N + 2), Task(eta, eta), Prior(lam))
                err = max(abs(s.p_s - perf.p_s), abs(s.vbar_x - perf.vbar), abs(s.vbar_p - perf.vbar))
                out.append(_check("nla", f"closed_form g={g} N={N} eta={eta}", tol - err, abs_diff=err))
    for eta, g in ((1.2, math.sqrt(1.2)), (1.7, 1.4 / math.sqrt(1.7))):
        perf = nla_msd(NlaConfig(g, 60), lam, eta)
        target = 0.5 if eta <= 1.0 + lam else eta / (1.0 + lam) - 0.5
        err = abs(perf.vbar_prob - target)
        out.append(_check("nla", f"convergence eta={eta}", 1e-3 - err, vbar_prob=perf.vbar_prob, target=target))
    for eta in (1.2, 1.5, 1.7):
        g = nla_gain_for_cutoff(eta, lam, 60)
        perf = nla_msd(NlaConfig(g, 60), lam, eta)
        out.append(_check("nla", f"beats_gaussian eta={eta}", gaussian_min_msd(eta, lam) - 1e-3 - perf.vbar_prob,
                          g=g, vbar_prob=perf.vbar_prob))
    return out


def filtered_tmss(g: float, xi: float, N: int, D: int | None = None) -> fock.StateVector:
    """Normalized (Q_N (x) I) psi_xi."""
    D = D or N + 1
    psi = fock.two_mode_squeezed_state(xi, D).amplitudes.reshape(D, D)
    out = nla_operator(NlaConfig(g, N), D) @ psi
    return fock.StateVector(D, 2, out.ravel()).normalized()


def epr_suite(seed: int = 1, D: int = 12, xi: float = 0.5, channels: int = 20, tol: float = 1e-6):
    out = []
    chans = [("identity", build_channel({"kind": "identity"}, D))]
    chans += [(f"random_channel[{i}]", random_channel(D, i, seed)) for i in range(channels)]
    for name, ch in chans:
        _, _, diff = choi_msd_identity(ch, xi)
        out.append(_check("epr", f"choi_identity {name}", tol - diff, max_abs_diff=diff))
    lam = (1 - xi * xi) / (xi * xi)
    for i in range(channels):
        raw = delta_from_msd(msd_estimate(random_channel(D, i, seed), Task(1 + lam, 1 + lam), Prior(lam))).raw
        out.append(_check("epr", f"corollary_floor random_channel[{i}]", raw + 1e-7, delta_raw=raw))

    for x in (0.3, 0.5, 0.7):
        floor = epr_tmss(x)
        for G in (0.5, 1.0, 2.0):
            J = apply_gaussian_channel(two_mode_squeezed(x), to_gaussian(gaussian_amp_or_att(G)))
            d = epr_uncertainty(J).raw
            out.append(_check("epr", f"gaussian_no_go xi={x} G={G}", d - floor + 1e-7, delta_raw=d))

    J = filtered_tmss(1.2, 0.5, 40)
    d = epr_uncertainty(J).delta
    err = abs(d - epr_tmss(0.6))
    out.append(_check("epr", "nla_filtered_tmss", tol - err, delta=d, target=epr_tmss(0.6)))
    out.append(_check("epr", "nla_distills", epr_tmss(0.5) - d, delta=d))

    for lam_ in np.geomspace(1e-4, 1e4, 33):
        t2 = theorem2_rhs(float(lam_))
        out.append(_check("epr", f"threshold_order lam={lam_:.3g}", min(t2 - 0.5, 1.5 - t2), theorem2_rhs=t2))
    return out


def backends_suite(lam: float = 0.4, D: int = 100, tol: float = 1e-6):
    """Moment-route and Fock-route MSDs agree for Gaussian channels."""
    out = []
    mc = IntegrationGrid.monte_carlo(200_000, seed=5)
    for G in (0.3, 0.8, 1.0, 1.3, 1.7):
        spec = gaussian_amp_or_att(G)
        task = Task(1.4, 1.4)
        a = msd_estimate(build_channel(spec, D), task, Prior(lam))
        b = msd_estimate(to_gaussian(spec), task, Prior(lam))
        err = max(abs(a.p_s - b.p_s), abs(a.vbar_x - b.vbar_x), abs(a.vbar_p - b.vbar_p))
        out.append(_check("backends", f"fock_vs_moments G={G}", tol - err, abs_diff=err))
        c = msd_estimate(to_gaussian(spec), task, Prior(lam), mc)
        rel = abs(c.vbar_x - b.vbar_x) / b.vbar_x
        out.append(_check("backends", f"monte_carlo_vs_quadrature G={G}", 0.02 - rel, rel_diff=rel))
    spec = {"kind": "squeezer_conjugated", "r": 0.2, "inner": gaussian_amp_or_att(1.2)}
    task = Task(1.1, 1.9, conjugate=True)
    a = msd_estimate(build_channel(spec, D + 20), task, Prior(lam))
    b = msd_estimate(to_gaussian(spec), task, Prior(lam))
    err = max(abs(a.vbar_x - b.vbar_x), abs(a.vbar_p - b.vbar_p))
    out.append(_check("backends", "squeezed_amplifier conjugate task", tol - err, abs_diff=err))
    mp = [GaussianChannelSpec("mp_conjugator", 1.0)]
    b = msd_estimate(mp, Task(1.0, 1.0, True), Prior(lam))
    out.append(_check("backends", "mp_conjugator theorem1", theorem1_margin(b).margin + 1e-9))
    return out


def run(suite: str = "all", seed: int = 1) -> dict:
    names = SUITES if suite == "all" else (suite,)
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    runners = {
        "theorem1": lambda: theorem1_suite(seed),
        "gaussian": gaussian_suite,
        "nla": nla_suite,
        "epr": lambda: epr_suite(seed),
        "backends": backends_suite,
    }
    checks, timings = [], {}
    with warnings.catch_warnings():
        # truncated random operations are exact operations on the full space
        warnings.simplefilter("ignore", TruncationWarning)
        for n in names:
            t0 = time.perf_counter()
            checks += runners[n]()
            timings[n] = time.perf_counter() - t0
    failed = [c for c in checks if not c.passed]
    return {
        "suite": suite,
        "seed": seed,
        "passed": not failed,
        "n_checks": len(checks),
        "n_failed": len(failed),
        "checks": [asdict(c) for c in checks],
        "runtime_seconds": timings,
    }
