"""Acceptance criteria. Each test prints one PASS/FAIL line with its runtime."""

import math
import time
import warnings

import pytest

from ampbench import figures, verify
from ampbench.bounds import fixed_gain_product_bound, gaussian_min_msd
from ampbench.channels import NlaConfig, build_channel, gaussian_amp_or_att, random_operation
from ampbench.ensemble import Prior, Task, fidelity_estimate, msd_estimate, summarize
from ampbench.epr import (average_normalized_msd, delta_from_msd, distillation_certificate, epr_tmss,
                          epr_uncertainty)
from ampbench.errors import TruncationWarning
from ampbench.gaussian import GaussianChannelSpec
from ampbench.nla import nla_msd


class Criterion:
    """Collects named checks and prints one verdict line for the criterion."""

    def __init__(self, name, capsys):
        self.name = name
        self.capsys = capsys
        self.results = []
        self.t0 = time.perf_counter()

    def __call__(self, label, ok):
        self.results.append((label, bool(ok)))

    @property
    def elapsed(self):
        return time.perf_counter() - self.t0

    def finish(self):
        failed = [label for label, ok in self.results if not ok]
        status = "PASS" if not failed else "FAIL"
        extra = f"; failed: {'; '.join(failed)}" if failed else ""
        with self.capsys.disabled():
            print(f"\n{self.name}: {status} ({self.elapsed:.2f} s, {len(self.results)} checks){extra}")
        assert not failed, failed


@pytest.fixture
def criterion(capsys):
    return lambda name: Criterion(name, capsys)


def test_criterion_1_msd_versus_gain(criterion):
    r = criterion("criterion 1 (MSD bounds versus gain, lam=0.4)")
    lam = 0.4
    rows = figures.fig1b_rows(lam, 0.0, 3.0, 301)
    by_eta = {round(row["eta"], 12): row for row in rows}
    r("bound_normal(1.4) = 0.5", by_eta[1.4]["bound_normal"] == pytest.approx(0.5, abs=1e-12))
    left = by_eta[1.39]["bound_normal"], by_eta[1.4]["bound_normal"]
    right = by_eta[1.41]["bound_normal"], by_eta[1.42]["bound_normal"]
    r("kink at eta = 1 + lam", left == pytest.approx((0.5, 0.5), abs=1e-12)
      and right[1] - right[0] == pytest.approx(0.01 / 1.4, rel=1e-9))
    g17 = gaussian_min_msd(1.7, lam)
    r("gaussian_min(1.7)", abs(g17 - 0.730797) < 1e-6
      and abs(g17 - ((math.sqrt(1.7) - 1) ** 2 / lam + 0.5)) < 1e-9
      and abs(by_eta[1.7]["gaussian_min"] - g17) < 1e-9)
    r("gaussian_min(1.96) = 0.9", abs(gaussian_min_msd(1.96, lam) - 0.9) < 1e-9
      and abs(gaussian_min_msd(1.96 * (1 - 1e-12), lam) - 0.9) < 1e-9)
    r("all curves 0.5 at eta = 0", all(rows[0][c] == 0.5 for c in figures.FIG1B_COLUMNS[1:]))
    r("aup_normal above bound for eta > 1",
      all(row["aup_normal"] > row["bound_normal"] for row in rows if row["eta"] > 1.0))
    r("aup_conj above bound for eta > 0",
      all(row["aup_conj"] > row["bound_conj"] for row in rows if row["eta"] > 0.0))
    r("runtime < 1 s", r.elapsed < 1.0)
    r.finish()


def test_criterion_2_msd_region(criterion):
    r = criterion("criterion 2 (MSD region at eta' = 1.3)")
    lam = 0.4
    rows = figures.fig1a_rows(1.3, 2.0, 81, lam)
    eta = 1.3 * (1 + lam)
    for tag, target in (("normal", 0.64), ("conj", 3.24)):
        pts = [row for row in rows if row["curve"] == f"boundary_{tag}"]
        worst = max(abs(p["vbar_x"] * p["vbar_p"] - target) for p in pts)
        r(f"boundary_{tag} product = {target}", worst < 1e-12)
        r(f"bound formula {tag}", abs(fixed_gain_product_bound(eta, lam, tag == "conj") - target) < 1e-12)
        for k in ("1", "2"):
            pts = [row for row in rows if row["curve"] == f"ratio{k}_{tag}"]
            r(f"ratio{k}_{tag} on or above boundary",
              min(p["vbar_x"] * p["vbar_p"] for p in pts) >= target - 1e-12)
    r("runtime < 1 s", r.elapsed < 1.0)
    r.finish()


def test_criterion_3_theorem1_sweep(criterion):
    r = criterion("criterion 3 (MSD-bound sweep, 200 random operations)")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        checks = verify.theorem1_suite(seed=1, channels=200, D=14, lams=(0.4, 1.0), etas=(0.8, 1.4, 2.5))
    worst = min(c.details["worst_margin"] for c in checks)
    r("200 channels", len(checks) == 200)
    r(f"every margin >= -1e-9 (worst {worst:.3e})", worst >= -1e-9)
    r("runtime < 5 min", r.elapsed < 300)
    r.finish()


def test_criterion_4_gaussian_saturation(criterion):
    r = criterion("criterion 4 (Gaussian saturation, Fock backend)")
    checks = verify.gaussian_suite(lam=0.4, D=120, r=0.3, tol=1e-6)
    r("eight cases", len(checks) == 8)
    for c in checks:
        m = c.details["theorem1_margin"]
        r(f"{c.name} margin {m:.2e}", -1e-9 <= m <= 1e-6)
    r("runtime < 10 min", r.elapsed < 600)
    r.finish()


def test_criterion_5_nla(criterion):
    r = criterion("criterion 5 (NLA convergence and advantage)")
    lam = 0.4
    a = nla_msd(NlaConfig(math.sqrt(1.2), 60), lam, 1.2).vbar_prob
    b = nla_msd(NlaConfig(1.4 / math.sqrt(1.7), 60), lam, 1.7).vbar_prob
    r(f"eta=1.2 N=60 vbar_prob {a:.6f} within 1e-3 of 0.5", abs(a - 0.5) < 1e-3)
    r(f"eta=1.7 N=60 vbar_prob {b:.6f} within 1e-3 of 0.714286", abs(b - 0.714286) < 1e-3)
    r("0.5 < gaussian_min(1.2)", 0.5 < gaussian_min_msd(1.2, lam) and a < gaussian_min_msd(1.2, lam))
    r("0.714286 < gaussian_min(1.7)", 0.714286 < gaussian_min_msd(1.7, lam) and b < gaussian_min_msd(1.7, lam))
    closed = [c for c in verify.nla_suite(lam) if c.name.startswith("closed_form")]
    worst = max(c.details["abs_diff"] for c in closed)
    r(f"closed form vs Fock for N <= 12 (worst {worst:.1e})", len(closed) == 24 and worst < 1e-6)
    r("runtime < 2 min", r.elapsed < 120)
    r.finish()


def test_criterion_6_choi_identity(criterion):
    r = criterion("criterion 6 (Choi proof identity, identity + 20 random)")
    checks = [c for c in verify.epr_suite(seed=1, D=12, xi=0.5, channels=20) if c.name.startswith("choi_identity")]
    worst = max(c.details["max_abs_diff"] for c in checks)
    r("21 channels", len(checks) == 21)
    r(f"max_abs_diff < 1e-6 (worst {worst:.1e})", worst < 1e-6)
    r("runtime < 5 min", r.elapsed < 300)
    r.finish()


def test_criterion_7_distillation(criterion):
    r = criterion("criterion 7 (distillation certification)")
    lam = 0.4
    s = msd_estimate(build_channel({"kind": "identity"}, 80), Task.symmetric(1 + lam), Prior(lam))
    M = average_normalized_msd(s)
    cert = distillation_certificate(s)
    r(f"identity |M - 0.583920| < 1e-6 (M = {M:.9f})", abs(M - 0.583920) < 1e-6)
    r("identity equality case, not beats_gaussian", cert.physical and not cert.beats_gaussian
      and abs(cert.margins["gaussian"]) < 1e-6)
    r("delta_raw = epr_tmss(1/sqrt(1.4))", abs(delta_from_msd(s).raw - epr_tmss(1 / math.sqrt(1.4))) < 1e-6)

    J = verify.filtered_tmss(1.2, 0.5, 40)
    d = epr_uncertainty(J).delta
    r(f"filtered TMSS delta {d:.9f} = epr_tmss(0.6)", abs(d - epr_tmss(0.6)) < 1e-6 and abs(epr_tmss(0.6) - 0.25) < 1e-15)
    r("0.25 < epr_tmss(0.5) = 1/3", d < epr_tmss(0.5) and abs(epr_tmss(0.5) - 1 / 3) < 1e-15)

    # xi = 0.5 corresponds to lam = 3 on the ensemble side
    lam3 = 3.0
    s3 = msd_estimate(build_channel(NlaConfig(1.2, 40), 42), Task.symmetric(1 + lam3), Prior(lam3))
    c3 = distillation_certificate(s3)
    r(f"ensemble NLA delta {c3.delta.raw:.6f} matches filtered state", abs(c3.delta.raw - d) < 1e-6)
    r("NLA certificate beats_gaussian", c3.beats_gaussian and c3.physical)
    r("runtime < 2 min", r.elapsed < 120)
    r.finish()


def test_criterion_8_fidelity(criterion):
    r = criterion("criterion 8 (fidelity bounds)")
    mp = GaussianChannelSpec("mp_conjugator", 1.0)
    task = Task.symmetric(1.0, conjugate=True)
    f = fidelity_estimate(mp, task, Prior(1e-6))
    p_s = msd_estimate(mp, task, Prior(1e-6)).p_s
    r(f"measure-prepare conjugate fidelity {f / p_s:.9f} within 1e-3 of 1/2", abs(f / p_s - 0.5) < 1e-3)

    chans = [gaussian_amp_or_att(G) for G in (0.3, 0.8, 1.0, 1.5, 2.0)]
    chans += [NlaConfig(g, N) for g, N in ((1.1, 5), (1.2, 10), (1.5, 3))]
    worst = -math.inf
    for spec in chans:
        ch = build_channel(spec, 50)
        for eta, conj in ((1.4, False), (0.8, False), (1.0, True)):
            s = summarize(ch, Task.symmetric(eta, conj), Prior(0.4))
            worst = max(worst, s.fidelity - s.p_s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for seed in range(10):
            ch = random_operation(12, k=1 + seed % 4, trace_decreasing=bool(seed % 2), seed=seed)
            s = summarize(ch, Task.symmetric(1.4), Prior(1.0))
            worst = max(worst, s.fidelity - s.p_s)
    r(f"F <= P_s on all simulated channels (worst F - P_s = {worst:.2e})", worst <= 1e-12)
    r("runtime < 2 min", r.elapsed < 120)
    r.finish()
