import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampbench.bounds import (AupInput, BoundReport, aup_evaluate, aup_symmetric, bound_table, boundary_point,
                             fidelity_bound, fidelity_margin, fixed_gain_product_bound, gaussian_min_msd,
                             gaussian_optimal_gain, parametric_boundary, symmetric_msd_bound, theorem1_margin,
                             theorem1_rhs, theorem2_rhs)
from ampbench.ensemble import MomentSummary, Prior, Task, gaussian_amp_msd_closed, msd_estimate
from ampbench.gaussian import GaussianChannelSpec


def test_theorem1_rhs_examples():
    assert theorem1_rhs(Task.symmetric(1.4), 0.4) == 0.0
    assert theorem1_rhs(Task.symmetric(1.82), 0.4) == pytest.approx(0.0225, abs=1e-14)
    assert theorem1_rhs(Task.symmetric(1.82, True), 0.4) == pytest.approx(1.3225, abs=1e-14)


@pytest.mark.parametrize("lam", [0.01, 0.2, 0.4, 1.0, 3.0, 10.0])
def test_theorem1_rhs_vanishes_at_unit_effective_gain(lam):
    assert theorem1_rhs(Task.symmetric(1.0 + lam), lam) == 0.0


def test_theorem1_margin_identity_at_unit_effective_gain():
    # vbar = (1 - sqrt(eta))^2 / lam + 1/2, so each bracket is that minus 1/2
    lam = 0.4
    s = msd_estimate(GaussianChannelSpec("identity"), Task.symmetric(1 + lam), Prior(lam))
    rep = theorem1_margin(s)
    b = (1 - math.sqrt(1.4)) ** 2 / 0.4
    assert rep.inputs["brackets"] == pytest.approx([b, b], abs=1e-12)
    assert rep.satisfied and rep.margin == pytest.approx(b * b, abs=1e-12)


def test_theorem1_margin_equality_at_noiseless_point():
    # vbar_z / P_s = 1/2 at eta = 1 + lam closes both brackets
    s = MomentSummary(0.25, 0.125, 0.125, Task.symmetric(1.4), 0.4)
    rep = theorem1_margin(s)
    assert rep.inputs["brackets"] == pytest.approx([0.0, 0.0], abs=1e-15)
    assert rep.satisfied and rep.margin == pytest.approx(0.0, abs=1e-15)


def test_theorem1_margin_attenuator_saturates():
    lam, eta = 0.4, 0.8
    s = msd_estimate(GaussianChannelSpec("attenuator", eta), Task.symmetric(eta), Prior(lam))
    rep = theorem1_margin(s)
    assert rep.inputs["brackets"] == pytest.approx([0.5 - 0.8 / 2.8] * 2, abs=1e-12)
    assert rep.lhs == pytest.approx(0.045918367346938785, abs=1e-12)
    assert rep.rhs == pytest.approx(0.25 * (0.8 / 1.4 - 1) ** 2, abs=1e-15)
    assert abs(rep.margin) < 1e-12


def test_theorem1_margin_flags_unphysical_brackets():
    s = MomentSummary(1.0, 0.1, 0.1, Task.symmetric(1.4), 0.4)
    rep = theorem1_margin(s)
    assert not rep.satisfied
    assert not rep.inputs["physical_brackets"]


def test_fixed_gain_product_bound_examples():
    assert fixed_gain_product_bound(1.3 * 1.4, 0.4) == pytest.approx(0.64, abs=1e-14)
    assert fixed_gain_product_bound(1.3 * 1.4, 0.4, True) == pytest.approx(3.24, abs=1e-14)
    assert fixed_gain_product_bound(1.4, 0.4) == pytest.approx(0.25, abs=1e-15)


def test_boundary_point_examples():
    eta = 1.3 * 1.4
    assert boundary_point(eta, 0.4, False, 0.0) == pytest.approx((0.8, 0.8), abs=1e-14)
    assert boundary_point(eta, 0.4, False, math.log(2)) == pytest.approx((1.6, 0.4), abs=1e-14)
    for R in (-1.0, 0.0, 1.0):
        vx, vp = boundary_point(eta, 0.4, False, R)
        assert vx * vp == pytest.approx(fixed_gain_product_bound(eta, 0.4), rel=1e-14)


def test_parametric_product_never_below_fixed_gain_bound():
    rng = np.random.default_rng(0)
    for conj in (False, True):
        for _ in range(20):
            R, r = rng.uniform(-2, 2, size=2)
            eta, lam = 1.82, 0.4
            vx, vp = parametric_boundary(eta * math.exp(R), eta * math.exp(-R), lam, conj, r)
            assert vx * vp >= fixed_gain_product_bound(eta, lam, conj) - 1e-12


def test_parametric_boundary_lies_on_theorem1_equality():
    lam = 0.4
    task = Task(2.0, 1.1)
    vx, vp = parametric_boundary(task.eta_x, task.eta_p, lam, False, 0.3)
    rep = theorem1_margin(MomentSummary(1.0, vx, vp, task, lam))
    assert rep.margin == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("eta,lam,conj,expected", [
    (0.0, 0.4, False, 0.5), (0.0, 0.4, True, 0.5),
    (2.5, 0.4, False, 2.5 / 1.4 - 0.5), (1.0, 0.4, True, 1 / 1.4 + 0.5),
])
def test_symmetric_msd_bound_examples(eta, lam, conj, expected):
    assert symmetric_msd_bound(eta, lam, conj) == pytest.approx(expected, abs=1e-14)


def test_gaussian_min_msd_examples():
    assert gaussian_min_msd(1.0, 0.4) == 0.5
    assert gaussian_min_msd(1.7, 0.4) == pytest.approx(0.7307975947973513, abs=1e-12)
    assert gaussian_min_msd(1.96, 0.4) == pytest.approx(0.9, abs=1e-12)


@pytest.mark.parametrize("lam", [0.1, 0.4, 1.0, 3.0])
def test_gaussian_min_msd_continuous(lam):
    for edge in (1.0, (1.0 + lam) ** 2):
        lo = gaussian_min_msd(edge * (1 - 1e-13), lam)
        hi = gaussian_min_msd(edge * (1 + 1e-13), lam)
        assert abs(lo - hi) < 1e-12


@pytest.mark.parametrize("lam", [0.2, 0.4, 1.0])
def test_gaussian_saturation_regimes(lam):
    for eta in np.linspace(0.05, 5.0, 60):
        g, s = gaussian_min_msd(eta, lam), symmetric_msd_bound(eta, lam)
        if eta <= 1.0 or eta >= (1.0 + lam) ** 2:
            assert g == pytest.approx(s, abs=1e-12)
        else:
            assert g > s


@pytest.mark.parametrize("lam", [0.2, 0.4, 1.0])
def test_gaussian_optimal_gain_attains_minimum(lam):
    for eta in (0.5, 1.2, 1.5, 4.0):
        G = gaussian_optimal_gain(eta, lam)
        assert gaussian_amp_msd_closed(G, eta, lam) == pytest.approx(gaussian_min_msd(eta, lam), abs=1e-12)
        for dG in (-0.05, 0.05):
            assert gaussian_amp_msd_closed(G + dG, eta, lam) >= gaussian_min_msd(eta, lam) - 1e-12


@pytest.mark.parametrize("eta", [0.5, 1.0, 1.7, 2.5])
def test_small_lambda_recovers_traditional_limits(eta):
    lam = 1e-6
    for conj in (False, True):
        assert symmetric_msd_bound(eta, lam, conj) == pytest.approx(aup_symmetric(eta, conj), abs=1e-5)


def test_fidelity_bound_examples():
    assert fidelity_bound(1.0, 1e-9, True)[0] == pytest.approx(0.5, abs=1e-8)
    assert fidelity_bound(1.0, 0.4)[0] == pytest.approx(1.4)
    assert fidelity_bound(1.0, 0.4)[1] == 1.0
    assert fidelity_bound(2.0, 0.4, True) == pytest.approx((1.4 / 3.4, 1.4 / 3.4))
    assert fidelity_bound(2.0, 0.4) == pytest.approx((1.0, 1.0))


def test_fidelity_margin_uses_binding_form():
    s = MomentSummary(0.5, 1.0, 1.0, Task.symmetric(1.0), 0.4, fidelity=0.5)
    rep = fidelity_margin(s)
    assert rep.rhs == 1.0 and rep.lhs == 1.0 and rep.satisfied
    assert rep.inputs["as_written"] == pytest.approx(1.4)
    with pytest.raises(ValueError):
        fidelity_margin(MomentSummary(0.5, 1.0, 1.0, Task.symmetric(1.0), 0.4))


@pytest.mark.parametrize("G,conj,rhs", [(1.0, False, 0.0), (2.0, False, 0.25), (1.0, True, 1.0)])
def test_aup_examples(G, conj, rhs):
    rep = aup_evaluate(AupInput(G, G, 0.5, 0.5, conj))
    assert rep.rhs == pytest.approx(rhs, abs=1e-15)
    assert rep.inputs["added_noise"] == pytest.approx([0.5 / G, 0.5 / G])
    assert rep.inputs["limit_gap"] < 1e-5


def test_aup_zero_gain_has_no_added_noise_number():
    rep = aup_evaluate(AupInput(0.0, 2.0, 1.0, 1.0))
    assert rep.inputs["added_noise"][0] is None
    assert "theorem1_rhs" not in rep.inputs


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.01, 5.0), st.booleans())
def test_theorem1_tends_to_aup(Gx, Gp, conj):
    rep = aup_evaluate(AupInput(Gx, Gp, 1.0, 1.0, conj), lam=1e-6)
    # the gap is first order in lam, scaled by the gains
    assert rep.inputs["limit_gap"] < 1e-5 * max(1.0, rep.rhs)


def test_theorem2_rhs():
    assert theorem2_rhs(0.4) == pytest.approx((math.sqrt(1.4) - 1) ** 2 / 0.4 + 0.5, rel=1e-15)
    assert theorem2_rhs(0.4) == pytest.approx(0.583920216900384, abs=1e-12)
    assert theorem2_rhs(0.4) == pytest.approx(gaussian_min_msd(1.4, 0.4), rel=1e-15)


def test_bound_report_json_roundtrip():
    rep = aup_evaluate(AupInput(2.0, 1.5, 0.9, 0.8))
    back = BoundReport.from_json(rep.to_json())
    assert back == rep
    assert set(json.loads(rep.to_json())) == {"bound_name", "lhs", "rhs", "margin", "satisfied", "inputs"}


def test_bound_table_contents():
    t = bound_table(0.4, 1.7)
    assert t["gaussian_min"] == pytest.approx(0.7307975947973513, abs=1e-12)
    assert t["nla_asymptote"] < t["gaussian_min"]
    assert "nla_asymptote" not in bound_table(0.4, 2.5)
    assert bound_table(0.4, 2.5)["symmetric_bound"] == pytest.approx(2.5 / 1.4 - 0.5)
