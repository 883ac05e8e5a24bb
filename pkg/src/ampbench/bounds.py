"""
Closed-form amplification limits and margin reports.

Notation: ``eta`` is the target gain, ``lam`` the prior inverse width and
``eta' = eta / (1 + lam)`` the effective gain. ``conjugate`` selects the
phase-conjugating task (lower signs).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .ensemble import MomentSummary, Task

SATISFIED_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    bound_name: str
    lhs: float
    rhs: float
    margin: float
    satisfied: bool
    inputs: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BoundReport":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class AupInput:
    G_x: float
    G_p: float
    N_x: float
    N_p: float
    conjugate: bool = False


def _sign(conjugate):
    return 1.0 if conjugate else -1.0


def theorem1_rhs(task: Task, lam: float) -> float:
    """(1/4) |sqrt(eta_x eta_p)/(1+lam) -+ 1|^2."""
    return 0.25 * (task.eta / (1.0 + lam) + _sign(task.conjugate)) ** 2


def theorem1_brackets(summary: MomentSummary) -> tuple[float, float]:
    """(vbar_z / p_s - eta_z / (2 (1+lam))) for z = x, p."""
    t, lam = summary.task, summary.lam
    return (summary.vbar_x_prob - t.eta_x / (2.0 * (1.0 + lam)),
            summary.vbar_p_prob - t.eta_p / (2.0 * (1.0 + lam)))


def theorem1_margin(summary: MomentSummary) -> BoundReport:
    bx, bp = theorem1_brackets(summary)
    lhs = bx * bp
    rhs = theorem1_rhs(summary.task, summary.lam)
    physical = bx >= -SATISFIED_TOL and bp >= -SATISFIED_TOL
    return BoundReport(
        "theorem1", lhs, rhs, lhs - rhs,
        bool(physical and lhs - rhs >= -SATISFIED_TOL),
        {"task": summary.task.to_dict(), "lambda": summary.lam,
         "brackets": [bx, bp], "physical_brackets": bool(physical)},
    )


def fixed_gain_product_bound(eta: float, lam: float, conjugate: bool = False) -> float:
    """Lower bound on vbar_x vbar_p over gain pairs with sqrt(eta_x eta_p) = eta."""
    e = eta / (1.0 + lam)
    return 0.25 * (e + abs(e + _sign(conjugate))) ** 2


def boundary_point(eta: float, lam: float, conjugate: bool, R: float) -> tuple[float, float]:
    """Point on the fixed-gain boundary for gain split (eta e^R, eta e^-R).

    Uses |eta' -+ 1| inside the absolute value (see ``parametric_boundary``).
    """
    e = eta / (1.0 + lam)
    s = 0.5 * (e + abs(e + _sign(conjugate)))
    return s * math.exp(R), s * math.exp(-R)


def parametric_boundary(eta_x: float, eta_p: float, lam: float, conjugate: bool, r: float):
    """Boundary of the allowed MSD region for a fixed gain pair, parameterized by r.

    (vbar_x, vbar_p) = (1/2)|sqrt(eta_x eta_p)/(1+lam) -+ 1| (e^r, e^-r)
                       + (eta_x, eta_p) / (2 (1+lam))
    with P_s = 1.
    """
    c = 0.5 * abs(math.sqrt(eta_x * eta_p) / (1.0 + lam) + _sign(conjugate))
    return (c * math.exp(r) + eta_x / (2.0 * (1.0 + lam)),
            c * math.exp(-r) + eta_p / (2.0 * (1.0 + lam)))


def symmetric_msd_bound(eta: float, lam: float, conjugate: bool = False) -> float:
    """Minimum of vbar/P_s for symmetric gains and vbar_x = vbar_p."""
    e = eta / (1.0 + lam)
    if conjugate:
        return e + 0.5
    return 0.5 if e <= 1.0 else e - 0.5


def gaussian_min_msd(eta: float, lam: float) -> float:
    """Minimum MSD reachable with phase-insensitive Gaussian channels."""
    if eta <= 1.0:
        return 0.5
    if eta < (1.0 + lam) ** 2:
        return (math.sqrt(eta) - 1.0) ** 2 / lam + 0.5
    return eta / (1.0 + lam) - 0.5


def gaussian_optimal_gain(eta: float, lam: float) -> float:
    """Gain G minimizing the Gaussian-channel MSD for target eta."""
    if eta <= 1.0:
        return eta
    if eta < (1.0 + lam) ** 2:
        return 1.0
    return eta / (1.0 + lam) ** 2


def fidelity_bound(eta: float, lam: float, conjugate: bool = False) -> tuple[float, float]:
    """Upper limits on F/P_s as (printed form, binding form).

    For the normal task the printed form evaluates to max(1, (1+lam)/eta),
    which never binds because F <= P_s; min(1, (1+lam)/eta) is reported as
    the binding form. Both coincide for phase conjugation.
    """
    if conjugate:
        f = (1.0 + lam) / (1.0 + eta + lam)
        return f, f
    k = (1.0 + lam) / eta
    as_written = 0.5 * (k + 1.0 + abs(k - 1.0))
    return as_written, min(1.0, as_written)


def fidelity_margin(summary: MomentSummary) -> BoundReport:
    if summary.fidelity is None:
        raise ValueError("summary has no fidelity")
    t = summary.task
    as_written, effective = fidelity_bound(t.eta, summary.lam, t.conjugate)
    lhs = summary.fidelity / summary.p_s
    margin = effective - lhs
    return BoundReport("fidelity", lhs, effective, margin, bool(margin >= -SATISFIED_TOL),
                       {"task": t.to_dict(), "lambda": summary.lam, "as_written": as_written})


def aup_rhs(G_x: float, G_p: float, conjugate: bool = False) -> float:
    return 0.25 * (math.sqrt(G_x * G_p) + _sign(conjugate)) ** 2


def aup_symmetric(G: float, conjugate: bool = False) -> float:
    """Traditional limit on the output variance for symmetric gain G."""
    return G + 0.5 if conjugate else 0.5 * (G + abs(G - 1.0))


def aup_evaluate(inp: AupInput, lam: float = 1e-6) -> BoundReport:
    """Amplifier uncertainty principle N_x N_p >= (1/4)|sqrt(G_x G_p) -+ 1|^2.

    ``inputs`` also carries the added-noise numbers A_z = N_z / G_z and the
    MSD-product-bound right-hand side at (eta_x, eta_p) = (G_x, G_p) and small ``lam``,
    which approaches the AUP right-hand side as lam -> 0.
    """
    lhs = inp.N_x * inp.N_p
    rhs = aup_rhs(inp.G_x, inp.G_p, inp.conjugate)
    added = [inp.N_x / inp.G_x if inp.G_x > 0 else None,
             inp.N_p / inp.G_p if inp.G_p > 0 else None]
    info = {"G_x": inp.G_x, "G_p": inp.G_p, "N_x": inp.N_x, "N_p": inp.N_p,
            "conjugate": inp.conjugate, "added_noise": added}
    if inp.G_x > 0 and inp.G_p > 0:
        t1 = theorem1_rhs(Task(inp.G_x, inp.G_p, inp.conjugate), lam)
        info.update(lambda_limit=lam, theorem1_rhs=t1, limit_gap=abs(t1 - rhs))
    return BoundReport("aup", lhs, rhs, lhs - rhs, bool(lhs - rhs >= -SATISFIED_TOL), info)


def theorem2_rhs(lam: float) -> float:
    """Gaussian-operation floor on the average normalized MSD at eta = 1 + lam."""
    return (math.sqrt(1.0 + lam) - 1.0) ** 2 / lam + 0.5


def bound_table(lam: float, eta: float, conjugate: bool = False) -> dict:
    """Every bound at (lam, eta), as used by the ``bounds`` command."""
    from .nla import nla_asymptote

    as_written, effective = fidelity_bound(eta, lam, conjugate)
    table = {
        "lambda": lam,
        "eta": eta,
        "conjugate": conjugate,
        "theorem1_rhs": 0.25 * (eta / (1.0 + lam) + _sign(conjugate)) ** 2,
        "symmetric_bound": symmetric_msd_bound(eta, lam, conjugate),
        "fixed_gain_product_bound": fixed_gain_product_bound(eta, lam, conjugate),
        "gaussian_min": gaussian_min_msd(eta, lam),
        "fidelity_bound_as_written": as_written,
        "fidelity_bound_effective": effective,
        "aup_rhs": aup_rhs(eta, eta, conjugate),
        "aup_symmetric": aup_symmetric(eta, conjugate),
        "theorem2_rhs": theorem2_rhs(lam),
        "eb_line": 1.5,
    }
    if not conjugate and 0 < eta < (1.0 + lam) ** 2:
        table["nla_asymptote"] = nla_asymptote(eta, lam)
    return table
