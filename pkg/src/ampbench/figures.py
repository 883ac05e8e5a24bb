"""Data tables for the MSD-region and MSD-versus-gain figures, with CSV/JSON I/O."""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .bounds import aup_symmetric, boundary_point, gaussian_min_msd, parametric_boundary, symmetric_msd_bound
from .errors import InvalidInputError

FIG1A_COLUMNS = ["curve", "R", "vbar_x", "vbar_p"]
FIG1B_COLUMNS = ["eta", "bound_normal", "bound_conj", "gaussian_min", "aup_normal", "aup_conj"]
FIXED_RATIOS = (1.0, 2.0)


def fig1a_rows(eta_eff: float = 1.3, r_max: float = 2.0, steps: int = 81, lam: float = 0.4) -> list[dict]:
    """Fixed-gain boundaries and fixed-ratio curves in the (vbar_x, vbar_p) plane.

    ``boundary_normal``/``boundary_conj`` trace the product boundary for gain
    splits (eta e^R, eta e^-R) at effective gain ``eta_eff``. The
    ``ratio{k}_*`` curves fix eta_x/eta_p = k and vary the parameter of the
    MSD-region boundary. ``lam`` only sets the absolute gains; the curves
    depend on eta_eff alone.
    """
    if eta_eff <= 0 or steps < 2 or r_max <= 0:
        raise InvalidInputError("need eta_eff > 0, r_max > 0 and steps >= 2")
    Rs = np.linspace(-r_max, r_max, steps)
    rows = []
    for conj, tag in ((False, "normal"), (True, "conj")):
        for R in Rs:
            vx, vp = boundary_point(eta_eff * (1.0 + lam), lam, conj, float(R))
            rows.append({"curve": f"boundary_{tag}", "R": float(R), "vbar_x": vx, "vbar_p": vp})
        for k in FIXED_RATIOS:
            eta = eta_eff * (1.0 + lam)
            ex, ep = eta * math.sqrt(k), eta / math.sqrt(k)
            for R in Rs:
                vx, vp = parametric_boundary(ex, ep, lam, conj, float(R))
                rows.append({"curve": f"ratio{k:g}_{tag}", "R": float(R), "vbar_x": vx, "vbar_p": vp})
    return rows


def fig1b_rows(lam: float = 0.4, eta_min: float = 0.0, eta_max: float = 3.0, steps: int = 301) -> list[dict]:
    """Symmetric MSD bounds, Gaussian minimum and traditional limits versus eta."""
    if lam <= 0 or eta_min < 0 or eta_max < eta_min or steps < 1:
        raise InvalidInputError("need lam > 0, 0 <= eta_min <= eta_max and steps >= 1")
    rows = []
    for eta in np.linspace(eta_min, eta_max, steps):
        eta = float(eta)
        rows.append({
            "eta": eta,
            "bound_normal": symmetric_msd_bound(eta, lam, False),
            "bound_conj": symmetric_msd_bound(eta, lam, True),
            "gaussian_min": gaussian_min_msd(eta, lam),
            "aup_normal": aup_symmetric(eta, False),
            "aup_conj": aup_symmetric(eta, True),
        })
    return rows


def _fmt(v):
    return f"{v:.17g}" if isinstance(v, float) else str(v)


def _json_value(v):
    # NaN is not valid JSON
    return None if isinstance(v, float) and math.isnan(v) else v


def write_table(path_or_file, rows: list[dict], columns: list[str], fmt: str = "csv") -> None:
    """Write rows as CSV (17 significant digits) or as a JSON list of objects."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        if fmt == "json":
            json.dump([{c: _json_value(r[c]) for c in columns} for r in rows], fh, indent=1)
            fh.write("\n")
        elif fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_fmt(r[c]) for c in columns])
        else:
            raise InvalidInputError(f"unknown format {fmt!r}")
    finally:
        if own:
            fh.close()


def read_table(path, fmt: str = "csv") -> list[dict]:
    """Inverse of ``write_table``; numeric fields come back as floats."""
    with open(path, newline="") as fh:
        if fmt == "json":
            return [{k: math.nan if v is None else v for k, v in r.items()} for r in json.load(fh)]
        rows = []
        for row in csv.DictReader(fh):
            rows.append({k: (v if k == "curve" else float(v)) for k, v in row.items()})
        return rows
