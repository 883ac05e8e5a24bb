"""
Command-line entry point.

    ampbench figure 1b --lambda 0.4 --out fig1b.csv
    ampbench bounds --lambda 0.4 --eta 1.7
    ampbench nla-sweep --lambda 0.4 --eta 1.7 --N 10 20 40
    ampbench verify theorem1 --seed 1
    ampbench simulate --channel identity --lambda 0.4 --shots 100000 --out shots.csv
    ampbench certify --input shots.csv --lambda 0.4

Exit status: 0 on success, 1 when a verification suite fails, 2 on invalid
input or unreadable data.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
import warnings

from . import bounds, figures, nla, verify
from .channels import build_channel, to_gaussian
from .ensemble import (IntegrationGrid, Prior, Task, estimate_from_samples, jackknife_errors, msd_estimate,
                       read_samples, simulate_records, write_samples)
from .epr import distillation_certificate
from .errors import InsufficientDataError, InvalidInputError, PreconditionError, TruncationWarning

THREADS_ENV = "AMPBENCH_THREADS"
CHANNEL_KINDS = ("identity", "gaussian_amp", "gaussian_attenuator", "nla", "mp_conjugator")


def _limit_threads():
    """Context manager capping BLAS threads at AMPBENCH_THREADS when threadpoolctl is present."""
    value = os.environ.get(THREADS_ENV)
    if not value:
        return contextlib.nullcontext()
    try:
        n = int(value)
    except ValueError:
        raise InvalidInputError(f"{THREADS_ENV} must be a positive integer, got {value!r}") from None
    if n < 1:
        raise InvalidInputError(f"{THREADS_ENV} must be a positive integer, got {value!r}")
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return contextlib.nullcontext()
    return threadpool_limits(limits=n)


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=float) + "\n"


def _write_rows(rows, columns, args):
    if args.out:
        figures.write_table(args.out, rows, columns, args.format)
    else:
        figures.write_table(sys.stdout, rows, columns, args.format)


def _channel_spec(args) -> dict:
    kind = args.channel
    if kind == "identity":
        spec = {"kind": "identity"}
    elif kind in ("gaussian_amp", "gaussian_attenuator", "mp_conjugator"):
        spec = {"kind": kind, "G": args.G}
    else:
        spec = {"kind": "nla", "g": args.g, "N": args.N}
    if args.r:
        spec = {"kind": "squeezer_conjugated", "r": args.r, "inner": spec}
    return spec


def _channel(args):
    spec = _channel_spec(args)
    moments = args.backend == "moments" or args.channel == "mp_conjugator"
    if moments:
        return to_gaussian(spec)
    dim = args.dim
    if args.channel == "nla":
        dim = max(dim, args.N + 1)
    return build_channel(spec, dim)


# -- commands -------------------------------------------------------------------


def cmd_figure(args):
    if args.which == "1a":
        rows = figures.fig1a_rows(args.eta if args.eta is not None else 1.3, args.r_max, args.r_steps, args.lam)
        _write_rows(rows, figures.FIG1A_COLUMNS, args)
    else:
        if args.eta is not None:
            rows = figures.fig1b_rows(args.lam, args.eta, args.eta, 1)
        else:
            rows = figures.fig1b_rows(args.lam, args.eta_min, args.eta_max, args.eta_steps)
        _write_rows(rows, figures.FIG1B_COLUMNS, args)
    return 0


def cmd_bounds(args):
    if args.eta is None:
        raise InvalidInputError("--eta is required")
    _emit(_dumps(bounds.bound_table(args.lam, args.eta, args.conjugate)), args.out)
    return 0


def _eta_values(args):
    if args.eta is not None:
        return [args.eta]
    step = (args.eta_max - args.eta_min) / max(args.eta_steps - 1, 1)
    return [args.eta_min + i * step for i in range(args.eta_steps)]


def cmd_nla_sweep(args):
    rows = []
    Ns = args.N or [10, 20, 40, 60]
    for eta in _eta_values(args):
        if args.g:
            rows += nla.sweep(args.g, Ns, [args.lam], [eta])
        elif 1.0 < eta < (1.0 + args.lam) ** 2:
            # best gain at each cutoff; the large-N gain converges slowly near eta = 1 + lam
            for N in Ns:
                g = nla.nla_gain_for_cutoff(eta, args.lam, N) if N > 0 else nla.nla_optimal_gain(eta, args.lam)
                rows += nla.sweep([g], [N], [args.lam], [eta])
    _write_rows(rows, nla.SWEEP_COLUMNS, args)
    return 0


def cmd_verify(args):
    report = verify.run(args.suite, args.seed)
    _emit(_dumps(report), args.out)
    if not report["passed"]:
        for c in report["checks"]:
            if not c["passed"]:
                print(f"FAILED {c['suite']}: {c['name']} margin={c['margin']:.3e}", file=sys.stderr)
        return 1
    return 0


def _grid(args):
    if args.mc_samples:
        return IntegrationGrid.monte_carlo(args.mc_samples, args.seed)
    return IntegrationGrid.gauss_hermite(args.grid_order)


def cmd_estimate(args):
    eta = args.eta if args.eta is not None else 1.0 + args.lam
    task = Task(eta, eta, args.conjugate)
    summary = msd_estimate(_channel(args), task, Prior(args.lam), _grid(args))
    report = {
        "channel": _channel_spec(args),
        "task": task.to_dict(),
        "lambda": args.lam,
        "p_s": summary.p_s,
        "vbar_x": summary.vbar_x,
        "vbar_p": summary.vbar_p,
        "vbar_x_prob": summary.vbar_x_prob,
        "vbar_p_prob": summary.vbar_p_prob,
        "theorem1": json.loads(bounds.theorem1_margin(summary).to_json()),
        "backend": summary.meta.get("backend"),
    }
    if not args.conjugate and abs(eta - (1.0 + args.lam)) <= 1e-12 * eta:
        report["certificate"] = distillation_certificate(summary).to_dict()
    _emit(_dumps(report), args.out)
    return 0


def cmd_simulate(args):
    if not args.out:
        raise InvalidInputError("--out is required")
    eta = 1.0 + args.lam
    records = simulate_records(_channel(args), Task(eta, eta), args.lam, args.shots, args.seed)
    write_samples(args.out, records)
    return 0


def cmd_certify(args):
    if not args.input:
        raise InvalidInputError("--input is required")
    eta = 1.0 + args.lam
    task = Task(eta, eta)
    records = read_samples(args.input)
    summary = estimate_from_samples(records, task, args.lam)
    errors = jackknife_errors(records, task, args.blocks)
    cert = distillation_certificate(summary, errors, args.sigmas)
    out = cert.to_dict()
    out["shots"] = len(records)
    out["sigmas"] = args.sigmas
    _emit(_dumps(out), args.out)
    return 0


# -- parser ---------------------------------------------------------------------


def _add_common(p, *, lam_default=0.4):
    p.add_argument("--lambda", dest="lam", type=float, default=lam_default,
                   help="prior inverse width (default: %(default)s)")
    p.add_argument("--out", help="output path (default: stdout)")


def _add_eta_range(p):
    p.add_argument("--eta", type=float, help="single gain")
    p.add_argument("--eta-min", type=float, default=0.0)
    p.add_argument("--eta-max", type=float, default=3.0)
    p.add_argument("--eta-steps", type=int, default=301)


def _add_channel(p):
    p.add_argument("--channel", choices=CHANNEL_KINDS, default="identity")
    p.add_argument("--G", type=float, default=1.0, help="Gaussian channel gain")
    p.add_argument("--g", type=float, default=1.1, help="NLA gain")
    p.add_argument("--N", type=int, default=10, help="NLA photon-number cutoff")
    p.add_argument("--r", type=float, default=0.0, help="squeezing conjugation parameter")
    p.add_argument("--dim", type=int, default=80, help="Fock truncation")
    p.add_argument("--backend", choices=("fock", "moments"), default="fock")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ampbench", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure", help="emit figure data as CSV/JSON")
    p.add_argument("which", choices=("1a", "1b"))
    _add_common(p)
    _add_eta_range(p)
    p.add_argument("--r-max", type=float, default=2.0, help="1a: largest |R|")
    p.add_argument("--r-steps", type=int, default=81, help="1a: points per curve")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("bounds", help="tabulate every bound at one (lambda, eta)")
    _add_common(p)
    p.add_argument("--eta", type=float)
    p.add_argument("--conjugate", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("nla-sweep", help="closed-form NLA performance over (g, N, eta)")
    _add_common(p)
    _add_eta_range(p)
    p.add_argument("--g", type=float, nargs="+", help="NLA gains (default: best gain per eta and cutoff)")
    p.add_argument("--N", type=int, nargs="+", help="cutoffs (default: 10 20 40 60)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_nla_sweep, eta_min=1.0, eta_max=1.96, eta_steps=25)

    p = sub.add_parser("verify", help="run property suites; JSON report")
    p.add_argument("suite", nargs="?", default="all", choices=("all",) + verify.SUITES)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("estimate", help="ensemble MSDs and bound margins of one channel")
    _add_common(p)
    _add_channel(p)
    p.add_argument("--eta", type=float, help="target gain (default: 1 + lambda)")
    p.add_argument("--conjugate", action="store_true")
    p.add_argument("--grid-order", type=int, help="Gauss-Hermite order per axis")
    p.add_argument("--mc-samples", type=int, help="use Monte Carlo with this many samples")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="synthetic homodyne shots at eta = 1 + lambda")
    _add_common(p)
    _add_channel(p)
    p.add_argument("--shots", type=int, default=100_000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("certify", help="distillation certificate from homodyne shots")
    _add_common(p)
    p.add_argument("--input", help="sample CSV")
    p.add_argument("--blocks", type=int, default=50, help="jackknife blocks")
    p.add_argument("--sigmas", type=float, default=2.0,
                   help="standard errors required to claim a threshold is beaten")
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _limit_threads(), warnings.catch_warnings():
            warnings.simplefilter("default", TruncationWarning)
            return args.func(args)
    except (InvalidInputError, PreconditionError, InsufficientDataError, OSError) as exc:
        print(f"ampbench {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
