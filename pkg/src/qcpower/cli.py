"""Command-line entry point: ``qcpower <command> [options]``.

Every tabular output starts with ``# key: value`` metadata lines. Only the
``# created:`` line varies between identical runs.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .cluster_errors import cluster_error_rates, verify_propagation_oracle
from .constants import SITE_THRESHOLDS
from .ghz_distill import Regime, regime_for
from .pauli_channel import PAULI_CLASSES, format_report
from .percolation import (
    LATTICE_KINDS,
    LatticeSpec,
    critical_deformation,
    k_curve,
    load_k_table,
    site_threshold,
    spanning_probability,
    zero_T_boundary,
)
from .phase_boundary import error_rates, sweep
from .unit_models import (
    Model,
    ModelParams,
    analytic_ground_energy,
    analytic_ground_state,
    deformation_parameter,
    detect_transition,
    eigensystem,
    spectrum,
)

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
SEED_ENV = "QCPOWER_SEED"
DEFAULT_K_GRID = "0:0.40:0.025"


class UsageError(ValueError):
    """Invalid combination of options; maps to exit code 2."""


# --- parsing helpers -------------------------------------------------------

def parse_range(text):
    """``lo:hi:step`` to an inclusive grid; ``hi`` is kept if within 1e-12 steps."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range {text!r} must have the form lo:hi:step")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"range {text!r} has a non-numeric field") from None
    if not all(map(math.isfinite, (lo, hi, step))) or step <= 0 or hi < lo:
        raise UsageError(f"range {text!r} needs finite lo <= hi and step > 0")
    n = int(math.floor((hi - lo) / step + 1e-12)) + 1
    # rounding strips accumulated float noise so grids print cleanly
    return [float(np.round(lo + i * step, 12)) for i in range(n)]


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _model_values(args, allow_range=True, require=True):
    """Resolve --delta/--dz (or their ranges) against --model."""
    model = Model(args.model)
    own, other = ("delta", "dz") if model is Model.XXZ else ("dz", "delta")
    for name in (other, other + "_range"):
        if getattr(args, name, None) is not None:
            flag = "--" + name.replace("_", "-")
            raise UsageError(f"{flag} does not apply to --model {model.value}")
    single = getattr(args, own, None)
    grid = getattr(args, own + "_range", None) if allow_range else None
    if single is not None and grid is not None:
        raise UsageError(f"give either --{own} or --{own}-range, not both")
    if grid is not None:
        return model, parse_range(grid)
    if single is not None:
        return model, [float(single)]
    if require:
        raise UsageError(f"--{own} is required for --model {model.value}")
    return model, []


# --- output ----------------------------------------------------------------

def _metadata(args, **extra):
    meta = {"tool": "qcpower", "version": __version__, "command": args.command}
    for key in ("model", "seed", "tol", "lattice", "trials", "size", "temp"):
        val = getattr(args, key, None)
        if val is not None:
            meta[key] = val
    meta.update(extra)
    return meta


def _fmt(x):
    if isinstance(x, bool) or x is None:
        return str(x).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def render(header, rows, meta, fmt):
    """Serialize a table with metadata as CSV (comment header) or JSON."""
    created = datetime.now(timezone.utc).isoformat(timespec="seconds")
    if fmt == "json":
        doc = {"metadata": _jsonable(meta), "created": created,
               "columns": list(header), "rows": _jsonable([list(r) for r in rows])}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {_fmt(v) if not isinstance(v, (list, dict)) else json.dumps(_jsonable(v))}\n")
    buf.write(f"# created: {created}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _sibling(path, tag):
    root, ext = os.path.splitext(path)
    return f"{root}_{tag}{ext or '.csv'}"


# --- commands --------------------------------------------------------------

def cmd_spectrum(args):
    model, values = _model_values(args)
    rows = []
    for v in values:
        p = ModelParams(model, v)
        s = spectrum(p)
        rows.append((model.value, v, s.E0, analytic_ground_energy(p), s.E1, s.gap, s.ground_degeneracy))
    meta = _metadata(args)
    if len(values) >= 3:
        scan = detect_transition(model, values)
        meta["transition_status"] = scan.status
        meta["kinks"] = [{"location": k.location, "slope_jump": k.slope_jump} for k in scan.kinks]
    header = ("model", "param", "E0", "E0_analytic", "E1", "gap", "ground_degeneracy")
    emit(render(header, rows, meta, args.format), args.output)
    return EXIT_OK


def cmd_ground_check(args):
    model, values = _model_values(args)
    rows = []
    for v in values:
        p = ModelParams(model, v)
        if p.ferromagnetic:
            raise UsageError(f"no closed-form ground state at {p.label} (ferromagnetic side)")
        evals, evecs = eigensystem(p)
        ground = evecs[:, np.abs(evals - evals[0]) < args.tol_degenerate]
        psi = analytic_ground_state(p)
        overlap = float(np.linalg.norm(ground.conj().T @ psi))
        rows.append((model.value, v, overlap, 1.0 - overlap, ground.shape[1]))
    header = ("model", "param", "overlap", "defect", "ground_degeneracy")
    emit(render(header, rows, _metadata(args), args.format), args.output)
    return EXIT_OK


def cmd_errors(args):
    model, (value,) = _model_values(args, allow_range=False)
    if args.temp is None or args.temp < 0:
        raise UsageError("--temp must be given and non-negative")
    p = ModelParams(model, value)
    if p.ferromagnetic:
        raise UsageError(f"{p.label} has no entangled resource; errors are undefined")
    p_z, p_l, dist = error_rates(p, args.temp)
    rates = cluster_error_rates(dist)
    a = deformation_parameter(p)
    extra = {"param": value, "a": a, "regime": regime_for(a).value, "p_s": dist.p_s,
             "p_z": p_z, "p_l": p_l}
    if args.format == "report":
        text = format_report(dist)
        text += f"# p_s = {dist.p_s:.6g}, p_z = {p_z:.3e}, p_l = {p_l:.3e}\n"
        text += f"# correlated: {'; '.join(f'{k} {v:.2e}' for k, v in rates.correlated)}\n"
        emit(text, args.output)
        return EXIT_OK
    rows = [(lbl, dist.probs[lbl]) for lbl in PAULI_CLASSES]
    emit(render(("class", "probability"), rows, _metadata(args, **extra), args.format), args.output)
    return EXIT_OK


def cmd_percolation(args):
    spec = LatticeSpec(args.lattice, args.size)
    if args.p_range:
        rows = [(p, spanning_probability(spec, p, args.trials, args.seed))
                for p in parse_range(args.p_range)]
        emit(render(("p", "spanning_probability"), rows, _metadata(args), args.format), args.output)
        return EXIT_OK
    est = site_threshold(spec, trials=args.trials, seed=args.seed, tol=args.tol)
    rows = [(est.kind, est.L, est.trials, est.seed, est.p_th, est.stderr,
             SITE_THRESHOLDS.get(est.kind, float("nan")))]
    header = ("lattice", "L", "trials", "seed", "p_th", "stderr", "reference")
    emit(render(header, rows, _metadata(args), args.format), args.output)
    return EXIT_OK


def cmd_kcurve(args):
    grid = parse_range(args.loss_range)
    kc = k_curve(grid, L=args.size, trials=args.trials, seed=args.seed)
    rows = [(p, k, s) for p, k, s in sorted(kc.points)]
    meta = _metadata(args, **{f"k_{k}": v for k, v in kc.metadata.items()})
    emit(render(("p_l", "k", "stderr"), rows, meta, args.format), args.output)
    return EXIT_OK


def cmd_zero_t_boundary(args):
    model = Model(args.model)
    if args.p_th is not None:
        p_th, source = args.p_th, "user"
    elif args.monte_carlo:
        if args.lattice not in LATTICE_KINDS:
            raise UsageError(f"Monte Carlo needs a built lattice, one of {LATTICE_KINDS}")
        est = site_threshold(LatticeSpec(args.lattice, args.size), trials=args.trials, seed=args.seed)
        p_th, source = est.p_th, f"monte-carlo L={args.size} trials={args.trials} seed={args.seed}"
    elif args.lattice in SITE_THRESHOLDS:
        p_th, source = SITE_THRESHOLDS[args.lattice], "reference"
    else:
        raise UsageError(f"no built-in threshold for {args.lattice!r}; pass --p-th")
    param = zero_T_boundary(model, p_th=p_th)
    rows = [(model.value, args.lattice, p_th, source, critical_deformation(p_th), param)]
    header = ("model", "lattice", "p_th", "p_th_source", "a_squared", "param")
    emit(render(header, rows, _metadata(args), args.format), args.output)
    return EXIT_OK


def _resolve_kcurve(args, model, params):
    needs_k = any(
        not ModelParams(model, v).ferromagnetic
        and regime_for(deformation_parameter(ModelParams(model, v))) is Regime.LOSSY
        for v in params
    )
    if args.k_source == "table":
        if not args.k_table:
            raise UsageError("--k-source table requires --k-table PATH")
        return load_k_table(args.k_table)
    if args.k_table:
        raise UsageError("--k-table is only read with --k-source table")
    if not needs_k:
        return None
    return k_curve(parse_range(DEFAULT_K_GRID), L=args.k_size, trials=args.k_trials, seed=args.seed)


def _cmd_phase(args, dim):
    model, params = _model_values(args)
    temps = parse_range(args.temp_range)
    kc = _resolve_kcurve(args, model, params) if dim == "2d" else None
    workers = args.workers if args.workers else (os.cpu_count() or 1)
    diagram = sweep(model, params, temps, dim, kcurve=kc, tol=args.tol, workers=workers)
    meta = _metadata(args, dim=dim, k_source=diagram.k_source, tol=args.tol,
                     temp_range=args.temp_range)
    if kc is not None:
        meta["k_metadata"] = kc.metadata
    rows = [(model.value, pt.params.value, pt.T, pt.p_z, pt.p_l, pt.universal_2d,
             pt.universal_3d, pt.margin(dim)) for pt in diagram.grid]
    header = ("model", "param", "T", "p_z", "p_l", "universal_2d", "universal_3d", "margin")
    b_header = ("model", "param", "T_star", "margin", "flag")
    b_rows = [(model.value, b.param, b.T_star, b.margin, b.flag) for b in diagram.boundary]
    if args.format == "json":
        doc = json.loads(render(header, rows, meta, "json"))
        doc["boundary"] = {"columns": list(b_header), "rows": _jsonable([list(r) for r in b_rows])}
        emit(json.dumps(doc, indent=2) + "\n", args.output)
        return EXIT_OK
    grid_text = render(header, rows, meta, "csv")
    b_text = render(b_header, b_rows, meta, "csv")
    if args.output in (None, "-"):
        emit(grid_text + "\n" + b_text, None)
    else:
        emit(grid_text, args.output)
        emit(b_text, args.boundary_output or _sibling(args.output, "boundary"))
    return EXIT_OK


def cmd_phase2d(args):
    return _cmd_phase(args, "2d")


def cmd_phase3d(args):
    return _cmd_phase(args, "3d")


def cmd_verify_propagation(args):
    report = verify_propagation_oracle(include_correlated=not args.table_only)
    emit(report.format() + "\n", args.output)
    return EXIT_OK if report.passed else EXIT_RUNTIME


# --- parser ----------------------------------------------------------------

def _add_model(p, ranges=True, single=True):
    p.add_argument("--model", choices=[m.value for m in Model], required=True)
    if single:
        p.add_argument("--delta", type=float, help="XXZ anisotropy (model xxz)")
        p.add_argument("--dz", type=float, help="single-ion anisotropy (model aniso)")
    if ranges:
        p.add_argument("--delta-range", metavar="LO:HI:STEP")
        p.add_argument("--dz-range", metavar="LO:HI:STEP")


def _add_output(p, formats=("csv", "json"), default="csv"):
    p.add_argument("--output", "-o", help="output file (default stdout)")
    p.add_argument("--format", choices=formats, default=default)


def build_parser():
    seed = _default_seed()
    parser = argparse.ArgumentParser(prog="qcpower", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("spectrum", help="low-lying unit spectrum and transition scan")
    _add_model(p)
    _add_output(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("ground-check", help="closed-form vs numeric ground state overlap")
    _add_model(p)
    p.add_argument("--tol-degenerate", type=float, default=1e-7)
    _add_output(p)
    p.set_defaults(func=cmd_ground_check)

    p = sub.add_parser("errors", help="Pauli error classes of the distilled GHZ state")
    _add_model(p, ranges=False)
    p.add_argument("--temp", type=float, required=True)
    _add_output(p, formats=("report", "csv", "json"), default="report")
    p.set_defaults(func=cmd_errors)

    p = sub.add_parser("percolation", help="site percolation threshold by Monte Carlo")
    p.add_argument("--lattice", choices=LATTICE_KINDS, default="honeycomb")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--tol", type=float, default=0.002, help="bisection resolution in p")
    p.add_argument("--p-range", metavar="LO:HI:STEP", help="emit the spanning curve instead")
    p.add_argument("--seed", type=int, default=seed)
    _add_output(p)
    p.set_defaults(func=cmd_percolation)

    p = sub.add_parser("kcurve", help="Monte Carlo k(p_l) table")
    p.add_argument("--loss-range", default=DEFAULT_K_GRID, metavar="LO:HI:STEP")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--seed", type=int, default=seed)
    _add_output(p)
    p.set_defaults(func=cmd_kcurve)

    p = sub.add_parser("zero-t-boundary", help="parameter where T=0 universality ends")
    p.add_argument("--model", choices=[m.value for m in Model], required=True)
    p.add_argument("--lattice", default="honeycomb")
    p.add_argument("--p-th", type=float, help="explicit site threshold (e.g. cross lattice)")
    p.add_argument("--monte-carlo", action="store_true", help="estimate p_th instead of the reference value")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--seed", type=int, default=seed)
    _add_output(p)
    p.set_defaults(func=cmd_zero_t_boundary)

    for name, func, dim in (("phase2d", cmd_phase2d, "2D"), ("phase3d", cmd_phase3d, "3D")):
        p = sub.add_parser(name, help=f"{dim} universality diagram and boundary T*(param)")
        _add_model(p)
        p.add_argument("--temp-range", default="0:0.4:0.01", metavar="LO:HI:STEP")
        p.add_argument("--tol", type=float, default=1e-6, help="boundary margin tolerance")
        p.add_argument("--workers", type=int, default=0, help="threads (0 = all cores)")
        p.add_argument("--seed", type=int, default=seed)
        p.add_argument("--boundary-output", help="boundary CSV path (default <output>_boundary.csv)")
        if dim == "2D":
            p.add_argument("--k-source", choices=("mc", "table"), default="mc")
            p.add_argument("--k-table", help="CSV with columns p_l,k")
            p.add_argument("--k-size", type=int, default=64)
            p.add_argument("--k-trials", type=int, default=20)
        _add_output(p)
        p.set_defaults(func=func)

    p = sub.add_parser("verify-propagation", help="check the error propagation table by simulation")
    p.add_argument("--table-only", action="store_true", help="skip the correlated rows")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_verify_propagation)
    return parser


def _glue_ranges(argv):
    # "-2:2:0.05" looks like an option to argparse; bind it with "=" instead
    out, it = [], iter(argv)
    for tok in it:
        if tok.endswith("-range") and tok.startswith("--"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the process exit code."""
    argv = _glue_ranges(sys.argv[1:] if argv is None else list(argv))
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"qcpower: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"qcpower {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"qcpower {args.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(run())
