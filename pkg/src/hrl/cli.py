"""Command-line front-end: one experiment per invocation, one report file.

Exit codes: 0 success, 2 invalid input or failed precondition, 3 numerical
failure (the report is still written, with the diagnostic payload).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from . import catalog
from .division import DEFAULT_ORDER, EPS_REL, TOL_DIV, TOL_LEAD, ratio_field, ratio_jet_at
from .errors import HrlError, InputError, NumericalFailure
from .frequency import frequency_profile, generalized_doubling, geometric_radii
from .harmonic import HarmonicSpec, from_dict
from .harnack import BLOWUP_RATIO, family_sweep_2d, harnack_constants
from .lojasiewicz import DUST, NEAR_ZERO_BAND, fit as loj_fit
from .region import Region
from .structure import COND_GATE, AnalyticPair, fit_g
from .walk import WalkConfig, escape_chain, random_starts, verify_al3
from .zero_set import BISECTION_STEPS, REFINE_STEPS, TOL_ZERO_REL, build_zero_set, same_zero_set

SCHEMA = "hrl/1"
COMMANDS = ("catalog", "zeros", "frequency", "loj", "walk", "divide", "harnack", "sweep2d", "structure")

TOLERANCES = {
    "tol_zero_rel": TOL_ZERO_REL,
    "bisection_steps": BISECTION_STEPS,
    "delta_refine_steps": REFINE_STEPS,
    "tol_lead_rel": TOL_LEAD,
    "tol_div_rel": TOL_DIV,
    "eps_rel": EPS_REL,
    "loj_near_zero_band": NEAR_ZERO_BAND,
    "loj_dust_rel": DUST,
    "monotone_tol_rel": 1e-3,
    "vandermonde_gate": COND_GATE,
    "sweep_blowup_ratio": BLOWUP_RATIO,
}


def parse_region(text: str, resolution: int) -> Region:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"region must be 'cx,cy[,cz...],radius', got {text!r}") from None
    if len(vals) < 3:
        raise InputError("region needs at least two center coordinates and a radius")
    return Region(tuple(vals[:-1]), vals[-1], resolution)


def parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise InputError(f"point must be comma-separated numbers, got {text!r}") from None


def load_spec(ref: str) -> HarmonicSpec:
    """A catalog id, or a path to a JSON spec document."""
    if ref in catalog.SPECS:
        return catalog.SPECS[ref]
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise InputError(f"cannot read spec file {ref}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"spec file {ref} is not valid JSON: {exc}") from None
        return from_dict(doc)
    return catalog.get_spec(ref)


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def _pair_or_specs(args):
    if args.pair:
        rec = catalog.get_pair(args.pair)
        return rec.u, rec.v, rec.id
    if args.spec and args.spec2:
        return load_spec(args.spec), load_spec(args.spec2), f"{args.spec}/{args.spec2}"
    raise InputError("this command needs --pair, or both --spec and --spec2")


def _single_spec(args):
    if args.spec:
        return load_spec(args.spec)
    if args.pair:
        return catalog.get_pair(args.pair).v
    raise InputError("this command needs --spec (or --pair, whose v is used)")


def _region(args, default_radius: float, dim: int) -> Region:
    if args.region:
        reg = parse_region(args.region, args.resolution)
        if reg.dimension != dim:
            raise InputError(f"region has dimension {reg.dimension}, spec has {dim}")
        return reg
    return Region((0.0,) * dim, default_radius, args.resolution)


def _field_rows(points, values, names):
    for p, val in zip(points, values):
        yield [*(float(c) for c in p), *(float(x) for x in np.atleast_1d(val))]


# -- commands: each returns (result dict, csv rows or None, field dump or None)

def cmd_catalog(args):
    specs = {k: v.to_dict() for k, v in sorted(catalog.SPECS.items())}
    pairs = {k: {"u": r.u.to_dict(), "v": r.v.to_dict(), "domain": r.domain.to_dict(), "note": r.note}
             for k, r in sorted(catalog.PAIRS.items())}
    rows = [{"kind": "spec", "id": k, "repr": repr(catalog.SPECS[k])} for k in sorted(catalog.SPECS)]
    rows += [{"kind": "pair", "id": k, "repr": f"{r.u!r} / {r.v!r}"} for k, r in sorted(catalog.PAIRS.items())]
    return {"specs": specs, "pairs": pairs}, rows, None


def cmd_zeros(args):
    if args.pair or args.spec2:
        u, v, pid = _pair_or_specs(args)
        reg = _region(args, 1.0, u.dimension)
        zu, zv = build_zero_set(u, reg), build_zero_set(v, reg)
        rep = same_zero_set(u, v, reg, zu, zv)
        result = {"pair": pid, "region": reg.to_dict(), "same_zero_set": rep.to_dict(),
                  "nodal_domains_u": zu.nodal_labels()[1], "nodal_domains_v": zv.nodal_labels()[1],
                  "n_crossings_u": len(zu.crossings), "n_crossings_v": len(zv.crossings)}
        spec, zs = u, zu
    else:
        spec = _single_spec(args)
        reg = _region(args, 1.0, spec.dimension)
        zs = build_zero_set(spec, reg)
        result = {"spec": spec.to_dict(), "region": reg.to_dict(), "nodal_domains": zs.nodal_labels()[1],
                  "n_crossings": len(zs.crossings), "tol_zero": zs.tol_zero}
        if args.with_model:
            result["model"] = zs.to_dict()
    rows = [{"key": k, "value": json.dumps(_clean(v), sort_keys=True) if isinstance(v, (dict, list)) else v}
            for k, v in result.items()]
    dump = None
    if args.dump_field:
        pts = reg.nodes().reshape(-1, reg.dimension)
        dump = (["x%d" % i for i in range(reg.dimension)] + ["value", "sign"],
                [[*p.tolist(), float(val), int(s)] for p, val, s in
                 zip(pts, spec._eval(pts), zs.sign_grid.ravel())])
    return result, rows, dump


def cmd_frequency(args):
    spec = _single_spec(args)
    x = parse_point(args.point) if args.point else np.zeros(spec.dimension)
    radii = [float(r) for r in args.radii.split(",")] if args.radii else geometric_radii()
    rep = frequency_profile(spec, x, radii)
    result = {"spec": spec.to_dict(), "profile": rep.to_dict()}
    if args.generalized:
        result["generalized_doubling"] = generalized_doubling(spec, resolution=max(16, args.resolution // 8)).to_dict()
    return result, rep.rows(), None


def cmd_loj(args):
    spec = _single_spec(args)
    reg = _region(args, 0.5, spec.dimension)
    zs = build_zero_set(spec, Region(reg.center, 2 * reg.radius, args.resolution))
    fit = loj_fit(spec, zs, reg)
    result = {"spec": spec.to_dict(), "fit": fit.to_dict(), "feasible": fit.feasible()}
    return result, [fit.to_dict() | {"region": json.dumps(reg.to_dict())}], None


def cmd_walk(args):
    cfg = WalkConfig(max_steps=args.max_steps, sphere_samples=args.sphere_samples)
    if args.pair:
        u, v, pid = _pair_or_specs(args)
    else:
        v = _single_spec(args)
        u, pid = None, args.spec
    zs = build_zero_set(v, Region((0.0,) * v.dimension, 1.0, args.resolution))
    starts = [parse_point(args.point)] if args.point else random_starts(v, args.starts, args.seed)
    traces = []
    for x in starts:
        traces.append(escape_chain(v, zs, x, cfg))
    result = {"id": pid, "config": cfg.to_dict(), "traces": [t.to_dict() for t in traces]}
    if u is not None:
        result["al3"] = verify_al3(u, v, zs, starts, cfg=cfg, traces=traces, resolution=args.resolution).to_dict()
    rows = []
    for c, t in enumerate(traces):
        for rec in t.records():
            rows.append({"chain": c, "i": rec["i"], "x": json.dumps(rec["x"]), "abs_v": rec["abs_v"],
                         "delta": rec["delta"], "ratio": rec["ratio"]})
    return result, rows, None


def cmd_divide(args):
    u, v, pid = _pair_or_specs(args)
    if args.point:
        x0 = parse_point(args.point)
    else:
        zs = build_zero_set(v, Region((0.0,) * v.dimension, 1.0, args.resolution))
        _, x0 = zs.nearest(np.zeros(v.dimension))
    rj = ratio_jet_at(u, v, x0, args.order)
    rows = [{"alpha": json.dumps(list(a)), "coefficient": c} for a, c in sorted(rj.jet.coeffs.items())]
    return {"pair": pid, "ratio_jet": rj.to_dict()}, rows, None


def cmd_harnack(args):
    u, v, pid = _pair_or_specs(args)
    K = _region(args, 0.5, u.dimension)
    zs = build_zero_set(v, K)
    rep = harnack_constants(u, v, K, zs, pair_id=pid)
    dump = None
    if args.dump_field:
        pts = K.ball_nodes()
        f, near = ratio_field(u, v, zs, pts)
        dump = (["x%d" % i for i in range(K.dimension)] + ["f", "near_zero_set"],
                [[*p.tolist(), float(val), int(nz)] for p, val, nz in zip(pts, f, near)])
    rows = [{"alpha": json.dumps(list(a)), "entry": val} for a, val in sorted(rep.derivative_table.items())]
    return {"report": rep.to_dict()}, rows, dump


def cmd_sweep2d(args):
    k = args.k
    params = [float(a) for a in args.params.split(",")]
    K = _region(args, 0.5, 2)
    table = family_sweep_2d(lambda a: (catalog.im_zk(k), catalog.im_zk_perturbed(k, a)), params, K)
    return {"family": f"im_zk({k}) / im_zk_perturbed({k}, a)", "table": table.to_dict()}, \
        [r.to_dict() for r in table.rows], None


def cmd_structure(args):
    u, v, pid = _pair_or_specs(args)
    U, V = AnalyticPair.from_imaginary(u), AnalyticPair.from_imaginary(v)
    fit = fit_g(U, V, degree=args.degree, r_in=args.r_in, r_out=args.r_out)
    rows = [{"j": j, "re": float(c.real), "im": float(c.imag)} for j, c in enumerate(fit.g_coeffs)]
    return {"pair": pid, "fit": fit.to_dict()}, rows, None


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrl",
        description="Experiments on ratios of harmonic functions sharing a zero set.",
        epilog="Region format: cx,cy[,cz...],radius (a closed ball).  Catalog ids: "
               + ", ".join(sorted(catalog.SPECS)) + "; pairs: " + ", ".join(sorted(catalog.PAIRS)),
    )
    parser.add_argument("--version", action="version", version=f"hrl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--pair", help="catalog pair id")
        p.add_argument("--spec", help="catalog spec id or path to a JSON spec")
        p.add_argument("--spec2", help="second spec (with --spec) for pair commands")
        p.add_argument("--region", help="ball as cx,cy[,...],radius")
        p.add_argument("--resolution", type=int, default=128)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", "-o", help="report path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--dump-field", help="optional CSV of grid values")
        p.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
        if name == "zeros":
            p.add_argument("--with-model", action="store_true", help="embed the sign grid and crossings")
        if name == "frequency":
            p.add_argument("--point", help="center x as comma-separated coordinates")
            p.add_argument("--radii", help="comma-separated increasing radii")
            p.add_argument("--generalized", action="store_true", help="also compute N1")
        if name == "walk":
            p.add_argument("--point", help="single start x0 (default: random starts)")
            p.add_argument("--starts", type=int, default=10)
            p.add_argument("--max-steps", type=int, default=200)
            p.add_argument("--sphere-samples", type=int, default=4096)
        if name == "divide":
            p.add_argument("--point", help="zero-set point x0 (default: nearest zero to the origin)")
            p.add_argument("--order", type=int, default=DEFAULT_ORDER)
        if name == "sweep2d":
            p.add_argument("--k", type=int, default=2)
            p.add_argument("--params", default="-0.3,-0.2,-0.1,0,0.1,0.2,0.3")
        if name == "structure":
            p.add_argument("--degree", type=int, default=16)
            p.add_argument("--r-in", type=float, default=0.3)
            p.add_argument("--r-out", type=float, default=0.6)
    return parser


def _config_echo(args) -> dict:
    # the output path is left out so that reports written to different files compare equal
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("timing", "output")}


def _to_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    header = []
    for r in rows:
        for k in r:
            if k not in header:
                header.append(k)
    w = csv.DictWriter(buf, fieldnames=header)
    w.writeheader()
    for r in rows:
        cells = {k: _clean(v) for k, v in r.items()}
        w.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v for k, v in cells.items()})
    return buf.getvalue()


def _emit(text: str, path: Optional[str]):
    if path:
        Path(path).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    np.random.seed(args.seed)
    started = time.perf_counter()
    report = {
        "schema": SCHEMA,
        "tool": "hrl",
        "version": __version__,
        "command": args.command,
        "config": _config_echo(args),
        "seed": args.seed,
        "tolerances": TOLERANCES,
        "wall_clock_s": None,
    }
    rows, dump, status = None, None, 0
    try:
        if args.resolution < 16:
            raise InputError("resolution must be >= 16")
        result, rows, dump = HANDLERS[args.command](args)
        report["status"] = "ok"
        report["result"] = result
    except InputError as exc:
        report["status"] = "invalid"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        status = 2
    except NumericalFailure as exc:
        payload = exc.payload
        if hasattr(payload, "to_dict"):
            payload = payload.to_dict()
        report["status"] = "numerical_failure"
        report["error"] = {"type": type(exc).__name__, "message": str(exc), "payload": payload}
        status = 3
    except HrlError as exc:
        report["status"] = "invalid"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        status = 2
    if args.timing:
        report["wall_clock_s"] = time.perf_counter() - started
    if status:
        print(f"hrl {args.command}: {report['error']['message']}", file=sys.stderr)
    if args.format == "csv" and status == 0:
        text = _to_csv(rows or [])
    else:
        text = json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"
    _emit(text, args.output)
    if dump is not None and status == 0:
        header, data = dump
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(header)
        w.writerows(data)
        Path(args.dump_field).write_text(buf.getvalue(), newline="")
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
