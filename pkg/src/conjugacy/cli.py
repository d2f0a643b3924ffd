"""Command-line front end.

Every subcommand writes CSV or JSON to stdout (or ``--output``). Floats are
written in shortest round-trip form and rows in a fixed order, so equal
invocations produce byte-identical output.

Exit status: 0 on success, 1 when a verification fails or a computation does
not converge, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from fractions import Fraction

import numpy as np

from .algebra import FAMILY_PARAMS, Poly, RationalFn, to_fraction, verify_lemma_suite
from .linearize import (
    build_conjugacy,
    build_kink_conjugacy,
    smoothness_report,
)
from .maps import CATALOG, Interval, MapError, PiecewiseMap1D, catalog_make, map_from_spec
from .normal_forms import (
    AssumptionError,
    FITTERS,
    HEADERS,
    MapFamily,
    bc_g0,
    family_from_spec,
    fit_sweep,
    sn_form_fixed_points,
    sn_g0,
    sn_multipliers,
)
from .orbits import (
    empirical_density,
    find_fixed_points,
    find_periodic_orbits_unimodal,
    kf_bin_masses,
    verify_multiplier_law,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# -- output ---------------------------------------------------------------------------------

def _plain(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    return v


def _cell(v) -> str:
    v = _plain(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, allow_nan=True) + "\n"


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _out(args, rows, obj) -> None:
    _emit(args, render_csv(rows) if args.format == "csv" else render_json(obj))


# -- argument helpers -----------------------------------------------------------------------

def _params(pairs) -> dict:
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _load_map(args):
    if args.map:
        return map_from_spec(args.map)
    if not args.family:
        raise UsageError("give --family or --map")
    return catalog_make(args.family, _params(args.param))


def _load_family(args) -> MapFamily:
    if args.map:
        return family_from_spec(args.map)
    if not args.family:
        raise UsageError("give --family or --map")
    return MapFamily.from_catalog(args.family, _params(args.param), args.vary)


def _window(f, lo, hi) -> Interval:
    d = f.domain
    lo = d.lo if lo is None else lo
    hi = d.hi if hi is None else hi
    if not math.isfinite(lo):
        lo = -10.0
    if not math.isfinite(hi):
        hi = 10.0
    return Interval(max(lo, d.lo), min(hi, d.hi))


def _mu_list(args) -> list:
    if args.mu:
        return sorted(float(to_fraction(m)) for m in args.mu)
    if args.mu_min is not None and args.mu_max is not None:
        return [float(m) for m in np.geomspace(args.mu_min, args.mu_max, args.count)]
    raise UsageError("give --mu values or --mu-min/--mu-max")


# -- subcommands -----------------------------------------------------------------------------

def cmd_catalog(args) -> int:
    items = []
    for name in sorted(CATALOG):
        desc = CATALOG[name][1]
        items.append({"name": name, "description": desc})
    _out(args, [["name", "description"]] + [[i["name"], i["description"]] for i in items], {"families": items})
    return EXIT_OK


def cmd_fixed_points(args) -> int:
    f = _load_map(args)
    fps = find_fixed_points(f, _window(f, args.lo, args.hi), args.grid)
    rows = [["x_star", "multiplier", "stability"]] + [[p.x_star, p.multiplier, p.stability] for p in fps]
    obj = {"fixed_points": [{"x_star": p.x_star, "multiplier": p.multiplier, "stability": p.stability} for p in fps]}
    _out(args, rows, obj)
    return EXIT_OK


def cmd_orbits(args) -> int:
    f = _load_map(args)
    orbits = find_periodic_orbits_unimodal(f, args.pmax)
    rows = [["itinerary", "period", "points", "multiplier"]]
    rows += [[o.itinerary, o.period, ";".join(repr(float(x)) for x in o.points), o.multiplier] for o in orbits]
    obj = {"orbits": [{"itinerary": o.itinerary, "period": o.period, "points": list(o.points),
                       "multiplier": o.multiplier} for o in orbits]}
    _out(args, rows, obj)
    return EXIT_OK


def cmd_multiplier_law(args) -> int:
    if args.family == "elliptic" and not args.map:
        args.family = "elliptic-compact"
    f = _load_map(args)
    H = None
    if args.H:
        h = json.loads(args.H)
        H = RationalFn(Poly(h["num"]), Poly(h.get("den", [1])))
    report = verify_multiplier_law(f, H, args.pmax, args.tol)
    worst = max((r.relative_error for r in report.rows if not r.exempt), default=0.0)
    obj = {
        "map": f.name,
        "pass": report.passed,
        "p_max": args.pmax,
        "tol": args.tol,
        "max_relative_error": worst,
        "rows": [dict(zip(report.csv_rows()[0], row)) for row in report.csv_rows()[1:]],
    }
    _out(args, report.csv_rows(), obj)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify_identity(args) -> int:
    fam = args.family
    if fam not in FAMILY_PARAMS:
        raise UsageError(f"verify-identity supports {sorted(FAMILY_PARAMS)}, got {fam!r}")
    samples = None
    if args.param:
        p = _params(args.param)
        missing = [k for k in FAMILY_PARAMS[fam] if k not in p]
        if missing:
            raise UsageError(f"missing parameters {missing}")
        samples = [tuple(p[k] for k in FAMILY_PARAMS[fam])]
    report = verify_lemma_suite(fam, samples)
    d = report.to_dict()
    rows = [["params", "pass", "defect"]] + [[" ".join(i["params"]), int(i["pass"]), i["defect"]] for i in d["items"]]
    _out(args, rows, d)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_density(args) -> int:
    f = _load_map(args)
    x0 = args.x0 if args.x0 is not None else 0.5 * (f.domain.lo + f.domain.hi) + 0.1234 * f.domain.width
    hist = empirical_density(f, x0, args.n, args.bins, args.burn_in, args.seed)
    exact = None
    if f.name in ("katsura-fukuda", "logistic"):
        l = float(f.params.get("l", 0))
        exact = kf_bin_masses(l, hist.bin_edges)
    rows = [["bin_lo", "bin_hi", "empirical", "exact", "deviation"]]
    dev_max = None
    for i in range(len(hist.masses)):
        e = float(exact[i]) if exact is not None else ""
        dv = abs(float(hist.masses[i]) - e) if exact is not None else ""
        rows.append([hist.bin_edges[i], hist.bin_edges[i + 1], hist.masses[i], e, dv])
    if exact is not None:
        dev_max = float(np.max(np.abs(hist.masses - exact)))
    ok = dev_max is None or dev_max < args.tol
    obj = {
        "map": f.name, "n": args.n, "bins": args.bins, "seed": args.seed, "x0": x0,
        "max_deviation": dev_max, "pass": ok,
        "bin_edges": hist.bin_edges, "empirical": hist.masses,
        "exact": exact if exact is not None else None,
    }
    _out(args, rows, obj)
    return EXIT_OK if ok else EXIT_FAIL


def _fit_prediction(kind: str, fam: MapFamily):
    if kind == "sn":
        return {"G0": sn_g0(fam)}
    if kind == "bc":
        return {"G0": bc_g0(fam)}
    return {}


def cmd_fit(args, kind: str) -> int:
    fam = _load_family(args)
    mus = _mu_list(args)
    fitter = FITTERS[kind]
    fits = [fitter(fam, mu) for mu in mus]
    rows = [list(HEADERS[kind])] + [fit.csv_row() for fit in fits]
    obj = {"kind": kind, "prediction": _fit_prediction(kind, fam), "fits": [asdict(f) for f in fits]}
    _out(args, rows, obj)
    return EXIT_OK


def cmd_sweep(args) -> int:
    fam = _load_family(args)
    res = fit_sweep(args.fit, fam, _mu_list(args))
    _out(args, res.csv_rows(), res.to_dict())
    return EXIT_OK if res.fits else EXIT_FAIL


def _fit_conjugacy(args) -> tuple:
    fam = _load_family(args)
    if args.mu is None or len(args.mu) != 1:
        raise UsageError("conjugacy --fit needs exactly one --mu")
    mu = float(to_fraction(args.mu[0]))
    fit = FITTERS[args.fit](fam, mu)
    f = fam(mu)
    g = fit.normal_form()
    if args.fit == "sn":
        m = sn_multipliers(fam, mu)
        if m.normalization != "none":
            raise UsageError(f"family needs the substitution {m.normalization}; supply the normalized family")
        _, ym = sn_form_fixed_points(fit.nu, fit.a)
        table = build_conjugacy(f, g, {"fixed": (m.x_minus, ym)}, args.grid)
        return table, f, g, None
    if args.fit == "bc":
        table = build_kink_conjugacy(f, g, args.grid)
        return table, f, g, 0.0
    raise UsageError("conjugacy --fit supports sn and bc")


def cmd_conjugacy(args) -> int:
    if args.fit:
        table, f, g, kink = _fit_conjugacy(args)
    else:
        if not (args.map and args.target):
            raise UsageError("give --fit with a family, or --map and --target")
        f, g = map_from_spec(args.map), map_from_spec(args.target)
        if isinstance(f, PiecewiseMap1D) != isinstance(g, PiecewiseMap1D):
            raise UsageError("both maps must be smooth or both piecewise")
        if isinstance(f, PiecewiseMap1D):
            table = build_kink_conjugacy(f, g, args.grid)
            kink = 0.0
        else:
            if not args.fixed:
                raise UsageError("smooth conjugacy needs --fixed X Y")
            pairing = {"fixed": tuple(args.fixed)}
            if args.marked:
                pairing["marked"] = tuple(args.marked)
            span = tuple(args.span) if args.span else None
            table = build_conjugacy(f, g, pairing, args.grid, span=span)
            kink = None
    if kink is not None:
        table = table.with_smoothness(smoothness_report(table, f, g, kink))
    ok = table.residual_sup < args.tol and table.is_monotone()
    if args.format == "csv":
        _emit(args, table.to_csv())
    else:
        d = table.to_dict()
        d["pass"] = ok
        _emit(args, render_json(d))
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ----------------------------------------------------------------------------------

def _add_map_args(p, family_required: bool = False, vary: bool = False) -> None:
    p.add_argument("--family", required=family_required, help="catalog family name")
    p.add_argument("--param", action="append", metavar="K=V", help="family parameter (repeatable; p/q allowed)")
    p.add_argument("--map", help="map spec: inline JSON or a path to a JSON file")
    if vary:
        p.add_argument("--vary", default="nu", help="catalog parameter used as mu (default nu)")


def _add_out_args(p, default_format: str = "json") -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--output", help="write to this file instead of stdout")


def _add_mu_args(p) -> None:
    p.add_argument("--mu", action="append", help="parameter value (repeatable)")
    p.add_argument("--mu-min", type=float)
    p.add_argument("--mu-max", type=float)
    p.add_argument("--count", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conjugacy", description="Conjugacies of one-dimensional maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list map families")
    _add_out_args(p)

    p = sub.add_parser("fixed-points", help="fixed points and multipliers")
    _add_map_args(p)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--grid", type=int, default=256)
    _add_out_args(p)

    p = sub.add_parser("orbits", help="periodic orbits of a full-shift unimodal map")
    _add_map_args(p)
    p.add_argument("--pmax", type=int, default=6)
    _add_out_args(p, "csv")

    p = sub.add_parser("multiplier-law", help="check |multiplier| = 2^p on periodic orbits")
    _add_map_args(p)
    p.add_argument("--pmax", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--H", help='paired H as JSON {"num": [...], "den": [...]} (default: catalog H)')
    _add_out_args(p, "csv")

    p = sub.add_parser("verify-identity", help="exact check of H(F) = F'^2 H / 4")
    p.add_argument("--family", required=True, choices=sorted(FAMILY_PARAMS))
    p.add_argument("--param", action="append", metavar="K=V")
    _add_out_args(p)

    p = sub.add_parser("density", help="histogram of a long orbit")
    _add_map_args(p)
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--x0", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=5e-3)
    _add_out_args(p, "csv")

    for kind, help_ in (("sn", "saddle-node"), ("pf", "pitchfork"), ("bc", "border-collision")):
        p = sub.add_parser(f"fit-{kind}", help=f"fit the extended {help_} normal form")
        _add_map_args(p, vary=True)
        _add_mu_args(p)
        _add_out_args(p)
        p.set_defaults(fit_kind=kind)

    p = sub.add_parser("conjugacy", help="build a conjugacy table")
    _add_map_args(p, vary=True)
    p.add_argument("--fit", choices=("sn", "bc"), help="fit a normal form to the family and conjugate to it")
    p.add_argument("--mu", action="append")
    p.add_argument("--target", help="target map spec (with --map)")
    p.add_argument("--fixed", type=float, nargs=2, metavar=("X", "Y"))
    p.add_argument("--marked", type=float, nargs=2, metavar=("X0", "Y0"))
    p.add_argument("--span", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--grid", type=int, default=201)
    p.add_argument("--tol", type=float, default=1e-8)
    _add_out_args(p)

    p = sub.add_parser("sweep", help="fit over a grid of mu values")
    _add_map_args(p, vary=True)
    p.add_argument("--fit", choices=sorted(FITTERS), required=True)
    _add_mu_args(p)
    _add_out_args(p, "csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "catalog": cmd_catalog,
        "fixed-points": cmd_fixed_points,
        "orbits": cmd_orbits,
        "multiplier-law": cmd_multiplier_law,
        "verify-identity": cmd_verify_identity,
        "density": cmd_density,
        "conjugacy": cmd_conjugacy,
        "sweep": cmd_sweep,
    }
    try:
        if args.command.startswith("fit-"):
            return cmd_fit(args, args.fit_kind)
        return handlers[args.command](args)
    except AssumptionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, OSError, MapError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
