"""Command-line interface: moments, verify, kernel, field.

Exit codes: 0 success, 1 an identity failed, 2 usage or configuration
error, 3 numerical or infrastructure error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from . import hilbert as hb
from . import verify
from .domain import Disk, Domain, Ellipse, from_dict
from .errors import ModelError
from .fields import FieldGrid, check_sources, div_curl_check, velocity_field, write_csv

log = logging.getLogger("hypomodel")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INFRA = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _complex(text):
    t = str(text).replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _floats(values):
    """Accept "--eps 0.04 0.02" as well as "--eps 0.04,0.02"."""
    out = []
    for v in values:
        for part in str(v).split(","):
            if part:
                try:
                    out.append(float(part))
                except ValueError as exc:
                    raise UsageError(f"not a number: {part!r}") from exc
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default option values")
    common.add_argument("--domain", choices=("disk", "ellipse", "smooth"))
    common.add_argument("--r", type=float, help="disk radius")
    common.add_argument("--center", type=_complex, help="disk center")
    common.add_argument("--a", type=float, help="ellipse semi-axis along x")
    common.add_argument("--b", type=float, help="ellipse semi-axis along y")
    common.add_argument("--order", type=int, help="series truncation order")
    common.add_argument("--nodes", type=int, help="boundary quadrature nodes")
    common.add_argument("--eps", nargs="+", help="contour schedule, e.g. 0.04,0.02,0.01")
    common.add_argument("--tol", type=float, help="override identity tolerances")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hypomodel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("moments", parents=[common],
                   help="write moments M_k, k = -order..order, to moments.csv")
    v = sub.add_parser("verify", parents=[common], help="run identity suites")
    v.add_argument("--suite", choices=verify.SUITES + ("all",), nargs="+")
    k = sub.add_parser("kernel", parents=[common], help="evaluate one kernel at a pair (z, w)")
    k.add_argument("which", choices=KERNELS)
    k.add_argument("z", type=_complex)
    k.add_argument("w", type=_complex)
    f = sub.add_parser("field", parents=[common], help="write the exterior field to field.csv")
    f.add_argument("--source", action="append", metavar="A[:C]",
                   help="point mass C delta_A (repeatable; default C = pi, a unit source)")
    f.add_argument("--poly", action="append", metavar="J,K,C",
                   help="density C zeta^J conj(zeta)^K dA (repeatable)")
    f.add_argument("--grid", metavar="X0,X1,Y0,Y1,H", help="grid extents and spacing")
    return p


KERNELS = ("E", "F", "G", "Gstar", "H", "L")
# which points must lie inside (True) or outside (False) the domain
REGIONS = {"E": (None, None), "F": (False, False), "G": (True, False), "Gstar": (False, True),
           "H": (True, True), "L": (False, False)}

DEFAULTS = {"domain": "disk", "r": 1.0, "center": 0j, "a": 2.0, "b": 1.0, "order": 8,
            "nodes": 512, "eps": list(hb.DEFAULT_EPS), "tol": None, "seed": 0, "out": ".",
            "suite": ["all"], "source": None, "poly": None, "grid": None}


def resolve_options(args):
    """Command line beats config file beats built-in defaults."""
    opts = dict(DEFAULTS)
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(cfg) - set(DEFAULTS) - {"coeffs", "anchor"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        opts.update(cfg)
    for key, val in vars(args).items():
        if key in DEFAULTS and val is not None:
            opts[key] = val
    if isinstance(opts.get("center"), (list, tuple)):
        opts["center"] = complex(*opts["center"])
    if isinstance(opts.get("center"), str):
        opts["center"] = _complex(opts["center"])
    if "coeffs" in cfg:
        opts["coeffs"] = cfg["coeffs"]
        opts["anchor"] = cfg.get("anchor", 0)
    if not isinstance(opts["order"], int) or opts["order"] < 0:
        raise UsageError("--order must be a nonnegative integer")
    if not isinstance(opts["nodes"], int) or opts["nodes"] < 8 or opts["nodes"] % 2:
        raise UsageError("--nodes must be an even integer >= 8")
    if opts["tol"] is not None and not 0 < opts["tol"] < 1:
        raise UsageError("--tol must lie in (0, 1)")
    opts["eps"] = _floats(opts["eps"])
    try:
        hb.EpsilonSchedule(tuple(opts["eps"]))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--eps: {exc}") from exc
    return opts


def make_domain(opts):
    kind = opts["domain"]
    try:
        if kind == "disk":
            return Disk(complex(opts["center"]), float(opts["r"]))
        if kind == "ellipse":
            return Ellipse(float(opts["a"]), float(opts["b"]))
        if "coeffs" not in opts:
            raise UsageError("a smooth domain needs 'coeffs' in the config file")
        return from_dict({"kind": "smooth", "coeffs": opts["coeffs"],
                          "anchor": opts.get("anchor", 0)})
    except (ValueError, ModelError) as exc:
        raise UsageError(f"invalid domain: {exc}") from exc


def _out_dir(opts):
    os.makedirs(opts["out"], exist_ok=True)
    return opts["out"]


def _moment_error(domain, k):
    """Difference to a rule with twice the nodes (closed forms: to quadrature)."""
    n = domain._moment_nodes(k)
    if domain.has_closed_form:
        return abs(Domain.boundary_moment(domain, k, 2 * n) - domain.boundary_moment(k))
    return abs(domain.boundary_moment(k, 2 * n) - domain.boundary_moment(k, n))


def cmd_moments(domain, opts):
    K = opts["order"]
    ext = domain.exterior_moments(K)
    rows = []
    if domain.contains(0):
        S = domain.schwarz_series(K, 0)
        rows += [(-m - 1, S.interior[m]) for m in range(K)][::-1]
    else:
        log.warning("0 lies outside the domain; interior moments omitted")
    rows += list(enumerate(ext))
    path = os.path.join(_out_dir(opts), "moments.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "re", "im", "error"])
        for k, v in rows:
            w.writerow([k, repr(float(v.real)), repr(float(v.imag)),
                        repr(float(_moment_error(domain, k)))])
    for k, v in rows:
        print(f"M_{k:<4d} {v.real: .16e} {v.imag: .16e}")
    print(f"wrote {len(rows)} moments to {path}")
    return EXIT_OK


def cmd_verify(domain, opts):
    settings = verify.Settings(order=max(opts["order"], 1), nodes=opts["nodes"],
                               eps=tuple(opts["eps"]), tol=opts["tol"], seed=opts["seed"])
    report = verify.run(domain, tuple(opts["suite"]), settings)
    out = _out_dir(opts)
    with open(os.path.join(out, "report.json"), "w") as fh:
        fh.write(report.to_json())
    text = report.to_text()
    with open(os.path.join(out, "report.txt"), "w") as fh:
        fh.write(text)
    print(text, end="")
    return EXIT_OK if report.passed else EXIT_FAIL


def _kernel_value(k, which, z, w):
    fn = {"E": k.E, "F": k.F, "G": k.G, "Gstar": k.G_star, "H": k.H, "L": k.L}[which]
    return complex(fn(z, w))


def cmd_kernel(domain, opts, which, z, w):
    from .kernels import KernelEvaluator

    for name, p, need in (("z", z, REGIONS[which][0]), ("w", w, REGIONS[which][1])):
        if need is None:
            continue
        closure = bool(domain.contains(p)) or domain.boundary_distance(p) <= 1e-12
        if need and not domain.contains(p):
            raise UsageError(f"{which} requires {name} inside the domain; got {name} = {p}")
        if not need and closure:
            raise UsageError(f"{which} requires {name} outside the closed domain; got {name} = {p}")
    k = KernelEvaluator(domain, nodes=opts["nodes"])
    value = _kernel_value(k, which, z, w)
    # error estimate: the boundary-integral route with twice the nodes
    ref = KernelEvaluator(domain, backend="quadrature", nodes=2 * opts["nodes"])
    err = abs(_kernel_value(ref, which, z, w) - value)
    out = {"kernel": which, "z": [z.real, z.imag], "w": [w.real, w.imag],
           "value": [value.real, value.imag], "backend": k.backend, "error_estimate": err}
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _parse_sources(opts):
    masses = []
    for item in opts["source"] or []:
        loc, _, weight = str(item).partition(":")
        try:
            masses.append((_complex(loc), _complex(weight) if weight else math.pi))
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"bad --source {item!r}: {exc}") from exc
    poly = {}
    for item in opts["poly"] or []:
        parts = str(item).split(",")
        try:
            j, k, c = int(parts[0]), int(parts[1]), _complex(parts[2])
        except (IndexError, ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"bad --poly {item!r}; expected J,K,C") from exc
        if j < 0 or k < 0 or len(parts) != 3:
            raise UsageError(f"bad --poly {item!r}; expected J,K,C")
        poly[(j, k)] = poly.get((j, k), 0) + c
    return hb.HElement(masses=tuple(masses), poly=poly)


def _parse_grid(opts, domain):
    R = domain.outer_radius
    if opts["grid"] is None:
        return FieldGrid.build(domain, -2 * R, 2 * R, -2 * R, 2 * R, 0.05 * R)
    vals = opts["grid"] if isinstance(opts["grid"], list) else _floats([opts["grid"]])
    if len(vals) != 5:
        raise UsageError("--grid needs X0,X1,Y0,Y1,H")
    try:
        return FieldGrid.build(domain, *map(float, vals))
    except ValueError as exc:
        raise UsageError(f"bad --grid: {exc}") from exc


def cmd_field(domain, opts):
    mu = _parse_sources(opts)
    if not mu.masses and not mu.poly:
        mu = hb.HElement.point(domain.anchor, math.pi)
    try:
        check_sources(mu, domain)
    except ModelError as exc:
        raise UsageError(str(exc)) from exc
    grid = _parse_grid(opts, domain)
    field = velocity_field(mu, domain, grid)
    path = os.path.join(_out_dir(opts), "field.csv")
    write_csv(path, grid, field)
    n = int(np.count_nonzero(~grid.mask))
    print(f"wrote {n} samples to {path}")
    if min(field.shape) >= 3:
        dc = div_curl_check(field, grid.h)
        print(f"div/curl residual max|2 df/dzbar| = {dc.residual:.3e} "
              f"({dc.checked} stencils, {dc.skipped} skipped)")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        opts = resolve_options(args)
        domain = make_domain(opts)
        if args.command == "moments":
            return cmd_moments(domain, opts)
        if args.command == "verify":
            return cmd_verify(domain, opts)
        if args.command == "kernel":
            return cmd_kernel(domain, opts, args.which, args.z, args.w)
        return cmd_field(domain, opts)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, np.linalg.LinAlgError, FloatingPointError, OSError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INFRA


if __name__ == "__main__":
    sys.exit(main())
