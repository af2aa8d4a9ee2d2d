"""Command-line front end: ``qpl verify | bracket | demo | crosssection``.

Exit status is 0 when every check passes, 1 when a check fails and 2 on
usage, parse or solver errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from qpl.errors import QPLError, WordParseError
from qpl.report import FORMATS, SuiteConfig, parse_tolerances, render, rows_to_csv

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _angles(text):
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad angle list {text!r}") from exc


# --------------------------------------------------------------------------
# verify


def _config_from_args(args):
    base = SuiteConfig(args.suite)
    if args.config:
        base = SuiteConfig.from_text(Path(args.config).read_text(encoding="utf-8"))
        if args.suite and args.suite != base.suite:
            raise ValueError(f"suite {args.suite!r} conflicts with config suite {base.suite!r}")
    for key in ("group", "seed", "points", "out", "format"):
        val = getattr(args, key)
        if val is not None:
            setattr(base, key, val)
    if args.tol:
        base.tol = {**base.tol, **parse_tolerances(args.tol)}
    return base


def cmd_verify(args):
    from qpl.suites import SUITES, run_suite

    if not args.suite and not args.config:
        raise ValueError("give a suite name or --config")
    config = _config_from_args(args)
    if config.suite not in SUITES:
        raise ValueError(f"unknown suite {config.suite!r}; choose from {', '.join(SUITES)}")
    if config.format not in FORMATS:
        raise ValueError(f"unknown format {config.format!r}")
    if args.save_config:
        Path(args.save_config).write_text(config.to_text(), encoding="utf-8")
    report = run_suite(config)
    _emit(render(report, config.format), config.out)
    if args.dump:
        Path(args.dump).write_text(sample_dump(config), encoding="utf-8")
    if config.out:
        s = report.summary()
        print(f"{config.suite} on {config.group}: {s['checks'] - s['failed']}/{s['checks']} "
              f"checks pass, max residual {s['max_residual']:.2e}")
    return EXIT_OK if report.passed else EXIT_FAIL


def sample_dump(config):
    """CSV (suite, point-seed, field, index-tuple, value) of P and phi_M on the group space."""
    from qpl.lie import build_model
    from qpl.qp_spaces import canonical_group_space

    qp = canonical_group_space(build_model(config.group))
    fields = {"P": qp.P, "phi_M": qp.phi_M()}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "point_seed", "field", "index", "value"])
    for k in range(config.points):
        seed = config.seed * 100003 + k
        m = qp.random_point(np.random.default_rng(seed))
        for name, f in fields.items():
            a = f(m)
            for idx in itertools.combinations(range(qp.space.D), a.ndim):
                w.writerow([config.suite, seed, name, "-".join(map(str, idx)),
                            f"{a[idx]:.17g}"])
    return buf.getvalue()


# --------------------------------------------------------------------------
# bracket


def _point_json(m):
    return [{"re": np.real(x).tolist(), "im": np.imag(x).tolist()} for x in m]


def bracket_result(genus, boundary, group, w1, w2, seed, variant="qu", class_angles=None):
    """Reduced bracket of Re tr(w1), Re tr(w2) at a seeded point of the moment level set."""
    from qpl.lie import build_model
    from qpl.moduli import (
        InvariantFunction, SurfaceData, build_rep_variety, project_to_level_set,
        tangency_and_rank_checks,
    )
    from qpl.moduli.reduction import bracket
    from qpl.rmatrix import base_from_angles

    model = build_model(group)
    rv = build_rep_variety(SurfaceData(genus, boundary), model, variant)
    F1, F2 = InvariantFunction.from_text(rv, w1), InvariantFunction.from_text(rv, w2)
    rng = np.random.default_rng(seed)
    c0 = None if class_angles is None else base_from_angles(model, class_angles)
    start = rv.random_point(rng, 0.5)
    lp = project_to_level_set(rv, start, c0) if variant == "qu" else None
    m = lp.point if lp is not None else start
    d1, d2 = F1.differential(m), F2.differential(m)
    value = bracket(rv.qp, d1, d2, m)
    fd_value = bracket(rv.qp, F1.fd_differential(m), F2.fd_differential(m), m)
    return {
        "surface": {"genus": genus, "boundary": boundary},
        "group": group,
        "variant": variant,
        "words": [w1, w2],
        "point": {
            "seed": seed,
            "solver_iterations": None if lp is None else lp.iterations,
            "level_distance": None if lp is None else lp.distance,
            "locally_free": None if lp is None else lp.locally_free,
            "value": _point_json(m),
        },
        "bracket": value,
        "certificates": {
            "fd_oracle": abs(value - fd_value),
            "invariance": max(F1.invariance_residual(m, rng), F2.invariance_residual(m, rng)),
            "antisymmetry": abs(value + bracket(rv.qp, d2, d1, m)),
            "tangency": tangency_and_rank_checks(rv.qp, d1, m)["tangency"],
        },
    }


BRACKET_TOL = {"fd_oracle": 1e-8, "invariance": 1e-9, "antisymmetry": 1e-12,
               "tangency": 1e-9}


def cmd_bracket(args):
    res = bracket_result(args.genus, args.boundary, args.group, args.w1, args.w2, args.seed,
                         args.variant, args.class_angles)
    _emit(json.dumps(res, indent=2, sort_keys=True) + "\n", args.out)
    ok = all(res["certificates"][k] <= tol for k, tol in BRACKET_TOL.items())
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# demo and cross-section grids


def cmd_demo(args):
    from qpl.demo import cotangent_demo, format_demo

    res = cotangent_demo(args.x, args.nmax)
    if args.format == "json":
        _emit(json.dumps(res, indent=2) + "\n", args.out)
    else:
        _emit(format_demo(res), args.out)
    return EXIT_OK if res["monotone"] else EXIT_FAIL


GRID_TOL = {"quasi_poisson": 1e-7, "moment": 1e-7, "orthogonality": 1e-9, "tangency": 1e-9,
            "ev2": 1e-6}


def cmd_crosssection(args):
    from qpl.lie import build_model
    from qpl.qp_spaces import canonical_group_space, double_bold_DG
    from qpl.rmatrix import base_from_angles, make_slice
    from qpl.rmatrix.cross_section import cross_section, grid_rows
    from qpl.suites import default_base

    model = build_model(args.group)
    angles = default_base(model) if args.base is None else args.base
    sl = make_slice(model, base_from_angles(model, angles))
    parent = canonical_group_space(model) if args.parent == "G" else double_bold_DG(model)
    rng = np.random.default_rng(args.seed)
    cs = cross_section(parent, sl, rng=rng)
    rows = grid_rows(cs, rng, args.samples)
    eng = asdict(parent.space.engine)
    for row in rows:
        row.update({f"engine_{k}": v for k, v in eng.items()})
    if args.format == "json":
        text = json.dumps({"group": args.group, "base": angles, "radius": sl.radius,
                           "centralizer_dim": sl.h, "rows": rows}, indent=2) + "\n"
    else:
        text = rows_to_csv(rows)
    _emit(text, args.out)
    ok = all(row[k] <= tol for row in rows for k, tol in GRID_TOL.items())
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="qpl", description="Numerical quasi-Poisson laboratory.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a seeded verification suite")
    v.add_argument("suite", nargs="?", help="qp-core, fusion, rmatrix, cross-section, "
                   "omega-equivalence, cohomology or moduli")
    v.add_argument("--group", help="su2, su3, so3 or torusK (default su2)")
    v.add_argument("--seed", type=int)
    v.add_argument("--points", type=int)
    v.add_argument("--tol", action="append", metavar="K=V",
                   help="tolerance override for a check name, a class (closed, fd, fd2) or all")
    v.add_argument("--out")
    v.add_argument("--format", choices=FORMATS)
    v.add_argument("--config", help="key = value file mirroring these flags")
    v.add_argument("--save-config", help="write the effective config to this path")
    v.add_argument("--dump", help="write sampled field values as CSV")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bracket", help="reduced bracket of two trace words")
    b.add_argument("--genus", type=int, default=1)
    b.add_argument("--boundary", type=int, default=1)
    b.add_argument("--group", default="su2")
    b.add_argument("--w1", required=True)
    b.add_argument("--w2", required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--variant", choices=("qu", "free"), default="qu")
    b.add_argument("--class", dest="class_angles", type=_angles,
                   help="eigen-angles of the boundary class (default: identity)")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bracket)

    d = sub.add_parser("demo", help="numerical demos")
    d.add_argument("name", choices=("cotangent",))
    d.add_argument("--x", type=float, default=0.25)
    d.add_argument("--nmax", type=int, default=10**4)
    d.add_argument("--format", choices=("text", "json"), default="text")
    d.add_argument("--out")
    d.set_defaults(func=cmd_demo)

    c = sub.add_parser("crosssection", help="residual grid on a cross-section")
    c.add_argument("--group", default="su2")
    c.add_argument("--base", type=_angles, help="comma separated eigen-angles")
    c.add_argument("--parent", choices=("G", "DD"), default="G")
    c.add_argument("--samples", type=int, default=10)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--out")
    c.set_defaults(func=cmd_crosssection)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WordParseError as exc:
        print(f"qpl: parse error: {exc}", file=sys.stderr)
    except (QPLError, ValueError, OSError) as exc:
        print(f"qpl: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
