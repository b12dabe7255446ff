"""Command-line front end: ``loewnerball <subcommand> ...``.

Exit status 0 on success, 1 on invalid input, 2 when a numerical check
(convergence, trajectory stability) fails. Reports go to ``--output`` or
stdout and stay valid JSON/CSV on failure paths.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import bounds, herglotz, loewner
from .errors import ConvergenceError, NumericalError, ValidationError
from .powerseries import DEFAULT_DEGREE, align_phase, rotate
from .serialize import (SchemaError, canonical_dumps, complex_record, dumps_field, dumps_map,
                        field_from_dict, loads)

DEFAULTS = {"N": DEFAULT_DEGREE, "T": loewner.DEFAULT_HORIZON, "step": loewner.DEFAULT_STEP,
            "tol": loewner.DEFAULT_CONV_TOL}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def load_field(source: str, degree: int = DEFAULT_DEGREE) -> herglotz.HerglotzField:
    """A built-in name (``linear``, ``koebe``, ``pure_z2m:m``) or a field JSON file."""
    if source == "linear":
        return herglotz.linear_field(degree)
    if source == "koebe":
        return bounds.extremal_field("koebe", degree=degree)
    if source.startswith("pure_z2m:"):
        try:
            m = int(source.split(":", 1)[1])
        except ValueError:
            raise SchemaError(f"bad built-in field {source!r}; expected pure_z2m:<m>") from None
        return bounds.extremal_field("pure_z2m", m, degree)
    path = Path(source)
    if not path.exists():
        raise SchemaError(f"field {source!r} is neither a built-in name nor an existing file")
    return field_from_dict(loads(path.read_text()), where=source)


def _complex_list(text: str, n: int, what: str) -> list[complex]:
    try:
        vals = [complex(p.strip().replace(" ", "")) for p in text.split(",")]
    except ValueError:
        raise SchemaError(f"{what}: cannot parse {text!r} as {n} complex numbers") from None
    if len(vals) != n:
        raise SchemaError(f"{what}: expected {n} comma-separated values, got {len(vals)}")
    return vals


def _m_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise SchemaError(f"--m: expected 'a..b' or a comma list, got {text!r}") from None


def _align_target(text: str) -> tuple[int, tuple[int, int]]:
    try:
        j, alpha = text.split(":")
        a1, a2 = (int(a) for a in alpha.split(","))
        return int(j), (a1, a2)
    except ValueError:
        raise SchemaError(f"--align: expected 'j:a1,a2', got {text!r}") from None


def _grid(args) -> herglotz.SampleGrid:
    return herglotz.SampleGrid(args.radial, args.angular, args.phases, r_max=args.r_max)


def _points(args) -> np.ndarray:
    if args.point:
        return np.array([_complex_list(p, 2, "--point") for p in args.point])
    return _grid(args).points()


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --- subcommands --------------------------------------------------------------

def cmd_check_field(args):
    G = load_field(args.field, args.degree)
    v = herglotz.membership_test(G, args.radial, args.angular, args.tol, args.phases, args.r_max)
    report = {"passed": bool(v.passed), "worst_value": v.worst_value, "piece": v.piece,
              "witness": None if v.witness is None else [complex_record(c) for c in v.witness]}
    return canonical_dumps(report), 0


def cmd_decouple(args):
    G = load_field(args.field, args.degree)
    return dumps_field(herglotz.decouple(G, args.k1, args.k2)), 0


def cmd_slice(args):
    G = load_field(args.field, args.degree)
    v = np.array(_complex_list(args.v, 2, "--v"))
    p = herglotz.slice(G, v, args.order, t=args.t)
    cb = herglotz.caratheodory_coeff_bound(p)
    toe = [herglotz.caratheodory_toeplitz(p, m, args.tol) for m in range(1, p.order + 1)]
    report = {"c": [complex_record(c) for c in p.c],
              "coeff_bound": {"passed": cb.passed, "violations": cb.violations,
                              "boundary": cb.boundary, "diagnostic": cb.diagnostic},
              "toeplitz": [{"m": m, "passed": r.passed, "min_eigenvalue": r.min_eigenvalue}
                           for m, r in enumerate(toe, start=1)]}
    return canonical_dumps(report), 0


def cmd_evolve(args):
    G = load_field(args.field, args.degree)
    pts = _points(args)
    times = np.linspace(args.s, args.T, args.samples + 1)
    rows = []
    w = pts
    states = [w]
    for a, b in zip(times[:-1], times[1:]):
        w = loewner.integrate_point(G, w, a, b, args.step)
        states.append(w)
    for i in range(len(pts)):
        for t, st in zip(times, states):
            z1, z2 = complex(st[i, 0]), complex(st[i, 1])
            rows.append([i, repr(float(t)), repr(z1.real), repr(z1.imag), repr(z2.real), repr(z2.imag)])
    return _csv_text(["point", "t", "re_z1", "im_z1", "re_z2", "im_z2"], rows), 0


def cmd_coeffs(args):
    G = load_field(args.field, args.degree)
    N = args.N if args.N is not None else G.truncation_degree
    if args.format == "csv":
        rec = loewner.coeff_evolution(G, N, 0.0, args.T, args.step)
        return rec.to_csv(), 0
    try:
        res = loewner.parametric_map_report(G, N, args.T, args.step, args.tol)
        f, status, error = res.map, 0, None
        diag = {"T": args.T, "step": args.step, "cauchy_difference": res.cauchy_difference,
                "tail_estimate": res.tail_estimate, "conv_tol": args.tol,
                "worst": {"component": res.worst[0], "alpha": list(res.worst[1])}}
    except ConvergenceError as exc:
        rec = loewner.coeff_evolution(G, N, 0.0, args.T, args.step, time_grid=[0.0, args.T])
        f, status, error = rec.rescaled_at(1), 2, str(exc)
        diag = {"T": args.T, "step": args.step, "conv_tol": args.tol,
                "worst": {"component": exc.worst[0], "alpha": list(exc.worst[1])}}
    if args.align:
        j, alpha = _align_target(args.align)
        th = align_phase(f, j, alpha)
        f = rotate(f, *th)
        diag["rotation"] = list(th)
    if error:
        diag["error"] = error
    return dumps_map(f, diagnostics=diag), status


def cmd_bounds(args):
    records = bounds.bound_table(_m_range(args.m), args.resolution)
    if args.format == "csv":
        keys = ["m", "closed_form", "numeric", "x_opt", "y_opt", "abs_err"]
        return _csv_text(keys, [[repr(r[k]) for k in keys] for r in records]), 0
    return canonical_dumps(records), 0


def cmd_squeeze(args):
    G = load_field(args.field, args.degree)
    margin = loewner.squeezing_margin(G, _grid(args)).margin
    if args.point:
        pts = _points(args)
    else:
        pts = herglotz.SampleGrid(4, 4, 4, r_max=args.r_max).points()
    pts = pts[np.linalg.norm(pts, axis=-1) > 0]
    rep = loewner.squeezing_equiv_check(G, args.a, args.s, args.t, pts, args.step)
    report = {"a": args.a, "s": args.s, "t": args.t, "margin": margin,
              "margin_ok": margin <= -args.a,
              "violations": [{"s": s, "t": t, "z": [complex_record(c) for c in z]}
                             for s, t, z in rep.ratio_violations],
              "n_samples": int(len(pts))}
    report["squeezing"] = report["margin_ok"] and not report["violations"]
    return canonical_dumps(report), 0


def cmd_shear_radius(args):
    a = _complex_list(args.a, 1, "--a")[0]
    return canonical_dumps({"a": complex_record(a), "radius": bounds.shear_radius(a)}), 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loewnerball", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, field=True):
        p.add_argument("-o", "--output", help="write the report here instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if field:
            p.add_argument("--field", required=True,
                           help="field JSON file or built-in: linear, koebe, pure_z2m:<m>")
            p.add_argument("--degree", type=int, default=DEFAULT_DEGREE,
                           help="truncation degree for built-in fields")

    def grid(p, radial=20, angular=16, phases=24, r_max=0.99):
        p.add_argument("--radial", type=int, default=radial)
        p.add_argument("--angular", type=int, default=angular)
        p.add_argument("--phases", type=int, default=phases)
        p.add_argument("--r-max", type=float, default=r_max)

    p = sub.add_parser("check-field", help="sampled membership test")
    common(p)
    grid(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_check_field)

    p = sub.add_parser("decouple", help="harmonic decoupling filter")
    common(p)
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--k2", type=int, required=True)
    p.set_defaults(func=cmd_decouple)

    p = sub.add_parser("slice", help="slice function and Caratheodory tests")
    common(p)
    p.add_argument("--v", required=True, help="unit vector 'v1,v2' (complex literals allowed)")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("evolve", help="RK4 trajectories of sample points (CSV)")
    common(p)
    grid(p, 3, 3, 4, 0.5)
    p.add_argument("--point", action="append", help="start point 'z1,z2'; repeatable")
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--T", type=float, default=DEFAULTS["T"])
    p.add_argument("--step", type=float, default=DEFAULTS["step"])
    p.add_argument("--samples", type=int, default=20, help="number of output time intervals")
    p.set_defaults(func=cmd_evolve, format="csv")

    p = sub.add_parser("coeffs", help="coefficients of the parametric-representation map")
    common(p)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--T", type=float, default=DEFAULTS["T"])
    p.add_argument("--step", type=float, default=DEFAULTS["step"])
    p.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    p.add_argument("--align", help="rotate so coefficient 'j:a1,a2' is real positive")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("bounds", help="sharp bounds u_m, closed form vs grid")
    common(p, field=False)
    p.add_argument("--m", default="2..6")
    p.add_argument("--resolution", type=int, default=10_000)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("squeeze", help="exponential squeezing margin and ratio check")
    common(p)
    grid(p)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--point", action="append",
                   help="start point 'z1,z2' for the ratio check; repeatable (default: a 4x4x4x4 grid)")
    p.add_argument("--step", type=float, default=DEFAULTS["step"])
    p.set_defaults(func=cmd_squeeze)

    p = sub.add_parser("shear-radius", help="r(f) for f = (z1 + a z2^2, z2)")
    common(p, field=False)
    p.add_argument("--a", required=True, help="complex shear coefficient")
    p.set_defaults(func=cmd_shear_radius)
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, status = args.func(args)
    except (ValidationError, NumericalError) as exc:
        status = 1 if isinstance(exc, ValidationError) else 2
        err = {"error": str(exc), "kind": type(exc).__name__}
        text = _csv_text(list(err), [list(err.values())]) if args.format == "csv" else canonical_dumps(err)
        print(f"error: {exc}", file=sys.stderr)
    _emit(text, args.output)
    return status


if __name__ == "__main__":
    sys.exit(main())
