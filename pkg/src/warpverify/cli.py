"""Command-line front end.

Commands
--------
relation solve   --m M --beta B [--variant published|rederived]
relation sweep   --m A..B --beta B1,B2,... [--variant ...] [--format csv|json]
verify           --m M --beta B [--variant ...] [--tol-* ...]
curvature        --model disk|halfplane --at x,y
pde solve        --beta B --rmax R --h H --bc NAME --out PATH
pde converge     --beta B --h H1,H2,... [--rmax R]

Exit codes: 0 success/pass, 1 usage error, 2 no admissible root,
3 verification fail, 4 solver non-convergence.

Output is deterministic: identical argv produce byte-identical stdout,
modulo the version banner which `--quiet` suppresses.  JSON floats carry
17 significant digits, human-readable text 12.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .einstein import WarpParams, residual_report, vertical_ricci_coeff
from .errors import AdmissibilityError, SolverError, ToolkitError
from .compatibility import (
    build_metric, integrate_s, pq_from_params, strip_samples,
    verify_pseudospherical,
)
from .geometry2d import (
    Point2, coordinate_u, gauss_curvature, grad_norm_sq, laplace_beltrami,
    poincare_disk, poincare_half_plane, rescale,
)
from .relation import (
    REDERIVED, VARIANTS, RootReport, existence_sweep, relation_poly,
    solve_lambda,
)
from . import screened_pde as pde

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_ADMISSIBLE = 2
EXIT_VERIFY_FAIL = 3
EXIT_SOLVER = 4

DEFAULT_TOL_RELATION = 1e-10
DEFAULT_TOL_COMPAT = 1e-8
DEFAULT_TOL_CURVATURE_FD = 1e-5
DEFAULT_TOL_CURVATURE_EXACT = 1e-10
DEFAULT_TOL_EINSTEIN = 1e-6


# -- deterministic serialization ------------------------------------------------


def _json_scalar(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    # escape via the stdlib, which handles control characters
    import json
    return json.dumps(x)


def to_json(obj, indent: int = 0) -> str:
    """Tiny JSON emitter: insertion-ordered keys, floats at 17 digits.

    The stdlib encoder always prints floats with repr(); the fixed
    17-significant-digit format here keeps reports stable and lossless.
    """
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{_json_scalar(str(k))}: {to_json(v, indent + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return _json_scalar(obj)


def fmt_text(x: float) -> str:
    return format(x, ".12g")


# -- report structures -----------------------------------------------------------


def root_report_dict(report: RootReport) -> dict:
    poly = report.poly
    return {
        "m": int(poly.m) if float(poly.m).is_integer() else float(poly.m),
        "beta": float(poly.beta),
        "variant": poly.provenance,
        "coefficients": {"a2": float(poly.a2), "a1": float(poly.a1),
                         "a0": float(poly.a0)},
        "degenerate_linear": report.degenerate_linear,
        "formal_extrapolation": report.formal_extrapolation,
        "roots": [
            {
                "value": adm.root,
                "multiplicity": mult,
                "backsub_residual": res,
                "lambda_plus_beta_negative": adm.lambda_plus_beta_negative,
                "K_negative": adm.K_negative,
                "admissible": adm.overall,
                "K": adm.K,
            }
            for adm, mult, res in zip(report.admissibility,
                                      report.multiplicities,
                                      report.backsub_residuals)
        ],
        "admissible_roots": report.admissible_roots,
    }


@dataclass(frozen=True)
class VerifyReport:
    """Aggregated certificate for one (m, beta) parameter pair."""

    m: int
    beta: float
    variant: str
    lam: float
    K: float
    relation_residual: float
    compat_max_residual: float
    curvature_max_abs_k_plus_1: float
    einstein_max_tensor_residual: float
    einstein_max_contracted_residual: float
    einstein_max_scalar_residual: float
    vertical_ricci_max_error: float
    tolerances: dict
    verdict: str

    def to_dict(self) -> dict:
        return {
            "params": {"m": self.m, "beta": self.beta, "variant": self.variant,
                       "lambda": self.lam, "K": self.K},
            "relation_residual": self.relation_residual,
            "compat_max_residual": self.compat_max_residual,
            "curvature_max_abs_k_plus_1": self.curvature_max_abs_k_plus_1,
            "einstein_max_tensor_residual": self.einstein_max_tensor_residual,
            "einstein_max_contracted_residual": self.einstein_max_contracted_residual,
            "einstein_max_scalar_residual": self.einstein_max_scalar_residual,
            "vertical_ricci_max_error": self.vertical_ricci_max_error,
            "tolerances": dict(self.tolerances),
            "verdict": self.verdict,
        }


def run_verification(
    m: int,
    beta: float,
    variant: str = REDERIVED,
    tol_relation: float = DEFAULT_TOL_RELATION,
    tol_compat: float = DEFAULT_TOL_COMPAT,
    tol_curvature: float = DEFAULT_TOL_CURVATURE_FD,
    tol_einstein: float = DEFAULT_TOL_EINSTEIN,
    strip: tuple[float, float] = (0.5, 4.0),
    strip_shape: tuple[int, int] = (32, 8),
) -> VerifyReport:
    """Full pipeline for one parameter pair.

    Solves the relation, builds the profile pair at the admissible root,
    integrates s, constructs the chart metric, certifies curvature -1
    (finite differences), and evaluates all three residuals of the
    warped-product system on the base metric recovered by undoing the
    unit-curvature rescaling, where the warping function is the first
    chart coordinate.

    Raises AdmissibilityError when the relation has no admissible root.
    """
    report = solve_lambda(relation_poly(m, beta, variant))
    admissible = report.admissible_roots
    if not admissible:
        extra = ""
        if m < 2:
            extra = " (fiber dimension m < 2: the profile normalization divides by m - 1)"
        raise AdmissibilityError(
            f"no admissible root for m = {m}, beta = {beta}, variant = {variant}{extra}",
            reason="fiber_dimension" if m < 2 else "no_admissible_root")
    lam = admissible[0]
    idx = report.roots.index(lam)
    relation_residual = report.backsub_residuals[idx]
    K = lam + m * beta / 2.0

    pq = pq_from_params(m, lam, beta)
    nu, nv = strip_shape
    samples = strip_samples(strip[0], strip[1], nu)

    pseudo = verify_pseudospherical(pq, samples, tol=tol_curvature,
                                    compat_tol=tol_compat, h_samples=nv,
                                    deriv="fd")

    # Base metric with curvature K: undo the unit-curvature rescaling.
    s = integrate_s(pq, samples[0], samples[-1])
    g_unit = build_metric(pq, s)
    g_base = rescale(g_unit, 1.0 / (-K))
    f = coordinate_u()
    wp = WarpParams.ricci_flat_fiber(m=m, lam=lam, beta=beta)
    h_coords = [-1.0 + 2.0 * j / (nv - 1) for j in range(nv)]
    points = [Point2(t, hc) for t in samples for hc in h_coords]
    res = residual_report(g_base, f, wp, points)

    ricci_err = 0.0
    for p in points:
        coeff = vertical_ricci_coeff(
            f.val(p),
            laplace_beltrami(g_base, f, p),
            grad_norm_sq(g_base, f, p),
            m)
        ricci_err = max(ricci_err, abs(coeff + lam))

    tolerances = {
        "relation": tol_relation,
        "compat": tol_compat,
        "curvature": tol_curvature,
        "einstein": tol_einstein,
    }
    passed = (
        relation_residual <= tol_relation
        and pseudo.max_abs_compat_residual <= tol_compat
        and pseudo.max_abs_curvature_plus_one <= tol_curvature
        and res.worst() <= tol_einstein
    )
    return VerifyReport(
        m=m, beta=beta, variant=variant, lam=lam, K=K,
        relation_residual=relation_residual,
        compat_max_residual=pseudo.max_abs_compat_residual,
        curvature_max_abs_k_plus_1=pseudo.max_abs_curvature_plus_one,
        einstein_max_tensor_residual=res.tensor_residual.max_abs(),
        einstein_max_contracted_residual=res.contracted_residual,
        einstein_max_scalar_residual=res.scalar_constraint_residual,
        vertical_ricci_max_error=ricci_err,
        tolerances=tolerances,
        verdict="pass" if passed else "fail",
    )


# -- CSV emitters ----------------------------------------------------------------

SWEEP_CSV_HEADER = "m,beta,variant,a2,a1,a0,root1,root2,admissible_root,K,exists"


def sweep_csv_lines(records) -> list[str]:
    lines = [SWEEP_CSV_HEADER]
    for rec in records:
        roots = list(rec.roots) + ["", ""]
        cells = [
            str(rec.m),
            format(rec.beta, ".17g"),
            rec.variant,
            format(rec.a2, ".17g"),
            format(rec.a1, ".17g"),
            format(rec.a0, ".17g"),
            format(roots[0], ".17g") if roots[0] != "" else "",
            format(roots[1], ".17g") if roots[1] != "" else "",
            format(rec.admissible_root, ".17g") if rec.admissible_root is not None else "",
            format(rec.K, ".17g") if rec.K is not None else "",
            rec.exists,
        ]
        lines.append(",".join(cells))
    return lines


def sweep_json(records) -> dict:
    return {
        "rows": [
            {
                "m": rec.m,
                "beta": rec.beta,
                "variant": rec.variant,
                "a2": rec.a2, "a1": rec.a1, "a0": rec.a0,
                "roots": list(rec.roots),
                "admissible_root": rec.admissible_root,
                "K": rec.K,
                "exists": rec.exists,
            }
            for rec in records
        ]
    }


def convergence_json(beta, r_max, rows) -> dict:
    return {
        "beta": beta,
        "r_max": r_max,
        "rows": [
            {"h": r.h, "max_error": r.max_error, "observed_rate": r.observed_rate}
            for r in rows
        ],
    }


# -- argument parsing -------------------------------------------------------------


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 1, not 2."""

    def error(self, message):
        raise _UsageError(message)


def _parse_m_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    m = int(text)
    return m, m


def _parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x != ""]


def _parse_point(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'x,y', got {text!r}")
    return float(parts[0]), float(parts[1])


BOUNDARY_CATALOG = {
    "zero": lambda x, y: 0.0,
    "one": lambda x, y: 1.0,
    "coshdist": pde.coshdist_exact,
    "angular": lambda x, y: math.sin(2.0 * math.atan2(y, x)),
}


def build_parser() -> _Parser:
    parser = _Parser(prog="warpverify", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true",
                        help="suppress the version banner")

    rel = sub.add_parser("relation", help="quadratic relation tools")
    rel_sub = rel.add_subparsers(dest="subcommand", required=True)

    rs = rel_sub.add_parser("solve", parents=[common],
                            help="solve the relation for one (m, beta)")
    rs.add_argument("--m", type=int, required=True)
    rs.add_argument("--beta", type=float, required=True)
    rs.add_argument("--variant", choices=VARIANTS, default=REDERIVED)

    rw = rel_sub.add_parser("sweep", parents=[common],
                            help="existence sweep over m and beta")
    rw.add_argument("--m", type=_parse_m_range, required=True,
                    metavar="A..B", help="integer range, e.g. 2..10")
    rw.add_argument("--beta", type=_parse_floats, required=True,
                    metavar="LIST", help="comma-separated betas")
    rw.add_argument("--variant", choices=VARIANTS, default=REDERIVED)
    rw.add_argument("--format", choices=("csv", "json"), default="csv")

    vf = sub.add_parser("verify", parents=[common],
                        help="full certification pipeline for one (m, beta)")
    vf.add_argument("--m", type=int, required=True)
    vf.add_argument("--beta", type=float, required=True)
    vf.add_argument("--variant", choices=VARIANTS, default=REDERIVED)
    vf.add_argument("--tol-relation", type=float, default=DEFAULT_TOL_RELATION)
    vf.add_argument("--tol-compat", type=float, default=DEFAULT_TOL_COMPAT)
    vf.add_argument("--tol-curvature", type=float, default=DEFAULT_TOL_CURVATURE_FD)
    vf.add_argument("--tol-einstein", type=float, default=DEFAULT_TOL_EINSTEIN)

    cv = sub.add_parser("curvature", parents=[common],
                        help="Gaussian curvature of a model metric")
    cv.add_argument("--model", choices=("disk", "halfplane"), required=True)
    cv.add_argument("--at", type=_parse_point, required=True, metavar="x,y")
    cv.add_argument("--format", choices=("text", "json"), default="text")

    pd = sub.add_parser("pde", help="screened Poisson solver")
    pd_sub = pd.add_subparsers(dest="subcommand", required=True)

    ps = pd_sub.add_parser("solve", parents=[common],
                           help="Dirichlet solve on the subdisk")
    ps.add_argument("--beta", type=float, required=True)
    ps.add_argument("--rmax", type=float, default=0.8)
    ps.add_argument("--h", type=float, default=0.02)
    ps.add_argument("--bc", choices=sorted(BOUNDARY_CATALOG), default="zero")
    ps.add_argument("--out", required=True, help="CSV output path")

    pc = pd_sub.add_parser("converge", parents=[common],
                           help="manufactured-solution convergence study")
    pc.add_argument("--beta", type=float, required=True)
    pc.add_argument("--h", type=_parse_floats, required=True, metavar="LIST")
    pc.add_argument("--rmax", type=float, default=0.8)
    pc.add_argument("--format", choices=("text", "csv", "json"), default="text")

    return parser


# -- command handlers --------------------------------------------------------------


def _banner(args, out):
    if not getattr(args, "quiet", False):
        out.write(f"warpverify {__version__}\n")


def _cmd_relation_solve(args, out) -> int:
    report = solve_lambda(relation_poly(args.m, args.beta, args.variant))
    out.write(to_json(root_report_dict(report)) + "\n")
    if not report.admissible_roots:
        if args.m < 2:
            sys.stderr.write(
                f"no admissible root: fiber dimension m = {args.m} < 2 "
                "(the profile normalization divides by m - 1)\n")
        else:
            sys.stderr.write(
                f"no admissible root for m = {args.m}, beta = {args.beta}\n")
        return EXIT_NO_ADMISSIBLE
    return EXIT_OK


def _cmd_relation_sweep(args, out) -> int:
    records = existence_sweep(args.m, args.beta, args.variant)
    if args.format == "csv":
        out.write("\n".join(sweep_csv_lines(records)) + "\n")
    else:
        out.write(to_json(sweep_json(records)) + "\n")
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    try:
        report = run_verification(
            args.m, args.beta, args.variant,
            tol_relation=args.tol_relation,
            tol_compat=args.tol_compat,
            tol_curvature=args.tol_curvature,
            tol_einstein=args.tol_einstein,
        )
    except AdmissibilityError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_NO_ADMISSIBLE
    out.write(to_json(report.to_dict()) + "\n")
    return EXIT_OK if report.verdict == "pass" else EXIT_VERIFY_FAIL


def _cmd_curvature(args, out) -> int:
    g = poincare_disk() if args.model == "disk" else poincare_half_plane()
    x, y = args.at
    k = gauss_curvature(g, Point2(x, y))
    if args.format == "json":
        out.write(to_json({"model": args.model, "at": [x, y],
                           "gauss_curvature": k}) + "\n")
    else:
        out.write(f"K({fmt_text(x)}, {fmt_text(y)}) = {fmt_text(k)}\n")
    return EXIT_OK


def _cmd_pde_solve(args, out) -> int:
    spec = pde.GridSpec(beta=args.beta, r_max=args.rmax, h=args.h,
                        boundary=BOUNDARY_CATALOG[args.bc])
    field = pde.assemble_and_solve(spec)
    pde.write_grid_csv(field, args.out)
    res = pde.residual_field(field, spec)
    n_int = int(field.interior_mask.sum())
    out.write(f"interior nodes: {n_int}\n")
    out.write(f"max residual: {fmt_text(res)}\n")
    out.write(f"grid written to {args.out}\n")
    return EXIT_OK


def _cmd_pde_converge(args, out) -> int:
    base = pde.manufactured_spec(args.beta, r_max=args.rmax,
                                 h=max(args.h))
    rows = pde.convergence_study(base, args.h, pde.coshdist_exact)
    if args.format == "json":
        out.write(to_json(convergence_json(args.beta, args.rmax, rows)) + "\n")
    elif args.format == "csv":
        out.write("h,max_error,observed_rate\n")
        for r in rows:
            rate = format(r.observed_rate, ".17g") if r.observed_rate is not None else ""
            out.write(f"{format(r.h, '.17g')},{format(r.max_error, '.17g')},{rate}\n")
    else:
        out.write("h            max_error       observed_rate\n")
        for r in rows:
            rate = fmt_text(r.observed_rate) if r.observed_rate is not None else "-"
            out.write(f"{fmt_text(r.h):<12} {fmt_text(r.max_error):<15} {rate}\n")
    return EXIT_OK


_HANDLERS = {
    ("relation", "solve"): _cmd_relation_solve,
    ("relation", "sweep"): _cmd_relation_sweep,
    ("verify", None): _cmd_verify,
    ("curvature", None): _cmd_curvature,
    ("pde", "solve"): _cmd_pde_solve,
    ("pde", "converge"): _cmd_pde_converge,
}


def run(argv: Sequence[str], out=None) -> int:
    """Dispatch one command line; returns the process exit code."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, argparse.ArgumentError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE

    handler = _HANDLERS[(args.command, getattr(args, "subcommand", None))]
    _banner(args, out)
    try:
        return handler(args, out)
    except SolverError as exc:
        sys.stderr.write(f"solver failure: {exc}\n")
        return EXIT_SOLVER
    except ToolkitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
