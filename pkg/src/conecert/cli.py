"""Command-line front end.

Exit codes: 0 property holds / certificate found, 1 property fails /
certified infeasible, 2 inconclusive, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import certificates, lmi, psd, qm
from .cones import read_cone_spec
from .counterexample import reproduce_counterexample
from .errors import (
    ConeCertError,
    DidNotConverge,
    InputError,
    InternalVerificationFailed,
    PreconditionFailed,
)
from .linalg import read_matrix
from .tolerances import LMI_TOL, default_tol

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    return obj


def dump_json(report, path=None):
    # repr-based float output round-trips every double exactly
    text = json.dumps(to_jsonable(report), indent=2, allow_nan=False)
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _fmt(x):
    return np.array2string(np.asarray(x), precision=6, suppress_small=False)


def _emit(args, report, lines):
    if args.format == "json":
        dump_json(report)
    else:
        print("\n".join(lines))
    if getattr(args, "out", None):
        dump_json(report, args.out)


# -- subcommands ---------------------------------------------------------------


def _predicate(args, matrix_attr, fn, label):
    M = read_matrix(getattr(args, matrix_attr))
    K = read_cone_spec(args.cone)
    rep = fn(M, K, args.tol)
    report = {"command": args.command, "tolerance": args.tol, **rep.to_dict()}
    lines = [f"{label}: {'yes' if rep.verdict else 'no'} (margin {rep.margin:.6g})"]
    for i, j, v in rep.violations:
        lines.append(f"  violation at generator pair ({i}, {j}): {v:.6g}")
    _emit(args, report, lines)
    return EXIT_OK if rep.verdict else EXIT_FAIL


def cmd_check_qm(args):
    return _predicate(args, "A", qm.is_qm, "quasi-monotone")


def cmd_check_diffusive(args):
    return _predicate(args, "D", qm.is_diffusive, "diffusive")


def cmd_check_nonneg(args):
    return _predicate(args, "B", qm.is_k_nonnegative, "K-nonnegative")


def cmd_stability(args):
    A = read_matrix(args.A)
    K = read_cone_spec(args.cone)
    wit = qm.stability_witness(A, K, args.tol)
    if wit is None:
        report = {"command": "stability", "tolerance": args.tol, "stable": False, "v": None}
        _emit(args, report, ["stable: no (no interior witness exists)"])
        return EXIT_FAIL
    report = {"command": "stability", "tolerance": args.tol, "stable": True, "v": wit.v,
              "margins_v": wit.margins_v, "margins_Av": wit.margins_Av}
    _emit(args, report, ["stable: yes", f"v = {_fmt(wit.v)}", f"-A v = {_fmt(-A @ wit.v)}"])
    return EXIT_OK


def _certificate(args, cert, K):
    report = certificates.certificate_report(cert, K, args.tol)
    lines = [f"{report['kind']} certificate: residual {cert.residual:.6g}"]
    for name in ("D", "Q"):
        if name in report:
            lines.append(f"{name} =\n{_fmt(report[name])}")
    lines += [f"  {c['name']}: {'ok' if c['verdict'] else 'FAILED'} ({c['margin']:.6g})"
              for c in report["checks"]]
    _emit(args, report, lines)
    return EXIT_OK if report["verdict"] else EXIT_INCONCLUSIVE


def cmd_lyapunov(args):
    K = read_cone_spec(args.cone)
    cert = certificates.lyapunov_diffusive(read_matrix(args.A), K, args.tol)
    return _certificate(args, cert, K)


def cmd_riccati(args):
    K = read_cone_spec(args.cone)
    cert = certificates.riccati_diffusive(read_matrix(args.A), read_matrix(args.B), K,
                                          args.tol, layout=args.layout)
    return _certificate(args, cert, K)


def cmd_d_stability(args):
    K = read_cone_spec(args.cone)
    ok = qm.d_stability(read_matrix(args.A), read_matrix(args.E), K, args.tol)
    _emit(args, {"command": "d-stability", "tolerance": args.tol, "EA_stable": ok},
          [f"E A stable: {'yes' if ok else 'no'}"])
    return EXIT_OK if ok else EXIT_FAIL


def _verdict_exit(v):
    return {"Feasible": EXIT_OK, "InfeasibleCertified": EXIT_FAIL}.get(v.status, EXIT_INCONCLUSIVE)


def _verdict_lines(v):
    lines = [f"verdict: {v.status}", f"  {v.message}",
             f"  best objective {v.best_value:.6g} at theta = {_fmt(v.best_theta)}",
             f"  certified lower bound {v.bound:.6g} (grid+Lipschitz {v.lipschitz_bound:.6g}, "
             f"cutting planes {v.cut_bound:.6g})",
             f"  resolution {v.resolution}, mesh {v.mesh:.6g}, Lipschitz constant {v.lipschitz:.6g}"]
    for name, M in v.matrices.items():
        lines.append(f"  {name} = diag({_fmt(np.diag(M))})")
    return lines


def cmd_common_riccati(args):
    if len(args.pairs) % 2:
        raise InputError("--pairs takes an even number of files: A1 B1 A2 B2 ...")
    mats = [read_matrix(p) for p in args.pairs]
    pairs = [lmi.SystemPair(mats[i], mats[i + 1]) for i in range(0, len(mats), 2)]
    v = lmi.minimize_convex_simplex(pairs, args.resolution, args.refine, args.layout, args.lmi_tol)
    checks = [{"name": f"pair {i + 1} Metzler/nonnegative", "verdict": True, "margin": None}
              for i in range(len(pairs))]
    if v.feasible:
        D, Q = v.matrices["D"], v.matrices["Q"]
        for i, p in enumerate(pairs, start=1):
            hi = certificates.sym_eig_extremes(
                certificates.assemble_block(p.A, p.B, D, Q, args.layout))[1]
            checks.append({"name": f"pair {i} block negative definite", "verdict": hi < 0,
                           "margin": -hi})
    report = {
        "inputs": {"pairs": args.pairs, "layout": args.layout, "resolution": args.resolution},
        "checks": checks,
        "verdict": v.status,
        "bound": v.bound,
        "mesh": v.mesh,
        "lipschitz": v.lipschitz,
        "tolerances": {"lmi_tol": args.lmi_tol},
        "details": v.to_dict(),
    }
    _emit(args, report, _verdict_lines(v))
    return _verdict_exit(v)


def cmd_common_lyapunov(args):
    mats = [read_matrix(p) for p in args.matrices]
    v = lmi.common_lyapunov_diag(mats, args.resolution, args.refine, args.lmi_tol)
    report = {"inputs": {"matrices": args.matrices, "resolution": args.resolution},
              "checks": [], "verdict": v.status, "bound": v.bound, "mesh": v.mesh,
              "lipschitz": v.lipschitz, "tolerances": {"lmi_tol": args.lmi_tol},
              "details": v.to_dict()}
    _emit(args, report, _verdict_lines(v))
    return _verdict_exit(v)


def cmd_reproduce(args):
    report = reproduce_counterexample(args.resolution, args.refine, args.tol, args.lmi_tol)
    lines = []
    for c in report["checks"]:
        margin = "n/a" if c["margin"] is None else f"{c['margin']:.6g}"
        lines.append(f"[{'pass' if c['verdict'] else 'fail'}] {c['name']} (margin {margin})")
    lines.append(f"verdict: {report['verdict']} (bound {report['bound']:.6g}, "
                 f"mesh {report['mesh']:.6g}, Lipschitz {report['lipschitz']:.6g})")
    _emit(args, report, lines)
    return EXIT_OK if report["verdict"] == "InfeasibleCertified" else EXIT_FAIL


def cmd_psd_demo(args):
    report = psd.non_diffusivity_demo()
    _emit(args, report, [
        f"<X, Y>     = {report['inner_XY']:g}",
        f"<X, A Y A> = {report['inner_X_AYA']:g}",
        f"A Y A =\n{_fmt(report['AYA'])}",
        "P_A maps an orthogonal pair in S^2_+ to a non-orthogonal one: not diffusive",
    ])
    return EXIT_OK


def cmd_verify(args):
    with open(args.certificate, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.certificate}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    ok, problems = certificates.reverify(data, tol=args.tol_override)
    _emit(args, {"command": "verify", "verdict": ok, "problems": problems},
          ["certificate re-verified" if ok else "certificate FAILED re-verification"]
          + [f"  {p}" for p in problems])
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="relative tolerance (default: $CONECERT_TOL or 1e-9)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-o", "--out", help="also write the JSON report to this file")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--resolution", type=int, default=60, help="simplex grid points per axis")
    grid.add_argument("--refine", type=int, default=60, help="cutting-plane refinement iterations")
    grid.add_argument("--lmi-tol", type=float, default=LMI_TOL, dest="lmi_tol")

    p = argparse.ArgumentParser(prog="conecert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, parents=(common,), **kw):
        sp = sub.add_parser(name, parents=list(parents), **kw)
        sp.set_defaults(func=fn)
        return sp

    for name, fn, flag in (("check-qm", cmd_check_qm, "-A"),
                           ("check-diffusive", cmd_check_diffusive, "-D"),
                           ("check-nonneg", cmd_check_nonneg, "-B"),
                           ("stability", cmd_stability, "-A"),
                           ("lyapunov", cmd_lyapunov, "-A")):
        sp = add(name, fn)
        sp.add_argument(flag, required=True, dest=flag[1], metavar="MATRIX")
        sp.add_argument("-K", required=True, dest="cone", metavar="CONE_SPEC")

    sp = add("riccati", cmd_riccati)
    sp.add_argument("-A", required=True, metavar="MATRIX")
    sp.add_argument("-B", required=True, metavar="MATRIX")
    sp.add_argument("-K", required=True, dest="cone", metavar="CONE_SPEC")
    sp.add_argument("--layout", choices=certificates.LAYOUTS, default="BtD")

    sp = add("d-stability", cmd_d_stability)
    sp.add_argument("-A", required=True, metavar="MATRIX")
    sp.add_argument("-E", required=True, metavar="MATRIX")
    sp.add_argument("-K", required=True, dest="cone", metavar="CONE_SPEC")

    sp = add("common-riccati", cmd_common_riccati, (common, grid))
    sp.add_argument("--pairs", nargs="+", required=True, metavar="FILE",
                    help="A1 B1 A2 B2 ... matrix files")
    sp.add_argument("--layout", choices=certificates.LAYOUTS, default="DB")

    sp = add("common-lyapunov", cmd_common_lyapunov, (common, grid))
    sp.add_argument("--matrices", nargs="+", required=True, metavar="FILE")

    add("reproduce-counterexample", cmd_reproduce, (common, grid))
    add("psd-demo", cmd_psd_demo)

    sp = add("verify", cmd_verify)
    sp.add_argument("certificate")
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            args.tol_override = args.tol
        if args.tol is None:
            args.tol = default_tol()
        if args.tol <= 0 or getattr(args, "lmi_tol", 1.0) <= 0:
            raise InputError("tolerances must be positive")
        return args.func(args)
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionFailed as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (InternalVerificationFailed, DidNotConverge, ConeCertError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
