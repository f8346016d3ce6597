"""Command-line driver.

    ruo spectrum   FILE
    ruo attractors FILE [--full]
    ruo evolve     FILE --state RHO.json --steps N
    ruo asymptote  FILE --state RHO.json --steps N
    ruo choi       FILE [--power N | --asymptotic N]
    ruo verify     FILE [--allow-skip]

FILE is an ensemble JSON path, a file shipped with the package
(``cnot_pair.json``), or a builtin spec such as ``cnot_pair:0.9``.
Reports go to stdout, diagnostics to stderr.

Exit codes: 0 ok, 1 usage, 2 parse/validation, 3 numeric failure,
4 check failure.
"""

import argparse
import sys

import numpy as np

from ruo import asymptotics, choi
from ruo.attractors import (
    CIRCLE_TOL,
    MAX_ROOT_ORDER,
    NULL_TOL,
    build_attractor_space,
    unit_spectrum,
)
from ruo.channel import MAX_DIM, iterate, superoperator
from ruo.errors import (
    DocumentError,
    EnsembleValidationError,
    NumericError,
    StateValidationError,
)
from ruo.io import load_ensemble_document, load_state
from ruo.report import dumps
from ruo.verify import MAX_STEPS, overall_status, run_verification

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("ensemble", metavar="FILE")
    common.add_argument("--circle-tol", type=float, default=None,
                        help=f"unit-circle tolerance 1-|lambda| (default {CIRCLE_TOL:g})")
    common.add_argument("--null-tol", type=float, default=None,
                        help=f"relative null-space tolerance (default {NULL_TOL:g})")
    common.add_argument("--convergence-threshold", type=float, default=None,
                        help=f"HS-norm convergence threshold (default {asymptotics.CONVERGENCE_THRESHOLD:g})")
    common.add_argument("--max-order", type=int, default=MAX_ROOT_ORDER,
                        help="largest root-of-unity order for periodicity detection")
    common.add_argument("--max-dim", type=int, default=MAX_DIM,
                        help="largest accepted Hilbert-space dimension")

    parser = _Parser(prog="ruo", description="Asymptotics of random unitary operations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="unit-circle spectrum")
    p = sub.add_parser("attractors", parents=[common], help="attractor space")
    p.add_argument("--full", action="store_true", help="include basis matrices")
    for name in ("evolve", "asymptote"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--state", required=True, help="density-matrix JSON")
        p.add_argument("--steps", type=int, required=True)
    p = sub.add_parser("choi", parents=[common], help="dynamical-matrix audit")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--power", type=int, default=None, help="audit Phi^N (N >= 0)")
    g.add_argument("--asymptotic", type=int, default=None, help="audit Phi_ass^N (any integer)")
    p.add_argument("--full", action="store_true", help="include the dynamical matrix")
    p = sub.add_parser("verify", parents=[common], help="run every check")
    p.add_argument("--allow-skip", action="store_true",
                   help="do not fail on SKIPPED checks")
    p.add_argument("--max-steps", type=int, default=MAX_STEPS)
    p.add_argument("--full", action="store_true", help="include basis matrices")
    return parser


def _tolerances(args, doc):
    tol = doc.tolerances
    pick = lambda flag, key, default: (
        flag if flag is not None else tol.get(key, default)
    )
    return {
        "circle_tol": pick(args.circle_tol, "unit_circle", CIRCLE_TOL),
        "null_tol": pick(args.null_tol, "nullspace", NULL_TOL),
        "threshold": pick(args.convergence_threshold, "convergence",
                          asymptotics.CONVERGENCE_THRESHOLD),
    }


def _header(doc, tols):
    return {
        "ensemble": {
            "name": doc.name,
            "sha256": doc.digest(),
            "dim": doc.dim,
            "members": len(doc.unitaries),
            "probabilities": [float(p) for p, _ in doc.unitaries],
        },
        "tolerances": tols,
    }


def _space(e, tols):
    return build_attractor_space(e, circle_tol=tols["circle_tol"], null_tol=tols["null_tol"])


def run(args, out):
    doc = load_ensemble_document(args.ensemble)
    e = doc.to_ensemble(max_dim=args.max_dim)
    tols = _tolerances(args, doc)
    report = _header(doc, tols)
    status = EXIT_OK
    cmd = args.command

    if cmd == "spectrum":
        S = superoperator(e)
        report["spectrum"] = unit_spectrum(
            S, tols["circle_tol"], null_tol=tols["null_tol"], max_order=args.max_order
        ).to_dict()
        report["subdominant_modulus"] = asymptotics.subdominant_modulus(S, tols["circle_tol"])
    elif cmd == "attractors":
        space = _space(e, tols)
        report["spectrum"] = space.spectrum.to_dict()
        report["attractors"] = space.to_dict(full=args.full)
        report["classification"] = asymptotics.classify_asymptotics(space, args.max_order).to_dict()
    elif cmd in ("evolve", "asymptote"):
        if args.steps < 0 and cmd == "evolve":
            raise UsageError("--steps must be nonnegative for evolve")
        rho0 = load_state(args.state, e.dim)
        space = _space(e, tols)
        report["steps"] = args.steps
        if cmd == "evolve":
            report["state"] = iterate(e, rho0, args.steps)
            if args.steps >= 1:
                trace = asymptotics.convergence_trace(
                    e, rho0, args.steps, space=space, threshold=tols["threshold"]
                )
                report["convergence"] = trace.to_dict()
        else:
            report["state"] = asymptotics.asymptotic_state(space, rho0, args.steps)
    elif cmd == "choi":
        S = superoperator(e)
        if args.asymptotic is not None:
            space = _space(e, tols)
            D = choi.choi_of_asymptotic(space, args.asymptotic)
            source = f"Phi_ass^{args.asymptotic}"
        else:
            n = 1 if args.power is None else args.power
            if n < 0:
                raise UsageError("--power must be nonnegative")
            D = choi.reshuffle(np.linalg.matrix_power(S, n))
            source = f"Phi^{n}"
        report["source"] = source
        report["audit"] = choi.audit(D).to_dict()
        if args.full:
            report["dynamical_matrix"] = D
    elif cmd == "verify":
        space, cls, checks = run_verification(
            e, circle_tol=tols["circle_tol"], null_tol=tols["null_tol"],
            threshold=tols["threshold"], max_order=args.max_order,
            max_steps=args.max_steps,
        )
        ok = overall_status(checks, args.allow_skip)
        report["spectrum"] = space.spectrum.to_dict()
        report["attractors"] = space.to_dict(full=args.full)
        report["classification"] = cls.to_dict()
        report["checks"] = [c.to_dict() for c in checks]
        report["summary"] = {
            "passed": sum(c.status == "PASS" for c in checks),
            "failed": sum(c.status == "FAIL" for c in checks),
            "skipped": sum(c.status == "SKIPPED" for c in checks),
            "ok": ok,
        }
        for c in checks:
            if c.status != "PASS":
                print(f"{c.status}: {c.name}: {'; '.join(c.violations) or c.details.get('reason', '')}",
                      file=sys.stderr)
        status = EXIT_OK if ok else EXIT_CHECK
    out.write(dumps(report))
    return status


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return run(args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DocumentError, EnsembleValidationError, StateValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
