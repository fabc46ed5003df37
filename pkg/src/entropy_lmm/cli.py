"""Command-line front end.

Exit codes: 0 success, 1 spec/parse/validation error, 2 solver did not
converge, 3 infeasible targets or candidate, 4 feasible but not certified,
5 dual solver and oracle disagree.
"""

import argparse
import dataclasses
import logging
import math
import sys
import time

import numpy as np

from . import __version__
from .certificate import CERTIFIED_OPTIMAL, FEASIBLE_NOT_CERTIFIED, INFEASIBLE, certify
from .dual import INIT_STRATEGIES, solve
from .errors import InfeasibleTargets, NoInteriorPoint, NotConverged, SpecError
from .oracle import compare, primal_solve
from .problem import FEASIBLE_INTERIOR, classify_gaussian_feasibility, gaussian_solution
from .specfile import SCHEMA_VERSION, dumps_report, load_json, load_spec

EXIT_OK = 0
EXIT_SPEC = 1
EXIT_NOT_CONVERGED = 2
EXIT_INFEASIBLE = 3
EXIT_NOT_CERTIFIED = 4
EXIT_DISAGREE = 5

VERDICT_EXIT = {
    CERTIFIED_OPTIMAL: EXIT_OK,
    FEASIBLE_NOT_CERTIFIED: EXIT_NOT_CERTIFIED,
    INFEASIBLE: EXIT_INFEASIBLE,
}

log = logging.getLogger("entropy_lmm")


def _apply_flags(spec, args):
    solver = spec.solver
    if args.tol is not None:
        solver = dataclasses.replace(solver, tol_moments=args.tol)
    if args.max_iter is not None:
        solver = dataclasses.replace(solver, max_iter=args.max_iter)
    if args.init is not None:
        solver = dataclasses.replace(solver, init=args.init)
    cert = spec.certificate
    if args.directions is not None:
        cert = dataclasses.replace(cert, directions=args.directions)
    if args.seed is not None:
        cert = dataclasses.replace(cert, seed=args.seed)
    return solver, cert


def _base_report(command, spec=None):
    report = {"schema_version": SCHEMA_VERSION, "command": command}
    if spec is not None:
        report["problem"] = spec.echo()
    return report


def _write(report, args, started):
    if getattr(args, "timing", False):
        report["timing"] = {"seconds": time.perf_counter() - started}
    text = dumps_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_solve(spec, solver_opts, report):
    """Solve and store the outcome in ``report``; returns (solve_report, exit)."""
    try:
        result = solve(spec.problem, solver_opts)
    except InfeasibleTargets as exc:
        report["status"] = "infeasible_targets"
        report["message"] = str(exc)
        if exc.verdict is not None:
            report["feasibility"] = exc.verdict.to_json()
        return None, EXIT_INFEASIBLE
    except NotConverged as exc:
        report["status"] = "not_converged"
        report["message"] = str(exc)
        if exc.report is not None:
            report["solve"] = exc.report.to_json()
        return None, EXIT_NOT_CONVERGED
    report["solve"] = result.to_json()
    return result, EXIT_OK


def cmd_solve(args):
    started = time.perf_counter()
    spec = load_spec(args.spec)
    solver_opts, cert_opts = _apply_flags(spec, args)
    report = _base_report("solve", spec)
    result, code = _run_solve(spec, solver_opts, report)
    if result is not None:
        status = certify(result.x_values, spec.problem, result.alpha, cert_opts)
        report["certificate"] = status.to_json()
        code = VERDICT_EXIT[status.verdict]
        report["status"] = status.verdict
    report["exit_code"] = code
    _write(report, args, started)
    return code


def _load_candidate(path, spec):
    p = spec.problem
    if path == "gaussian":
        raw = "gaussian"
    else:
        raw = load_json(path)
    if isinstance(raw, dict):
        raw = raw.get("values", raw.get("closed_form"))
    if raw == "gaussian":
        if p.m != 3:
            raise SpecError("candidate 'gaussian' needs three targets (b1, b2, b3)")
        verdict = classify_gaussian_feasibility(p.targets)
        if verdict.kind != FEASIBLE_INTERIOR:
            raise InfeasibleTargets(f"no Gaussian candidate for these targets ({verdict.kind})", verdict)
        return gaussian_solution(p.targets).density(p.measure.nodes)
    if not isinstance(raw, list):
        raise SpecError(f"{path}: candidate must be a JSON array of numbers or 'gaussian'")
    if len(raw) != p.measure.n:
        raise SpecError(f"{path}: candidate has {len(raw)} values, grid has {p.measure.n} nodes")
    values = []
    for i, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SpecError(f"{path}[{i}]: expected a number, got {v!r}")
        values.append(float(v))
    return np.array(values)


def cmd_certify(args):
    started = time.perf_counter()
    spec = load_spec(args.spec)
    _, cert_opts = _apply_flags(spec, args)
    report = _base_report("certify", spec)
    report["candidate"] = args.candidate
    try:
        x = _load_candidate(args.candidate, spec)
    except InfeasibleTargets as exc:
        report["status"] = INFEASIBLE
        report["message"] = str(exc)
        report["feasibility"] = exc.verdict.to_json()
        report["exit_code"] = EXIT_INFEASIBLE
        _write(report, args, started)
        return EXIT_INFEASIBLE
    status = certify(x, spec.problem, None, cert_opts)
    report["certificate"] = status.to_json()
    report["status"] = status.verdict
    code = VERDICT_EXIT[status.verdict]
    report["exit_code"] = code
    _write(report, args, started)
    return code


def _parse_number(text):
    try:
        value = float(text)
    except ValueError:
        raise SpecError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise SpecError(f"not a finite number: {text!r}")
    return value


def cmd_feasible(args):
    started = time.perf_counter()
    b = [_parse_number(v) for v in (args.b1, args.b2, args.b3)]
    verdict = classify_gaussian_feasibility(b)
    code = EXIT_OK if verdict.feasible else EXIT_INFEASIBLE
    print(f"{verdict.kind} b=({b[0]:.17g}, {b[1]:.17g}, {b[2]:.17g})")
    if args.out:
        report = _base_report("feasible")
        report["targets"] = b
        report["feasibility"] = verdict.to_json()
        report["exit_code"] = code
        _write(report, args, started)
    return code


def cmd_compare(args):
    started = time.perf_counter()
    spec = load_spec(args.spec)
    solver_opts, _ = _apply_flags(spec, args)
    report = _base_report("compare", spec)
    result, code = _run_solve(spec, solver_opts, report)
    if result is not None:
        try:
            oracle = primal_solve(spec.problem, spec.oracle)
        except NotConverged as exc:
            report["status"] = "oracle_not_converged"
            report["message"] = str(exc)
            code = EXIT_NOT_CONVERGED
        except NoInteriorPoint as exc:
            report["status"] = "no_interior_point"
            report["message"] = str(exc)
            code = EXIT_INFEASIBLE
        else:
            metrics = compare(result, oracle.x, spec.problem)
            metrics["oracle_iterations"] = oracle.iterations
            report["compare"] = metrics
            code = EXIT_OK if metrics["agree"] else EXIT_DISAGREE
            report["status"] = "agree" if metrics["agree"] else "disagree"
    report["exit_code"] = code
    _write(report, args, started)
    return code


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write the JSON report here instead of stdout")
    common.add_argument("--tol", type=float, help="moment residual tolerance of the dual solver")
    common.add_argument("--max-iter", type=int, help="Newton iteration limit")
    common.add_argument("--directions", type=int, help="number of sampled feasible directions")
    common.add_argument("--seed", type=int, help="seed for direction sampling")
    common.add_argument("--init", choices=INIT_STRATEGIES, help="multiplier initialization")
    common.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="entropy-lmm",
        description="Moment-constrained entropy minimization with optimality certificates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve a problem and certify the result")
    p.add_argument("spec")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", parents=[common], help="certify a candidate density")
    p.add_argument("spec")
    p.add_argument("candidate", help="JSON array of node values, or 'gaussian'")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("feasible", parents=[common], help="classify Gaussian targets (b1, b2, b3)")
    p.add_argument("b1")
    p.add_argument("b2")
    p.add_argument("b3")
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("compare", parents=[common], help="cross-check the dual solver with the primal oracle")
    p.add_argument("spec")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which would read as "not converged"
        return EXIT_OK if exc.code in (0, None) else EXIT_SPEC
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except Exception as exc:  # noqa: BLE001 - every failure must map to an exit code
        log.debug("unexpected failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
