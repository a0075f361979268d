"""Command-line runner: ``catchern <command> SCENARIO [options]``.

Every command prints (or writes to ``--out``) a report with the residuals
it measured and the pass/fail decisions drawn from them. Exit status is
0 when every decision passes, 1 when a check fails, 2 for usage or parse
errors and 3 for a numerical singularity.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
import time
from pathlib import Path

from .algebra import validate_algebra
from .cochains import cohomologous, is_cyclic_cocycle
from .errors import CatchernError, PreconditionError, SingularityError
from .fredholm import validate_fredholm
from .homotopy import homotopy_check, normalize_conjugate, validate_path
from .omega import chern_character
from .periodicity import periodicity_witness, witness_constant
from .scenario import SCHEMA_VERSION, ScenarioError, cochain_to_json, dumps, load_cochain, load_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SINGULAR = 0, 1, 2, 3

class CheckFailed(Exception):
    """A validator rejected the input; carries the residuals that failed."""

    def __init__(self, message: str, residuals: dict):
        super().__init__(message)
        self.residuals = residuals


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--tolerance", type=float, default=1e-9, help="residual tolerance, relative to max(1, |entries|)")
    parser.add_argument("--output", choices=("json", "text"), default="json")
    parser.add_argument("--out", type=Path, help="write the report here instead of standard output")
    parser.add_argument("--parallel", action="store_true", help="evaluate tensor entries in a thread pool")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catchern", description="Chern characters of finite Fredholm modules and their structural checks."
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("validate", help="check the algebra and the Fredholm module axioms")
    p.add_argument("scenario", type=Path)
    _common(p)

    for name, text in (
        ("chern", "emit the character of the given degree"),
        ("cocycle", "check that the character is a cyclic cocycle"),
        ("periodicity", "compare S tau^n with tau^(n+2) through the explicit witness"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("scenario", type=Path)
        p.add_argument("--degree", type=int, required=True)
        _common(p)

    p = sub.add_parser("homotopy", help="transgression and class invariance along the scenario's path")
    p.add_argument("scenario", type=Path)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--steps", type=int, default=64, help="Simpson subintervals (rounded up to even)")
    p.add_argument("--quadrature-tolerance", type=float, default=1e-6)
    _common(p)

    p = sub.add_parser("cohomologous", help="decide whether two cochain files differ by a coboundary")
    p.add_argument("--lhs", type=Path, required=True)
    p.add_argument("--rhs", type=Path, required=True)
    p.add_argument("--degree", type=int, required=True)
    _common(p)
    return parser


def _digest(*files: Path) -> str:
    h = hashlib.sha256()
    for f in files:
        h.update(f.read_bytes())
    return h.hexdigest()


def _check_module(sc, tol: float) -> tuple[dict, dict]:
    alg = validate_algebra(sc.algebra)
    fm = validate_fredholm(sc.module, tol)
    residuals = {f"algebra.{k}": v for k, v in alg.as_dict().items() if isinstance(v, float)}
    residuals.update({f"fredholm.{k}": v for k, v in fm.residuals.items()})
    # summability is reported, not judged
    diagnostics = {f"commutator_schatten_p[{k}]": v for k, v in fm.commutator_norms.items()}
    if not alg.ok or not fm.ok:
        raise CheckFailed("the scenario is not a valid Fredholm module", residuals)
    return residuals, diagnostics


def _run(args) -> dict:
    tol = args.tolerance
    if args.command == "cohomologous":
        lhs = load_cochain(args.lhs)
        rhs = load_cochain(args.rhs, lhs.algebra)
        for side, psi in (("lhs", lhs), ("rhs", rhs)):
            if psi.degree != args.degree:
                raise ScenarioError(f"{side} has degree {psi.degree}, not {args.degree}", "$.degree")
        dec = cohomologous(lhs, rhs, tol)
        out = {
            "inputs_digest": _digest(args.lhs, args.rhs),
            "residuals": {"coboundary_least_squares": dec.residual},
            "decisions": {"cohomologous": dec.cohomologous},
            "scale": dec.scale,
        }
        if dec.witness is not None:
            out["witness"] = cochain_to_json(dec.witness)
        return out

    sc = load_scenario(args.scenario)
    out = {"inputs_digest": sc.digest}
    residuals, out["diagnostics"] = _check_module(sc, tol)
    decisions = {"module_valid": True}
    FM = sc.module

    if args.command == "validate":
        if sc.path is not None:
            residuals["path.grid_fredholm"] = validate_path(sc.path, 64, tol)
            decisions["path_valid"] = True
    elif args.command == "chern":
        tau = chern_character(FM, args.degree, parallel=args.parallel)
        out["cochain"] = cochain_to_json(tau)
    elif args.command == "cocycle":
        tau = chern_character(FM, args.degree, parallel=args.parallel)
        rep = is_cyclic_cocycle(tau, tol)
        residuals.update(rep.as_dict())
        decisions["cyclic_cocycle"] = rep.ok
        out["scale"] = rep.scale
    elif args.command == "periodicity":
        w = periodicity_witness(FM, args.degree)
        dec = cohomologous(w.s_tau, w.tau_next, tol)
        residuals["periodicity_identity"] = w.residual
        residuals["coboundary_least_squares"] = dec.residual
        decisions["periodicity_identity"] = w.residual <= tol * w.scale
        decisions["cohomologous"] = dec.cohomologous
        out["scale"] = w.scale
        c = witness_constant(args.degree)
        out["witness_constant"] = [c.real, c.imag]
        out["s_tau"] = cochain_to_json(w.s_tau)
        out["tau_next"] = cochain_to_json(w.tau_next)
        out["phi"] = cochain_to_json(w.phi)
    elif args.command == "homotopy":
        if sc.path is None:
            raise ScenarioError("the homotopy command needs a scenario with a path", "$.path")
        path = sc.path
        if not path.fixed_f:
            path = normalize_conjugate(path, args.steps, tol)
            decisions["normalized"] = True
        rep = homotopy_check(
            path, args.degree, args.steps, tol, quadrature_tol=args.quadrature_tolerance, parallel=args.parallel
        )
        residuals.update(rep.residuals)
        decisions.update(rep.decisions)
        out["scale"] = rep.scale
        out["steps"] = rep.steps
        out["quadrature_tolerance"] = args.quadrature_tolerance
        out["phi"] = cochain_to_json(rep.phi)
    out["residuals"] = residuals
    out["decisions"] = decisions
    return out


def _render_text(report: dict) -> str:
    lines = [f"command: {report['command']}", f"tolerance: {report['tolerance']:g}"]
    if "error" in report:
        lines.append(f"error: {report['error']}")
    for k, v in report.get("residuals", {}).items():
        lines.append(f"  {k} = {v:.3e}" if isinstance(v, float) else f"  {k} = {v}")
    for k, v in report.get("decisions", {}).items():
        lines.append(f"  {k}: {'PASS' if v else 'FAIL'}")
    lines.append(f"elapsed_ms: {report['elapsed_ms']:.1f}")
    return "\n".join(lines)


def _emit(report: dict, args):
    text = dumps(report) if args.output == "json" else _render_text(report)
    if args.out:
        args.out.write_text(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, "tolerance": args.tolerance}
    try:
        report.update(_run(args))
        status = EXIT_OK if all(report["decisions"].values()) else EXIT_FAIL
    except CheckFailed as exc:
        report.update(error=str(exc), residuals=exc.residuals, decisions={"module_valid": False})
        status = EXIT_FAIL
    except PreconditionError as exc:
        report.update(error=str(exc), residuals=exc.residuals, decisions={"preconditions": False})
        status = EXIT_FAIL
    except SingularityError as exc:
        report.update(error=str(exc), residuals={}, decisions={}, singular_t=exc.t)
        status = EXIT_SINGULAR
    except (CatchernError, ValueError, OSError) as exc:
        # parse errors, out-of-domain degrees, missing files
        parser.print_usage(sys.stderr)
        print(f"catchern {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    residuals = {k: float(v) for k, v in report.get("residuals", {}).items()}
    if not all(math.isfinite(v) for v in residuals.values()):
        # keep the report valid JSON and never pass on a non-finite residual
        residuals = {k: v if math.isfinite(v) else str(v) for k, v in residuals.items()}
        status = max(status, EXIT_FAIL)
    report["residuals"] = residuals
    report["elapsed_ms"] = (time.perf_counter() - start) * 1e3
    _emit(report, args)
    return status


if __name__ == "__main__":
    sys.exit(main())
