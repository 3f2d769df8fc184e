"""Command-line interface.

Exit codes: 0 success, 1 I/O failure, 2 validation failure (a computed
quantity disagrees with its oracle beyond tolerance), 3 invalid scenario or
input, 4 numerical abort (degenerate spectrum, nodal point, ...).  Errors are
printed to stderr as one line::

    mixphase: error[<Code>] <context>: <message>
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, bloch, holonomy, scenario, transport, validation
from .core import wrap_phase
from .errors import InvalidInput, MixPhaseError, NumericalAbort

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3, 4

OCTANT = "0,0,1;1,0,0;0,1,0"


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("scenario", help="bundled scenario name or path to a YAML scenario file")
    p.add_argument("--steps", type=_positive_int, help="time steps per arc / path (at least 16)")
    p.add_argument("--substeps", type=_positive_int, help="integration substeps per time step")
    p.add_argument("--tol-transport", type=float, dest="transport_tol", help="parallel-transport tolerance")
    p.add_argument("--tol-integral", type=float, dest="integral_tol", help="route-agreement tolerance")
    p.add_argument("--chi-samples", type=int, dest="chi_samples", help="points in the chi-scan (0 disables)")
    p.add_argument("--seed", type=int, help="seed recorded with the scenario")
    p.add_argument("--out", type=Path, help="output directory (default: print to stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixphase",
        description="Geometric phases of mixed states in a Mach-Zehnder interferometer.",
        epilog="exit codes: 0 ok, 1 I/O, 2 validation failure, 3 invalid input, 4 numerical abort",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transport", help="integrate a scenario and print its phase report")
    _add_run_options(p)
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("interfere", help="simulate the chi-scan of a scenario and emit it as CSV")
    _add_run_options(p)
    p.set_defaults(func=cmd_interfere)

    p = sub.add_parser("bloch", help="closed-form vs numerical qubit phases on a geodesic polygon")
    p.add_argument("--points", default=OCTANT,
                   help="waypoints as 'x,y,z;x,y,z;...' (default: octant triangle)")
    p.add_argument("--open", action="store_true", help="do not close the polygon")
    p.add_argument("-r", "--radius", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.9, 1.0],
                   help="Bloch radii to tabulate")
    p.add_argument("--steps", type=_positive_int, default=2000, help="time steps per arc")
    p.add_argument("--tol-integral", type=float, dest="integral_tol", default=holonomy.INTEGRAL_TOL)
    p.add_argument("--out", type=Path, help="write the table to this file instead of stdout")
    p.set_defaults(func=cmd_bloch)

    p = sub.add_parser("purify-check", help="purification oracle agreement on random inputs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive_int, default=50)
    p.add_argument("--steps", type=_positive_int, default=400)
    p.set_defaults(func=cmd_purify_check)

    p = sub.add_parser("validate", help="run the randomized property batches")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=_positive_int, default=2000)
    p.add_argument("--tol-transport", type=float, dest="transport_tol", default=holonomy.TRANSPORT_TOL)
    p.add_argument("--tol-integral", type=float, dest="integral_tol", default=holonomy.INTEGRAL_TOL)
    p.add_argument("--out", type=Path, help="also write the summary to this file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("list", help="list bundled scenarios")
    p.set_defaults(func=cmd_list)
    return parser


def _scenario_from(args) -> scenario.Scenario:
    scn = scenario.load_scenario(args.scenario)
    return scenario.with_overrides(scn, steps=args.steps, substeps=args.substeps,
                                   transport_tol=args.transport_tol, integral_tol=args.integral_tol,
                                   chi_samples=args.chi_samples, seed=args.seed)


def _emit(text: str, out: Path | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        dest = out / name if out.suffix == "" else out
        scenario.write_atomic(dest, text)
        print(f"wrote {dest}", file=sys.stderr)


def cmd_transport(args) -> int:
    result = scenario.run_scenario(_scenario_from(args))
    doc = scenario.report_document(result)
    _emit(scenario.format_report(doc), args.out, f"{result.scenario.name}.report.json")
    if args.out is not None and result.profile is not None:
        scenario.emit_profile(result.profile, args.out / f"{result.scenario.name}.profile.csv")
    return EXIT_VALIDATION if doc["routes_agree"] is False else EXIT_OK


def cmd_interfere(args) -> int:
    scn = _scenario_from(args)
    if not scn.chi_samples:
        raise InvalidInput("interfere needs chi_samples > 0", context="--chi-samples")
    result = scenario.run_scenario(scn)
    _emit(scenario.profile_csv(result.profile), args.out, f"{scn.name}.profile.csv")
    return EXIT_OK


def _parse_points(text: str) -> np.ndarray:
    try:
        return np.array([[float(x) for x in p.split(",")] for p in text.split(";") if p.strip()])
    except ValueError as exc:
        raise InvalidInput(f"cannot parse waypoints {text!r}", context="--points") from exc


def bloch_table(points, radii, steps: int = 2000, closed: bool = True) -> list[dict]:
    """Numerical transport vs closed forms for each Bloch radius."""
    sp = bloch.SpherePath(points, closed, steps)
    omega = bloch.solid_angle(sp)
    rows = []
    for r in radii:
        drive = bloch.geodesic_generator_path(sp, r)
        if r == 0.0:
            # maximally mixed: no preferred frame, transport the supplied one
            path = transport.frame_transport(drive.frames, drive.generators.times, drive.breaks)
        else:
            path = transport.transport_evolution(drive.rho0, drive.generators)
        rep = holonomy.analyze(drive.rho0, path, frame=drive.frames[0])
        eta = bloch.eigenpath_visibilities(rep)
        closed_phase = bloch.qubit_phase_closed_form(r, omega) if closed else None
        closed_nu = bloch.qubit_visibility_closed_form(r, omega, 1.0 if closed else eta.eta_plus)
        rows.append({
            "r": r, "omega": omega,
            "closed_phase": closed_phase, "numeric_phase": rep.gamma_g_trace,
            "phase_error": None if closed_phase is None or rep.gamma_g_trace is None
            else abs(wrap_phase(rep.gamma_g_trace - closed_phase)),
            "closed_visibility": closed_nu, "numeric_visibility": rep.visibility,
            "visibility_error": abs(rep.visibility - closed_nu),
            "eta_plus": eta.eta_plus, "eta_minus": eta.eta_minus, "eta_consistent": eta.consistent,
        })
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return format(v, ".17g")


def cmd_bloch(args) -> int:
    if any(not 0 <= r <= 1 for r in args.radius):
        raise InvalidInput(f"radii must lie in [0, 1], got {args.radius}", context="--radius")
    rows = bloch_table(_parse_points(args.points), args.radius, args.steps, not args.open)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(rows[0]))
    for row in rows:
        w.writerow([_fmt(v) for v in row.values()])
    _emit(buf.getvalue(), args.out, "bloch.csv")
    bad = [r for r in rows
           if (r["phase_error"] is not None and r["phase_error"] >= args.integral_tol)
           or r["visibility_error"] >= args.integral_tol or not r["eta_consistent"]]
    return EXIT_VALIDATION if bad else EXIT_OK


def _report_checks(checks, out: Path | None = None) -> int:
    text = "".join(c.line() + "\n" for c in checks)
    sys.stdout.write(text)
    if out is not None:
        scenario.write_atomic(out, text)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def cmd_purify_check(args) -> int:
    cases = validation.purification_batch(args.seed, args.count, args.steps)
    return _report_checks(validation.purification_checks(cases))


def cmd_validate(args) -> int:
    checks = validation.transport_checks(validation.transport_batch(args.seed, steps=args.steps),
                                         args.transport_tol, args.integral_tol)
    checks += validation.purification_checks(validation.purification_batch(args.seed))
    checks += validation.interference_checks(validation.interference_batch(args.seed))
    for study in validation.convergence_studies():
        worst = max(abs(x - 4.0) for x in study.ratios)
        checks.append(validation.Check(
            f"convergence order (polar {study.polar:.4f}, r {study.r:g}) |ratio - 4|", worst, 0.5,
            len(study.ratios), "ratios " + ", ".join(f"{x:.3f}" for x in study.ratios)))
    return _report_checks(checks, args.out)


def cmd_list(args) -> int:
    for name in scenario.bundled_scenarios():
        print(name)
    return EXIT_OK


def _error_line(exc: BaseException, code: str, context: str | None) -> str:
    msg = " ".join(str(exc).split())
    where = f" {context}:" if context else ""
    return f"mixphase: error[{code}]{where} {msg}"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except NumericalAbort as exc:
        print(_error_line(exc, exc.code, exc.context), file=sys.stderr)
        return EXIT_NUMERICAL
    except MixPhaseError as exc:
        print(_error_line(exc, exc.code, exc.context), file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(_error_line(exc, "IOError", None), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
