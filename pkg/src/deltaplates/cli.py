"""Command-line front end.

Exit codes: 0 success, 1 bad input (parse or validation), 2 quadrature did
not converge, 3 a self-check failed.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path as FsPath

from . import io
from .checks import run_checks
from .errors import DegenerateCavity, DeltaPlatesError, InvalidInput, QuadratureNotConverged
from .greens import GreensQuery, greens_value, region_label
from .integrate import QuadratureSpec
from .optics import Mode, SpectralPoint, coefficients
from .quadrature import (
    energy_per_area,
    pressure_on_plate,
    pressure_three_plates_stress,
    pressure_two_plates_stress,
)
from .scattering import chain_text, composite, enumerate_chains

__all__ = ["main", "run", "build_parser"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_QUADRATURE = 2
EXIT_CHECK = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with the
    # non-convergence code
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="deltaplates", description="Casimir energies and pressures of δ-function plate stacks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_stack(p):
        p.add_argument("--stack", required=True, help="stack JSON file ('-' for stdin)")

    def with_quad(p):
        p.add_argument("--rel-tol", type=_positive, default=None, help="relative tolerance (default per path)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    def with_point(p):
        p.add_argument("--zeta", type=float, required=True)
        p.add_argument("--kperp", type=float, required=True)

    p = sub.add_parser("energy", help="energy per unit area")
    with_stack(p)
    with_quad(p)

    p = sub.add_parser("pressure", help="pressure on one plate")
    with_stack(p)
    p.add_argument("--plate", type=int, required=True, help="1-based plate index")
    p.add_argument("--stress", action="store_true",
                   help="use the stress-tensor formula (ideal plates, N = 2 or 3, last plate)")
    with_quad(p)

    p = sub.add_parser("sweep", help="energy and gap pressure over a range of one gap")
    with_stack(p)
    p.add_argument("--gap", type=int, required=True, help="gap i, between plates i and i+1")
    p.add_argument("--from", dest="start", type=_positive, required=True)
    p.add_argument("--to", dest="stop", type=_positive, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--log", action="store_true", help="geometric spacing")
    p.add_argument("--rel-tol", type=_positive, default=None)

    p = sub.add_parser("coeffs", help="per-plate and composite amplitudes at one spectral point")
    with_stack(p)
    with_point(p)

    p = sub.add_parser("diagram", help="list the chains contributing to Δ of n plates")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("greens", help="scalar Green's function g(z, z')")
    with_stack(p)
    p.add_argument("--mode", choices=("H", "E"), required=True)
    with_point(p)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--zprime", type=float, required=True)

    p = sub.add_parser("check", help="run the self-consistency checks")
    with_stack(p)
    p.add_argument("--rel-tol", type=_positive, default=None)
    return parser


def _read_stack(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            text = FsPath(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    config = io.parse_stack(text)
    return config, config.to_stack()


def _spec(args) -> QuadratureSpec:
    return QuadratureSpec(rel_tol=args.rel_tol)


def _cmd_energy(args, out, err):
    config, stack = _read_stack(args.stack)
    result = energy_per_area(stack, _spec(args))
    inputs = {"command": "energy", "stack": config, "rel_tol": args.rel_tol}
    out.write(io.emit_result(result, args.format, inputs))
    return EXIT_OK


def _cmd_pressure(args, out, err):
    config, stack = _read_stack(args.stack)
    if args.stress:
        if stack.n not in (2, 3):
            raise InvalidInput(f"--stress needs 2 or 3 plates, got {stack.n}")
        if args.plate != stack.n:
            raise InvalidInput(f"--stress gives the pressure on the last plate ({stack.n}), not plate {args.plate}")
        fn = pressure_two_plates_stress if stack.n == 2 else pressure_three_plates_stress
        result = fn(stack, _spec(args))
    else:
        result = pressure_on_plate(stack, args.plate, _spec(args))
    inputs = {"command": "pressure", "stack": config, "plate": args.plate,
              "stress": args.stress, "rel_tol": args.rel_tol}
    if args.format == "csv":
        err.write(f"# pressure sign convention: {io.SIGN_CONVENTION}\n")
    out.write(io.emit_result(result, args.format, inputs))
    return EXIT_OK


def _cmd_sweep(args, out, err):
    _, stack = _read_stack(args.stack)
    request = io.SweepRequest(args.gap, args.start, args.stop, args.points, "log" if args.log else "linear")
    rows = io.run_sweep(stack, request, QuadratureSpec(rel_tol=args.rel_tol))
    err.write(f"# pressure = -dE/d(gap {args.gap}); sign convention: {io.SIGN_CONVENTION}\n")
    out.write(io.emit_sweep(rows))
    return EXIT_OK


def _cmd_coeffs(args, out, err):
    config, stack = _read_stack(args.stack)
    sp = SpectralPoint(args.zeta, args.kperp)
    record = {"inputs": {"command": "coeffs", "stack": config, "zeta": sp.zeta, "kperp": sp.kperp},
              "kappa": sp.kappa}
    for mode in Mode:
        plates = []
        for k, plate in enumerate(stack.plates, start=1):
            c = coefficients(plate, mode, sp)
            plates.append({"plate": k, "r": c.r, "t": c.t})
        body = composite(stack, mode, sp)
        record[mode.value] = {
            "plates": plates,
            "R<": body.r_right,
            "R>": body.r_left,
            "T": body.t,
            "delta": body.delta,
        }
    out.write(io.encode_json(io.to_jsonable(record)) + "\n")
    return EXIT_OK


def _cmd_diagram(args, out, err):
    for chain in enumerate_chains(args.n):
        out.write(chain_text(chain) + "\n")
    return EXIT_OK


def _cmd_greens(args, out, err):
    config, stack = _read_stack(args.stack)
    sp = SpectralPoint(args.zeta, args.kperp)
    q = GreensQuery(args.z, args.zprime, Mode(args.mode), sp)
    value = greens_value(stack, q)
    record = {
        "value": value,
        "region": list(region_label(stack, args.z, args.zprime)),
        "inputs": {"command": "greens", "stack": config, "mode": args.mode, "zeta": args.zeta,
                   "kperp": args.kperp, "z": args.z, "zprime": args.zprime},
    }
    out.write(io.encode_json(io.to_jsonable(record)) + "\n")
    return EXIT_OK


def _cmd_check(args, out, err):
    _, stack = _read_stack(args.stack)
    spec = QuadratureSpec(rel_tol=args.rel_tol if args.rel_tol is not None else 1e-9)
    outcomes = run_checks(stack, spec)
    for outcome in outcomes:
        out.write(outcome.line() + "\n")
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_CHECK


_COMMANDS = {
    "energy": _cmd_energy,
    "pressure": _cmd_pressure,
    "sweep": _cmd_sweep,
    "coeffs": _cmd_coeffs,
    "diagram": _cmd_diagram,
    "greens": _cmd_greens,
    "check": _cmd_check,
}


def run(argv=None, out=None, err=None) -> int:
    """Run one command and return its exit code."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args, out, err)
    except _UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_INPUT
    except QuadratureNotConverged as exc:
        err.write(f"error: {exc}\n")
        return EXIT_QUADRATURE
    except DegenerateCavity as exc:
        err.write(f"error: {exc}\n")
        return EXIT_QUADRATURE
    except (InvalidInput, DeltaPlatesError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


def main(argv=None) -> int:
    code = run(argv)
    sys.exit(code)
