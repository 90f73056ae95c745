"""Self-consistency checks run by ``deltaplates check``.

Each check compares two independent routes to the same quantity on a fixed,
deterministic set of sample points, so the report is reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .greens import MAX_PLATES, GreensQuery, greens_value
from .integrate import QuadratureSpec
from .optics import Mode, SpectralPoint
from .quadrature import energy_per_area, pressure_on_plate
from .scattering import Stack, composite, delta_chain, factorized_delta

__all__ = ["CheckOutcome", "run_checks", "spectral_samples"]

FACTORIZATION_TOL = 1e-12
FORCE_ENERGY_TOL = 1e-6
RECIPROCITY_TOL = 1e-12


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    worst: float  # worst relative discrepancy seen
    tolerance: float
    detail: str = ""
    skipped: bool = False

    def line(self) -> str:
        if self.skipped:
            return f"SKIP {self.name}: {self.detail}"
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: worst {self.worst:.3e} (tol {self.tolerance:.0e}){' ' + self.detail if self.detail else ''}"


def _rel(a: float, b: float, floor: float = 1e-300) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)


def spectral_samples(stack: Stack) -> list[SpectralPoint]:
    """A small fixed grid of (ζ, κ) points scaled to the stack."""
    scale = stack.min_gap if stack.n > 1 else 1.0
    out = []
    for kappa in (0.3, 1.0, 3.0):
        for frac in (0.0, 0.5, 0.9):
            out.append(SpectralPoint.from_kappa(frac * kappa / scale, kappa / scale))
    return out


def check_factorization(stack: Stack) -> CheckOutcome:
    """Chain expansion of Δ against the composite fold, at every split."""
    name = "factorization"
    if stack.n < 2:
        return CheckOutcome(name, True, 0.0, FACTORIZATION_TOL, "single plate", skipped=True)
    worst = 0.0
    for sp in spectral_samples(stack):
        for mode in Mode:
            chain = delta_chain(stack, mode, sp)
            worst = max(worst, _rel(chain, composite(stack, mode, sp).delta))
            for split in range(1, stack.n):
                worst = max(worst, _rel(chain, factorized_delta(stack, split, mode, sp)))
    return CheckOutcome(name, worst <= FACTORIZATION_TOL, worst, FACTORIZATION_TOL)


def check_force_energy(stack: Stack, spec: QuadratureSpec | None = None) -> CheckOutcome:
    """Integrated gap derivative against a central difference of the energy.

    The step is 1e-4 of the smallest gap. Near-zero pressures are compared
    on the natural scale |E| / d_min rather than relative to themselves.
    """
    name = "force-energy"
    if stack.n < 2:
        return CheckOutcome(name, True, 0.0, FORCE_ENERGY_TOL, "single plate", skipped=True)
    spec = spec or QuadratureSpec(rel_tol=1e-9)
    d = stack.min_gap
    h = 1e-4 * d
    energy = energy_per_area(stack, spec).value
    worst = 0.0
    for i in range(1, stack.n + 1):
        a = stack[i].position
        e_plus = energy_per_area(stack.with_position(i, a + h), spec).value
        e_minus = energy_per_area(stack.with_position(i, a - h), spec).value
        fd = -(e_plus - e_minus) / (2.0 * h)
        p = pressure_on_plate(stack, i, spec).value
        worst = max(worst, abs(p - fd) / max(abs(p), abs(energy) / d, 1e-300))
    return CheckOutcome(name, worst <= FORCE_ENERGY_TOL, worst, FORCE_ENERGY_TOL)


def check_mode_swap(stack: Stack) -> CheckOutcome:
    """Δ^H of the stack equals Δ^E of the stack with λe and λg exchanged."""
    swapped = stack.swapped()
    worst = 0.0
    if stack.n >= 2:
        for sp in spectral_samples(stack):
            for mode in Mode:
                a = composite(stack, mode, sp)
                b = composite(swapped, mode.other, sp)
                worst = max(worst, _rel(a.delta, b.delta), abs(a.r_left - b.r_left),
                            abs(a.r_right - b.r_right), abs(a.t - b.t))
    return CheckOutcome("mode-swap", worst == 0.0, worst, 0.0)


def _probe_points(stack: Stack) -> list[float]:
    pos = stack.positions
    d = stack.min_gap if stack.n > 1 else 1.0
    pts = [pos[0] - 0.37 * d]
    pts += list(0.5 * (pos[1:] + pos[:-1]) + 0.11 * np.diff(pos))
    pts.append(pos[-1] + 0.41 * d)
    return [float(x) for x in pts]


def check_reciprocity(stack: Stack) -> CheckOutcome:
    """g(z, z') = g(z', z) over every pair of probe regions."""
    name = "reciprocity"
    if stack.n > MAX_PLATES:
        return CheckOutcome(name, True, 0.0, RECIPROCITY_TOL,
                            f"closed-form Green's function limited to N <= {MAX_PLATES}", skipped=True)
    pts = _probe_points(stack)
    worst = 0.0
    for sp in spectral_samples(stack)[::2]:
        for mode in Mode:
            for z in pts:
                for zp in pts:
                    g1 = greens_value(stack, GreensQuery(z, zp, mode, sp))
                    g2 = greens_value(stack, GreensQuery(zp, z, mode, sp))
                    worst = max(worst, _rel(g1, g2))
    return CheckOutcome(name, worst <= RECIPROCITY_TOL, worst, RECIPROCITY_TOL)


def run_checks(stack: Stack, spec: QuadratureSpec | None = None) -> list[CheckOutcome]:
    return [
        check_factorization(stack),
        check_force_energy(stack, spec),
        check_mode_swap(stack),
        check_reciprocity(stack),
    ]
