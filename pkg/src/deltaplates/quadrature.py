"""Casimir energies and pressures per unit area.

The Euclidean spectral measure is reduced, using isotropy in k⊥ and the
evenness of the integrand in ζ, to

    E/A = (1/4π²) ∫_0^∞ dζ ∫_ζ^∞ κ dκ [ln Δ^H + ln Δ^E].

Swapping the order and writing ζ = sκ gives ∫_0^∞ κ² dκ ∫_0^1 ds, which
is what the two-dimensional path integrates over (κ, s). When no plate
coefficient depends on ζ the s integral is trivial and only the κ integral
remains.

Pressures come from differentiating ln Δ with respect to the gap lengths
under the integral. Cutting the stack at gap k,

    ∂ ln Δ / ∂ l_k = 2κ x_k / (1 - x_k),   x_k = R^<_{1..k} R^>_{k+1..N} e^{-2κ l_k},

so no numerical differentiation is involved. A positive pressure pushes the
plate toward larger z.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import (
    DegenerateCavity,
    IndexOutOfRange,
    InvalidInput,
    QuadratureNotConverged,
    RequiresKappaOnly,
    TooFewPlates,
)
from .integrate import (
    QuadratureSpec,
    QuadResult,
    half_line_map,
    integrate_semi_infinite,
    integrate_unit_interval,
    integrate_unit_square,
)
from .optics import Mode
from .scattering import Stack, stack_arrays

__all__ = [
    "Path",
    "EnergyResult",
    "PressureResult",
    "energy_per_area",
    "interaction_energy",
    "pressure_on_plate",
    "gap_pressure",
    "pressure_two_plates_stress",
    "pressure_three_plates_stress",
    "integrate_semi_infinite",
    "QuadratureSpec",
]

_NORM = 1.0 / (4.0 * math.pi ** 2)
_MODES = (Mode.H, Mode.E)


class Path(enum.Enum):
    KAPPA_ONLY_1D = "KappaOnly1D"
    GENERAL_2D = "General2D"


@dataclass(frozen=True)
class EnergyResult:
    """Energy per unit area (inverse length cubed)."""

    value: float
    error_estimate: float
    evaluations: int
    path: Path


@dataclass(frozen=True)
class PressureResult:
    """Pressure (inverse length to the fourth); positive pushes toward larger z."""

    value: float
    error_estimate: float
    evaluations: int
    path: Path
    method: str = "derivative"


# --- driver ----------------------------------------------------------------

def _choose_path(stack: Stack, path: Optional[Path]) -> Path:
    if path is None:
        return Path.KAPPA_ONLY_1D if stack.kappa_only else Path.GENERAL_2D
    path = Path(path)
    if path is Path.KAPPA_ONLY_1D and not stack.kappa_only:
        raise RequiresKappaOnly("the 1D path needs ζ-independent coefficients")
    return path


def _integrate(stack: Stack, spectral: Callable, spec: QuadratureSpec, path: Path) -> QuadResult:
    """(1/4π²) ∫ κ² spectral(ζ, κ) over the reduced measure.

    ``spectral`` returns ``(values, reference)`` arrays on a node set.
    """
    transform = half_line_map(spec.substitution, 0.0, stack.min_gap)
    try:
        if path is Path.KAPPA_ONLY_1D:
            def f1(v):
                kappa, jac = transform(v)
                w = kappa * kappa * jac
                val, ref = spectral(np.zeros_like(kappa), kappa)
                return w * val, w * ref

            res = integrate_unit_interval(f1, spec.tolerance(False), spec.abs_tol / _NORM, spec.max_subdivisions)
        else:
            def f2(v, s):
                kappa, jac = transform(v)
                w = kappa * kappa * jac
                val, ref = spectral(s * kappa, kappa)
                return w * val, w * ref

            res = integrate_unit_square(f2, spec.tolerance(True), spec.abs_tol / _NORM, spec.max_subdivisions)
    except FloatingPointError:
        raise DegenerateCavity(float("nan")) from None
    except QuadratureNotConverged as exc:
        raise QuadratureNotConverged(_NORM * exc.value, _NORM * exc.error, exc.evaluations) from None
    return QuadResult(_NORM * res.value, _NORM * res.error, res.evaluations)


def _check_stack(stack: Stack):
    if stack.n < 2:
        raise TooFewPlates(f"need at least two plates, got {stack.n}")


def _spec(spec):
    return spec if spec is not None else QuadratureSpec()


# --- energies --------------------------------------------------------------

def energy_per_area(stack: Stack, spec: QuadratureSpec | None = None, path: Path | None = None) -> EnergyResult:
    """Casimir energy per unit area of the whole stack.

    Parameters
    ----------
    stack : Stack
        At least two plates.
    spec : QuadratureSpec, optional
        Integration controls; ``rel_tol=None`` picks the per-path default.
    path : Path, optional
        Force a path. ``KAPPA_ONLY_1D`` requires ζ-independent plates.

    Returns
    -------
    EnergyResult

    Examples
    --------
    >>> from deltaplates import Plate, Stack
    >>> pair = Stack([Plate.perfect_e(0.0), Plate.perfect_e(1.0)])
    >>> round(energy_per_area(pair).value, 10)
    -0.0137077839
    """
    _check_stack(stack)
    spec = _spec(spec)
    path = _choose_path(stack, path)
    gaps = stack.gaps

    def spectral(zeta, kappa):
        total = np.zeros_like(kappa)
        for mode in _MODES:
            r, t = stack_arrays(stack, mode, zeta, kappa)
            total += kernels.log_delta(r, t, gaps, kappa)
        return total, total

    res = _integrate(stack, spectral, spec, path)
    return EnergyResult(res.value, res.error, res.evaluations, path)


def interaction_energy(left: Stack, right: Stack, gap: float, spec: QuadratureSpec | None = None,
                       path: Path | None = None) -> EnergyResult:
    """Interaction energy per area of two bodies facing each other across ``gap``.

    Only the round trip between the bodies is integrated,
    ln(1 - R^<_left R^>_right e^{-2κ gap}); each body's own Δ drops out.
    ``right`` is translated so its first plate sits ``gap`` beyond the last
    plate of ``left``.
    """
    if not gap > 0:
        raise InvalidInput(f"gap must be positive, got {gap!r}")
    shift = left.positions[-1] + gap - right.positions[0]
    joined = Stack(left.plates + right.translated(shift).plates)
    spec = _spec(spec)
    path = _choose_path(joined, path)
    cut = left.n - 1
    gaps = joined.gaps

    def spectral(zeta, kappa):
        total = np.zeros_like(kappa)
        for mode in _MODES:
            r, t = stack_arrays(joined, mode, zeta, kappa)
            total += np.log1p(-kernels.round_trips(r, t, gaps, kappa)[cut])
        return total, total

    res = _integrate(joined, spectral, spec, path)
    return EnergyResult(res.value, res.error, res.evaluations, path)


# --- pressures -------------------------------------------------------------

def _gap_derivative_integrand(stack: Stack, weights: dict):
    """Σ_k w_k ∂ ln Δ/∂ l_k for 0-based gap indices ``k``."""
    gaps = stack.gaps

    def spectral(zeta, kappa):
        val = np.zeros_like(kappa)
        ref = np.zeros_like(kappa)
        for mode in _MODES:
            r, t = stack_arrays(stack, mode, zeta, kappa)
            d = kernels.gap_log_derivatives(r, t, gaps, kappa)
            for k, w in weights.items():
                val += w * d[k]
                ref += np.abs(d[k])
        return val, ref

    return spectral


def pressure_on_plate(stack: Stack, i: int, spec: QuadratureSpec | None = None,
                      path: Path | None = None) -> PressureResult:
    """Pressure on plate ``i`` (1-based), -∂E/∂a_i.

    Moving plate i lengthens the gap on its left and shortens the one on its
    right, so P_i = ∂E/∂l_i - ∂E/∂l_{i-1} with missing gaps omitted.

    Examples
    --------
    >>> from deltaplates import Plate, Stack
    >>> pair = Stack([Plate.perfect_e(0.0), Plate.perfect_e(1.0)])
    >>> round(pressure_on_plate(pair, 2).value, 10)
    -0.0411233517
    """
    _check_stack(stack)
    if not (isinstance(i, (int, np.integer)) and 1 <= i <= stack.n):
        raise IndexOutOfRange(f"plate index {i!r} outside 1..{stack.n}")
    spec = _spec(spec)
    path = _choose_path(stack, path)
    weights = {}
    if i < stack.n:
        weights[i - 1] = 1.0
    if i > 1:
        weights[i - 2] = -1.0
    res = _integrate(stack, _gap_derivative_integrand(stack, weights), spec, path)
    return PressureResult(res.value, res.error, res.evaluations, path)


def gap_pressure(stack: Stack, gap_index: int, spec: QuadratureSpec | None = None,
                 path: Path | None = None) -> PressureResult:
    """-∂E/∂l for gap ``gap_index`` (between plates i and i+1).

    Negative means the gap wants to close.
    """
    _check_stack(stack)
    if not (isinstance(gap_index, (int, np.integer)) and 1 <= gap_index < stack.n):
        raise IndexOutOfRange(f"gap index {gap_index!r} outside 1..{stack.n - 1}")
    spec = _spec(spec)
    path = _choose_path(stack, path)
    res = _integrate(stack, _gap_derivative_integrand(stack, {gap_index - 1: -1.0}), spec, path)
    return PressureResult(res.value, res.error, res.evaluations, path)


# --- stress-tensor forms ---------------------------------------------------

def _ideal_amplitudes(stack: Stack, n: int):
    if stack.n != n:
        raise InvalidInput(f"this formula needs exactly {n} plates, got {stack.n}")
    if not stack.kappa_only:
        raise RequiresKappaOnly("stress-tensor formulas are restricted to ζ-independent plates")
    one = np.ones(1)
    return {mode: stack_arrays(stack, mode, 0.0 * one, one) for mode in _MODES}


def _stress(stack: Stack, kernel, spec) -> PressureResult:
    spec = _spec(spec)
    transform = half_line_map(spec.substitution, 0.0, stack.min_gap)

    def f(v):
        kappa, jac = transform(v)
        val, ref = kernel(kappa)
        w = kappa ** 3 * jac
        return w * val, w * ref

    try:
        res = integrate_unit_interval(f, spec.tolerance(False), spec.abs_tol * 2 * math.pi ** 2,
                                      spec.max_subdivisions)
    except FloatingPointError:
        raise DegenerateCavity(float("nan")) from None
    scale = -1.0 / (2.0 * math.pi ** 2)
    return PressureResult(scale * res.value, abs(scale) * res.error, res.evaluations,
                          Path.KAPPA_ONLY_1D, "stress")


def pressure_two_plates_stress(stack: Stack, spec: QuadratureSpec | None = None) -> PressureResult:
    """Pressure on plate 2 of an ideal pair from the stress tensor,

    -(1/2π²) ∫ κ³ dκ Σ_modes r1 r2 e^{-2κa} / Δ12.
    """
    amps = _ideal_amplitudes(stack, 2)
    a = float(stack.gaps[0])

    def kernel(kappa):
        val = np.zeros_like(kappa)
        for r, _ in amps.values():
            loop = r[0, 0] * r[1, 0] * np.exp(-2.0 * kappa * a)
            val += loop / (1.0 - loop)
        return val, val

    return _stress(stack, kernel, spec)


def pressure_three_plates_stress(stack: Stack, spec: QuadratureSpec | None = None) -> PressureResult:
    """Pressure on plate 3 of an ideal triple from the stress tensor,

    -(1/2π²) ∫ κ³ dκ Σ_modes [r2 r3 e^{-2κb} Δ12 + r1 t2² r3 e^{-2κ(a+b)}] / Δ123,

    with Δ123 = Δ12 Δ23 - r1 t2² r3 e^{-2κ(a+b)}.
    """
    amps = _ideal_amplitudes(stack, 3)
    a, b = (float(g) for g in stack.gaps)

    def kernel(kappa):
        val = np.zeros_like(kappa)
        ref = np.zeros_like(kappa)
        for r, t in amps.values():
            r1, r2, r3, t2 = r[0, 0], r[1, 0], r[2, 0], t[1, 0]
            d12 = 1.0 - r1 * r2 * np.exp(-2.0 * kappa * a)
            d23 = 1.0 - r2 * r3 * np.exp(-2.0 * kappa * b)
            far = r1 * t2 * t2 * r3 * np.exp(-2.0 * kappa * (a + b))
            d123 = d12 * d23 - far
            near = r2 * r3 * np.exp(-2.0 * kappa * b) * d12
            val += (near + far) / d123
            ref += (np.abs(near) + np.abs(far)) / np.abs(d123)
        return val, ref

    return _stress(stack, kernel, spec)
