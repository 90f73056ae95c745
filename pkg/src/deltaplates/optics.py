"""Single-plate optics for δ-function plates at imaginary frequency.

A plate at ``z = a`` carries an electric coupling ``lambda_e`` and a
magnetic coupling ``lambda_g`` (both lengths, natural units ħ = c = 1).
For the TM mode (``Mode.H``) the reflection and transmission amplitudes are

    r = -λg ζ² / (λg ζ² + 2κ) + λe κ / (λe κ + 2)
    t = 1 - λg ζ² / (λg ζ² + 2κ) - λe κ / (λe κ + 2)

and the TE mode (``Mode.E``) follows by exchanging λe and λg.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInput, NonPositiveKappa

__all__ = [
    "Mode",
    "PlateKind",
    "Plate",
    "SpectralPoint",
    "Coefficients",
    "coefficients",
    "coefficient_arrays",
]

# response(zeta) -> (lambda_e(iζ), lambda_g(iζ)); both broadcast against zeta
ResponseHook = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]


class Mode(enum.Enum):
    H = "H"  # TM
    E = "E"  # TE

    @property
    def other(self) -> "Mode":
        return Mode.E if self is Mode.H else Mode.H


class PlateKind(enum.Enum):
    MAGNETODIELECTRIC = "magnetodielectric"
    PERFECT_E = "perfect_e"
    PERFECT_M = "perfect_m"


# (r_H, r_E) of the ideal limits; t = 0 for both
_IDEAL_R = {
    PlateKind.PERFECT_E: (1.0, -1.0),
    PlateKind.PERFECT_M: (-1.0, 1.0),
}


@dataclass(frozen=True)
class Plate:
    """One δ-function plate.

    Use :meth:`magnetodielectric`, :meth:`perfect_e`, :meth:`perfect_m` or
    :meth:`vacuum` rather than the raw constructor.

    ``response`` optionally overrides the constant couplings with a
    dispersive model evaluated on the imaginary axis; it receives an array
    of ζ values and returns ``(lambda_e, lambda_g)``.
    """

    position: float
    kind: PlateKind = PlateKind.MAGNETODIELECTRIC
    lambda_e: float = 0.0
    lambda_g: float = 0.0
    response: Optional[ResponseHook] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "position", float(self.position))
        if not math.isfinite(self.position):
            raise InvalidInput(f"plate position must be finite, got {self.position!r}")
        if self.kind is PlateKind.MAGNETODIELECTRIC:
            for name in ("lambda_e", "lambda_g"):
                value = float(getattr(self, name))
                if not math.isfinite(value) or value < 0.0:
                    raise InvalidInput(f"{name} must be finite and >= 0, got {value!r}")
                object.__setattr__(self, name, value)
        elif self.response is not None:
            raise InvalidInput("ideal plates do not take a response hook")

    @classmethod
    def magnetodielectric(cls, position, lambda_e=0.0, lambda_g=0.0, response=None):
        return cls(position, PlateKind.MAGNETODIELECTRIC, lambda_e, lambda_g, response)

    @classmethod
    def vacuum(cls, position):
        return cls(position)

    @classmethod
    def perfect_e(cls, position):
        return cls(position, PlateKind.PERFECT_E)

    @classmethod
    def perfect_m(cls, position):
        return cls(position, PlateKind.PERFECT_M)

    @property
    def is_ideal(self) -> bool:
        return self.kind is not PlateKind.MAGNETODIELECTRIC

    @property
    def is_kappa_only(self) -> bool:
        """True when r and t do not depend on ζ (ideal or empty plates)."""
        if self.is_ideal:
            return True
        return self.response is None and self.lambda_e == 0.0 and self.lambda_g == 0.0

    def couplings(self, zeta):
        """(λe, λg) at imaginary frequency ζ."""
        if self.is_ideal:
            raise InvalidInput("ideal plates have no finite couplings")
        if self.response is None:
            return self.lambda_e, self.lambda_g
        lam_e, lam_g = self.response(np.asarray(zeta, dtype=float))
        return lam_e, lam_g

    def moved_to(self, position: float) -> "Plate":
        return Plate(position, self.kind, self.lambda_e, self.lambda_g, self.response)

    def swapped(self) -> "Plate":
        """The plate with electric and magnetic roles exchanged."""
        if self.kind is PlateKind.PERFECT_E:
            return Plate(self.position, PlateKind.PERFECT_M)
        if self.kind is PlateKind.PERFECT_M:
            return Plate(self.position, PlateKind.PERFECT_E)
        hook = None
        if self.response is not None:
            inner = self.response

            def hook(zeta):
                lam_e, lam_g = inner(zeta)
                return lam_g, lam_e

        return Plate(self.position, self.kind, self.lambda_g, self.lambda_e, hook)


@dataclass(frozen=True)
class SpectralPoint:
    """Euclidean frequency ζ and transverse wavenumber k⊥."""

    zeta: float
    kperp: float

    def __post_init__(self):
        if not (self.zeta >= 0.0 and self.kperp >= 0.0):
            raise InvalidInput("zeta and kperp must be non-negative")
        if not (math.isfinite(self.zeta) and math.isfinite(self.kperp)):
            raise InvalidInput("zeta and kperp must be finite")

    @property
    def kappa(self) -> float:
        return math.hypot(self.kperp, self.zeta)

    @classmethod
    def from_kappa(cls, zeta: float, kappa: float) -> "SpectralPoint":
        if kappa < zeta:
            raise InvalidInput("kappa must be >= zeta")
        return cls(zeta, math.sqrt((kappa - zeta) * (kappa + zeta)))


@dataclass(frozen=True)
class Coefficients:
    r: float
    t: float


def _md_coefficients(lam_e, lam_g, mode, zeta, kappa):
    if mode is Mode.E:
        lam_e, lam_g = lam_g, lam_e
    z2 = zeta * zeta
    magnetic = lam_g * z2 / (lam_g * z2 + 2.0 * kappa)
    electric = lam_e * kappa / (lam_e * kappa + 2.0)
    return electric - magnetic, (1.0 - magnetic) - electric


def coefficient_arrays(plate: Plate, mode: Mode, zeta, kappa):
    """Vectorised ``(r, t)`` over arrays of ζ and κ (κ > 0 assumed)."""
    zeta = np.asarray(zeta, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    shape = np.broadcast(zeta, kappa).shape
    if plate.is_ideal:
        r_h, r_e = _IDEAL_R[plate.kind]
        r = r_h if mode is Mode.H else r_e
        return np.full(shape, r), np.zeros(shape)
    lam_e, lam_g = plate.couplings(zeta)
    r, t = _md_coefficients(lam_e, lam_g, mode, zeta, kappa)
    return np.broadcast_to(r, shape).astype(float), np.broadcast_to(t, shape).astype(float)


def coefficients(plate: Plate, mode: Mode, sp: SpectralPoint) -> Coefficients:
    """Reflection and transmission amplitudes of one plate."""
    kappa = sp.kappa
    if not kappa > 0.0:
        raise NonPositiveKappa(f"kappa must be positive, got {kappa!r}")
    if plate.is_ideal:
        r_h, r_e = _IDEAL_R[plate.kind]
        return Coefficients(r_h if mode is Mode.H else r_e, 0.0)
    lam_e, lam_g = plate.couplings(sp.zeta)
    r, t = _md_coefficients(float(lam_e), float(lam_g), mode, sp.zeta, kappa)
    return Coefficients(float(r), float(t))
