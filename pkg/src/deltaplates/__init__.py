"""Casimir energies and pressures of stacked δ-function plates."""
from ._jit import backend
from .errors import *  # noqa: F401,F403
from .greens import GreensQuery, RegionMatrix, check_jump_conditions, check_ode_residual, greens_value, region_matrix
from .integrate import QuadratureSpec, QuadResult, Substitution, integrate_semi_infinite
from .optics import Coefficients, Mode, Plate, PlateKind, SpectralPoint, coefficients
from .quadrature import (
    EnergyResult,
    Path,
    PressureResult,
    energy_per_area,
    gap_pressure,
    interaction_energy,
    pressure_on_plate,
    pressure_three_plates_stress,
    pressure_two_plates_stress,
)
from .scattering import (
    CompositeCoefficients,
    Stack,
    combine,
    composite,
    delta_chain,
    delta_far,
    delta_nn,
    enumerate_chains,
)

__version__ = "0.1.0"
