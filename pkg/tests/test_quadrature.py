import math

import numpy as np
import pytest

from deltaplates import (
    EnergyResult,
    Path,
    Plate,
    QuadratureSpec,
    Stack,
    energy_per_area,
    gap_pressure,
    interaction_energy,
    pressure_on_plate,
    pressure_three_plates_stress,
    pressure_two_plates_stress,
)
from deltaplates.errors import (
    IndexOutOfRange,
    InvalidInput,
    QuadratureNotConverged,
    RequiresKappaOnly,
    TooFewPlates,
)

from conftest import random_md_stack

PI2 = math.pi ** 2


def pair(d, left=Plate.perfect_e, right=Plate.perfect_e):
    return Stack([left(0.0), right(d)])


class TestIdealPlates:
    @pytest.mark.parametrize("d", [0.5, 1.0, 3.0])
    def test_conducting_pair(self, d):
        assert energy_per_area(pair(d)).value == pytest.approx(-PI2 / (720 * d ** 3), rel=1e-9)
        assert pressure_on_plate(pair(d), 2).value == pytest.approx(-PI2 / (240 * d ** 4), rel=1e-9)
        assert pressure_on_plate(pair(d), 1).value == pytest.approx(PI2 / (240 * d ** 4), rel=1e-9)

    def test_electric_magnetic_pair_repels(self):
        stack = pair(1.0, Plate.perfect_e, Plate.perfect_m)
        assert energy_per_area(stack).value == pytest.approx(7 / 8 * PI2 / 720, rel=1e-9)
        assert pressure_on_plate(stack, 2).value > 0

    def test_opaque_middle_decouples(self, pe_triple):
        a, b = pe_triple.gaps
        want = -PI2 / 720 * (a ** -3 + b ** -3)
        assert energy_per_area(pe_triple).value == pytest.approx(want, rel=1e-9)
        outer = pressure_on_plate(pe_triple, 3).value
        assert outer == pytest.approx(-PI2 / (240 * b ** 4), rel=1e-9)

    def test_symmetric_middle_plate_feels_nothing(self):
        stack = Stack([Plate.perfect_e(0.0), Plate.magnetodielectric(1.0, 2.0, 0.5), Plate.perfect_e(2.0)])
        res = pressure_on_plate(stack, 2)
        assert abs(res.value) <= 1e-12 + 10 * res.error_estimate

    def test_vacuum_stack_has_no_energy(self):
        stack = Stack([Plate.vacuum(0.0), Plate.vacuum(1.0), Plate.vacuum(2.5)])
        res = energy_per_area(stack)
        assert res.value == 0.0 and res.path is Path.KAPPA_ONLY_1D

    def test_scaling_with_distance(self):
        e1 = energy_per_area(pair(1.0, Plate.perfect_e, Plate.perfect_m)).value
        e2 = energy_per_area(pair(2.0, Plate.perfect_e, Plate.perfect_m)).value
        assert e1 / e2 == pytest.approx(8.0, rel=1e-9)


class TestStress:
    @pytest.mark.parametrize("kinds", [(Plate.perfect_e,) * 2, (Plate.perfect_e, Plate.perfect_m)])
    def test_pair_matches_derivative(self, kinds):
        stack = pair(1.3, *kinds)
        got = pressure_two_plates_stress(stack)
        assert got.method == "stress"
        assert got.value == pytest.approx(pressure_on_plate(stack, 2).value, rel=1e-9)

    def test_triple_matches_derivative(self):
        stack = Stack([Plate.perfect_m(0.0), Plate.vacuum(0.7), Plate.perfect_e(1.9)])
        assert pressure_three_plates_stress(stack).value == pytest.approx(
            pressure_on_plate(stack, 3).value, rel=1e-9
        )

    def test_transparent_middle_reduces_to_pair(self):
        triple = Stack([Plate.perfect_e(0.0), Plate.vacuum(0.4), Plate.perfect_e(1.0)])
        assert pressure_three_plates_stress(triple).value == pytest.approx(
            pressure_two_plates_stress(pair(1.0)).value, rel=1e-10
        )

    def test_restrictions(self, md_triple, pe_triple):
        with pytest.raises(RequiresKappaOnly):
            pressure_three_plates_stress(md_triple)
        with pytest.raises(InvalidInput):
            pressure_two_plates_stress(pe_triple)


class TestGeneral:
    def test_paths_agree_for_kappa_only(self, pe_triple):
        one = energy_per_area(pe_triple, QuadratureSpec(rel_tol=1e-10), path=Path.KAPPA_ONLY_1D)
        two = energy_per_area(pe_triple, QuadratureSpec(rel_tol=1e-10), path=Path.GENERAL_2D)
        assert two.path is Path.GENERAL_2D
        assert one.value == pytest.approx(two.value, rel=1e-8)

    def test_1d_path_rejected_for_md(self, md_triple):
        with pytest.raises(RequiresKappaOnly):
            energy_per_area(md_triple, path=Path.KAPPA_ONLY_1D)

    def test_too_few_plates(self):
        with pytest.raises(TooFewPlates):
            energy_per_area(Stack([Plate.perfect_e(0.0)]))

    def test_index_checks(self, md_triple):
        with pytest.raises(IndexOutOfRange):
            pressure_on_plate(md_triple, 0)
        with pytest.raises(IndexOutOfRange):
            gap_pressure(md_triple, 3)

    def test_energy_is_monotone_in_gap(self):
        energies = [energy_per_area(pair(d, lambda z: Plate.magnetodielectric(z, 2.0, 0.3),
                                        lambda z: Plate.magnetodielectric(z, 1.0, 0.1))).value
                    for d in (0.5, 1.0, 2.0)]
        assert energies[0] < energies[1] < energies[2] < 0

    def test_gap_pressure_is_sum_of_plate_pressures(self, md_triple):
        # moving the right part rigidly: P_2 + P_3 equals -dE/dl_1
        total = pressure_on_plate(md_triple, 2).value + pressure_on_plate(md_triple, 3).value
        assert gap_pressure(md_triple, 1).value == pytest.approx(total, rel=1e-6)

    def test_pressures_sum_to_zero(self, md_triple):
        total = sum(pressure_on_plate(md_triple, i).value for i in range(1, 4))
        assert abs(total) < 1e-6 * abs(pressure_on_plate(md_triple, 1).value)

    def test_result_types(self, md_triple):
        res = energy_per_area(md_triple)
        assert isinstance(res, EnergyResult)
        assert res.path is Path.GENERAL_2D and res.evaluations > 0 and res.error_estimate >= 0

    def test_non_convergence(self, md_triple):
        with pytest.raises(QuadratureNotConverged) as info:
            energy_per_area(md_triple, QuadratureSpec(rel_tol=1e-14, max_subdivisions=20))
        converged = energy_per_area(md_triple).value
        assert info.value.value == pytest.approx(converged, rel=1e-3)
        assert info.value.error > 0


class TestInteraction:
    def test_energy_splits_into_bodies_and_interaction(self):
        rng = np.random.default_rng(11)
        stack = random_md_stack(rng, 4, gap_range=(0.5, 1.5))
        left, right = stack.sub(1, 2), stack.sub(3, 4)
        gap = float(stack.gaps[1])
        spec = QuadratureSpec(rel_tol=1e-10)
        whole = energy_per_area(stack, spec).value
        parts = energy_per_area(left, spec).value + energy_per_area(right, spec).value
        inter = interaction_energy(left, right, gap, spec).value
        assert whole == pytest.approx(parts + inter, rel=1e-8)

    def test_vacuum_partner(self, md_triple):
        right = Stack([Plate.vacuum(0.0)])
        assert interaction_energy(md_triple, right, 1.0).value == 0.0

    def test_pair_interaction_is_pair_energy(self):
        res = interaction_energy(Stack([Plate.perfect_e(0.0)]), Stack([Plate.perfect_e(5.0)]), 1.0)
        assert res.value == pytest.approx(-PI2 / 720, rel=1e-9)

    def test_bad_gap(self, md_triple):
        with pytest.raises(InvalidInput):
            interaction_energy(md_triple, md_triple, 0.0)
