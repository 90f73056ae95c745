import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from deltaplates import Coefficients, Mode, Plate, PlateKind, SpectralPoint, coefficients
from deltaplates.errors import InvalidInput, NonPositiveKappa
from deltaplates.optics import coefficient_arrays

lam = st.floats(min_value=0.0, max_value=1e3, allow_nan=False)
positive = st.floats(min_value=1e-6, max_value=1e3, allow_nan=False)


def reference(lam_e, lam_g, mode, zeta, kappa):
    # written out independently of the module
    if mode is Mode.E:
        lam_e, lam_g = lam_g, lam_e
    a = lam_g * zeta ** 2 / (lam_g * zeta ** 2 + 2 * kappa)
    b = lam_e * kappa / (lam_e * kappa + 2)
    return -a + b, 1 - a - b


class TestCoefficients:
    @pytest.mark.parametrize("mode", list(Mode))
    def test_matches_closed_form(self, mode):
        plate = Plate.magnetodielectric(0.0, 2.0, 3.0)
        sp = SpectralPoint(0.7, 1.1)
        r, t = reference(2.0, 3.0, mode, sp.zeta, sp.kappa)
        c = coefficients(plate, mode, sp)
        assert c.r == pytest.approx(r, rel=1e-15)
        assert c.t == pytest.approx(t, rel=1e-15)

    @pytest.mark.parametrize(
        "kind, mode, r",
        [
            (PlateKind.PERFECT_E, Mode.H, 1.0),
            (PlateKind.PERFECT_E, Mode.E, -1.0),
            (PlateKind.PERFECT_M, Mode.H, -1.0),
            (PlateKind.PERFECT_M, Mode.E, 1.0),
        ],
    )
    def test_ideal_limits(self, kind, mode, r):
        assert coefficients(Plate(0.0, kind), mode, SpectralPoint(0.3, 0.4)) == Coefficients(r, 0.0)

    def test_large_coupling_approaches_perfect_e(self):
        sp = SpectralPoint(0.5, 1.0)
        plate = Plate.magnetodielectric(0.0, 1e12, 0.0)
        for mode in Mode:
            ideal = coefficients(Plate.perfect_e(0.0), mode, sp)
            c = coefficients(plate, mode, sp)
            assert c.r == pytest.approx(ideal.r, abs=1e-10)
            assert c.t == pytest.approx(0.0, abs=1e-10)

    def test_vacuum_plate_is_transparent(self):
        c = coefficients(Plate.vacuum(1.0), Mode.H, SpectralPoint(0.2, 0.3))
        assert (c.r, c.t) == (0.0, 1.0)

    def test_purely_electric_plate_in_h_mode(self):
        # with no magnetic coupling, r + t = 1
        c = coefficients(Plate.magnetodielectric(0.0, 4.0, 0.0), Mode.H, SpectralPoint(0.5, 2.0))
        assert c.r + c.t == pytest.approx(1.0, abs=1e-15)

    def test_zero_kappa_rejected(self):
        with pytest.raises(NonPositiveKappa):
            coefficients(Plate.magnetodielectric(0.0, 1.0, 1.0), Mode.H, SpectralPoint(0.0, 0.0))

    @given(lam_e=lam, lam_g=lam, zeta=positive, frac=st.floats(0.0, 1.0))
    def test_amplitudes_bounded(self, lam_e, lam_g, zeta, frac):
        kappa = zeta / max(frac, 1e-3)
        sp = SpectralPoint.from_kappa(zeta, kappa)
        for mode in Mode:
            c = coefficients(Plate.magnetodielectric(0.0, lam_e, lam_g), mode, sp)
            assert -1.0 <= c.r <= 1.0
            assert -1.0 <= c.t <= 1.0

    @given(lam_e=lam, lam_g=lam, zeta=positive, kperp=positive)
    def test_mode_swap(self, lam_e, lam_g, zeta, kperp):
        sp = SpectralPoint(zeta, kperp)
        plate = Plate.magnetodielectric(0.0, lam_e, lam_g)
        for mode in Mode:
            assert coefficients(plate, mode, sp) == coefficients(plate.swapped(), mode.other, sp)

    def test_arrays_match_scalar(self):
        plate = Plate.magnetodielectric(0.0, 1.3, 0.4)
        kappa = np.array([0.1, 1.0, 7.0])
        zeta = kappa * np.array([0.0, 0.5, 0.99])
        r, t = coefficient_arrays(plate, Mode.E, zeta, kappa)
        for k in range(3):
            c = coefficients(plate, Mode.E, SpectralPoint.from_kappa(zeta[k], kappa[k]))
            assert (r[k], t[k]) == pytest.approx((c.r, c.t), rel=1e-14)

    def test_response_hook(self):
        def drude(zeta):
            return 2.0 / (1.0 + zeta), 0.5 * np.ones_like(zeta)

        plate = Plate.magnetodielectric(0.0, response=drude)
        assert not plate.is_kappa_only
        sp = SpectralPoint(1.0, 1.0)
        r, t = reference(1.0, 0.5, Mode.H, sp.zeta, sp.kappa)
        c = coefficients(plate, Mode.H, sp)
        assert (c.r, c.t) == pytest.approx((r, t), rel=1e-14)
        swapped = coefficients(plate.swapped(), Mode.E, sp)
        assert (swapped.r, swapped.t) == pytest.approx((c.r, c.t), rel=1e-15)


class TestPlate:
    @pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
    def test_rejects_bad_couplings(self, bad):
        with pytest.raises(InvalidInput):
            Plate.magnetodielectric(0.0, bad, 0.0)

    def test_rejects_non_finite_position(self):
        with pytest.raises(InvalidInput):
            Plate.perfect_e(math.inf)

    def test_kappa_only(self):
        assert Plate.perfect_e(0.0).is_kappa_only
        assert Plate.vacuum(0.0).is_kappa_only
        assert not Plate.magnetodielectric(0.0, 1.0, 0.0).is_kappa_only

    def test_swap_exchanges_ideal_kinds(self):
        assert Plate.perfect_e(2.0).swapped() == Plate.perfect_m(2.0)
        assert Plate.perfect_m(2.0).swapped().swapped() == Plate.perfect_m(2.0)


class TestSpectralPoint:
    def test_kappa(self):
        assert SpectralPoint(3.0, 4.0).kappa == 5.0

    def test_from_kappa_round_trip(self):
        sp = SpectralPoint.from_kappa(0.6, 1.0)
        assert sp.kperp == pytest.approx(0.8)
        assert sp.kappa == pytest.approx(1.0, rel=1e-15)

    def test_rejects_negative(self):
        with pytest.raises(InvalidInput):
            SpectralPoint(-1.0, 1.0)
        with pytest.raises(InvalidInput):
            SpectralPoint.from_kappa(2.0, 1.0)
