import math

import numpy as np
import pytest

from harvestkit.exceptions import ConfigError, DomainError
from harvestkit.medium import (
    bogoliubov_is_monotone,
    crossover_scale,
    describe_preset,
    fits_in_condensate,
    get_preset,
    omega,
    omega_reduced,
    reduce,
    rubidium_preset,
    small_k_deviation,
    u_over_omega,
    unreduce,
)
from harvestkit.models import (
    Branch,
    DetectorPairConfig,
    DimensionlessPoint,
    MediumParams,
)


class TestOmega:
    def test_zero_wavenumber(self):
        assert omega(0.0, MediumParams(1.0, 1.0)) == 0.0

    def test_linear_without_dispersion(self):
        assert omega(2.0, MediumParams(1.0, 0.0)) == pytest.approx(2.0)

    def test_bogoliubov_unit_values(self):
        assert omega(1.0, MediumParams(1.0, 1.0)) == pytest.approx(math.sqrt(2.0))

    def test_linear_branch_ignores_dispersion(self):
        medium = MediumParams(1.0, 5.0, Branch.LINEAR)
        assert omega(3.0, medium) == pytest.approx(3.0)

    def test_vectorized(self):
        k = np.array([0.0, 0.5, 1.0])
        w = omega(k, MediumParams(1.0, 1.0))
        np.testing.assert_allclose(w, k * np.sqrt(1 + k ** 2))

    def test_subsonic_beyond_crossover_rejected(self):
        medium = MediumParams(1.0, 1.0, Branch.SUBSONIC)
        assert omega(0.5, medium) == pytest.approx(0.5 * math.sqrt(0.75))
        with pytest.raises(DomainError):
            omega(1.5, medium)

    def test_negative_wavenumber_rejected(self):
        with pytest.raises(DomainError):
            omega(-1.0, MediumParams(1.0))

    def test_invalid_medium(self):
        with pytest.raises(DomainError):
            MediumParams(0.0)
        with pytest.raises(DomainError):
            MediumParams(1.0, -1.0)


class TestReduced:
    def test_matches_si(self):
        medium = MediumParams(2.0, 0.3)
        T = 0.7
        k = np.linspace(0.0, 3.0, 11)
        delta = medium.dispersion_strength / (medium.sound_speed ** 2 * T)
        np.testing.assert_allclose(
            omega_reduced(k * medium.sound_speed * T, delta), omega(k, medium) * T,
            rtol=1e-13,
        )

    def test_u_over_omega_finite_at_zero(self):
        assert u_over_omega(0.0, 0.1) == 1.0
        assert u_over_omega(0.0, 0.1, Branch.SUBSONIC) == 1.0

    def test_subsonic_reduced_domain(self):
        with pytest.raises(DomainError):
            u_over_omega(np.array([0.5, 2.0]), 1.0, Branch.SUBSONIC)

    def test_monotone_and_small_k(self):
        assert bogoliubov_is_monotone(1e-2, 1e3)
        medium = MediumParams(1.0, 0.5)
        assert small_k_deviation(medium) <= 1e-4


class TestCrossover:
    def test_unit_values(self):
        assert crossover_scale(MediumParams(1.0, 0.5)) == pytest.approx(2.0)

    def test_rubidium(self):
        medium, _, preset = rubidium_preset()
        assert crossover_scale(medium) == pytest.approx(
            math.sqrt(2) / preset.healing_length
        )
        assert crossover_scale(medium) == pytest.approx(2.242e7, rel=1e-3)

    def test_undefined_without_dispersion(self):
        with pytest.raises(DomainError):
            crossover_scale(MediumParams(1.0, 0.0))
        with pytest.raises(DomainError):
            crossover_scale(MediumParams(1.0, 1.0, Branch.LINEAR))


class TestReduction:
    def test_rubidium_groups(self):
        medium, detectors, preset = rubidium_preset()
        point = reduce(detectors, medium)
        assert preset.sound_speed * preset.pulse_width == pytest.approx(24e-6)
        assert point.s == pytest.approx(0.125)
        assert point.b == pytest.approx(1.0)
        assert point.a == pytest.approx(1.0)
        assert point.delta == pytest.approx(1.86e-3, rel=1e-2)
        assert 40 <= preset.spot_size / preset.healing_length <= 60

    def test_round_trip(self):
        medium = MediumParams(8e-3, 3.57e-10)
        point = DimensionlessPoint(a=0.37, b=2.5, s=0.2, delta=1.86e-3)
        back = reduce(unreduce(point, medium), medium)
        for name in ('a', 'b', 's', 'delta'):
            assert getattr(back, name) == pytest.approx(getattr(point, name), rel=1e-12)

    def test_explicit_pulse_width(self):
        medium = MediumParams(1.0)
        config = unreduce(DimensionlessPoint(a=2.0, b=3.0, s=0.5), medium, 2.0)
        assert config.gap == pytest.approx(1.0)
        assert config.separation == pytest.approx(6.0)
        assert config.spot_size == pytest.approx(1.0)

    def test_pulse_width_required_without_dispersion(self):
        with pytest.raises(DomainError):
            unreduce(DimensionlessPoint(a=1.0, b=1.0, s=0.1), MediumParams(1.0))

    def test_invalid_detector(self):
        with pytest.raises(DomainError):
            DetectorPairConfig(gap=1.0, pulse_width=0.0, spot_size=1.0, separation=1.0)


class TestPresets:
    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            get_preset('sodium')

    def test_name_normalised(self):
        assert get_preset(' Rubidium ')[2].name == 'rubidium'

    def test_describe(self):
        summary = describe_preset(rubidium_preset()[2])
        assert summary['dimensionless']['b_boundary'] == pytest.approx(4.25)
        assert summary['si']['crossover_scale'] == pytest.approx(2.242e7, rel=1e-3)

    def test_fits_in_condensate(self):
        _, detectors, preset = rubidium_preset()
        assert fits_in_condensate(detectors, preset)
        far = DetectorPairConfig(
            gap=1.0, pulse_width=3e-3, spot_size=3e-6, separation=2e-4
        )
        assert not fits_in_condensate(far, preset)
