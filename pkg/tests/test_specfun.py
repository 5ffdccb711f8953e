import math
import warnings

import numpy as np
import pytest

from harvestkit.exceptions import ConfigError, ConvergenceError
from harvestkit.models import QuadratureSpec
from harvestkit.response import g1, g2
from harvestkit.specfun import (
    bessel_j0,
    double_time_integral_oracle,
    erfc_imag_scaled,
    exp_scaled_erfi,
    initial_panels,
    integrate_radial,
    single_time_integral_oracle,
    trapezoid_radial_oracle,
)


class TestScaledFunctions:
    def test_bessel_values(self):
        assert bessel_j0(0.0) == 1.0
        assert abs(bessel_j0(2.404825557695773)) < 1e-14
        assert bessel_j0(-3.0) == bessel_j0(3.0)

    def test_bessel_asymptote(self):
        x = 100.0
        asymptote = math.sqrt(2 / (math.pi * x)) * math.cos(x - math.pi / 4)
        assert abs(bessel_j0(x) - asymptote) < 1e-3

    def test_erfi_scaled(self):
        assert exp_scaled_erfi(0.0) == 0.0
        assert exp_scaled_erfi(50.0) == pytest.approx(1 / (50 * math.sqrt(math.pi)),
                                                      rel=1e-2)

    def test_finite_over_large_range(self):
        x = np.geomspace(1e-6, 1e6, 200)
        assert np.all(np.isfinite(exp_scaled_erfi(x)))
        assert np.all(np.isfinite(erfc_imag_scaled(x)))

    def test_erfc_imag_scaled_at_zero(self):
        assert erfc_imag_scaled(0.0) == pytest.approx(1.0 + 0j)


class TestPanels:
    def test_panel_width_follows_oscillation(self):
        spec = QuadratureSpec()
        _, coarse = initial_panels(80.0, 0.0, spec)
        _, fine = initial_panels(80.0, 20.0, spec)
        assert coarse == 80
        assert fine == math.ceil(80.0 / (math.pi / 40.0))


class TestIntegrateRadial:
    def test_polynomial(self):
        outcome = integrate_radial(lambda u: u * u, QuadratureSpec(), u_max=3.0)
        assert outcome.value == pytest.approx(9.0, rel=1e-12)
        assert outcome.converged

    def test_vector_complex(self):
        def f(u):
            return np.array([np.exp(-u), 1j * np.exp(-2 * u)])

        outcome = integrate_radial(f, QuadratureSpec(), u_max=40.0)
        np.testing.assert_allclose(outcome.value, [1.0, 0.5j], rtol=1e-10)

    def test_oscillatory_bessel(self):
        # ∫_0^∞ J0(bu) e^{-u} du = 1/√(1 + b²)
        b = 30.0
        outcome = integrate_radial(
            lambda u: bessel_j0(b * u) * np.exp(-u), QuadratureSpec(),
            oscillation_scale=b, u_max=60.0,
        )
        assert outcome.value == pytest.approx(1 / math.sqrt(1 + b * b), rel=1e-8)

    def test_zero_range(self):
        assert integrate_radial(lambda u: 1.0, QuadratureSpec(), u_max=0.0).value == 0

    def test_linear(self):
        spec = QuadratureSpec()

        def f(u):
            return np.exp(-u) * np.cos(3 * u)

        def g(u):
            return u * np.exp(-u * u)

        combined = integrate_radial(lambda u: 2 * f(u) - 3 * g(u), spec, u_max=20.0)
        separate = (2 * integrate_radial(f, spec, u_max=20.0).value
                    - 3 * integrate_radial(g, spec, u_max=20.0).value)
        assert combined.value == pytest.approx(separate, abs=1e-12)

    def test_deterministic(self):
        spec = QuadratureSpec()
        first = integrate_radial(lambda u: np.sin(u) ** 2, spec, u_max=10.0)
        second = integrate_radial(lambda u: np.sin(u) ** 2, spec, u_max=10.0)
        assert first == second

    def test_budget_exhausted(self):
        spec = QuadratureSpec(max_subdivisions=1, rel_tol=1e-14, abs_tol=1e-300)
        with pytest.raises(ConvergenceError) as info:
            integrate_radial(lambda u: np.sin(200 * u * u), spec, u_max=5.0)
        assert info.value.result is not None
        assert not info.value.result.converged

    def test_requires_cutoff(self):
        with pytest.raises(ConfigError):
            integrate_radial(lambda u: u, QuadratureSpec())


class TestQuadratureSpec:
    def test_cutoff(self):
        assert QuadratureSpec().cutoff(0.125) == pytest.approx(80.0)
        assert QuadratureSpec(u_max=12.0).cutoff(0.125) == 12.0

    def test_rejects_small_cutoff_factor(self):
        with pytest.raises(ConfigError):
            QuadratureSpec(u_max_factor=4.0)

    def test_halved(self):
        assert QuadratureSpec().halved().rel_tol == pytest.approx(5e-10)


class TestOracles:
    def test_trapezoid_oracle(self):
        value = trapezoid_radial_oracle(lambda u: np.exp(-u), 40.0, n=200_001)
        assert value == pytest.approx(1.0, rel=1e-8)

    def test_single_time(self):
        assert single_time_integral_oracle(0.0, 0.0) == pytest.approx(
            math.sqrt(2 * math.pi), rel=1e-12
        )

    def test_double_time_at_origin(self):
        value = double_time_integral_oracle(0.0, 0.0)
        assert value.real == pytest.approx(2 * math.pi, rel=1e-8)
        assert abs(value.imag) < 1e-10

    def test_richardson_improves(self):
        exact = g2(1.0, 1.0)
        plain = double_time_integral_oracle(1.0, 1.0, n=200, extrapolate=False)
        better = double_time_integral_oracle(1.0, 1.0, n=200)
        assert abs(better - exact) <= abs(plain - exact)

    def test_minimum_resolution(self):
        with pytest.raises(ConfigError):
            double_time_integral_oracle(1.0, 1.0, n=50)

    def test_extrapolated_trapezoid(self):
        plain = trapezoid_radial_oracle(lambda u: u * np.exp(-u), 40.0, n=401)
        better = trapezoid_radial_oracle(
            lambda u: u * np.exp(-u), 40.0, n=401, extrapolate=True
        )
        assert abs(better - 1.0) < 1e-2 * abs(plain - 1.0)

    def test_single_time_quiet_and_exact(self):
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            value = single_time_integral_oracle(1.0, 1.0)
        assert value == pytest.approx(g1(1.0, 1.0), rel=1e-12)

    def test_oracles_accept_arrays(self):
        w = np.array([0.0, 1.0, 3.0])
        single = single_time_integral_oracle(1.0, w)
        double = double_time_integral_oracle(1.0, w, n=400)
        assert single.shape == double.shape == (3,)
        for i, value in enumerate(w):
            assert single[i] == pytest.approx(single_time_integral_oracle(1.0, value))
            assert double[i] == pytest.approx(
                double_time_integral_oracle(1.0, value, n=400), rel=1e-12
            )
