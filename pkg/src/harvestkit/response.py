"""
探測器響應

高斯開關與光斑下的二階約化密度矩陣元。以 u = k·cT、w = ωT 表示，
徑向測度

    μ(u) = (u / 2w) · F̃(su)² / 2π

對 L、L_AB、M 三者一致地保留 d²k 中的 |k|；(2+1) 維測度中剩下的
1/(cT) 因子併入 λ² 的單位，所有結果以 λ²T² 為單位。

    L    = ∫ μ · g1(a, w)²
    L_AB = ∫ μ · J0(bu) · g1(a, w)²
    M    = −∫ μ · J0(bu) · g2(a, w)
"""

import logging

import numpy as np

from .exceptions import ConvergenceError, DomainError
from .medium import u_over_omega
from .models import (
    Branch,
    DimensionlessPoint,
    IntegralResult,
    MatrixElements,
    QuadratureSpec,
    Smearing,
)
from .specfun import bessel_j0, erfc_imag_scaled, integrate_radial

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
SQRT_TWO_PI = np.sqrt(TWO_PI)


def smearing_ft(s: float, u, kind: Smearing = Smearing.GAUSSIAN):
    """光斑的傅里葉變換 F̃(su)：高斯為 e^{-s²u²/2}，點狀為 1"""
    if Smearing(kind) is Smearing.POINTLIKE:
        return np.ones_like(np.asarray(u, dtype=float))
    return np.exp(-0.5 * (s * u) ** 2)


def g1(a, w):
    """∫ e^{-t²/2} e^{i(a+w)t} dt = √(2π)·e^{-(a+w)²/2} (單位 T)"""
    return SQRT_TWO_PI * np.exp(-0.5 * (a + w) ** 2)


def g2(a, w):
    """
    2∬_{t'<t} e^{ia(t+t')} e^{-iw(t-t')} e^{-(t²+t'²)/2} (單位 T²)

    = 2π·e^{-a²}·e^{-w²}erfc(iw)
    """
    return TWO_PI * np.exp(-a * a) * erfc_imag_scaled(w)


def _check_cutoff(point: DimensionlessPoint, u_max: float):
    if point.branch is Branch.SUBSONIC and point.delta * u_max >= 1.0:
        raise DomainError(
            f"subsonic branch: cutoff u_max = {u_max:.4g} reaches the crossover "
            f"scale 1/δ = {1.0 / point.delta:.4g}"
        )


def radial_measure(point: DimensionlessPoint, u):
    """μ(u) 與 w(u)"""
    ratio = u_over_omega(u, point.effective_delta, point.branch)
    w = u / ratio
    f2 = smearing_ft(point.s, u, point.smearing) ** 2
    return 0.5 * ratio * f2 / TWO_PI, w


def element_integrand(point: DimensionlessPoint):
    """
    L、L_AB、Re M、Im M 的向量被積函數

    對標量 u 返回形狀 (4,)，對數組返回 (4, n)，可直接用於梯形 oracle。
    """
    a, b = point.a, point.b

    def integrand(u):
        u = np.asarray(u, dtype=float)
        mu, w = radial_measure(point, u)
        local = mu * TWO_PI * np.exp(-(a + w) ** 2)
        bessel = bessel_j0(b * u)
        nonlocal_ = -mu * bessel * g2(a, w)
        return np.stack([local, local * bessel, nonlocal_.real, nonlocal_.imag])

    return integrand


def _integrate(point, spec, integrand) -> IntegralResult:
    u_max = spec.cutoff(point.s)
    _check_cutoff(point, u_max)
    return integrate_radial(
        integrand, spec, oscillation_scale=point.b, u_max=u_max
    )


def _to_elements(values, error, subdivisions) -> MatrixElements:
    L, L_ab, M_re, M_im = (float(v) for v in values)
    return MatrixElements(
        L_aa=L,
        L_bb=L,
        L_ab=complex(L_ab, 0.0),
        M=complex(M_re, M_im),
        error_estimate=error,
        subdivisions=subdivisions,
    )


def compute_elements(
    point: DimensionlessPoint,
    spec: QuadratureSpec | None = None,
    coupling: float = 1.0,
) -> MatrixElements:
    """
    一次積分得到全部四個矩陣元

    參數:
        point: 無量綱參數點
        spec: 積分規格
        coupling: λ；結果乘以 λ²

    異常:
        DomainError: 次聲速分支截斷越過 k_c
        ConvergenceError: 積分未收斂，result 為 MatrixElements 最佳估計
    """
    spec = spec or QuadratureSpec()
    if coupling < 0:
        raise DomainError(f"coupling must be >= 0, got {coupling}")
    try:
        outcome = _integrate(point, spec, element_integrand(point))
    except ConvergenceError as exc:
        best = exc.result
        if best is not None:
            exc.result = _to_elements(
                best.value, best.error_estimate, best.subdivisions_used
            ).scaled(coupling ** 2)
        raise
    elements = _to_elements(
        outcome.value, outcome.error_estimate, outcome.subdivisions_used
    )
    return elements.scaled(coupling ** 2)


def matrix_element_L(point: DimensionlessPoint, spec: QuadratureSpec | None = None):
    """單個探測器的激發概率 L/(λ²T²)，實數且 ≥ 0"""
    spec = spec or QuadratureSpec()
    integrand = element_integrand(point)
    outcome = _integrate(point, spec, lambda u: integrand(u)[0])
    return IntegralResult(
        value=max(float(outcome.value), 0.0),
        error_estimate=outcome.error_estimate,
        subdivisions_used=outcome.subdivisions_used,
        converged=outcome.converged,
    )


def matrix_element_Lab(point: DimensionlessPoint, spec: QuadratureSpec | None = None):
    """交叉項 L_AB/(λ²T²)，相同探測器時為實數"""
    spec = spec or QuadratureSpec()
    integrand = element_integrand(point)
    return _integrate(point, spec, lambda u: integrand(u)[1])


def matrix_element_M(point: DimensionlessPoint, spec: QuadratureSpec | None = None):
    """非局域項 M/(λ²T²)，複數"""
    spec = spec or QuadratureSpec()
    integrand = element_integrand(point)
    outcome = _integrate(point, spec, lambda u: integrand(u)[2:])
    re, im = outcome.value
    return IntegralResult(
        value=complex(re, im),
        error_estimate=outcome.error_estimate,
        subdivisions_used=outcome.subdivisions_used,
        converged=outcome.converged,
    )


def transition_amplitude(mode_gap: float) -> complex:
    """連續模式的躍遷振幅 ⟨1_K|ℰ|0⟩ = 2i·√(π·(Ω_K T)³)"""
    if mode_gap <= 0:
        raise DomainError(f"continuous-mode gap must be > 0, got {mode_gap}")
    return 2j * np.sqrt(np.pi * mode_gap ** 3)


def continuous_mode_elements(
    point: DimensionlessPoint,
    mode_gap: float,
    spec: QuadratureSpec | None = None,
    switching_amplitude: float = 1.0,
) -> MatrixElements:
    """
    光學連續模式探測器的矩陣元

    等於 a = Ω_K T 處的兩能級矩陣元乘以 |⟨1_K|ℰ|0⟩|² = 4π(Ω_K T)³，
    並乘以有效開關振幅 (αE₀) 的平方。

    參數:
        point: 參數點 (a 被 mode_gap 取代)
        mode_gap: Ω_K T，> 0
        switching_amplitude: 有效開關振幅
    """
    amplitude = transition_amplitude(mode_gap)
    two_level = compute_elements(point.with_(a=float(mode_gap)), spec)
    factor = abs(amplitude) ** 2 * switching_amplitude ** 2
    return two_level.scaled(factor)


def wightman_smeared(
    point: DimensionlessPoint,
    tau: float,
    spec: QuadratureSpec | None = None,
) -> complex:
    """
    兩個光斑之間、時間差 τ (單位 T) 的真空 Wightman 函數

    W(τ) = ∫ μ(u)·J0(bu)·e^{-iwτ} du，與矩陣元使用同一測度。
    """
    spec = spec or QuadratureSpec()
    b = point.b

    def integrand(u):
        u = np.asarray(u, dtype=float)
        mu, w = radial_measure(point, u)
        return mu * bessel_j0(b * u) * np.exp(-1j * w * tau)

    u_max = spec.cutoff(point.s)
    _check_cutoff(point, u_max)
    outcome = integrate_radial(
        integrand, spec, oscillation_scale=max(b, abs(tau)), u_max=u_max
    )
    return complex(outcome.value)
