"""
特殊函數與數值積分

- 縮放特殊函數：J0、e^{-x²}erfi(x) (經 Dawson 函數)、e^{-x²}erfc(ix)
- 徑向自適應積分：按 Bessel 振盪尺度預分段，再由 scipy quad_vec 細分
- 暴力 oracle：固定網格梯形、一維時間積分、二維時序積分
"""

import logging
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from .exceptions import ConfigError, ConvergenceError
from .models import IntegralResult, QuadratureSpec

logger = logging.getLogger(__name__)

TWO_OVER_SQRT_PI = 2.0 / np.sqrt(np.pi)

# 時間積分 oracle 的截斷窗口 (單位 T)，e^{-32} 以外忽略
TIME_WINDOW = 8.0


def bessel_j0(x):
    """第一類零階 Bessel 函數，對 x < 0 作偶延拓"""
    return special.j0(np.abs(x))


def exp_scaled_erfi(x):
    """
    e^{-x²}·erfi(x) = (2/√π)·D(x)

    D 為 Dawson 函數，對任意 x 不溢出；大 x 時約為 1/(x√π)。
    """
    return TWO_OVER_SQRT_PI * special.dawsn(x)


def erfc_imag_scaled(x):
    """e^{-x²}·erfc(ix) = e^{-x²} − i·e^{-x²}erfi(x)，x 為實數"""
    x = np.asarray(x, dtype=float)
    value = np.exp(-x * x) - 1j * exp_scaled_erfi(x)
    return complex(value) if value.ndim == 0 else value


def initial_panels(u_max: float, oscillation_scale: float, spec: QuadratureSpec):
    """
    初始分段斷點 (不含端點)

    分段寬度 min(default_panel, π/(2·max(b, 1)))，保證每段不超過
    J0(b·u) 的四分之一週期。
    """
    width = min(spec.default_panel, np.pi / (2.0 * max(oscillation_scale, 1.0)))
    n_panels = max(1, int(np.ceil(u_max / width)))
    edges = np.linspace(0.0, u_max, n_panels + 1)
    return edges[1:-1], n_panels


def integrate_radial(
    f: Callable,
    spec: QuadratureSpec,
    oscillation_scale: float = 0.0,
    u_max: Optional[float] = None,
) -> IntegralResult:
    """
    ∫_0^{u_max} f(u) du

    參數:
        f: 被積函數，返回實/複標量或向量 (多個被積函數一起積分)
        spec: 積分規格
        oscillation_scale: 振盪尺度 (通常為 b)，決定初始分段
        u_max: 上限；缺省時不允許

    返回:
        IntegralResult；value 與 f 的返回形狀一致

    異常:
        ConvergenceError: 細分預算耗盡，result 屬性帶最佳估計
    """
    if u_max is None:
        raise ConfigError("integrate_radial requires an explicit u_max")
    if u_max < 0:
        raise ConfigError(f"u_max must be >= 0, got {u_max}")

    sample = np.asarray(f(0.0))
    is_complex = np.iscomplexobj(sample)
    scalar = sample.ndim == 0
    width = sample.size

    if u_max == 0:
        zero = np.zeros_like(sample)
        return IntegralResult(
            value=zero.item() if scalar else zero,
            error_estimate=0.0,
            subdivisions_used=0,
            converged=True,
        )

    def real_integrand(u):
        value = np.atleast_1d(np.asarray(f(u)))
        if is_complex:
            return np.concatenate([value.real, value.imag])
        return value.astype(float)

    breakpoints, n_panels = initial_panels(u_max, oscillation_scale, spec)
    limit = n_panels + spec.max_subdivisions

    result, error, info = integrate.quad_vec(
        real_integrand,
        0.0,
        u_max,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        norm='max',
        limit=limit,
        points=list(breakpoints) if len(breakpoints) else None,
        full_output=True,
    )

    if is_complex:
        value = result[:width] + 1j * result[width:]
    else:
        value = result
    if scalar:
        value = complex(value[0]) if is_complex else float(value[0])

    subdivisions = max(0, len(info.intervals) - n_panels)
    outcome = IntegralResult(
        value=value,
        error_estimate=float(error),
        subdivisions_used=subdivisions,
        converged=info.status == 0,
    )

    if info.status != 0:
        logger.warning(
            f"徑向積分未收斂: status={info.status}, error={error:.3e}, "
            f"panels={n_panels}, subdivisions={subdivisions}"
        )
        raise ConvergenceError(
            f"Radial quadrature did not converge ({info.message}); "
            f"error estimate {error:.3e}",
            result=outcome,
        )

    logger.debug(
        f"徑向積分完成: u_max={u_max:.4g}, panels={n_panels}, "
        f"subdivisions={subdivisions}, error={error:.3e}"
    )
    return outcome


def trapezoid_radial_oracle(
    f: Callable, u_max: float, n: int = 1_000_000, extrapolate: bool = False
):
    """
    固定網格梯形 oracle

    f 必須可向量化：對形狀 (n,) 的 u 返回 (..., n)。extrapolate=True 時
    在 2n-1 點網格上求值一次，與其中每隔一點的 n 點子網格作 Richardson
    外推 (誤差 O(h⁴))。
    """
    if not extrapolate:
        u = np.linspace(0.0, u_max, n)
        return integrate.trapezoid(f(u), u, axis=-1)
    u = np.linspace(0.0, u_max, 2 * n - 1)
    values = f(u)
    fine = integrate.trapezoid(values, u, axis=-1)
    coarse = integrate.trapezoid(values[..., ::2], u[::2], axis=-1)
    return (4.0 * fine - coarse) / 3.0


def _complex_output(value: np.ndarray):
    return complex(value) if np.ndim(value) == 0 else value


def single_time_integral_oracle(a: float, w, n: int = 4001):
    """
    ∫ e^{-t²/2}·e^{i(a+w)t} dt (單位 T)

    [-8, 8] 上 n 點的固定網格梯形；高斯窗口下梯形規則按指數收斂，
    截斷誤差約 e^{-32}。w 可為數組。
    """
    if n < 100:
        raise ConfigError(f"single_time_integral_oracle needs n >= 100, got {n}")
    t = np.linspace(-TIME_WINDOW, TIME_WINDOW, n)
    frequency = np.asarray(a + np.asarray(w, dtype=float), dtype=float)[..., None]
    integrand = np.exp(1j * frequency * t - 0.5 * t * t)
    return _complex_output(integrate.trapezoid(integrand, t, axis=-1))


def _double_time_trapezoid(a: float, w, n: int):
    t = np.linspace(-TIME_WINDOW, TIME_WINDOW, n)
    half_t2 = 0.5 * t * t
    w = np.asarray(w, dtype=float)[..., None]
    # 被積函數可分離：e^{i(a-w)t - t²/2} · e^{i(a+w)t' - t'²/2}
    outer = np.exp(1j * (a - w) * t - half_t2)
    inner = np.exp(1j * (a + w) * t - half_t2)
    inner_cumulative = integrate.cumulative_trapezoid(inner, t, initial=0, axis=-1)
    return 2.0 * integrate.trapezoid(outer * inner_cumulative, t, axis=-1)


def double_time_integral_oracle(
    a: float, w, n: int = 2000, extrapolate: bool = True
):
    """
    2∬_{t'<t} e^{ia(t+t')} e^{-iw(t-t')} e^{-t²/2} e^{-t'²/2} dt dt'

    在 [-8, 8]² 上均勻網格 (每軸 n 點) 的迭代梯形，誤差 O(n⁻²)；
    extrapolate=True 時與 2n-1 點網格作一次 Richardson 外推。
    w 可為數組，返回同形狀的複數組。
    """
    if n < 100:
        raise ConfigError(f"double_time_integral_oracle needs n >= 100, got {n}")
    coarse = _double_time_trapezoid(a, w, n)
    if not extrapolate:
        return _complex_output(coarse)
    fine = _double_time_trapezoid(a, w, 2 * n - 1)
    return _complex_output((4.0 * fine - coarse) / 3.0)
