"""
色散介質

Bogoliubov 型色散 ω² = c²k² ± ε²k⁴、無量綱化與物理預設。

積分全部在約化變量 u = k·cT、w = ωT 中進行：
    w(u) = u·√(1 ± δ²u²)，δ = ε/(c²T)
次聲速分支只在 u ≤ 1/δ 有定義，超出範圍直接報錯。
"""

import logging
from typing import Tuple

import numpy as np

from .exceptions import ConfigError, DomainError
from .models import (
    BecPreset,
    Branch,
    DetectorPairConfig,
    DimensionlessPoint,
    MediumParams,
    Smearing,
)

logger = logging.getLogger(__name__)


def _as_output(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


def _dispersion_factor(x2, sign: int, what: str):
    """1 ± x²，負值 (次聲速越過 k_c) 時報錯"""
    factor = 1.0 + sign * x2
    if np.any(factor < 0):
        bad = float(np.min(factor))
        raise DomainError(
            f"subsonic branch evaluated beyond the crossover scale ({what}): "
            f"1 - (k/k_c)^2 = {bad:.3e} < 0"
        )
    return factor


def omega(k, medium: MediumParams):
    """
    色散關係 ω(k) = √(c²k² ± ε²k⁴)

    參數:
        k: 波數 (標量或 numpy 數組)，≥ 0
        medium: 介質參數

    返回:
        ω，形狀與 k 相同
    """
    scalar = np.isscalar(k)
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise DomainError("wavenumber must be >= 0")

    c = medium.sound_speed
    sign = medium.branch.sign
    if sign == 0 or medium.dispersion_strength == 0:
        return _as_output(c * k, scalar)

    ratio2 = (medium.dispersion_strength * k / c) ** 2
    factor = _dispersion_factor(ratio2, sign, 'omega')
    return _as_output(c * k * np.sqrt(factor), scalar)


def omega_reduced(u, delta: float, branch: Branch = Branch.BOGOLIUBOV):
    """約化色散 ωT = u·√(1 ± δ²u²)"""
    return u / u_over_omega(u, delta, branch)


def u_over_omega(u, delta: float, branch: Branch = Branch.BOGOLIUBOV):
    """
    u/(ωT) = 1/√(1 ± δ²u²)

    在 u = 0 處有限，徑向測度直接使用這個比值以避免 0/0。
    """
    scalar = np.isscalar(u)
    u = np.asarray(u, dtype=float)
    sign = Branch(branch).sign
    if sign == 0 or delta == 0:
        return _as_output(np.ones_like(u), scalar)
    factor = _dispersion_factor((delta * u) ** 2, sign, 'reduced')
    if sign < 0 and np.any(factor == 0):
        raise DomainError("subsonic branch has ω = 0 at the crossover scale")
    return _as_output(1.0 / np.sqrt(factor), scalar)


def crossover_scale(medium: MediumParams) -> float:
    """
    色散交叉尺度 k_c = c/ε

    線性與拋物型項在此相當。ε = 0 或線性分支無定義。
    """
    if medium.branch is Branch.LINEAR or medium.dispersion_strength == 0:
        raise DomainError("crossover scale undefined without dispersion (ε = 0)")
    return medium.sound_speed / medium.dispersion_strength


def reduce(config: DetectorPairConfig, medium: MediumParams) -> DimensionlessPoint:
    """
    SI 配置 -> 無量綱參數點

    a = ΩT，b = Δx/(cT)，s = σ/(cT)，δ = ε/(c²T)
    """
    c = medium.sound_speed
    T = config.pulse_width
    if c <= 0 or T <= 0 or config.spot_size <= 0:
        raise DomainError("sound speed, pulse width and spot size must be > 0")
    cT = c * T
    return DimensionlessPoint(
        a=config.gap * T,
        b=config.separation / cT,
        s=config.spot_size / cT,
        delta=medium.dispersion_strength / (c * cT),
        branch=medium.branch,
        smearing=config.smearing,
    )


def unreduce(
    point: DimensionlessPoint,
    medium: MediumParams,
    pulse_width: float | None = None,
    coupling: float = 1.0,
) -> DetectorPairConfig:
    """
    無量綱參數點 -> SI 配置

    參數:
        point: 無量綱參數點
        medium: 介質參數 (提供 c 與 ε)
        pulse_width: 脈衝寬度 T；缺省時由 δ = ε/(c²T) 反推
        coupling: 耦合強度 λ
    """
    c = medium.sound_speed
    if pulse_width is None:
        if point.delta == 0 or medium.dispersion_strength == 0:
            raise DomainError("pulse_width is required when δ = 0")
        pulse_width = medium.dispersion_strength / (c * c * point.delta)
    if pulse_width <= 0:
        raise DomainError(f"pulse_width must be > 0, got {pulse_width}")
    cT = c * pulse_width
    return DetectorPairConfig(
        gap=point.a / pulse_width,
        pulse_width=pulse_width,
        spot_size=point.s * cT,
        separation=point.b * cT,
        coupling=coupling,
        smearing=point.smearing,
    )


RUBIDIUM = BecPreset(
    name='rubidium',
    healing_length=6.31e-8,
    sound_speed=8e-3,
    spot_size=3e-6,
    pulse_width=3e-3,
    extent=1e-4,
)

PRESETS = {
    'rubidium': RUBIDIUM,
}


def preset_medium(preset: BecPreset) -> MediumParams:
    return MediumParams(
        sound_speed=preset.sound_speed,
        dispersion_strength=preset.dispersion_strength,
        branch=preset.branch,
    )


def preset_detectors(preset: BecPreset, coupling: float = 1.0) -> DetectorPairConfig:
    """默認探測器：ΩT = 1，Δx = cT"""
    return DetectorPairConfig(
        gap=1.0 / preset.pulse_width,
        pulse_width=preset.pulse_width,
        spot_size=preset.spot_size,
        separation=preset.sound_speed * preset.pulse_width,
        coupling=coupling,
        smearing=Smearing.GAUSSIAN,
    )


def get_preset(name: str) -> Tuple[MediumParams, DetectorPairConfig, BecPreset]:
    """按名稱獲取預設，未知名稱拋出 ConfigError"""
    preset = PRESETS.get(name.strip().lower())
    if preset is None:
        raise ConfigError(
            f"Unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        )
    return preset_medium(preset), preset_detectors(preset), preset


def rubidium_preset() -> Tuple[MediumParams, DetectorPairConfig, BecPreset]:
    """銣 BEC 預設：ξ = 63.1 nm，c = 8 mm/s，σ = 3 μm，T = 3 ms，l_BEC = 100 μm"""
    return get_preset('rubidium')


def fits_in_condensate(config: DetectorPairConfig, preset: BecPreset) -> bool:
    """兩個光斑 (含 ±σ) 是否都落在凝聚體內"""
    fits = config.separation + 2 * config.spot_size <= preset.extent
    if not fits:
        logger.warning(
            f"探測器跨度 Δx + 2σ = {config.separation + 2 * config.spot_size:.3e} m "
            f"超出凝聚體尺寸 {preset.extent:.3e} m"
        )
    return fits


def describe_preset(preset: BecPreset) -> dict:
    """SI 與無量綱參數摘要 (供 CLI preset 命令使用)"""
    medium = preset_medium(preset)
    point = reduce(preset_detectors(preset), medium)
    cT = preset.sound_speed * preset.pulse_width
    return {
        'name': preset.name,
        'si': {
            'healing_length': preset.healing_length,
            'sound_speed': preset.sound_speed,
            'spot_size': preset.spot_size,
            'pulse_width': preset.pulse_width,
            'extent': preset.extent,
            'dispersion_strength': preset.dispersion_strength,
            'crossover_scale': crossover_scale(medium),
            'sound_length': cT,
        },
        'dimensionless': {
            's': point.s,
            'delta': point.delta,
            'sigma_over_xi': preset.spot_size / preset.healing_length,
            'b_boundary': 4 + 2 * point.s,
            'separation_boundary': (4 + 2 * point.s) * cT,
            'extent_over_cT': preset.extent / cT,
        },
        'branch': preset.branch.value,
    }


def bogoliubov_is_monotone(delta: float, u_max: float, n: int = 2049) -> bool:
    """數值檢查 Bogoliubov 分支在 [0, u_max] 上嚴格遞增"""
    u = np.linspace(0.0, u_max, n)
    w = omega_reduced(u, delta, Branch.BOGOLIUBOV)
    return bool(np.all(np.diff(w) > 0))


def small_k_deviation(medium: MediumParams, fraction: float = 0.01) -> float:
    """k ≤ fraction·k_c 範圍內 |ω − ck|/(ck) 的最大值"""
    k_c = crossover_scale(medium)
    k = np.linspace(k_c * 1e-6, fraction * k_c, 257)
    w = omega(k, medium)
    ck = medium.sound_speed * k
    return float(np.max(np.abs(w - ck) / ck))
