"""
數據模型

在各模組之間共享的不可變數據類：介質參數、無量綱參數點、探測器配置、
矩陣元、積分規格與結果、掃描網格與結果。
"""

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .exceptions import ConfigError, DomainError


class Branch(str, Enum):
    """色散分支：ω² = c²k² ± ε²k⁴，或忽略 ε 的線性分支"""

    BOGOLIUBOV = 'bogoliubov'
    SUBSONIC = 'subsonic'
    LINEAR = 'linear'

    @property
    def sign(self) -> int:
        return {'bogoliubov': 1, 'subsonic': -1, 'linear': 0}[self.value]


class Smearing(str, Enum):
    GAUSSIAN = 'gaussian'
    POINTLIKE = 'pointlike'


def _finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class MediumParams:
    """
    色散介質

    屬性:
        sound_speed: 聲速 c (m/s)，> 0
        dispersion_strength: 色散強度 ε (m²/s)，≥ 0
        branch: 色散分支
    """

    sound_speed: float
    dispersion_strength: float = 0.0
    branch: Branch = Branch.BOGOLIUBOV

    def __post_init__(self):
        _finite(sound_speed=self.sound_speed,
                dispersion_strength=self.dispersion_strength)
        if self.sound_speed <= 0:
            raise DomainError(f"sound_speed must be > 0, got {self.sound_speed}")
        if self.dispersion_strength < 0:
            raise DomainError(
                f"dispersion_strength must be >= 0, got {self.dispersion_strength}"
            )
        object.__setattr__(self, 'branch', Branch(self.branch))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sound_speed': self.sound_speed,
            'dispersion_strength': self.dispersion_strength,
            'branch': self.branch.value,
        }


@dataclass(frozen=True)
class DimensionlessPoint:
    """
    無量綱參數點 (單位 T 與 cT)

    屬性:
        a: ΩT
        b: Δx/(cT)
        s: σ/(cT)
        delta: ε/(c²T)
    """

    a: float
    b: float
    s: float
    delta: float = 0.0
    branch: Branch = Branch.BOGOLIUBOV
    smearing: Smearing = Smearing.GAUSSIAN

    def __post_init__(self):
        _finite(a=self.a, b=self.b, s=self.s, delta=self.delta)
        if self.a < 0:
            raise DomainError(f"a = ΩT must be >= 0, got {self.a}")
        if self.b < 0:
            raise DomainError(f"b = Δx/cT must be >= 0, got {self.b}")
        if self.s <= 0:
            raise DomainError(f"s = σ/cT must be > 0, got {self.s}")
        if self.delta < 0:
            raise DomainError(f"delta must be >= 0, got {self.delta}")
        object.__setattr__(self, 'branch', Branch(self.branch))
        object.__setattr__(self, 'smearing', Smearing(self.smearing))
        for name in ('a', 'b', 's', 'delta'):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def effective_delta(self) -> float:
        """線性分支忽略 ε"""
        return 0.0 if self.branch is Branch.LINEAR else self.delta

    def with_(self, **changes) -> 'DimensionlessPoint':
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DimensionlessPoint':
        """由 to_dict() 的輸出重建"""
        return cls(
            a=data['a'],
            b=data['b'],
            s=data['s'],
            delta=data.get('delta', 0.0),
            branch=data.get('branch', Branch.BOGOLIUBOV),
            smearing=data.get('smearing', Smearing.GAUSSIAN),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'a': self.a,
            'b': self.b,
            's': self.s,
            'delta': self.delta,
            'branch': self.branch.value,
            'smearing': self.smearing.value,
        }


@dataclass(frozen=True)
class BecPreset:
    """
    玻色-愛因斯坦凝聚體實驗預設

    屬性:
        healing_length: 癒合長度 ξ (m)
        sound_speed: 聲速 c (m/s)
        spot_size: 激光光斑 σ (m)
        pulse_width: 脈衝寬度 T (s)
        extent: 凝聚體尺寸 l_BEC (m)
    """

    name: str
    healing_length: float
    sound_speed: float
    spot_size: float
    pulse_width: float
    extent: float
    branch: Branch = Branch.BOGOLIUBOV

    @property
    def dispersion_strength(self) -> float:
        """ε = cξ/√2"""
        return self.sound_speed * self.healing_length / math.sqrt(2.0)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['branch'] = self.branch.value
        data['dispersion_strength'] = self.dispersion_strength
        return data


@dataclass(frozen=True)
class DetectorPairConfig:
    """
    兩個相同探測器 (激光脈衝) 的 SI 配置

    屬性:
        gap: 能隙 Ω (1/s)
        pulse_width: 高斯開關寬度 T (s)
        spot_size: 高斯光斑 σ (m)
        separation: 中心距離 Δx (m)
        coupling: 耦合強度 λ
        switching_amplitude: 有效開關振幅 (連續模式中為 αE₀)
    """

    gap: float
    pulse_width: float
    spot_size: float
    separation: float
    coupling: float = 1.0
    switching: str = 'gaussian'
    smearing: Smearing = Smearing.GAUSSIAN
    switching_amplitude: float = 1.0

    def __post_init__(self):
        _finite(gap=self.gap, pulse_width=self.pulse_width,
                spot_size=self.spot_size, separation=self.separation,
                coupling=self.coupling)
        if self.pulse_width <= 0:
            raise DomainError(f"pulse_width must be > 0, got {self.pulse_width}")
        if self.spot_size <= 0:
            raise DomainError(f"spot_size must be > 0, got {self.spot_size}")
        if self.separation < 0:
            raise DomainError(f"separation must be >= 0, got {self.separation}")
        if self.gap < 0:
            raise DomainError(f"gap must be >= 0, got {self.gap}")
        if self.coupling < 0:
            raise DomainError(f"coupling must be >= 0, got {self.coupling}")
        if self.switching != 'gaussian':
            raise ConfigError(f"Unsupported switching profile: {self.switching}")
        object.__setattr__(self, 'smearing', Smearing(self.smearing))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['smearing'] = self.smearing.value
        return data


@dataclass(frozen=True)
class MatrixElements:
    """
    二階約化密度矩陣元，單位 λ²T²

    L_aa = L_bb 為激發概率，L_ab 為交叉激發項，M 為非局域項。
    """

    L_aa: float
    L_bb: float
    L_ab: complex
    M: complex
    error_estimate: float = 0.0
    subdivisions: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'L_aa', float(self.L_aa))
        object.__setattr__(self, 'L_bb', float(self.L_bb))
        object.__setattr__(self, 'L_ab', complex(self.L_ab))
        object.__setattr__(self, 'M', complex(self.M))

    @property
    def L(self) -> float:
        return self.L_aa

    def scaled(self, factor: float) -> 'MatrixElements':
        return replace(
            self,
            L_aa=self.L_aa * factor,
            L_bb=self.L_bb * factor,
            L_ab=self.L_ab * factor,
            M=self.M * factor,
            error_estimate=self.error_estimate * abs(factor),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'L_aa': self.L_aa,
            'L_bb': self.L_bb,
            'L_ab': [self.L_ab.real, self.L_ab.imag],
            'M': [self.M.real, self.M.imag],
            'error_estimate': self.error_estimate,
            'subdivisions': self.subdivisions,
        }


@dataclass(frozen=True)
class ReducedState:
    """
    兩探測器約化密度矩陣，基底 {|00⟩, |10⟩, |01⟩, |11⟩}

    屬性:
        matrix: 4×4 厄米矩陣，跡為 1，X 型結構
        scale: 組裝時使用的 λ²T² 數值
    """

    matrix: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise DomainError(f"reduced state must be 4x4, got {matrix.shape}")
        if not np.allclose(matrix, matrix.conj().T, atol=1e-14):
            raise DomainError("reduced state must be Hermitian")
        if abs(np.trace(matrix).real - 1.0) > 1e-12:
            raise DomainError("reduced state must have unit trace")
        object.__setattr__(self, 'matrix', matrix)


@dataclass(frozen=True)
class QuadratureSpec:
    """
    徑向積分規格

    屬性:
        rel_tol / abs_tol: 收斂容差
        max_subdivisions: 初始分段之外允許的細分次數
        u_max_factor: 截斷因子 Λ，u_max = Λ/s
        default_panel: 初始分段寬度上限
        u_max: 顯式截斷 (覆蓋 Λ/s，用於點狀極限比較)
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    u_max_factor: float = 10.0
    default_panel: float = 1.0
    u_max: Optional[float] = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigError("Quadrature tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise ConfigError("max_subdivisions must be >= 1")
        if self.u_max_factor < 5:
            raise ConfigError(f"u_max_factor must be >= 5, got {self.u_max_factor}")
        if self.default_panel <= 0:
            raise ConfigError("default_panel must be > 0")
        if self.u_max is not None and self.u_max < 0:
            raise ConfigError("u_max must be >= 0")

    def cutoff(self, s: float) -> float:
        """UV 截斷 u_max"""
        if self.u_max is not None:
            return float(self.u_max)
        return self.u_max_factor / s

    def halved(self) -> 'QuadratureSpec':
        return replace(self, rel_tol=self.rel_tol / 2)

    @classmethod
    def from_settings(cls, settings: Dict[str, Any]) -> 'QuadratureSpec':
        quadrature = settings.get('QUADRATURE', {})
        return cls(
            rel_tol=quadrature.get('REL_TOL', 1e-9),
            abs_tol=quadrature.get('ABS_TOL', 1e-14),
            max_subdivisions=int(quadrature.get('MAX_SUBDIVISIONS', 2000)),
            u_max_factor=quadrature.get('U_MAX_FACTOR', 10.0),
            default_panel=quadrature.get('DEFAULT_PANEL', 1.0),
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'QuadratureSpec':
        known = {name: data[name] for name in cls.__dataclass_fields__ if name in data}
        return cls(**known)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class IntegralResult:
    value: Any
    error_estimate: float
    subdivisions_used: int
    converged: bool


@dataclass(frozen=True)
class HarvestPoint:
    """
    單點收穫結果

    屬性:
        negativity: N/(λ²T²)，≥ 0
        concurrence: C = 2N
        log_concurrence: log10 C；C = 0 時為 None
        concurrence_flag: 'zero' 或 'positive'
        inseparability_min: 最小 DGCZ 可分性量 I_min
        status: 'ok' / 'convergence_error' / 'domain_error' / ...
    """

    point: DimensionlessPoint
    negativity: float
    concurrence: float
    log_concurrence: Optional[float]
    concurrence_flag: str
    inseparability_min: float
    optimal_phase: float
    causal_class: str
    elements: Optional[MatrixElements]
    status: str = 'ok'
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def failed(
        cls,
        point: DimensionlessPoint,
        status: str,
        causal_class: str,
        diagnostics: Dict[str, Any],
        elements: Optional[MatrixElements] = None,
    ) -> 'HarvestPoint':
        return cls(
            point=point,
            negativity=float('nan'),
            concurrence=float('nan'),
            log_concurrence=None,
            concurrence_flag='zero',
            inseparability_min=float('nan'),
            optimal_phase=float('nan'),
            causal_class=causal_class,
            elements=elements,
            status=status,
            diagnostics=diagnostics,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'point': self.point.to_dict(),
            'negativity': self.negativity,
            'concurrence': self.concurrence,
            'log_concurrence': self.log_concurrence,
            'concurrence_flag': self.concurrence_flag,
            'inseparability_min': self.inseparability_min,
            'optimal_phase': self.optimal_phase,
            'causal_class': self.causal_class,
            'elements': self.elements.to_dict() if self.elements else None,
            'status': self.status,
            'diagnostics': dict(self.diagnostics),
        }


SPACINGS = ('log', 'linear')


@dataclass(frozen=True)
class GridSpec:
    """
    (a, b) 掃描網格，a 為外層 (行優先)
    """

    a_range: Tuple[float, float] = (0.1, 10.0)
    n_a: int = 60
    b_range: Tuple[float, float] = (0.1, 8.0)
    n_b: int = 60
    s: float = 0.125
    delta: float = 0.0
    branch: Branch = Branch.BOGOLIUBOV
    smearing: Smearing = Smearing.GAUSSIAN
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    a_spacing: str = 'log'
    b_spacing: str = 'linear'

    def __post_init__(self):
        for name in ('a', 'b'):
            lo, hi = getattr(self, f'{name}_range')
            n = getattr(self, f'n_{name}')
            spacing = getattr(self, f'{name}_spacing')
            if spacing not in SPACINGS:
                raise ConfigError(f"{name}_spacing must be one of {SPACINGS}")
            if n < 1:
                raise ConfigError(f"n_{name} must be >= 1, got {n}")
            if lo > hi:
                raise ConfigError(f"{name}_range must be ordered, got {(lo, hi)}")
            if lo < 0 or (spacing == 'log' and lo <= 0):
                raise ConfigError(f"{name}_range must be positive, got {(lo, hi)}")
            if n == 1 and lo != hi:
                raise ConfigError(f"n_{name} = 1 requires a degenerate {name}_range")
            object.__setattr__(self, f'{name}_range', (float(lo), float(hi)))
        object.__setattr__(self, 'branch', Branch(self.branch))
        object.__setattr__(self, 'smearing', Smearing(self.smearing))

    @staticmethod
    def _axis(lo: float, hi: float, n: int, spacing: str) -> np.ndarray:
        if n == 1:
            return np.array([lo])
        if spacing == 'log':
            return np.geomspace(lo, hi, n)
        return np.linspace(lo, hi, n)

    def a_values(self) -> np.ndarray:
        return self._axis(*self.a_range, self.n_a, self.a_spacing)

    def b_values(self) -> np.ndarray:
        return self._axis(*self.b_range, self.n_b, self.b_spacing)

    def points(self):
        """按行優先順序產生 (index, DimensionlessPoint)"""
        index = 0
        for a in self.a_values():
            for b in self.b_values():
                yield index, DimensionlessPoint(
                    a=float(a), b=float(b), s=self.s, delta=self.delta,
                    branch=self.branch, smearing=self.smearing,
                )
                index += 1

    @property
    def size(self) -> int:
        return self.n_a * self.n_b

    def to_dict(self) -> Dict[str, Any]:
        return {
            'a_range': list(self.a_range),
            'n_a': self.n_a,
            'b_range': list(self.b_range),
            'n_b': self.n_b,
            's': self.s,
            'delta': self.delta,
            'branch': self.branch.value,
            'smearing': self.smearing.value,
            'spec': self.spec.to_dict(),
            'a_spacing': self.a_spacing,
            'b_spacing': self.b_spacing,
        }


@dataclass(frozen=True)
class SweepResult:
    points: Tuple[HarvestPoint, ...]
    grid: GridSpec
    metadata: Dict[str, Any] = field(default_factory=dict)

    def row(self, i: int) -> Tuple[HarvestPoint, ...]:
        """第 i 個 a 值對應的一行"""
        return self.points[i * self.grid.n_b:(i + 1) * self.grid.n_b]
