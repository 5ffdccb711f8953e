"""
HarvestKit

Entanglement harvesting by two pulsed detectors coupled to the phonon
field of a (2+1)D Bose-Einstein condensate with Bogoliubov dispersion.

Features:
- 色散關係與無量綱化 (Bogoliubov / 次聲速 / 線性分支)
- 矩陣元 L、L_AB、M 的徑向求積
- 部分轉置負性、並發度與正交方差判據
- 參數掃描、負性優化與回歸基準校驗
"""

__version__ = "0.3.0"
__author__ = "HarvestKit Developers"

# 輕量組件直接導入
from .settings import (
    SCHEMA_VERSION,
    configure_settings,
    get_setting,
    get_settings,
    reset_settings,
)

from .exceptions import (
    ConfigError,
    ConvergenceError,
    DomainError,
    HarvestKitError,
    IdenticalDetectorError,
    InfeasibleError,
    PerturbativityError,
    ValidationError,
)

from .logging_config import (
    ColoredFormatter,
    JSONFormatter,
    configure_logging,
    log_exception,
)

from .log_format import (
    LogFormatter,
    StructuredLogger,
    create_logger,
)

from .models import (
    BecPreset,
    Branch,
    DetectorPairConfig,
    DimensionlessPoint,
    GridSpec,
    HarvestPoint,
    MatrixElements,
    MediumParams,
    QuadratureSpec,
    ReducedState,
    Smearing,
    SweepResult,
)


# 數值組件 (scipy) 延遲導入
def __getattr__(name):
    """延遲導入屬性，只有在實際使用時才導入數值模組"""

    numeric_components = {
        'omega': ('medium', 'omega'),
        'reduce': ('medium', 'reduce'),
        'unreduce': ('medium', 'unreduce'),
        'rubidium_preset': ('medium', 'rubidium_preset'),
        'get_preset': ('medium', 'get_preset'),
        'g1': ('response', 'g1'),
        'g2': ('response', 'g2'),
        'compute_elements': ('response', 'compute_elements'),
        'matrix_element_L': ('response', 'matrix_element_L'),
        'matrix_element_Lab': ('response', 'matrix_element_Lab'),
        'matrix_element_M': ('response', 'matrix_element_M'),
        'continuous_mode_elements': ('response', 'continuous_mode_elements'),
        'assemble_state': ('entanglement', 'assemble_state'),
        'negativity_formula': ('entanglement', 'negativity_formula'),
        'negativity_partial_transpose': (
            'entanglement', 'negativity_partial_transpose'
        ),
        'joint_quadrature_variance': ('entanglement', 'joint_quadrature_variance'),
        'inseparability_min': ('entanglement', 'inseparability_min'),
        'resolved_inseparability': ('entanglement', 'resolved_inseparability'),
        'evaluate_point': ('entanglement', 'evaluate_point'),
        'causal_class': ('experiment', 'causal_class'),
        'sweep': ('experiment', 'sweep'),
        'optimize_negativity': ('experiment', 'optimize_negativity'),
        'gap_scan': ('experiment', 'gap_scan'),
        'freeze_fixtures': ('fixtures', 'freeze_fixtures'),
        'load_fixtures': ('fixtures', 'load_fixtures'),
        'run_validation': ('validation', 'run_validation'),
        'RunConfig': ('cli', 'RunConfig'),
    }

    if name in numeric_components:
        module_name, attr_name = numeric_components[name]
        module = __import__(f'harvestkit.{module_name}', fromlist=[attr_name])
        component = getattr(module, attr_name)
        globals()[name] = component
        return component

    raise AttributeError(f"module '{__name__}' has no attribute '{name}'")


__all__ = [
    # 版本信息
    '__version__',
    '__author__',
    'SCHEMA_VERSION',

    # 設置
    'configure_settings',
    'get_setting',
    'get_settings',
    'reset_settings',

    # 異常類
    'HarvestKitError',
    'DomainError',
    'ConvergenceError',
    'PerturbativityError',
    'IdenticalDetectorError',
    'InfeasibleError',
    'ConfigError',
    'ValidationError',

    # 日誌
    'configure_logging',
    'log_exception',
    'ColoredFormatter',
    'JSONFormatter',
    'LogFormatter',
    'StructuredLogger',
    'create_logger',

    # 數據模型
    'BecPreset',
    'Branch',
    'DetectorPairConfig',
    'DimensionlessPoint',
    'GridSpec',
    'HarvestPoint',
    'MatrixElements',
    'MediumParams',
    'QuadratureSpec',
    'ReducedState',
    'Smearing',
    'SweepResult',

    # 數值組件
    'omega',
    'reduce',
    'unreduce',
    'rubidium_preset',
    'get_preset',
    'g1',
    'g2',
    'compute_elements',
    'matrix_element_L',
    'matrix_element_Lab',
    'matrix_element_M',
    'continuous_mode_elements',
    'assemble_state',
    'negativity_formula',
    'negativity_partial_transpose',
    'joint_quadrature_variance',
    'inseparability_min',
    'resolved_inseparability',
    'evaluate_point',
    'causal_class',
    'sweep',
    'optimize_negativity',
    'gap_scan',
    'freeze_fixtures',
    'load_fixtures',
    'run_validation',
    'RunConfig',
]
