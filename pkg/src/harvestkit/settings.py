"""
運行設置助手

提供便捷的方法來組合 harvestkit 的運行設置：
默認值 -> 環境變量 (支持 .env) -> 調用方覆蓋。

Example:
    from harvestkit.settings import configure_settings

    settings = configure_settings({'THREADS': 8, 'LOG_LEVEL': 'DEBUG'})
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

PACKAGE_DIR = Path(__file__).resolve().parent

SCHEMA_VERSION = "harvestkit/1"

# 錯誤默認訊息與代碼，由 exceptions 模組讀取
ERROR_RESPONSE = {
    'DOMAIN': {
        'message': 'Parameter outside the physical domain',
        'code': 'domain_error',
    },
    'CONVERGENCE': {
        'message': 'Quadrature did not reach the requested tolerance',
        'code': 'convergence_error',
    },
    'PERTURBATIVITY': {
        'message': 'Excitation probability too large for second-order theory',
        'code': 'perturbativity_error',
    },
    'IDENTICAL_DETECTOR': {
        'message': 'Detectors are not identical (L_AA != L_BB)',
        'code': 'identical_detector_error',
    },
    'INFEASIBLE': {
        'message': 'No feasible point harvests entanglement',
        'code': 'infeasible',
    },
    'CONFIG': {
        'message': 'Invalid run configuration',
        'code': 'config_error',
    },
    'VALIDATION': {
        'message': 'Oracle validation failed',
        'code': 'validation_failed',
    },
}

DEFAULT_SETTINGS: Dict[str, Any] = {
    'FIXTURES_DIR': str(PACKAGE_DIR / 'fixtures'),
    'LOG_LEVEL': None,
    'LOG_DIR': None,
    'DEBUG': False,
    'JSON_LOGS': False,
    'THREADS': 1,
    'PERTURBATIVE_LIMIT': 0.1,
    'SCHEMA_VERSION': SCHEMA_VERSION,
    'CACHE_KEY_PREFIX': 'hk_',
    'CACHE_MAX_ENTRIES': 4096,
    'QUADRATURE': {
        'REL_TOL': 1e-9,
        'ABS_TOL': 1e-14,
        'MAX_SUBDIVISIONS': 2000,
        'U_MAX_FACTOR': 10.0,
        'DEFAULT_PANEL': 1.0,
    },
    'ERROR_RESPONSE': ERROR_RESPONSE,
}

# 環境變量名 -> (設置鍵, 轉換函數)
ENV_VARIABLES = {
    'HARVESTKIT_FIXTURES': ('FIXTURES_DIR', str),
    'HARVESTKIT_LOG_LEVEL': ('LOG_LEVEL', str.upper),
    'HARVESTKIT_LOG_DIR': ('LOG_DIR', str),
    'HARVESTKIT_DEBUG': ('DEBUG', lambda v: v.strip().lower() in ('1', 'true', 'yes')),
    'HARVESTKIT_JSON_LOGS': (
        'JSON_LOGS',
        lambda v: v.strip().lower() in ('1', 'true', 'yes'),
    ),
    'HARVESTKIT_THREADS': ('THREADS', int),
    'HARVESTKIT_QUAD_REL_TOL': ('QUADRATURE.REL_TOL', float),
    'HARVESTKIT_QUAD_ABS_TOL': ('QUADRATURE.ABS_TOL', float),
    'HARVESTKIT_QUAD_U_MAX_FACTOR': ('QUADRATURE.U_MAX_FACTOR', float),
}

_settings: Optional[Dict[str, Any]] = None


def configure_settings(
    overrides: Optional[Dict[str, Any]] = None,
    env_file: Optional[str] = None,
) -> Dict[str, Any]:
    """
    配置 harvestkit 運行設置

    Args:
        overrides: 調用方提供的設置字典，優先級最高
        env_file: 可選的 .env 文件路徑，默認在當前目錄查找

    Returns:
        合併後的設置字典，同時成為模組級的當前設置
    """
    global _settings

    load_dotenv(env_file, override=False)

    config = dict(DEFAULT_SETTINGS)
    config['QUADRATURE'] = dict(DEFAULT_SETTINGS['QUADRATURE'])

    for env_name, (key, convert) in ENV_VARIABLES.items():
        raw = os.environ.get(env_name)
        if raw is None or raw == '':
            continue
        try:
            value = convert(raw)
        except ValueError as exc:
            from .exceptions import ConfigError

            raise ConfigError(f"{env_name}={raw!r} 無法解析: {exc}") from exc
        section, _, name = key.partition('.')
        if name:
            config[section][name] = value
        else:
            config[key] = value

    if overrides:
        quadrature = overrides.get('QUADRATURE')
        merged = dict(config['QUADRATURE'])
        config.update(overrides)
        config['QUADRATURE'] = {**merged, **(quadrature or {})}

    if config['LOG_LEVEL'] is None:
        config['LOG_LEVEL'] = 'DEBUG' if config['DEBUG'] else 'INFO'

    _settings = config
    return config


def get_settings() -> Dict[str, Any]:
    """返回當前設置，首次調用時按默認值與環境變量初始化"""
    if _settings is None:
        return configure_settings()
    return _settings


def get_setting(key: str, default: Any = None) -> Any:
    """安全地獲取單個設置值"""
    try:
        return get_settings().get(key, default)
    except Exception:
        return default


def get_error_response(name: str) -> Dict[str, str]:
    """
    獲取錯誤默認訊息配置

    不觸發設置初始化，供異常類在任何時刻 (包括設置解析失敗時) 使用。
    """
    source = _settings if _settings is not None else DEFAULT_SETTINGS
    return source.get('ERROR_RESPONSE', ERROR_RESPONSE).get(name, {})


def reset_settings() -> None:
    """清除當前設置 (測試使用)"""
    global _settings
    _settings = None
