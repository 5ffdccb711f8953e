"""
harvestkit 日誌配置模組

提供標準化的 logging.config.dictConfig 配置。
CLI 啟動時調用一次，庫使用者也可以直接使用。

使用方法:
    import logging.config
    from harvestkit.logging_config import configure_logging

    logging.config.dictConfig(configure_logging(debug=True))
"""

import json
import logging
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

# 線程本地存儲，用於存儲運行上下文 (run_id 與當前網格點)
_run_context = threading.local()


def get_run_context() -> Dict[str, Any]:
    """獲取當前線程的運行上下文"""
    return getattr(_run_context, 'data', {})


def set_run_context(**kwargs):
    """設置運行上下文"""
    if not hasattr(_run_context, 'data'):
        _run_context.data = {}
    _run_context.data.update(kwargs)


def clear_run_context():
    """清除運行上下文"""
    _run_context.data = {}


def configure_logging(
    debug: bool = False,
    level: Optional[str] = None,
    log_dir: Optional[str] = None,
    json_output: bool = False,
    system_name: str = 'HARVEST',
    extra_loggers: Optional[Dict[str, Dict]] = None,
    max_bytes: int = 10485760,  # 10 MB
    backup_count: int = 5,
) -> Dict[str, Any]:
    """
    生成標準化的 LOGGING 配置

    Args:
        debug: 開發模式，控制台使用彩色輸出
        level: harvestkit 日誌級別，預設 DEBUG(開發) / INFO
        log_dir: 日誌目錄；為 None 時不寫文件
        json_output: 控制台輸出 JSON (便於收集)
        system_name: 系統代碼，寫入 JSON 日誌
        extra_loggers: 額外的 logger 配置
        max_bytes: 日誌文件最大大小
        backup_count: 日誌文件備份數量

    Returns:
        dictConfig 配置字典
    """
    if level is None:
        level = 'DEBUG' if debug else 'INFO'

    if json_output:
        console_formatter = 'json'
    else:
        console_formatter = 'colored' if debug else 'simple'

    # 控制台輸出到 stderr，stdout 留給 JSON/CSV 結果
    handlers = {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': console_formatter,
            'filters': ['run_context'],
            'level': 'DEBUG',
        },
    }

    file_handlers = []
    if log_dir:
        path = Path(log_dir)
        path.mkdir(parents=True, exist_ok=True)
        handlers.update({
            'file_app': {
                'class': 'logging.handlers.RotatingFileHandler',
                'filename': str(path / 'harvestkit.log'),
                'maxBytes': max_bytes,
                'backupCount': backup_count,
                'formatter': 'verbose',
                'filters': ['run_context'],
                'level': 'DEBUG',
                'encoding': 'utf-8',
            },
            'file_error': {
                'class': 'logging.handlers.RotatingFileHandler',
                'filename': str(path / 'error.log'),
                'maxBytes': max_bytes,
                'backupCount': backup_count,
                'formatter': 'verbose',
                'filters': ['run_context'],
                'level': 'ERROR',
                'encoding': 'utf-8',
            },
        })
        file_handlers = ['file_app', 'file_error']

    loggers = {
        'harvestkit': {
            'handlers': ['console'] + file_handlers,
            'level': level,
            'propagate': False,
        },
        # 第三方數值庫日誌
        'numpy': {'handlers': ['console'], 'level': 'WARNING', 'propagate': False},
        'scipy': {'handlers': ['console'], 'level': 'WARNING', 'propagate': False},
        'matplotlib': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
    }

    if extra_loggers:
        loggers.update(extra_loggers)

    return {
        'version': 1,
        'disable_existing_loggers': False,
        'filters': {
            'run_context': {
                '()': 'harvestkit.logging_config.RunContextFilter',
            },
        },
        'formatters': {
            'verbose': {
                'format': '[{levelname}] {asctime} [{name}:{lineno}] run={run_id} '
                          'point={point} {message}',
                'style': '{',
                'datefmt': '%Y-%m-%d %H:%M:%S',
            },
            'simple': {
                'format': '{levelname} {asctime} {name} {message}',
                'style': '{',
                'datefmt': '%Y-%m-%d %H:%M:%S',
            },
            'colored': {
                '()': 'harvestkit.logging_config.ColoredFormatter',
                'format': '{levelname} {asctime} {name} {message}',
                'style': '{',
                'datefmt': '%H:%M:%S',
            },
            'json': {
                '()': 'harvestkit.logging_config.JSONFormatter',
                'system_name': system_name,
            },
        },
        'handlers': handlers,
        'root': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
        'loggers': loggers,
    }


class ColoredFormatter(logging.Formatter):
    """
    彩色日誌格式化器 (用於開發環境)
    """

    COLORS = {
        'DEBUG': '\033[36m',     # Cyan
        'INFO': '\033[32m',      # Green
        'WARNING': '\033[33m',   # Yellow
        'ERROR': '\033[31m',     # Red
        'CRITICAL': '\033[35m',  # Magenta
    }
    RESET = '\033[0m'
    BOLD = '\033[1m'

    def format(self, record):
        color = self.COLORS.get(record.levelname, '')
        message = super().format(record)
        if color:
            # 只對 levelname 上色
            levelname = record.levelname
            message = message.replace(
                levelname, f"{self.BOLD}{color}{levelname}{self.RESET}", 1
            )
        return message


class JSONFormatter(logging.Formatter):
    """
    JSON 格式日誌格式化器
    """

    def __init__(self, system_name: str = 'HARVEST', *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.system_name = system_name

    def format(self, record):
        log_data = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'system': self.system_name,
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }

        if record.exc_info:
            log_data['exception'] = self.formatException(record.exc_info)

        run_id = getattr(record, 'run_id', '-')
        if run_id != '-':
            log_data['run_id'] = run_id
        point = getattr(record, 'point', '-')
        if point != '-':
            log_data['point'] = point
        if hasattr(record, 'extra_data'):
            log_data['extra'] = record.extra_data

        return json.dumps(log_data, ensure_ascii=False, default=str)


class RunContextFilter(logging.Filter):
    """
    為日誌記錄添加運行上下文 (run_id, point)
    """

    def filter(self, record):
        context = get_run_context()
        record.run_id = context.get('run_id', '-')
        record.point = context.get('point', '-')
        return True


def log_exception(logger: logging.Logger, message: str, exc: Exception, **extra):
    """
    記錄異常日誌的便捷方法

    Args:
        logger: logger 實例
        message: 日誌消息
        exc: 異常對象
        **extra: 額外的上下文信息
    """
    logger.exception(
        f"{message}: {exc}",
        extra={'extra_data': extra} if extra else {},
        exc_info=True
    )
