"""
harvestkit 結構化日誌工具

為掃描、優化與校驗中的逐點事件提供統一的日誌格式。

使用方法:
    from harvestkit.log_format import create_logger

    slogger = create_logger('harvestkit.experiment')
    slogger.info('point_done', index=12, negativity=1.2e-4, status='ok')
"""

import logging
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from .logging_config import get_run_context


class LogFormatter:
    """
    統一的日誌格式化工具類
    用於生成標準化的日誌消息字典
    """

    @staticmethod
    def format_log(
        level: str,
        event: str,
        details: Optional[Dict[str, Any]] = None,
        error: Optional[str] = None,
        run_id: Optional[str] = None,
        system: Optional[str] = None,
    ) -> Dict[str, Any]:
        """
        生成標準格式的日誌字典

        Args:
            level: 日誌級別 (INFO/ERROR/WARNING/DEBUG)
            event: 事件名稱，如 'point_done'
            details: 詳細信息字典
            error: 錯誤信息
            run_id: 運行 ID，缺省時取當前運行上下文
            system: 系統代碼

        Returns:
            包含完整日誌信息的字典
        """
        log_dict = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": level,
            "event": event,
        }

        if run_id is None:
            run_id = get_run_context().get('run_id')
        if run_id is not None:
            log_dict["run_id"] = run_id
        if system is not None:
            log_dict["system"] = system
        if details is not None:
            log_dict["details"] = details
        if error is not None:
            log_dict["error"] = error

        return log_dict


class StructuredLogger:
    """
    結構化日誌記錄器

    Example:
        logger = StructuredLogger('harvestkit.experiment')
        logger.info('sweep_started', points=3600, threads=8)
        logger.error('point_failed', error='convergence', index=17)
    """

    # 消息行中直接展示的字段
    KEY_FIELDS = ('index', 'a', 'b', 'status', 'negativity', 'elapsed')

    def __init__(self, name: str, system: Optional[str] = 'HARVEST'):
        self._logger = logging.getLogger(name)
        self._system = system

    def _log(self, level: str, event: str, error: Optional[str] = None, **kwargs):
        """內部日誌記錄方法"""
        log_func = getattr(self._logger, level.lower(), self._logger.info)
        if not self._logger.isEnabledFor(getattr(logging, level.upper())):
            return

        log_data = LogFormatter.format_log(
            level=level.upper(),
            event=event,
            details=kwargs if kwargs else None,
            error=error,
            system=self._system,
        )

        message = f"[{event}]"
        if error:
            message += f" error={error}"
        shown_fields = {k: v for k, v in kwargs.items() if k in self.KEY_FIELDS}
        if shown_fields:
            message += f" {shown_fields}"

        log_func(message, extra={'extra_data': log_data})

    def debug(self, event: str, **kwargs):
        self._log('DEBUG', event, **kwargs)

    def info(self, event: str, **kwargs):
        self._log('INFO', event, **kwargs)

    def warning(self, event: str, **kwargs):
        self._log('WARNING', event, **kwargs)

    def error(self, event: str, error: Optional[str] = None, **kwargs):
        self._log('ERROR', event, error=error, **kwargs)

    def exception(self, event: str, exc: Exception, **kwargs):
        """記錄異常日誌"""
        self._logger.exception(
            f"[{event}] error={exc}",
            extra={'extra_data': {
                'event': event,
                'exception_type': type(exc).__name__,
                'code': getattr(exc, 'code', None),
                **kwargs
            }}
        )


def create_logger(name: str, system: Optional[str] = 'HARVEST') -> StructuredLogger:
    """創建結構化日誌記錄器的便捷函數"""
    return StructuredLogger(name, system=system)
