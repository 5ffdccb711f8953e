# harvestkit/cache.py
"""
緩存管理模組

為參數點評估提供線程安全的內存緩存。優化器 (Nelder-Mead) 會反復
訪問相同或相近的點，緩存避免重複積分。
所有緩存鍵均使用統一的前綴和命名規範。
"""
import hashlib
import json
import logging
import threading
from collections import OrderedDict
from functools import wraps

from .settings import get_setting

logger = logging.getLogger(__name__)

CACHE_TYPE_POINT = 'point'

_store = OrderedDict()
_lock = threading.Lock()


def _prefix():
    return get_setting('CACHE_KEY_PREFIX', 'hk_')


def _max_entries():
    return get_setting('CACHE_MAX_ENTRIES', 4096)


def get_cache_key(key_type, identifier):
    """
    生成標準化的緩存鍵

    參數:
        key_type (str): 緩存鍵類型，如 'point'
        identifier (str): 標識符

    返回:
        str: 標準化的緩存鍵
    """
    return f"{_prefix()}{key_type}_{identifier}"


def get_point_cache_key(point, spec, coupling=1.0):
    """
    生成參數點評估結果的緩存鍵

    參數:
        point (DimensionlessPoint): 參數點
        spec (QuadratureSpec): 積分規格
        coupling (float): 耦合強度

    返回:
        str: 緩存鍵
    """
    payload = json.dumps(
        {'point': point.to_dict(), 'spec': spec.to_dict(), 'coupling': coupling},
        sort_keys=True,
    )
    digest = hashlib.sha256(payload.encode('utf-8')).hexdigest()[:24]
    return get_cache_key(CACHE_TYPE_POINT, digest)


def get_evaluation_cache(key):
    """
    獲取緩存的評估結果

    返回:
        緩存值，未命中時為 None
    """
    with _lock:
        value = _store.get(key)
        if value is not None:
            _store.move_to_end(key)
    if value is not None:
        logger.debug(f"評估緩存命中: {key}")
    else:
        logger.debug(f"評估緩存未命中: {key}")
    return value


def set_evaluation_cache(key, value):
    """設置評估結果緩存，超出容量時淘汰最久未用的條目"""
    with _lock:
        _store[key] = value
        _store.move_to_end(key)
        while len(_store) > _max_entries():
            _store.popitem(last=False)
    logger.debug(f"已緩存評估結果: {key}")


def invalidate_evaluation_cache(key=None):
    """
    使評估緩存失效

    參數:
        key (str): 指定鍵；為 None 時清空全部
    """
    with _lock:
        if key is None:
            _store.clear()
        else:
            _store.pop(key, None)
    logger.debug(f"已清除評估緩存: {key or 'all'}")


def cache_size():
    with _lock:
        return len(_store)


def cache_evaluation(func):
    """
    裝飾器：緩存 func(point, spec, coupling) 的結果

    異常不緩存。
    """
    @wraps(func)
    def wrapper(point, spec, coupling=1.0):
        key = get_point_cache_key(point, spec, coupling)
        cached = get_evaluation_cache(key)
        if cached is not None:
            return cached
        result = func(point, spec, coupling)
        set_evaluation_cache(key, result)
        return result

    return wrapper
