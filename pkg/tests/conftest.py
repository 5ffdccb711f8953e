import logging

import pytest

from harvestkit.cache import invalidate_evaluation_cache
from harvestkit.logging_config import clear_run_context
from harvestkit.models import DimensionlessPoint, MatrixElements, QuadratureSpec
from harvestkit.settings import reset_settings


@pytest.fixture(autouse=True)
def clean_state(monkeypatch, tmp_path):
    """每個測試使用乾淨的設置、緩存與空的基準目錄"""
    for name in (
        'HARVESTKIT_FIXTURES', 'HARVESTKIT_LOG_LEVEL', 'HARVESTKIT_LOG_DIR',
        'HARVESTKIT_DEBUG', 'HARVESTKIT_JSON_LOGS', 'HARVESTKIT_THREADS',
        'HARVESTKIT_QUAD_REL_TOL', 'HARVESTKIT_QUAD_ABS_TOL',
        'HARVESTKIT_QUAD_U_MAX_FACTOR',
    ):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv('HARVESTKIT_FIXTURES', str(tmp_path / 'fixtures'))
    monkeypatch.chdir(tmp_path)
    reset_settings()
    invalidate_evaluation_cache()
    clear_run_context()
    yield
    reset_settings()
    invalidate_evaluation_cache()
    clear_run_context()
    # dictConfig 會關閉 propagate，恢復後 caplog 才能收到記錄
    package_logger = logging.getLogger('harvestkit')
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
        handler.close()
    package_logger.propagate = True
    package_logger.setLevel(logging.NOTSET)


@pytest.fixture
def spec():
    return QuadratureSpec()


@pytest.fixture
def reference_point():
    """a = 1, b = 1, s = 0.125, δ = 0"""
    return DimensionlessPoint(a=1.0, b=1.0, s=0.125)


@pytest.fixture
def entangled_elements():
    return MatrixElements(L_aa=0.2, L_bb=0.2, L_ab=0.05, M=0.3 * 1j)


@pytest.fixture
def separable_elements():
    return MatrixElements(L_aa=0.4, L_bb=0.4, L_ab=-0.1, M=0.25)
