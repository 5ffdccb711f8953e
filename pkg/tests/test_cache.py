from harvestkit.cache import (
    cache_evaluation,
    cache_size,
    get_cache_key,
    get_evaluation_cache,
    get_point_cache_key,
    invalidate_evaluation_cache,
    set_evaluation_cache,
)
from harvestkit.models import DimensionlessPoint, QuadratureSpec
from harvestkit.settings import configure_settings


def test_cache_key_prefix():
    assert get_cache_key('point', 'abc') == 'hk_point_abc'
    configure_settings({'CACHE_KEY_PREFIX': 'test_'})
    assert get_cache_key('point', 'abc') == 'test_point_abc'


def test_point_key_depends_on_inputs(reference_point, spec):
    key = get_point_cache_key(reference_point, spec)
    assert key == get_point_cache_key(DimensionlessPoint(a=1, b=1, s=0.125), spec)
    assert key != get_point_cache_key(reference_point.with_(b=2.0), spec)
    assert key != get_point_cache_key(reference_point, spec.halved())
    assert key != get_point_cache_key(reference_point, spec, coupling=2.0)


def test_set_get_invalidate():
    set_evaluation_cache('k1', 1)
    set_evaluation_cache('k2', 2)
    assert get_evaluation_cache('k1') == 1
    invalidate_evaluation_cache('k1')
    assert get_evaluation_cache('k1') is None
    assert cache_size() == 1
    invalidate_evaluation_cache()
    assert cache_size() == 0


def test_lru_eviction():
    configure_settings({'CACHE_MAX_ENTRIES': 2})
    set_evaluation_cache('a', 1)
    set_evaluation_cache('b', 2)
    get_evaluation_cache('a')
    set_evaluation_cache('c', 3)
    assert get_evaluation_cache('b') is None
    assert get_evaluation_cache('a') == 1


def test_decorator_reuses_results(reference_point):
    calls = []

    @cache_evaluation
    def evaluate(point, spec, coupling=1.0):
        calls.append(point)
        return point.a * coupling

    spec = QuadratureSpec()
    assert evaluate(reference_point, spec) == 1.0
    assert evaluate(reference_point, spec) == 1.0
    assert evaluate(reference_point, spec, 2.0) == 2.0
    assert len(calls) == 2
