"""
實驗層

因果分類、(a, b) 網格掃描、色散敏感度、負性最大化等。

使用方法:
    from harvestkit.experiment import sweep
    from harvestkit.models import GridSpec

    result = sweep(GridSpec(n_a=20, n_b=20), threads=4)
"""

import itertools
import logging
import uuid
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from . import __version__
from .cache import cache_evaluation
from .entanglement import evaluate_point
from .exceptions import ConfigError, ConvergenceError, DomainError, InfeasibleError
from .fixtures import fixture_hash
from .log_format import create_logger
from .logging_config import clear_run_context, set_run_context
from .models import (
    Branch,
    DimensionlessPoint,
    GridSpec,
    HarvestPoint,
    QuadratureSpec,
    Smearing,
    SweepResult,
)
from .settings import SCHEMA_VERSION, get_setting

logger = logging.getLogger(__name__)
slogger = create_logger(__name__)

SPACELIKE = 'spacelike'
SIGNALING = 'signaling'

CONSTRAINTS = ('none', 'spacelike')

# 優化：三個起點 (掃描最佳點 + 兩個隨機點)，之後從最佳點反覆重啟
N_STARTS = 3
MIN_BUDGET = 50
# 每個可變維度的粗掃描點數 (含端點，即包含邊界角點)
SCAN_POINTS = {1: 9, 2: 5}
# 單次 Nelder-Mead 的評估上限；與總預算無關，保證小預算的評估序列是大預算的前綴
RUN_EVALUATIONS = 40
SIMPLEX_SCALE = 0.1


def spacelike_boundary(s: float) -> float:
    """類空邊界 b = 4 + 2s (±2T 的脈衝與 ±σ 的光斑)"""
    return 4.0 + 2.0 * s


def causal_class(b: float, s: float) -> str:
    """b ≥ 4 + 2s (含等號) 為類空，否則為可通信"""
    return SPACELIKE if b >= spacelike_boundary(s) else SIGNALING


def max_spacelike_pulse_width(
    separation: float, spot_size: float, sound_speed: float
) -> float:
    """
    保持類空分隔的最大脈衝寬度 T = (Δx − 2σ)/(4c)

    聲速越低，允許的脈衝越長。
    """
    if sound_speed <= 0:
        raise DomainError(f"sound_speed must be > 0, got {sound_speed}")
    width = (separation - 2.0 * spot_size) / (4.0 * sound_speed)
    if width <= 0:
        raise DomainError(
            "separation does not exceed the spot extent; no pulse is spacelike"
        )
    return width


def evaluate_or_fail(
    point: DimensionlessPoint,
    spec: QuadratureSpec,
    coupling: float = 1.0,
) -> HarvestPoint:
    """評估單點；積分或定義域失敗時返回帶狀態的 HarvestPoint 而不拋出"""
    try:
        return evaluate_point(point, spec, coupling)
    except ConvergenceError as exc:
        slogger.warning(
            'point_failed', error=exc.message, a=point.a, b=point.b,
            status='convergence_error',
        )
        best = exc.result
        return HarvestPoint.failed(
            point,
            status='convergence_error',
            causal_class=causal_class(point.b, point.s),
            diagnostics={
                'error': exc.message,
                'quad_error': getattr(best, 'error_estimate', float('nan')),
            },
            elements=best,
        )
    except DomainError as exc:
        slogger.warning(
            'point_failed', error=exc.message, a=point.a, b=point.b,
            status='domain_error',
        )
        return HarvestPoint.failed(
            point,
            status='domain_error',
            causal_class=causal_class(point.b, point.s),
            diagnostics={'error': exc.message, 'quad_error': float('nan')},
        )


def sweep(
    grid: GridSpec,
    threads: Optional[int] = None,
    preset: Optional[str] = None,
    coupling: float = 1.0,
    run_id: Optional[str] = None,
) -> SweepResult:
    """
    在 (a, b) 網格上逐點評估

    參數:
        grid: 網格規格
        threads: 工作線程數，缺省取設置 THREADS
        preset: 記錄在元數據中的預設名
        coupling: 耦合強度
        run_id: 運行 ID，寫入日誌上下文

    返回:
        SweepResult，點按行優先排列，與線程數無關
    """
    threads = int(threads or get_setting('THREADS', 1))
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    run_id = run_id or uuid.uuid4().hex[:12]

    indexed = list(grid.points())
    results: List[Optional[HarvestPoint]] = [None] * len(indexed)

    slogger.info('sweep_started', points=len(indexed), threads=threads, run=run_id)

    def task(index: int, point: DimensionlessPoint) -> Tuple[int, HarvestPoint]:
        set_run_context(run_id=run_id, point=index)
        try:
            return index, evaluate_or_fail(point, grid.spec, coupling)
        finally:
            clear_run_context()

    if threads == 1:
        for index, point in indexed:
            results[index] = task(index, point)[1]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(task, index, point) for index, point in indexed]
            for future in as_completed(futures):
                index, harvest = future.result()
                results[index] = harvest

    failures = sum(1 for r in results if r.status != 'ok')
    slogger.info(
        'sweep_finished', points=len(results), failures=failures, run=run_id,
        status='ok' if failures == 0 else 'partial',
    )

    metadata = {
        'schema': SCHEMA_VERSION,
        'version': __version__,
        'preset': preset,
        'spec': grid.spec.to_dict(),
        'grid': grid.to_dict(),
        'fixture_hash': fixture_hash(),
        'failures': failures,
    }
    return SweepResult(points=tuple(results), grid=grid, metadata=metadata)


def dispersion_sensitivity(
    point: DimensionlessPoint, spec: QuadratureSpec | None = None
) -> Dict[str, float]:
    """
    色散對負性的影響

    返回:
        {'N_disp', 'N_linear', 'rel_diff'}；兩者皆為 0 時 rel_diff = 0
    """
    spec = spec or QuadratureSpec()
    dispersive = evaluate_point(point, spec).negativity
    if point.effective_delta == 0:
        linear = dispersive
    else:
        linear = evaluate_point(
            point.with_(branch=Branch.LINEAR, delta=0.0), spec
        ).negativity

    scale = max(abs(dispersive), abs(linear))
    rel_diff = 0.0 if scale == 0 else abs(dispersive - linear) / scale
    logger.info(
        f"色散敏感度 a={point.a:.4g} b={point.b:.4g} δ={point.delta:.3e}: "
        f"N_disp={dispersive:.6e}, N_linear={linear:.6e}, rel_diff={rel_diff:.3e}"
    )
    return {'N_disp': dispersive, 'N_linear': linear, 'rel_diff': rel_diff}


class _Tracker:
    """記錄優化過程中的最佳點與最小 I_min"""

    def __init__(self):
        self.best: Optional[HarvestPoint] = None
        self.min_inseparability = float('inf')
        self.evaluations = 0

    def record(self, harvest: HarvestPoint):
        self.evaluations += 1
        if harvest.status != 'ok':
            return
        self.min_inseparability = min(
            self.min_inseparability, harvest.inseparability_min
        )
        if self.best is None or harvest.negativity > self.best.negativity:
            self.best = harvest


def _scan_axis(lo: float, hi: float, n: int, logarithmic: bool) -> np.ndarray:
    if logarithmic and lo > 0:
        axis = np.geomspace(lo, hi, n)
    else:
        axis = np.linspace(lo, hi, n)
    axis[0], axis[-1] = lo, hi
    return axis


def _initial_simplex(x0, lower, upper, scale: float) -> np.ndarray:
    """以 x0 為頂點、邊長為邊界寬度 scale 倍的單純形，全部頂點留在邊界內"""
    simplex = [np.array(x0, dtype=float)]
    for i in range(len(x0)):
        step = scale * (upper[i] - lower[i])
        vertex = simplex[0].copy()
        vertex[i] = x0[i] + step if x0[i] + step <= upper[i] else x0[i] - step
        simplex.append(np.clip(vertex, lower, upper))
    return np.array(simplex)


def optimize_negativity(
    bounds: Dict[str, Tuple[float, float]],
    constraint: str = 'none',
    budget: int = 200,
    seed: int = 0,
    s: float = 0.125,
    delta: float = 0.0,
    branch: Branch = Branch.BOGOLIUBOV,
    smearing: Smearing = Smearing.GAUSSIAN,
    spec: QuadratureSpec | None = None,
) -> HarvestPoint:
    """
    在 (a, b) 邊界內最大化負性

    1. 在邊界內做粗網格掃描 (a 對數間距，b 線性)，角點最先評估；
    2. 從掃描最佳點與兩個由 seed 決定的隨機起點運行有界 Nelder-Mead，
       初始單純形按邊界寬度設定；
    3. 剩餘預算用於從當前最佳點重啟，單純形每次減半。

    每次運行的評估上限固定，較小預算的評估序列是較大預算的前綴，
    因此最佳值隨預算單調不減。邊界上下限相同的維度固定不動。

    參數:
        bounds: {'a': (lo, hi), 'b': (lo, hi)}
        constraint: 'none' 或 'spacelike' (b 下限提高到 4 + 2s)
        budget: 總評估次數預算 (含掃描)，>= 50
        seed: 隨機起點種子

    異常:
        InfeasibleError: 可行域內沒有 N > 0 的點
    """
    spec = spec or QuadratureSpec()
    if constraint not in CONSTRAINTS:
        raise ConfigError(f"constraint must be one of {CONSTRAINTS}")
    if budget < MIN_BUDGET:
        raise ConfigError(f"budget must be >= {MIN_BUDGET}, got {budget}")

    lower = np.array([float(bounds['a'][0]), float(bounds['b'][0])])
    upper = np.array([float(bounds['a'][1]), float(bounds['b'][1])])
    if (
        not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper))
        or np.any(lower > upper) or np.any(lower < 0)
    ):
        raise ConfigError(f"invalid bounds {bounds}")

    if constraint == 'spacelike':
        lower[1] = max(lower[1], spacelike_boundary(s))
        if lower[1] > upper[1]:
            raise InfeasibleError(
                f"spacelike constraint b >= {spacelike_boundary(s):.6g} "
                f"excludes the whole range b <= {upper[1]:.6g}"
            )

    free = lower < upper
    dimension = int(free.sum())
    tracker = _Tracker()
    evaluate = cache_evaluation(evaluate_or_fail)

    def objective_full(x: np.ndarray) -> float:
        x = np.clip(x, lower, upper)
        point = DimensionlessPoint(
            a=float(x[0]), b=float(x[1]), s=s, delta=delta,
            branch=branch, smearing=smearing,
        )
        harvest = evaluate(point, spec)
        tracker.record(harvest)
        return -harvest.negativity if harvest.status == 'ok' else 0.0

    def objective(x_free: np.ndarray) -> float:
        x = lower.copy()
        x[free] = x_free
        return objective_full(x)

    # 角點先評估，作為結果的下限
    axes = [(lo, hi) if f else (lo,) for lo, hi, f in zip(lower, upper, free)]
    scan_values = {}
    for corner in itertools.product(*axes):
        scan_values[corner] = objective_full(np.array(corner))

    if dimension:
        scan_axes = [
            _scan_axis(lo, hi, SCAN_POINTS[dimension], logarithmic=(index == 0))
            if f else np.array([lo])
            for index, (lo, hi, f) in enumerate(zip(lower, upper, free))
        ]
        for node in itertools.product(*scan_axes):
            if node not in scan_values:
                scan_values[node] = objective_full(np.array(node))
        best_node = min(scan_values, key=scan_values.get)

        rng = np.random.default_rng(seed)
        starts = [np.array(best_node)[free]]
        starts += [
            rng.uniform(lower[free], upper[free]) for _ in range(N_STARTS - 1)
        ]
        free_lower, free_upper = lower[free], upper[free]
        free_bounds = list(zip(free_lower, free_upper))

        run = 0
        scale = SIMPLEX_SCALE
        while True:
            remaining = budget - tracker.evaluations
            if remaining < dimension + 1:
                break
            if run < len(starts):
                x0 = starts[run]
            else:
                # 從當前最佳點重啟，單純形逐次縮小
                anchor = tracker.best.point if tracker.best else None
                x0 = (
                    np.array([anchor.a, anchor.b])[free] if anchor
                    else np.array(best_node)[free]
                )
                scale = max(scale / 2.0, 1e-6)
            outcome = minimize(
                objective,
                x0,
                method='Nelder-Mead',
                bounds=free_bounds,
                options={
                    'maxfev': min(RUN_EVALUATIONS, remaining),
                    'initial_simplex': _initial_simplex(
                        x0, free_lower, free_upper, scale
                    ),
                    'xatol': 1e-6,
                    'fatol': 1e-14,
                },
            )
            slogger.debug(
                'optimizer_run_done', index=run, status=outcome.status,
                negativity=-outcome.fun, nfev=outcome.nfev,
                evaluations=tracker.evaluations,
            )
            run += 1

    best = tracker.best
    if best is None or best.negativity <= 0:
        best_inseparability = (
            tracker.min_inseparability
            if np.isfinite(tracker.min_inseparability) else None
        )
        raise InfeasibleError(
            f"no point with N > 0 under constraint '{constraint}'; "
            f"best I_min = {best_inseparability}",
            best_inseparability=best_inseparability,
        )

    slogger.info(
        'optimizer_finished', a=best.point.a, b=best.point.b,
        negativity=best.negativity, evaluations=tracker.evaluations,
    )
    diagnostics = dict(best.diagnostics)
    diagnostics.update({
        'evaluations': tracker.evaluations,
        'constraint': constraint,
        'budget': budget,
        'seed': seed,
        'bounds': {'a': list(map(float, (lower[0], upper[0]))),
                   'b': list(map(float, (lower[1], upper[1])))},
    })
    return replace(best, diagnostics=diagnostics)


def gap_scan(
    b: float,
    s: float = 0.125,
    delta: float = 0.0,
    a_values: Sequence[float] | None = None,
    spec: QuadratureSpec | None = None,
    branch: Branch = Branch.BOGOLIUBOV,
) -> Tuple[List[HarvestPoint], float]:
    """
    固定 b 掃描 a = ΩT

    返回:
        (各點結果, 負性最大處的 a)
    """
    spec = spec or QuadratureSpec()
    if a_values is None:
        a_values = np.geomspace(0.1, 10.0, 60)
    results = [
        evaluate_or_fail(
            DimensionlessPoint(a=float(a), b=b, s=s, delta=delta, branch=branch),
            spec,
        )
        for a in a_values
    ]
    negativities = np.array(
        [r.negativity if r.status == 'ok' else -np.inf for r in results]
    )
    best_a = float(a_values[int(np.argmax(negativities))])
    return results, best_a


def zero_boundary(result: SweepResult) -> List[Tuple[float, Optional[float]]]:
    """
    每個 a 行中負性首次為零的 b (零區域的邊界)

    返回:
        [(a, b_zero 或 None)]
    """
    boundary = []
    b_values = result.grid.b_values()
    for i, a in enumerate(result.grid.a_values()):
        b_zero = None
        for b, harvest in zip(b_values, result.row(i)):
            if harvest.status == 'ok' and harvest.negativity == 0.0:
                b_zero = float(b)
                break
        boundary.append((float(a), b_zero))
    return boundary
