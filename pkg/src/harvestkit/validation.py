"""
Oracle 校驗

`harvestkit validate` 的實現：閉式與暴力 oracle 對比、部分轉置閉式
與稠密本徵值對比、正交方差公式與 Fock 空間 trace 對比，以及已凍結
基準表的回歸檢查。只讀，不寫任何文件。
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .entanglement import (
    QUADRATURES,
    assemble_state,
    dense_partial_transpose_eigenvalues,
    evaluate_point,
    inseparability_min,
    joint_quadrature_variance,
    negativity_formula,
    negativity_partial_transpose,
    partial_transpose_blocks,
    quadrature_variance_oracle,
)
from .exceptions import HarvestKitError
from .experiment import causal_class, spacelike_boundary
from .fixtures import FixturePoint, load_fixtures
from .log_format import create_logger
from .models import MatrixElements, QuadratureSpec
from .response import compute_elements, g1, g2
from .specfun import double_time_integral_oracle, single_time_integral_oracle

logger = logging.getLogger(__name__)
slogger = create_logger(__name__)

# 5×5 網格 (a, w) ∈ [0, 5]²
ORACLE_GRID = np.linspace(0.0, 5.0, 5)
G1_TOLERANCE = 1e-10
G2_TOLERANCE = 1e-6
PT_SCALES = (1e-2, 1e-3, 1e-4)
PT_SAMPLES = 100
# 部分轉置與公式之差的 O(x²) 係數上限
PT_CONSTANT = 10.0
FIXTURE_TOLERANCE = {'g1': 1e-10, 'g2': 1e-6}
RADIAL_FIXTURE_TOLERANCE = 1e-7


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool
    note: str = ''


@dataclass
class ValidationReport:
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def add(self, name, residual, tolerance, note='', passed=None):
        if passed is None:
            passed = bool(np.isfinite(residual) and residual <= tolerance)
        check = Check(name, float(residual), float(tolerance), passed, note)
        self.checks.append(check)
        if check.passed:
            slogger.debug('check_passed', check=name, residual=check.residual)
        else:
            slogger.warning('check_failed', check=name, residual=check.residual,
                            tolerance=check.tolerance, status='failed')
        return check

    def to_text(self) -> str:
        lines = [f"{'check':<36} {'residual':>12} {'tolerance':>12}  result  note"]
        for check in self.checks:
            result = 'PASS' if check.passed else 'FAIL'
            lines.append(
                f"{check.name:<36} {check.residual:>12.3e} {check.tolerance:>12.3e}  "
                f"{result:<6}  {check.note}"
            )
        return '\n'.join(lines)


def _relative(value: complex, reference: complex, floor: float) -> float:
    """以 max(|ref|, floor) 為尺度的相對誤差"""
    return abs(value - reference) / max(abs(reference), floor)


def check_time_integrals(report: ValidationReport, n: int = 2000):
    """g1、g2 閉式 vs 時域 oracle"""
    worst_g1 = 0.0
    worst_g2 = 0.0
    for a in ORACLE_GRID:
        for w in ORACLE_GRID:
            worst_g1 = max(worst_g1, _relative(
                g1(a, w), single_time_integral_oracle(a, w), 1e-2
            ))
            worst_g2 = max(worst_g2, _relative(
                g2(a, w), double_time_integral_oracle(a, w, n=n), 1.0
            ))
    report.add('g1 closed form vs time-domain trapezoid', worst_g1, G1_TOLERANCE,
               note='5x5 grid on [0,5]^2')
    report.add('g2 closed form vs double-time oracle', worst_g2, G2_TOLERANCE,
               note=f'5x5 grid, n={n} with Richardson')


def random_elements(rng: np.random.Generator) -> MatrixElements:
    """滿足 Cauchy-Schwarz 的隨機相同探測器矩陣元"""
    L = rng.uniform(0.01, 1.0)
    L_ab = L * rng.uniform(-1.0, 1.0)
    M = rng.uniform(0.0, 2.0) * L * np.exp(1j * rng.uniform(-np.pi, np.pi))
    return MatrixElements(L_aa=L, L_bb=L, L_ab=L_ab, M=M)


def check_partial_transpose(report: ValidationReport, seed: int = 0):
    """部分轉置負性 vs x·max(|M| − L, 0)，以及塊本徵值 vs 稠密本徵值"""
    rng = np.random.default_rng(seed)
    worst_ratio = 0.0
    worst_eigen = 0.0
    verdicts_agree = True
    for _ in range(PT_SAMPLES):
        e = random_elements(rng)
        formula = negativity_formula(e)
        for x in PT_SCALES:
            rho = assemble_state(e, scale=x)
            scale = rho.scale
            pt = negativity_partial_transpose(rho)
            worst_ratio = max(worst_ratio, abs(pt - scale * formula) / scale ** 2)
            # 零判決只在主導階比較：公式為零時 PT 至多 O(x²)
            if formula == 0 and pt > PT_CONSTANT * scale ** 2:
                verdicts_agree = False
            if formula > 0 and pt <= 0:
                verdicts_agree = False
            dense = dense_partial_transpose_eigenvalues(rho)
            blocks = partial_transpose_blocks(rho)
            worst_eigen = max(worst_eigen, abs(min(blocks) - dense[0]))
    report.add('PT negativity vs formula (/x^2)', worst_ratio, PT_CONSTANT,
               note=f'{PT_SAMPLES} random sets, x in {PT_SCALES}')
    report.add('PT zero verdicts at leading order', 0.0 if verdicts_agree else 1.0,
               0.5)
    report.add('PT block eigenvalue vs eigvalsh', worst_eigen, 1e-12)


def check_quadratures(report: ValidationReport, seed: int = 1):
    """正交方差公式 vs 稠密 trace；I_min 與負性的關係"""
    rng = np.random.default_rng(seed)
    worst_variance = 0.0
    worst_identity = 0.0
    for _ in range(PT_SAMPLES):
        e = random_elements(rng).scaled(0.01)
        phi = rng.uniform(0.0, np.pi)
        for which in QUADRATURES:
            worst_variance = max(worst_variance, abs(
                joint_quadrature_variance(e, which, phi)
                - quadrature_variance_oracle(e, which, phi)
            ))
        n = negativity_formula(e)
        i_min = inseparability_min(e)
        if n > 0:
            worst_identity = max(worst_identity, abs((1 - i_min) - 2 * n))
        else:
            worst_identity = max(worst_identity, max(0.0, 1 - i_min))
    report.add('quadrature variance vs Fock trace', worst_variance, 1e-12)
    report.add('1 - I_min = 2N', worst_identity, 1e-12)


def check_causal_boundary(report: ValidationReport, s: float = 0.125):
    boundary = spacelike_boundary(s)
    ok = (
        causal_class(boundary, s) == 'spacelike'
        and causal_class(boundary - 1e-12, s) == 'signaling'
    )
    report.add('causal boundary at b = 4 + 2s', 0.0 if ok else 1.0, 0.5)


def _live_value(entry: FixturePoint, spec: QuadratureSpec) -> complex:
    if entry.quantity == 'g1':
        return complex(g1(entry.a, entry.b))
    if entry.quantity == 'g2':
        return complex(g2(entry.a, entry.b))
    point = entry.point()
    if entry.quantity == 'negativity':
        return complex(evaluate_point(point, spec).negativity)
    elements = compute_elements(point, spec)
    return {
        'L': complex(elements.L_aa),
        'L_ab': elements.L_ab,
        'M': elements.M,
    }[entry.quantity]


def check_fixtures(
    report: ValidationReport,
    directory: Optional[str] = None,
    spec: QuadratureSpec | None = None,
):
    """已凍結基準表的回歸檢查；未凍結時記錄為跳過"""
    spec = spec or QuadratureSpec()
    records = load_fixtures(directory)
    if not records:
        report.add('fixtures', 0.0, 0.0, note='skipped: not frozen', passed=True)
        return
    for name, record in records.items():
        tolerance = FIXTURE_TOLERANCE.get(
            record.entry.quantity, RADIAL_FIXTURE_TOLERANCE
        )
        live = _live_value(record.entry, spec)
        residual = _relative(live, record.value, 1e-12)
        report.add(f'fixture {name}', residual, tolerance, note=record.entry.oracle)


CHECKS: List[Callable[[ValidationReport], None]] = [
    check_time_integrals,
    check_partial_transpose,
    check_quadratures,
    check_causal_boundary,
]


def run_validation(directory: Optional[str] = None) -> ValidationReport:
    """
    運行全部校驗

    返回:
        ValidationReport；任何一項失敗時 passed 為 False
    """
    report = ValidationReport()
    for check in CHECKS:
        try:
            check(report)
        except HarvestKitError as exc:
            report.add(check.__name__, float('inf'), 0.0,
                       note=f'error: {exc.message}', passed=False)
    try:
        check_fixtures(report, directory)
    except HarvestKitError as exc:
        report.add('fixtures', float('inf'), 0.0, note=f'error: {exc.message}',
                   passed=False)
    logger.info(
        f"校驗完成: {len(report.checks)} 項, 失敗 {len(report.failures)} 項"
    )
    return report
