"""
糾纏量

從矩陣元到約化態、負性、並發度與 DGCZ 不可分性判據。

基底順序 {|00⟩, |10⟩, |01⟩, |11⟩} (第一個指標為 A)。態為 X 型：
    ρ00 = 1 − L_AA − L_BB, ρ11 = L_AA, ρ22 = L_BB, ρ12 = L_AB, ρ03 = M
對 B 部分轉置後分成 {1,2} 與 {0,3} 兩個 2×2 塊。
"""

import logging
import time
from typing import Dict, Optional, Tuple

import numpy as np

from .exceptions import IdenticalDetectorError, PerturbativityError
from .models import (
    DimensionlessPoint,
    HarvestPoint,
    MatrixElements,
    QuadratureSpec,
    ReducedState,
)
from .response import compute_elements
from .settings import get_setting

logger = logging.getLogger(__name__)

IDENTICAL_TOLERANCE = 1e-9

QUADRATURES = ('q_plus', 'q_minus', 'p_plus', 'p_minus')


def x_state_matrix(e: MatrixElements, scale: float = 1.0) -> np.ndarray:
    """不作微擾檢查的 X 型矩陣"""
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0 - scale * (e.L_aa + e.L_bb)
    rho[1, 1] = scale * e.L_aa
    rho[2, 2] = scale * e.L_bb
    rho[1, 2] = scale * e.L_ab
    rho[2, 1] = np.conj(rho[1, 2])
    rho[0, 3] = scale * e.M
    rho[3, 0] = np.conj(rho[0, 3])
    return rho


def assemble_state(e: MatrixElements, scale: float = 1.0) -> ReducedState:
    """
    組裝約化密度矩陣

    參數:
        e: 矩陣元 (單位 λ²T²)
        scale: λ²T² 的數值

    異常:
        PerturbativityError: scale·(L_AA + L_BB) ≥ 微擾上限 (默認 0.1)
    """
    limit = get_setting('PERTURBATIVE_LIMIT', 0.1)
    total = scale * (e.L_aa + e.L_bb)
    if total >= limit:
        raise PerturbativityError(
            f"L_AA + L_BB = {total:.4g} exceeds the perturbative limit {limit}",
            total=total,
        )
    return ReducedState(matrix=x_state_matrix(e, scale), scale=scale)


def _check_identical(e: MatrixElements):
    if abs(e.L_aa - e.L_bb) > IDENTICAL_TOLERANCE * abs(e.L_aa):
        raise IdenticalDetectorError(
            f"L_AA = {e.L_aa:.6g} and L_BB = {e.L_bb:.6g} differ"
        )


def negativity_formula(e: MatrixElements) -> float:
    """N = max(|M| − L, 0)，單位與 e 相同"""
    _check_identical(e)
    return max(abs(e.M) - e.L_aa, 0.0)


def resolved_negativity(e: MatrixElements, resolution: float = 0.0) -> float:
    """
    可分辨的負性

    |M| − L 不超過積分誤差界 (resolution 與 e.error_estimate 取大) 時
    記為 0。
    """
    _check_identical(e)
    gap = abs(e.M) - e.L_aa
    floor = max(resolution, e.error_estimate)
    if gap <= floor:
        return 0.0
    return gap


def _block_minimum(p: float, q: float, c: complex) -> float:
    """2×2 厄米塊 [[p, c], [c*, q]] 的最小本徵值 (數值穩定形式)"""
    half_sum = 0.5 * (p + q)
    radius = np.hypot(0.5 * (p - q), abs(c))
    largest = half_sum + radius
    if largest > 0:
        return (p * q - abs(c) ** 2) / largest
    return half_sum - radius


def partial_transpose_blocks(rho: ReducedState) -> Tuple[float, float]:
    """
    部分轉置後兩個塊的最小本徵值

    返回:
        ({1,2} 塊最小值 (含 M), {0,3} 塊最小值 (含 L_AB))
    """
    m = rho.matrix
    # ρ^{T_B}[1,2] = ρ[3,0]，ρ^{T_B}[0,3] = ρ[2,1]
    nonlocal_block = _block_minimum(m[1, 1].real, m[2, 2].real, m[3, 0])
    local_block = _block_minimum(m[0, 0].real, m[3, 3].real, m[2, 1])
    return nonlocal_block, local_block


def negativity_partial_transpose(rho: ReducedState) -> float:
    """max(0, −λ_min(ρ^{T_B}))"""
    return max(0.0, -min(partial_transpose_blocks(rho)))


def partial_transpose(matrix: np.ndarray) -> np.ndarray:
    """對 B 部分轉置；指標 = A + 2B，reshape 後軸為 (B, A, B', A')"""
    tensor = np.asarray(matrix).reshape(2, 2, 2, 2)
    return tensor.transpose(2, 1, 0, 3).reshape(4, 4)


def dense_partial_transpose_eigenvalues(rho: ReducedState) -> np.ndarray:
    """部分轉置的全部本徵值 (numpy eigvalsh，升序)"""
    return np.linalg.eigvalsh(partial_transpose(rho.matrix))


def concurrence_and_log(negativity: float) -> Tuple[float, Optional[float], str]:
    """
    並發度 C = 2N 及其 log10

    返回:
        (C, log10 C 或 None, 'positive' / 'zero')
    """
    concurrence = 2.0 * negativity
    if concurrence > 0:
        return concurrence, float(np.log10(concurrence)), 'positive'
    return 0.0, None, 'zero'


def joint_quadrature_variance(e: MatrixElements, which: str, phi: float) -> float:
    """
    聯合正交分量的方差

    q_j = (a e^{-iφ} + a† e^{iφ})/√2，p_j = (a e^{-iφ} − a† e^{iφ})/(i√2)，
    q± = (q_A ± q_B)/√2，p± = (p_A ± p_B)/√2。
    """
    _check_identical(e)
    local = 0.5 + e.L_aa
    squeezing = (np.exp(2j * phi) * e.M).real
    exchange = e.L_ab.real
    signs = {
        'q_plus': (1, 1),
        'q_minus': (-1, -1),
        'p_plus': (-1, 1),
        'p_minus': (1, -1),
    }
    if which not in signs:
        raise ValueError(f"which must be one of {QUADRATURES}, got {which!r}")
    squeeze_sign, exchange_sign = signs[which]
    return float(local + squeeze_sign * squeezing + exchange_sign * exchange)


def _fock_operators(levels: int = 3):
    annihilation = np.diag(np.sqrt(np.arange(1, levels)), k=1).astype(complex)
    identity = np.eye(levels, dtype=complex)
    return np.kron(annihilation, identity), np.kron(identity, annihilation)


def quadrature_variance_oracle(e: MatrixElements, which: str, phi: float) -> float:
    """
    稠密矩陣 oracle：把 X 型態嵌入每模三能級的 Fock 空間 (9×9)，
    計算 ½Tr(ρ{Ô†, Ô}) − |Tr(ρÔ)|²
    """
    levels = 3
    rho_small = x_state_matrix(e)
    rho = np.zeros((levels ** 2, levels ** 2), dtype=complex)
    # |n_A n_B⟩ -> n_A·3 + n_B
    embed = [0 * levels + 0, 1 * levels + 0, 0 * levels + 1, 1 * levels + 1]
    for i, row in enumerate(embed):
        for j, col in enumerate(embed):
            rho[row, col] = rho_small[i, j]

    a_op, b_op = _fock_operators(levels)
    phase = np.exp(-1j * phi)

    def q(op):
        return (op * phase + op.conj().T * np.conj(phase)) / np.sqrt(2)

    def p(op):
        return (op * phase - op.conj().T * np.conj(phase)) / (1j * np.sqrt(2))

    operators = {
        'q_plus': (q(a_op) + q(b_op)) / np.sqrt(2),
        'q_minus': (q(a_op) - q(b_op)) / np.sqrt(2),
        'p_plus': (p(a_op) + p(b_op)) / np.sqrt(2),
        'p_minus': (p(a_op) - p(b_op)) / np.sqrt(2),
    }
    if which not in operators:
        raise ValueError(f"which must be one of {QUADRATURES}, got {which!r}")
    op = operators[which]
    op_dag = op.conj().T
    second = 0.5 * np.trace(rho @ (op_dag @ op + op @ op_dag))
    mean = np.trace(rho @ op)
    return float(second.real - abs(mean) ** 2)


def optimal_phase(e: MatrixElements) -> float:
    """使 Re(e^{2iφ}M) = −|M| 的相位 φ* = (π − arg M)/2，取值 [0, π)"""
    return float(np.mod((np.pi - np.angle(e.M)) / 2.0, np.pi))


def inseparability_min(e: MatrixElements) -> float:
    """min_φ [V(q₊) + V(p₋)] = 1 + 2L − 2|M|"""
    _check_identical(e)
    return 1.0 + 2.0 * e.L_aa - 2.0 * abs(e.M)


def resolved_inseparability(e: MatrixElements, negativity: float) -> float:
    """
    與可分辨負性一致的 I_min

    N > 0 時 I_min = 1 − 2N；N 被判為 0 時 I_min 不低於 1，
    保證 I_min < 1 當且僅當 N > 0。
    """
    if negativity > 0:
        return 1.0 - 2.0 * negativity
    return max(1.0, inseparability_min(e))


def evaluate_elements(
    point: DimensionlessPoint,
    elements: MatrixElements,
    spec: QuadratureSpec,
    coupling: float = 1.0,
    diagnostics: Optional[Dict] = None,
) -> HarvestPoint:
    """由已算好的矩陣元組裝 HarvestPoint"""
    from .experiment import causal_class

    resolution = spec.abs_tol * coupling ** 2
    negativity = resolved_negativity(elements, resolution)
    concurrence, log_concurrence, flag = concurrence_and_log(negativity)
    details = {
        'quad_error': elements.error_estimate,
        'subdivisions': elements.subdivisions,
        'raw_gap': abs(elements.M) - elements.L_aa,
        'raw_inseparability_min': inseparability_min(elements),
    }
    if diagnostics:
        details.update(diagnostics)
    return HarvestPoint(
        point=point,
        negativity=negativity,
        concurrence=concurrence,
        log_concurrence=log_concurrence,
        concurrence_flag=flag,
        inseparability_min=resolved_inseparability(elements, negativity),
        optimal_phase=optimal_phase(elements),
        causal_class=causal_class(point.b, point.s),
        elements=elements,
        status='ok',
        diagnostics=details,
    )


def evaluate_point(
    point: DimensionlessPoint,
    spec: QuadratureSpec | None = None,
    coupling: float = 1.0,
) -> HarvestPoint:
    """
    單點端到端評估：矩陣元 -> 負性 -> 並發度 -> 不可分性 -> 因果分類

    異常:
        ConvergenceError / DomainError 向上傳遞
    """
    spec = spec or QuadratureSpec()
    start = time.perf_counter()
    elements = compute_elements(point, spec, coupling)
    elapsed = time.perf_counter() - start
    result = evaluate_elements(
        point, elements, spec, coupling, diagnostics={'elapsed': elapsed}
    )
    logger.debug(
        f"參數點完成 a={point.a:.6g} b={point.b:.6g}: N={result.negativity:.6e}, "
        f"I_min={result.inseparability_min:.6f}, {result.causal_class}"
    )
    return result
