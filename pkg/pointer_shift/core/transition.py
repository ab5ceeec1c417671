"""
측정 코어: 포인터 ⊗ 시스템 순간 결합 → 사후 선택 → 위치/운동량 이동

계산 경로 두 가지를 항상 함께 유지한다.
- 합산 경로: 변위 행렬 원소 ⟨m|D|n⟩ 이중 합 (position/momentum_shift_general)
- 오라클 경로: 생성자 i(a†−a) 의 고유분해로 D(b) 를 직접 적용 (evolve_postselect_oracle)
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import PointerShiftError, TruncationError, VanishingPostselectionError
from ..utils.convergence import check_truncation_convergence
from ..utils.event_logger import ScanEventLogger
from ..utils.executor import ordered_map
from .fock import (
    TAIL_WIDTH,
    CouplingConfig,
    FockVector,
    OperatorKind,
    build_operator,
    check_tail,
    displacement_matrix,
    expectation,
    variance,
)
from .measured_system import Observable, SelectionPair, conditional_expectation, weak_value
from .pointer_states import coherent_amplitudes, moments_a

logger = logging.getLogger(__name__)

# ============================================================================
# 허용치
# ============================================================================
PROB_FLOOR = 1e-12
BRANCH_TAIL = 1e-8


# ============================================================================
# 도메인 타입
# ============================================================================
@dataclass(frozen=True, eq=False)
class MeasurementScenario:
    """관측량 + 사전/사후 선택 + 포인터 초기 상태 + 결합 설정"""

    observable: Observable
    selection: SelectionPair
    pointer: FockVector
    coupling: CouplingConfig

    def __post_init__(self) -> None:
        self.selection.check_against(self.observable)

    @property
    def branch_shifts(self) -> np.ndarray:
        """고유값별 변위 Γ a_j / 2"""
        return self.coupling.gamma * self.observable.eigenvalues / 2


class ShiftReport(BaseModel):
    """격자점 하나의 결과 (실패 시 NaN + error 태그)"""

    model_config = ConfigDict(frozen=True)

    gamma: float
    theta: Optional[float] = None
    g: float = Field(..., description="결합 세기 (δx/g 계산용)")
    delta_x: float
    delta_p: float
    norm_const: float = Field(..., description="사후 선택 상태 정규화 계수 N = 1/√P")
    postselect_prob: float
    tail_mass: float
    error: Optional[str] = None

    @property
    def delta_x_over_g(self) -> float:
        return self.delta_x / self.g if self.g != 0 else math.nan

    @classmethod
    def failed(cls, *, gamma: float, theta: Optional[float], g: float, error: str) -> "ShiftReport":
        nan = math.nan
        return cls(
            gamma=gamma, theta=theta, g=g, delta_x=nan, delta_p=nan,
            norm_const=nan, postselect_prob=nan, tail_mass=nan, error=error,
        )


@dataclass(frozen=True, eq=False)
class FinalPointerState:
    """정규화된 사후 선택 포인터 상태와 그 확률"""

    state: FockVector
    postselect_prob: float

    @property
    def amps(self) -> np.ndarray:
        return self.state.amps


# ============================================================================
# 오라클 경로
# ============================================================================
@lru_cache(maxsize=8)
def _generator_eigensystem(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """K = i(a† − a) 의 고유분해, D(b) = exp(−ibK) (b 실수)"""
    lower = build_operator(OperatorKind.ANNIHILATE, dim).entries
    values, vectors = np.linalg.eigh(1j * (lower.conj().T - lower))
    values.setflags(write=False)
    vectors.setflags(write=False)
    return values, vectors


def evolve_postselect_oracle(scenario: MeasurementScenario) -> FinalPointerState:
    """
    Σ_i α_i β_i* D(Γa_i/2)|φ⟩ 를 2·dim 공간에서 직접 계산 후 정규화.
    - 변위 가지의 dim 바깥 질량이 1e-8 초과 → TruncationError
    - 사후 선택 확률 < 1e-12 → VanishingPostselectionError
    """
    dim = scenario.pointer.dim
    big = 2 * dim
    values, vectors = _generator_eigensystem(big)
    phi = scenario.pointer.padded(big)
    coeffs = vectors.conj().T @ phi

    out = np.zeros(big, dtype=complex)
    for weight, shift in zip(scenario.selection.weights, scenario.branch_shifts):
        if weight == 0:
            continue
        branch = phi if shift == 0 else vectors @ (np.exp(-1j * shift * values) * coeffs)
        outside = float(np.sum(np.abs(branch[dim:]) ** 2))
        if outside > BRANCH_TAIL:
            raise TruncationError(
                f"변위 가지 D({shift:.6g}) 의 dim={dim} 바깥 질량 {outside:.3e} > {BRANCH_TAIL:.0e}"
            )
        out += weight * branch

    prob = float(np.vdot(out, out).real)
    if prob < PROB_FLOOR:
        raise VanishingPostselectionError(f"사후 선택 확률 {prob:.3e} < {PROB_FLOOR:.0e}")
    return FinalPointerState(state=FockVector(out / math.sqrt(prob)), postselect_prob=prob)


def oracle_shifts(scenario: MeasurementScenario) -> Tuple[float, float]:
    """오라클 최종 상태의 (⟨X⟩ − ⟨X⟩₀, ⟨P⟩ − ⟨P⟩₀)"""
    final = evolve_postselect_oracle(scenario).state
    sigma = scenario.coupling.sigma
    shifts = []
    for kind in (OperatorKind.POSITION, OperatorKind.MOMENTUM):
        after = expectation(final, build_operator(kind, final.dim, sigma)).real
        before = expectation(scenario.pointer, build_operator(kind, scenario.pointer.dim, sigma)).real
        shifts.append(after - before)
    return shifts[0], shifts[1]


# ============================================================================
# 합산 경로
# ============================================================================
@dataclass(frozen=True)
class _SelectionSums:
    norm2: float
    x_num: float
    p_num: float
    x_init: float
    p_init: float


def _selection_sums(scenario: MeasurementScenario) -> _SelectionSums:
    """
    ⟨ψ|ψ⟩, ⟨ψ|X|ψ⟩, ⟨ψ|P|ψ⟩ (ψ 는 비정규화 사후 선택 포인터 상태).
    D_i† X D_j = D(Γ(a_j − a_i)/2)(X + g a_j),  D_i† P D_j = D(Γ(a_j − a_i)/2) P
    각 항은 Σ_{m,n} c_m* ⟨m|D|n⟩ (·)_n 로 평가 (X, P 적용을 위해 한 단계 패딩)
    """
    cfg = scenario.coupling
    size = scenario.pointer.dim + 1
    phi = scenario.pointer.padded(size)
    x_phi = build_operator(OperatorKind.POSITION, size, cfg.sigma).entries @ phi
    p_phi = build_operator(OperatorKind.MOMENTUM, size, cfg.sigma).entries @ phi
    weights = scenario.selection.weights
    eigen = scenario.observable.eigenvalues

    norm2 = x_num = p_num = 0j
    blocks: Dict[float, Tuple[complex, complex, complex]] = {}
    for i, j in np.ndindex(eigen.size, eigen.size):
        pair = np.conj(weights[i]) * weights[j]
        if pair == 0:
            continue
        delta = float(cfg.gamma * (eigen[j] - eigen[i]) / 2)
        if delta not in blocks:
            matrix = displacement_matrix(size, delta)
            blocks[delta] = (
                np.vdot(phi, matrix @ phi),
                np.vdot(phi, matrix @ x_phi),
                np.vdot(phi, matrix @ p_phi),
            )
        overlap, x_term, p_term = blocks[delta]
        norm2 += pair * overlap
        x_num += pair * (x_term + cfg.g * eigen[j] * overlap)
        p_num += pair * p_term

    return _SelectionSums(
        norm2=float(norm2.real),
        x_num=float(x_num.real),
        p_num=float(p_num.real),
        x_init=float(np.vdot(phi, x_phi).real),
        p_init=float(np.vdot(phi, p_phi).real),
    )


def _checked_prob(sums: _SelectionSums) -> float:
    if sums.norm2 < PROB_FLOOR:
        raise VanishingPostselectionError(f"사후 선택 확률 {sums.norm2:.3e} < {PROB_FLOOR:.0e}")
    return sums.norm2


def branch_tail_mass(scenario: MeasurementScenario) -> float:
    """
    절단 진단: 변위 가지 D(Γa_j/2)|φ⟩ 마다
    (dim 바깥 손실 질량) + Σ_{n ≥ dim−4} |·|² 의 최댓값.
    손실 질량이 1e-8 을 넘으면 TruncationError.
    """
    dim = scenario.pointer.dim
    worst = check_tail(scenario.pointer, name="pointer")
    for weight, shift in zip(scenario.selection.weights, scenario.branch_shifts):
        if weight == 0 or shift == 0:
            continue
        branch = displacement_matrix(dim, float(shift)) @ scenario.pointer.amps
        outside = max(0.0, 1.0 - float(np.vdot(branch, branch).real))
        if outside > BRANCH_TAIL:
            raise TruncationError(
                f"변위 가지 D({shift:.6g}) 의 dim={dim} 바깥 질량 {outside:.3e} > {BRANCH_TAIL:.0e}"
            )
        edge = float(np.sum(np.abs(branch[max(0, dim - TAIL_WIDTH):]) ** 2))
        worst = max(worst, outside + edge)
    return worst


def postselection_probability(scenario: MeasurementScenario) -> float:
    """Σ_{i,j} (α_iβ_i*)* α_jβ_j* Σ_{m,n} c_m* c_n ⟨m|D(Γ(a_j−a_i)/2)|n⟩"""
    return _checked_prob(_selection_sums(scenario))


def position_shift_general(scenario: MeasurementScenario) -> float:
    sums = _selection_sums(scenario)
    return sums.x_num / _checked_prob(sums) - sums.x_init


def momentum_shift_general(scenario: MeasurementScenario) -> float:
    sums = _selection_sums(scenario)
    return sums.p_num / _checked_prob(sums) - sums.p_init


def shift_report(scenario: MeasurementScenario, theta: Optional[float] = None) -> ShiftReport:
    """합산 경로로 두 이동량 + 사후 선택 확률 + 절단 진단을 한 번에 계산"""
    tail = branch_tail_mass(scenario)
    sums = _selection_sums(scenario)
    prob = _checked_prob(sums)
    return ShiftReport(
        gamma=scenario.coupling.gamma,
        theta=theta,
        g=scenario.coupling.g,
        delta_x=sums.x_num / prob - sums.x_init,
        delta_p=sums.p_num / prob - sums.p_init,
        norm_const=1 / math.sqrt(prob),
        postselect_prob=prob,
        tail_mass=tail,
    )


# ============================================================================
# 극한 닫힌식
# ============================================================================
def position_shift_weak_limit(scenario: MeasurementScenario) -> float:
    """g·Re⟨A⟩_w + 2g·Im⟨A⟩_w·Im(⟨a²⟩ − ⟨a⟩²)"""
    aw = weak_value(scenario.observable, scenario.selection)
    first, second = moments_a(scenario.pointer)
    g = scenario.coupling.g
    return g * aw.real + 2 * g * aw.imag * (second - first**2).imag


def position_shift_strong_limit(observable: Observable, selection: SelectionPair, coupling: CouplingConfig) -> float:
    """g·⟨A⟩_c"""
    return coupling.g * conditional_expectation(observable, selection)


def momentum_shift_weak_limit(scenario: MeasurementScenario) -> float:
    """2g·Im⟨A⟩_w·Var(P)"""
    aw = weak_value(scenario.observable, scenario.selection)
    spread = variance(scenario.pointer, OperatorKind.MOMENTUM, scenario.coupling.sigma)
    return 2 * scenario.coupling.g * aw.imag * spread


def momentum_shift_strong_limit() -> float:
    return 0.0


def squeezed_weak_position_shift(aw: complex, r: float, phi_xi: float, g: float) -> float:
    """압착 코히런트 포인터의 약한 극한: g Re⟨A⟩_w − g Im⟨A⟩_w sinh 2r sin φ_ξ (α 와 무관)"""
    aw = complex(aw)
    return g * aw.real - g * aw.imag * math.sinh(2 * r) * math.sin(phi_xi)


def spac_weak_position_shift(aw: complex, alpha: complex, g: float) -> float:
    """SPAC 포인터의 약한 극한: g Re⟨A⟩_w − 2g|α|² sin 2φ_α / (1+|α|²)² · Im⟨A⟩_w"""
    aw, alpha = complex(aw), complex(alpha)
    size = abs(alpha) ** 2
    tilt = 2 * size * math.sin(2 * cmath.phase(alpha)) / (1 + size) ** 2
    return g * aw.real - g * tilt * aw.imag


# ============================================================================
# 코히런트 포인터 + σ_x 시나리오 닫힌식
# ============================================================================
def coherent_denominator(theta: float, beta: complex, cfg: CouplingConfig) -> float:
    """M = 1 − cos 2θ · cos(2Γ Im β) · e^{−Γ²/2}  (Im β = r sin φ)"""
    gamma = cfg.gamma
    value = 1 - math.cos(2 * theta) * math.cos(2 * gamma * complex(beta).imag) * math.exp(-(gamma**2) / 2)
    if value <= PROB_FLOOR:
        raise VanishingPostselectionError(f"닫힌식 분모 {value:.3e} ≤ {PROB_FLOOR:.0e} (θ={theta}, Γ={gamma})")
    return value


def coherent_postselect_probability(theta: float, beta: complex, cfg: CouplingConfig) -> float:
    return coherent_denominator(theta, beta, cfg) / 2


def coherent_position_shift(theta: float, beta: complex, cfg: CouplingConfig) -> float:
    """δx = −g sin 2θ / M"""
    return -cfg.g * math.sin(2 * theta) / coherent_denominator(theta, beta, cfg)


def coherent_momentum_shift(theta: float, beta: complex, cfg: CouplingConfig) -> float:
    """δp = Γ cos 2θ e^{−Γ²/2} sin(2Γ Im β) / (2σM)"""
    gamma = cfg.gamma
    denom = coherent_denominator(theta, beta, cfg)
    interference = math.exp(-(gamma**2) / 2) * math.sin(2 * gamma * complex(beta).imag)
    return gamma * math.cos(2 * theta) * interference / (2 * cfg.sigma * denom)


def coherent_final_state(theta: float, beta: complex, cfg: CouplingConfig, dim: int) -> FockVector:
    """
    (sin(π/4−θ) e^{−iχ}|β+Γ/2⟩ − cos(π/4−θ) e^{iχ}|β−Γ/2⟩)/√M,  χ = Γ Im β / 2
    """
    beta = complex(beta)
    denom = coherent_denominator(theta, beta, cfg)
    half = cfg.gamma / 2
    chi = cfg.gamma * beta.imag / 2
    amps = math.sin(math.pi / 4 - theta) * np.exp(-1j * chi) * coherent_amplitudes(beta + half, dim)
    amps = amps - math.cos(math.pi / 4 - theta) * np.exp(1j * chi) * coherent_amplitudes(beta - half, dim)
    outside = denom - float(np.vdot(amps, amps).real)
    if outside > BRANCH_TAIL:
        raise TruncationError(f"닫힌식 최종 상태의 dim={dim} 바깥 질량 {outside:.3e} > {BRANCH_TAIL:.0e}")
    return FockVector.from_amplitudes(amps)


# ============================================================================
# 스캔
# ============================================================================
ScenarioFactory = Callable[[float, float, Optional[int]], MeasurementScenario]
"""(Γ, θ, dim 또는 None) → MeasurementScenario"""


def _scan_point(
    factory: ScenarioFactory,
    gamma: float,
    theta: float,
    events: ScanEventLogger,
    check_convergence: bool,
) -> ShiftReport:
    events.on_event("point_started", gamma=gamma, theta=theta)
    g = math.nan
    try:
        scenario = factory(gamma, theta, None)
        g = scenario.coupling.g
        report = shift_report(scenario, theta=theta)
        if check_convergence:

            def rerun(dim: int) -> Sequence[float]:
                again = shift_report(factory(gamma, theta, dim), theta=theta)
                return [again.delta_x, again.delta_p, again.postselect_prob]

            check_truncation_convergence(rerun, scenario.pointer.dim, name=f"gamma={gamma:.6g},theta={theta:.6g}")
    except PointerShiftError as exc:
        events.on_event("point_failed", gamma=gamma, theta=theta, error=type(exc).__name__, detail=str(exc))
        return ShiftReport.failed(gamma=gamma, theta=theta, g=g, error=type(exc).__name__)
    events.on_event("point_completed", gamma=gamma, theta=theta)
    return report


def shift_scan(
    factory: ScenarioFactory,
    gammas: Sequence[float],
    thetas: Sequence[float],
    *,
    events: Optional[ScanEventLogger] = None,
    check_convergence: bool = False,
) -> List[ShiftReport]:
    """
    (Γ, θ) 격자 스캔.
    - 행 순서는 (Γ, θ) 입력 순서 고정 (병렬 실행 순서와 무관)
    - 격자점 실패는 NaN 행 + error 태그로 기록하고 계속 진행
    """
    events = events or ScanEventLogger()
    points = [(float(gamma), float(theta)) for gamma in gammas for theta in thetas]
    logger.info("🚀 스캔 시작 | gammas=%d thetas=%d points=%d", len(gammas), len(thetas), len(points))
    reports = ordered_map(
        lambda point: _scan_point(factory, point[0], point[1], events, check_convergence),
        points,
        name="shift-scan",
    )
    logger.info("✅ 스캔 완료 | %s", events.summary())
    return reports
