from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import ndimage

from ..errors import InvalidParameterError, TruncationError
from ..utils.executor import ordered_map
from .fock import CouplingConfig, FockVector, default_dim
from .pointer_states import coherent_amplitudes
from .transition import coherent_denominator

logger = logging.getLogger(__name__)

# ============================================================================
# 설정
# ============================================================================
REFERENCE_TAIL = 1e-10
CONTOUR_LEVEL = 1 / (math.e * math.pi)

QSource = Union[FockVector, Callable[[np.ndarray], np.ndarray]]


class GridSpec(BaseModel):
    """위상 공간 격자: 실수축/허수축 (min, max, count)"""

    model_config = ConfigDict(frozen=True)

    re_min: float
    re_max: float
    re_count: int = Field(201, ge=0)
    im_min: float
    im_max: float
    im_count: int = Field(201, ge=0)

    def axes(self) -> Tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.re_min, self.re_max, self.re_count),
            np.linspace(self.im_min, self.im_max, self.im_count),
        )


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """
    Q 값 격자. values[i, k] = Q(re_axis[k] + i·im_axis[i]) (행 = 허수축, row-major)
    """

    re_range: Tuple[float, float, int]
    im_range: Tuple[float, float, int]
    values: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def re_axis(self) -> np.ndarray:
        return np.linspace(*self.re_range)

    @property
    def im_axis(self) -> np.ndarray:
        return np.linspace(*self.im_range)

    def spacing(self) -> Tuple[float, float]:
        def step(lo: float, hi: float, count: int) -> float:
            return (hi - lo) / (count - 1) if count > 1 else 0.0

        return step(*self.re_range), step(*self.im_range)

    def quadrature(self) -> float:
        """Σ Q ΔαᵣΔαᵢ (충분히 넓은 격자에서 ≈ 1)"""
        d_re, d_im = self.spacing()
        return float(np.sum(self.values) * d_re * d_im)

    def peak(self) -> Tuple[float, float, float]:
        """(α_r, α_i, Q_max)"""
        i, k = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return float(self.re_axis[k]), float(self.im_axis[i]), float(self.values[i, k])

    def count_components(self, level: float = CONTOUR_LEVEL) -> int:
        """Q ≥ level 영역의 연결 성분 수 (등고선 덩어리 개수)"""
        _, count = ndimage.label(self.values >= level)
        return int(count)


# ============================================================================
# Q 함수 (임의 상태)
# ============================================================================
def _reference_dim(state: FockVector, peak: float) -> int:
    return max(state.dim, default_dim(peak))


def q_function(state: FockVector, alpha: complex) -> float:
    """Q(α) = (1/π)|⟨α|ψ⟩|²"""
    return float(q_function_many(state, np.array([complex(alpha)]))[0])


def q_function_many(state: FockVector, alphas: Sequence[complex]) -> np.ndarray:
    """
    여러 α 에 대한 Q 값.
    코히런트 탐침 차원은 max(state.dim, default_dim(max|α|)) 로 맞추고 상태는 0 으로 패딩한다.
    """
    points = np.asarray(alphas, dtype=complex).ravel()
    if points.size == 0:
        return np.zeros(0)
    dim = _reference_dim(state, float(np.max(np.abs(points))))
    psi = state.padded(dim)
    references = np.stack([coherent_amplitudes(a, dim) for a in points])
    lost = 1.0 - np.sum(np.abs(references) ** 2, axis=1)
    if float(np.max(lost)) > REFERENCE_TAIL:
        raise TruncationError(f"코히런트 탐침 꼬리 질량 {float(np.max(lost)):.3e} > {REFERENCE_TAIL:.0e} (dim={dim})")
    overlaps = np.conj(references) @ psi
    return np.abs(overlaps) ** 2 / math.pi


# ============================================================================
# Q 함수 (σ_x 사후 선택 + 코히런트 포인터 닫힌식)
# ============================================================================
def q_final_terms(
    theta: float, beta: complex, cfg: CouplingConfig, alphas: Sequence[complex]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    최종 상태 Q = 두 가우시안 + 간섭항.
    - sin²(π/4−θ) e^{−|α−β−Γ/2|²} / (πM)
    - cos²(π/4−θ) e^{−|α−β+Γ/2|²} / (πM)
    - −cos 2θ e^{−(|α−β−Γ/2|² + |α−β+Γ/2|²)/2} cos(Γ(Im β + Im α)) / (πM)
    """
    beta = complex(beta)
    points = np.asarray(alphas, dtype=complex)
    denom = coherent_denominator(theta, beta, cfg)
    half = cfg.gamma / 2
    plus = np.abs(points - beta - half) ** 2
    minus = np.abs(points - beta + half) ** 2
    scale = math.pi * denom
    lobe_plus = math.sin(math.pi / 4 - theta) ** 2 * np.exp(-plus) / scale
    lobe_minus = math.cos(math.pi / 4 - theta) ** 2 * np.exp(-minus) / scale
    fringe = -math.cos(2 * theta) * np.exp(-(plus + minus) / 2) * np.cos(cfg.gamma * (beta.imag + points.imag)) / scale
    return lobe_plus, lobe_minus, fringe


def q_final_closed_form(theta: float, beta: complex, cfg: CouplingConfig, alpha: complex) -> float:
    lobe_plus, lobe_minus, fringe = q_final_terms(theta, beta, cfg, np.array([complex(alpha)]))
    return float(lobe_plus[0] + lobe_minus[0] + fringe[0])


def closed_form_source(theta: float, beta: complex, cfg: CouplingConfig) -> Callable[[np.ndarray], np.ndarray]:
    """q_grid 용 닫힌식 Q 평가기"""

    def evaluate(alphas: np.ndarray) -> np.ndarray:
        lobe_plus, lobe_minus, fringe = q_final_terms(theta, beta, cfg, alphas)
        return lobe_plus + lobe_minus + fringe

    return evaluate


# ============================================================================
# 격자 샘플링
# ============================================================================
def default_fig3_grid(beta: complex, gamma: float, count: int = 201) -> GridSpec:
    """[β_r − Γ/2 − 4, β_r + Γ/2 + 4] × [β_i − 4, β_i + 4]"""
    beta = complex(beta)
    half = abs(gamma) / 2
    return GridSpec(
        re_min=beta.real - half - 4, re_max=beta.real + half + 4, re_count=count,
        im_min=beta.imag - 4, im_max=beta.imag + 4, im_count=count,
    )


def q_grid(source: QSource, spec: GridSpec, *, metadata: Optional[Dict[str, Any]] = None) -> PhaseGrid:
    """행(허수축) 단위 병렬 평가, 출력 순서는 격자 순서로 고정"""
    if spec.re_count < 1 or spec.im_count < 1:
        raise InvalidParameterError(f"빈 격자: re_count={spec.re_count} im_count={spec.im_count}")
    re_axis, im_axis = spec.axes()

    if isinstance(source, FockVector):
        state = source

        def evaluate(alphas: np.ndarray) -> np.ndarray:
            return q_function_many(state, alphas)

    else:
        evaluate = source

    logger.info("🧭 Q 격자 계산 | re_count=%d im_count=%d", spec.re_count, spec.im_count)
    rows = ordered_map(lambda im: evaluate(re_axis + 1j * im), list(im_axis), name="q-grid")
    values = np.vstack(rows)
    values.setflags(write=False)
    meta = {"contour_level": CONTOUR_LEVEL, **(metadata or {})}
    return PhaseGrid(
        re_range=(spec.re_min, spec.re_max, spec.re_count),
        im_range=(spec.im_min, spec.im_max, spec.im_count),
        values=values,
        metadata=meta,
    )


# ============================================================================
# 위치 표현
# ============================================================================
def wavefunction_x(state: FockVector, xs: Sequence[float], sigma: float = 1.0) -> np.ndarray:
    """
    ψ(x) = Σ_n c_n ⟨x|n⟩, X̂ = σ(â + â†) 규약 (바닥 상태 폭 σ).
    ⟨x|n⟩ 은 ξ = x/(√2σ) 의 정규화 Hermite 함수 점화식으로 계산.
    """
    if sigma <= 0:
        raise InvalidParameterError(f"σ 는 양수여야 함: sigma={sigma}")
    xi = np.asarray(xs, dtype=float) / (math.sqrt(2) * sigma)
    prev = np.zeros_like(xi)
    cur = (2 * math.pi * sigma**2) ** -0.25 * np.exp(-(xi**2) / 2)
    out = state.amps[0] * cur
    for n in range(state.dim - 1):
        nxt = math.sqrt(2 / (n + 1)) * xi * cur - math.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        out = out + state.amps[n + 1] * cur
    return out
