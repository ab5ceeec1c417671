from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from ..errors import (
    DimensionError,
    NearOrthogonalPostselectionError,
    NormalizationError,
    OrthogonalSelectionError,
)

logger = logging.getLogger(__name__)

# ============================================================================
# 허용치
# ============================================================================
EPS_OVERLAP = 1e-10
ORTHOGONAL_FLOOR = 1e-30
NORM_TOL = 1e-12


def _normalized(values: Sequence[complex], *, name: str) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.ndim != 1:
        raise DimensionError(f"{name} 는 1차원 진폭 배열이어야 함: shape={arr.shape}")
    norm2 = float(np.vdot(arr, arr).real)
    if not math.isfinite(norm2) or abs(norm2 - 1.0) > NORM_TOL:
        raise NormalizationError(f"{name} 정규화 위반: Σ|·|²={norm2!r}")
    arr.setflags(write=False)
    return arr


# ============================================================================
# 도메인 타입
# ============================================================================
@dataclass(frozen=True, eq=False)
class Observable:
    """Â = Σ_j a_j |a_j⟩⟨a_j| 의 스펙트럼 데이터 (중복 고유값 허용)"""

    eigenvalues: np.ndarray
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        values = np.array(self.eigenvalues, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise DimensionError(f"관측량은 고유값 2개 이상 필요: shape={values.shape}")
        if not np.all(np.isfinite(values)):
            raise NormalizationError("고유값에 NaN/Inf 포함")
        labels = tuple(self.labels) or tuple(f"a{j}" for j in range(values.size))
        if len(labels) != values.size:
            raise DimensionError(f"labels 길이 불일치: labels={len(labels)} eigenvalues={values.size}")
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)


@dataclass(frozen=True, eq=False)
class SelectionPair:
    """사전 선택 α_j, 사후 선택 β_j (고유기저 진폭)"""

    pre: np.ndarray
    post: np.ndarray

    def __post_init__(self) -> None:
        pre = _normalized(self.pre, name="pre")
        post = _normalized(self.post, name="post")
        if pre.size != post.size:
            raise DimensionError(f"pre/post 차원 불일치: pre={pre.size} post={post.size}")
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "post", post)

    @classmethod
    def from_unnormalized(cls, pre: Sequence[complex], post: Sequence[complex]) -> "SelectionPair":
        """설정 파일의 반올림된 진폭을 정규화해서 생성"""
        arrays = []
        for name, values in (("pre", pre), ("post", post)):
            arr = np.asarray(values, dtype=complex)
            norm = float(np.linalg.norm(arr))
            if not math.isfinite(norm) or norm == 0.0:
                raise NormalizationError(f"{name} 정규화 불가능: norm={norm!r}")
            arrays.append(arr / norm)
        return cls(pre=arrays[0], post=arrays[1])

    @property
    def dim(self) -> int:
        return int(self.pre.size)

    @property
    def weights(self) -> np.ndarray:
        """분기 가중치 α_j β_j*"""
        return self.pre * np.conj(self.post)

    @property
    def overlap(self) -> complex:
        """⟨ψ_f|ψ_i⟩ = Σ_j α_j β_j*"""
        return complex(np.sum(self.weights))

    def check_against(self, obs: Observable) -> None:
        if obs.dim != self.dim:
            raise DimensionError(f"관측량/선택 차원 불일치: observable={obs.dim} selection={self.dim}")


# ============================================================================
# 값 클래스 3종
# ============================================================================
def expectation_value(obs: Observable, pre: Sequence[complex]) -> float:
    """Σ_j a_j |α_j|²"""
    amps = _normalized(pre, name="pre")
    if amps.size != obs.dim:
        raise DimensionError(f"관측량/상태 차원 불일치: observable={obs.dim} pre={amps.size}")
    return float(np.dot(obs.eigenvalues, np.abs(amps) ** 2))


def conditional_expectation(obs: Observable, sel: SelectionPair) -> float:
    """Σ_j a_j |α_j β_j*|² / Σ_j |α_j β_j*|²"""
    sel.check_against(obs)
    probs = np.abs(sel.weights) ** 2
    total = float(np.sum(probs))
    if total <= ORTHOGONAL_FLOOR:
        raise OrthogonalSelectionError(f"사전/사후 선택 성분 곱이 모두 0: Σ|α_j β_j*|²={total:.3e}")
    return float(np.dot(obs.eigenvalues, probs) / total)


def weak_value(obs: Observable, sel: SelectionPair, eps: float = EPS_OVERLAP) -> complex:
    """⟨A⟩_w = Σ_j a_j α_j β_j* / Σ_j α_j β_j*"""
    sel.check_against(obs)
    overlap = sel.overlap
    if abs(overlap) <= eps:
        raise NearOrthogonalPostselectionError(f"|⟨ψ_f|ψ_i⟩|={abs(overlap):.3e} ≤ ε_overlap={eps:.0e}")
    return complex(np.dot(obs.eigenvalues, sel.weights) / overlap)


def qubit_sigma_x(theta: float) -> Tuple[Observable, SelectionPair]:
    """
    σ_x 측정 시나리오 (σ_x 고유기저 |+⟩, |−⟩ 표기).
    pre = |↓⟩ = (|+⟩ − |−⟩)/√2, post = cos θ|↑⟩ − sin θ|↓⟩
    → ⟨σ_x⟩_w = −cot θ, ⟨σ_x⟩_c = −sin 2θ
    """
    root = 1 / math.sqrt(2)
    c, s = math.cos(theta), math.sin(theta)
    obs = Observable(np.array([1.0, -1.0]), labels=("+", "-"))
    sel = SelectionPair(
        pre=np.array([root, -root], dtype=complex),
        post=np.array([(c - s) * root, (c + s) * root], dtype=complex),
    )
    return obs, sel
