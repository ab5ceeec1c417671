from __future__ import annotations

import cmath
import logging
import math
from typing import Annotated, Any, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator
from scipy.special import gammaln

from ..errors import DimensionError, InvalidParameterError, NormalizationError, TruncationError
from .fock import FockVector, OperatorKind, build_operator, check_tail, default_dim

logger = logging.getLogger(__name__)

# ============================================================================
# 설정
# ============================================================================
TAIL_BUDGET = 1e-10
MAX_SQUEEZE = 20.0
MAX_DEFAULT_DIM = 8192
MOMENT_NORM_TOL = 1e-8


def coerce_complex(value: Any) -> complex:
    """
    설정 파일 친화적 복소수 입력.
    - 숫자 / "1+2j" 문자열
    - [re, im] 리스트
    - {"re": .., "im": ..} 또는 {"abs": .., "arg": ..} (극형식)
    """
    if isinstance(value, complex):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict):
        if "abs" in value:
            return cmath.rect(float(value["abs"]), float(value.get("arg", 0.0)))
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    raise ValueError(f"복소수로 해석할 수 없음: {value!r}")


ComplexLike = Annotated[complex, BeforeValidator(coerce_complex)]


# ============================================================================
# 스키마 정의
# ============================================================================
class PointerSpec(BaseModel):
    """포인터 상태 계열 + 파라미터 + 절단 차원"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: Literal["fock", "coherent", "squeezed_coherent", "spac"] = Field("coherent", description="상태 계열")
    n: int = Field(0, ge=0, description="fock(n) 의 광자수")
    alpha: ComplexLike = Field(0j, description="코히런트 진폭 α (SPAC/압착 포함)")
    r: float = Field(0.0, ge=0, description="압착 크기 r")
    phi_xi: float = Field(0.0, description="압착 위상 φ_ξ")
    dim: Optional[int] = Field(None, ge=1, description="절단 차원 (없으면 기본 규칙)")

    @model_validator(mode="after")
    def _check_squeeze(self) -> "PointerSpec":
        if self.family == "squeezed_coherent" and self.r > MAX_SQUEEZE:
            raise ValueError(f"r > {MAX_SQUEEZE} 는 cosh r overflow 위험으로 거부: r={self.r}")
        return self

    def suggested_dim(self, *targets: complex) -> int:
        """추가 변위 목표(예: β ± Γ/2)까지 감안한 기본 절단 차원"""
        shifted = [self.alpha + t for t in targets] or [self.alpha]
        base = default_dim(*shifted)
        if self.family == "fock":
            return max(base, default_dim(*(math.sqrt(self.n) + abs(t) for t in targets or [0])))
        if self.family == "squeezed_coherent":
            base += squeeze_padding(self.r)
        if self.family == "spac":
            base += 1
        if base > MAX_DEFAULT_DIM:
            raise TruncationError(f"{self.family}: 기본 절단 차원 {base} 이 상한 {MAX_DEFAULT_DIM} 초과 (dim 을 직접 지정하세요)")
        return base


# ============================================================================
# 생성자
# ============================================================================
def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """c_n = e^{-|α|²/2} α^n/√n! (n < dim), 절단 후 재정규화하지 않은 원 진폭"""
    alpha = complex(alpha)
    if dim < 1:
        raise DimensionError(f"dim 은 1 이상이어야 함: dim={dim}")
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    n = np.arange(dim)
    with np.errstate(under="ignore"):
        mag = np.exp(-abs(alpha) ** 2 / 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1))
    return mag * np.exp(1j * n * cmath.phase(alpha))


def _finalize(amps: np.ndarray, *, name: str) -> FockVector:
    """절단 바깥 질량 확인 후 재정규화"""
    outside = 1.0 - float(np.vdot(amps, amps).real)
    if outside > TAIL_BUDGET:
        raise TruncationError(
            f"{name}: dim={amps.size} 밖의 질량 {outside:.3e} > {TAIL_BUDGET:.0e} (dim 을 늘리세요)"
        )
    state = FockVector.from_amplitudes(amps)
    check_tail(state, name=name)
    return state


def squeeze_padding(r: float) -> int:
    """압착 꼬리 (tanh r)^n 이 e^{-28} 아래로 내려가는 데 필요한 추가 준위 수"""
    if r <= 0:
        return 0
    th = math.tanh(r)
    if th >= 1.0:
        raise TruncationError(f"squeezed_coherent: r={r} 에서 tanh r 이 1.0 으로 반올림되어 절단 차원을 정할 수 없음")
    return math.ceil(28.0 / -math.log(th))


def _resolve_dim(dim: Optional[int], fallback: int, *, name: str) -> int:
    if dim is not None:
        return dim
    if fallback > MAX_DEFAULT_DIM:
        raise TruncationError(f"{name}: 기본 절단 차원 {fallback} 이 상한 {MAX_DEFAULT_DIM} 초과 (dim 을 직접 지정하세요)")
    return fallback


def make_fock(n: int, dim: Optional[int] = None) -> FockVector:
    dim = _resolve_dim(dim, default_dim(math.sqrt(n)), name="fock")
    return FockVector.basis(n, dim)


def make_coherent(alpha: complex, dim: Optional[int] = None) -> FockVector:
    """|α⟩ 를 dim 에서 절단 (꼬리 질량 > 1e-10 이면 TruncationError)"""
    dim = _resolve_dim(dim, default_dim(alpha), name="coherent")
    return _finalize(coherent_amplitudes(alpha, dim), name="coherent")


def make_squeezed_coherent(alpha: complex, r: float, phi_xi: float, dim: Optional[int] = None) -> FockVector:
    """
    |α, ξ⟩ = D(α)S(ξ)|0⟩, ξ = r e^{iφ_ξ}.

    c_n = e^{-|α|²/2 - α*² e^{iφ_ξ} tanh r / 2} / √cosh r · h_n,
    h_n = t^n H_n(γ/u)/√n! (t = √(e^{iφ_ξ} tanh r / 2), u = √(e^{iφ_ξ} sinh 2r), 주가지),
    γ = α cosh r + α* e^{iφ_ξ} sinh r.
    t/u = 1/(2 cosh r) 가 실수이므로 h_n 은 분기 없이 다음 점화식으로 계산된다:
        h_{n+1} = (γ/cosh r · h_n − e^{iφ_ξ} tanh r · √n · h_{n−1}) / √(n+1)
    """
    if r < 0 or r > MAX_SQUEEZE:
        raise InvalidParameterError(f"압착 크기 r 은 [0, {MAX_SQUEEZE}] 범위여야 함: r={r}")
    alpha = complex(alpha)
    if dim is None:
        dim = _resolve_dim(None, default_dim(alpha) + squeeze_padding(r), name="squeezed_coherent")

    ch, th = math.cosh(r), math.tanh(r)
    rot = cmath.exp(1j * phi_xi)
    gamma = alpha * ch + alpha.conjugate() * rot * math.sinh(r)
    pref = cmath.exp(-abs(alpha) ** 2 / 2 - 0.5 * alpha.conjugate() ** 2 * rot * th) / math.sqrt(ch)

    h = np.zeros(dim, dtype=complex)
    h[0] = 1.0
    if dim > 1:
        h[1] = gamma / ch
    for n in range(1, dim - 1):
        h[n + 1] = (gamma / ch * h[n] - rot * th * math.sqrt(n) * h[n - 1]) / math.sqrt(n + 1)
    return _finalize(pref * h, name="squeezed_coherent")


def make_spac(alpha: complex, dim: Optional[int] = None) -> FockVector:
    """단일 광자 추가 코히런트 상태 a†|α⟩/√(1+|α|²)"""
    alpha = complex(alpha)
    dim = _resolve_dim(dim, default_dim(alpha) + 1, name="spac")
    if dim < 2:
        raise DimensionError(f"SPAC 상태는 dim ≥ 2 필요: dim={dim}")
    base = coherent_amplitudes(alpha, dim - 1)
    amps = np.zeros(dim, dtype=complex)
    amps[1:] = base * np.sqrt(np.arange(1, dim)) / math.sqrt(1 + abs(alpha) ** 2)
    return _finalize(amps, name="spac")


def realize(spec: PointerSpec, dim: Optional[int] = None) -> FockVector:
    """PointerSpec → FockVector (dim 인자가 spec.dim 보다 우선)"""
    size = dim if dim is not None else spec.dim
    logger.debug("🧪 포인터 상태 생성 | family=%s dim=%s", spec.family, size)
    if spec.family == "fock":
        return make_fock(spec.n, size)
    if spec.family == "coherent":
        return make_coherent(spec.alpha, size)
    if spec.family == "squeezed_coherent":
        return make_squeezed_coherent(spec.alpha, spec.r, spec.phi_xi, size)
    return make_spac(spec.alpha, size)


# ============================================================================
# 모멘트
# ============================================================================
def moments_a(state: Union[FockVector, np.ndarray]) -> Tuple[complex, complex]:
    """(⟨a⟩, ⟨a²⟩): ⟨a⟩ = Σ_n √(n+1) conj(c_n) c_{n+1}, 행렬 적용으로 계산"""
    amps = state.amps if isinstance(state, FockVector) else np.asarray(state, dtype=complex)
    norm2 = float(np.vdot(amps, amps).real)
    if abs(norm2 - 1.0) > MOMENT_NORM_TOL:
        raise NormalizationError(f"정규화되지 않은 상태: Σ|c_n|²={norm2!r}")
    if amps.size < 2:
        return 0j, 0j
    lower = build_operator(OperatorKind.ANNIHILATE, amps.size).entries
    once = lower @ amps
    twice = lower @ once
    return complex(np.vdot(amps, once)), complex(np.vdot(amps, twice))
