from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import binom, gammaln

from ..errors import DimensionError, InvalidParameterError, NormalizationError
from ..utils.context_manager import displacement_perturbation_var

logger = logging.getLogger(__name__)

# ============================================================================
# 허용치 및 절단 규칙
# ============================================================================
NORM_TOL = 1e-12
TAIL_WARN = 1e-10
TAIL_WIDTH = 4


def default_dim(*targets: complex) -> int:
    """기본 절단 차원: max(64, ceil(8·(|목표 변위|² + 4)))"""
    peak = max((abs(complex(t)) for t in targets), default=0.0)
    return max(64, math.ceil(8 * (peak**2 + 4)))


# ============================================================================
# 도메인 타입
# ============================================================================
@dataclass(frozen=True, eq=False)
class FockVector:
    """절단 Fock 공간의 순수 상태 Σ_n c_n|n⟩ (불변, 정규화 보장)"""

    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise DimensionError(f"FockVector 는 길이 1 이상의 1차원 배열이어야 함: shape={amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise NormalizationError("FockVector 진폭에 NaN/Inf 포함")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NormalizationError(f"FockVector 정규화 위반: Σ|c_n|²={norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps: np.ndarray, *, normalize: bool = True) -> "FockVector":
        arr = np.asarray(amps, dtype=complex)
        if normalize:
            norm = float(np.linalg.norm(arr))
            if not math.isfinite(norm) or norm == 0.0:
                raise NormalizationError(f"정규화 불가능한 진폭: norm={norm!r}")
            arr = arr / norm
        return cls(arr)

    @classmethod
    def basis(cls, n: int, dim: int) -> "FockVector":
        if not 0 <= n < dim:
            raise DimensionError(f"|{n}⟩ 는 dim={dim} 안에 없음")
        amps = np.zeros(dim, dtype=complex)
        amps[n] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return int(self.amps.size)

    @property
    def tail_mass(self) -> float:
        return tail_mass(self)

    def padded(self, dim: int) -> np.ndarray:
        """dim 까지 0 으로 채운 진폭 사본"""
        if dim < self.dim:
            raise DimensionError(f"padding 대상 dim={dim} < 현재 dim={self.dim}")
        out = np.zeros(dim, dtype=complex)
        out[: self.dim] = self.amps
        return out


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """절단 Fock 공간의 dim×dim 연산자 행렬"""

    entries: np.ndarray
    kind: str = "custom"

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"정방 행렬이 아님: shape={entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def is_hermitian(self, tol: float = 1e-14) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) < tol)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.dim != self.dim:
            raise DimensionError(f"연산자 차원 불일치: {self.dim} vs {other.dim}")
        return OperatorMatrix(self.entries @ other.entries, kind=f"{self.kind}·{other.kind}")

    def commutator(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix((self @ other).entries - (other @ self).entries, kind=f"[{self.kind},{other.kind}]")

    def apply(self, state: FockVector) -> np.ndarray:
        if state.dim != self.dim:
            raise DimensionError(f"상태/연산자 차원 불일치: state={state.dim} op={self.dim}")
        return self.entries @ state.amps


class CouplingConfig(BaseModel):
    """결합 설정: g, σ 와 파생량 Γ = g/σ"""

    model_config = ConfigDict(frozen=True)

    g: float = Field(..., allow_inf_nan=False, description="결합 세기 g (ℏ=1)")
    sigma: float = Field(1.0, gt=0, allow_inf_nan=False, description="포인터 폭 σ")

    @property
    def gamma(self) -> float:
        return self.g / self.sigma

    @classmethod
    def from_gamma(cls, gamma: float, sigma: float = 1.0) -> "CouplingConfig":
        return cls(g=gamma * sigma, sigma=sigma)


def tail_mass(state: FockVector) -> float:
    """절단 품질 진단: Σ_{n ≥ dim-4} |c_n|²"""
    start = max(0, state.dim - TAIL_WIDTH)
    return float(np.sum(np.abs(state.amps[start:]) ** 2))


def check_tail(state: FockVector, *, name: str) -> float:
    tail = tail_mass(state)
    if tail > TAIL_WARN:
        logger.warning("⚠️ 절단 꼬리 질량 경고 | name=%s dim=%d tail_mass=%.3e", name, state.dim, tail)
    return tail


# ============================================================================
# 특수 함수
# ============================================================================
def laguerre_general(n: int, eta: float, x: float) -> float:
    """L_n^{(η)}(x): 상향 3항 점화식 (x ≥ 0 에서 안정)"""
    if n < 0:
        raise InvalidParameterError(f"Laguerre 차수는 0 이상이어야 함: n={n}")
    if n == 0:
        return 1.0
    prev, cur = 1.0, 1.0 + eta - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + eta - x) * cur - (k + eta) * prev) / (k + 1)
    return float(cur)


def laguerre_series(n: int, eta: float, x: float) -> float:
    """교대 급수 정의식 그대로의 L_n^{(η)}(x) (점화식 검증용 기준 경로)"""
    if n < 0:
        raise InvalidParameterError(f"Laguerre 차수는 0 이상이어야 함: n={n}")
    return float(
        sum(binom(n + eta, n - k) * (-1) ** k * x**k / math.factorial(k) for k in range(n + 1))
    )


def hermite_complex(n: int, z: complex) -> complex:
    """물리학자 Hermite 다항식 H_n(z), 복소 인자, 3항 점화식"""
    if n < 0:
        raise InvalidParameterError(f"Hermite 차수는 0 이상이어야 함: n={n}")
    z = complex(z)
    if n == 0:
        return 1.0 + 0j
    prev, cur = 1.0 + 0j, 2 * z
    for k in range(1, n):
        prev, cur = cur, 2 * z * cur - 2 * k * prev
    return cur


def _perturbation(alpha: complex) -> float:
    eps = displacement_perturbation_var.get()
    return 1.0 + eps if (eps and alpha != 0) else 1.0


def displacement_element(m: int, n: int, alpha: complex) -> complex:
    """
    ⟨m|D(α)|n⟩.
    - m ≥ n: √(n!/m!) α^{m-n} e^{-|α|²/2} L_n^{(m-n)}(|α|²)
    - m ≤ n: √(m!/n!) (-α*)^{n-m} e^{-|α|²/2} L_m^{(n-m)}(|α|²)
    - 계승비는 log-gamma 차로 계산 (m, n ≤ 512 에서 overflow 없음)
    """
    if m < 0 or n < 0:
        raise InvalidParameterError(f"Fock 인덱스는 0 이상이어야 함: m={m} n={n}")
    alpha = complex(alpha)
    if alpha == 0:
        return 1.0 + 0j if m == n else 0j

    x = abs(alpha) ** 2
    lo, hi = min(m, n), max(m, n)
    k = hi - lo
    lag = laguerre_general(lo, k, x)
    if lag == 0.0:
        return 0j
    log_mag = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) + k * math.log(abs(alpha)) - x / 2 + math.log(abs(lag))
    mag = math.copysign(math.exp(log_mag), lag)
    unit = alpha / abs(alpha) if m >= n else -alpha.conjugate() / abs(alpha)
    return complex(mag * unit**k * _perturbation(alpha))


def _scaled_laguerre_table(dim: int, alpha: complex) -> np.ndarray:
    """
    table[n, k] = |⟨n+k|D(|α|)|n⟩| 부호 포함 = √(n!/(n+k)!) |α|^k e^{-|α|²/2} L_n^{(k)}(|α|²).
    원소가 항상 |·| ≤ 1 이므로 dim 에 무관하게 overflow 없음.
    """
    x = abs(alpha) ** 2
    k = np.arange(dim, dtype=float)
    table = np.zeros((dim, dim))
    with np.errstate(under="ignore"):
        cur = np.exp(k * math.log(abs(alpha)) - x / 2 - 0.5 * gammaln(k + 1))
    table[0] = cur
    if dim == 1:
        return table
    prev, cur = cur, (1 + k - x) * cur / np.sqrt(k + 1)
    table[1] = cur
    for n in range(1, dim - 1):
        nxt = (
            (2 * n + 1 + k - x) * cur * np.sqrt((n + 1) / (n + k + 1))
            - np.sqrt(n * (n + 1) * (n + k) / (n + k + 1)) * prev
        ) / (n + 1)
        table[n + 1] = nxt
        prev, cur = cur, nxt
    return table


@lru_cache(maxsize=32)
def _displacement_matrix_cached(dim: int, alpha: complex, factor: float) -> np.ndarray:
    if alpha == 0:
        out = np.eye(dim, dtype=complex)
        out.setflags(write=False)
        return out
    table = _scaled_laguerre_table(dim, alpha)
    rows, cols = np.indices((dim, dim))
    lo = np.minimum(rows, cols)
    off = np.abs(rows - cols)
    unit = alpha / abs(alpha)
    phase = np.where(rows >= cols, unit**off, (-np.conj(unit)) ** off)
    out = table[lo, off] * phase * factor
    out.setflags(write=False)
    return out


def displacement_matrix(dim: int, alpha: complex) -> np.ndarray:
    """⟨m|D(α)|n⟩ 전체 (m, n < dim), 읽기 전용 배열"""
    if dim < 1:
        raise DimensionError(f"dim 은 1 이상이어야 함: dim={dim}")
    alpha = complex(alpha)
    return _displacement_matrix_cached(dim, alpha, _perturbation(alpha))


# ============================================================================
# 연산자 조립
# ============================================================================
class OperatorKind(str, Enum):
    ANNIHILATE = "annihilate"
    CREATE = "create"
    NUMBER = "number"
    POSITION = "position"
    MOMENTUM = "momentum"
    DISPLACEMENT = "displacement"


_LADDER_KINDS = {OperatorKind.ANNIHILATE, OperatorKind.CREATE, OperatorKind.POSITION, OperatorKind.MOMENTUM}


def build_operator(
    kind: Union[OperatorKind, str],
    dim: int,
    sigma: float = 1.0,
    alpha: complex = 0j,
) -> OperatorMatrix:
    """
    X̂ = σ(â†+â), P̂ = (i/2σ)(â†−â) 규약의 행렬 형태.
    - 사다리 계열(kind ∈ annihilate/create/position/momentum)은 dim ≥ 2 필요
    - displacement 는 alpha 인자를 사용
    """
    kind = OperatorKind(kind)
    if kind in _LADDER_KINDS and dim < 2:
        raise DimensionError(f"{kind.value} 연산자는 dim ≥ 2 필요: dim={dim}")
    if dim < 1:
        raise DimensionError(f"dim 은 1 이상이어야 함: dim={dim}")
    if sigma <= 0:
        raise InvalidParameterError(f"σ 는 양수여야 함: sigma={sigma}")

    if kind is OperatorKind.NUMBER:
        return OperatorMatrix(np.diag(np.arange(dim, dtype=complex)), kind=kind.value)
    if kind is OperatorKind.DISPLACEMENT:
        return OperatorMatrix(displacement_matrix(dim, alpha), kind=kind.value)

    lower = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    raise_ = lower.T.copy()
    if kind is OperatorKind.ANNIHILATE:
        entries = lower
    elif kind is OperatorKind.CREATE:
        entries = raise_
    elif kind is OperatorKind.POSITION:
        entries = sigma * (raise_ + lower)
    else:
        entries = (1j / (2 * sigma)) * (raise_ - lower)
    return OperatorMatrix(entries, kind=kind.value)


def expectation(state: FockVector, op: OperatorMatrix) -> complex:
    """⟨φ|M|φ⟩"""
    return complex(np.vdot(state.amps, op.apply(state)))


def variance(state: FockVector, kind: Union[OperatorKind, str], sigma: float = 1.0) -> float:
    """
    Var(M) = ‖Mψ‖² − ⟨M⟩² (Hermitian M).
    한 단계 패딩한 공간에서 계산하여 절단 경계의 ⟨M²⟩ 손실을 피한다.
    """
    op = build_operator(kind, state.dim + 1, sigma)
    psi = state.padded(state.dim + 1)
    image = op.entries @ psi
    mean = np.vdot(psi, image).real
    return float(np.vdot(image, image).real - mean**2)
