from __future__ import annotations

import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.fock import CouplingConfig
from ..core.measured_system import Observable, SelectionPair, qubit_sigma_x
from ..core.phase_space import GridSpec, default_fig3_grid
from ..core.pointer_states import ComplexLike, PointerSpec, realize
from ..core.transition import MeasurementScenario, ScenarioFactory
from ..errors import ConfigError, PointerShiftError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

COUPLING_TOL = 1e-12


# ============================================================================
# 스키마 정의
# ============================================================================
class ObservableSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eigenvalues: List[float] = Field(default_factory=lambda: [1.0, -1.0], min_length=2)
    labels: List[str] = Field(default_factory=list)


class SelectionSettings(BaseModel):
    """explicit: pre/post 진폭 직접 지정 / qubit-sigma-x: θ 하나로 σ_x 시나리오 생성"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["explicit", "qubit-sigma-x"] = "qubit-sigma-x"
    theta: float = Field(math.pi / 4, description="qubit-sigma-x 사후 선택 각")
    pre: List[ComplexLike] = Field(default_factory=list)
    post: List[ComplexLike] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_explicit(self) -> "SelectionSettings":
        if self.kind == "explicit" and (not self.pre or len(self.pre) != len(self.post)):
            raise ValueError("explicit 선택은 같은 길이의 pre/post 진폭이 필요함")
        return self


class CouplingSettings(BaseModel):
    """(g, σ) 또는 Γ (σ 기본 1). 둘 다 주어지면 |Γ − g/σ| ≤ 1e-12 이어야 함"""

    model_config = ConfigDict(extra="forbid")

    g: Optional[float] = None
    sigma: float = Field(1.0, gt=0)
    gamma: Optional[float] = None

    @model_validator(mode="after")
    def _check_consistency(self) -> "CouplingSettings":
        if self.g is not None and self.gamma is not None:
            if abs(self.gamma - self.g / self.sigma) > COUPLING_TOL:
                raise ValueError(f"결합 설정 모순: gamma={self.gamma} ≠ g/sigma={self.g / self.sigma}")
        return self

    @property
    def resolved_gamma(self) -> Optional[float]:
        if self.gamma is not None:
            return self.gamma
        if self.g is not None:
            return self.g / self.sigma
        return None

    def at(self, gamma: float) -> CouplingConfig:
        return CouplingConfig.from_gamma(gamma, self.sigma)


class SweepSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    gammas: List[float] = Field(default_factory=lambda: [0.1, 0.5, 1.0, 2.0, 5.0], min_length=1)
    thetas: Optional[List[float]] = Field(None, min_length=1, description="명시 θ 목록 (없으면 범위 사용)")
    theta_min: float = 0.02
    theta_max: float = 1.55
    theta_count: int = Field(154, ge=1)

    def theta_values(self) -> List[float]:
        if self.thetas is not None:
            return list(self.thetas)
        if self.theta_count == 1:
            return [self.theta_min]
        step = (self.theta_max - self.theta_min) / (self.theta_count - 1)
        return [self.theta_min + k * step for k in range(self.theta_count)]


class QGridSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    count: int = Field(201, ge=1)
    re_min: Optional[float] = None
    re_max: Optional[float] = None
    im_min: Optional[float] = None
    im_max: Optional[float] = None
    closed_form: bool = False


class ScenarioConfig(BaseModel):
    """시나리오 설정 전체 (TOML/JSON 에서 로드, --set 로 덮어쓰기)"""

    model_config = ConfigDict(extra="forbid")

    name: str = "custom"
    observable: ObservableSettings = Field(default_factory=ObservableSettings)
    selection: SelectionSettings = Field(default_factory=SelectionSettings)
    pointer: PointerSpec = Field(default_factory=PointerSpec)
    coupling: CouplingSettings = Field(default_factory=CouplingSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    qgrid: QGridSettings = Field(default_factory=QGridSettings)
    dim: Optional[int] = Field(None, ge=1, description="포인터 절단 차원 (pointer.dim 보다 우선)")

    @property
    def is_qubit(self) -> bool:
        return self.selection.kind == "qubit-sigma-x"

    # --------- 도메인 객체 조립 ---------
    def build_system(self, theta: Optional[float] = None) -> Tuple[Observable, SelectionPair]:
        if self.is_qubit:
            return qubit_sigma_x(self.selection.theta if theta is None else theta)
        observable = Observable(self.observable.eigenvalues, labels=tuple(self.observable.labels))
        selection = SelectionPair.from_unnormalized(self.selection.pre, self.selection.post)
        selection.check_against(observable)
        return observable, selection

    def scan_gammas(self) -> List[float]:
        return list(self.sweep.gammas)

    def scan_thetas(self) -> List[float]:
        return self.sweep.theta_values() if self.is_qubit else [math.nan]

    def default_gamma(self) -> float:
        gamma = self.coupling.resolved_gamma
        return gamma if gamma is not None else self.sweep.gammas[0]

    def pointer_dim(self, gamma: float) -> int:
        if self.dim is not None:
            return self.dim
        if self.pointer.dim is not None:
            return self.pointer.dim
        reach = abs(gamma) * max(abs(a) for a in self.observable_values()) / 2
        return self.pointer.suggested_dim(reach, -reach)

    def observable_values(self) -> List[float]:
        return [1.0, -1.0] if self.is_qubit else list(self.observable.eigenvalues)

    def scenario(self, gamma: float, theta: Optional[float] = None, dim: Optional[int] = None) -> MeasurementScenario:
        observable, selection = self.build_system(None if theta is None or math.isnan(theta) else theta)
        pointer = realize(self.pointer, dim if dim is not None else self.pointer_dim(gamma))
        return MeasurementScenario(observable=observable, selection=selection, pointer=pointer, coupling=self.coupling.at(gamma))

    def scenario_factory(self) -> ScenarioFactory:
        def build(gamma: float, theta: float, dim: Optional[int]) -> MeasurementScenario:
            return self.scenario(gamma, theta, dim)

        return build

    def grid_spec(self, gamma: float) -> GridSpec:
        base = default_fig3_grid(self.pointer.alpha, gamma, self.qgrid.count)
        updates = {
            key: getattr(self.qgrid, key)
            for key in ("re_min", "re_max", "im_min", "im_max")
            if getattr(self.qgrid, key) is not None
        }
        return base.model_copy(update=updates)


# ============================================================================
# 프리셋 (그림 재현 설정)
# ============================================================================
_FIG_BETA = {"abs": 1.0, "arg": math.pi / 6}


def _fig_shift(r: float, name: str) -> Dict[str, Any]:
    return {
        "name": name,
        "pointer": {"family": "coherent", "alpha": {"abs": r, "arg": math.pi / 6}},
        "sweep": {"gammas": [0.1, 0.5, 1.0, 2.0, 5.0]},
    }


def _fig_q(gamma: float, name: str) -> Dict[str, Any]:
    return {
        "name": name,
        "selection": {"kind": "qubit-sigma-x", "theta": 0.01},
        "pointer": {"family": "coherent", "alpha": _FIG_BETA},
        "coupling": {"gamma": gamma, "sigma": 1.0},
        "sweep": {"gammas": [gamma], "thetas": [0.01]},
    }


PRESETS: Dict[str, Dict[str, Any]] = {
    "fig1a": _fig_shift(3.0, "fig1a"),
    "fig1b": _fig_shift(0.0, "fig1b"),
    "fig2": _fig_shift(3.0, "fig2"),
    **{
        f"fig3{letter}": _fig_q(gamma, f"fig3{letter}")
        for letter, gamma in zip("abcdef", (0.0, 0.5, 1.0, 2.0, 3.0, 5.0))
    },
}


# ============================================================================
# 로드 / 덮어쓰기 / 저장
# ============================================================================
def _read_file(path: Path) -> Dict[str, Any]:
    try:
        if path.suffix.lower() == ".toml":
            with path.open("rb") as fh:
                return tomllib.load(fh)
        with path.open("r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"설정 파일 없음: {path}") from exc
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"설정 파일 해석 실패: {path}: {exc}") from exc


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_overrides(data: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """'a.b.c=value' 형식 덮어쓰기 (value 는 JSON 으로 해석, 실패 시 문자열)"""
    merged = json.loads(json.dumps(data))
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set 형식 오류 (key=value 필요): {item!r}")
        node = merged
        parts = key.strip().split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"--set 경로 충돌: {key!r}")
            node = child
        node[parts[-1]] = _parse_value(raw.strip())
    return merged


def load_config(
    *,
    path: Optional[str] = None,
    preset: Optional[str] = None,
    overrides: Iterable[str] = (),
) -> ScenarioConfig:
    """프리셋 → 파일 → 플래그 순으로 병합 (뒤가 우선)"""
    data: Dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"알 수 없는 프리셋: {preset!r} (가능: {', '.join(sorted(PRESETS))})")
        data = json.loads(json.dumps(PRESETS[preset]))
    if path is not None:
        data = _deep_merge(data, _read_file(Path(path)))
    data = apply_overrides(data, overrides)
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"설정 검증 실패:\n{exc}") from exc
    try:
        config.build_system()
    except PointerShiftError as exc:
        raise ConfigError(f"관측량/선택 설정 모순: {exc}") from exc
    logger.info("🔧 설정 로드 완료 | name=%s preset=%s path=%s", config.name, preset, path)
    return config


def _deep_merge(base: Dict[str, Any], extra: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def dump_config(config: ScenarioConfig) -> str:
    return config.model_dump_json(indent=2)
