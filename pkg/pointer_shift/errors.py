"""
Pointer Shift 예외 계층

라이브러리 코드는 예외를 던지기만 하고, 종료 코드 매핑은 CLI(main.py)에서만 수행한다.
"""

from __future__ import annotations


class PointerShiftError(Exception):
    """모든 시뮬레이션 예외의 루트"""


class DimensionError(PointerShiftError):
    """절단 차원이 너무 작거나 상태/연산자 차원이 서로 맞지 않음"""


class TruncationError(PointerShiftError):
    """절단 경계 바깥의 꼬리 질량(tail mass)이 허용치를 넘음"""


class NormalizationError(PointerShiftError):
    """정규화되지 않은 입력"""


class OrthogonalSelectionError(PointerShiftError):
    """사전/사후 선택 성분 곱이 모두 0 (조건부 기댓값 정의 불가)"""


class NearOrthogonalPostselectionError(PointerShiftError):
    """|⟨ψ_f|ψ_i⟩| 가 ε_overlap 이하 (약값 발산)"""


class VanishingPostselectionError(PointerShiftError):
    """사후 선택 확률(또는 닫힌식 분모)이 1e-12 미만"""


class ConvergenceError(PointerShiftError):
    """dim·2 재계산 결과가 허용치 이상 움직임"""


class InvalidParameterError(PointerShiftError, ValueError):
    """허용 범위를 벗어난 물리 파라미터 (예: r > 20, 빈 격자)"""


class ConfigError(PointerShiftError):
    """설정 파일/플래그를 해석할 수 없거나 서로 모순됨"""
