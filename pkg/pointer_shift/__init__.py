"""
Pointer Shift

포스트선택 폰 노이만 측정: Fock 포인터, 약-강 측정 전이, Q 함수
"""

__version__ = "0.1.0"
__author__ = "Pointer Shift Team"

# 주요 클래스들을 패키지 레벨에서 import 가능하도록 설정
from .core import (
    CouplingConfig,
    FockVector,
    MeasurementScenario,
    Observable,
    PointerSpec,
    SelectionPair,
    ShiftReport,
    qubit_sigma_x,
    realize,
    shift_report,
    shift_scan,
)
from .errors import PointerShiftError
from .utils.context_manager import set_context, reset_context, get_context_snapshot

__all__ = [
    # Core types
    "CouplingConfig",
    "FockVector",
    "MeasurementScenario",
    "Observable",
    "PointerSpec",
    "SelectionPair",
    "ShiftReport",

    # Operations
    "qubit_sigma_x",
    "realize",
    "shift_report",
    "shift_scan",

    # Errors
    "PointerShiftError",

    # Context utils
    "set_context",
    "reset_context",
    "get_context_snapshot",
]
