"""
Pointer Shift Utils

환경 설정, 실행 컨텍스트, 병렬 실행, 절단 수렴 확인, 스캔 이벤트 로깅
"""

from .settings import configure_logging, get_thread_limit
from .context_manager import set_context, reset_context, get_context_snapshot
from .executor import ordered_map
from .convergence import check_truncation_convergence
from .event_logger import ScanEventLogger

__all__ = [
    "configure_logging",
    "get_thread_limit",
    "set_context",
    "reset_context",
    "get_context_snapshot",
    "ordered_map",
    "check_truncation_convergence",
    "ScanEventLogger",
]
