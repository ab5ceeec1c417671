from __future__ import annotations

import os
import logging
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# ============================================================================
# 설정 및 초기화
# ============================================================================
if os.getenv("ENV") != "production":
    load_dotenv()

THREADS_ENV = "POINTER_SHIFT_THREADS"
LOG_LEVEL_ENV = "POINTER_SHIFT_LOG_LEVEL"
DEFAULT_LOG_LEVEL = os.getenv(LOG_LEVEL_ENV, "WARNING")


def get_thread_limit() -> int:
    """
    병렬 워커 수 상한.
    - POINTER_SHIFT_THREADS 가 양의 정수면 그 값
    - 아니면 min(8, cpu_count)
    """
    default = min(8, os.cpu_count() or 1)
    raw = os.getenv(THREADS_ENV)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("⚠️ 잘못된 스레드 설정 무시 | %s=%r default=%d", THREADS_ENV, raw, default)
        return default
    if value < 1:
        logger.warning("⚠️ 스레드 수는 1 이상이어야 함 | %s=%r default=%d", THREADS_ENV, raw, default)
        return default
    return value


def configure_logging(level: Optional[str] = None) -> None:
    """CLI 진입 시 한 번만 호출: 루트 로거를 표준 에러로 설정."""
    name = (level or DEFAULT_LOG_LEVEL).upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s | %(message)s",
    )
