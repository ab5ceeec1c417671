from __future__ import annotations

import contextvars
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .settings import get_thread_limit

T = TypeVar("T")
R = TypeVar("R")
logger = logging.getLogger(__name__)


def ordered_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    *,
    name: str,
    max_workers: Optional[int] = None,
) -> List[R]:
    """
    순서 보존 병렬 map.
    - 결과는 실행 순서와 무관하게 입력 순서대로 반환
    - 각 작업은 호출 시점 컨텍스트(contextvars) 사본에서 실행
    - 워커 수는 POINTER_SHIFT_THREADS 상한을 넘지 않음
    """
    work = list(items)
    limit = get_thread_limit()
    workers = min(limit, max_workers or limit, max(len(work), 1))
    logger.debug("🧵 병렬 실행 시작 | name=%s items=%d workers=%d", name, len(work), workers)

    if workers <= 1:
        return [fn(item) for item in work]

    def _submit(pool: ThreadPoolExecutor, item: T):
        ctx = contextvars.copy_context()
        return pool.submit(ctx.run, fn, item)

    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix=name) as pool:
        futures = [_submit(pool, item) for item in work]
        return [f.result() for f in futures]
