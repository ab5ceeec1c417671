from __future__ import annotations

import logging
import math
from typing import Callable, Optional, Sequence, Tuple

from ..errors import ConvergenceError

logger = logging.getLogger(__name__)


# -----------------------------------------------------------------------------
# Truncation re-run utility (sync, single source of truth)
# -----------------------------------------------------------------------------
def _converge_sync(
    fn: Callable[[int], Sequence[float]],
    *,
    name: str,
    dim: int,
    tol: float = 1e-9,
    attempts: int = 1,
) -> Tuple[Sequence[float], float]:
    """
    절단 차원 수렴 확인 유틸리티.
    - dim 에서 한 번, 이후 매 시도마다 차원을 2배로 늘려 재계산
    - 직전 결과와의 최대 편차가 tol 미만이면 수렴으로 판정
    - 최종 실패 시 ConvergenceError 전파
    """
    current = list(fn(dim))
    drift = math.inf
    size = dim
    for attempt in range(1, attempts + 1):
        size *= 2
        refined = list(fn(size))
        drift = max(
            (abs(a - b) for a, b in zip(current, refined) if math.isfinite(a) and math.isfinite(b)),
            default=0.0,
        )
        if drift < tol:
            logger.debug("✅ 절단 수렴 | name=%s dim=%d drift=%.3e", name, size, drift)
            return refined, drift
        logger.warning(
            "⏳ 절단 미수렴: name=%s attempt=%d/%d dim=%d drift=%.3e tol=%.1e",
            name, attempt, attempts, size, drift, tol,
        )
        current = refined

    logger.error("❌ 절단 수렴 최종 실패: name=%s dim=%d drift=%.3e", name, size, drift)
    raise ConvergenceError(f"{name}: dim={size} 에서도 편차 {drift:.3e} >= {tol:.1e}")


def check_truncation_convergence(
    fn: Callable[[int], Sequence[float]],
    dim: int,
    *,
    name: str,
    tol: Optional[float] = None,
) -> Tuple[Sequence[float], float]:
    """dim·2 재계산 한 번으로 수렴 확인 (스캔 --check-convergence 용)."""
    return _converge_sync(fn, name=name, dim=dim, tol=1e-9 if tol is None else tol, attempts=1)
