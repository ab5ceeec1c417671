from __future__ import annotations

import logging
import math
import threading
from typing import Any, Dict, List, Optional

from .context_manager import scenario_name_var, run_id_var

logger = logging.getLogger(__name__)

_SUPPORTED = ("point_started", "point_completed", "point_failed")


class ScanEventLogger:
    """스캔 격자점 이벤트 → 로그 + 실패 집계 (단순/가독성 우선)"""

    def __init__(self) -> None:
        self.completed = 0
        self.failures: List[Dict[str, Any]] = []
        self._lock = threading.Lock()

    # --------- 공개 엔트리포인트 ---------
    def on_event(self, event_type: str, **data: Any) -> None:
        """
        이벤트 수신 → (event_type, data) 로깅 및 집계
        - 지원하지 않는 타입은 무시
        """
        if event_type not in _SUPPORTED:
            logger.debug("⚠️ 알 수 없는 이벤트 타입 | event_type=%s", event_type)
            return

        scenario = scenario_name_var.get()
        run_id = run_id_var.get()
        point = self._format_point(data)

        if event_type == "point_started":
            logger.debug("📨 격자점 시작 | scenario=%s run_id=%s %s", scenario, run_id, point)
            return

        if event_type == "point_completed":
            with self._lock:
                self.completed += 1
            logger.debug("✅ 격자점 완료 | scenario=%s %s", scenario, point)
            return

        error = str(data.get("error") or "unknown")
        with self._lock:
            self.failures.append({**data, "error": error})
        logger.warning(
            "⚠️ 격자점 실패 → NaN 행 기록 | scenario=%s run_id=%s %s error=%s detail=%s",
            scenario, run_id, point, error, data.get("detail"),
        )

    def summary(self) -> Dict[str, Any]:
        with self._lock:
            return {"completed": self.completed, "failed": len(self.failures)}

    # --------- 단순 유틸 ---------
    @staticmethod
    def _format_point(data: Dict[str, Any]) -> str:
        gamma: Optional[float] = data.get("gamma")
        theta: Optional[float] = data.get("theta")

        def fmt(v: Optional[float]) -> str:
            return "nan" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:.6g}"

        return f"gamma={fmt(gamma)} theta={fmt(theta)}"
