from __future__ import annotations
from contextvars import ContextVar
from typing import Optional, Any, Dict
import logging

logger = logging.getLogger(__name__)

# ---- 실행 컨텍스트: 3개만 관리 ----
scenario_name_var: ContextVar[Optional[str]] = ContextVar("scenario_name", default=None)
run_id_var: ContextVar[Optional[str]] = ContextVar("run_id", default=None)
# verify --perturb 용 결함 주입 계수 (변위 행렬 원소에 (1+ε) 곱)
displacement_perturbation_var: ContextVar[float] = ContextVar("displacement_perturbation", default=0.0)

def set_context(
    *,
    scenario_name: Optional[str] = None,
    run_id: Optional[str] = None,
    displacement_perturbation: Optional[float] = None,
) -> None:
    if scenario_name is not None:
        scenario_name_var.set(scenario_name)
        logger.info("🔧 컨텍스트 설정: scenario_name=%s", scenario_name)
    if run_id is not None:
        run_id_var.set(run_id)
        logger.info("📋 컨텍스트 설정: run_id=%s", run_id)
    if displacement_perturbation is not None:
        displacement_perturbation_var.set(float(displacement_perturbation))
        if displacement_perturbation:
            logger.warning("⚠️ 결함 주입 활성화: displacement_perturbation=%g", displacement_perturbation)

def reset_context() -> None:
    scenario_name_var.set(None)
    run_id_var.set(None)
    displacement_perturbation_var.set(0.0)
    logger.info("🔄 컨텍스트 리셋 완료")

def get_context_snapshot() -> Dict[str, Any]:
    return dict(
        scenario_name=scenario_name_var.get(),
        run_id=run_id_var.get(),
        displacement_perturbation=displacement_perturbation_var.get(),
    )
