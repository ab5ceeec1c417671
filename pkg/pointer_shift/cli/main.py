"""
pointer-shift 명령행 진입점

서브커맨드: shift-scan, qfunc, verify, limits
종료 코드: 0 정상 / 1 불변식 실패 / 2 설정 오류 / 3 strict 모드 수치 실패
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import uuid
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from ..core.measured_system import conditional_expectation, weak_value
from ..core.phase_space import closed_form_source, q_grid
from ..core.transition import (
    coherent_momentum_shift,
    coherent_position_shift,
    evolve_postselect_oracle,
    momentum_shift_strong_limit,
    momentum_shift_weak_limit,
    position_shift_strong_limit,
    position_shift_weak_limit,
    shift_scan,
)
from ..errors import ConfigError, PointerShiftError
from ..utils.context_manager import reset_context, set_context
from ..utils.event_logger import ScanEventLogger
from ..utils.settings import configure_logging
from . import verify as suite
from .config import ScenarioConfig, load_config
from .writers import gnuplot_hint, write_phase_grid, write_shift_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


# ============================================================================
# 인자 파서
# ============================================================================
def _common_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="TOML 또는 JSON 시나리오 설정 파일")
    parent.add_argument("--preset", help="그림 재현 프리셋 (fig1a, fig1b, fig2, fig3a..fig3f)")
    parent.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="설정 덮어쓰기 (예: pointer.alpha=[1,0.5]), 여러 번 지정 가능")
    parent.add_argument("--dim", type=int, help="포인터 절단 차원")
    parent.add_argument("--verbose", "-v", action="store_true", help="INFO 로그 출력")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = _common_parser()
    parser = argparse.ArgumentParser(prog="pointer-shift", description="포스트선택 폰 노이만 측정 포인터 이동 시뮬레이션")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("shift-scan", parents=[parent], help="(Γ, θ) 격자 위치/운동량 이동 CSV")
    scan.add_argument("--output", "-o", required=True, help="CSV 출력 경로")
    scan.add_argument("--gammas", type=float, nargs="+", help="Γ 목록")
    scan.add_argument("--thetas", type=float, nargs="+", help="θ 목록")
    scan.add_argument("--with-ratio", action="store_true", help="delta_x_over_g 열 추가")
    scan.add_argument("--check-convergence", action="store_true", help="격자점마다 dim·2 재계산 수렴 확인")
    scan.add_argument("--strict", action="store_true", help="격자점 실패 시 종료 코드 3")
    scan.add_argument("--gnuplot-hint", action="store_true", help="플롯 레시피 출력")

    qfunc = sub.add_parser("qfunc", parents=[parent], help="사후 선택 포인터 Q 함수 격자")
    qfunc.add_argument("--output", "-o", required=True, help="출력 경로 (<output>.csv, <output>.json)")
    qfunc.add_argument("--gamma", type=float, help="Γ")
    qfunc.add_argument("--theta", type=float, help="사후 선택 각 θ")
    qfunc.add_argument("--grid-count", type=int, help="축별 격자점 수")
    qfunc.add_argument("--closed-form", action="store_true", help="닫힌식으로 평가 (기본: 오라클 상태)")
    qfunc.add_argument("--strict", action="store_true", help="수치 실패를 종료 코드 3 으로 보고")
    qfunc.add_argument("--gnuplot-hint", action="store_true", help="플롯 레시피 출력")

    check = sub.add_parser("verify", parents=[parent], help="불변식 검증 스위트")
    check.add_argument("--trials", type=int, default=200, help="오라클 동등성 무작위 시나리오 수")
    check.add_argument("--seed", type=int, default=2024, help="난수 시드")
    check.add_argument("--perturb", type=float, default=0.0, help="변위 원소 결함 주입 계수 ε")
    check.add_argument("--scenario", choices=["qubit-sigma-x"], help="비교 메모를 출력할 시나리오")
    check.add_argument("--theta", type=float, help="--scenario 의 θ")

    limits = sub.add_parser("limits", parents=[parent], help="약/강 극한 닫힌식 값 출력")
    limits.add_argument("--gamma", type=float, help="Γ")
    limits.add_argument("--theta", type=float, help="사후 선택 각 θ")
    return parser


def _flag_overrides(args: argparse.Namespace) -> List[str]:
    """전용 플래그 → --set 형식 (파일 값보다 우선)"""
    mapping: Dict[str, Optional[object]] = {
        "dim": getattr(args, "dim", None),
        "sweep.gammas": getattr(args, "gammas", None),
        "sweep.thetas": getattr(args, "thetas", None),
        "selection.theta": getattr(args, "theta", None),
        "coupling.gamma": getattr(args, "gamma", None),
        "qgrid.count": getattr(args, "grid_count", None),
    }
    items = [f"{key}={value}" for key, value in mapping.items() if value is not None]
    if getattr(args, "gamma", None) is not None:
        items.append("coupling.g=null")
    if getattr(args, "closed_form", False):
        items.append("qgrid.closed_form=true")
    return items


# ============================================================================
# 서브커맨드
# ============================================================================
def cmd_shift_scan(config: ScenarioConfig, args: argparse.Namespace) -> int:
    """
    (Γ, θ) 스캔 → CSV.
    - 격자점 실패는 NaN 행 + 경고, --strict 이면 종료 코드 3
    """
    events = ScanEventLogger()
    reports = shift_scan(
        config.scenario_factory(),
        config.scan_gammas(),
        config.scan_thetas(),
        events=events,
        check_convergence=args.check_convergence,
    )
    path = write_shift_csv(reports, Path(args.output), with_ratio=args.with_ratio)
    if args.gnuplot_hint:
        print(gnuplot_hint("shift-scan", path))
    summary = events.summary()
    if summary["failed"]:
        print(f"warning: {summary['failed']} grid point(s) failed; NaN rows written", file=sys.stderr)
        if args.strict:
            return EXIT_NUMERIC
    return EXIT_OK


def cmd_qfunc(config: ScenarioConfig, args: argparse.Namespace) -> int:
    """
    Q 함수 격자 → <output>.csv + <output>.json.
    - 닫힌식 모드는 qubit-sigma-x + coherent 포인터에서만 가능
    """
    gamma = config.default_gamma()
    theta = config.selection.theta
    closed = config.qgrid.closed_form
    if closed and not (config.is_qubit and config.pointer.family == "coherent"):
        raise ConfigError("--closed-form 는 qubit-sigma-x 선택 + coherent 포인터에서만 지원")

    scenario = config.scenario(gamma, theta)
    spec = config.grid_spec(gamma)
    beta = complex(config.pointer.alpha)
    metadata = {
        "gamma": gamma,
        "theta": theta if config.is_qubit else None,
        "beta": [beta.real, beta.imag],
        "g": scenario.coupling.g,
        "sigma": scenario.coupling.sigma,
        "mode": "closed-form" if closed else "oracle",
    }
    try:
        source = closed_form_source(theta, beta, scenario.coupling) if closed else evolve_postselect_oracle(scenario).state
        grid = q_grid(source, spec, metadata=metadata)
    except PointerShiftError as exc:
        logger.error("❌ Q 격자 계산 실패 | error=%s", exc, exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    output = Path(args.output)
    stem = output.with_suffix("") if output.suffix.lower() in (".csv", ".json") else output
    csv_path, _ = write_phase_grid(grid, stem)
    if args.gnuplot_hint:
        print(gnuplot_hint("qfunc", csv_path))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """불변식 스위트 실행 → PASS/FAIL 표, 전부 통과해야 0"""
    if args.scenario == "qubit-sigma-x":
        print(suite.qubit_note(math.pi / 4 if args.theta is None else args.theta))
    if args.perturb:
        set_context(displacement_perturbation=args.perturb)
    results = suite.run_suite(trials=args.trials, seed=args.seed)
    print(suite.format_table(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_limits(config: ScenarioConfig, args: argparse.Namespace) -> int:
    """약값/조건부 기댓값과 극한 닫힌식 이동량 출력"""
    gamma = config.default_gamma()
    scenario = config.scenario(gamma, config.selection.theta)
    aw = weak_value(scenario.observable, scenario.selection)
    lines = [
        f"gamma={gamma:.17g}",
        f"g={scenario.coupling.g:.17g}",
        f"overlap_abs={abs(scenario.selection.overlap):.17g}",
        f"weak_value={aw.real:.17g}{aw.imag:+.17g}j",
        f"conditional_value={conditional_expectation(scenario.observable, scenario.selection):.17g}",
        f"delta_x_weak={position_shift_weak_limit(scenario):.17g}",
        f"delta_x_strong={position_shift_strong_limit(scenario.observable, scenario.selection, scenario.coupling):.17g}",
        f"delta_p_weak={momentum_shift_weak_limit(scenario):.17g}",
        f"delta_p_strong={momentum_shift_strong_limit():.17g}",
    ]
    if config.is_qubit and config.pointer.family == "coherent":
        theta, beta = config.selection.theta, complex(config.pointer.alpha)
        lines.append(f"delta_x_coherent={coherent_position_shift(theta, beta, scenario.coupling):.17g}")
        lines.append(f"delta_p_coherent={coherent_momentum_shift(theta, beta, scenario.coupling):.17g}")
    print("\n".join(lines))
    return EXIT_OK


# ============================================================================
# 진입점
# ============================================================================
def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("INFO" if args.verbose else None)

    handlers: Dict[str, Callable[[ScenarioConfig, argparse.Namespace], int]] = {
        "shift-scan": cmd_shift_scan,
        "qfunc": cmd_qfunc,
        "limits": cmd_limits,
    }
    try:
        if args.command == "verify":
            set_context(run_id=uuid.uuid4().hex[:8])
            return cmd_verify(args)
        config = load_config(path=args.config, preset=args.preset, overrides=[*args.overrides, *_flag_overrides(args)])
        set_context(scenario_name=config.name, run_id=uuid.uuid4().hex[:8])
        return handlers[args.command](config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PointerShiftError as exc:
        logger.error("❌ 실행 실패 | command=%s error=%s", args.command, exc, exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        reset_context()


if __name__ == "__main__":
    sys.exit(main())
