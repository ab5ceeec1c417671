"""
불변식 검증 스위트 (verify 서브커맨드)

각 검사는 (이름, 통과 여부, 상세) 를 돌려주고, 예외는 실패로 기록한다.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from ..core.fock import (
    CouplingConfig,
    displacement_element,
    displacement_matrix,
    laguerre_general,
    laguerre_series,
)
from ..core.measured_system import Observable, SelectionPair, conditional_expectation, qubit_sigma_x, weak_value
from ..core.phase_space import closed_form_source, default_fig3_grid, q_function_many, q_grid
from ..core.pointer_states import PointerSpec, make_coherent, make_spac, make_squeezed_coherent, moments_a, realize
from ..core.transition import (
    MeasurementScenario,
    evolve_postselect_oracle,
    momentum_shift_general,
    momentum_shift_weak_limit,
    oracle_shifts,
    position_shift_general,
    shift_report,
    spac_weak_position_shift,
    squeezed_weak_position_shift,
)
from ..errors import PointerShiftError

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-8
ORACLE_DIM = 256
FIG_BETA = cmath.rect(1.0, math.pi / 6)
THETA_GRID = [0.05 * k for k in range(1, 31)]
WEAK_DRAWS = 20
WEAK_GAMMA = 1e-3
NONCOHERENT_WEAK_GAMMA = 1e-5


class CheckFailed(Exception):
    """불변식 위반"""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailed(message)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


# ============================================================================
# 무작위 시나리오
# ============================================================================
def _random_amplitudes(rng: np.random.Generator, size: int) -> np.ndarray:
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    return amps / np.linalg.norm(amps)


def random_pointer(rng: np.random.Generator, dim: int = ORACLE_DIM) -> PointerSpec:
    family = str(rng.choice(["coherent", "squeezed_coherent", "spac", "fock"]))
    alpha = complex(cmath.rect(rng.uniform(0, 2), rng.uniform(0, 2 * math.pi)))
    if family == "fock":
        return PointerSpec(family="fock", n=int(rng.integers(0, 4)), dim=dim)
    if family == "squeezed_coherent":
        return PointerSpec(
            family=family, alpha=alpha * 0.5, r=float(rng.uniform(0, 1)),
            phi_xi=float(rng.uniform(0, 2 * math.pi)), dim=dim,
        )
    return PointerSpec(family=family, alpha=alpha, dim=dim)


def random_scenario(rng: np.random.Generator, dim: int = ORACLE_DIM) -> MeasurementScenario:
    """d ∈ {2, 3}, |overlap| > 0.05, Γ ≤ 4, 포인터 4계열 중 하나"""
    size = int(rng.integers(2, 4))
    observable = Observable(rng.uniform(-1, 1, size=size))
    while True:
        selection = SelectionPair(pre=_random_amplitudes(rng, size), post=_random_amplitudes(rng, size))
        if abs(selection.overlap) > 0.05:
            break
    pointer = realize(random_pointer(rng, dim))
    coupling = CouplingConfig.from_gamma(float(rng.uniform(0, 4)), float(rng.uniform(0.5, 2)))
    return MeasurementScenario(observable=observable, selection=selection, pointer=pointer, coupling=coupling)


def complex_weak_value_system() -> tuple[Observable, SelectionPair]:
    """Im⟨A⟩_w ≠ 0 인 3준위 관측량 + 선택 쌍"""
    observable = Observable([1.0, 0.0, -0.5])
    selection = SelectionPair.from_unnormalized([0.6, 0.5j, 0.4], [0.7, 0.3 - 0.4j, 0.5j])
    return observable, selection


def _qubit_coherent(theta: float, gamma: float, beta: complex, dim: Optional[int] = None) -> MeasurementScenario:
    observable, selection = qubit_sigma_x(theta)
    spec = PointerSpec(family="coherent", alpha=beta)
    size = dim or spec.suggested_dim(gamma / 2, -gamma / 2)
    return MeasurementScenario(
        observable=observable, selection=selection, pointer=realize(spec, size),
        coupling=CouplingConfig.from_gamma(gamma),
    )


# ============================================================================
# 검사 항목
# ============================================================================
def check_value_formulas() -> str:
    worst = 0.0
    for theta in THETA_GRID:
        observable, selection = qubit_sigma_x(theta)
        worst = max(
            worst,
            abs(weak_value(observable, selection) + 1 / math.tan(theta)),
            abs(conditional_expectation(observable, selection) + math.sin(2 * theta)),
        )
    _require(worst < 1e-12, f"max error {worst:.3e}")
    return f"max error {worst:.3e}"


def check_special_functions() -> str:
    worst = 0.0
    for n in range(16):
        for eta in (0, 1, 3):
            for x in (0.3, 1.0, 2.0):
                ref = laguerre_series(n, eta, x)
                worst = max(worst, abs(laguerre_general(n, eta, x) - ref) / max(1.0, abs(ref)))
    _require(worst < 1e-10, f"laguerre rel error {worst:.3e}")
    matrix = displacement_matrix(96, 0.7 - 0.4j)
    column = float(np.max(np.abs(np.sum(np.abs(matrix[:, :32]) ** 2, axis=0) - 1)))
    _require(column < 1e-10, f"unitarity column error {column:.3e}")
    branch = max(
        abs(displacement_element(m, n, 1.1 + 0.3j) - displacement_element(n, m, -1.1 - 0.3j).conjugate())
        for m in range(12)
        for n in range(12)
    )
    _require(branch < 1e-12, f"branch error {branch:.3e}")
    return f"laguerre {worst:.1e}, unitarity {column:.1e}"


def check_moments() -> str:
    alpha = 1.2 - 0.7j
    first, second = moments_a(make_coherent(alpha))
    _require(abs(first - alpha) < 1e-10 and abs(second - alpha**2) < 1e-10, "coherent moments")
    r, phi = 0.8, 1.1
    first, second = moments_a(make_squeezed_coherent(alpha, r, phi))
    expected = alpha**2 - cmath.exp(1j * phi) * math.sinh(r) * math.cosh(r)
    _require(abs(first - alpha) < 1e-9 and abs(second - expected) < 1e-9, "squeezed moments")
    first, second = moments_a(make_spac(alpha))
    norm = 1 + abs(alpha) ** 2
    _require(abs(first - alpha * (2 + abs(alpha) ** 2) / norm) < 1e-10, "spac ⟨a⟩")
    _require(abs(second - first**2 + alpha**2 / norm**2) < 1e-10, "spac variance")
    return "coherent/squeezed/spac ok"


def check_oracle_equivalence(trials: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        scenario = random_scenario(rng)
        report = shift_report(scenario)
        dx, dp = oracle_shifts(scenario)
        worst = max(worst, abs(report.delta_x - dx), abs(report.delta_p - dp))
    _require(worst < ORACLE_TOL, f"max |general − oracle| = {worst:.3e} (trials={trials})")
    return f"max |general − oracle| = {worst:.3e} (trials={trials})"


def check_strong_limit() -> str:
    beta = cmath.rect(3.0, math.pi / 6)
    worst = 0.0
    for theta in THETA_GRID:
        scenario = _qubit_coherent(theta, 8.0, beta)
        worst = max(worst, abs(position_shift_general(scenario) / 8.0 + math.sin(2 * theta)))
    _require(worst < 1e-10, f"max |δx/g + sin 2θ| = {worst:.3e}")
    return f"max |δx/g + sin 2θ| = {worst:.3e}"


def check_weak_limit() -> str:
    beta = cmath.rect(3.0, math.pi / 6)
    worst, order = 0.0, math.inf
    for theta in (0.3, 0.6, 0.9, 1.2):
        target = -1 / math.tan(theta)
        errors = []
        for gamma in (1e-2, 1e-3):
            scenario = _qubit_coherent(theta, gamma, beta)
            errors.append(abs(position_shift_general(scenario) / gamma - target))
        worst = max(worst, errors[1] / abs(target))
        order = min(order, math.log10(errors[0] / errors[1]))
    _require(worst < 1e-3, f"relative error {worst:.3e}")
    _require(order >= 1.9, f"convergence order {order:.2f}")
    return f"relative error {worst:.3e}, order {order:.2f}"


def _relative_gap(value: float, expected: float, g: float) -> float:
    return abs(value - expected) / max(abs(expected), g)


def check_family_weak_shifts(draws: int = WEAK_DRAWS, seed: int = 7) -> str:
    """
    포인터 계열별 약한 극한 닫힌식 대조.
    코히런트는 Γ=1e-3, 압착/SPAC 은 O(Γ) 상대 보정이 남으므로 Γ=1e-5 에서 비교한다.
    """
    rng = np.random.default_rng(seed)
    observable, selection = complex_weak_value_system()
    aw = weak_value(observable, selection)
    weak = CouplingConfig.from_gamma(NONCOHERENT_WEAK_GAMMA)
    worst = {"coherent": 0.0, "squeezed": 0.0, "spac": 0.0}
    for _ in range(draws):
        theta = float(rng.uniform(0.3, 1.3))
        beta = cmath.rect(rng.uniform(0, 2), rng.uniform(0, 2 * math.pi))
        scenario = _qubit_coherent(theta, WEAK_GAMMA, beta)
        gap = _relative_gap(position_shift_general(scenario), -WEAK_GAMMA / math.tan(theta), WEAK_GAMMA)
        worst["coherent"] = max(worst["coherent"], gap)

        alpha = cmath.rect(rng.uniform(0, 1), rng.uniform(0, 2 * math.pi))
        r, phi = float(rng.uniform(0, 1)), float(rng.uniform(0, 2 * math.pi))
        pointer = make_squeezed_coherent(alpha, r, phi)
        scenario = MeasurementScenario(observable=observable, selection=selection, pointer=pointer, coupling=weak)
        gap = _relative_gap(position_shift_general(scenario), squeezed_weak_position_shift(aw, r, phi, weak.g), weak.g)
        worst["squeezed"] = max(worst["squeezed"], gap)

        alpha = cmath.rect(rng.uniform(0, 2), rng.uniform(0, 2 * math.pi))
        scenario = MeasurementScenario(observable=observable, selection=selection, pointer=make_spac(alpha), coupling=weak)
        gap = _relative_gap(position_shift_general(scenario), spac_weak_position_shift(aw, alpha, weak.g), weak.g)
        worst["spac"] = max(worst["spac"], gap)

    scenario = MeasurementScenario(
        observable=observable, selection=selection,
        pointer=make_squeezed_coherent(0.3, 0.5, math.pi / 2), coupling=CouplingConfig.from_gamma(WEAK_GAMMA),
    )
    momentum = _relative_gap(momentum_shift_general(scenario), momentum_shift_weak_limit(scenario), WEAK_GAMMA)
    detail = " ".join(f"{name}={value:.1e}" for name, value in worst.items()) + f" momentum={momentum:.1e}"
    _require(max(*worst.values(), momentum) < 1e-3, detail)
    return detail


def check_quarter_pinning() -> str:
    worst = 0.0
    for gamma in (0.1, 1.0, 5.0):
        scenario = _qubit_coherent(math.pi / 4, gamma, cmath.rect(3.0, math.pi / 6))
        worst = max(worst, abs(position_shift_general(scenario) + gamma))
    _require(worst < 1e-10, f"max |δx + g| = {worst:.3e}")
    return f"max |δx + g| = {worst:.3e}"


def check_q_function() -> str:
    worst = 0.0
    for gamma in (0.0, 0.5, 1.0, 2.0, 3.0, 5.0):
        scenario = _qubit_coherent(0.01, gamma, FIG_BETA)
        spec = default_fig3_grid(FIG_BETA, gamma, count=41)
        oracle = q_grid(evolve_postselect_oracle(scenario).state, spec)
        closed = q_grid(closed_form_source(0.01, FIG_BETA, scenario.coupling), spec)
        worst = max(worst, float(np.max(np.abs(oracle.values - closed.values))))
        if gamma == 0.0:
            re, im, _ = closed.peak()
            d_re, d_im = closed.spacing()
            _require(abs(re - FIG_BETA.real) <= d_re and abs(im - FIG_BETA.imag) <= d_im, "fig3a peak")
        if gamma == 5.0:
            full = q_grid(closed_form_source(0.01, FIG_BETA, scenario.coupling), default_fig3_grid(FIG_BETA, gamma))
            count = full.count_components()
            _require(count == 2, f"fig3f components={count}")
    _require(worst < 1e-9, f"max |ΔQ| = {worst:.3e}")
    vacuum = q_function_many(make_coherent(0j, 16), np.array([0j]))[0]
    _require(abs(vacuum - 1 / math.pi) < 1e-12, "vacuum peak")
    return f"max |ΔQ| = {worst:.3e}"


def run_suite(*, trials: int = 200, seed: int = 2024) -> List[CheckResult]:
    checks: List[tuple[str, Callable[[], str]]] = [
        ("value-formulas", check_value_formulas),
        ("special-functions", check_special_functions),
        ("pointer-moments", check_moments),
        ("oracle-equivalence", lambda: check_oracle_equivalence(trials, seed)),
        ("strong-limit", check_strong_limit),
        ("weak-limit", check_weak_limit),
        ("family-weak-shifts", check_family_weak_shifts),
        ("quarter-angle-pinning", check_quarter_pinning),
        ("q-function", check_q_function),
    ]
    results = []
    for name, check in checks:
        try:
            detail = check()
            results.append(CheckResult(name, True, detail))
            logger.info("✅ 검사 통과 | name=%s %s", name, detail)
        except (CheckFailed, PointerShiftError) as exc:
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
            logger.warning("❌ 검사 실패 | name=%s detail=%s", name, exc)
    return results


def qubit_note(theta: float) -> str:
    """σ_x 시나리오에서 약값/조건부 기댓값 비교 메모"""
    observable, selection = qubit_sigma_x(theta)
    weak = weak_value(observable, selection)
    conditional = conditional_expectation(observable, selection)
    line = f"theta={theta:.6g} weak_value={weak.real:.10g}{weak.imag:+.3g}j conditional={conditional:.10g}"
    if abs(weak - conditional) < 1e-3:
        line += f"  (agreement: weak ≈ conditional ≈ {conditional:.6g})"
    return line


def format_table(results: List[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check'.ljust(width)}  status  detail"]
    for r in results:
        lines.append(f"{r.name.ljust(width)}  {'PASS' if r.passed else 'FAIL':6}  {r.detail}")
    return "\n".join(lines)
