"""
Pointer Shift Core

절단 Fock 공간, 포인터 상태, 측정 시스템, 전이 엔진, 위상 공간
"""

from .fock import (
    CouplingConfig,
    FockVector,
    OperatorKind,
    OperatorMatrix,
    build_operator,
    default_dim,
    displacement_element,
    displacement_matrix,
    expectation,
    laguerre_general,
    tail_mass,
    variance,
)
from .pointer_states import PointerSpec, make_coherent, make_fock, make_spac, make_squeezed_coherent, moments_a, realize
from .measured_system import (
    Observable,
    SelectionPair,
    conditional_expectation,
    expectation_value,
    qubit_sigma_x,
    weak_value,
)
from .transition import (
    FinalPointerState,
    MeasurementScenario,
    ShiftReport,
    coherent_final_state,
    coherent_momentum_shift,
    coherent_position_shift,
    evolve_postselect_oracle,
    momentum_shift_general,
    momentum_shift_strong_limit,
    momentum_shift_weak_limit,
    oracle_shifts,
    position_shift_general,
    position_shift_strong_limit,
    position_shift_weak_limit,
    postselection_probability,
    shift_report,
    shift_scan,
    spac_weak_position_shift,
    squeezed_weak_position_shift,
)
from .phase_space import GridSpec, PhaseGrid, q_final_closed_form, q_function, q_grid, wavefunction_x

__all__ = [
    # fock-core
    "CouplingConfig",
    "FockVector",
    "OperatorKind",
    "OperatorMatrix",
    "build_operator",
    "default_dim",
    "displacement_element",
    "displacement_matrix",
    "expectation",
    "laguerre_general",
    "tail_mass",
    "variance",
    # pointer-states
    "PointerSpec",
    "make_coherent",
    "make_fock",
    "make_spac",
    "make_squeezed_coherent",
    "moments_a",
    "realize",
    # measured-system
    "Observable",
    "SelectionPair",
    "conditional_expectation",
    "expectation_value",
    "qubit_sigma_x",
    "weak_value",
    # transition-engine
    "FinalPointerState",
    "MeasurementScenario",
    "ShiftReport",
    "coherent_final_state",
    "coherent_momentum_shift",
    "coherent_position_shift",
    "evolve_postselect_oracle",
    "momentum_shift_general",
    "momentum_shift_strong_limit",
    "momentum_shift_weak_limit",
    "oracle_shifts",
    "position_shift_general",
    "position_shift_strong_limit",
    "position_shift_weak_limit",
    "postselection_probability",
    "shift_report",
    "shift_scan",
    "spac_weak_position_shift",
    "squeezed_weak_position_shift",
    # phase-space
    "GridSpec",
    "PhaseGrid",
    "q_final_closed_form",
    "q_function",
    "q_grid",
    "wavefunction_x",
]
