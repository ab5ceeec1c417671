from __future__ import annotations

import cmath
import math
from typing import Callable, Optional

import pytest

from pointer_shift.core.fock import CouplingConfig
from pointer_shift.core.measured_system import qubit_sigma_x
from pointer_shift.core.pointer_states import PointerSpec, realize
from pointer_shift.core.transition import MeasurementScenario
from pointer_shift.utils.context_manager import reset_context

FIG_PHI = math.pi / 6


@pytest.fixture(autouse=True)
def _clean_context():
    reset_context()
    yield
    reset_context()


@pytest.fixture
def qubit_coherent() -> Callable[..., MeasurementScenario]:
    """σ_x 시나리오 + 코히런트 포인터 |β⟩, β = r e^{iπ/6}"""

    def build(
        theta: float,
        gamma: float,
        r: float = 3.0,
        sigma: float = 1.0,
        dim: Optional[int] = None,
    ) -> MeasurementScenario:
        observable, selection = qubit_sigma_x(theta)
        spec = PointerSpec(family="coherent", alpha=cmath.rect(r, FIG_PHI))
        size = dim or spec.suggested_dim(gamma / 2, -gamma / 2)
        return MeasurementScenario(
            observable=observable,
            selection=selection,
            pointer=realize(spec, size),
            coupling=CouplingConfig.from_gamma(gamma, sigma),
        )

    return build
