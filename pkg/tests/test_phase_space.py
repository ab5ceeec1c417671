import cmath
import math

import numpy as np
import pytest

from pointer_shift.core.fock import CouplingConfig
from pointer_shift.core.measured_system import qubit_sigma_x
from pointer_shift.core.phase_space import (
    CONTOUR_LEVEL,
    GridSpec,
    closed_form_source,
    default_fig3_grid,
    q_final_closed_form,
    q_final_terms,
    q_function,
    q_function_many,
    q_grid,
    wavefunction_x,
)
from pointer_shift.core.pointer_states import make_coherent, make_fock, make_spac, make_squeezed_coherent
from pointer_shift.core.transition import MeasurementScenario, evolve_postselect_oracle
from pointer_shift.errors import InvalidParameterError

FIG_BETA = cmath.rect(1.0, math.pi / 6)
FIG_THETA = 0.01


# ============================================================================
# 임의 상태 Q 함수
# ============================================================================
def test_vacuum_q_peak():
    assert q_function(make_coherent(0j, 16), 0) == pytest.approx(1 / math.pi, abs=1e-12)


def test_coherent_q_is_gaussian():
    beta = 0.7 - 0.2j
    state = make_coherent(beta)
    for alpha in (0j, 1 + 1j, -0.5 + 0.3j):
        assert q_function(state, alpha) == pytest.approx(math.exp(-abs(alpha - beta) ** 2) / math.pi, abs=1e-12)


def test_q_bounds():
    state = make_squeezed_coherent(0.4 + 0.2j, 0.8, 1.0)
    values = q_function_many(state, [complex(x, y) for x in np.linspace(-3, 3, 13) for y in np.linspace(-3, 3, 13)])
    assert np.all(values >= 0)
    assert np.all(values <= 1 / math.pi + 1e-12)


def test_fock_state_q_vanishes_at_origin():
    assert q_function(make_fock(2), 0) == pytest.approx(0.0, abs=1e-15)


def test_q_quadrature_is_normalized():
    spec = GridSpec(re_min=-7, re_max=7, re_count=141, im_min=-7, im_max=7, im_count=141)
    grid = q_grid(make_coherent(0.5 + 0.5j), spec)
    assert grid.values.shape == (141, 141)
    assert grid.quadrature() == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize(
    "state",
    [make_squeezed_coherent(0.3, 1.0, 0.7), make_squeezed_coherent(-0.5j, 0.4, 0.0), make_spac(0.8 + 0.3j), make_spac(0j)],
    ids=["squeezed-r1", "squeezed-r04", "spac", "spac-vacuum"],
)
def test_nonclassical_q_quadrature(state):
    spec = GridSpec(re_min=-7, re_max=7, re_count=141, im_min=-7, im_max=7, im_count=141)
    assert q_grid(state, spec).quadrature() == pytest.approx(1.0, abs=1e-3)


def test_empty_grid_rejected():
    spec = GridSpec(re_min=0, re_max=1, re_count=0, im_min=0, im_max=1, im_count=5)
    with pytest.raises(InvalidParameterError):
        q_grid(make_coherent(0j, 16), spec)


def test_grid_rows_are_imaginary_axis():
    beta = 1.0 + 2.0j
    spec = GridSpec(re_min=0, re_max=2, re_count=3, im_min=0, im_max=4, im_count=5)
    grid = q_grid(make_coherent(beta), spec)
    assert grid.values.shape == (5, 3)
    re, im, peak = grid.peak()
    assert (re, im) == (1.0, 2.0)
    assert peak == pytest.approx(1 / math.pi)
    assert grid.metadata["contour_level"] == pytest.approx(CONTOUR_LEVEL)


# ============================================================================
# 사후 선택 포인터 닫힌식
# ============================================================================
def test_closed_form_without_coupling_is_initial_gaussian():
    cfg = CouplingConfig.from_gamma(0.0)
    for alpha in (FIG_BETA, 0j, 1.5 - 0.5j):
        expected = math.exp(-abs(alpha - FIG_BETA) ** 2) / math.pi
        assert q_final_closed_form(0.3, FIG_BETA, cfg, alpha) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.0, 2.0, 3.0, 5.0])
def test_closed_form_matches_oracle_grid(qubit_coherent, gamma):
    scenario = qubit_coherent(FIG_THETA, gamma, r=1.0)
    spec = default_fig3_grid(FIG_BETA, gamma, count=41)
    oracle = q_grid(evolve_postselect_oracle(scenario).state, spec)
    closed = q_grid(closed_form_source(FIG_THETA, FIG_BETA, scenario.coupling), spec)
    assert np.max(np.abs(oracle.values - closed.values)) < 1e-9


def test_fig3a_peak_sits_at_beta():
    cfg = CouplingConfig.from_gamma(0.0)
    grid = q_grid(closed_form_source(FIG_THETA, FIG_BETA, cfg), default_fig3_grid(FIG_BETA, 0.0))
    re, im, _ = grid.peak()
    d_re, d_im = grid.spacing()
    assert abs(re - FIG_BETA.real) <= d_re
    assert abs(im - FIG_BETA.imag) <= d_im
    assert grid.count_components() == 1


def test_fig3f_contour_splits_in_two():
    cfg = CouplingConfig.from_gamma(5.0)
    grid = q_grid(closed_form_source(FIG_THETA, FIG_BETA, cfg), default_fig3_grid(FIG_BETA, 5.0))
    assert grid.count_components() == 2


def test_interference_term_present_at_intermediate_coupling():
    cfg = CouplingConfig.from_gamma(1.0)
    spec = default_fig3_grid(FIG_BETA, 1.0, count=41)
    re_axis, im_axis = spec.axes()
    alphas = (re_axis[None, :] + 1j * im_axis[:, None]).ravel()
    lobe_plus, lobe_minus, fringe = q_final_terms(FIG_THETA, FIG_BETA, cfg, alphas)
    assert np.max(np.abs(fringe)) > 1e-2
    total = closed_form_source(FIG_THETA, FIG_BETA, cfg)(alphas)
    assert np.allclose(total, lobe_plus + lobe_minus + fringe, atol=0)
    assert np.all(total >= -1e-15)


def test_interference_pulls_q_below_sum_of_lobes():
    cfg = CouplingConfig.from_gamma(1.0)
    observable, selection = qubit_sigma_x(FIG_THETA)
    scenario = MeasurementScenario(
        observable=observable,
        selection=selection,
        pointer=make_coherent(FIG_BETA, 64),
        coupling=cfg,
    )
    spec = default_fig3_grid(FIG_BETA, 1.0, count=41)
    re_axis, im_axis = spec.axes()
    alphas = (re_axis[None, :] + 1j * im_axis[:, None]).ravel()
    lobe_plus, lobe_minus, _ = q_final_terms(FIG_THETA, FIG_BETA, cfg, alphas)
    lobes = (lobe_plus + lobe_minus).reshape(spec.im_count, spec.re_count)
    oracle = q_grid(evolve_postselect_oracle(scenario).state, spec)
    assert np.any(oracle.values < lobes - 1e-3)
    assert oracle.values[20, 20] < lobes[20, 20]


def test_default_fig3_grid_bounds():
    spec = default_fig3_grid(FIG_BETA, 2.0)
    assert spec.re_min == pytest.approx(FIG_BETA.real - 5)
    assert spec.re_max == pytest.approx(FIG_BETA.real + 5)
    assert spec.im_min == pytest.approx(FIG_BETA.imag - 4)
    assert spec.re_count == spec.im_count == 201


# ============================================================================
# 위치 표현
# ============================================================================
@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
def test_wavefunction_normalized_with_mean_position(sigma):
    alpha = 1.0 + 0.5j
    xs = np.linspace(-12 * sigma, 12 * sigma, 2401)
    density = np.abs(wavefunction_x(make_coherent(alpha), xs, sigma)) ** 2
    dx = xs[1] - xs[0]
    assert np.sum(density) * dx == pytest.approx(1.0, abs=1e-8)
    assert np.sum(xs * density) * dx == pytest.approx(2 * sigma * alpha.real, abs=1e-8)


def test_wavefunction_rejects_bad_sigma():
    with pytest.raises(InvalidParameterError):
        wavefunction_x(make_coherent(0j, 16), [0.0], sigma=0.0)
