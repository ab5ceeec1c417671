import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from pointer_shift.core.pointer_states import (
    PointerSpec,
    coerce_complex,
    make_coherent,
    make_fock,
    make_spac,
    make_squeezed_coherent,
    moments_a,
    realize,
    squeeze_padding,
)
from pointer_shift.errors import InvalidParameterError, NormalizationError, TruncationError


# ============================================================================
# 생성자
# ============================================================================
def test_coherent_amplitude_ratio():
    state = make_coherent(2.0, 64)
    assert state.amps[2] / state.amps[0] == pytest.approx(2 * math.sqrt(2), rel=1e-12)


def test_coherent_moments():
    first, second = moments_a(make_coherent(1 + 1j, 64))
    assert abs(first - (1 + 1j)) < 1e-12
    assert abs(second - 2j) < 1e-12


def test_squeezed_without_squeezing_is_coherent():
    alpha = 0.8 - 0.3j
    squeezed = make_squeezed_coherent(alpha, 0.0, 1.3, 64)
    assert np.max(np.abs(squeezed.amps - make_coherent(alpha, 64).amps)) < 1e-12


def test_squeezed_vacuum_has_only_even_levels():
    state = make_squeezed_coherent(0, 1.0, 0.0)
    assert np.max(np.abs(state.amps[1::2])) == 0
    assert state.amps[0].real > 0


def test_squeezed_vacuum_moments():
    r, phi = 0.5, math.pi / 2
    first, second = moments_a(make_squeezed_coherent(0, r, phi))
    assert abs(first) < 1e-12
    assert abs(second - (-1j * math.sinh(2 * r) / 2)) < 1e-10


def test_spac_of_vacuum_is_single_photon():
    state = make_spac(0, 16)
    expected = np.zeros(16, dtype=complex)
    expected[1] = 1.0
    assert np.allclose(state.amps, expected, atol=0)


def test_spac_moments():
    alpha = 0.9 + 0.4j
    norm = 1 + abs(alpha) ** 2
    first, second = moments_a(make_spac(alpha))
    assert abs(first - alpha * (2 + abs(alpha) ** 2) / norm) < 1e-10
    assert abs(second - alpha**2 * (3 + abs(alpha) ** 2) / norm) < 1e-10


@settings(max_examples=25, deadline=None)
@given(
    mag=st.floats(0.0, 2.0),
    arg=st.floats(0, 2 * math.pi),
    r=st.floats(0.0, 2.0),
    phi=st.floats(0, 2 * math.pi),
)
def test_squeezed_coherent_moments(mag, arg, r, phi):
    alpha = cmath.rect(mag, arg)
    first, second = moments_a(make_squeezed_coherent(alpha, r, phi))
    expected = alpha**2 - cmath.exp(1j * phi) * math.sinh(r) * math.cosh(r)
    assert abs(first - alpha) < 1e-8
    assert abs(second - expected) < 1e-8 * max(1.0, abs(expected))


def test_fock_state_moments_vanish():
    first, second = moments_a(make_fock(3))
    assert first == 0 and second == 0


# ============================================================================
# 절단 / 파라미터 오류
# ============================================================================
def test_coherent_truncation_error():
    with pytest.raises(TruncationError):
        make_coherent(5.0, 16)


def test_excessive_squeezing_rejected():
    with pytest.raises(InvalidParameterError):
        make_squeezed_coherent(0, 21.0, 0.0, 64)
    with pytest.raises(ValidationError):
        PointerSpec(family="squeezed_coherent", r=25.0)


@pytest.mark.parametrize("r", [10.0, 19.5, 20.0])
def test_extreme_squeezing_default_dim_is_truncation_error(r):
    with pytest.raises(TruncationError):
        make_squeezed_coherent(0, r, 0.0)
    with pytest.raises(TruncationError):
        PointerSpec(family="squeezed_coherent", r=r).suggested_dim()


def test_extreme_squeezing_with_explicit_dim_reports_tail():
    with pytest.raises(TruncationError):
        make_squeezed_coherent(0, 19.5, 0.0, 64)


def test_squeeze_padding_values():
    assert squeeze_padding(0.0) == 0
    assert squeeze_padding(1.0) == math.ceil(28.0 / -math.log(math.tanh(1.0)))


def test_pointer_spec_rejects_unknown_keys():
    with pytest.raises(ValidationError):
        PointerSpec.model_validate({"family": "coherent", "alfa": 3.0})


def test_moments_reject_unnormalized_array():
    with pytest.raises(NormalizationError):
        moments_a(np.array([1.0, 1.0, 0.0]))


def test_moments_accept_plain_array():
    first, _ = moments_a(np.array([0.6, 0.8, 0.0]))
    assert first == pytest.approx(0.48)


# ============================================================================
# PointerSpec
# ============================================================================
@pytest.mark.parametrize(
    "raw, expected",
    [
        (1.5, 1.5 + 0j),
        ("1+2j", 1 + 2j),
        ("1 - 2j", 1 - 2j),
        ([0.5, -0.25], 0.5 - 0.25j),
        ({"re": 1.0, "im": 3.0}, 1 + 3j),
        ({"abs": 2.0, "arg": math.pi / 2}, 2j),
    ],
)
def test_coerce_complex_forms(raw, expected):
    assert abs(coerce_complex(raw) - expected) < 1e-15


def test_coerce_complex_rejects_garbage():
    with pytest.raises(ValueError):
        coerce_complex({"x", "y", "z"})


def test_pointer_spec_realize_dispatch():
    spec = PointerSpec.model_validate({"family": "spac", "alpha": [0.5, 0.0], "dim": 40})
    state = realize(spec)
    assert state.dim == 40
    assert state.amps[0] == 0
    assert realize(spec, 50).dim == 50


def test_suggested_dim_covers_branch_shifts():
    spec = PointerSpec(family="coherent", alpha=3.0)
    assert spec.suggested_dim(2.5, -2.5) == math.ceil(8 * (5.5**2 + 4))
    assert spec.suggested_dim() == 104
