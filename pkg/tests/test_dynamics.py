import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nrflow import (
    ArgumentError,
    UnsupportedOperationError,
    eval_drift,
    eval_memoryless,
    eval_output,
    integrator_plant,
    lti_plant,
    pendulum_plant,
    position_plant,
)
from nrflow.dynamics import generic_ode_plant, named_memoryless, plant_from_params

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_position_drift_example():
    p = position_plant(-1.0, 2.0)
    assert np.array_equal(eval_drift(p, [0, 0], [0]), [-2.0, 0.0])


def test_pendulum_drift_at_upper_equilibrium():
    assert np.array_equal(eval_drift(pendulum_plant(1.0, 0.2), [0, 0], [0]), [0.0, 0.0])


def test_integrator_drift_is_input():
    assert np.array_equal(eval_drift(integrator_plant(2), [3, 4], [1, -1]), [1.0, -1.0])


def test_output_examples():
    assert eval_output(position_plant(-1.0), [1.5, 0.2])[0] == 1.5
    lti = lti_plant([[-1, 0], [0, -2]], [[1], [0]], [[1, 0]])
    assert eval_output(lti, [2, 3])[0] == 2.0
    assert eval_output(pendulum_plant(), [math.pi / 6, 0])[0] == pytest.approx(math.pi / 6, abs=0)


def test_memoryless_examples():
    ident = named_memoryless("identity")
    y, J = eval_memoryless(ident, 0.7)
    assert (y[0], J[0, 0]) == (0.7, 1.0)
    cubic = named_memoryless("cubic")
    y, J = eval_memoryless(cubic, 1.0)
    assert (y[0], J[0, 0]) == (2.0, 4.0)
    y, J = eval_memoryless(cubic, 0.0)
    assert (y[0], J[0, 0]) == (0.0, 1.0)


def test_dimension_mismatch_is_argument_error():
    with pytest.raises(ArgumentError):
        eval_drift(position_plant(-1.0), [0, 0, 0], [0])
    with pytest.raises(ArgumentError):
        eval_drift(integrator_plant(2), [0, 0], [1])
    with pytest.raises(ArgumentError):
        eval_output(pendulum_plant(), [0.0])


def test_memoryless_operations_are_unsupported():
    cubic = named_memoryless("cubic")
    with pytest.raises(UnsupportedOperationError):
        eval_drift(cubic, [], [1.0])
    with pytest.raises(UnsupportedOperationError):
        eval_output(cubic, [])
    with pytest.raises(UnsupportedOperationError):
        eval_memoryless(position_plant(-1.0), [0.0])


def test_constructor_invariants():
    with pytest.raises(ArgumentError):
        position_plant(0.0)
    with pytest.raises(ArgumentError):
        pendulum_plant(a=-1.0)
    with pytest.raises(ArgumentError):
        lti_plant([[1, 2, 3]], [[1]], [[1]])
    with pytest.raises(ArgumentError):
        named_memoryless("quartic")


def test_plants_are_immutable():
    p = lti_plant([[-1.0]], [[1.0]], [[1.0]])
    with pytest.raises(ValueError):
        p.params["A"][0, 0] = 5.0
    with pytest.raises(AttributeError):
        p.kind = "position"


def test_plant_from_params():
    p = plant_from_params("position", {"a": -1, "r_slope": 2})
    assert p.params == {"a": -1.0, "r_slope": 2.0}
    assert plant_from_params("memoryless", {"map": "cubic"}).is_memoryless
    with pytest.raises(ArgumentError):
        plant_from_params("position", {"r_slope": 2})
    with pytest.raises(ArgumentError):
        plant_from_params("pendulum", {"a": 1, "c": 3})


def test_generic_plant_uses_callbacks():
    p = generic_ode_plant(lambda x, u: -x + u, lambda x: 2 * x, 1, 1)
    assert eval_drift(p, [1.0], [3.0])[0] == 2.0
    assert eval_output(p, [1.5])[0] == 3.0


def test_builtin_drifts_match_hand_formulas(rng):
    # independent re-derivation of each right-hand side at random points
    a, r, b = -0.7, 1.3, 0.25
    pos, pend, integ = position_plant(a, r), pendulum_plant(0.9, b), integrator_plant(3)
    A = rng.normal(size=(3, 3))
    B = rng.normal(size=(3, 2))
    C = rng.normal(size=(2, 3))
    lti = lti_plant(A, B, C)
    for _ in range(20):
        x2, u1 = rng.normal(size=2) * 3, rng.normal(size=1) * 3
        assert eval_drift(pos, x2, u1).tolist() == [x2[1] - r, a * x2[1] + u1[0]]
        assert eval_drift(pend, x2, u1).tolist() == [
            x2[1], 0.9 * math.sin(x2[0]) - b * x2[1] + u1[0]
        ]
        x3, u3 = rng.normal(size=3), rng.normal(size=3)
        assert np.array_equal(eval_drift(integ, x3, u3), u3)
        u2 = rng.normal(size=2)
        expect = [sum(A[i, j] * x3[j] for j in range(3)) + sum(B[i, j] * u2[j] for j in range(2))
                  for i in range(3)]
        np.testing.assert_allclose(eval_drift(lti, x3, u2), expect, rtol=1e-14, atol=1e-14)


@given(st.lists(finite, min_size=2, max_size=2), st.lists(finite, min_size=2, max_size=2), finite)
def test_integrator_drift_is_linear_in_input(x, u, alpha):
    p = integrator_plant(2)
    lhs = eval_drift(p, x, alpha * np.asarray(u))
    np.testing.assert_allclose(lhs, alpha * eval_drift(p, x, u), rtol=1e-15, atol=0)


@settings(max_examples=50)
@given(st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3), finite, finite)
def test_position_ramp_equilibrium(a, r, x1):
    p = position_plant(a, r)
    np.testing.assert_allclose(eval_drift(p, [x1, r], [-a * r]), [0.0, 0.0], atol=1e-9)
