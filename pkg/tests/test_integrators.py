from __future__ import annotations

import cmath

import pytest

from core.exceptions import StepSizeCollapseError
from geometry.integrators import RKF45


def _rotation(s, y):
    return 1j * y


def test_tableau_rows_sum_to_their_nodes():
    for row, node in zip(RKF45.BT, RKF45.eval_stages[1:]):
        assert sum(row) == pytest.approx(node, abs=1e-15)


def test_weights_are_consistent():
    solver = RKF45()
    assert sum(RKF45.B4) == pytest.approx(1.0, abs=1e-15)
    assert sum(solver.b5) == pytest.approx(1.0, abs=1e-15)
    assert sum(RKF45.TR) == pytest.approx(0.0, abs=1e-15)


def test_single_step_is_fifth_order():
    solver = RKF45()
    errors = [abs(solver.attempt(_rotation, 0.0, 1 + 0j, h)[0] - cmath.exp(1j * h)) for h in (0.2, 0.1)]
    # local error O(h⁶) shrinks by 2⁶ = 64 when h halves
    assert errors[0] / errors[1] > 40


@pytest.mark.parametrize("per_unit_step", [False, True])
def test_long_rotation_stays_accurate(per_unit_step):
    solver = RKF45(rtol=1e-10, atol=1e-13, per_unit_step=per_unit_step)
    result = solver.solve(_rotation, 0.0, 20.0, 1 + 0j)
    assert abs(result.y - cmath.exp(20j)) < 1e-7
    assert result.steps > 0


def test_per_unit_step_bounds_the_accumulated_error():
    solver = RKF45(rtol=1e-10, atol=1e-13, per_unit_step=True)
    result = solver.solve(_rotation, 0.0, 50.0, 1 + 0j)
    assert abs(result.y - cmath.exp(50j)) < 1e-9


def test_hook_replaces_state():
    solver = RKF45()
    seen = []

    def hook(s, y):
        seen.append(s)
        return None

    result = solver.solve(_rotation, 0.0, 1.0, 1 + 0j, on_step=hook)
    assert len(seen) == result.steps
    assert seen[-1] == pytest.approx(1.0)


def test_blow_up_collapses_the_step():
    solver = RKF45(max_steps=2_000)
    with pytest.raises(StepSizeCollapseError):
        # y′ = y² from y(0) = 1 blows up at s = 1
        solver.solve(lambda s, y: y * y, 0.0, 2.0, 1 + 0j)
