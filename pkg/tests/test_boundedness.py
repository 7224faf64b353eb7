"""Transmission zeros, the unit-circle boundedness test, and aggregation."""

import numpy as np
import pytest

from oogrisk import (
    ClosedLoopSystem,
    ValidationError,
    aggregate_boundedness,
    assemble_closed_loop,
    classify_boundedness,
    transmission_zeros,
)


def test_fir_zero_on_circle():
    # G(z) = (z - 1)/z: single zero at z = 1, on the unit circle.
    zs = transmission_zeros((np.array([[0.0]]), np.array([[1.0]]),
                             np.array([[-1.0]]), np.array([[1.0]])))
    assert len(zs) == 1
    assert zs[0].z == pytest.approx(1.0, abs=1e-9)
    assert zs[0].on_unit_circle


def test_first_order_lag_has_no_zeros():
    # G(z) = 1/(z - 0.5): no finite transmission zeros.
    zs = transmission_zeros((np.array([[0.5]]), np.array([[1.0]]),
                             np.array([[1.0]]), np.array([[0.0]])))
    assert zs == []


def test_zero_off_circle():
    # G(z) = 1 - 1/(z - 0.5) = (z - 1.5)/(z - 0.5): zero at 1.5, off the circle.
    zs = transmission_zeros((np.array([[0.5]]), np.array([[1.0]]),
                             np.array([[-1.0]]), np.array([[1.0]])))
    assert len(zs) == 1
    assert zs[0].z == pytest.approx(1.5, abs=1e-9)
    assert not zs[0].on_unit_circle


def test_complex_circle_zeros(circle_zero_systems):
    for k, sys in enumerate(circle_zero_systems, start=1):
        theta = k * np.pi / 10.0
        zs = transmission_zeros((sys.A_cl, sys.B_cl, sys.C_r, sys.D_r))
        circle = [zr.z for zr in zs if zr.on_unit_circle]
        assert circle
        pair = (np.exp(1j * theta), np.exp(-1j * theta))
        for z in circle:
            assert min(abs(z - w) for w in pair) < 1e-6
        assert any(abs(z - pair[0]) < 1e-6 for z in circle)


def test_tall_system_zeros():
    # Two outputs over one input; both channels share the zero at z = 1.
    A = np.array([[0.0]])
    B = np.array([[1.0]])
    C = np.array([[-1.0], [-2.0]])
    D = np.array([[1.0], [2.0]])
    zs = transmission_zeros((A, B, C, D))
    assert len(zs) == 1
    assert zs[0].z == pytest.approx(1.0, abs=1e-7)


def test_tall_system_without_common_zeros():
    # Channels with distinct zeros (1 and 2): the stacked system has none.
    A = np.array([[0.0]])
    B = np.array([[1.0]])
    C = np.array([[-1.0], [-2.0]])
    D = np.array([[1.0], [1.0]])
    assert transmission_zeros((A, B, C, D)) == []


def test_wide_system_rejected():
    with pytest.raises(ValidationError, match="wide"):
        transmission_zeros((np.array([[0.0]]), np.array([[1.0, 0.0]]),
                            np.array([[1.0]]), np.array([[0.0, 1.0]])))


def test_rank_deficient_input_rejected():
    with pytest.raises(ValidationError, match="full column rank"):
        transmission_zeros((np.array([[0.0]]), np.zeros((1, 1)),
                            np.array([[1.0]]), np.zeros((1, 1))))


def test_zeros_invariant_under_similarity():
    rng = np.random.default_rng(3)
    A = np.array([[0.0, 1.0], [-0.25, 1.0]])
    B = np.array([[0.0], [1.0]])
    C = np.array([[1.0, -2.0]])
    D = np.array([[1.0]])
    base = sorted((zr.z for zr in transmission_zeros((A, B, C, D))),
                  key=lambda z: (z.real, z.imag))
    T = rng.standard_normal((2, 2)) + 2 * np.eye(2)
    Ti = np.linalg.inv(T)
    moved = sorted(
        (zr.z for zr in transmission_zeros((T @ A @ Ti, T @ B, C @ Ti, D))),
        key=lambda z: (z.real, z.imag))
    assert len(base) == len(moved)
    for a, b in zip(base, moved):
        assert a == pytest.approx(b, abs=1e-6)


def test_classify_unbounded_witness(unbounded_sys):
    res = classify_boundedness(unbounded_sys)
    assert res.verdict == "unbounded"
    assert not res.is_bounded
    assert res.witness is not None
    assert res.witness.z == pytest.approx(1.0, abs=1e-7)


def test_classify_bounded_no_circle_zeros(scalar_gamma4):
    res = classify_boundedness(scalar_gamma4)
    assert res.verdict == "bounded_condition_1"
    assert res.is_bounded


def test_classify_shared_zero_is_bounded():
    # Performance equals residual: the z = 1 zero direction is shared.
    sys = ClosedLoopSystem(
        np.array([[0.0]]), np.array([[1.0]]),
        np.array([[-1.0]]), np.array([[1.0]]),
        np.array([[-1.0]]), np.array([[1.0]]),
    )
    res = classify_boundedness(sys)
    assert res.verdict == "bounded_condition_2"
    assert res.is_bounded
    assert any(zr.shared_with_performance for zr in res.zeros)


def test_classify_wide_residual_unbounded():
    # One residual row against two attack inputs with a live performance
    # channel: stealthy directions exist at every frequency.
    sys = ClosedLoopSystem(
        np.array([[0.5]]), np.ones((1, 2)),
        np.array([[1.0]]), np.zeros((1, 2)),
        np.array([[0.0]]), np.array([[1.0, 0.0]]),
    )
    res = classify_boundedness(sys)
    assert res.verdict == "unbounded"
    assert res.witness is not None


def test_classify_empty_residual_zero_performance():
    sys = ClosedLoopSystem(
        np.array([[0.5]]), np.array([[1.0]]),
        np.zeros((1, 1)), np.zeros((1, 1)),
        np.zeros((0, 1)), np.zeros((0, 1)),
    )
    res = classify_boundedness(sys)
    assert res.verdict == "bounded_condition_2"


def test_benchmark_is_bounded(sec6):
    model, _ = sec6
    sys = assemble_closed_loop(model.plant, model.controller, model.detector,
                               model.attack)
    res = classify_boundedness(sys)
    assert res.verdict == "bounded_condition_1"
    assert not res.degraded
    assert all(not zr.on_unit_circle for zr in res.zeros)


def test_aggregate_quantile_rule():
    # 212 of 235 bounded clears the beta = 0.1 quantile (need 212).
    assert aggregate_boundedness([True] * 212 + [False] * 23, 0.1)
    assert not aggregate_boundedness([True] * 211 + [False] * 24, 0.1)
    assert not aggregate_boundedness([True, False, False, False], 0.5)
    assert aggregate_boundedness([True] * 10, 0.01)


def test_aggregate_validation():
    with pytest.raises(ValidationError):
        aggregate_boundedness([], 0.1)
    with pytest.raises(ValidationError):
        aggregate_boundedness([True], 0.0)


def test_aggregate_monotone_in_beta():
    statuses = [True] * 7 + [False] * 3
    verdicts = [aggregate_boundedness(statuses, b)
                for b in (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)]
    # Once true at some beta, true at every larger beta.
    for a, b in zip(verdicts, verdicts[1:]):
        assert (not a) or b
