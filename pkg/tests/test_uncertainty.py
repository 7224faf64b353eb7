"""Uncertainty boxes, sampling, and the scenario sample count."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oogrisk import (
    OutOfDomainError,
    PlantModel,
    ScenarioConfig,
    UncertaintySpec,
    ValidationError,
    realize,
    required_sample_count,
    sample,
)


def test_required_sample_count_frozen():
    assert required_sample_count(0.05, 0.1) == 600
    assert required_sample_count(0.1, 0.1) == 150


def test_required_sample_count_validation():
    with pytest.raises(ValidationError):
        required_sample_count(0.0, 0.1)
    with pytest.raises(ValidationError):
        required_sample_count(0.05, 1.0)


def test_scenario_config_defaults_and_override():
    cfg = ScenarioConfig()
    assert cfg.sample_count == 600
    assert ScenarioConfig(n_override=235).sample_count == 235
    with pytest.raises(ValidationError):
        ScenarioConfig(beta=0.0)


def test_box_must_contain_zero():
    with pytest.raises(ValidationError):
        UncertaintySpec(box=((0.1, 0.5),))
    with pytest.raises(ValidationError):
        UncertaintySpec(box=((0.5, -0.5),))
    spec = UncertaintySpec(box=((-0.5, 0.5), (0.0, 0.0)))
    assert spec.dim == 2
    assert spec.contains([0.2, 0.0])
    assert not spec.contains([0.6, 0.0])


def test_degenerate_box():
    spec = UncertaintySpec.degenerate()
    draws = sample(spec, 5, 0)
    assert np.all(draws == 0.0)


def test_sampling_deterministic_and_in_box():
    spec = UncertaintySpec(box=((-0.5, 0.5), (-1.0, 2.0)))
    a = sample(spec, 100, 7)
    b = sample(spec, 100, 7)
    assert np.array_equal(a, b)
    assert a.shape == (100, 2)
    assert np.all(a[:, 0] >= -0.5) and np.all(a[:, 0] <= 0.5)
    assert np.all(a[:, 1] >= -1.0) and np.all(a[:, 1] <= 2.0)
    c = sample(spec, 100, 8)
    assert not np.array_equal(a, c)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 3.0))
def test_samples_always_inside_box(seed, half_width):
    spec = UncertaintySpec(box=((-half_width, half_width),))
    draws = sample(spec, 16, seed)
    assert all(spec.contains(d) for d in draws)


def _plant():
    return PlantModel(A=np.zeros((2, 2)), B=np.ones((2, 1)),
                      C=np.eye(2), C_J=np.eye(2), D_J=np.zeros((2, 1)))


def test_realize_affine():
    coeff = np.array([[1.0], [0.0]])
    spec = UncertaintySpec(box=((-1.0, 1.0),),
                           perturbations={"B": ((0, coeff),)})
    plant = _plant()
    realized = realize(spec, plant, [0.25])
    assert np.allclose(realized.B, [[1.25], [1.0]])
    assert np.allclose(realized.A, plant.A)
    nominal = realize(spec, plant, [0.0])
    assert np.allclose(nominal.B, plant.B)


def test_realize_out_of_domain():
    spec = UncertaintySpec(box=((-1.0, 1.0),))
    with pytest.raises(OutOfDomainError):
        realize(spec, _plant(), [1.5])


def test_unknown_block_rejected():
    with pytest.raises(ValidationError, match="unknown plant block"):
        UncertaintySpec(box=((-1.0, 1.0),),
                        perturbations={"Q": ((0, np.eye(2)),)})


def test_parameter_index_out_of_range():
    with pytest.raises(ValidationError):
        UncertaintySpec(box=((-1.0, 1.0),),
                        perturbations={"A": ((3, np.eye(2)),)})
