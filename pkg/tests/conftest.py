"""Shared fixtures: the benchmark models, hand-built systems with known
gains, and the randomized stable-system corpus used by the oracle and
boundedness consistency suites."""

import os

import numpy as np
import pytest

from oogrisk import (
    AttackSelection,
    ClosedLoopSystem,
    load_model,
)

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
MODEL_PATH = os.path.join(REPO_ROOT, "examples", "paper_sec6")
LITERAL_MODEL_PATH = os.path.join(REPO_ROOT, "examples", "paper_sec6_literal")

# Reference values for the benchmark model, frozen from the calibrated
# interpretation and cross-checked against the frequency-domain and
# finite-horizon oracles.
NOMINAL_GAIN_ACTUATOR = 208.8644
NOMINAL_GAIN_SENSOR = 234.0862
NOMINAL_GAIN_LITERAL_ACTUATOR = 16.3497
SENSOR_NOMINAL_LEDGER = {
    (): 234.086,
    ("S1",): 127.468,
    ("S2",): 26.786,
    ("S3",): 168.480,
}
ACTUATOR_NOMINAL_LEDGER = {
    (): 208.864,
    ("A1",): 153.02,
    ("A2",): 57.874,
}


@pytest.fixture(scope="session")
def sec6():
    return load_model(MODEL_PATH)


@pytest.fixture(scope="session")
def sec6_literal():
    return load_model(LITERAL_MODEL_PATH)


@pytest.fixture(scope="session")
def sec6_sensor(sec6):
    model, spec = sec6
    attack = AttackSelection("sensor", (0, 1, 2), model.plant.n_u,
                             model.plant.n_m)
    return model.with_attack(attack), spec


@pytest.fixture
def scalar_gamma4():
    """G_p = 1/(z-0.5), G_r = 1: gain is (1/0.5)^2 = 4 at z = 1."""
    return ClosedLoopSystem(
        np.array([[0.5]]), np.array([[1.0]]),
        np.array([[1.0]]), np.array([[0.0]]),
        np.array([[0.0]]), np.array([[1.0]]),
    )


@pytest.fixture
def unbounded_sys():
    """G_r = (z-1)/z has a unit-circle zero at z=1 where G_p = 1/z is 1."""
    return ClosedLoopSystem(
        np.array([[0.0]]), np.array([[1.0]]),
        np.array([[1.0]]), np.array([[0.0]]),
        np.array([[-1.0]]), np.array([[1.0]]),
    )


def make_random_system(rng):
    """Random Schur-stable closed loop with n <= 4 and n_r >= n_a."""
    n = int(rng.integers(1, 5))
    n_a = int(rng.integers(1, 3))
    n_r = int(rng.integers(n_a, n_a + 2))
    n_p = int(rng.integers(1, 3))
    A = rng.standard_normal((n, n))
    rho = np.abs(np.linalg.eigvals(A)).max()
    A *= rng.uniform(0.3, 0.9) / max(rho, 1e-9)
    return ClosedLoopSystem(
        A,
        rng.standard_normal((n, n_a)),
        rng.standard_normal((n_p, n)),
        rng.standard_normal((n_p, n_a)),
        rng.standard_normal((n_r, n)),
        rng.standard_normal((n_r, n_a)),
    )


@pytest.fixture(scope="session")
def corpus():
    rng = np.random.default_rng(42)
    return [make_random_system(rng) for _ in range(50)]


def make_circle_zero_system(theta):
    """SISO pair sharing (A, B): G_r = (z^2 - 2cos(theta) z + 1)/z^2 has
    unit-circle zeros at e^{+-j theta}; G_p = 1/z does not vanish there."""
    c = np.cos(theta)
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    C_r = np.array([[1.0, -2.0 * c]])
    D_r = np.array([[1.0]])
    C_p = np.array([[0.0, 1.0]])
    D_p = np.array([[0.0]])
    return ClosedLoopSystem(A, B, C_p, D_p, C_r, D_r)


@pytest.fixture(scope="session")
def circle_zero_systems():
    return [make_circle_zero_system(k * np.pi / 10.0) for k in range(1, 11)]
