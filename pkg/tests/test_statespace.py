"""Closed-loop assembly, simulation and assumption checks."""

import numpy as np
import pytest

from oogrisk import (
    AttackSelection,
    ControllerModel,
    DetectorModel,
    DimensionError,
    PlantModel,
    PoleProximityError,
    assemble_closed_loop,
    check_assumptions,
    simulate,
    transfer_eval,
)


def scalar_plant():
    return PlantModel(A=[[0.5]], B=[[1.0]], C=[[1.0]], C_J=[[1.0]], D_J=[[0.0]])


def test_scalar_sensor_attack_decouples():
    # With D_c = 0 and no detector, a sensor attack never reaches the state.
    plant = scalar_plant()
    ctrl = ControllerModel.static(np.zeros((1, 1)))
    det = DetectorModel.empty(n_m=1, n_u=1)
    atk = AttackSelection("sensor", (0,), n_u=1, n_m=1)
    sys = assemble_closed_loop(plant, ctrl, det, atk)
    assert np.allclose(sys.A_cl, [[0.5]])
    assert np.allclose(sys.B_cl, [[0.0]])
    assert np.allclose(sys.C_p, [[1.0]])
    assert np.allclose(sys.D_p, [[0.0]])
    assert sys.C_r.shape == (0, 1) and sys.D_r.shape == (0, 1)


def test_static_controller_adds_no_states(sec6):
    model, _ = sec6
    sys = assemble_closed_loop(model.plant, model.controller, model.detector,
                               model.attack)
    # 3 plant + 0 controller + 3 detector states
    assert sys.n == 6
    assert model.controller.n_z == 0


def test_assembly_block_formulas():
    rng = np.random.default_rng(5)
    plant = PlantModel(A=rng.standard_normal((2, 2)) * 0.3,
                       B=rng.standard_normal((2, 1)),
                       C=rng.standard_normal((2, 2)),
                       C_J=rng.standard_normal((1, 2)),
                       D_J=rng.standard_normal((1, 1)))
    Dc = rng.standard_normal((1, 2))
    ctrl = ControllerModel.static(Dc)
    det = DetectorModel.empty(n_m=2, n_u=1)
    atk = AttackSelection("actuator", (0,), n_u=1, n_m=2)
    sys = assemble_closed_loop(plant, ctrl, det, atk)
    assert sys.A_cl == pytest.approx(plant.A + plant.B @ Dc @ plant.C)
    assert sys.B_cl == pytest.approx(plant.B)
    assert sys.C_p == pytest.approx(plant.C_J + plant.D_J @ Dc @ plant.C)
    assert sys.D_p == pytest.approx(plant.D_J)


def test_dimension_error_names_block():
    plant = scalar_plant()
    ctrl = ControllerModel.static(np.zeros((1, 2)))  # D_c wrong width
    det = DetectorModel.empty(n_m=1, n_u=1)
    atk = AttackSelection("actuator", (0,), n_u=1, n_m=1)
    with pytest.raises(DimensionError, match="D_c"):
        assemble_closed_loop(plant, ctrl, det, atk)


def test_attack_selector_compression():
    atk = AttackSelection("sensor", (0, 2), n_u=2, n_m=3)
    assert atk.n_a == 2
    assert np.diag(atk.F_a) == pytest.approx([1.0, 0.0, 1.0])
    assert atk.D_a == pytest.approx(np.eye(3)[:, [0, 2]])
    assert atk.B_a == pytest.approx(np.zeros((2, 2)))
    shrunk = atk.without((2,))
    assert shrunk.channels == (0,) and shrunk.n_a == 1


def test_simulate_geometric_energy(scalar_gamma4):
    # Unit impulse: y_p[k] = 0.5^(k-1) for k >= 1, energy 1/(1-1/4).
    run = simulate(scalar_gamma4, [[1.0]], settle_horizon=60)
    assert run["performance_energy"] == pytest.approx(4.0 / 3.0, rel=1e-9)
    assert run["residual_energy"] == pytest.approx(1.0)
    assert run["terminal_state_norm"] < 1e-15
    assert not run["diverged"]


def test_simulate_zero_attack(scalar_gamma4):
    run = simulate(scalar_gamma4, np.zeros((4, 1)), settle_horizon=10)
    assert run["performance_energy"] == 0.0
    assert run["residual_energy"] == 0.0
    assert np.all(run["y_p"] == 0.0)


def test_transfer_eval(scalar_gamma4):
    g = transfer_eval(scalar_gamma4, 1.0, "performance")
    assert g[0, 0] == pytest.approx(2.0)
    with pytest.raises(PoleProximityError):
        transfer_eval(scalar_gamma4, 0.5)


def test_check_assumptions(sec6, sec6_literal):
    model, _ = sec6
    sys = assemble_closed_loop(model.plant, model.controller, model.detector,
                               model.attack)
    chk = check_assumptions(sys)
    assert chk["schur_stable"]
    assert chk["spectral_radius"] == pytest.approx(0.838, abs=5e-3)
    assert chk["b_cl_full_rank"]

    lit, _ = sec6_literal
    sys_l = assemble_closed_loop(lit.plant, lit.controller, lit.detector,
                                 lit.attack)
    chk_l = check_assumptions(sys_l)
    assert not chk_l["schur_stable"]
    assert chk_l["spectral_radius"] == pytest.approx(1.5, abs=1e-6)
