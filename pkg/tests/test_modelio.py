"""Model-document loading, validation errors, and round-trips."""

import copy

import numpy as np
import pytest

from oogrisk import (
    ValidationError,
    document_to_model,
    load_model,
    model_to_document,
    save_model,
)

from conftest import MODEL_PATH


def test_benchmark_model_loads(sec6):
    model, spec = sec6
    assert model.plant.n_x == 3
    assert model.plant.n_u == 2
    assert model.plant.n_m == 3
    assert model.attack.mode == "actuator"
    assert model.attack.channels == (0, 1)
    assert model.controller.n_z == 0
    assert model.detector.A_e.shape == (3, 3)
    assert spec.box == ((-0.5, 0.5),)
    assert "B" in spec.perturbations


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_model("examples/no_such_model")


def _base_doc():
    model, spec = load_model(MODEL_PATH)
    return model_to_document(model, spec)


def test_roundtrip_identity(tmp_path, sec6):
    model, spec = sec6
    path = tmp_path / "copy.yaml"
    save_model(model, spec, str(path))
    model2, spec2 = load_model(str(path))
    for key in ("A", "B", "C", "C_J", "D_J"):
        assert np.array_equal(getattr(model.plant, key),
                              getattr(model2.plant, key))
    for key in ("A_e", "B_e", "K_e", "C_e", "D_e", "E_e"):
        assert np.array_equal(getattr(model.detector, key),
                              getattr(model2.detector, key))
    assert np.array_equal(model.controller.D_c, model2.controller.D_c)
    assert model.attack.mode == model2.attack.mode
    assert model.attack.channels == model2.attack.channels
    assert spec.box == spec2.box
    assert set(spec.perturbations) == set(spec2.perturbations)
    for block in spec.perturbations:
        for (j, M), (j2, M2) in zip(spec.perturbations[block],
                                    spec2.perturbations[block]):
            assert j == j2 and np.array_equal(M, M2)


def test_bad_matrix_names_the_field():
    doc = _base_doc()
    doc["plant"]["C"] = [[1.0, 0.0]]  # wrong width
    with pytest.raises(ValidationError, match="C"):
        document_to_model(doc)
    del doc["plant"]["C"]
    with pytest.raises(ValidationError, match="plant.C"):
        document_to_model(doc)


def test_non_numeric_matrix_rejected():
    doc = _base_doc()
    doc["plant"]["A"] = [["x", 0, 0], [0, 0, 0], [0, 0, 0]]
    with pytest.raises(ValidationError, match="plant.A"):
        document_to_model(doc)


def test_missing_sections_rejected():
    with pytest.raises(ValidationError, match="mapping"):
        document_to_model([1, 2, 3])
    doc = _base_doc()
    del doc["attack"]
    with pytest.raises(ValidationError, match="attack"):
        document_to_model(doc)
    doc2 = _base_doc()
    del doc2["plant"]
    with pytest.raises(ValidationError, match="plant"):
        document_to_model(doc2)


def test_schema_version_guard():
    doc = _base_doc()
    doc["schema_version"] = 99
    with pytest.raises(ValidationError, match="schema_version"):
        document_to_model(doc)


def test_defaults_channels_and_optional_sections():
    doc = _base_doc()
    del doc["attack"]["channels"]
    del doc["controller"]
    del doc["detector"]
    del doc["uncertainty"]
    model, spec = document_to_model(doc)
    assert model.attack.channels == (0, 1)  # all actuators
    assert np.all(model.controller.D_c == 0.0)
    assert model.detector.n_r == 0
    assert spec.dim == 1 and spec.box == ((0.0, 0.0),)


def test_sparse_perturbation_entry():
    doc = _base_doc()
    doc["uncertainty"]["perturbations"] = [
        {"block": "B", "parameter": 0, "row": 0, "col": 0, "coefficient": 1.0}
    ]
    _, spec = document_to_model(doc)
    (param, M), = spec.perturbations["B"]
    assert param == 0
    expect = np.zeros((3, 2))
    expect[0, 0] = 1.0
    assert np.array_equal(M, expect)
    doc["uncertainty"]["perturbations"] = [
        {"block": "B", "row": 9, "col": 0, "coefficient": 1.0}
    ]
    with pytest.raises(ValidationError, match="outside"):
        document_to_model(doc)


def test_invalid_yaml(tmp_path):
    p = tmp_path / "broken"
    p.write_text("plant: [unclosed\n")
    with pytest.raises(ValidationError, match="YAML"):
        load_model(str(p))
