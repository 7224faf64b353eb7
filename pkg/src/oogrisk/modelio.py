"""YAML model documents: plant/controller/detector blocks, attack selection,
and the uncertainty description, with full validation on load and identity
round-trips.

Matrices are written as lists of rows; empty blocks (static controller,
stateless detector) are empty lists.  Uncertainty perturbations can be given
either as full coefficient matrices or as sparse (row, col, coefficient)
entries against one box parameter.
"""

import math
import os

import numpy as np
import yaml

from .errors import ValidationError
from .statespace import (
    AttackSelection,
    ControllerModel,
    DetectorModel,
    PlantModel,
    SystemModel,
)
from .uncertainty import UncertaintySpec

__all__ = ["load_model", "save_model", "model_to_document", "document_to_model"]

SCHEMA_VERSION = 1

_PLANT_KEYS = ("A", "B", "C", "C_J", "D_J")
_CTRL_KEYS = ("A_c", "B_c", "C_c", "D_c")
_DET_KEYS = ("A_e", "B_e", "K_e", "C_e", "D_e", "E_e")


def _matrix(doc, section, key, required=True):
    try:
        raw = doc[section][key]
    except (KeyError, TypeError):
        if not required:
            return None
        raise ValidationError(f"model document missing {section}.{key}")
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{section}.{key} is not a numeric matrix: {exc}")
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim == 1:
        # [] means an empty block; a flat list of numbers means one row.
        arr = arr.reshape(0, 0) if arr.size == 0 else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValidationError(f"{section}.{key} must be 2-D (list of rows)")
    return arr


def _listify(arr):
    return [[float(v) for v in row] for row in np.atleast_2d(arr)]


def _parse_uncertainty(doc, plant):
    unc = doc.get("uncertainty")
    if unc is None:
        return UncertaintySpec.degenerate()
    box = unc.get("box")
    if box is None:
        raise ValidationError("uncertainty.box is required")
    if box and not isinstance(box[0], (list, tuple)):
        box = [box]  # single interval written flat
    perts = {}
    for i, entry in enumerate(unc.get("perturbations", [])):
        where = f"uncertainty.perturbations[{i}]"
        block = entry.get("block")
        if block is None:
            raise ValidationError(f"{where}.block is required")
        param = int(entry.get("parameter", 0))
        if "coefficient" in entry and isinstance(entry["coefficient"], list):
            M = np.array(entry["coefficient"], dtype=float)
        elif "row" in entry and "col" in entry:
            base = getattr(plant, block, None)
            if base is None:
                raise ValidationError(f"{where}.block {block!r} is not a plant block")
            M = np.zeros(base.shape)
            try:
                M[int(entry["row"]), int(entry["col"])] = float(
                    entry.get("coefficient", 1.0)
                )
            except IndexError:
                raise ValidationError(
                    f"{where}: entry ({entry['row']}, {entry['col']}) outside "
                    f"block {block!r} of shape {base.shape}"
                )
        else:
            raise ValidationError(
                f"{where} needs either a coefficient matrix or (row, col)"
            )
        perts.setdefault(block, []).append((param, M))
    return UncertaintySpec(
        box=tuple((float(lo), float(hi)) for lo, hi in box),
        perturbations={k: tuple(v) for k, v in perts.items()},
    )


def document_to_model(doc, source="<document>"):
    """Validate a parsed document and build the in-memory model."""
    if not isinstance(doc, dict):
        raise ValidationError(f"{source}: model document must be a mapping")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if int(version) != SCHEMA_VERSION:
        raise ValidationError(
            f"{source}: unsupported schema_version {version} "
            f"(expected {SCHEMA_VERSION})"
        )
    if "plant" not in doc:
        raise ValidationError(f"{source}: missing 'plant' section")
    plant = PlantModel(**{k: _matrix(doc, "plant", k) for k in _PLANT_KEYS})

    if "controller" in doc:
        ctrl = ControllerModel(**{k: _matrix(doc, "controller", k) for k in _CTRL_KEYS})
    else:
        ctrl = ControllerModel.static(np.zeros((plant.n_u, plant.n_m)))

    if "detector" in doc:
        det = DetectorModel(**{k: _matrix(doc, "detector", k) for k in _DET_KEYS})
    else:
        det = DetectorModel.empty(plant.n_m, plant.n_u)

    atk_doc = doc.get("attack")
    if atk_doc is None:
        raise ValidationError(f"{source}: missing 'attack' section")
    mode = atk_doc.get("mode")
    channels = atk_doc.get("channels")
    if channels is None:
        limit = plant.n_m if mode == "sensor" else plant.n_u
        channels = list(range(limit))
    attack = AttackSelection(mode, tuple(channels), plant.n_u, plant.n_m)

    model = SystemModel(
        plant, ctrl, det, attack,
        residual_threshold=float(doc.get("residual_threshold", 1.0)),
        name=str(doc.get("name", "")),
        notes=str(doc.get("notes", "")),
    )
    spec = _parse_uncertainty(doc, plant)
    return model, spec


def load_model(path):
    """Load and validate a model file; returns (SystemModel, UncertaintySpec)."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"model file not found: {path}")
    with open(path, "r") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ValidationError(f"{path}: not valid YAML: {exc}")
    try:
        return document_to_model(doc, source=str(path))
    except TypeError as exc:
        raise ValidationError(f"{path}: {exc}")


def model_to_document(model, spec=None):
    """Serialize the in-memory model back to a plain document."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": model.name,
        "notes": model.notes,
        "residual_threshold": float(model.residual_threshold),
        "plant": {k: _listify(getattr(model.plant, k)) for k in _PLANT_KEYS},
        "controller": {
            k: _listify(getattr(model.controller, k)) for k in _CTRL_KEYS
        },
        "detector": {k: _listify(getattr(model.detector, k)) for k in _DET_KEYS},
        "attack": {
            "mode": model.attack.mode,
            "channels": list(model.attack.channels),
        },
    }
    if spec is not None:
        doc["uncertainty"] = {
            "box": [[lo, hi] for lo, hi in spec.box],
            "perturbations": [
                {"block": block, "parameter": j, "coefficient": _listify(M)}
                for block, terms in sorted(spec.perturbations.items())
                for j, M in terms
            ],
        }
    return doc


def save_model(model, spec, path):
    """Write the model document as YAML."""
    doc = model_to_document(model, spec)
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False, default_flow_style=None)
