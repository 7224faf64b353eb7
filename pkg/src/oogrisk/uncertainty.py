"""Parameter-box uncertainty: affine perturbations of the plant blocks,
i.i.d. sampling, and the Hoeffding sample count for the scenario approach.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfDomainError, ValidationError
from .statespace import PlantModel

__all__ = [
    "UncertaintySpec",
    "ScenarioConfig",
    "required_sample_count",
    "sample",
    "realize",
]

_PLANT_BLOCKS = ("A", "B", "C", "C_J", "D_J")


@dataclass(frozen=True)
class UncertaintySpec:
    """Closed bounded box of scalar parameters with affine perturbation maps.

    `perturbations` maps a plant block name to a list of
    (parameter_index, coefficient_matrix) pairs; the realized perturbation
    of that block is sum_j delta_j * M_j.  The box must contain zero so the
    nominal model is a member of the family.
    """

    box: tuple  # ((lo, hi), ...) per parameter
    perturbations: dict = field(default_factory=dict)

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        for lo, hi in box:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValidationError("uncertainty box must have finite endpoints")
            if lo > hi:
                raise ValidationError(f"empty interval [{lo}, {hi}] in uncertainty box")
            if lo > 0 or hi < 0:
                raise ValidationError("uncertainty box must contain zero")
        perts = {}
        for block, terms in self.perturbations.items():
            if block not in _PLANT_BLOCKS:
                raise ValidationError(
                    f"unknown plant block {block!r} in perturbations "
                    f"(expected one of {_PLANT_BLOCKS})"
                )
            perts[block] = tuple(
                (int(j), np.atleast_2d(np.asarray(M, dtype=float)))
                for j, M in terms
            )
            for j, _ in perts[block]:
                if not 0 <= j < len(box):
                    raise ValidationError(
                        f"perturbation of {block!r} references parameter {j}, "
                        f"but the box has {len(box)} parameters"
                    )
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "perturbations", perts)

    @property
    def dim(self):
        return len(self.box)

    def contains(self, delta, tol=1e-12):
        delta = np.asarray(delta, dtype=float).reshape(-1)
        if delta.shape != (self.dim,):
            return False
        return all(
            lo - tol <= d <= hi + tol for d, (lo, hi) in zip(delta, self.box)
        )

    @classmethod
    def degenerate(cls, dim=1):
        """The box {0}: every sample is the nominal model."""
        return cls(box=((0.0, 0.0),) * dim)


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario-approach parameters: accuracy, confidence, VaR level, seed."""

    epsilon1: float = 0.05
    beta1: float = 0.1
    beta: float = 0.1
    n_override: int | None = None
    seed: int = 0
    weights: tuple | None = None  # reserved for non-uniform distributions

    def __post_init__(self):
        for name in ("epsilon1", "beta1", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValidationError(f"{name} must lie strictly in (0, 1), got {v}")
        if self.n_override is not None and self.n_override < 1:
            raise ValidationError("n_override must be >= 1")

    @property
    def sample_count(self):
        if self.n_override is not None:
            return int(self.n_override)
        return required_sample_count(self.epsilon1, self.beta1)


def required_sample_count(epsilon1, beta1):
    """Hoeffding sample count: N1 = ceil(ln(2/beta1) / (2 epsilon1^2))."""
    if not 0.0 < epsilon1 < 1.0 or not 0.0 < beta1 < 1.0:
        raise ValidationError("epsilon1 and beta1 must lie strictly in (0, 1)")
    return max(1, math.ceil(math.log(2.0 / beta1) / (2.0 * epsilon1**2)))


def sample(spec, count, rng):
    """Draw `count` i.i.d. uniform samples from the box.

    `rng` is a numpy Generator (or an integer seed).  Returns an array of
    shape (count, dim); deterministic for a given seed.
    """
    if count < 1:
        raise ValidationError("sample count must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    lo = np.array([b[0] for b in spec.box])
    hi = np.array([b[1] for b in spec.box])
    u = rng.random((int(count), spec.dim))
    return lo + u * (hi - lo)


def realize(spec, plant, delta):
    """Apply the affine perturbation at `delta` to the plant blocks."""
    delta = np.asarray(delta, dtype=float).reshape(-1)
    if delta.shape != (spec.dim,):
        raise ValidationError(
            f"delta has {delta.shape[0]} entries, box has {spec.dim} parameters"
        )
    if not spec.contains(delta):
        raise OutOfDomainError(f"delta {delta.tolist()} outside the uncertainty box")
    blocks = {name: getattr(plant, name).copy() for name in _PLANT_BLOCKS}
    for name, terms in spec.perturbations.items():
        for j, M in terms:
            if M.shape != blocks[name].shape:
                raise ValidationError(
                    f"perturbation coefficient for {name!r} has shape {M.shape}, "
                    f"block is {blocks[name].shape}"
                )
            blocks[name] = blocks[name] + delta[j] * M
    return PlantModel(**blocks)
