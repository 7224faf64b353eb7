"""Security-measure allocation by exhaustive subset search.

Enumerates every subset of the vulnerable channels up to the protection
budget, evaluates the residual risk of each (scenario VaR by default, or
the nominal-model impact for comparison), and returns the minimizer with
the full evaluation ledger.  All subsets are scored against one frozen
set of uncertainty samples so the argmin is not corrupted by sampling
noise.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError, ValidationError
from . import impact, risk, uncertainty
from .statespace import assemble_closed_loop

__all__ = [
    "AllocationProblem",
    "AllocationResult",
    "LedgerEntry",
    "channel_labels",
    "labels_to_channels",
    "enumerate_protection_sets",
    "apply_protection",
    "solve_smap",
    "compare_metrics",
]

_METRICS = ("var", "nominal_impact")


def channel_labels(attack):
    """Human-readable channel names: S1.. for sensors, A1.. for actuators."""
    prefix = "S" if attack.mode == "sensor" else "A"
    return tuple(f"{prefix}{c + 1}" for c in attack.channels)


def labels_to_channels(attack, labels):
    """Map channel names back to the selection's channel indices."""
    table = dict(zip(channel_labels(attack), attack.channels))
    out = []
    for lab in labels:
        if lab not in table:
            raise ValidationError(
                f"unknown channel {lab!r}; model offers {sorted(table)}"
            )
        out.append(table[lab])
    return tuple(out)


@dataclass(frozen=True)
class AllocationProblem:
    """Vulnerable channels, protection budget, and the risk metric."""

    vulnerabilities: tuple  # ordered channel labels, e.g. ("S1", "S2", "S3")
    budget: int
    metric: str = "var"

    def __post_init__(self):
        v = tuple(dict.fromkeys(self.vulnerabilities))
        if not v:
            raise ValidationError("vulnerability set must be nonempty")
        if not 0 <= self.budget <= len(v):
            raise ValidationError(
                f"budget must lie in [0, {len(v)}], got {self.budget}"
            )
        if self.metric not in _METRICS:
            raise ValidationError(f"metric must be one of {_METRICS}")
        object.__setattr__(self, "vulnerabilities", v)
        object.__setattr__(self, "budget", int(self.budget))

    @classmethod
    def for_model(cls, model, budget, metric="var", vulnerabilities=None):
        labels = vulnerabilities or channel_labels(model.attack)
        labels_to_channels(model.attack, labels)  # validate against the model
        return cls(tuple(labels), budget, metric)


@dataclass(frozen=True)
class LedgerEntry:
    """One evaluated protection subset."""

    subset: tuple  # protected channel labels
    value: float
    bounded_count: int | None = None
    failure_count: int = 0


@dataclass(frozen=True)
class AllocationResult:
    """Optimal protection set with the full evaluation ledger."""

    best_set: tuple
    best_value: float
    ledger: tuple
    metric: str
    seed: int | None = None


def enumerate_protection_sets(vulnerabilities, budget):
    """All subsets of size <= budget, ordered by size then lexicographically."""
    v = tuple(vulnerabilities)
    if not 0 <= budget <= len(v):
        raise ValidationError(f"budget must lie in [0, {len(v)}]")
    out = []

    def grow(start, chosen):
        out.append(tuple(chosen))
        if len(chosen) == budget:
            return
        for i in range(start, len(v)):
            grow(i + 1, chosen + [v[i]])

    grow(0, [])
    out.sort(key=lambda s: (len(s), tuple(v.index(x) for x in s)))
    return out


def apply_protection(attack, protected_labels):
    """Attack selection with the protected channels removed."""
    return attack.without(labels_to_channels(attack, protected_labels))


def _subset_var(model, spec, deltas, beta, protected, solver_cfg,
                failure_budget=0.02):
    """Empirical VaR of one protection subset on a frozen sample set."""
    atk = apply_protection(model.attack, protected)
    if atk.n_a == 0:
        # No attack surface left: impact is zero by definition.
        return LedgerEntry(tuple(protected), 0.0, len(deltas), 0)
    gammas = []
    bounded = 0
    failures = 0
    for d in deltas:
        plant = uncertainty.realize(spec, model.plant, d)
        sys = assemble_closed_loop(plant, model.controller, model.detector,
                                   atk, tuple(d))
        res = impact.solve_oog(sys, solver_cfg)
        if res.status == "numerical_failure":
            failures += 1
            continue
        gammas.append(res.gamma)
        if res.status == "bounded":
            bounded += 1
    if failures > failure_budget * len(deltas):
        raise SolverError(
            f"{failures} of {len(deltas)} solves failed for protection set "
            f"{protected}; allocation aborted"
        )
    if failures:
        warnings.warn(
            f"{failures} solves failed for protection set {protected} and "
            "were excluded",
            stacklevel=2,
        )
    return LedgerEntry(tuple(protected), risk.empirical_var(gammas, beta),
                       bounded, failures)


def _subset_nominal(model, spec, protected, solver_cfg):
    """Impact of the zero-uncertainty model under one protection subset."""
    atk = apply_protection(model.attack, protected)
    if atk.n_a == 0:
        return LedgerEntry(tuple(protected), 0.0)
    plant = uncertainty.realize(spec, model.plant, np.zeros(spec.dim))
    sys = assemble_closed_loop(plant, model.controller, model.detector, atk)
    res = impact.solve_oog(sys, solver_cfg)
    if res.status == "numerical_failure":
        raise SolverError(
            f"nominal impact solve failed for protection set {protected}"
        )
    return LedgerEntry(tuple(protected), res.gamma)


def solve_smap(model, spec, cfg, problem, solver_cfg=None):
    """Exhaustive allocation search returning the argmin and the ledger.

    All subsets are evaluated on the same frozen uncertainty samples (for
    the VaR metric) so their risks are comparable; ties break toward the
    smaller, lexicographically earlier subset via enumeration order.
    """
    cfg = cfg or uncertainty.ScenarioConfig()
    subsets = enumerate_protection_sets(problem.vulnerabilities, problem.budget)
    if problem.metric == "var":
        deltas = uncertainty.sample(spec, cfg.sample_count, cfg.seed)
        ledger = tuple(
            _subset_var(model, spec, deltas, cfg.beta, s, solver_cfg)
            for s in subsets
        )
    else:
        ledger = tuple(
            _subset_nominal(model, spec, s, solver_cfg) for s in subsets
        )
    best = min(ledger, key=lambda e: e.value)
    return AllocationResult(best.subset, best.value, ledger, problem.metric,
                            cfg.seed)


def compare_metrics(model, spec, cfg, problem, solver_cfg=None):
    """Both metrics on the identical subset enumeration (grouped-bar data)."""
    var_res = solve_smap(model, spec, cfg,
                         AllocationProblem(problem.vulnerabilities,
                                           problem.budget, "var"),
                         solver_cfg)
    nom_res = solve_smap(model, spec, cfg,
                         AllocationProblem(problem.vulnerabilities,
                                           problem.budget, "nominal_impact"),
                         solver_cfg)
    return var_res, nom_res
