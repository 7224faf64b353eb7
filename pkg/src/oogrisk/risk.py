"""Scenario-approach Value-at-Risk of the attack impact.

Draws N1 uncertainty samples, solves the output-to-output-gain SDP for each
realized closed loop, and returns the empirical VaR (an order statistic of
the per-sample gains) together with its accuracy/confidence certificate
(epsilon1, beta1) and the full sample ledger.  Unbounded samples stay in
the ledger as +inf — that is what makes the quantile's finiteness agree
with the aggregate boundedness count.
"""

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError, ValidationError
from . import impact, uncertainty
from .statespace import assemble_closed_loop

__all__ = [
    "SampleRecord",
    "RiskReport",
    "empirical_var",
    "assess_risk",
    "var_curve",
]

_FAILURE_BUDGET = 0.02


@dataclass(frozen=True)
class SampleRecord:
    """One uncertainty sample with its solved impact."""

    index: int
    delta: tuple
    gamma: float  # +inf when unbounded, nan on numerical failure
    status: str  # bounded | unbounded | numerical_failure


@dataclass(frozen=True)
class RiskReport:
    """Empirical VaR with certificate parameters and the sample ledger."""

    var_value: float
    beta: float
    epsilon1: float
    beta1: float
    N1: int
    samples: tuple
    bounded_count: int
    seed: int
    timing: float = 0.0

    @property
    def gammas(self):
        return [s.gamma for s in self.samples if s.status != "numerical_failure"]

    @property
    def failure_count(self):
        return sum(1 for s in self.samples if s.status == "numerical_failure")


def empirical_var(gammas, beta):
    """k-th smallest sample value with k = ceil(N * (1 - beta)).

    This is the smallest gamma at which the empirical CDF reaches 1 - beta;
    +inf when fewer than k samples are finite.
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ValidationError("empirical_var needs a nonempty sample list")
    if not 0.0 < beta < 1.0:
        raise ValidationError("beta must lie strictly in (0, 1)")
    if any(math.isnan(g) for g in gammas):
        raise ValidationError("sample list contains NaN")
    k = math.ceil(len(gammas) * (1.0 - beta))
    k = max(k, 1)
    ordered = sorted(gammas)
    return ordered[k - 1]


def var_curve(gammas, beta_grid):
    """Evaluate the empirical VaR on one sample set over a grid of levels."""
    return [(float(b), empirical_var(gammas, b)) for b in beta_grid]


def solve_sample(model, delta, spec, solver_cfg=None):
    """Realize one uncertainty value and solve its impact SDP."""
    plant = uncertainty.realize(spec, model.plant, delta)
    sys = assemble_closed_loop(
        plant, model.controller, model.detector, model.attack, tuple(delta)
    )
    return impact.solve_oog(sys, solver_cfg)


def assess_risk(model, spec, cfg=None, solver_cfg=None, failure_budget=_FAILURE_BUDGET):
    """Full scenario assessment: sample, solve, aggregate into a RiskReport.

    Numerical failures are recorded in the ledger and excluded from the
    quantile with a warning as long as they stay below `failure_budget`
    of N1; beyond that the certificate is void and the assessment aborts.
    """
    cfg = cfg or uncertainty.ScenarioConfig()
    t0 = time.perf_counter()
    n1 = cfg.sample_count
    deltas = uncertainty.sample(spec, n1, cfg.seed)

    records = []
    finite_or_inf = []
    bounded = 0
    for i, d in enumerate(deltas):
        res = solve_sample(model, d, spec, solver_cfg)
        records.append(SampleRecord(i, tuple(float(v) for v in d),
                                    res.gamma, res.status))
        if res.status == "numerical_failure":
            continue
        finite_or_inf.append(res.gamma)
        if res.status == "bounded":
            bounded += 1

    failures = n1 - len(finite_or_inf)
    if failures:
        if failures > failure_budget * n1:
            raise SolverError(
                f"{failures} of {n1} impact solves failed numerically "
                f"(budget {failure_budget:.0%}); assessment aborted"
            )
        warnings.warn(
            f"{failures} of {n1} impact solves failed numerically and were "
            "excluded from the quantile",
            stacklevel=2,
        )

    value = empirical_var(finite_or_inf, cfg.beta)
    return RiskReport(
        var_value=value,
        beta=cfg.beta,
        epsilon1=cfg.epsilon1,
        beta1=cfg.beta1,
        N1=n1,
        samples=tuple(records),
        bounded_count=bounded,
        seed=cfg.seed,
        timing=time.perf_counter() - t0,
    )
