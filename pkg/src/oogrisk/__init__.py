"""Attack-impact risk assessment for uncertain discrete-time control loops.

Quantifies the worst-case impact of stealthy false-data-injection attacks
(the output-to-output gain, computed per sampled uncertainty by an SDP),
certifies boundedness through unit-circle transmission zeros, aggregates
samples into a scenario-approach Value-at-Risk, and allocates a limited
budget of secure channels to minimize that risk.
"""

from .errors import (
    DimensionError,
    OogriskError,
    OutOfDomainError,
    PoleProximityError,
    SolverError,
    ValidationError,
)
from .statespace import (
    AttackSelection,
    ClosedLoopSystem,
    ControllerModel,
    DetectorModel,
    PlantModel,
    StateSpace,
    SystemModel,
    assemble_closed_loop,
    check_assumptions,
    simulate,
    transfer_eval,
)
from .uncertainty import (
    ScenarioConfig,
    UncertaintySpec,
    realize,
    required_sample_count,
    sample,
)
from .impact import ImpactResult, SolverConfig, build_lmi, fdi_sweep, solve_oog
from .boundedness import (
    BoundednessResult,
    ZeroRecord,
    aggregate_boundedness,
    classify_boundedness,
    transmission_zeros,
)
from .oracle import (
    FiniteHorizonProblem,
    OracleResult,
    build_stacked_operators,
    default_horizons,
    finite_horizon_oog,
    validate_attack,
)
from .risk import RiskReport, SampleRecord, assess_risk, empirical_var, var_curve
from .allocation import (
    AllocationProblem,
    AllocationResult,
    LedgerEntry,
    apply_protection,
    channel_labels,
    compare_metrics,
    enumerate_protection_sets,
    labels_to_channels,
    solve_smap,
)
from .modelio import (
    document_to_model,
    load_model,
    model_to_document,
    save_model,
)

__version__ = "0.1.0"
