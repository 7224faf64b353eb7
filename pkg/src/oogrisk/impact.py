"""Output-to-output gain of one realized closed loop.

The gain is the optimal value of

    min { gamma >= 0, P = P^T :  M(gamma, P) <= 0 }

with M the dissipation LMI built from the closed-loop matrices.  gamma
enters M linearly, so a single SDP suffices; a bisection-with-feasibility
fallback covers solver breakdowns of the joint form.  Optima are verified
a posteriori against the returned certificate and, on demand, against the
frequency-domain inequality on the unit circle.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from cvxopt import matrix as cvxmatrix
from cvxopt import solvers as cvxsolvers

from .errors import DimensionError, SolverError, ValidationError
from . import boundedness

__all__ = [
    "SolverConfig",
    "ImpactResult",
    "build_lmi",
    "solve_oog",
    "fdi_sweep",
]

_CVXOPT_OPTS = {
    "show_progress": False,
    "abstol": 1e-8,
    "reltol": 1e-8,
    "feastol": 1e-8,
    "maxiters": 200,
}


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and limits for the impact SDP."""

    feas_tol: float = 1e-7
    psd_tol: float = 1e-6
    gamma_bracket: float = 1e9
    fdi_grid: int = 2048

    def __post_init__(self):
        for name in ("feas_tol", "psd_tol", "gamma_bracket"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.fdi_grid < 8:
            raise ValidationError("fdi_grid must be at least 8")


@dataclass(frozen=True)
class ImpactResult:
    """Outcome of one output-to-output-gain solve."""

    status: str  # bounded | unbounded | numerical_failure
    gamma: float  # finite when bounded, +inf when unbounded, nan on failure
    P: np.ndarray | None = None
    solver_stats: dict = field(default_factory=dict)

    @property
    def is_bounded(self):
        return self.status == "bounded"


def _stack(sys):
    CpD = np.hstack([sys.C_p, sys.D_p])
    CrD = np.hstack([sys.C_r, sys.D_r])
    return CpD, CrD


def build_lmi(sys, gamma, P):
    """Evaluate M(gamma, P) for the given closed loop.

    M = [A'PA - P, A'PB; B'PA, B'PB] + [Cp Dp]'[Cp Dp] - gamma [Cr Dr]'[Cr Dr]
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n, n_a = sys.n, sys.n_a
    if P.size == 0:
        P = P.reshape(n, n)
    if P.shape != (n, n):
        raise DimensionError("P", (n, n), P.shape)
    A, B = sys.A_cl, sys.B_cl
    dyn = np.block([
        [A.T @ P @ A - P, A.T @ P @ B],
        [B.T @ P @ A, B.T @ P @ B],
    ]) if n else np.zeros((n_a, n_a))
    CpD, CrD = _stack(sys)
    return dyn + CpD.T @ CpD - float(gamma) * (CrD.T @ CrD)


def _sym_basis(n):
    """Coefficient matrices of the dynamic LMI term for each distinct P entry."""
    pairs = []
    for i in range(n):
        for j in range(i, n):
            E = np.zeros((n, n))
            E[i, j] = 1.0
            E[j, i] = 1.0
            pairs.append(((i, j), E))
    return pairs


class _LmiData:
    """Precomputed affine decomposition M = M0 + gamma*Mg + sum p_k Mk."""

    def __init__(self, sys):
        n, n_a = sys.n, sys.n_a
        A, B = sys.A_cl, sys.B_cl
        CpD, CrD = _stack(sys)
        self.n, self.n_a = n, n_a
        self.m = n + n_a
        self.M0 = CpD.T @ CpD
        self.Mg = -(CrD.T @ CrD)
        self.pairs = _sym_basis(n)
        self.Mp = []
        for _, E in self.pairs:
            self.Mp.append(np.block([
                [A.T @ E @ A - E, A.T @ E @ B],
                [B.T @ E @ A, B.T @ E @ B],
            ]))

    def unpack_P(self, pvals):
        P = np.zeros((self.n, self.n))
        for ((i, j), _), v in zip(self.pairs, pvals):
            P[i, j] = v
            P[j, i] = v
        return P


def _sdp(c, Gl, hl, Gs, hs):
    saved = dict(cvxsolvers.options)
    cvxsolvers.options.update(_CVXOPT_OPTS)
    try:
        return cvxsolvers.sdp(
            cvxmatrix(c),
            Gl=cvxmatrix(Gl), hl=cvxmatrix(hl),
            Gs=[cvxmatrix(Gs)], hs=[cvxmatrix(hs)],
        )
    except (ZeroDivisionError, ValueError, ArithmeticError) as exc:
        return {"status": "exception", "x": None, "error": str(exc)}
    finally:
        cvxsolvers.options.clear()
        cvxsolvers.options.update(saved)


def _solve_joint(data, bracket):
    """Minimize gamma jointly over (gamma, P)."""
    nv = 1 + len(data.Mp)
    cols = [data.Mg.flatten()] + [Mk.flatten() for Mk in data.Mp]
    Gs = np.column_stack(cols)
    hs = -data.M0
    c = np.zeros(nv)
    c[0] = 1.0
    Gl = np.zeros((2, nv))
    Gl[0, 0] = -1.0  # gamma >= 0
    Gl[1, 0] = 1.0   # gamma <= bracket
    hl = np.array([0.0, bracket])
    sol = _sdp(c, Gl, hl, Gs, hs)
    if sol["status"] == "optimal":
        x = np.array(sol["x"]).ravel()
        return "optimal", float(x[0]), data.unpack_P(x[1:])
    if sol["status"] == "primal infeasible":
        return "infeasible", math.inf, None
    return "unknown", math.nan, None


def _feasible_at(data, gamma, slack_tol):
    """Max-slack feasibility of M(gamma, P) <= 0 at fixed gamma.

    Maximizes t subject to M(gamma, P) + t I <= 0 (t capped at 1 to keep
    the program bounded).  Returns (feasible, P or None).
    """
    nv = 1 + len(data.Mp)
    cols = [np.eye(data.m).flatten()] + [Mk.flatten() for Mk in data.Mp]
    Gs = np.column_stack(cols)
    hs = -(data.M0 + float(gamma) * data.Mg)
    c = np.zeros(nv)
    c[0] = -1.0  # maximize t
    Gl = np.zeros((1, nv))
    Gl[0, 0] = 1.0
    hl = np.array([1.0])
    sol = _sdp(c, Gl, hl, Gs, hs)
    if sol["status"] not in ("optimal", "primal infeasible"):
        return None, None
    if sol["status"] == "primal infeasible":
        return False, None
    x = np.array(sol["x"]).ravel()
    t = float(x[0])
    return t >= -slack_tol, data.unpack_P(x[1:])


def _solve_bisection(data, bracket, rel_tol=1e-9):
    """Feasibility bisection on gamma; fallback for the joint solve.

    The upper endpoint is found by geometric growth from gamma = 1 rather
    than probing the full bracket at once — the max-slack subproblem is
    badly scaled at extreme gamma.
    """
    feas_lo, P_lo = _feasible_at(data, 0.0, rel_tol)
    if feas_lo:
        return "optimal", 0.0, P_lo
    lo, hi = 0.0, 1.0
    P_hi = None
    while True:
        feas_hi, P_hi = _feasible_at(data, hi, rel_tol)
        if feas_hi:
            break
        if feas_hi is False:
            lo = hi
        if hi >= bracket:
            if feas_hi is False:
                return "infeasible", math.inf, None
            return "unknown", math.nan, None
        hi = min(hi * 16.0, float(bracket))
    P_best = P_hi
    for _ in range(200):
        if hi - lo <= rel_tol * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        feas, P = _feasible_at(data, mid, rel_tol)
        if feas is None:
            lo = mid + rel_tol * max(1.0, mid)  # skip a bad point
            continue
        if feas:
            hi, P_best = mid, P
        else:
            lo = mid
    return "optimal", hi, P_best


def solve_oog(sys, cfg=None):
    """Compute the output-to-output gain of one closed-loop realization.

    Returns an ImpactResult.  Unboundedness is only declared when the SDP
    is infeasible and the unit-circle zero test agrees; a disagreement is
    reported as numerical_failure with both diagnostics attached.
    """
    cfg = cfg or SolverConfig()
    if sys.n_a < 1:
        raise ValidationError("solve_oog needs at least one attack channel")

    # Normalize output scales: gamma transforms as (s_p / s_r)^2.
    CpD, CrD = _stack(sys)
    s_p = np.linalg.norm(CpD) or 1.0
    s_r = np.linalg.norm(CrD) or 1.0
    scaled = type(sys)(
        sys.A_cl, sys.B_cl,
        sys.C_p / s_p, sys.D_p / s_p,
        sys.C_r / s_r, sys.D_r / s_r,
        sys.delta,
    )
    back = (s_p / s_r) ** 2
    data = _LmiData(scaled)
    bracket_scaled = cfg.gamma_bracket / back

    status, gamma, P = _solve_joint(data, bracket_scaled)
    method = "joint"
    if status == "unknown":
        status, gamma, P = _solve_bisection(data, bracket_scaled)
        method = "bisection"

    stats = {"method": method}
    if status == "optimal":
        # Round up by the solver's relative tolerance so the reported value
        # is on the certified-feasible side of the optimum.
        gamma_true = gamma * back * (1.0 + 1e-8)
        P = P * s_p**2  # undo the output normalization on the certificate
        resid = float(np.linalg.eigvalsh(build_lmi(sys, gamma_true, P)).max())
        stats["certificate_residual"] = resid
        scale = max(1.0, abs(gamma_true))
        if resid > 10 * cfg.psd_tol * scale:
            stats["reason"] = "certificate violates the LMI beyond tolerance"
            return ImpactResult("numerical_failure", math.nan, None, stats)
        return ImpactResult("bounded", gamma_true, P, stats)

    if status == "infeasible":
        cls = boundedness.classify_boundedness(sys)
        stats["zero_classification"] = cls.verdict
        if cls.verdict == "unbounded":
            return ImpactResult("unbounded", math.inf, None, stats)
        stats["reason"] = (
            "SDP reported infeasible but the unit-circle zero test found no "
            "unbounded direction"
        )
        return ImpactResult("numerical_failure", math.nan, None, stats)

    stats["reason"] = "solver did not converge"
    return ImpactResult("numerical_failure", math.nan, None, stats)


def fdi_sweep(sys, gamma, grid_size=2048, pole_tol=1e-9):
    """Minimum eigenvalue of gamma*Gr(z)^H Gr(z) - Gp(z)^H Gp(z) on |z|=1.

    Returns a dict with the minimum, its frequency, and an `applicable`
    flag that turns false when A_cl has an eigenvalue on the unit circle
    (the transfer functions are then meaningless there).
    """
    if not math.isfinite(gamma) or gamma < 0:
        raise ValidationError("gamma must be finite and nonnegative")
    n = sys.n
    eigs = np.linalg.eigvals(sys.A_cl) if n else np.array([])
    if eigs.size and np.min(np.abs(np.abs(eigs) - 1.0)) <= pole_tol:
        return {
            "applicable": False,
            "min_eigenvalue": math.nan,
            "argmin_theta": math.nan,
            "reason": "A_cl has an eigenvalue on the unit circle",
        }
    thetas = np.linspace(0.0, 2.0 * np.pi, int(grid_size), endpoint=False)
    # Nudge grid points that collide with a pole of the transfer functions.
    if eigs.size:
        half_step = np.pi / grid_size
        angles = np.angle(eigs[np.abs(np.abs(eigs) - 1.0) < 1e-6])
        for k, th in enumerate(thetas):
            if angles.size and np.min(np.abs(np.angle(np.exp(1j * (th - angles))))) < pole_tol:
                thetas[k] = th + half_step
    best = math.inf
    best_theta = 0.0
    I = np.eye(n)
    for th in thetas:
        z = np.exp(1j * th)
        if n:
            X = np.linalg.solve(z * I - sys.A_cl, sys.B_cl)
            Gp = sys.C_p @ X + sys.D_p
            Gr = sys.C_r @ X + sys.D_r
        else:
            Gp, Gr = sys.D_p.astype(complex), sys.D_r.astype(complex)
        H = gamma * (Gr.conj().T @ Gr) - Gp.conj().T @ Gp
        lam = float(np.linalg.eigvalsh(H).min()) if H.size else 0.0
        if lam < best:
            best, best_theta = lam, float(th)
    return {"applicable": True, "min_eigenvalue": best, "argmin_theta": best_theta}
