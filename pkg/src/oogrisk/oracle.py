"""Finite-horizon brute-force verifier for the output-to-output gain.

Stacks the closed loop into block-Toeplitz operators T_p, T_r mapping a
length-T attack (zero initial state) to the outputs on [0, N], then solves
the quadratic program max a' T_p'T_p a  s.t.  a' T_r'T_r a <= 1 as a
generalized eigenvalue problem.  The result is a lower bound on the true
gain for Schur-stable realizations, up to the output energy beyond N
(reported as a spectral-radius tail estimate); divergence of the bound with
growing T is the finite-horizon signature of an unbounded gain.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ValidationError
from .statespace import simulate, check_assumptions

__all__ = [
    "FiniteHorizonProblem",
    "OracleResult",
    "build_stacked_operators",
    "default_horizons",
    "finite_horizon_oog",
    "validate_attack",
]


@dataclass(frozen=True)
class FiniteHorizonProblem:
    """Stacked operators of one realization on a finite horizon.

    T_p has shape ((N+1)*n_p, T*n_a) and maps the stacked attack
    a[0..T-1] to the stacked performance output y_p[0..N]; T_r likewise
    for the residual output.  Both are block-lower-triangular (causality).
    """

    T: int
    N: int
    T_p: np.ndarray
    T_r: np.ndarray


@dataclass(frozen=True)
class OracleResult:
    """Finite-horizon bound with its maximizing attack."""

    status: str  # ok | unbounded_at_horizon | inapplicable
    bound: float
    attack: np.ndarray | None = None  # (T, n_a) maximizing attack
    tail_estimate: float = 0.0

    def __iter__(self):  # allow `bound, attack = finite_horizon_oog(...)`
        yield self.bound
        yield self.attack


def _stacked(A, B, C, D, T, N):
    n_out, n_a = D.shape
    M = np.zeros(((N + 1) * n_out, T * n_a))
    # Markov parameters h[0] = D, h[t] = C A^(t-1) B.
    h = [D]
    if A.shape[0]:
        P = B
        for _ in range(N):
            h.append(C @ P)
            P = A @ P
    else:
        h.extend([np.zeros((n_out, n_a))] * N)
    for k in range(N + 1):
        for j in range(min(k + 1, T)):
            M[k * n_out:(k + 1) * n_out, j * n_a:(j + 1) * n_a] = h[k - j]
    return M


def build_stacked_operators(sys, T, N):
    """Block-Toeplitz output operators for an attack on [0, T-1] metered on [0, N]."""
    T, N = int(T), int(N)
    if T < 1:
        raise ValidationError("attack horizon T must be >= 1")
    if N < T:
        raise ValidationError("evaluation horizon N must be >= T")
    Tp = _stacked(sys.A_cl, sys.B_cl, sys.C_p, sys.D_p, T, N)
    Tr = _stacked(sys.A_cl, sys.B_cl, sys.C_r, sys.D_r, T, N)
    return FiniteHorizonProblem(T, N, Tp, Tr)


def default_horizons(sys, cap=400):
    """Attack/evaluation horizons scaled by the closed-loop decay rate."""
    rho = check_assumptions(sys)["spectral_radius"]
    if rho >= 1.0:
        T = cap
    else:
        T = min(cap, max(20, math.ceil(20.0 / (1.0 - rho))))
    return T, 4 * T


def finite_horizon_oog(sys, T, N, mu_scale=1e-10, null_tol=1e-9):
    """Lower-bound the output-to-output gain by direct quadratic optimization.

    Solves the generalized eigenvalue problem (T_p'T_p) v = lambda (T_r'T_r) v
    on the regularization T_r'T_r + mu I.  Refuses unstable realizations
    (free terminal state is not a relaxation of x[inf]=0 there), and reports
    unbounded-at-this-horizon when performance energy lives in the stealth
    Gramian's null space.
    """
    if check_assumptions(sys)["spectral_radius"] >= 1.0:
        return OracleResult("inapplicable", math.nan)
    prob = build_stacked_operators(sys, T, N)
    Gp = prob.T_p.T @ prob.T_p
    Gr = prob.T_r.T @ prob.T_r
    dim = Gr.shape[0]
    tr = np.trace(Gr)
    if tr <= 0.0:
        # Vacuous stealth constraint on this horizon.
        if np.trace(Gp) > 0.0:
            return OracleResult("unbounded_at_horizon", math.inf)
        return OracleResult("ok", 0.0, np.zeros((T, sys.n_a)))

    # Null-space escape: stealthy-for-free directions carrying impact energy.
    w, V = np.linalg.eigh(Gr)
    scale = w[-1] if w[-1] > 0 else 1.0
    null = V[:, w < null_tol * scale]
    if null.size:
        energy = np.linalg.eigvalsh(null.T @ Gp @ null)
        if energy.size and energy[-1] > null_tol * max(1.0, np.trace(Gp)):
            return OracleResult("unbounded_at_horizon", math.inf)

    mu = mu_scale * tr / dim
    vals, vecs = scipy.linalg.eigh(Gp, Gr + mu * np.eye(dim))
    lam = float(vals[-1])
    v = vecs[:, -1]
    denom = float(v @ Gr @ v)
    if denom <= 0.0:
        return OracleResult("unbounded_at_horizon", math.inf)
    a = (v / math.sqrt(denom)).reshape(T, sys.n_a)

    # Energy of y_p beyond N, bounded through the state decay rate.
    rho = check_assumptions(sys)["spectral_radius"]
    run = simulate(sys, a, settle_horizon=N)
    x_end = run["states"][-1]
    cp = np.linalg.norm(sys.C_p, 2) if sys.C_p.size else 0.0
    tail = (cp * np.linalg.norm(x_end)) ** 2 / max(1.0 - rho**2, 1e-12)
    return OracleResult("ok", lam, a, tail)


def validate_attack(sys, attack, N, eps_r=1.0, tol_terminal=1e-6):
    """Simulate a candidate attack and check stealth, impact and settling."""
    attack = np.atleast_2d(np.asarray(attack, dtype=float))
    if attack.size and attack.shape[0] > int(N):
        raise ValidationError("attack longer than the evaluation horizon")
    run = simulate(sys, attack, settle_horizon=int(N))
    return {
        "stealthy": bool(run["residual_energy"] <= eps_r + 1e-9),
        "settled": bool(run["terminal_state_norm"] <= tol_terminal),
        "impact": run["performance_energy"],
        "residual_energy": run["residual_energy"],
        "terminal_norm": run["terminal_state_norm"],
    }
