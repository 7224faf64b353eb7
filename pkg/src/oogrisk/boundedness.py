"""Boundedness of the output-to-output gain via unit-circle transmission zeros.

The gain is finite iff the residual channel has no transmission zero on the
unit circle, or every such zero (direction by direction) is simultaneously a
zero of the performance channel.  Zeros are computed from the Rosenbrock
pencil [A - zI, B; C, D]; per-sample verdicts aggregate by a quantile count.

Exact-arithmetic conditions become tolerance bands in floating point; the
bands used (`tol_circle`, `tol_share`) are carried into every verdict.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ValidationError

__all__ = [
    "ZeroRecord",
    "BoundednessResult",
    "transmission_zeros",
    "classify_boundedness",
    "aggregate_boundedness",
]

_DEFAULT_TOL_CIRCLE = 1e-6
_DEFAULT_TOL_SHARE = 1e-6


@dataclass(frozen=True)
class ZeroRecord:
    """One transmission zero with its input direction."""

    z: complex
    direction: np.ndarray  # unit-norm input direction
    on_unit_circle: bool
    shared_with_performance: bool = False
    degraded: bool = False  # numerically defective pencil at this zero

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=complex).reshape(-1)
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "z", complex(self.z))


@dataclass(frozen=True)
class BoundednessResult:
    """Verdict of the unit-circle zero test for one closed loop."""

    verdict: str  # bounded_condition_1 | bounded_condition_2 | unbounded
    zeros: tuple = ()
    witness: ZeroRecord | None = None
    degraded: bool = False
    tol_circle: float = _DEFAULT_TOL_CIRCLE
    tol_share: float = _DEFAULT_TOL_SHARE

    @property
    def is_bounded(self):
        return self.verdict != "unbounded"


def _pencil(A, B, C, D, z):
    n = A.shape[0]
    top = np.hstack([A - z * np.eye(n), B]) if n else np.zeros((0, B.shape[1]))
    return np.vstack([top, np.hstack([C, D])]).astype(complex)


def _null_basis(M, rank_tol):
    """Right null-space basis of M with a relative singular-value cutoff."""
    if M.size == 0:
        return np.eye(M.shape[1], dtype=complex)
    _, s, Vh = np.linalg.svd(M)
    scale = s[0] if s.size else 0.0
    if scale == 0.0:
        return Vh.conj().T
    small = np.concatenate([s <= rank_tol * scale,
                            np.ones(M.shape[1] - s.size, dtype=bool)])
    return Vh.conj().T[:, small]


def _square_zeros(A, B, C, D):
    """Finite generalized eigenvalues of the Rosenbrock pencil (square case)."""
    n, m = A.shape[0], B.shape[1]
    M = np.block([[A, B], [C, D]]) if n else np.asarray(D, dtype=float)
    E = np.zeros_like(M)
    E[:n, :n] = np.eye(n)
    if n == 0:
        # Pure feedthrough: zeros exist only where D loses rank, at every z.
        return []
    vals = scipy.linalg.eigvals(M, E)
    return [complex(z) for z in vals if np.isfinite(z.real) and np.isfinite(z.imag)]


def _dedup(values, tol=1e-7):
    out = []
    for z in values:
        if not any(abs(z - w) <= tol * max(1.0, abs(w)) for w in out):
            out.append(z)
    return out


def transmission_zeros(ss, tol_circle=_DEFAULT_TOL_CIRCLE, rank_tol=1e-8):
    """Transmission zeros with input directions from the Rosenbrock pencil.

    `ss` is a quadruple (A, B, C, D).  Square systems use the generalized
    eigenvalue problem directly; tall systems intersect the zero sets of two
    random output compressions and verify each candidate by an SVD rank test.
    Wide systems (more inputs than outputs) have a zero continuum and are
    rejected.
    """
    A, B, C, D = (np.atleast_2d(np.asarray(X, dtype=float)) for X in ss)
    n = A.shape[0] if A.size else 0
    A = A.reshape(n, n)
    m = B.shape[1] if B.size else D.shape[1]
    p = C.shape[0] if C.size else D.shape[0]
    B = B.reshape(n, m)
    C = C.reshape(p, n)
    D = D.reshape(p, m)
    if m == 0:
        return []
    BD = np.vstack([B, D])
    if np.linalg.matrix_rank(BD) < m:
        raise ValidationError("input matrix [B; D] must have full column rank")
    if p < m:
        raise ValidationError(
            "system is wide (more inputs than outputs); its zero set is a "
            "continuum — use classify_boundedness instead"
        )

    if p == m:
        candidates = _dedup(_square_zeros(A, B, C, D))
    else:
        rng = np.random.default_rng(1729)
        sets = []
        for _ in range(2):
            V = rng.standard_normal((m, p))
            sets.append(_dedup(_square_zeros(A, B, V @ C, V @ D)))
        candidates = [
            z for z in sets[0]
            if any(abs(z - w) <= 1e-6 * max(1.0, abs(w)) for w in sets[1])
        ]

    records = []
    scale = max(np.linalg.norm(np.block([[A, B], [C, D]])), 1.0)
    for z in candidates:
        P = _pencil(A, B, C, D, z)
        _, s, Vh = np.linalg.svd(P)
        sigma_min = s[-1] if s.size else 0.0
        degraded = False
        if p > m and sigma_min > rank_tol * scale:
            continue  # compression artifact, not a zero of the tall system
        basis = _null_basis(P, max(rank_tol, sigma_min / (s[0] or 1.0) * 2 if s.size else rank_tol))
        if basis.shape[1] == 0:
            basis = Vh.conj().T[:, -1:]
            degraded = True
        for k in range(basis.shape[1]):
            u = basis[n:, k]
            nu = np.linalg.norm(u)
            if nu < 1e-10:
                # State-only null direction: a decoupling mode, not a
                # transmission zero (no input direction to attack along).
                continue
            records.append(ZeroRecord(z, u / nu, _on_circle(z, tol_circle),
                                      degraded=degraded))
    return records


def _on_circle(z, tol_circle):
    return abs(abs(z) - 1.0) <= tol_circle


def _shared_check(sys, z, tol_share, rank_tol=1e-8):
    """At zero z of the residual channel, test whether every null direction of
    the residual pencil also annihilates the performance outputs.

    Works on the full pencil null vector (x0; u) so it stays valid when z is
    also a pole of the transfer functions.  Returns (all_shared, witness_u).
    """
    Pr = _pencil(sys.A_cl, sys.B_cl, sys.C_r, sys.D_r, z)
    basis = _null_basis(Pr, rank_tol)
    n = sys.n
    CpD = np.hstack([sys.C_p, sys.D_p]).astype(complex)
    perf_scale = max(np.linalg.norm(CpD), 1.0)
    for k in range(basis.shape[1]):
        v = basis[:, k]
        u = v[n:]
        if np.linalg.norm(u) < 1e-10:
            continue  # no input content, irrelevant for attack directions
        yp = CpD @ v
        if np.linalg.norm(yp) > tol_share * perf_scale:
            return False, u / np.linalg.norm(u)
    return True, None


def classify_boundedness(sys, tol_circle=_DEFAULT_TOL_CIRCLE,
                         tol_share=_DEFAULT_TOL_SHARE):
    """Decide boundedness of one realization's output-to-output gain.

    bounded_condition_1: the residual channel has no unit-circle zeros.
    bounded_condition_2: it has some, but every zero direction is also
    annihilated by the performance channel at the same z.
    unbounded: some unit-circle zero direction excites the performance
    output; the violating (z, direction) is returned as witness.
    """
    n_r = sys.C_r.shape[0]
    n_a = sys.n_a
    perf_norm = np.linalg.norm(np.hstack([sys.C_p, sys.D_p]))

    if n_r < n_a:
        # Wide (or empty) residual channel: stealthy directions exist at every
        # frequency, so boundedness needs the performance channel to vanish on
        # all of them — checked on a unit-circle grid.
        degraded = n_r > 0
        if perf_norm == 0.0:
            return BoundednessResult("bounded_condition_2", (),
                                     tol_circle=tol_circle, tol_share=tol_share)
        for th in np.linspace(0.0, np.pi, 64):
            z = complex(np.exp(1j * th))
            shared, u = _shared_check(sys, z, tol_share)
            if not shared:
                w = ZeroRecord(z, u, True, shared_with_performance=False,
                               degraded=degraded)
                return BoundednessResult("unbounded", (w,), w, degraded,
                                         tol_circle, tol_share)
        return BoundednessResult("bounded_condition_2", (), None, True,
                                 tol_circle, tol_share)

    zeros = transmission_zeros((sys.A_cl, sys.B_cl, sys.C_r, sys.D_r),
                               tol_circle=tol_circle)
    circle = [zr for zr in zeros if zr.on_unit_circle]
    degraded = any(zr.degraded for zr in zeros)
    if not circle:
        return BoundednessResult("bounded_condition_1", tuple(zeros), None,
                                 degraded, tol_circle, tol_share)

    annotated = [zr for zr in zeros if not zr.on_unit_circle]
    witness = None
    for zr in circle:
        shared, u = _shared_check(sys, zr.z, tol_share)
        rec = ZeroRecord(zr.z, u if u is not None else zr.direction,
                         True, shared_with_performance=shared,
                         degraded=zr.degraded)
        annotated.append(rec)
        if not shared and witness is None:
            witness = rec
    if witness is not None:
        return BoundednessResult("unbounded", tuple(annotated), witness,
                                 degraded, tol_circle, tol_share)
    return BoundednessResult("bounded_condition_2", tuple(annotated), None,
                             degraded, tol_circle, tol_share)


def aggregate_boundedness(statuses, beta):
    """True iff at least ceil(N * (1 - beta)) of the samples are bounded."""
    statuses = list(statuses)
    if not statuses:
        raise ValidationError("statuses must be nonempty")
    if not 0.0 < beta < 1.0:
        raise ValidationError("beta must lie strictly in (0, 1)")
    need = math.ceil(len(statuses) * (1.0 - beta))
    return sum(bool(s) for s in statuses) >= need
