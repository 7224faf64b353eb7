"""Plant, controller, detector and attack-channel models, and the
closed-loop system under attack.

State ordering of the assembled closed loop is (plant, controller,
detector).  Zero-dimension controller or detector states are supported:
all block algebra goes through numpy, which handles empty matrices.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, PoleProximityError, ValidationError

__all__ = [
    "StateSpace",
    "PlantModel",
    "ControllerModel",
    "DetectorModel",
    "AttackSelection",
    "ClosedLoopSystem",
    "SystemModel",
    "assemble_closed_loop",
    "transfer_eval",
    "simulate",
    "check_assumptions",
]


def _as_matrix(value, rows, cols, name):
    """Coerce to a float matrix of the given shape, allowing empty blocks."""
    a = np.atleast_2d(np.asarray(value, dtype=float))
    if a.size == 0:
        a = np.zeros((rows, cols))
    if a.shape != (rows, cols):
        raise DimensionError(name, (rows, cols), a.shape)
    return a


@dataclass(frozen=True)
class StateSpace:
    """Real state-space quadruple (A, B, C, D); any dimension may be zero."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.size == 0:
            A = A.reshape(0, 0)
        if A.shape[0] != A.shape[1]:
            raise DimensionError("A", "square", A.shape)
        n = A.shape[0]
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        if B.size == 0:
            B = B.reshape(n, B.shape[1] if B.ndim == 2 and n == 0 else 0)
        if B.shape[0] != n:
            raise DimensionError("B", (n, "m"), B.shape)
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        if C.size == 0:
            C = C.reshape(C.shape[0] if n == 0 else 0, n)
        if C.shape[1] != n:
            raise DimensionError("C", ("p", n), C.shape)
        D = np.atleast_2d(np.asarray(self.D, dtype=float))
        p, m = C.shape[0], B.shape[1]
        if D.size == 0:
            D = np.zeros((p, m))
        if D.shape != (p, m):
            raise DimensionError("D", (p, m), D.shape)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def n_states(self):
        return self.A.shape[0]

    @property
    def n_inputs(self):
        return self.B.shape[1]

    @property
    def n_outputs(self):
        return self.C.shape[0]


@dataclass(frozen=True)
class PlantModel:
    """Process block set: dynamics (A, B), measurement C and performance
    output (C_J, D_J)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    C_J: np.ndarray
    D_J: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n_x = A.shape[0]
        if A.shape != (n_x, n_x):
            raise DimensionError("A", "square", A.shape)
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        if B.shape[0] != n_x:
            raise DimensionError("B", (n_x, "n_u"), B.shape)
        n_u = B.shape[1]
        C = _as_matrix(self.C, np.atleast_2d(np.asarray(self.C)).shape[0], n_x, "C")
        n_m = C.shape[0]
        CJ = _as_matrix(
            self.C_J, np.atleast_2d(np.asarray(self.C_J)).shape[0], n_x, "C_J"
        )
        n_p = CJ.shape[0]
        DJ = _as_matrix(self.D_J, n_p, n_u, "D_J")
        for name, val in (("A", A), ("B", B), ("C", C), ("C_J", CJ), ("D_J", DJ)):
            object.__setattr__(self, name, val)

    @property
    def n_x(self):
        return self.A.shape[0]

    @property
    def n_u(self):
        return self.B.shape[1]

    @property
    def n_m(self):
        return self.C.shape[0]

    @property
    def n_p(self):
        return self.C_J.shape[0]


@dataclass(frozen=True)
class ControllerModel:
    """Output-feedback controller; n_z = 0 gives a static gain u = D_c y."""

    A_c: np.ndarray
    B_c: np.ndarray
    C_c: np.ndarray
    D_c: np.ndarray

    def __post_init__(self):
        Dc = np.atleast_2d(np.asarray(self.D_c, dtype=float))
        n_u, n_m = Dc.shape
        Ac = np.atleast_2d(np.asarray(self.A_c, dtype=float))
        if Ac.size == 0:
            Ac = Ac.reshape(0, 0)
        n_z = Ac.shape[0]
        if Ac.shape != (n_z, n_z):
            raise DimensionError("A_c", "square", Ac.shape)
        Bc = _as_matrix(self.B_c, n_z, n_m, "B_c")
        Cc = _as_matrix(self.C_c, n_u, n_z, "C_c")
        for name, val in (("A_c", Ac), ("B_c", Bc), ("C_c", Cc), ("D_c", Dc)):
            object.__setattr__(self, name, val)

    @property
    def n_z(self):
        return self.A_c.shape[0]

    @classmethod
    def static(cls, D_c):
        D_c = np.atleast_2d(np.asarray(D_c, dtype=float))
        n_u, n_m = D_c.shape
        return cls(
            A_c=np.zeros((0, 0)),
            B_c=np.zeros((0, n_m)),
            C_c=np.zeros((n_u, 0)),
            D_c=D_c,
        )


@dataclass(frozen=True)
class DetectorModel:
    """Residual generator: s+ = A_e s + B_e u + K_e y, r = C_e s + D_e u + E_e y."""

    A_e: np.ndarray
    B_e: np.ndarray
    K_e: np.ndarray
    C_e: np.ndarray
    D_e: np.ndarray
    E_e: np.ndarray

    def __post_init__(self):
        Ae = np.atleast_2d(np.asarray(self.A_e, dtype=float))
        if Ae.size == 0:
            Ae = Ae.reshape(0, 0)
        n_s = Ae.shape[0]
        if Ae.shape != (n_s, n_s):
            raise DimensionError("A_e", "square", Ae.shape)
        Ee = np.atleast_2d(np.asarray(self.E_e, dtype=float))
        n_r, n_m = Ee.shape
        Be = np.atleast_2d(np.asarray(self.B_e, dtype=float))
        if Be.size == 0:
            Be = Be.reshape(n_s, Be.shape[1] if Be.shape[0] == 0 else 0)
        n_u = Be.shape[1]
        Be = _as_matrix(Be, n_s, n_u, "B_e")
        Ke = _as_matrix(self.K_e, n_s, n_m, "K_e")
        Ce = _as_matrix(self.C_e, n_r, n_s, "C_e")
        De = _as_matrix(self.D_e, n_r, n_u, "D_e")
        for name, val in (
            ("A_e", Ae), ("B_e", Be), ("K_e", Ke),
            ("C_e", Ce), ("D_e", De), ("E_e", Ee),
        ):
            object.__setattr__(self, name, val)

    @property
    def n_s(self):
        return self.A_e.shape[0]

    @property
    def n_r(self):
        return self.C_e.shape[0]

    @classmethod
    def empty(cls, n_m, n_u, n_r=0):
        """Detector with no state and no residual output."""
        return cls(
            A_e=np.zeros((0, 0)),
            B_e=np.zeros((0, n_u)),
            K_e=np.zeros((0, n_m)),
            C_e=np.zeros((n_r, 0)),
            D_e=np.zeros((n_r, n_u)),
            E_e=np.zeros((n_r, n_m)),
        )


@dataclass(frozen=True)
class AttackSelection:
    """Which channels the adversary can write to.

    Selectors are stored column-compressed: B_a and D_a keep only the
    columns of the diagonal 0/1 selectors belonging to attacked channels,
    so the closed-loop input matrix can have full column rank.
    """

    mode: str  # "actuator" | "sensor"
    channels: tuple
    n_u: int
    n_m: int

    def __post_init__(self):
        if self.mode not in ("actuator", "sensor"):
            raise ValidationError(f"attack mode must be actuator|sensor, got {self.mode!r}")
        chans = tuple(sorted(dict.fromkeys(int(c) for c in self.channels)))
        limit = self.n_u if self.mode == "actuator" else self.n_m
        for c in chans:
            if not 0 <= c < limit:
                raise ValidationError(
                    f"attack channel {c} out of range for mode {self.mode} "
                    f"(limit {limit})"
                )
        object.__setattr__(self, "channels", chans)

    @property
    def n_a(self):
        return len(self.channels)

    @property
    def E_a(self):
        d = np.zeros(self.n_u)
        if self.mode == "actuator":
            d[list(self.channels)] = 1.0
        return np.diag(d)

    @property
    def F_a(self):
        d = np.zeros(self.n_m)
        if self.mode == "sensor":
            d[list(self.channels)] = 1.0
        return np.diag(d)

    @property
    def B_a(self):
        if self.mode == "actuator":
            return np.eye(self.n_u)[:, list(self.channels)]
        return np.zeros((self.n_u, self.n_a))

    @property
    def D_a(self):
        if self.mode == "sensor":
            return np.eye(self.n_m)[:, list(self.channels)]
        return np.zeros((self.n_m, self.n_a))

    def without(self, protected):
        """Selection with the given channels removed (protected)."""
        protected = set(int(c) for c in protected)
        bad = protected - set(self.channels)
        if bad:
            raise ValidationError(
                f"cannot protect channels {sorted(bad)}: not in the current "
                f"{self.mode} attack selection {self.channels}"
            )
        kept = tuple(c for c in self.channels if c not in protected)
        return AttackSelection(self.mode, kept, self.n_u, self.n_m)


@dataclass(frozen=True)
class ClosedLoopSystem:
    """Realized closed-loop matrices for one uncertainty value."""

    A_cl: np.ndarray
    B_cl: np.ndarray
    C_p: np.ndarray
    D_p: np.ndarray
    C_r: np.ndarray
    D_r: np.ndarray
    delta: tuple = ()

    @property
    def n(self):
        return self.A_cl.shape[0]

    @property
    def n_a(self):
        return self.B_cl.shape[1]

    @property
    def n_p(self):
        return self.C_p.shape[0]

    @property
    def n_r(self):
        return self.C_r.shape[0]

    def performance_ss(self):
        return StateSpace(self.A_cl, self.B_cl, self.C_p, self.D_p)

    def residual_ss(self):
        return StateSpace(self.A_cl, self.B_cl, self.C_r, self.D_r)


@dataclass(frozen=True)
class SystemModel:
    """Plant + controller + detector + attack selection, pre-perturbation."""

    plant: PlantModel
    controller: ControllerModel
    detector: DetectorModel
    attack: AttackSelection
    residual_threshold: float = 1.0
    name: str = ""
    notes: str = ""

    def __post_init__(self):
        if self.residual_threshold <= 0:
            raise ValidationError("residual_threshold must be positive")

    def with_attack(self, attack):
        return SystemModel(
            self.plant, self.controller, self.detector, attack,
            self.residual_threshold, self.name, self.notes,
        )


def assemble_closed_loop(plant, ctrl, det, atk, delta=()):
    """Assemble the closed-loop system under attack.

    `plant` must already carry any uncertainty perturbation.  The block
    formulas follow the (plant, controller, detector) partition:

        A_cl = [A+B*Dc*C   B*Cc   0 ]      B_cl = [B*Ba + B*Dc*Da   ]
               [Bc*C       Ac     0 ]             [Bc*Da            ]
               [(Be*Dc+Ke)*C Be*Cc Ae]            [(Be*Dc+Ke)*Da    ]

        C_p = [CJ+DJ*Dc*C  DJ*Cc  0 ]      D_p = DJ*(Dc*Da + Ba)
        C_r = [(De*Dc+Ee)*C De*Cc Ce]      D_r = (De*Dc+Ee)*Da
    """
    A, B, C = plant.A, plant.B, plant.C
    CJ, DJ = plant.C_J, plant.D_J
    Ac, Bc, Cc, Dc = ctrl.A_c, ctrl.B_c, ctrl.C_c, ctrl.D_c
    Ae, Be, Ke = det.A_e, det.B_e, det.K_e
    Ce, De, Ee = det.C_e, det.D_e, det.E_e

    if Dc.shape != (plant.n_u, plant.n_m):
        raise DimensionError("D_c", (plant.n_u, plant.n_m), Dc.shape)
    if Be.shape[1] != plant.n_u:
        raise DimensionError("B_e", (det.n_s, plant.n_u), Be.shape)
    if Ke.shape[1] != plant.n_m:
        raise DimensionError("K_e", (det.n_s, plant.n_m), Ke.shape)
    if Ee.shape[1] != plant.n_m:
        raise DimensionError("E_e", (det.n_r, plant.n_m), Ee.shape)
    if atk.n_u != plant.n_u or atk.n_m != plant.n_m:
        raise DimensionError(
            "attack selection", (plant.n_u, plant.n_m), (atk.n_u, atk.n_m)
        )

    Ba, Da = atk.B_a, atk.D_a
    n_x, n_z, n_s = plant.n_x, ctrl.n_z, det.n_s

    A_cl = np.block([
        [A + B @ Dc @ C, B @ Cc, np.zeros((n_x, n_s))],
        [Bc @ C, Ac, np.zeros((n_z, n_s))],
        [(Be @ Dc + Ke) @ C, Be @ Cc, Ae],
    ])
    B_cl = np.vstack([
        B @ Ba + B @ Dc @ Da,
        Bc @ Da,
        (Be @ Dc + Ke) @ Da,
    ])
    C_p = np.hstack([
        CJ + DJ @ Dc @ C, DJ @ Cc, np.zeros((plant.n_p, n_s)),
    ])
    D_p = DJ @ (Dc @ Da + Ba)
    C_r = np.hstack([(De @ Dc + Ee) @ C, De @ Cc, Ce])
    D_r = (De @ Dc + Ee) @ Da
    return ClosedLoopSystem(A_cl, B_cl, C_p, D_p, C_r, D_r, tuple(delta))


def transfer_eval(sys, z, output="performance", pole_tol=1e-9):
    """Evaluate G_p(z) or G_r(z) = C (zI - A_cl)^{-1} B_cl + D at a point.

    Raises PoleProximityError when z is within `pole_tol` of an eigenvalue
    of A_cl (relative to the spectral radius scale).
    """
    if output == "performance":
        C, D = sys.C_p, sys.D_p
    elif output == "residual":
        C, D = sys.C_r, sys.D_r
    else:
        raise ValidationError(f"output must be performance|residual, got {output!r}")
    n = sys.n
    if n == 0:
        return D.astype(complex)
    eigs = np.linalg.eigvals(sys.A_cl)
    scale = max(1.0, np.abs(eigs).max())
    if np.min(np.abs(eigs - z)) <= pole_tol * scale:
        raise PoleProximityError(
            f"evaluation point {z} is within tolerance of a pole of A_cl"
        )
    X = np.linalg.solve(z * np.eye(n) - sys.A_cl, sys.B_cl)
    return C @ X + D


def simulate(sys, attack, settle_horizon=None):
    """Run the closed loop from x[0]=0 under an attack sequence.

    `attack` is a (T, n_a) array active on k = 0..T-1; a[k] = 0 afterwards.
    Outputs are metered on [0, N] with N = settle_horizon (default T).
    Returns a dict with output sequences, energies and the terminal state
    norm, plus a divergence flag when the state norm grew past 1e8.
    """
    attack = np.atleast_2d(np.asarray(attack, dtype=float))
    if attack.size == 0:
        attack = attack.reshape(0, sys.n_a)
    T = attack.shape[0]
    if attack.shape[1] != sys.n_a:
        raise DimensionError("attack", ("T", sys.n_a), attack.shape)
    N = T if settle_horizon is None else int(settle_horizon)
    if N < T:
        raise ValidationError("settle_horizon must be >= attack length")

    x = np.zeros(sys.n)
    xs = np.zeros((N + 2, sys.n))
    yp = np.zeros((N + 1, sys.n_p))
    yr = np.zeros((N + 1, sys.n_r))
    for k in range(N + 1):
        a = attack[k] if k < T else np.zeros(sys.n_a)
        yp[k] = sys.C_p @ x + sys.D_p @ a
        yr[k] = sys.C_r @ x + sys.D_r @ a
        x = sys.A_cl @ x + sys.B_cl @ a
        xs[k + 1] = x
    return {
        "y_p": yp,
        "y_r": yr,
        "states": xs[: N + 2],
        "performance_energy": float(np.sum(yp * yp)),
        "residual_energy": float(np.sum(yr * yr)),
        "terminal_state_norm": float(np.linalg.norm(x)),
        "diverged": bool(np.linalg.norm(x) > 1e8),
    }


def check_assumptions(sys, rank_tol=1e-9):
    """Report Schur stability of A_cl and full column rank of B_cl.

    Advisory only: the impact SDP stays meaningful for unstable loops
    because the attack program pins both endpoint states to zero.
    """
    if sys.n:
        radius = float(np.abs(np.linalg.eigvals(sys.A_cl)).max())
    else:
        radius = 0.0
    if sys.n_a:
        sv = np.linalg.svd(sys.B_cl, compute_uv=False)
        full_rank = bool(sv.min() > rank_tol * max(1.0, sv.max()))
    else:
        full_rank = True
    return {
        "schur_stable": bool(radius < 1.0),
        "spectral_radius": radius,
        "b_cl_full_rank": full_rank,
    }
