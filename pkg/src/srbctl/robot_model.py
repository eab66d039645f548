"""Robot model abstraction: constant parameters, per-step kinematic
quantities, the built-in planar toy biped, and model-side randomization.

A :class:`RobotModel` carries everything the controller needs that does not
change during a rollout (mass, inertia, torque limits, PD gains, contact
surfaces).  A :class:`KinematicSnapshot` carries the per-timestep quantities
that a full simulator would normally supply: lever arms from the CoM to each
contact, the actuated block of each contact Jacobian transpose, and the
actuated-joint bias force.  The toy biped provides these analytically so the
whole pipeline runs without any rigid-body dynamics library.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "ContactSurfaceId",
    "RobotModel",
    "KinematicSnapshot",
    "ToyBipedParams",
    "ModelFormatError",
    "ModelValidationError",
    "load_model",
    "save_model",
    "toy_biped_snapshot",
    "toy_biped_ik",
    "toy_biped_model",
    "randomize_model",
]


class ModelFormatError(ValueError):
    """Model file does not parse or has an unexpected structure."""


class ModelValidationError(ValueError):
    """Parsed model violates an invariant; message names the field."""


@dataclass(frozen=True)
class ContactSurfaceId:
    """Dense, unique index plus a human-readable label for a contact surface."""

    index: int
    label: str


@dataclass(frozen=True)
class RobotModel:
    """Constant robot parameters.

    Attributes
    ----------
    m : float
        Total mass (kg).
    inertia : (3, 3) ndarray
        Rotational inertia about the CoM, symmetric positive definite.
    g_vec : (3,) ndarray
        Gravitational acceleration (m/s^2).
    n : int
        Actuated joint count.
    tau_limit : (n,) ndarray
        Per-joint torque limits, strictly positive (N*m).
    contacts : tuple of ContactSurfaceId
        Contact surfaces, indices dense in [0, n_contacts).
    kp, kd : (n,) ndarray
        Diagonals of the joint PD stiffness/damping matrices.
    toy : ToyBipedParams or None
        Present when the model ships analytic toy-biped kinematics.
    """

    m: float
    inertia: np.ndarray
    g_vec: np.ndarray
    n: int
    tau_limit: np.ndarray
    contacts: tuple[ContactSurfaceId, ...]
    kp: np.ndarray
    kd: np.ndarray
    toy: "ToyBipedParams | None" = None

    @property
    def n_contacts(self) -> int:
        return len(self.contacts)

    def validate(self) -> "RobotModel":
        if self.m <= 0:
            raise ModelValidationError("mass: must be > 0")
        if self.inertia.shape != (3, 3):
            raise ModelValidationError("inertia: must be 3x3")
        if not np.allclose(self.inertia, self.inertia.T, atol=1e-12):
            raise ModelValidationError("inertia: must be symmetric")
        if np.linalg.eigvalsh(self.inertia).min() <= 0:
            raise ModelValidationError("inertia: must be positive definite")
        if self.n < 1:
            raise ModelValidationError("joint_count: must be >= 1")
        for name, arr in (("tau_limit", self.tau_limit), ("kp", self.kp), ("kd", self.kd)):
            if arr.shape != (self.n,):
                raise ModelValidationError(f"{name}: expected length {self.n}")
        if np.any(self.tau_limit <= 0):
            raise ModelValidationError("tau_limit: entries must be > 0")
        if len(self.contacts) < 1:
            raise ModelValidationError("contacts: at least one surface required")
        if sorted(c.index for c in self.contacts) != list(range(len(self.contacts))):
            raise ModelValidationError("contacts: indices must be dense and unique")
        return self


@dataclass(frozen=True)
class KinematicSnapshot:
    """Per-timestep kinematic/dynamic quantities for one configuration.

    ``r[i]`` is the lever arm from the CoM to contact ``i`` (m).  ``j_act[i]``
    is n x 6 and maps the stacked contact wrench [force; moment] of contact
    ``i`` to actuated-joint generalized force (the actuated rows of the
    contact Jacobian transpose).  ``h_act`` is the actuated-joint bias force
    (Coriolis + centrifugal + gravity, N*m).
    """

    r: np.ndarray  # (n_contacts, 3)
    j_act: np.ndarray  # (n_contacts, n, 6)
    h_act: np.ndarray  # (n,)
    q: np.ndarray  # (n,)
    qdot: np.ndarray  # (n,)
    near_singular: bool = False


@dataclass(frozen=True)
class ToyBipedParams:
    """Planar two-legged toy: two 2-DoF pitch legs, three mocked (fixed)
    torso joints per side, n = 10 total.  Joint order per side is
    [hip_pitch, knee_pitch, torso x3]; left side first."""

    hip_offset: float = 0.10
    thigh_len: float = 0.25
    shank_len: float = 0.25
    thigh_mass: float = 2.0
    shank_mass: float = 1.0
    grav: float = 9.81

    def __post_init__(self):
        for name in ("hip_offset", "thigh_len", "shank_len", "thigh_mass", "shank_mass"):
            if getattr(self, name) <= 0:
                raise ModelValidationError(f"toy.{name}: must be > 0")


_MODEL_KEYS = {
    "mass", "inertia", "gravity", "joint_count", "torque_limit",
    "contacts", "kp", "kd", "toy",
}
_TOY_KEYS = {
    "hip_offset", "thigh_len", "shank_len", "thigh_mass", "shank_mass", "grav",
}


def load_model(path) -> RobotModel:
    """Load and validate a robot model from a TOML model file.

    Raises :class:`ModelFormatError` on parse/structure problems (with line
    context where the parser provides it) and :class:`ModelValidationError`
    when a field violates an invariant.
    """
    with open(path, "rb") as f:
        try:
            raw = tomllib.load(f)
        except tomllib.TOMLDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc

    unknown = set(raw) - _MODEL_KEYS
    if unknown:
        raise ModelFormatError(f"{path}: unknown keys {sorted(unknown)}")
    missing = _MODEL_KEYS - {"toy"} - set(raw)
    if missing:
        raise ModelFormatError(f"{path}: missing keys {sorted(missing)}")

    toy = None
    if "toy" in raw:
        unknown = set(raw["toy"]) - _TOY_KEYS
        if unknown:
            raise ModelFormatError(f"{path}: unknown toy keys {sorted(unknown)}")
        toy = ToyBipedParams(**raw["toy"])

    inertia = np.asarray(raw["inertia"], dtype=float)
    if inertia.size != 9:
        raise ModelFormatError(f"{path}: inertia must hold 9 row-major numbers")
    model = RobotModel(
        m=float(raw["mass"]),
        inertia=inertia.reshape(3, 3),
        g_vec=np.asarray(raw["gravity"], dtype=float),
        n=int(raw["joint_count"]),
        tau_limit=np.asarray(raw["torque_limit"], dtype=float),
        contacts=tuple(ContactSurfaceId(i, lbl) for i, lbl in enumerate(raw["contacts"])),
        kp=np.asarray(raw["kp"], dtype=float),
        kd=np.asarray(raw["kd"], dtype=float),
        toy=toy,
    )
    return model.validate()


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _fmt_list(arr) -> str:
    return "[" + ", ".join(_fmt(v) for v in np.ravel(arr)) + "]"


def save_model(model: RobotModel, path) -> None:
    """Write a model file that :func:`load_model` round-trips exactly."""
    lines = [
        f"mass = {_fmt(model.m)}",
        f"inertia = {_fmt_list(model.inertia)}",
        f"gravity = {_fmt_list(model.g_vec)}",
        f"joint_count = {model.n}",
        f"torque_limit = {_fmt_list(model.tau_limit)}",
        "contacts = [" + ", ".join(f'"{c.label}"' for c in model.contacts) + "]",
        f"kp = {_fmt_list(model.kp)}",
        f"kd = {_fmt_list(model.kd)}",
    ]
    if model.toy is not None:
        lines.append("")
        lines.append("[toy]")
        for name in sorted(_TOY_KEYS):
            lines.append(f"{name} = {_fmt(getattr(model.toy, name))}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


# Toy-biped layout: joints [L_hip, L_knee, L_torso0..2, R_hip, R_knee,
# R_torso0..2].  Legs swing in the sagittal (x-z) plane about the +y axis;
# the hip sits at the CoM, offset +/- hip_offset in y.  Torso joints are
# mocked as fixed: zero Jacobian and bias rows.

_N_TOY = 10
_LEG_JOINTS = ((0, 1), (5, 6))  # (hip, knee) per side
_SIDE_SIGN = (+1.0, -1.0)  # left foot at +hip_offset


def _leg_fk(p: ToyBipedParams, q_hip: float, q_knee: float):
    """Foot position relative to the hip and its 3x2 position Jacobian."""
    l1, l2 = p.thigh_len, p.shank_len
    s1, c1 = np.sin(q_hip), np.cos(q_hip)
    s12, c12 = np.sin(q_hip + q_knee), np.cos(q_hip + q_knee)
    pos = np.array([l1 * s1 + l2 * s12, 0.0, -(l1 * c1 + l2 * c12)])
    jac = np.array([
        [l1 * c1 + l2 * c12, l2 * c12],
        [0.0, 0.0],
        [l1 * s1 + l2 * s12, l2 * s12],
    ])
    return pos, jac


def toy_biped_snapshot(params: ToyBipedParams, q: np.ndarray, qdot: np.ndarray) -> KinematicSnapshot:
    """Analytic kinematic snapshot for the planar toy biped.

    ``h_act`` holds the exact gravity torque of the leg links at ``q`` plus
    the two-link velocity-product (Coriolis/centrifugal) term.  A fully
    extended knee is reported through ``near_singular`` rather than failing.
    """
    q = np.asarray(q, dtype=float)
    qdot = np.asarray(qdot, dtype=float)
    if q.shape != (_N_TOY,) or qdot.shape != (_N_TOY,):
        raise ValueError(f"q, qdot must have length {_N_TOY}")

    l1, l2 = params.thigh_len, params.shank_len
    m1, m2 = params.thigh_mass, params.shank_mass
    lc1, lc2 = 0.5 * l1, 0.5 * l2
    grav = params.grav

    r = np.zeros((2, 3))
    j_act = np.zeros((2, _N_TOY, 6))
    h_act = np.zeros(_N_TOY)
    near_singular = False

    for side, ((i_hip, i_knee), sign) in enumerate(zip(_LEG_JOINTS, _SIDE_SIGN)):
        q1, q2 = q[i_hip], q[i_knee]
        qd1, qd2 = qdot[i_hip], qdot[i_knee]
        pos, jac = _leg_fk(params, q1, q2)
        r[side] = pos + np.array([0.0, sign * params.hip_offset, 0.0])

        # Actuated rows of J^T: force row = dp/dq_j, moment row = joint axis (+y).
        for col, j in enumerate((i_hip, i_knee)):
            j_act[side, j, 0:3] = jac[:, col]
            j_act[side, j, 3:6] = (0.0, 1.0, 0.0)

        # Two-link gravity + velocity-product bias (point masses at link centers).
        s1 = np.sin(q1)
        s12 = np.sin(q1 + q2)
        h_act[i_hip] = (m1 * lc1 + m2 * l1) * grav * s1 + m2 * lc2 * grav * s12
        h_act[i_knee] = m2 * lc2 * grav * s12
        h_act[i_hip] += -m2 * l1 * lc2 * np.sin(q2) * (2.0 * qd1 * qd2 + qd2 * qd2)
        h_act[i_knee] += m2 * l1 * lc2 * np.sin(q2) * qd1 * qd1

        if abs(np.sin(q2)) < 1e-6:
            near_singular = True

    return KinematicSnapshot(r=r, j_act=j_act, h_act=h_act, q=q, qdot=qdot,
                             near_singular=near_singular)


def toy_biped_ik(params: ToyBipedParams, hip_to_foot: float) -> tuple[float, float]:
    """Hip/knee angles placing the foot directly below the hip at the given
    vertical distance.  Requires equal thigh and shank lengths."""
    total = params.thigh_len + params.shank_len
    d = np.clip(hip_to_foot, 1e-6, total - 1e-9)
    alpha = np.arccos(d / total)
    return float(alpha), float(-2.0 * alpha)


def toy_biped_model() -> RobotModel:
    """Default desk-scale biped: 30 kg, ten joints, two foot contacts."""
    n = _N_TOY
    return RobotModel(
        m=30.0,
        inertia=np.diag([1.5, 1.2, 0.8]),
        g_vec=np.array([0.0, 0.0, -9.81]),
        n=n,
        tau_limit=np.full(n, 60.0),
        contacts=(ContactSurfaceId(0, "left_foot"), ContactSurfaceId(1, "right_foot")),
        kp=np.full(n, 50.0),
        kd=np.full(n, 2.0),
        toy=ToyBipedParams(),
    ).validate()


def randomize_model(model: RobotModel, snapshot: KinematicSnapshot,
                    seed: int) -> tuple[RobotModel, KinematicSnapshot]:
    """Domain-randomized copies of a model and snapshot.

    Mass and the whole inertia matrix get independent uniform scale factors
    in [0.98, 1.02] (a single positive scalar per matrix keeps it positive
    definite), every Jacobian entry gets its own factor in the same range,
    and each lever arm gets additive uniform noise in [-0.02, 0.02] m per
    axis.  Deterministic for a given seed.
    """
    rng = np.random.default_rng(seed)
    m_scale = rng.uniform(0.98, 1.02)
    i_scale = rng.uniform(0.98, 1.02)
    j_scale = rng.uniform(0.98, 1.02, size=snapshot.j_act.shape)
    r_noise = rng.uniform(-0.02, 0.02, size=snapshot.r.shape)

    rand_model = replace(model, m=model.m * m_scale, inertia=model.inertia * i_scale)
    rand_snap = replace(snapshot, r=snapshot.r + r_noise, j_act=snapshot.j_act * j_scale)
    return rand_model, rand_snap
