"""Single-rigid-body centroidal dynamics and the velocity-tracking
acceleration command.

The robot is lumped into one rigid body: mass at the CoM, constant rotational
inertia, driven purely by contact wrenches.  Linear dynamics are Newton's law
with gravity; angular dynamics take each contact's moment plus the lever-arm
cross product of its force.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .robot_model import KinematicSnapshot, RobotModel

__all__ = [
    "CentroidalState",
    "Wrench",
    "CentroidalAccel",
    "skew",
    "contact_map",
    "stacked_contact_map",
    "centroidal_accel",
    "commanded_accel",
    "gravity_6d",
]


@dataclass(frozen=True)
class CentroidalState:
    """CoM position, body-to-world rotation, and 6-D centroidal velocity
    [linear; angular]."""

    p: np.ndarray  # (3,)
    rot: np.ndarray  # (3, 3)
    xdot: np.ndarray  # (6,)

    def validate(self, tol: float = 1e-9) -> "CentroidalState":
        if not np.allclose(self.rot.T @ self.rot, np.eye(3), atol=tol):
            raise ValueError("rot: not orthonormal")
        if np.linalg.det(self.rot) < 0:
            raise ValueError("rot: not a proper rotation")
        return self


@dataclass(frozen=True)
class Wrench:
    """6-D contact wrench: force (N) and moment (N*m)."""

    lin: np.ndarray
    ang: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.lin, self.ang])


@dataclass(frozen=True)
class CentroidalAccel:
    """6-D centroidal acceleration: linear (m/s^2) and angular (rad/s^2)."""

    lin: np.ndarray
    ang: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.lin, self.ang])

    @staticmethod
    def from_vector(v: np.ndarray) -> "CentroidalAccel":
        v = np.asarray(v, dtype=float)
        return CentroidalAccel(lin=v[0:3].copy(), ang=v[3:6].copy())


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(v) @ u == cross(v, u)."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def gravity_6d(model: RobotModel) -> np.ndarray:
    """Gravity as a 6-vector [g; 0] in acceleration space."""
    return np.concatenate([model.g_vec, np.zeros(3)])


def _inv3(a: np.ndarray) -> np.ndarray:
    """Closed-form 3x3 inverse; avoids LAPACK overhead in the 500 Hz path."""
    (a00, a01, a02), (a10, a11, a12), (a20, a21, a22) = a
    c00 = a11 * a22 - a12 * a21
    c01 = a02 * a21 - a01 * a22
    c02 = a01 * a12 - a02 * a11
    det = a00 * c00 + a10 * c01 + a20 * c02
    return np.array([
        [c00, c01, c02],
        [a12 * a20 - a10 * a22, a00 * a22 - a02 * a20, a02 * a10 - a00 * a12],
        [a10 * a21 - a11 * a20, a01 * a20 - a00 * a21, a00 * a11 - a01 * a10],
    ]) / det


def contact_map(model: RobotModel, r: np.ndarray) -> np.ndarray:
    """6x6 map from one contact wrench to centroidal acceleration.

    Block form [[(1/m) I, 0], [I_c^-1 [r]x, I_c^-1]]: a force accelerates the
    CoM directly, and contributes a moment through its lever arm ``r``.
    """
    inv_inertia = _inv3(model.inertia)
    a = np.zeros((6, 6))
    a[0:3, 0:3] = np.eye(3) / model.m
    a[3:6, 0:3] = inv_inertia @ skew(r)
    a[3:6, 3:6] = inv_inertia
    return a


def stacked_contact_map(model: RobotModel, snapshot: KinematicSnapshot) -> np.ndarray:
    """Horizontal stack of per-contact maps: 6 x 6*n_contacts."""
    inv_inertia = _inv3(model.inertia)
    n_c = model.n_contacts
    a = np.zeros((6, 6 * n_c))
    eye_m = np.eye(3) / model.m
    for i in range(n_c):
        a[0:3, 6 * i:6 * i + 3] = eye_m
        a[3:6, 6 * i:6 * i + 3] = inv_inertia @ skew(snapshot.r[i])
        a[3:6, 6 * i + 3:6 * i + 6] = inv_inertia
    return a


def centroidal_accel(model: RobotModel, snapshot: KinematicSnapshot,
                     f_stacked: np.ndarray) -> CentroidalAccel:
    """Centroidal acceleration under gravity and stacked contact wrenches."""
    f_stacked = np.asarray(f_stacked, dtype=float)
    if f_stacked.shape != (6 * model.n_contacts,):
        raise ValueError(f"expected stacked wrench of length {6 * model.n_contacts}")
    a = stacked_contact_map(model, snapshot)
    return CentroidalAccel.from_vector(gravity_6d(model) + a @ f_stacked)


def commanded_accel(k_vel: np.ndarray, xdot_cmd: np.ndarray,
                    xdot: np.ndarray) -> CentroidalAccel:
    """Velocity-tracking acceleration command: K_vel (xdot_cmd - xdot).

    ``k_vel`` may be a length-6 diagonal or a 6x6 matrix.  The angular error
    is a plain difference of angular velocities; there is no orientation
    feedback term.
    """
    k_vel = np.asarray(k_vel, dtype=float)
    err = np.asarray(xdot_cmd, dtype=float) - np.asarray(xdot, dtype=float)
    out = k_vel * err if k_vel.ndim == 1 else k_vel @ err
    return CentroidalAccel.from_vector(out)
