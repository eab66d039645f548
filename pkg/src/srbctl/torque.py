"""Motor torque composition: feedforward from the wrench solution, joint PD,
and their hybrid sum.

The feedforward channel compensates the contact-induced joint force and the
bias force, so during stance most of the torque comes from the model rather
than position feedback.  The feedforward term alone is clipped to the motor
limits; the sum is left unclipped here (plant-side saturation, if any, is the
harness's job and is logged there).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .centroidal import CentroidalState, commanded_accel
from .grf import GrfSolution, QpWeights, SolverMode, assemble_cost, solve_grf
from .robot_model import KinematicSnapshot, RobotModel

__all__ = ["PolicyAction", "TorqueBreakdown", "feedforward_torque", "pd_torque",
           "hybrid_torque"]


@dataclass(frozen=True)
class PolicyAction:
    """The policy's four output channels."""

    u_ref: np.ndarray  # (n,) reference torque, N*m
    w: np.ndarray  # (n_contacts,) contact logits
    xdot_cmd: np.ndarray  # (6,) commanded centroidal velocity
    q_cmd: np.ndarray  # (n,) commanded joint positions, rad


@dataclass(frozen=True)
class TorqueBreakdown:
    """Feedforward, PD, and total torque, plus per-joint feedforward clip flags."""

    u_ff: np.ndarray
    u_pd: np.ndarray
    u_total: np.ndarray
    clipped: np.ndarray  # (n,) bool


def feedforward_torque(model: RobotModel, snapshot: KinematicSnapshot,
                       grf: GrfSolution) -> tuple[np.ndarray, np.ndarray]:
    """Feedforward torque -sum_i J_act_i F*_i + h_act, clamped elementwise to
    the motor limits.  Returns (torque, clip flags)."""
    n_c, n, _ = snapshot.j_act.shape
    induced = snapshot.j_act.transpose(1, 0, 2).reshape(n, 6 * n_c) @ grf.f_star
    raw = -induced + snapshot.h_act
    clamped = np.clip(raw, -model.tau_limit, model.tau_limit)
    return clamped, clamped != raw


def pd_torque(model: RobotModel, q_cmd: np.ndarray, q: np.ndarray,
              qdot: np.ndarray, damping_sign: float = -1.0) -> np.ndarray:
    """Joint PD torque kp (q_cmd - q) + damping_sign * kd * qdot.

    The default damping sign is -1 (dissipative).  Passing +1 selects the
    energy-injecting variant for side-by-side comparison.
    """
    return model.kp * (np.asarray(q_cmd) - np.asarray(q)) \
        + damping_sign * model.kd * np.asarray(qdot)


def hybrid_torque(model: RobotModel, snapshot: KinematicSnapshot,
                  action: PolicyAction, state: CentroidalState,
                  weights: QpWeights, k_vel: np.ndarray,
                  mode: SolverMode = SolverMode.FULL,
                  damping_sign: float = -1.0) -> tuple[TorqueBreakdown, GrfSolution]:
    """Full torque pipeline for one controller tick.

    Runs the acceleration command, cost assembly, wrench solve, feedforward
    torque, and PD torque, returning the breakdown plus solver diagnostics.
    In the fixed-schedule modes the caller supplies schedule-derived contact
    logits inside ``action``.  Propagates :class:`ConditioningError` from the
    solve; fallback policy is the caller's decision.
    """
    xdd_cmd = commanded_accel(k_vel, action.xdot_cmd, state.xdot)
    q_mat, c_vec = assemble_cost(model, snapshot, weights, action.u_ref, action.w, mode)
    grf = solve_grf(q_mat, c_vec, model, snapshot, xdd_cmd)
    u_ff, clipped = feedforward_torque(model, snapshot, grf)
    u_pd = pd_torque(model, action.q_cmd, snapshot.q, snapshot.qdot, damping_sign)
    return TorqueBreakdown(u_ff=u_ff, u_pd=u_pd, u_total=u_ff + u_pd,
                           clipped=clipped), grf
