"""Physics-informed reward terms and the generic exponential tracking kernel.

Four terms grade how consistently a policy uses the centroidal controller:
wrench agreement between the solver and the simulator, contact-logit
agreement with true contact, soft-limit excess of the feedforward torque, and
centroidal-acceleration tracking.  Exponential terms live in (0, 1] and hit 1
only at zero error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .centroidal import CentroidalAccel
from .robot_model import RobotModel

__all__ = ["RewardConfig", "tracking_kernel", "reward_grf",
           "reward_contact_state", "reward_torque_limit",
           "centroidal_accel_kernels", "reward_centroidal_accel"]

DEFAULT_WEIGHTS = {
    "grf": 0.15,
    "contact_state": 0.5,
    "torque_limit": 0.1,
    "accel_lin": 0.1,
    "accel_ang": 0.1,
}


@dataclass(frozen=True)
class RewardConfig:
    """Sensitivities and weights for the reward terms.

    ``alpha`` is the soft-limit fraction of the motor torque limit;
    ``w_sim_logit`` is the logit magnitude used to encode the simulator's
    boolean contact state (sigmoid(4) ~ 0.982, near-saturated but with a
    finite gradient).
    """

    sigma_grf: float = 100.0
    sigma_acc_lin: float = 6.0
    sigma_acc_ang: float = 12.0
    alpha: float = 0.9
    w_sim_logit: float = 4.0
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def validate(self) -> "RewardConfig":
        if min(self.sigma_grf, self.sigma_acc_lin, self.sigma_acc_ang) <= 0:
            raise ValueError("sensitivities must be > 0")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        return self


def tracking_kernel(error_sq: float, sigma: float) -> float:
    """exp(-error_sq / sigma^2): 1 at zero error, e^-1 at error_sq = sigma^2."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    return float(np.exp(-error_sq / (sigma * sigma)))


def reward_grf(f_sim: np.ndarray, f_star: np.ndarray, cfg: RewardConfig) -> float:
    """Exponential kernel over the total squared wrench mismatch between the
    simulated and solver-estimated stacked wrenches."""
    err_sq = float(np.sum(np.square(np.asarray(f_sim) - np.asarray(f_star))))
    return tracking_kernel(err_sq, cfg.sigma_grf)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))


def reward_contact_state(contact_sim: np.ndarray, w: np.ndarray,
                         cfg: RewardConfig) -> float:
    """Penalty for contact logits deviating from true contact, in
    [-n_contacts, 0].  True booleans are encoded as +/- ``w_sim_logit``."""
    w_sim = np.where(np.asarray(contact_sim, dtype=bool),
                     cfg.w_sim_logit, -cfg.w_sim_logit)
    return float(-np.sum(np.square(_sigmoid(w_sim) - _sigmoid(w))))


def reward_torque_limit(u_ff: np.ndarray, model: RobotModel, cfg: RewardConfig,
                        magnitude: bool = True) -> float:
    """Penalty for feedforward torque beyond the soft limit alpha*tau_limit.

    The default penalizes |u_ff| excess (symmetric actuators).  With
    ``magnitude=False`` only positive excess u_ff - alpha*tau_limit counts.
    """
    u = np.abs(np.asarray(u_ff, dtype=float)) if magnitude else np.asarray(u_ff, dtype=float)
    return float(-np.sum(np.maximum(0.0, u - cfg.alpha * model.tau_limit)))


def centroidal_accel_kernels(xdd_cmd: CentroidalAccel, xdd_sim: CentroidalAccel,
                             cfg: RewardConfig) -> tuple[float, float]:
    """Separate linear and angular acceleration-tracking kernels."""
    lin = tracking_kernel(float(np.sum(np.square(xdd_cmd.lin - xdd_sim.lin))),
                          cfg.sigma_acc_lin)
    ang = tracking_kernel(float(np.sum(np.square(xdd_cmd.ang - xdd_sim.ang))),
                          cfg.sigma_acc_ang)
    return lin, ang


def reward_centroidal_accel(xdd_cmd: CentroidalAccel, xdd_sim: CentroidalAccel,
                            cfg: RewardConfig) -> float:
    """Combined acceleration-tracking reward: the equal-weight average of the
    linear and angular kernels (the two carry equal weight in the defaults)."""
    lin, ang = centroidal_accel_kernels(xdd_cmd, xdd_sim, cfg)
    return 0.5 * (lin + ang)
