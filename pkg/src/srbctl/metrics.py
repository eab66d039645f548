"""Tracking-error metrics between an evaluation rollout and a reference
rollout: final/mean base position error, mean orientation error, and RMS
linear/angular velocity errors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harness import RolloutLog

__all__ = ["TrackingMetrics", "compute_metrics"]


@dataclass(frozen=True)
class TrackingMetrics:
    final_pos_err: float  # m
    mean_pos_err: float  # m
    mean_orient_err: float  # rad
    vel_rms_err: float  # m/s
    ang_vel_rms_err: float  # rad/s

    NAMES = ("final_pos_err", "mean_pos_err", "mean_orient_err",
             "vel_rms_err", "ang_vel_rms_err")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in self.NAMES)


def _geodesic_angle(rot_ref: np.ndarray, rot_eval: np.ndarray) -> np.ndarray:
    """Rotation angle of R_ref^T R_eval per tick, batched.

    Uses atan2 of the skew-part norm (sin) against the trace (cos): well
    conditioned at all angles, and exactly zero for identical inputs (where
    R^T R is bitwise symmetric).
    """
    rel = np.einsum("tij,tik->tjk", rot_ref, rot_eval)
    trace = np.einsum("tii->t", rel)
    skew = 0.5 * (rel - rel.transpose(0, 2, 1))
    sin = np.sqrt(skew[:, 2, 1] ** 2 + skew[:, 0, 2] ** 2 + skew[:, 1, 0] ** 2)
    return np.arctan2(sin, 0.5 * (trace - 1.0))


def compute_metrics(eval_log: RolloutLog, ref_log: RolloutLog) -> TrackingMetrics:
    """Five tracking metrics of an evaluation rollout against a reference.

    Both logs must share duration and rate (tick-for-tick comparison).
    """
    if len(eval_log) != len(ref_log):
        raise ValueError("logs differ in length; same duration and rate required")
    pos_err = np.linalg.norm(eval_log.p - ref_log.p, axis=1)
    orient_err = _geodesic_angle(ref_log.rot, eval_log.rot)
    vel_err = np.linalg.norm(eval_log.xdot[:, 0:3] - ref_log.xdot[:, 0:3], axis=1)
    ang_err = np.linalg.norm(eval_log.xdot[:, 3:6] - ref_log.xdot[:, 3:6], axis=1)
    return TrackingMetrics(
        final_pos_err=float(pos_err[-1]),
        mean_pos_err=float(pos_err.mean()),
        mean_orient_err=float(orient_err.mean()),
        vel_rms_err=float(np.sqrt(np.mean(vel_err ** 2))),
        ang_vel_rms_err=float(np.sqrt(np.mean(ang_err ** 2))),
    )
