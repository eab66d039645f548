"""Policy observation assembly: per-frame vectors, four-step history
stacking, and additive observation noise."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

__all__ = ["PrivilegedFrame", "ObservationFrame", "NoiseConfig",
           "HISTORY_LEN", "build_observation", "noisy_observation"]

HISTORY_LEN = 4


@dataclass(frozen=True)
class PrivilegedFrame:
    """Critic-only ground truth: reference/current base position and
    orientation, the latter as the first two columns of the rotation matrix
    (6 numbers each)."""

    p_ref: np.ndarray  # (3,)
    p: np.ndarray  # (3,)
    rot_ref: np.ndarray  # (3, 3)
    rot: np.ndarray  # (3, 3)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([
            self.p_ref, self.p,
            self.rot_ref[:, :2].ravel(order="F"),
            self.rot[:, :2].ravel(order="F"),
        ])


@dataclass(frozen=True)
class ObservationFrame:
    """One policy timestep of observations.  Baseline dimension 4n + 6;
    the privileged block adds 18."""

    q_ref: np.ndarray
    qdot_ref: np.ndarray
    base_lin_vel: np.ndarray
    base_ang_vel: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    privileged: Optional[PrivilegedFrame] = None

    def baseline_vector(self) -> np.ndarray:
        return np.concatenate([self.q_ref, self.qdot_ref, self.base_lin_vel,
                               self.base_ang_vel, self.q, self.qdot])


def build_observation(history: Sequence[ObservationFrame],
                      privileged: bool = False) -> np.ndarray:
    """Stack the four most recent frames, oldest first, into one flat vector.

    With ``privileged`` each frame appends its privileged block; frames must
    then carry one.
    """
    if len(history) != HISTORY_LEN:
        raise ValueError(f"expected exactly {HISTORY_LEN} frames, got {len(history)}")
    parts = []
    for frame in history:
        parts.append(frame.baseline_vector())
        if privileged:
            if frame.privileged is None:
                raise ValueError("privileged observation requested but frame has none")
            parts.append(frame.privileged.as_vector())
    return np.concatenate(parts)


@dataclass(frozen=True)
class NoiseConfig:
    """Half-widths of the additive uniform observation noise."""

    base_lin_vel: float = 0.5
    base_ang_vel: float = 0.2
    q: float = 0.02
    qdot: float = 0.5


def noisy_observation(frame: ObservationFrame, seed: int,
                      cfg: NoiseConfig = NoiseConfig()) -> ObservationFrame:
    """Add uniform noise to the measured channels of one frame.

    Only current joint states and base velocities are corrupted; reference
    signals and the privileged block pass through untouched.  Deterministic
    per seed.
    """
    rng = np.random.default_rng(seed)
    return replace(
        frame,
        base_lin_vel=frame.base_lin_vel + rng.uniform(-cfg.base_lin_vel, cfg.base_lin_vel, 3),
        base_ang_vel=frame.base_ang_vel + rng.uniform(-cfg.base_ang_vel, cfg.base_ang_vel, 3),
        q=frame.q + rng.uniform(-cfg.q, cfg.q, frame.q.shape),
        qdot=frame.qdot + rng.uniform(-cfg.qdot, cfg.qdot, frame.qdot.shape),
    )
