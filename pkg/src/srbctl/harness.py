"""Desk-scale rollout simulator.

The plant is the single rigid body itself: wrenches in, centroidal motion
out.  Joint torques are still computed and logged every controller tick so
the full torque pipeline is exercised, but they do not drive the plant; joint
positions follow the scripted commands through a first-order lag (swing
trajectories are prescribed, not simulated).

Two wrench-application modes:

* ``ideal`` applies the solver's optimal wrench directly for every surface
  whose simulated contact flag is true.  Used for tracking experiments.
* ``compliant`` generates forces from a spring-damper ground model with a
  friction clamp, deliberately decoupled from the solver's estimate.  Used
  for reward experiments.

Scripted action sources stand in for a trained policy; they run at the action
rate and are held constant between boundaries while the controller runs every
tick.
"""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.transform import Rotation

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .centroidal import CentroidalAccel, CentroidalState, centroidal_accel
from .grf import ConditioningError, QpWeights, SolverMode, fixed_contact_states
from .rewards import (RewardConfig, centroidal_accel_kernels,
                      reward_contact_state, reward_grf, reward_torque_limit)
from .robot_model import (KinematicSnapshot, RobotModel, load_model,
                          toy_biped_ik, toy_biped_snapshot)
from .torque import PolicyAction, TorqueBreakdown, hybrid_torque, pd_torque

__all__ = [
    "GroundConfig", "Push", "Scenario", "RolloutLog", "ScenarioError",
    "PD_ONLY", "step_srb", "simulated_contact", "scripted_actions",
    "run_rollout", "load_scenario", "DEFAULT_K_VEL", "FCS_HEIGHT_THRESHOLD",
]

# Controller mode string used alongside the SolverMode variants.
PD_ONLY = "pd_only"

DEFAULT_K_VEL = np.array([5.0, 5.0, 5.0, 10.0, 10.0, 10.0])
FCS_HEIGHT_THRESHOLD = 0.007  # m, fixed-schedule contact clearance

# First-order lag with which prescribed joints track their commands (s).
JOINT_TRACK_TAU = 0.02


class ScenarioError(ValueError):
    """Scenario file is malformed or inconsistent."""


@dataclass(frozen=True)
class GroundConfig:
    stiffness: float = 1e5  # N/m
    damping: float = 1e3  # N*s/m
    friction: float = 0.7
    # Effective lever (m) bounding transmitted contact moment to
    # moment_coeff * normal force; keeps single support controllable.
    moment_coeff: float = 0.15


@dataclass(frozen=True)
class Push:
    time: float  # s
    delta_v: np.ndarray  # (3,) m/s, added to linear velocity impulsively


@dataclass(frozen=True)
class Scenario:
    model_path: str
    duration: float = 5.0
    controller_hz: int = 500
    action_hz: int = 50
    mode: "SolverMode | str" = SolverMode.FULL
    wrench_mode: str = "ideal"  # ideal | compliant
    source_name: str = "stand"
    source_params: dict = field(default_factory=dict)
    ground: GroundConfig = GroundConfig()
    pushes: tuple[Push, ...] = ()
    seed: int = 0
    randomize: bool = False
    k_vel: np.ndarray = field(default_factory=lambda: DEFAULT_K_VEL.copy())
    qp_weights: QpWeights = QpWeights()
    rewards: RewardConfig = RewardConfig()
    fcs_threshold: float = FCS_HEIGHT_THRESHOLD
    # Time shift (s) applied to the reference schedule in fixed-schedule
    # modes, for schedule-robustness experiments.
    schedule_offset: float = 0.0

    def validate(self) -> "Scenario":
        if self.duration <= 0:
            raise ScenarioError("duration must be > 0")
        if self.controller_hz % self.action_hz != 0:
            raise ScenarioError("controller rate must be divisible by action rate")
        if self.wrench_mode not in ("ideal", "compliant"):
            raise ScenarioError(f"unknown wrench_mode {self.wrench_mode!r}")
        if not (isinstance(self.mode, SolverMode) or self.mode == PD_ONLY):
            raise ScenarioError(f"unknown mode {self.mode!r}")
        return self


@dataclass
class RolloutLog:
    """Time-indexed record of one rollout at the controller rate.

    Reward columns are [grf, contact_state, torque_limit, accel_lin,
    accel_ang].
    """

    t: np.ndarray  # (T,)
    p: np.ndarray  # (T, 3)
    rot: np.ndarray  # (T, 3, 3)
    xdot: np.ndarray  # (T, 6)
    u_ref: np.ndarray  # (T, n)
    q_cmd: np.ndarray  # (T, n)
    xdot_cmd: np.ndarray  # (T, 6)
    w: np.ndarray  # (T, E)
    f_star: np.ndarray  # (T, 6E)
    f_sim: np.ndarray  # (T, 6E)
    u_ff: np.ndarray  # (T, n)
    u_pd: np.ndarray  # (T, n)
    u_total: np.ndarray  # (T, n)
    rewards: np.ndarray  # (T, 5)
    contact: np.ndarray  # (T, E) bool
    fallback: np.ndarray  # (T,) bool
    clip_count: np.ndarray  # (T,) int
    mode: str = "full"
    seed: int = 0
    scenario_hash: str = ""

    def __len__(self) -> int:
        return len(self.t)

    def write_csv(self, path) -> None:
        """One row per controller tick; full-precision, byte-stable output."""
        n = self.u_ff.shape[1]
        n_e = self.w.shape[1]
        cols = (["time"]
                + [f"p_{ax}" for ax in "xyz"]
                + [f"rotvec_{ax}" for ax in "xyz"]
                + [f"xdot_{i}" for i in range(6)]
                + [f"u_ref_{j}" for j in range(n)]
                + [f"q_cmd_{j}" for j in range(n)]
                + [f"xdot_cmd_{i}" for i in range(6)]
                + [f"w_{i}" for i in range(n_e)]
                + [f"f_star_{i}" for i in range(6 * n_e)]
                + [f"f_sim_{i}" for i in range(6 * n_e)]
                + [f"u_ff_{j}" for j in range(n)]
                + [f"u_pd_{j}" for j in range(n)]
                + [f"u_total_{j}" for j in range(n)]
                + ["r_grf", "r_contact", "r_torque_limit", "r_accel_lin", "r_accel_ang"]
                + [f"contact_{i}" for i in range(n_e)]
                + ["fallback", "clip_count"])
        rotvec = Rotation.from_matrix(self.rot).as_rotvec()
        with open(path, "w", newline="") as fh:
            fh.write(",".join(cols) + "\n")
            for k in range(len(self)):
                row = np.concatenate([
                    [self.t[k]], self.p[k], rotvec[k], self.xdot[k],
                    self.u_ref[k], self.q_cmd[k], self.xdot_cmd[k], self.w[k],
                    self.f_star[k], self.f_sim[k],
                    self.u_ff[k], self.u_pd[k], self.u_total[k],
                    self.rewards[k],
                    self.contact[k].astype(float),
                    [float(self.fallback[k]), float(self.clip_count[k])],
                ])
                fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def step_srb(state: CentroidalState, f_stacked: np.ndarray, model: RobotModel,
             snapshot: KinematicSnapshot, dt: float) -> CentroidalState:
    """Semi-implicit Euler step of the single-rigid-body plant.

    Velocity first (from the centroidal acceleration under the applied
    wrenches), then position, then attitude through the rotation exponential
    of the body angular velocity; the rotation is re-orthonormalized every
    step.
    """
    if not 0.0 < dt <= 0.01:
        raise ValueError("dt must lie in (0, 0.01]")
    xdd = centroidal_accel(model, snapshot, f_stacked).as_vector()
    xdot = state.xdot + xdd * dt
    p = state.p + xdot[0:3] * dt
    rot = state.rot @ Rotation.from_rotvec(xdot[3:6] * dt).as_matrix()
    u_m, _, vt = np.linalg.svd(rot)
    return CentroidalState(p=p, rot=u_m @ vt, xdot=xdot)


def simulated_contact(foot_height: float, foot_vel_z: float,
                      ground: GroundConfig,
                      f_tangential_requested: np.ndarray,
                      f_moment_requested: np.ndarray | None = None,
                      ) -> tuple[bool, np.ndarray]:
    """Spring-damper ground reaction for one surface.

    Contact when the surface height is at or below the ground.  Normal force
    is the non-negative spring-damper value; requested tangential force is
    clamped by Coulomb friction, and requested moment by an effective-lever
    bound.  Returns (contact flag, 6-vector wrench).
    """
    wrench = np.zeros(6)
    contact = foot_height <= 0.0
    if not contact:
        return False, wrench
    normal = max(0.0, -ground.stiffness * foot_height - ground.damping * foot_vel_z)
    bound = ground.friction * normal
    wrench[0:2] = np.clip(f_tangential_requested, -bound, bound)
    wrench[2] = normal
    if f_moment_requested is not None:
        m_bound = ground.moment_coeff * normal
        wrench[3:6] = np.clip(f_moment_requested, -m_bound, m_bound)
    return True, wrench


# ---------------------------------------------------------------------------
# Scripted action sources


class _ActionScript:
    """Deterministic stand-in for a trained policy.

    ``ref_foot_heights(t)`` exposes the script's planned foot clearance, used
    both for fixed-schedule contact logits and as the nominal plan a real
    schedule would be derived from.
    """

    W_STANCE = 3.0
    W_RELEASE = -10.0

    def __init__(self, model: RobotModel, params: dict):
        if model.toy is None:
            raise ScenarioError("scripted sources require a model with toy kinematics")
        self.model = model
        self.toy = model.toy
        self.params = dict(params)
        stance_bend = self.params.get("stance_bend", 0.3)
        self.d0 = (self.toy.thigh_len + self.toy.shank_len) * np.cos(stance_bend)
        self.q0 = self._leg_q(0.0, 0.0)

    def _leg_q(self, lift_left: float, lift_right: float) -> np.ndarray:
        q = np.zeros(self.model.n)
        q[0], q[1] = toy_biped_ik(self.toy, self.d0 - lift_left)
        q[5], q[6] = toy_biped_ik(self.toy, self.d0 - lift_right)
        return q

    def stand_height(self) -> float:
        """Initial CoM height placing both feet on the ground."""
        return self.d0

    def ref_foot_heights(self, t: float) -> np.ndarray:
        return np.zeros(2)

    def action(self, t: float, state: CentroidalState) -> PolicyAction:
        raise NotImplementedError


class _Stand(_ActionScript):
    def action(self, t, state):
        return PolicyAction(u_ref=np.zeros(self.model.n),
                            w=np.array([self.W_STANCE, self.W_STANCE]),
                            xdot_cmd=np.zeros(6), q_cmd=self.q0)


class _WeightShift(_ActionScript):
    """Feet stay planted; contact logits trade sinusoidally between feet."""

    def action(self, t, state):
        period = self.params.get("period", 2.0)
        amp = self.params.get("amplitude", 3.0)
        c = amp * np.cos(2.0 * np.pi * t / period)
        return PolicyAction(u_ref=np.zeros(self.model.n),
                            w=np.array([c, -c]),
                            xdot_cmd=np.zeros(6), q_cmd=self.q0)


class _StepInPlace(_ActionScript):
    """Alternating single support with a sinusoidal swing-foot lift."""

    def _lifts(self, t: float) -> np.ndarray:
        period = self.params.get("period", 0.6)
        h_lift = self.params.get("lift", 0.05)
        half = 0.5 * period
        k = int(np.floor(t / half))
        frac = (t - k * half) / half
        lift = h_lift * np.sin(np.pi * frac)
        out = np.zeros(2)
        out[k % 2] = lift
        return out

    def ref_foot_heights(self, t):
        return self._lifts(t)

    def action(self, t, state):
        lifts = self._lifts(t)
        w = np.where(lifts < FCS_HEIGHT_THRESHOLD, self.W_STANCE, self.W_RELEASE)
        return PolicyAction(u_ref=np.zeros(self.model.n), w=w.astype(float),
                            xdot_cmd=np.zeros(6),
                            q_cmd=self._leg_q(lifts[0], lifts[1]))


class _Hop(_ActionScript):
    """Vertical velocity pulse, then both feet tucked for a flight window."""

    def _phase(self, t: float) -> tuple[str, float]:
        period = self.params.get("period", 1.0)
        t_push = self.params.get("push_window", 0.15)
        t_flight = self.params.get("flight_window", 0.3)
        ph = t % period
        if ph < t_push:
            return "push", ph
        if ph < t_push + t_flight:
            return "flight", ph - t_push
        return "stance", ph

    def ref_foot_heights(self, t):
        phase, _ = self._phase(t)
        tuck = self.params.get("tuck", 0.08)
        return np.full(2, tuck) if phase == "flight" else np.zeros(2)

    def action(self, t, state):
        phase, _ = self._phase(t)
        v_up = self.params.get("takeoff_speed", 0.8)
        if phase == "flight":
            tuck = self.params.get("tuck", 0.08)
            return PolicyAction(u_ref=np.zeros(self.model.n),
                                w=np.array([self.W_RELEASE, self.W_RELEASE]),
                                xdot_cmd=np.zeros(6),
                                q_cmd=self._leg_q(tuck, tuck))
        xdot_cmd = np.zeros(6)
        if phase == "push":
            xdot_cmd[2] = v_up
        return PolicyAction(u_ref=np.zeros(self.model.n),
                            w=np.array([self.W_STANCE, self.W_STANCE]),
                            xdot_cmd=xdot_cmd, q_cmd=self.q0)


_SOURCES = {
    "stand": _Stand,
    "weight_shift": _WeightShift,
    "step_in_place": _StepInPlace,
    "hop": _Hop,
}


def _make_script(name: str, model: RobotModel, params: dict) -> _ActionScript:
    try:
        cls = _SOURCES[name]
    except KeyError:
        raise ScenarioError(
            f"unknown action source {name!r}; choose from {sorted(_SOURCES)}") from None
    return cls(model, params)


def scripted_actions(name: str, params: dict, t: float, state: CentroidalState,
                     model: RobotModel) -> PolicyAction:
    """Evaluate one scripted action stream at time ``t``."""
    return _make_script(name, model, params).action(t, state)


# ---------------------------------------------------------------------------
# Rollout


def _rollout_randomization(model, snapshot, seed):
    """Per-rollout controller-side randomization factors, held fixed for the
    whole episode.  Same distributions as randomize_model."""
    rng = np.random.default_rng(seed)
    return (rng.uniform(0.98, 1.02), rng.uniform(0.98, 1.02),
            rng.uniform(0.98, 1.02, size=snapshot.j_act.shape),
            rng.uniform(-0.02, 0.02, size=snapshot.r.shape))


def run_rollout(scenario: Scenario, model: RobotModel | None = None) -> RolloutLog:
    """Simulate one episode and return its log.

    The controller sees the (optionally randomized) model; the plant always
    uses the true one.  On a solver conditioning failure the tick falls back
    to PD-only torque with zero solved wrench and is flagged in the log.
    """
    scenario.validate()
    if model is None:
        model = load_model(scenario.model_path)
    script = _make_script(scenario.source_name, model, scenario.source_params)

    dt = 1.0 / scenario.controller_hz
    n_ticks = int(round(scenario.duration * scenario.controller_hz))
    hold = scenario.controller_hz // scenario.action_hz
    n, n_e = model.n, model.n_contacts
    pd_only = scenario.mode == PD_ONLY
    # The PD-only baseline has no wrench estimate to apply, so its plant
    # always runs on the compliant ground.
    wrench_mode = "compliant" if pd_only else scenario.wrench_mode
    solver_mode = scenario.mode if not pd_only else SolverMode.FULL

    q = script.q0.copy()
    qdot = np.zeros(n)
    snapshot = toy_biped_snapshot(model.toy, q, qdot)
    state = CentroidalState(p=np.array([0.0, 0.0, script.stand_height()]),
                            rot=np.eye(3), xdot=np.zeros(6))
    if scenario.randomize:
        m_s, i_s, j_s, r_n = _rollout_randomization(model, snapshot, scenario.seed)
    push_ticks = {int(round(push.time * scenario.controller_hz)): np.asarray(push.delta_v, float)
                  for push in scenario.pushes}

    log = RolloutLog(
        t=np.zeros(n_ticks), p=np.zeros((n_ticks, 3)), rot=np.zeros((n_ticks, 3, 3)),
        xdot=np.zeros((n_ticks, 6)), u_ref=np.zeros((n_ticks, n)),
        q_cmd=np.zeros((n_ticks, n)), xdot_cmd=np.zeros((n_ticks, 6)),
        w=np.zeros((n_ticks, n_e)), f_star=np.zeros((n_ticks, 6 * n_e)),
        f_sim=np.zeros((n_ticks, 6 * n_e)), u_ff=np.zeros((n_ticks, n)),
        u_pd=np.zeros((n_ticks, n)), u_total=np.zeros((n_ticks, n)),
        rewards=np.zeros((n_ticks, 5)), contact=np.zeros((n_ticks, n_e), bool),
        fallback=np.zeros(n_ticks, bool), clip_count=np.zeros(n_ticks, int),
        mode=scenario.mode.value if isinstance(scenario.mode, SolverMode) else scenario.mode,
        seed=scenario.seed, scenario_hash=scenario_hash(scenario),
    )

    action = None
    for k in range(n_ticks):
        t = k * dt
        if k in push_ticks:
            xdot = state.xdot.copy()
            xdot[0:3] += push_ticks[k]
            state = replace(state, xdot=xdot)

        if k % hold == 0:
            action = script.action(t, state)
            if solver_mode in (SolverMode.FIXED_SCHEDULE,
                               SolverMode.FIXED_SCHEDULE_NO_REF_COST) and not pd_only:
                heights = script.ref_foot_heights(t + scenario.schedule_offset)
                action = replace(action, w=fixed_contact_states(heights,
                                                                scenario.fcs_threshold))

        # Prescribed joints track their commands through a first-order lag.
        q_new = q + (action.q_cmd - q) * (dt / JOINT_TRACK_TAU)
        qdot = (q_new - q) / dt
        q = q_new
        snapshot = toy_biped_snapshot(model.toy, q, qdot)

        ctrl_model, ctrl_snap = model, snapshot
        if scenario.randomize:
            ctrl_model = replace(model, m=model.m * m_s, inertia=model.inertia * i_s)
            ctrl_snap = replace(snapshot, r=snapshot.r + r_n, j_act=snapshot.j_act * j_s)

        fallback = False
        if pd_only:
            f_star = np.zeros(6 * n_e)
            u_pd = pd_torque(model, action.q_cmd, q, qdot)
            breakdown = TorqueBreakdown(u_ff=np.zeros(n), u_pd=u_pd, u_total=u_pd,
                                        clipped=np.zeros(n, bool))
        else:
            try:
                breakdown, grf = hybrid_torque(ctrl_model, ctrl_snap, action, state,
                                               scenario.qp_weights, scenario.k_vel,
                                               mode=solver_mode)
                f_star = grf.f_star
            except ConditioningError:
                fallback = True
                f_star = np.zeros(6 * n_e)
                u_pd = pd_torque(model, action.q_cmd, q, qdot)
                breakdown = TorqueBreakdown(u_ff=np.zeros(n), u_pd=u_pd, u_total=u_pd,
                                            clipped=np.zeros(n, bool))

        # Ground interaction from the true kinematics.
        foot_heights = state.p[2] + snapshot.r[:, 2]
        f_sim = np.zeros(6 * n_e)
        contact = np.zeros(n_e, bool)
        for i in range(n_e):
            contact[i], wrench = simulated_contact(
                foot_heights[i], state.xdot[2], scenario.ground,
                f_star[6 * i:6 * i + 2], f_star[6 * i + 3:6 * i + 6])
            f_sim[6 * i:6 * i + 6] = wrench

        if wrench_mode == "ideal":
            applied = np.where(np.repeat(contact, 6), f_star, 0.0)
            f_sim = applied
        else:
            applied = f_sim

        xdd_cmd = CentroidalAccel.from_vector(
            scenario.k_vel * (action.xdot_cmd - state.xdot))
        xdd_sim = centroidal_accel(model, snapshot, applied)
        cfg = scenario.rewards
        lin_k, ang_k = centroidal_accel_kernels(xdd_cmd, xdd_sim, cfg)
        log.rewards[k] = (
            reward_grf(f_sim, f_star, cfg),
            reward_contact_state(contact, action.w, cfg),
            reward_torque_limit(breakdown.u_ff, model, cfg),
            lin_k, ang_k,
        )

        log.t[k] = t
        log.p[k] = state.p
        log.rot[k] = state.rot
        log.xdot[k] = state.xdot
        log.u_ref[k] = action.u_ref
        log.q_cmd[k] = action.q_cmd
        log.xdot_cmd[k] = action.xdot_cmd
        log.w[k] = action.w
        log.f_star[k] = f_star
        log.f_sim[k] = f_sim
        log.u_ff[k] = breakdown.u_ff
        log.u_pd[k] = breakdown.u_pd
        log.u_total[k] = breakdown.u_total
        log.contact[k] = contact
        log.fallback[k] = fallback
        log.clip_count[k] = int(np.count_nonzero(breakdown.clipped))

        state = step_srb(state, applied, model, snapshot, dt)

    return log


# ---------------------------------------------------------------------------
# Scenario files

_SCN_KEYS = {"model", "duration", "controller_hz", "action_hz", "mode",
             "wrench_mode", "seed", "randomize", "schedule_offset",
             "fcs_threshold", "action_source", "ground", "push", "gains",
             "rewards"}


def scenario_hash(scenario: Scenario) -> str:
    parts = [scenario.model_path, scenario.duration, scenario.controller_hz,
             scenario.action_hz, str(scenario.mode), scenario.wrench_mode,
             scenario.source_name, sorted(scenario.source_params.items()),
             scenario.ground, [(p.time, tuple(p.delta_v)) for p in scenario.pushes],
             scenario.seed, scenario.randomize, tuple(scenario.k_vel),
             scenario.schedule_offset]
    return hashlib.sha256(repr(parts).encode()).hexdigest()[:16]


def _parse_mode(raw: str):
    if raw == PD_ONLY:
        return PD_ONLY
    try:
        return SolverMode(raw)
    except ValueError:
        raise ScenarioError(
            f"unknown mode {raw!r}; choose from "
            f"{[m.value for m in SolverMode] + [PD_ONLY]}") from None


def load_scenario(path) -> Scenario:
    """Load a scenario file (TOML).  Unknown keys are rejected."""
    with open(path, "rb") as f:
        try:
            raw = tomllib.load(f)
        except tomllib.TOMLDecodeError as exc:
            raise ScenarioError(f"{path}: {exc}") from exc
    unknown = set(raw) - _SCN_KEYS
    if unknown:
        raise ScenarioError(f"{path}: unknown keys {sorted(unknown)}")
    if "model" not in raw:
        raise ScenarioError(f"{path}: missing 'model'")

    source = raw.get("action_source", {"name": "stand"})
    ground_raw = raw.get("ground", {})
    gains = raw.get("gains", {})
    rewards_raw = raw.get("rewards", {})
    k_vel = DEFAULT_K_VEL.copy()
    if "k_vel_lin" in gains:
        k_vel[0:3] = gains["k_vel_lin"]
    if "k_vel_ang" in gains:
        k_vel[3:6] = gains["k_vel_ang"]
    weights = QpWeights(k_tau=gains.get("k_tau", 100.0),
                        k_lin=gains.get("k_lin", 1e-3),
                        k_ang=gains.get("k_ang", 0.02)).validate()

    try:
        ground = GroundConfig(**ground_raw)
        rewards = RewardConfig(**rewards_raw).validate()
    except TypeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc

    scenario = Scenario(
        model_path=raw["model"],
        duration=float(raw.get("duration", 5.0)),
        controller_hz=int(raw.get("controller_hz", 500)),
        action_hz=int(raw.get("action_hz", 50)),
        mode=_parse_mode(raw.get("mode", "full")),
        wrench_mode=raw.get("wrench_mode", "ideal"),
        source_name=source.get("name", "stand"),
        source_params={k: v for k, v in source.items() if k != "name"},
        ground=ground,
        pushes=tuple(Push(time=float(p["time"]),
                          delta_v=np.asarray(p["delta_v"], float))
                     for p in raw.get("push", [])),
        seed=int(raw.get("seed", 0)),
        randomize=bool(raw.get("randomize", False)),
        fcs_threshold=float(raw.get("fcs_threshold", FCS_HEIGHT_THRESHOLD)),
        schedule_offset=float(raw.get("schedule_offset", 0.0)),
        k_vel=k_vel,
        qp_weights=weights,
        rewards=rewards,
    )
    return scenario.validate()
