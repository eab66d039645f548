"""Embedded invariant suite: fast self-checks runnable from the CLI.

Each check is a named function returning (passed, detail).  The suite
cross-validates the closed-form wrench solve against an independent KKT
solve, checks the gravity identities and the contact-release behavior,
bounds the reward terms, and cross-checks the tracking metrics against a
brute-force accumulation.
"""

from __future__ import annotations

import numpy as np

from .centroidal import CentroidalAccel, gravity_6d, stacked_contact_map
from .grf import QpWeights, SolverMode, assemble_cost, solve_grf, solve_grf_kkt
from .harness import RolloutLog
from .metrics import compute_metrics
from .rewards import (RewardConfig, reward_contact_state, reward_grf,
                      reward_torque_limit, tracking_kernel)
from .robot_model import (ContactSurfaceId, KinematicSnapshot, RobotModel,
                          toy_biped_model, toy_biped_snapshot)
from .torque import feedforward_torque

__all__ = ["random_instance", "run_checks", "CHECKS"]


def random_instance(rng: np.random.Generator, n_contacts: int | None = None,
                    n_joints: int | None = None):
    """Random consistent (model, snapshot, weights, u_ref, w, xdd_cmd) tuple
    with an SPD inertia, for solver cross-validation."""
    n_c = n_contacts if n_contacts is not None else int(rng.integers(1, 3))
    n = n_joints if n_joints is not None else int(rng.integers(4, 13))
    a = rng.normal(size=(3, 3))
    model = RobotModel(
        m=float(rng.uniform(10.0, 60.0)),
        inertia=a @ a.T + 0.5 * np.eye(3),
        g_vec=np.array([0.0, 0.0, -9.81]),
        n=n,
        tau_limit=rng.uniform(20.0, 80.0, n),
        contacts=tuple(ContactSurfaceId(i, f"c{i}") for i in range(n_c)),
        kp=np.full(n, 50.0),
        kd=np.full(n, 2.0),
    ).validate()
    snapshot = KinematicSnapshot(
        r=rng.uniform(-0.3, 0.3, (n_c, 3)),
        j_act=rng.normal(scale=0.3, size=(n_c, n, 6)),
        h_act=rng.normal(scale=5.0, size=n),
        q=rng.uniform(-1.0, 1.0, n),
        qdot=rng.uniform(-2.0, 2.0, n),
    )
    weights = QpWeights()
    u_ref = rng.normal(scale=10.0, size=n)
    w = rng.uniform(-3.0, 3.0, n_c)
    xdd_cmd = CentroidalAccel.from_vector(rng.normal(scale=2.0, size=6))
    return model, snapshot, weights, u_ref, w, xdd_cmd


def _standing_instance():
    """Toy biped in symmetric stance, zero velocity, zero commands."""
    model = toy_biped_model()
    alpha = 0.3
    q = np.zeros(model.n)
    q[0], q[5] = alpha, alpha
    q[1], q[6] = -2 * alpha, -2 * alpha
    snapshot = toy_biped_snapshot(model.toy, q, np.zeros(model.n))
    return model, snapshot


def check_qp_oracle(n_instances: int = 200, seed: int = 0):
    """Closed-form wrench solve matches the dense KKT solve."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        model, snap, weights, u_ref, w, xdd_cmd = random_instance(rng)
        q, c = assemble_cost(model, snap, weights, u_ref, w)
        sol = solve_grf(q, c, model, snap, xdd_cmd)
        a = stacked_contact_map(model, snap)
        b = xdd_cmd.as_vector() - gravity_6d(model)
        f_kkt = solve_grf_kkt(q, c, a, b)
        rel = np.linalg.norm(sol.f_star - f_kkt) / max(1.0, np.linalg.norm(f_kkt))
        worst = max(worst, rel)
    return worst < 1e-8, f"worst relative deviation {worst:.3e}"


def check_constraint_residual(n_instances: int = 200, seed: int = 1):
    """A F* - b vanishes to solver tolerance on well-conditioned instances."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        model, snap, weights, u_ref, w, xdd_cmd = random_instance(rng)
        q, c = assemble_cost(model, snap, weights, u_ref, w)
        sol = solve_grf(q, c, model, snap, xdd_cmd)
        b = xdd_cmd.as_vector() - gravity_6d(model)
        rel = np.linalg.norm(sol.eq_residual) / max(1.0, np.linalg.norm(b))
        worst = max(worst, rel)
    return worst < 1e-9, f"worst relative residual {worst:.3e}"


def check_gravity_identity():
    """Static stance: total linear GRF cancels gravity; with zero wrench the
    feedforward torque is exactly the bias force."""
    model, snap = _standing_instance()
    q, c = assemble_cost(model, snap, QpWeights(), np.zeros(model.n),
                         np.array([3.0, 3.0]))
    sol = solve_grf(q, c, model, snap, CentroidalAccel.from_vector(np.zeros(6)))
    total_lin = sol.wrench(0)[0:3] + sol.wrench(1)[0:3]
    want = -model.m * model.g_vec
    ok1 = np.linalg.norm(total_lin - want) <= 1e-9 * np.linalg.norm(want)

    zero = sol.__class__(f_star=np.zeros(12), eq_residual=np.zeros(6),
                         cost_value=0.0, conditioning=1.0)
    u_ff, _ = feedforward_torque(model, snap, zero)
    ok2 = np.array_equal(u_ff, snap.h_act)
    return ok1 and ok2, (f"|sum F_lin + m g| = "
                         f"{np.linalg.norm(total_lin - want):.3e}, "
                         f"zero-wrench torque exact: {ok2}")


def check_contact_release():
    """Lowering one contact logit monotonically sheds that foot's wrench."""
    model, snap = _standing_instance()
    norms = []
    sweep = np.arange(3.0, -10.5, -0.5)
    for wi in sweep:
        q, c = assemble_cost(model, snap, QpWeights(), np.zeros(model.n),
                             np.array([3.0, wi]))
        sol = solve_grf(q, c, model, snap, CentroidalAccel.from_vector(np.zeros(6)))
        norms.append(np.linalg.norm(sol.wrench(1)))
    norms = np.array(norms)
    monotone = np.all(np.diff(norms) <= 1e-9)
    ratio = norms[-1] / norms[0]
    return monotone and ratio < 0.01, f"monotone: {monotone}, release ratio {ratio:.2e}"


def check_reward_bounds(seed: int = 2):
    """Exponential rewards live in (0, 1], the contact penalty in
    [-n_contacts, 0], and spot values match hand arithmetic."""
    rng = np.random.default_rng(seed)
    cfg = RewardConfig()
    model = toy_biped_model()
    ok = True
    for _ in range(200):
        f_a, f_b = rng.normal(scale=150.0, size=(2, 12))
        r = reward_grf(f_a, f_b, cfg)
        ok &= 0.0 < r <= 1.0
        rc = reward_contact_state(rng.integers(0, 2, 2).astype(bool),
                                  rng.uniform(-10, 10, 2), cfg)
        ok &= -2.0 <= rc <= 0.0
        rt = reward_torque_limit(rng.normal(scale=80.0, size=model.n), model, cfg)
        ok &= rt <= 0.0
    ok &= abs(tracking_kernel(10000.0, 100.0) - np.exp(-1.0)) < 1e-12
    ok &= reward_grf(np.zeros(12), np.zeros(12), cfg) == 1.0
    return bool(ok), "bounds and spot values"


def check_metric_oracle(seed: int = 3):
    """Vectorized metrics match an explicit per-tick accumulation."""
    rng = np.random.default_rng(seed)
    n_t = 50

    def rand_log():
        from scipy.spatial.transform import Rotation
        z = np.zeros((n_t, 1))
        return RolloutLog(
            t=np.arange(n_t) * 0.002, p=rng.normal(size=(n_t, 3)),
            rot=Rotation.random(n_t, rng=rng).as_matrix(),
            xdot=rng.normal(size=(n_t, 6)),
            u_ref=z, q_cmd=z, xdot_cmd=np.zeros((n_t, 6)), w=z,
            f_star=np.zeros((n_t, 6)), f_sim=np.zeros((n_t, 6)),
            u_ff=z, u_pd=z, u_total=z, rewards=np.zeros((n_t, 5)),
            contact=np.zeros((n_t, 1), bool), fallback=np.zeros(n_t, bool),
            clip_count=np.zeros(n_t, int))

    worst = 0.0
    for _ in range(20):
        a, b = rand_log(), rand_log()
        got = np.array(compute_metrics(a, b).as_tuple())
        pos, ori, vel, ang = [], [], [], []
        for k in range(n_t):
            pos.append(np.sqrt(np.sum((a.p[k] - b.p[k]) ** 2)))
            rel = b.rot[k].T @ a.rot[k]
            s = np.sqrt((rel[2, 1] - rel[1, 2]) ** 2 + (rel[0, 2] - rel[2, 0]) ** 2
                        + (rel[1, 0] - rel[0, 1]) ** 2) / 2
            ori.append(np.arctan2(s, (np.trace(rel) - 1) / 2))
            vel.append(np.sqrt(np.sum((a.xdot[k, :3] - b.xdot[k, :3]) ** 2)))
            ang.append(np.sqrt(np.sum((a.xdot[k, 3:] - b.xdot[k, 3:]) ** 2)))
        want = np.array([pos[-1], np.mean(pos), np.mean(ori),
                         np.sqrt(np.mean(np.square(vel))),
                         np.sqrt(np.mean(np.square(ang)))])
        worst = max(worst, float(np.abs(got - want).max()))
    return worst < 1e-12, f"worst metric deviation {worst:.3e}"


def check_mode_consistency(seed: int = 4):
    """Dropping the reference-torque cost equals the full mode as its weight
    vanishes."""
    rng = np.random.default_rng(seed)
    model, snap, _, _, w, xdd_cmd = random_instance(rng, n_contacts=2)
    tiny = QpWeights(k_tau=1e-8)
    q1, c1 = assemble_cost(model, snap, tiny, np.zeros(model.n), w, SolverMode.FULL)
    q2, c2 = assemble_cost(model, snap, tiny, np.zeros(model.n), w,
                           SolverMode.FIXED_SCHEDULE_NO_REF_COST)
    f1 = solve_grf(q1, c1, model, snap, xdd_cmd).f_star
    f2 = solve_grf(q2, c2, model, snap, xdd_cmd).f_star
    rel = np.linalg.norm(f1 - f2) / max(1.0, np.linalg.norm(f2))
    return rel < 1e-4, f"relative difference {rel:.3e}"


CHECKS = {
    "qp_oracle_equivalence": check_qp_oracle,
    "constraint_residual": check_constraint_residual,
    "gravity_identity": check_gravity_identity,
    "contact_release": check_contact_release,
    "reward_bounds": check_reward_bounds,
    "metric_oracle": check_metric_oracle,
    "mode_consistency": check_mode_consistency,
}


def run_checks(checks: dict | None = None, out=print) -> int:
    """Run the suite, print one line per property, and return the count of
    failures."""
    checks = CHECKS if checks is None else checks
    failures = 0
    for name, fn in checks.items():
        try:
            passed, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        if not passed:
            failures += 1
        out(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    return failures
