"""Contact-wrench distribution: quadratic cost assembly and the closed-form
equality-constrained QP solve.

The decision variable is the stacked contact wrench F (6 per surface).  The
cost has two parts: a reference-torque term that pulls the contact-induced
joint torque toward the policy's reference, and a per-surface term weighted
by exp(-w_i) that releases surfaces whose contact logit w_i is low.  The only
constraint is the centroidal dynamics equality A F = xdd_cmd - g_hat, so the
minimizer is available in closed form from the KKT conditions:

    F* = -Q^-1 c + Q^-1 A^T (A Q^-1 A^T)^-1 (b + A Q^-1 c),   b = xdd_cmd - g_hat

Solves use Cholesky factorizations (Q and A Q^-1 A^T are symmetric positive
definite by construction), falling back to a pivoted solve if a factorization
fails numerically.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .centroidal import CentroidalAccel, gravity_6d, stacked_contact_map
from .robot_model import KinematicSnapshot, RobotModel

__all__ = [
    "QpWeights",
    "SolverMode",
    "GrfSolution",
    "ConditioningError",
    "CONTACT_LOGIT_CLAMP",
    "assemble_cost",
    "solve_grf",
    "solve_grf_kkt",
    "fixed_contact_states",
]

# Contact logits are clamped before exponentiation so exp(-w) stays within
# [4.5e-5, 2.2e4] and the Schur complement keeps usable conditioning.
CONTACT_LOGIT_CLAMP = 10.0

CONDITIONING_FLOOR = 1e-8


class ConditioningError(RuntimeError):
    """A Q^-1 A^T is singular to working precision."""

    def __init__(self, smallest_singular_value: float):
        super().__init__(
            f"constraint Schur complement nearly singular "
            f"(smallest singular value {smallest_singular_value:.3e})")
        self.smallest_singular_value = smallest_singular_value


class SolverMode(enum.Enum):
    """Controller variants.

    FULL uses policy contact logits and the reference-torque cost.
    FIXED_SCHEDULE takes contact logits from a height-thresholded schedule
    instead of the policy.  FIXED_SCHEDULE_NO_REF_COST additionally drops the
    reference-torque cost, leaving only the per-surface release term.
    """

    FULL = "full"
    FIXED_SCHEDULE = "fixed_schedule"
    FIXED_SCHEDULE_NO_REF_COST = "fixed_schedule_no_ref_cost"


@dataclass(frozen=True)
class QpWeights:
    """Cost weights.  ``k_tau`` is the nominal reference-torque weight
    (scalar or per-joint); ``k_lin``/``k_ang`` are the diagonals of the
    nominal per-surface force/moment weights."""

    k_tau: np.ndarray | float = 100.0
    k_lin: np.ndarray | float = 1e-3
    k_ang: np.ndarray | float = 0.02

    def validate(self) -> "QpWeights":
        for name in ("k_tau", "k_lin", "k_ang"):
            if np.any(np.asarray(getattr(self, name)) <= 0):
                raise ValueError(f"{name}: must be strictly positive")
        return self


@dataclass(frozen=True)
class GrfSolution:
    """Optimal stacked wrench plus solve diagnostics.

    ``eq_residual`` is A F* - b componentwise; ``conditioning`` is the
    smallest singular value of the constraint Schur complement A Q^-1 A^T.
    """

    f_star: np.ndarray  # (6 * n_contacts,)
    eq_residual: np.ndarray  # (6,)
    cost_value: float
    conditioning: float

    def wrench(self, i: int) -> np.ndarray:
        return self.f_star[6 * i:6 * i + 6]


def _torque_map(snapshot: KinematicSnapshot) -> np.ndarray:
    """n x 6*n_contacts map from stacked wrench to induced joint force."""
    n_c, n, _ = snapshot.j_act.shape
    return snapshot.j_act.transpose(1, 0, 2).reshape(n, 6 * n_c)


def assemble_cost(model: RobotModel, snapshot: KinematicSnapshot,
                  weights: QpWeights, u_ref: np.ndarray, w: np.ndarray,
                  mode: SolverMode = SolverMode.FULL) -> tuple[np.ndarray, np.ndarray]:
    """Build (Q, c) so that 1/2 F^T Q F + c^T F matches the wrench cost up to
    a constant.

    With G the horizontal stack of actuated Jacobian-transpose blocks and
    W = k_tau * tau_limit^-2 (elementwise), the reference-torque term is
    ||u_ref + G F||^2_W and the release term is block-diagonal with blocks
    exp(-w_i) * diag(k_lin, k_ang).  In FIXED_SCHEDULE_NO_REF_COST mode the
    G-dependent terms are omitted.
    """
    n_c = model.n_contacts
    dim = 6 * n_c
    w = np.asarray(w, dtype=float)
    if w.shape != (n_c,):
        raise ValueError(f"expected {n_c} contact logits")
    w = np.minimum(CONTACT_LOGIT_CLAMP, np.maximum(-CONTACT_LOGIT_CLAMP, w))

    block = np.empty(6)
    block[0:3] = weights.k_lin
    block[3:6] = weights.k_ang
    d_diag = (np.exp(-w)[:, None] * block).ravel()

    if mode is SolverMode.FIXED_SCHEDULE_NO_REF_COST:
        q = np.zeros((dim, dim))
        q.flat[::dim + 1] = 2.0 * d_diag
        return q, np.zeros(dim)

    g_mat = _torque_map(snapshot)
    w_diag = np.asarray(weights.k_tau, dtype=float) / np.square(model.tau_limit)
    gw = g_mat * w_diag[:, None]  # W G without forming diag(W)
    q = 2.0 * (g_mat.T @ gw)
    q.flat[::dim + 1] += 2.0 * d_diag
    c = 2.0 * (gw.T @ np.asarray(u_ref, dtype=float))
    return q, c


def solve_grf(q: np.ndarray, c: np.ndarray, model: RobotModel,
              snapshot: KinematicSnapshot, xdd_cmd: CentroidalAccel) -> GrfSolution:
    """Closed-form optimal stacked wrench under the centroidal equality
    constraint.

    Raises :class:`ConditioningError` when the constraint Schur complement is
    singular to working precision (smallest singular value below 1e-8).
    """
    a = stacked_contact_map(model, snapshot)
    b = xdd_cmd.as_vector() - gravity_6d(model)

    # One factorization of Q serves both Q^-1 c and Q^-1 A^T.
    rhs = np.empty((a.shape[1], 7))
    rhs[:, 0] = c
    rhs[:, 1:] = a.T
    try:
        cho_q = scipy.linalg.cho_factor(q, lower=True, check_finite=False)
        q_inv_rhs = scipy.linalg.cho_solve(cho_q, rhs, check_finite=False)
    except np.linalg.LinAlgError:
        q_inv_rhs = scipy.linalg.solve(q, rhs, assume_a="sym")
    q_inv_c = q_inv_rhs[:, 0]
    q_inv_at = q_inv_rhs[:, 1:]

    schur = a @ q_inv_at
    sing = np.abs(np.linalg.eigvalsh(schur))  # symmetric: |eigenvalues| = singular values
    conditioning = float(sing.min())
    if conditioning < CONDITIONING_FLOOR:
        raise ConditioningError(conditioning)

    rhs2 = b + a @ q_inv_c
    try:
        cho_s = scipy.linalg.cho_factor(schur, lower=True, check_finite=False)
        lam = scipy.linalg.cho_solve(cho_s, rhs2, check_finite=False)
    except np.linalg.LinAlgError:
        lam = scipy.linalg.solve(schur, rhs2, assume_a="sym")

    f_star = -q_inv_c + q_inv_at @ lam
    return GrfSolution(
        f_star=f_star,
        eq_residual=a @ f_star - b,
        cost_value=float(0.5 * f_star @ q @ f_star + c @ f_star),
        conditioning=conditioning,
    )


def solve_grf_kkt(q: np.ndarray, c: np.ndarray, a: np.ndarray,
                  b: np.ndarray) -> np.ndarray:
    """Independent check route: solve the dense KKT system
    [[Q, A^T], [A, 0]] [F; lam] = [-c; b] directly.  Kept free of the
    Schur-complement path so the two can cross-validate each other."""
    n = q.shape[0]
    m = a.shape[0]
    kkt = np.zeros((n + m, n + m))
    kkt[:n, :n] = q
    kkt[:n, n:] = a.T
    kkt[n:, :n] = a
    sol = np.linalg.solve(kkt, np.concatenate([-c, b]))
    return sol[:n]


def fixed_contact_states(ref_foot_heights: np.ndarray, threshold: float) -> np.ndarray:
    """Schedule-derived contact logits: 1 where the reference foot height is
    strictly below the threshold, else 0."""
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    return (np.asarray(ref_foot_heights, dtype=float) < threshold).astype(float)
