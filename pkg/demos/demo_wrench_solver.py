"""Closed-form ground-reaction wrench distribution on the toy biped.

Builds the symmetric stance, solves the equality-constrained wrench QP, and
then sweeps one contact logit from stance to release to show how the solver
hands the load over to the other foot.
"""

import numpy as np

from srbctl import (CentroidalAccel, QpWeights, assemble_cost, solve_grf,
                    toy_biped_model, toy_biped_snapshot)

model = toy_biped_model()

# symmetric crouch: hip pitched forward, knee folded back twice as far
alpha = 0.3
q = np.zeros(model.n)
q[0] = q[5] = alpha
q[1] = q[6] = -2 * alpha
snap = toy_biped_snapshot(model.toy, q, np.zeros(model.n))
zero_cmd = CentroidalAccel.from_vector(np.zeros(6))

print("toy biped: m = %.1f kg, feet at" % model.m)
for label, r in zip(("left", "right"), snap.r):
    print("  %-5s r = [%+.3f %+.3f %+.3f] m" % (label, *r))

q_mat, c_vec = assemble_cost(model, snap, QpWeights(), np.zeros(model.n),
                             np.array([3.0, 3.0]))
sol = solve_grf(q_mat, c_vec, model, snap, zero_cmd)
total = sol.wrench(0)[0:3] + sol.wrench(1)[0:3]
print("\ndouble support, zero commanded acceleration:")
print("  left  Fz = %8.3f N" % sol.wrench(0)[2])
print("  right Fz = %8.3f N" % sol.wrench(1)[2])
print("  total linear GRF %s vs -m g %s" % (np.round(total, 6),
                                            np.round(-model.m * model.g_vec, 6)))
print("  constraint residual %.2e, conditioning %.2e"
      % (np.linalg.norm(sol.eq_residual), sol.conditioning))

print("\nreleasing the right foot (logit swept +3 .. -10):")
print("  %6s  %12s  %12s" % ("w", "|F_left|", "|F_right|"))
for w_right in np.linspace(3.0, -10.0, 14):
    q_mat, c_vec = assemble_cost(model, snap, QpWeights(), np.zeros(model.n),
                                 np.array([3.0, w_right]))
    sol = solve_grf(q_mat, c_vec, model, snap, zero_cmd)
    print("  %6.1f  %12.4f  %12.4f"
          % (w_right, np.linalg.norm(sol.wrench(0)),
             np.linalg.norm(sol.wrench(1))))
