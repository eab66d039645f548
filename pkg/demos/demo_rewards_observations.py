"""Reward kernels and observation assembly.

Prints the exponential tracking kernels at a few hand-checkable error
levels, the contact-state penalty across logit values, and the sizes of the
stacked observation vectors with and without the privileged block.
"""

import numpy as np

from srbctl import (NoiseConfig, ObservationFrame, PrivilegedFrame,
                    RewardConfig, build_observation, noisy_observation,
                    reward_contact_state, reward_grf, tracking_kernel)

cfg = RewardConfig()

print("tracking kernel exp(-err^2 / sigma^2), sigma_grf = %.0f:" % cfg.sigma_grf)
for err in (0.0, 50.0, 100.0, 200.0):
    print("  wrench error %6.1f N -> %.6f" % (err, tracking_kernel(err * err, cfg.sigma_grf)))

f_star = np.zeros(12)
f_sim = f_star.copy()
f_sim[2] = 50.0
print("50 N vertical mismatch on one foot: reward_grf = %.6f"
      % reward_grf(f_sim, f_star, cfg))

print("\ncontact-state penalty, true contact on, logit swept:")
for w in (-4.0, -1.0, 0.0, 1.0, 4.0):
    print("  w = %+4.1f -> %+.6f"
          % (w, reward_contact_state(np.array([True]), np.array([w]), cfg)))

n = 10
frame = ObservationFrame(
    q_ref=np.zeros(n), qdot_ref=np.zeros(n),
    base_lin_vel=np.zeros(3), base_ang_vel=np.zeros(3),
    q=np.zeros(n), qdot=np.zeros(n),
    privileged=PrivilegedFrame(p_ref=np.zeros(3), p=np.zeros(3),
                               rot_ref=np.eye(3), rot=np.eye(3)))
history = [frame] * 4
print("\nobservation sizes for n = %d joints:" % n)
print("  baseline (4 frames x (4n + 6)): %d" % build_observation(history).size)
print("  privileged (+18 per frame):     %d"
      % build_observation(history, privileged=True).size)

noisy = noisy_observation(frame, seed=0, cfg=NoiseConfig())
print("noise half-widths: q 0.02 rad, qdot 0.5 rad/s, lin vel 0.5, ang vel 0.2")
print("  sample joint noise:", np.round(noisy.q[:4], 4))
print("  reference untouched:", bool(np.array_equal(noisy.q_ref, frame.q_ref)))
