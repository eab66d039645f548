"""srbctl: single-rigid-body centroidal control.

Closed-form contact-wrench distribution, feedforward + PD torque
composition, physics-informed reward terms, and a desk-scale rollout
harness with scripted action sources.
"""

from .centroidal import (CentroidalAccel, CentroidalState, Wrench,
                         centroidal_accel, commanded_accel, contact_map,
                         gravity_6d, skew, stacked_contact_map)
from .grf import (ConditioningError, GrfSolution, QpWeights, SolverMode,
                  assemble_cost, fixed_contact_states, solve_grf,
                  solve_grf_kkt)
from .harness import (PD_ONLY, GroundConfig, Push, RolloutLog, Scenario,
                      ScenarioError, load_scenario, run_rollout,
                      scripted_actions, simulated_contact, step_srb)
from .metrics import TrackingMetrics, compute_metrics
from .observations import (HISTORY_LEN, NoiseConfig, ObservationFrame,
                           PrivilegedFrame, build_observation,
                           noisy_observation)
from .rewards import (RewardConfig, centroidal_accel_kernels,
                      reward_centroidal_accel, reward_contact_state,
                      reward_grf, reward_torque_limit, tracking_kernel)
from .robot_model import (ContactSurfaceId, KinematicSnapshot,
                          ModelFormatError, ModelValidationError, RobotModel,
                          ToyBipedParams, load_model, randomize_model,
                          save_model, toy_biped_ik, toy_biped_model,
                          toy_biped_snapshot)
from .torque import (PolicyAction, TorqueBreakdown, feedforward_torque,
                     hybrid_torque, pd_torque)

__version__ = "0.1.0"
