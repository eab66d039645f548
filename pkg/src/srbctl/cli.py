"""Command-line front end: run scenarios, compare controller modes, run the
embedded verification suite, and print the file schemas.

Exit codes: 0 ok, 1 verification failure, 2 usage/input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .grf import SolverMode
from .harness import PD_ONLY, ScenarioError, load_scenario, run_rollout
from .metrics import TrackingMetrics, compute_metrics
from .robot_model import ModelFormatError, ModelValidationError
from .verify import run_checks

__all__ = ["main", "cmd_run", "cmd_compare", "cmd_verify", "cmd_export_schema"]

_MODE_NAMES = [m.value for m in SolverMode] + [PD_ONLY]


def _reference_log(scenario, mode=SolverMode.FULL):
    """Clean reference rollout: same script, ideal wrenches, no pushes or
    randomization.  Plays the role of the nominal trajectory an evaluation
    run is compared against."""
    ref = replace(scenario, mode=mode, wrench_mode="ideal", pushes=(),
                  randomize=False, schedule_offset=0.0)
    return run_rollout(ref)


def _write_metrics(path, metrics: TrackingMetrics, extra: dict) -> None:
    with open(path, "w") as f:
        for name, value in zip(TrackingMetrics.NAMES, metrics.as_tuple()):
            f.write(f"{name} = {value:.17g}\n")
        for key, value in extra.items():
            f.write(f"{key} = {value}\n")


def cmd_run(scenario_path: str, out_dir: str, seed: int | None = None,
            mode: str | None = None) -> int:
    """Run one scenario; write `<stem>.csv` and `<stem>.metrics`."""
    scenario = load_scenario(scenario_path)
    if seed is not None:
        scenario = replace(scenario, seed=seed)
    if mode is not None:
        scenario = replace(scenario, mode=_parse_mode_arg(mode))
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(scenario_path))[0]

    log = run_rollout(scenario)
    metrics = compute_metrics(log, _reference_log(scenario))
    log.write_csv(os.path.join(out_dir, stem + ".csv"))
    fallback_ticks = int(np.count_nonzero(log.fallback))
    _write_metrics(os.path.join(out_dir, stem + ".metrics"), metrics, {
        "mode": log.mode,
        "seed": log.seed,
        "scenario_hash": log.scenario_hash,
        "fallback_ticks": fallback_ticks,
        "mean_reward_grf": format(float(log.rewards[:, 0].mean()), ".17g"),
    })
    if fallback_ticks:
        print(f"warning: {fallback_ticks} solver-fallback tick(s)", file=sys.stderr)
    print(f"wrote {stem}.csv and {stem}.metrics to {out_dir}")
    return 0


def _parse_mode_arg(name: str):
    if name == PD_ONLY:
        return PD_ONLY
    try:
        return SolverMode(name)
    except ValueError:
        raise ScenarioError(f"unknown mode {name!r}; choose from {_MODE_NAMES}") from None


def cmd_compare(scenario_path: str, modes: list[str], out_dir: str,
                seed: int | None = None) -> int:
    """Run one scenario under several modes with a shared seed and emit an
    aligned metrics table (text + CSV), rows = modes."""
    if len(modes) < 2:
        raise ScenarioError("compare needs at least two modes")
    scenario = load_scenario(scenario_path)
    if seed is not None:
        scenario = replace(scenario, seed=seed)
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(scenario_path))[0]

    ref = _reference_log(scenario)
    rows = []
    for name in modes:
        run_scn = replace(scenario, mode=_parse_mode_arg(name))
        log = run_rollout(run_scn)
        log.write_csv(os.path.join(out_dir, f"{stem}.{name}.csv"))
        rows.append((name, compute_metrics(log, ref)))

    header = ["mode"] + list(TrackingMetrics.NAMES)
    widths = [max(len(header[0]), *(len(r[0]) for r in rows))] + \
             [max(12, len(h)) for h in header[1:]]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for name, m in rows:
        cells = [name] + [format(v, ".4g") for v in m.as_tuple()]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    table = "\n".join(lines)
    print(table)
    with open(os.path.join(out_dir, stem + ".compare.txt"), "w") as f:
        f.write(table + "\n")
    with open(os.path.join(out_dir, stem + ".compare.csv"), "w") as f:
        f.write(",".join(header) + "\n")
        for name, m in rows:
            f.write(",".join([name] + [format(v, ".17g") for v in m.as_tuple()]) + "\n")
    return 0


def cmd_verify() -> int:
    """Run the embedded invariant suite; exit 0 iff every property passes."""
    failures = run_checks()
    if failures:
        print(f"{failures} propert{'y' if failures == 1 else 'ies'} FAILED")
        return 1
    print("all properties passed")
    return 0


MODEL_SCHEMA = """\
Model file (TOML):
  mass = <kg>                          total mass, > 0
  inertia = [9 numbers]                row-major 3x3 CoM inertia, SPD
  gravity = [gx, gy, gz]               m/s^2
  joint_count = <n>                    actuated joints, >= 1
  torque_limit = [n numbers]           per-joint limits, > 0 (N*m)
  contacts = ["left_foot", ...]        contact surface labels
  kp = [n numbers]                     PD stiffness diagonal
  kd = [n numbers]                     PD damping diagonal
  [toy]                                optional analytic biped kinematics
  hip_offset / thigh_len / shank_len / thigh_mass / shank_mass / grav
Unknown keys are rejected.
"""

SCENARIO_SCHEMA = """\
Scenario file (TOML):
  model = "path/to/file.model"
  duration = <s>                       > 0
  controller_hz = 500                  divisible by action_hz
  action_hz = 50
  mode = "full"                        full | fixed_schedule |
                                       fixed_schedule_no_ref_cost | pd_only
  wrench_mode = "ideal"                ideal | compliant
  seed = 0
  randomize = false                    controller-side model randomization
  schedule_offset = 0.0                s, shifts the fixed-schedule reference
  fcs_threshold = 0.007                m, fixed-schedule contact clearance
  [action_source]                      name = stand | weight_shift |
  name = "stand"                              step_in_place | hop (+ params)
  [ground]                             stiffness, damping, friction,
                                       moment_coeff
  [[push]]                             time = <s>, delta_v = [3 numbers]
  [gains]                              k_vel_lin, k_vel_ang, k_tau, k_lin, k_ang
  [rewards]                            sigma_grf, sigma_acc_lin, sigma_acc_ang,
                                       alpha, w_sim_logit
Unknown keys are rejected.
"""


def cmd_export_schema() -> int:
    print(MODEL_SCHEMA)
    print(SCENARIO_SCHEMA)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="srbctl",
        description="Centroidal wrench-distribution controller: scenario "
                    "runner, mode comparison, and self-verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario, write CSV + metrics")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--mode", choices=_MODE_NAMES, default=None)

    p_cmp = sub.add_parser("compare", help="run one scenario under several modes")
    p_cmp.add_argument("scenario")
    p_cmp.add_argument("--modes", required=True,
                       help="comma-separated list, e.g. full,pd_only")
    p_cmp.add_argument("--out", default="out")
    p_cmp.add_argument("--seed", type=int, default=None)

    sub.add_parser("verify", help="run the embedded invariant suite")
    sub.add_parser("export-schema", help="print model and scenario file schemas")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.scenario, args.out, args.seed, args.mode)
        if args.command == "compare":
            return cmd_compare(args.scenario, args.modes.split(","),
                               args.out, args.seed)
        if args.command == "verify":
            return cmd_verify()
        if args.command == "export-schema":
            return cmd_export_schema()
    except (ScenarioError, ModelFormatError, ModelValidationError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
