#!/usr/bin/env python3
"""Maneuvering-target benchmark: soft-mixing IMM vs hard-decision hybrid.

Runs a reduced Monte Carlo of the short-range fire-control scenario (a
constant-velocity approach, a 50-sample lateral maneuver, then constant
velocity again) and compares position RMSE and mode-switch response.
The full 100-run experiment matrix is available through the CLI:

    sigmamax run --config configs/tracking.toml --out results/
"""

import numpy as np

from sigmamax import experiment_group, run_monte_carlo, scenario_1

config = scenario_1(mc_runs=20)
group = experiment_group(1, config)
print(f"scenario: T={config.T}s, {config.num_samples} samples, "
      f"maneuver over samples 81..130, {config.mc_runs} Monte Carlo runs")

report = run_monte_carlo(config, group, methods=("imm", "himm", "kalman-baseline"))
print(f"completed {report.completed_runs} runs in {report.runtime_seconds:.1f} s "
      f"({report.excluded_runs} excluded)\n")

print("position RMSE (norm over x,y,z), segment averages in meters:")
segments = {"before maneuver (10-80)": slice(9, 80),
            "during maneuver (81-130)": slice(80, 130),
            "after maneuver (131-200)": slice(130, 200)}
meas = np.linalg.norm(report.measurement_rmse, axis=1)
header = f"{'segment':>26} | {'measurement':>11}"
for m in report.methods:
    header += f" | {m:>11}"
print(header)
for name, window in segments.items():
    line = f"{name:>26} | {meas[window].mean():11.2f}"
    for m in report.methods:
        line += f" | {np.linalg.norm(report.rmse[m], axis=1)[window].mean():11.2f}"
    print(line)

print("\nmode-switch response (mean crossover sample, maneuver starts at 81):")
for m in ("imm", "himm"):
    print(f"  {m:>5}: {report.mean_cross_time[m]:.2f}")
print("\nThe hybrid filter reacts to the onset first: its dormant-mode belief")
print("is floored by the transition possibility, so a short burst of evidence")
print("flips the hard decision, while the IMM's probability must climb from")
print("its mixed-down prior.")
