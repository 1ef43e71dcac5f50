"""Scaling behavior of the TCE gap on the synthetic logistic family.

The synthetic family has a closed-form calibration map, so the true
calibration error is a Monte-Carlo integral away. For a miscalibrated
member we measure |TCE - ECE| over a grid of test-set sizes at the
bound-optimal bin count and compare the gap's decay with the bound's
cube-root rate.
"""

import numpy as np

from calbounds import (
    CalibrationOracle,
    SyntheticModel,
    canonical_calibration,
    estimate_lipschitz,
    mc_tce,
)
from calbounds.experiments import run_synthetic_experiment

model = SyntheticModel(beta0=0.5, beta1=-1.5)  # a miscalibrated predictor
oracle = CalibrationOracle(model)

print("== the calibration map and its slope ==")
for z in (0.1, 0.3, 0.5, 0.7, 0.9):
    print(f"  pi({z:.1f}) = {canonical_calibration(oracle, z):.4f}")
L = estimate_lipschitz(oracle, grid=1000)
print("estimated Lipschitz constant:", round(L, 4))
tce = mc_tce(oracle, 10**6, seed=1)
print(f"Monte-Carlo TCE: {tce.value:.5f} +/- {tce.std_error:.5f}")
print()

print("note: the perfectly specified member beta=(0, -2) has TCE",
      f"{mc_tce(CalibrationOracle(SyntheticModel(0.0, -2.0)), 10**5, seed=2).value:.2e}")
print()

print("== gap vs n at the optimal bin count (10 reps per n) ==")
grid = [1000, 3162, 10_000, 31_623, 100_000]
result = run_synthetic_experiment(0.5, -1.5, grid, reps=10, b_rule="optimal", seed=3)
per_n = {}
for row in result.rows:
    per_n.setdefault(row["n"], []).append(row)
print(f"{'n':>7} {'B':>4} {'mean gap':>10} {'bound':>8}")
for n, rows in per_n.items():
    gaps = [r["tce_gap"] for r in rows]
    print(f"{n:>7} {rows[0]['B']:>4} {np.mean(gaps):>10.5f} {rows[0]['bound']:>8.4f}")
print()
print(f"log-log slope of the mean gap: {result.slope:.3f}")
print("(the bound itself decays at the cube-root rate, slope -1/3;")
print(" the realized gap for this smooth family decays faster)")
