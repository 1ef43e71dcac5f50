"""Desk-scale experiment drivers: scaling law, recalibration comparison, CMI grid.

These produce plain rows of plot-ready numbers plus fitted summaries; the
command-line layer only parses flags, calls a driver, and writes files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binning import UWB, uwb_scheme
from .bounds import recalib_holdout_bound, recalib_reuse_bound, total_bias_bound
from .data import ScoredDataset
from .metrics import cube_root_bins, ece, optimal_bins
from .models import (
    CalibrationOracle,
    McEstimate,
    SyntheticModel,
    estimate_lipschitz,
    logistic_predict,
    mc_tce,
    sample_synthetic,
)
from .recalibration import fit_recalibrator, recalibrated_tce
from .rng import child_seed, stream

__all__ = [
    "SyntheticExperimentResult",
    "RecalibrationResult",
    "run_synthetic_experiment",
    "run_recalibration",
    "scored_synthetic_dataset",
]


def scored_synthetic_dataset(model: SyntheticModel, n: int, seed: int, *path: int) -> ScoredDataset:
    """Draw n synthetic points and score them with the model."""
    rng = stream(seed, *path)
    x, y = sample_synthetic(n, seed, rng=rng)
    scores = np.clip(logistic_predict(model, x), 0.0, 1.0)
    return ScoredDataset(scores, y, provenance=f"synthetic(seed={seed}, path={path})")


def _resolve_bins(rule, n: int, L: float) -> int:
    if rule == "optimal":
        return optimal_bins(n, L, UWB)
    if rule == "cube_root":
        return cube_root_bins(n)
    if isinstance(rule, tuple) and rule[0] == "fixed":
        return int(rule[1])
    raise ValueError(f"unknown bin rule: {rule!r}")


@dataclass(frozen=True)
class SyntheticExperimentResult:
    """Long-format rows plus the fitted log-log slope of the mean gap."""

    rows: list  # dicts: n, rep, B, ece, tce, tce_gap, bound
    slope: float
    intercept: float
    tce: McEstimate
    lipschitz: float
    n_grid: list


def run_synthetic_experiment(
    beta0: float,
    beta1: float,
    n_grid,
    reps: int,
    b_rule,
    seed: int,
    n_mc: int = 10**6,
) -> SyntheticExperimentResult:
    """Measure the gap between the Monte-Carlo TCE and the test-set ECE.

    For each grid size n and repetition, a fresh test set is drawn and
    scored, the uniform-width ECE is computed at the rule-selected bin
    count, and the gap to the oracle TCE plus the matching total-bias
    bound are recorded. The log-log slope of the mean gap against n is
    fitted by least squares.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(n < 8 for n in n_grid):
        raise ValueError("grid sizes must be at least 8")
    model = SyntheticModel(beta0, beta1)
    oracle = CalibrationOracle(model)
    L = estimate_lipschitz(oracle, grid=1000)
    tce = mc_tce(oracle, n_mc, child_seed(seed, 0))

    rows = []
    mean_gaps = []
    for i, n in enumerate(n_grid):
        B = _resolve_bins(b_rule, n, L)
        scheme = uwb_scheme(B)
        bound = total_bias_bound(B, n, L, UWB).value
        gaps = []
        for rep in range(reps):
            d = scored_synthetic_dataset(model, n, seed, 1, i, rep)
            e = ece(d, scheme).value
            gap = abs(tce.value - e)
            gaps.append(gap)
            rows.append(
                {
                    "n": n,
                    "rep": rep,
                    "B": B,
                    "ece": e,
                    "tce": tce.value,
                    "tce_gap": gap,
                    "bound": bound,
                }
            )
        mean_gaps.append(np.mean(gaps))

    if len(n_grid) >= 2:
        slope, intercept = np.polyfit(np.log(n_grid), np.log(mean_gaps), 1)
    else:
        slope, intercept = float("nan"), float("nan")
    return SyntheticExperimentResult(
        rows, float(slope), float(intercept), tce, L, n_grid
    )


@dataclass(frozen=True)
class RecalibrationResult:
    """Recalibrated/raw test ECE and the matching closed-form bound."""

    variant: str
    B: int
    n_fit: int
    n_test: int
    ece_raw: float
    tce_recalibrated: float
    bound: float
    collapsed: bool


def run_recalibration(
    pool: ScoredDataset,
    variant: str,
    B: int,
    eval_split: float,
    seed: int,
    n_re: int | None = None,
    i_delta1: float = 0.0,
    i_delta2: float = 0.0,
) -> RecalibrationResult:
    """Split a scored pool, fit a histogram recalibrator, and report its bound.

    The pool is permuted with the seed; the last ``eval_split`` fraction is
    the test set. The held-out variant fits on ``n_re`` samples drawn from
    the remainder; the reuse variant fits on the entire remainder, standing
    in for the training set, and its bound takes the caller's (possibly
    estimated) mask-information values for the two difference statistics.
    """
    if variant not in ("holdout", "reuse"):
        raise ValueError(f"unknown variant: {variant}")
    if not (0.0 < eval_split < 1.0):
        raise ValueError("eval_split must lie in (0, 1)")
    n_total = len(pool)
    n_test = int(round(eval_split * n_total))
    n_rest = n_total - n_test
    if n_test < 2 * B:
        raise ValueError(f"split leaves {n_test} test rows; need at least {2 * B}")
    perm = stream(seed, 0).permutation(n_total)
    test = pool.subset(perm[n_rest:], provenance="recalibration-test")
    rest_idx = perm[:n_rest]

    if variant == "holdout":
        if n_re is None:
            raise ValueError("holdout variant requires n_re")
        if n_re > n_rest:
            raise ValueError(f"n_re={n_re} exceeds the {n_rest} non-test rows")
        if n_re < 2 * B:
            raise ValueError(f"n_re={n_re} is below the 2B={2 * B} fit minimum")
        pick = stream(seed, 1).permutation(n_rest)[:n_re]
        fit_set = pool.subset(rest_idx[pick], provenance="recalibration-fit")
        reused = False
        bound = recalib_holdout_bound(B, n_re).value
    else:
        if n_rest < 2 * B:
            raise ValueError(f"only {n_rest} fit rows; need at least {2 * B}")
        fit_set = pool.subset(rest_idx, provenance="recalibration-fit")
        reused = True
        bound = recalib_reuse_bound(i_delta1, i_delta2, B, len(fit_set)).value

    recal = fit_recalibrator(fit_set, B, reused_training=reused)
    raw = ece(test, recal.scheme).value
    recal_tce = recalibrated_tce(recal, test)
    return RecalibrationResult(
        variant=variant,
        B=B,
        n_fit=len(fit_set),
        n_test=len(test),
        ece_raw=raw,
        tce_recalibrated=recal_tce,
        bound=bound,
        collapsed=recal.scheme.collapsed,
    )
