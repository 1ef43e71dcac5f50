"""Closed-form bias and generalization bounds, returned as auditable reports.

All logarithms are natural; "log 2" in every formula is ln 2. A report
stores its inputs verbatim so any value can be recomputed, and is flagged
vacuous when it exceeds 1 (the calibration error itself never can).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .binning import UMB, UWB

__all__ = [
    "BoundReport",
    "stat_bias_bound",
    "binning_bias_bound",
    "total_bias_bound",
    "high_prob_bound",
    "gen_ece_bound",
    "gen_tce_bound",
    "metric_entropy_bound",
    "metric_entropy_bound_parametric",
    "recalib_reuse_bound",
    "recalib_holdout_bound",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class BoundReport:
    """A named bound value together with every input it was computed from."""

    name: str
    value: float
    inputs: dict
    variant: str = "n/a"
    vacuous: bool = field(init=False)

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0.0:
            raise ValueError(f"bound value must be finite and nonnegative: {self.value}")
        object.__setattr__(self, "vacuous", self.value > 1.0)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "inputs": dict(self.inputs),
            "variant": self.variant,
            "vacuous": self.vacuous,
        }


def _check_bn(B: int, n: int, variant: str) -> None:
    if B < 1:
        raise ValueError("B must be at least 1")
    if variant not in (UWB, UMB):
        raise ValueError(f"unknown variant: {variant}")
    if variant == UWB and n < 1:
        raise ValueError("n must be at least 1")
    if variant == UMB and n <= B:
        raise ValueError("uniform-mass bounds require n > B")


def _umb_stat_term(B: int, n: int) -> float:
    return math.sqrt(2.0 * B * _LN2 / (n - B)) + 2.0 * B / (n - B)


def stat_bias_bound(B: int, n: int, variant: str) -> BoundReport:
    """Finite-sample estimation error of the binned estimator.

    Uniform-width: sqrt(2 B ln2 / n). Uniform-mass:
    sqrt(2 B ln2 / (n - B)) + 2B / (n - B).
    """
    _check_bn(B, n, variant)
    if variant == UWB:
        value = math.sqrt(2.0 * B * _LN2 / n)
    else:
        value = _umb_stat_term(B, n)
    return BoundReport("stat_bias", value, {"B": B, "n": n}, variant)


def binning_bias_bound(B: int, n: int, L: float, variant: str) -> BoundReport:
    """Error from replacing the model with its per-bin conditional mean.

    Uniform-width: (1+L)/B, independent of n. Uniform-mass:
    (1+L) * (1/B + sqrt(2 B ln2 / (n - B)) + 2B / (n - B)).
    """
    _check_bn(B, n, variant)
    if L < 0:
        raise ValueError("L must be nonnegative")
    if variant == UWB:
        value = (1.0 + L) / B
    else:
        value = (1.0 + L) * (1.0 / B + _umb_stat_term(B, n))
    return BoundReport("binning_bias", value, {"B": B, "n": n, "L": L}, variant)


def total_bias_bound(B: int, n: int, L: float, variant: str) -> BoundReport:
    """Total |true - estimated| calibration-error bound (binning + statistical).

    Uniform-width: (1+L)/B + sqrt(2 B ln2 / n). Uniform-mass:
    (1+L)/B + (2+L) * (sqrt(2 B ln2 / (n - B)) + 2B / (n - B)).
    """
    _check_bn(B, n, variant)
    if L < 0:
        raise ValueError("L must be nonnegative")
    if variant == UWB:
        value = (1.0 + L) / B + math.sqrt(2.0 * B * _LN2 / n)
    else:
        value = (1.0 + L) / B + (2.0 + L) * _umb_stat_term(B, n)
    return BoundReport("total_bias", value, {"B": B, "n": n, "L": L}, variant)


def high_prob_bound(B: int, n: int, delta: float) -> BoundReport:
    """Statistical-bias bound holding with probability 1 - delta (uniform-width).

    sqrt(2 (B ln2 + ln(1/delta)) / n).
    """
    if B < 1 or n < 1:
        raise ValueError("B and n must be at least 1")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    value = math.sqrt(2.0 * (B * _LN2 + math.log(1.0 / delta)) / n)
    return BoundReport("high_prob", value, {"B": B, "n": n, "delta": delta}, UWB)


def gen_ece_bound(ecmi: float, B: int, n: int) -> BoundReport:
    """Expected train/test calibration-error gap: sqrt(8 (eCMI + B ln2) / n)."""
    if ecmi < 0:
        raise ValueError("ecmi must be nonnegative")
    if B < 1 or n < 1:
        raise ValueError("B and n must be at least 1")
    value = math.sqrt(8.0 * (ecmi + B * _LN2) / n)
    return BoundReport("gen_ece", value, {"eCMI": ecmi, "B": B, "n": n})


def gen_tce_bound(
    ecmi: float, fcmi: float | None, B: int, n: int, L: float, variant: str
) -> BoundReport:
    """Training-data total-bias bound for the true calibration error.

    Uniform-width: (1+L)/B + sqrt(8 (eCMI + B ln2) / n). Uniform-mass adds
    (1+L) * sqrt(2 (fCMI + B ln2) / n) and requires fCMI (a tighter
    statistic-level MI may be substituted in that slot).
    """
    if ecmi < 0:
        raise ValueError("ecmi must be nonnegative")
    if B < 1 or n < 1:
        raise ValueError("B and n must be at least 1")
    if L < 0:
        raise ValueError("L must be nonnegative")
    if variant not in (UWB, UMB):
        raise ValueError(f"unknown variant: {variant}")
    value = (1.0 + L) / B + math.sqrt(8.0 * (ecmi + B * _LN2) / n)
    inputs = {"eCMI": ecmi, "B": B, "n": n, "L": L}
    if variant == UMB:
        if fcmi is None:
            raise ValueError("the uniform-mass variant requires fcmi")
        if fcmi < 0:
            raise ValueError("fcmi must be nonnegative")
        value += (1.0 + L) * math.sqrt(2.0 * (fcmi + B * _LN2) / n)
        inputs["fCMI"] = fcmi
    return BoundReport("gen_tce", value, inputs, variant)


def metric_entropy_bound(B: int, n: int, L: float, delta: float, logN: float) -> BoundReport:
    """Function-class bound from a delta-cover (uniform-width).

    (1+L)/B + (2+L)*delta + sqrt(8 B (ln2 + logN) / n), where the caller
    supplies logN = log of the covering number of the class at radius
    delta / B in the sup norm. Requires 0 < delta <= 1/B.
    """
    if B < 1 or n < 1:
        raise ValueError("B and n must be at least 1")
    if L < 0:
        raise ValueError("L must be nonnegative")
    if not (0.0 < delta <= 1.0 / B):
        raise ValueError("delta must lie in (0, 1/B]")
    if logN < 0:
        raise ValueError("logN must be nonnegative")
    value = (1.0 + L) / B + (2.0 + L) * delta + math.sqrt(8.0 * B * (_LN2 + logN) / n)
    return BoundReport(
        "metric_entropy",
        value,
        {"B": B, "n": n, "L": L, "delta": delta, "logN": logN},
        UWB,
    )


def metric_entropy_bound_parametric(
    B: int, n: int, L: float, d: int, L0: float
) -> BoundReport:
    """Parametric-class form of the metric-entropy bound at delta = 1/B.

    (3+2L)/B + sqrt(8 d B ln(2 L0 B^2) / n) for a d-dimensional,
    L0-Lipschitz class; requires 2 L0 B^2 > 1 so the log is positive.
    """
    if B < 1 or n < 1:
        raise ValueError("B and n must be at least 1")
    if L < 0:
        raise ValueError("L must be nonnegative")
    if d < 1:
        raise ValueError("d must be at least 1")
    if L0 <= 0:
        raise ValueError("L0 must be positive")
    if 2.0 * L0 * B * B <= 1.0:
        raise ValueError("need 2 * L0 * B^2 > 1 for a positive log")
    value = (3.0 + 2.0 * L) / B + math.sqrt(
        8.0 * d * B * math.log(2.0 * L0 * B * B) / n
    )
    return BoundReport(
        "metric_entropy_parametric",
        value,
        {"B": B, "n": n, "L": L, "d": d, "L0": L0},
        UWB,
    )


def recalib_reuse_bound(i_delta1: float, i_delta2: float, B: int, n: int) -> BoundReport:
    """Recalibration bound when the training data is reused for the fit.

    sqrt(2 (I1 + B ln2) / n) + sqrt(2 (I2 + B ln2) / n), where I1 and I2
    are the mask-information contents of the two per-bin difference
    statistics. Passing the model-level fCMI to both slots recovers the
    looser 2 * sqrt(2 (fCMI + B ln2) / n) form.
    """
    if i_delta1 < 0 or i_delta2 < 0:
        raise ValueError("mutual-information inputs must be nonnegative")
    if B < 1 or n < 1:
        raise ValueError("B and n must be at least 1")
    value = math.sqrt(2.0 * (i_delta1 + B * _LN2) / n) + math.sqrt(
        2.0 * (i_delta2 + B * _LN2) / n
    )
    return BoundReport(
        "recalib_reuse", value, {"I_Delta1": i_delta1, "I_Delta2": i_delta2, "B": B, "n": n}, UMB
    )


def recalib_holdout_bound(B: int, n_re: int) -> BoundReport:
    """Recalibration bound for an independent held-out fit set.

    sqrt(2 B ln2 / (n_re - B)) + 2B / (n_re - B); requires n_re > B.
    """
    if B < 1:
        raise ValueError("B must be at least 1")
    if n_re <= B:
        raise ValueError("n_re must exceed B")
    value = math.sqrt(2.0 * B * _LN2 / (n_re - B)) + 2.0 * B / (n_re - B)
    return BoundReport("recalib_holdout", value, {"B": B, "n_re": n_re}, UMB)
