"""Mutual-information estimation and the supersample train/test experiment.

Two estimators of I(continuous statistic; discrete label): a mixed-type
k-nearest-neighbor estimator (digamma combination over same-label neighbor
radii) and a histogram plug-in over equal-mass value bins, which serves as
the independent oracle at desk scale. On top of them, the supersample
pipeline trains a model on the masked half of an n x 2 data matrix,
measures calibration-error differences between the halves, and estimates
how much information those statistics carry about the mask.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import digamma

from .binning import UMB, UWB, assign, umb_scheme, uwb_scheme
from .data import ScoredDataset, Supersample
from .metrics import ece
from .models import TrainerConfig, logistic_predict, sample_synthetic, train_logistic
from .rng import child_seed, stream

__all__ = [
    "MiEstimate",
    "CmiExperimentConfig",
    "CmiExperimentResult",
    "ksg_mixed_mi",
    "plugin_mi",
    "ecmi_statistic",
    "delta_statistics",
    "run_cmi_experiment",
]


@dataclass(frozen=True)
class MiEstimate:
    """A mutual-information estimate in nats.

    ``value`` is the raw estimator output and may be slightly negative from
    noise; ``clamped`` is the nonnegative copy that bound formulas consume.
    """

    value: float
    method: str
    k: int
    n_pairs: int

    @property
    def clamped(self) -> float:
        return max(self.value, 0.0)


def _as_points(values) -> np.ndarray:
    pts = np.asarray(values, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise ValueError("values must be scalars or fixed-length vectors")
    return pts


def _label_codes(labels) -> np.ndarray:
    # Labels may be arbitrary hashables (e.g. mask patterns as big ints).
    table: dict = {}
    codes = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        key = lab.item() if isinstance(lab, np.generic) else lab
        codes[i] = table.setdefault(key, len(table))
    return codes


def ksg_mixed_mi(values, labels, k: int = 3) -> MiEstimate:
    """Mixed continuous-discrete k-nearest-neighbor MI estimate.

    For each point, the radius is the distance (max-norm) to its k-th
    nearest same-label neighbor, with distance ties broken toward the
    smaller point index; the count of all-label neighbors within that
    radius feeds the digamma combination. Points whose label appears only
    once are dropped (their radius is undefined); if every label is unique,
    or only one distinct label exists, the estimate is 0 with a warning.
    """
    pts = _as_points(values)
    codes = _label_codes(labels)
    n = pts.shape[0]
    if codes.shape[0] != n:
        raise ValueError("values and labels must have equal length")
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < k + 2:
        raise ValueError(f"insufficient pairs: need at least {k + 2}, have {n}")
    n_labels = int(codes.max()) + 1 if n else 0
    if n_labels < 2:
        warnings.warn("fewer than 2 distinct labels; mutual information is 0")
        return MiEstimate(0.0, "knn", k, n)

    counts = np.bincount(codes, minlength=n_labels)
    keep = counts[codes] > 1
    if not np.any(keep):
        warnings.warn("all labels are singletons; mutual information estimated as 0")
        return MiEstimate(0.0, "knn", k, n)
    pts = pts[keep]
    codes = codes[keep]
    m = pts.shape[0]

    # Pairwise max-norm distances; n stays at desk scale so O(n^2) is fine.
    dist = np.max(np.abs(pts[:, None, :] - pts[None, :, :]), axis=2)

    psi_k = np.empty(m)
    psi_nx = np.empty(m)
    psi_m = np.empty(m)
    class_sizes = np.bincount(codes)
    idx_all = np.arange(m)
    for i in range(m):
        same = idx_all[(codes == codes[i]) & (idx_all != i)]
        k_i = min(k, same.size)
        order = same[np.lexsort((same, dist[i, same]))]
        kth = order[k_i - 1]
        radius = dist[i, kth]
        d_row = dist[i]
        within = (d_row < radius) | ((d_row == radius) & (idx_all <= kth))
        within[i] = False
        m_i = int(np.count_nonzero(within))
        psi_k[i] = digamma(k_i)
        psi_nx[i] = digamma(class_sizes[codes[i]])
        psi_m[i] = digamma(max(m_i, 1))
    value = float(digamma(m) + np.mean(psi_k) - np.mean(psi_nx) - np.mean(psi_m))
    return MiEstimate(value, "knn", k, n)


def plugin_mi(values, labels, bins: int) -> MiEstimate:
    """Histogram plug-in MI over equal-mass value bins.

    Values are ranked (stable on ties) and cut into ``bins`` near-equal
    cells; the estimate is sum p(v,u) * log(p(v,u) / (p(v) p(u))) over the
    joint cell/label table. Requires at least 4 * bins pairs.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1:
        raise ValueError("plug-in estimator takes scalar values")
    codes = _label_codes(labels)
    n = vals.size
    if codes.shape[0] != n:
        raise ValueError("values and labels must have equal length")
    if bins < 2:
        raise ValueError("bins must be at least 2")
    if n < 4 * bins:
        raise ValueError(f"insufficient pairs: need at least {4 * bins}, have {n}")
    n_labels = int(codes.max()) + 1
    if n_labels < 2:
        warnings.warn("fewer than 2 distinct labels; mutual information is 0")
        return MiEstimate(0.0, "plugin", 0, n)
    ranks = np.empty(n, dtype=np.int64)
    ranks[np.argsort(vals, kind="stable")] = np.arange(n)
    vbin = ranks * bins // n
    joint = np.bincount(vbin * n_labels + codes, minlength=bins * n_labels).reshape(
        bins, n_labels
    )
    p = joint / n
    pv = p.sum(axis=1, keepdims=True)
    pu = p.sum(axis=0, keepdims=True)
    nz = p > 0
    value = float(np.sum(p[nz] * np.log(p[nz] / (pv @ pu)[nz])))
    return MiEstimate(value, "plugin", 0, n)


def _make_fit_fn(trainer):
    """Normalize a trainer argument into ``fit(x, y) -> predict`` form."""
    if isinstance(trainer, TrainerConfig):

        def fit(x, y, cfg=trainer):
            model = train_logistic((x, y), cfg)
            return lambda xs: logistic_predict(model, xs)

        return fit
    if callable(trainer):
        return trainer
    raise TypeError("trainer must be a TrainerConfig or a fit(x, y) -> predict callable")


def _cell_statistics(s: Supersample, fit_fn, method: str, B: int, with_deltas: bool = True):
    """Train on the masked half; return (ece gap, delta1, delta2).

    Uniform-mass edges always come from the training-half scores (the
    scheme is part of the trained model); the deltas use uniform-mass
    edges regardless of the gap's scheme method and are None when skipped.
    """
    x_tr, y_tr = s.split(flipped=False)
    x_te, y_te = s.split(flipped=True)
    predict = fit_fn(x_tr, y_tr)
    scores_tr = np.clip(np.asarray(predict(x_tr), dtype=np.float64), 0.0, 1.0)
    scores_te = np.clip(np.asarray(predict(x_te), dtype=np.float64), 0.0, 1.0)
    n = s.n

    umb = umb_scheme(scores_tr, B) if (method == UMB or with_deltas) else None
    scheme = uwb_scheme(B) if method == UWB else umb

    d_tr = ScoredDataset(scores_tr, y_tr, provenance="supersample-train")
    d_te = ScoredDataset(scores_te, y_te, provenance="supersample-test")
    gap = abs(ece(d_te, scheme).value - ece(d_tr, scheme).value)

    if not with_deltas:
        return gap, None, None
    idx_tr = assign(umb, scores_tr) - 1
    idx_te = assign(umb, scores_te) - 1
    t1 = (
        np.bincount(idx_te, weights=y_te, minlength=umb.B)
        - np.bincount(idx_tr, weights=y_tr, minlength=umb.B)
    ) / n
    t2 = (
        np.bincount(idx_te, minlength=umb.B) - np.bincount(idx_tr, minlength=umb.B)
    ) / n
    delta1 = float(np.sum(np.abs(t1)))
    delta2 = float(np.sum(np.abs(t2)))
    return gap, delta1, delta2


def ecmi_statistic(s: Supersample, trainer, method: str, B: int) -> float:
    """|ECE on the complement half - ECE on the training half| for one mask.

    The model is trained on the mask-selected half; with uniform-mass
    binning, the edges come from the training half's scores.
    """
    if method not in (UWB, UMB):
        raise ValueError(f"unknown scheme method: {method}")
    gap, _, _ = _cell_statistics(s, _make_fit_fn(trainer), method, B, with_deltas=False)
    return gap


def delta_statistics(s: Supersample, trainer, B: int) -> tuple[float, float]:
    """Per-bin label-mass and mass differences between the two halves.

    delta1 sums |per-bin mean of label * indicator on the complement half
    minus the same on the training half|; delta2 does the same with the
    indicator alone. Bins are uniform-mass from the training half.
    """
    _, delta1, delta2 = _cell_statistics(s, _make_fit_fn(trainer), UMB, B)
    return delta1, delta2


@dataclass(frozen=True)
class CmiExperimentConfig:
    """Settings for the supersample mask-information experiment.

    Defaults mirror the desk-scale protocol: 5 supersample draws, 10 mask
    draws each, k = 3 neighbors. ``exhaustive`` switches to enumerating all
    2^n masks (n <= 12) with the plug-in estimator as the oracle.
    """

    n: int
    B: int
    trainer: TrainerConfig
    seed: int
    n_supersamples: int = 5
    n_masks: int = 10
    k: int = 3
    method: str = UMB
    exhaustive: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.B < 1:
            raise ValueError("B must be at least 1")
        if self.n_supersamples < 1:
            raise ValueError("need at least one supersample draw")
        if self.n_masks < 2:
            raise ValueError("need at least two mask draws per supersample")
        if not self.exhaustive and self.n_masks < self.k + 2:
            raise ValueError(
                f"the kNN estimator needs n_masks >= k + 2 = {self.k + 2} draws"
            )
        if self.method not in (UWB, UMB):
            raise ValueError(f"unknown scheme method: {self.method}")
        if self.exhaustive and self.n > 12:
            raise ValueError("exhaustive mask enumeration is limited to n <= 12")
        if self.exhaustive and self.n < 3:
            raise ValueError("exhaustive mode needs n >= 3 for the plug-in estimator")


@dataclass(frozen=True)
class CmiExperimentResult:
    """Mask-information estimates, the mean gap, and the per-cell statistics."""

    ecmi_est: MiEstimate
    i_delta1: MiEstimate
    i_delta2: MiEstimate
    mean_gap: float
    cells: list = field(default_factory=list)


def _mask_pattern(mask: np.ndarray) -> int:
    value = 0
    for bit in np.asarray(mask, dtype=np.int64):
        value = (value << 1) | int(bit)
    return value


def run_cmi_experiment(cfg: CmiExperimentConfig, fit_fn=None) -> CmiExperimentResult:
    """Run the supersample grid and estimate mask information per statistic.

    For each supersample draw, the configured number of masks is sampled
    (or all 2^n masks enumerated in exhaustive mode); each (supersample,
    mask) cell trains on the selected half and records the calibration-gap
    and per-bin difference statistics. Mask information is estimated per
    supersample between statistic values and mask bit patterns, then
    averaged; ``mean_gap`` averages the gap over every cell. Deterministic
    given the config: every cell seeds its own substream.
    """
    if fit_fn is None:
        base_trainer = cfg.trainer
    else:
        base_trainer = None

    gaps_all: list[float] = []
    mi_gap: list[float] = []
    mi_d1: list[float] = []
    mi_d2: list[float] = []
    cells: list[dict] = []
    n_masks_used = 2**cfg.n if cfg.exhaustive else cfg.n_masks

    for s_idx in range(cfg.n_supersamples):
        rng_rows = stream(cfg.seed, s_idx, 0)
        x, y = sample_synthetic(2 * cfg.n, cfg.seed, rng=rng_rows)
        values = x.reshape(cfg.n, 2)
        labels = y.reshape(cfg.n, 2)

        if cfg.exhaustive:
            patterns = np.arange(n_masks_used, dtype=np.int64)
            masks = (
                (patterns[:, None] >> np.arange(cfg.n)[None, :]) & 1
            ).astype(np.int64)
        else:
            rng_masks = stream(cfg.seed, s_idx, 1)
            masks = rng_masks.integers(0, 2, size=(n_masks_used, cfg.n))

        stats = np.empty((n_masks_used, 3))
        pattern_labels: list[int] = []
        for m_idx in range(n_masks_used):
            super_s = Supersample(
                values, labels, masks[m_idx], seed=child_seed(cfg.seed, s_idx, m_idx)
            )
            if base_trainer is not None:
                cell_trainer = replace(
                    base_trainer, seed=child_seed(cfg.seed, s_idx, m_idx, 2)
                )
                cell_fit = _make_fit_fn(cell_trainer)
            else:
                cell_fit = fit_fn
            gap, d1, d2 = _cell_statistics(super_s, cell_fit, cfg.method, cfg.B)
            stats[m_idx] = (gap, d1, d2)
            pattern_labels.append(_mask_pattern(masks[m_idx]))
            for name, value in (("ecmi_gap", gap), ("delta1", d1), ("delta2", d2)):
                cells.append(
                    {
                        "supersample_idx": s_idx,
                        "mask_idx": m_idx,
                        "statistic_name": name,
                        "value": value,
                    }
                )
        gaps_all.extend(stats[:, 0].tolist())

        if cfg.exhaustive:
            bins = max(2, min(8, n_masks_used // 4))
            estimates = [
                plugin_mi(stats[:, j], pattern_labels, bins=bins) for j in range(3)
            ]
        else:
            estimates = [
                ksg_mixed_mi(stats[:, j], pattern_labels, k=cfg.k) for j in range(3)
            ]
        mi_gap.append(estimates[0].value)
        mi_d1.append(estimates[1].value)
        mi_d2.append(estimates[2].value)

    method = "plugin" if cfg.exhaustive else "knn"
    k = 0 if cfg.exhaustive else cfg.k
    total_pairs = cfg.n_supersamples * n_masks_used

    def _avg(values: list[float]) -> MiEstimate:
        return MiEstimate(float(np.mean(values)), method, k, total_pairs)

    return CmiExperimentResult(
        ecmi_est=_avg(mi_gap),
        i_delta1=_avg(mi_d1),
        i_delta2=_avg(mi_d2),
        mean_gap=float(np.mean(gaps_all)),
        cells=cells,
    )
