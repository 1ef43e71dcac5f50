"""Uniform-width and uniform-mass binning schemes and per-bin statistics.

Bins are the half-open intervals (u_{i-1}, u_i] over a strictly increasing
edge vector u_0 = 0 < ... < u_B = 1. A score of exactly 0 is assigned to
bin 1 so the bins cover all of [0, 1] and masses always sum to one.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = ["BinningScheme", "BinStats", "uwb_scheme", "umb_scheme", "assign", "bin_stats"]

UWB = "uwb"
UMB = "umb"


@dataclass(frozen=True)
class BinningScheme:
    """Ordered bin edges over [0, 1] plus the method that produced them.

    ``collapsed`` is set when uniform-mass construction had to merge bins
    because of tied scores (the requested bin count could not be realized).
    """

    edges: np.ndarray
    method: str
    collapsed: bool = False

    def __post_init__(self) -> None:
        edges = np.array(self.edges, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 2:
            raise ValueError("edges must hold at least two values")
        if edges[0] != 0.0 or edges[-1] != 1.0:
            raise ValueError("edges must start at 0 and end at 1")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("edges must be strictly increasing")
        if self.method not in (UWB, UMB):
            raise ValueError(f"unknown binning method: {self.method}")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @property
    def B(self) -> int:
        return int(self.edges.size - 1)

    def to_json(self) -> str:
        return json.dumps({"method": self.method, "edges": self.edges.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "BinningScheme":
        obj = json.loads(text)
        return cls(np.asarray(obj["edges"], dtype=np.float64), obj["method"])


def uwb_scheme(B: int) -> BinningScheme:
    """Uniform-width scheme with edges exactly i/B for i = 0..B."""
    if B < 1:
        raise ValueError("B must be at least 1")
    edges = np.arange(B + 1, dtype=np.float64) / B
    edges[-1] = 1.0
    return BinningScheme(edges, UWB)


def umb_scheme(scores, B: int) -> BinningScheme:
    """Uniform-mass scheme with edges at order statistics of the scores.

    Interior edge b is the floor(n_e * b / B)-th order statistic; u_0 = 0
    and u_B = 1. Requires n_e >= 2B. Tied scores can make edges coincide
    or leave the top bin empty; such edges are dropped (with a warning and
    the ``collapsed`` flag), reducing the bin count, so that every bin of
    the returned scheme contains at least one of the construction scores.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if B < 1:
        raise ValueError("B must be at least 1")
    n_e = scores.size
    if n_e < 2 * B:
        raise ValueError(f"need n_e >= 2B samples for UMB, got n_e={n_e}, B={B}")
    if np.any(scores < 0.0) or np.any(scores > 1.0):
        raise ValueError("scores must lie in [0, 1]")
    sorted_scores = np.sort(scores)
    ranks = (np.arange(1, B) * n_e) // B  # 1-indexed order statistics
    interior = sorted_scores[ranks - 1]
    edges = np.unique(np.concatenate(([0.0], interior, [1.0])))
    # An interior edge equal to the maximum score leaves the top bin empty.
    if edges.size > 2 and edges[-2] >= sorted_scores[-1]:
        edges = np.delete(edges, edges.size - 2)
    collapsed = edges.size - 1 < B
    if collapsed:
        warnings.warn(
            f"tied scores collapsed UMB from {B} to {edges.size - 1} bins",
            stacklevel=2,
        )
    return BinningScheme(edges, UMB, collapsed=collapsed)


def assign(scheme: BinningScheme, score) -> int | np.ndarray:
    """Bin index in [1, B] for a score (or array of scores) in [0, 1].

    Intervals are right-closed; a score of exactly 0 maps to bin 1.
    """
    arr = np.asarray(score, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("scores must lie in [0, 1]")
    idx = np.searchsorted(scheme.edges, arr, side="left")
    idx = np.maximum(idx, 1)
    if arr.ndim == 0:
        return int(idx)
    return idx


@dataclass(frozen=True)
class BinStats:
    """Per-bin counts, mean scores, mean labels, and masses for one dataset.

    Empty bins carry count 0, mass 0, and NaN means; the NaNs mark the
    means as undefined and are never folded into downstream estimates.
    """

    counts: np.ndarray
    mean_scores: np.ndarray
    mean_labels: np.ndarray
    masses: np.ndarray
    n: int

    @property
    def B(self) -> int:
        return int(self.counts.size)


def bin_stats(scheme: BinningScheme, dataset) -> BinStats:
    """Counts and per-bin score/label means of a dataset under a scheme."""
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    idx = assign(scheme, dataset.scores) - 1
    B = scheme.B
    counts = np.bincount(idx, minlength=B).astype(np.int64)
    sum_scores = np.bincount(idx, weights=dataset.scores, minlength=B)
    sum_labels = np.bincount(idx, weights=dataset.labels, minlength=B)
    nonempty = counts > 0
    mean_scores = np.full(B, np.nan)
    mean_labels = np.full(B, np.nan)
    mean_scores[nonempty] = sum_scores[nonempty] / counts[nonempty]
    mean_labels[nonempty] = sum_labels[nonempty] / counts[nonempty]
    masses = counts / len(dataset)
    return BinStats(counts, mean_scores, mean_labels, masses, n=len(dataset))
