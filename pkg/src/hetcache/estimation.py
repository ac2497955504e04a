"""Popularity-profile estimators.

The BS estimates the profile from observed requests as plain empirical
frequencies; the transfer-learning variant pools the target-domain counts
with m source-domain samples:

    p_hat_i       = S_i^tar / n_p
    p_hat_i^(tl)  = (S_i^tar + S_i^src) / (n_p + m)

Both operate on count vectors so the two pipelines share one code path.
Estimating with zero samples is an explicit error rather than a uniform
fallback: silently substituting a prior would contaminate the waiting-time
validation experiments.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import PopularityProfile
from .simulation import RequestLog, SourceSamples


class NoSamplesError(ValueError):
    """Raised when an estimator is evaluated on zero samples."""


@dataclass(frozen=True)
class CountVector:
    """Per-file request counts plus their total."""

    counts: np.ndarray
    total: int

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=np.int64).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("counts must be a nonempty 1D vector")
        if np.any(arr < 0):
            raise ValueError("counts must be nonnegative")
        if int(arr.sum()) != self.total:
            raise ValueError(f"total {self.total} does not match sum {int(arr.sum())}")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    def __len__(self) -> int:
        return self.counts.size

    def to_json(self) -> str:
        return json.dumps({"counts": [int(c) for c in self.counts], "total": int(self.total)})

    @classmethod
    def from_json(cls, text: str) -> "CountVector":
        doc = json.loads(text)
        return cls(np.asarray(doc["counts"], dtype=np.int64), int(doc["total"]))


def _count_indices(indices: np.ndarray, N: int) -> CountVector:
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 1 or indices.max() > N):
        raise ValueError(f"file indices must lie in [1, {N}]")
    counts = np.bincount(indices - 1, minlength=N) if indices.size else np.zeros(N, np.int64)
    return CountVector(counts.astype(np.int64), int(indices.size))


def target_counts(log: RequestLog, N: int) -> CountVector:
    """Per-file request counts across all users of the log."""
    return _count_indices(log.all_files(), N)


def source_counts(samples: SourceSamples, N: int) -> CountVector:
    """Per-file counts of the source-domain samples."""
    return _count_indices(samples.indices, N)


def profile_from_counts(counts: CountVector) -> PopularityProfile:
    if counts.total == 0:
        raise NoSamplesError("cannot estimate a popularity profile from zero samples")
    return PopularityProfile(counts.counts / counts.total)


def estimate_popularity(log: RequestLog, N: int) -> PopularityProfile:
    """Empirical-frequency estimate of the popularity profile (unbiased given
    a nonempty log)."""
    return profile_from_counts(target_counts(log, N))


def tl_estimate(target: CountVector, source: CountVector) -> PopularityProfile:
    """Transfer-learning estimate pooling target and source counts."""
    if len(target) != len(source):
        raise ValueError(
            f"count vectors must have equal length, got {len(target)} and {len(source)}"
        )
    total = target.total + source.total
    if total == 0:
        raise NoSamplesError("cannot estimate a popularity profile from zero samples")
    return PopularityProfile((target.counts + source.counts) / total)


def sup_distance(p: PopularityProfile, q: PopularityProfile) -> float:
    """Sup-norm distance max_i |p_i - q_i| between two profiles."""
    if len(p) != len(q):
        raise ValueError(f"profiles must have equal length, got {len(p)} and {len(q)}")
    return float(np.max(np.abs(p.p - q.p)))
