"""Monte Carlo oracle for the offloading loss and Poisson request traces.

The miss simulation places the typical user at the origin (Slivnyak: the
Palm distribution of a PPP seen from one of its points is the process plus
that point, so conditioning on the user costs nothing) and asks whether any
SBS of a fresh PPP(lambda_s) realization on the disk of radius gamma caches
the requested file.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import CachingStrategy, NetworkConfig, PopularityProfile, sample_cache
from .spatial import PointSet, Region, count_within, sample_ppp
from .streams import generator, seed_sequence, substream

# Trials are vectorized in fixed-size blocks; block b draws from the
# substream (seed, b), so aggregates are bit-identical no matter how blocks
# are scheduled across workers.
MC_BLOCK_SIZE = 8192


@dataclass(frozen=True)
class UserRequests:
    """Request trace of a single user: position plus (time, file) pairs."""

    position: tuple[float, float]
    times: np.ndarray
    files: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).copy()
        files = np.asarray(self.files, dtype=np.int64).copy()
        if times.shape != files.shape or times.ndim != 1:
            raise ValueError("times and files must be 1D arrays of equal length")
        if times.size and np.any(np.diff(times) < 0):
            raise ValueError("request times must be sorted ascending")
        times.setflags(write=False)
        files.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "files", files)

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class RequestLog:
    """Per-user request traces observed by the BS over the window [0, tau]."""

    users: tuple
    tau: float

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        users = tuple(self.users)
        for u in users:
            if u.times.size and (u.times[0] < 0 or u.times[-1] > self.tau):
                raise ValueError("request times must lie in [0, tau]")
        object.__setattr__(self, "users", users)

    def total_requests(self) -> int:
        return sum(len(u) for u in self.users)

    def all_files(self) -> np.ndarray:
        """All requested file indices, users concatenated in order."""
        if not self.users:
            return np.empty(0, dtype=np.int64)
        return np.concatenate([u.files for u in self.users])

    def to_json(self) -> str:
        return json.dumps(
            {
                "tau": self.tau,
                "users": [
                    {
                        "position": [float(u.position[0]), float(u.position[1])],
                        "times": [float(t) for t in u.times],
                        "files": [int(f) for f in u.files],
                    }
                    for u in self.users
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "RequestLog":
        doc = json.loads(text)
        users = tuple(
            UserRequests(tuple(u["position"]), u["times"], u["files"]) for u in doc["users"]
        )
        return cls(users=users, tau=doc["tau"])

    def write_csv(self, path) -> None:
        """Flat (user_id, time, file_index) export for inspection."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["user_id", "time", "file_index"])
            for uid, u in enumerate(self.users):
                for t, f in zip(u.times, u.files):
                    writer.writerow([uid, f"{t:.17g}", int(f)])


@dataclass(frozen=True)
class SourceSamples:
    """m i.i.d. file indices drawn from the source-domain distribution Q."""

    indices: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.indices, dtype=np.int64).reshape(-1).copy()
        if arr.size and np.any(arr < 1):
            raise ValueError("file indices are 1-based")
        arr.setflags(write=False)
        object.__setattr__(self, "indices", arr)

    def __len__(self) -> int:
        return self.indices.size

    def to_json(self) -> str:
        return json.dumps([int(i) for i in self.indices])

    @classmethod
    def from_json(cls, text: str) -> "SourceSamples":
        return cls(np.asarray(json.loads(text), dtype=np.int64))


@dataclass(frozen=True)
class LossEstimate:
    """Monte Carlo estimate of the offloading loss."""

    mean: float
    stderr: float
    miss_fraction: float
    trials: int


def simulate_miss_event(
    strategy: CachingStrategy,
    file_index: int,
    config: NetworkConfig,
    rng: np.random.Generator,
) -> bool:
    """One realization of the miss indicator for a user at the origin.

    Samples SBS positions from PPP(lambda_s) on the disk of radius gamma,
    draws each SBS's cache i.i.d. from Pi, and reports True iff no neighbor
    holds `file_index`.
    """
    if not 1 <= file_index <= config.N:
        raise ValueError(f"file_index must lie in [1, {config.N}], got {file_index}")
    sbs = sample_ppp(config.lambda_s, Region((0.0, 0.0), config.gamma), rng)
    holders = [
        xy
        for xy in sbs.points
        if file_index in sample_cache(strategy, config.M, rng)
    ]
    if not holders:
        return True
    return count_within(PointSet(holders), (0.0, 0.0), config.gamma) == 0


def _miss_block(
    strategy: CachingStrategy,
    profile: PopularityProfile,
    config: NetworkConfig,
    n: int,
    rng: np.random.Generator,
) -> int:
    """Miss count over n trials, vectorized.

    SBS positions are exchangeable marks here: the miss indicator depends only
    on the neighbor count and the cache draws, so positions are not sampled.
    """
    files = rng.choice(config.N, size=n, p=profile.p) + 1
    counts = rng.poisson(config.sbs_neighbor_mean, size=n)
    total = int(counts.sum())
    entries = rng.choice(config.N, size=(total, config.M), p=strategy.pi) + 1
    owner = np.repeat(np.arange(n), counts)
    hit = (entries == files[owner][:, None]).any(axis=1)
    missed = np.ones(n, dtype=bool)
    missed[owner[hit]] = False
    return int(missed.sum())


def mc_offloading_loss(
    strategy: CachingStrategy,
    profile: PopularityProfile,
    config: NetworkConfig,
    trials: int,
    seed,
    workers: int = 1,
) -> LossEstimate:
    """Monte Carlo estimate of the offloading loss over `trials` miss events.

    Each trial draws a file from the popularity profile and simulates the
    miss event.  Work is split into fixed blocks whose streams derive from
    (seed, block index); the aggregate is reduced in block order, so the
    result is identical for any `workers` count.
    """
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials}")
    trials = int(trials)
    root = seed_sequence(seed)
    blocks = [
        (b, min(MC_BLOCK_SIZE, trials - b * MC_BLOCK_SIZE))
        for b in range((trials + MC_BLOCK_SIZE - 1) // MC_BLOCK_SIZE)
    ]

    def run_block(args):
        b, size = args
        return _miss_block(strategy, profile, config, size, generator(substream(root, b)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run_block, blocks))
    else:
        counts = [run_block(args) for args in blocks]

    misses = sum(counts)
    frac = misses / trials
    scale = config.backhaul_time
    stderr = scale * math.sqrt(frac * (1.0 - frac) / trials)
    return LossEstimate(mean=scale * frac, stderr=stderr, miss_fraction=frac, trials=trials)


def generate_requests(
    profile: PopularityProfile,
    config: NetworkConfig,
    tau: float,
    rng: np.random.Generator,
) -> RequestLog:
    """Generate a request trace over [0, tau].

    Users are a PPP(lambda_u) realization on the coverage disk; each user's
    request count is Poisson(lambda_r * tau) with arrival times i.i.d. uniform
    on the window (order statistics of the Poisson process) and file indices
    i.i.d. from the popularity profile.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    if len(profile) != config.N:
        raise ValueError("profile length must match config.N")
    positions = sample_ppp(config.lambda_u, Region((0.0, 0.0), config.R), rng)
    users = []
    for xy in positions.points:
        k = int(rng.poisson(config.lambda_r * tau))
        times = np.sort(rng.random(k) * tau)
        files = rng.choice(config.N, size=k, p=profile.p) + 1
        users.append(UserRequests((float(xy[0]), float(xy[1])), times, files))
    return RequestLog(users=tuple(users), tau=float(tau))


def generate_source_samples(
    q: PopularityProfile, m: int, rng: np.random.Generator
) -> SourceSamples:
    """m i.i.d. draws from the source-domain distribution Q."""
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    return SourceSamples(rng.choice(len(q), size=int(m), p=q.p) + 1)
