"""Network parameters, popularity profiles, and the closed-form offloading loss.

The offloading loss of a random caching strategy Pi under popularity P is

    T(Pi, P) = (B / R0) * sum_i p_i * exp{-lambda_s * pi * gamma^2 * [1 - (1 - pi_i)^M]}

i.e. the backhaul time B/R0 weighted by the probability that no small base
station within the communication radius gamma caches the requested file.  The
exponent is the void probability of the thinned SBS process: an SBS misses
file i with probability (1 - pi_i)^M when it draws its M cache slots i.i.d.
from Pi.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

FORMULA_MODES = ("appendix", "main_text")

# |sum - 1| larger than this is rejected outright; anything closer is
# renormalized so stored vectors satisfy the 1e-12 simplex invariant.
SIMPLEX_REJECT_TOL = 1e-9


@dataclass(frozen=True)
class NetworkConfig:
    """Scalar model parameters of the heterogeneous caching network.

    lambda_b is carried for completeness but drives no computation; the
    analysis conditions on a single base station's coverage disk.

    formula_mode selects the exponent of the miss probability:
      * "appendix" (default): lambda_s * pi * gamma^2 * [1 - (1 - pi_i)^M],
        the physically consistent form (pi_i = 0 gives a certain miss,
        pi_i = 1 gives the SBS void probability).
      * "main_text": lambda_u * pi * gamma^2 * (1 - pi_i)^M, the literal
        published closed form, kept only for bound reproduction; it does not
        agree with the event-level simulation.
    """

    lambda_u: float  # user density (per unit area)
    lambda_s: float  # SBS density (per unit area)
    lambda_r: float  # request rate (per unit time per user)
    R: float  # BS coverage radius
    gamma: float  # SBS communication radius
    B: float  # file size (bits)
    R0: float  # BS-to-user rate (bits per unit time)
    N: int  # catalog size
    M: int  # cache slots per SBS
    lambda_b: float = 0.0  # BS density, informational only
    formula_mode: str = "appendix"

    def __post_init__(self):
        for name in ("lambda_u", "lambda_s", "lambda_b", "lambda_r"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        for name in ("R", "gamma", "B", "R0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        if self.formula_mode not in FORMULA_MODES:
            raise ValueError(
                f"formula_mode must be one of {FORMULA_MODES}, got {self.formula_mode!r}"
            )

    @property
    def coverage_area(self) -> float:
        """Area pi*R^2 of one BS coverage disk."""
        return math.pi * self.R**2

    @property
    def sbs_neighbor_mean(self) -> float:
        """Mean SBS count within the communication radius, lambda_s*pi*gamma^2."""
        return self.lambda_s * math.pi * self.gamma**2

    @property
    def user_disk_mean(self) -> float:
        """Mean user count in the coverage disk, lambda_u*pi*R^2."""
        return self.lambda_u * self.coverage_area

    @property
    def backhaul_time(self) -> float:
        """Time overhead B/R0 of serving one file over the backhaul."""
        return self.B / self.R0


def _as_simplex(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).copy()
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{what} must be a nonempty 1D vector")
    # forgive float dust from projections, reject genuinely negative entries
    arr[(arr < 0) & (arr > -1e-12)] = 0.0
    if np.any(arr < 0) or np.any(arr > 1 + 1e-9):
        raise ValueError(f"{what} entries must lie in [0, 1]")
    total = float(arr.sum())
    if abs(total - 1.0) > SIMPLEX_REJECT_TOL:
        raise ValueError(f"{what} must sum to 1 within {SIMPLEX_REJECT_TOL}, got {total!r}")
    arr /= total
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PopularityProfile:
    """Probability vector over the N-file catalog."""

    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _as_simplex(self.p, "popularity profile"))

    def __len__(self) -> int:
        return self.p.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, PopularityProfile):
            return NotImplemented
        return bool(np.array_equal(self.p, other.p))

    def to_json(self) -> str:
        return json.dumps([float(x) for x in self.p])

    @classmethod
    def from_json(cls, text: str) -> "PopularityProfile":
        return cls(json.loads(text))


@dataclass(frozen=True, eq=False)
class CachingStrategy:
    """Distribution from which each SBS draws its M cached file indices."""

    pi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pi", _as_simplex(self.pi, "caching strategy"))

    def __len__(self) -> int:
        return self.pi.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, CachingStrategy):
            return NotImplemented
        return bool(np.array_equal(self.pi, other.pi))

    def to_json(self) -> str:
        return json.dumps([float(x) for x in self.pi])

    @classmethod
    def from_json(cls, text: str) -> "CachingStrategy":
        return cls(json.loads(text))


@dataclass(frozen=True)
class CacheContents:
    """The M file indices (1-based, duplicates allowed) held by one SBS."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.int64).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("cache contents must be a nonempty 1D index vector")
        if np.any(arr < 1):
            raise ValueError("file indices are 1-based")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def __len__(self) -> int:
        return self.entries.size

    def __contains__(self, file_index: int) -> bool:
        return bool(np.any(self.entries == file_index))


def zipf_profile(N: int, s: float) -> PopularityProfile:
    """Zipf popularity p_i proportional to i^(-s), i = 1..N."""
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    if s < 0:
        raise ValueError(f"Zipf exponent must be nonnegative, got {s}")
    weights = np.arange(1, N + 1, dtype=float) ** (-float(s))
    return PopularityProfile(weights / weights.sum())


def uniform_strategy(N: int) -> CachingStrategy:
    return CachingStrategy(np.full(N, 1.0 / N))


def sample_cache(strategy: CachingStrategy, M: int, rng: np.random.Generator) -> CacheContents:
    """Draw the M cache slots of one SBS i.i.d. from Pi (with replacement)."""
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    entries = rng.choice(len(strategy), size=int(M), p=strategy.pi) + 1
    return CacheContents(entries)


def _miss_exponent(pi_i, config: NetworkConfig):
    surv = (1.0 - pi_i) ** config.M
    if config.formula_mode == "main_text":
        return config.lambda_u * math.pi * config.gamma**2 * surv
    return config.sbs_neighbor_mean * (1.0 - surv)


def miss_probability(pi_i: float, config: NetworkConfig) -> float:
    """Probability that no SBS within radius gamma caches a file with caching
    probability pi_i."""
    if not 0.0 <= pi_i <= 1.0:
        raise ValueError(f"pi_i must lie in [0, 1], got {pi_i}")
    return math.exp(-_miss_exponent(float(pi_i), config))


def offloading_loss(
    strategy: CachingStrategy, profile: PopularityProfile, config: NetworkConfig
) -> float:
    """Average backhaul time overhead of `strategy` under popularity `profile`."""
    if len(strategy) != config.N or len(profile) != config.N:
        raise ValueError(
            f"strategy/profile length must match config.N={config.N}, "
            f"got {len(strategy)}/{len(profile)}"
        )
    miss = np.exp(-_miss_exponent(strategy.pi, config))
    return config.backhaul_time * float(np.dot(profile.p, miss))
