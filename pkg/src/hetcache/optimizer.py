"""Simplex-constrained minimization of the offloading loss.

The workhorse is multi-start projected gradient descent with a backtracking
(Armijo) line search; the problem is non-convex for M >= 2, so restarts hedge
against local minima.  Two independent oracles keep it honest: an exact KKT
waterfilling solution for M = 1 (where the objective is convex) and an
exhaustive simplex-lattice search for small N.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .core import CachingStrategy, NetworkConfig, PopularityProfile, _miss_exponent
from .streams import generator

ARMIJO_C = 1e-4


@dataclass(frozen=True)
class SolverOptions:
    restarts: int = 16
    max_iterations: int = 100_000
    step_rule: str = "backtracking"  # or "fixed"
    tolerance: float = 1e-10  # absolute objective change
    grid_resolution: float = 0.01  # simplex lattice step for the brute-force oracle
    seed: int = 0
    step_size: float = 1.0  # fixed step, or the initial backtracking step

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be positive, got {self.restarts}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be positive, got {self.max_iterations}")
        if self.step_rule not in ("fixed", "backtracking"):
            raise ValueError(f"unknown step_rule {self.step_rule!r}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if not 0.0 < self.grid_resolution <= 1.0:
            raise ValueError(f"grid_resolution must lie in (0, 1], got {self.grid_resolution}")
        if not self.step_size > 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")


@dataclass(frozen=True)
class SolverResult:
    strategy: CachingStrategy
    objective: float
    converged: bool
    restart_index: int
    restart_objectives: tuple
    objective_trace: tuple  # trace of the winning restart

    def to_dict(self) -> dict:
        return {
            "strategy": [float(x) for x in self.strategy.pi],
            "objective": self.objective,
            "converged": self.converged,
            "restart_index": self.restart_index,
            "restart_objectives": list(self.restart_objectives),
            "objective_trace": list(self.objective_trace),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _objective(pi: np.ndarray, p: np.ndarray, config: NetworkConfig) -> float:
    return config.backhaul_time * float(np.dot(p, np.exp(-_miss_exponent(pi, config))))


def _gradient(pi: np.ndarray, p: np.ndarray, config: NetworkConfig) -> np.ndarray:
    c_gamma = math.pi * config.gamma**2
    surv = (1.0 - pi) ** (config.M - 1)
    if config.formula_mode == "main_text":
        # d/dpi exp{-lambda_u pi gamma^2 (1-pi)^M} is positive: the literal
        # published form increases with the caching probability.
        c = config.lambda_u * c_gamma
        outer = np.exp(-c * (1.0 - pi) ** config.M)
        return config.backhaul_time * p * c * config.M * surv * outer
    c = config.lambda_s * c_gamma
    outer = np.exp(-c * (1.0 - (1.0 - pi) ** config.M))
    return -config.backhaul_time * p * c * config.M * surv * outer


def loss_gradient(
    strategy: CachingStrategy, profile: PopularityProfile, config: NetworkConfig
) -> np.ndarray:
    """Analytic gradient of the offloading loss with respect to pi."""
    if len(strategy) != config.N or len(profile) != config.N:
        raise ValueError("strategy/profile length must match config.N")
    return _gradient(strategy.pi, profile.p, config)


def _project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    cumsum = np.cumsum(u)
    ks = np.arange(1, v.size + 1)
    rho = np.nonzero(u + (1.0 - cumsum) / ks > 0)[0][-1]
    lam = (1.0 - cumsum[rho]) / (rho + 1.0)
    return np.maximum(v + lam, 0.0)


def project_simplex(v) -> CachingStrategy:
    """Euclidean projection of an arbitrary vector onto the simplex."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("v must be a nonempty 1D vector")
    return CachingStrategy(_project(v))


def _align_to_popularity(pi: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Reorder pi so more popular files get at least as much caching mass.

    Swapping a misordered pair never increases sum_i p_i * miss(pi_i) because
    the miss probability decreases in pi_i (rearrangement inequality), so this
    is a free descent step.  Stable sorts leave tied popularities alone.
    """
    order = np.argsort(-p, kind="stable")
    aligned = np.empty_like(pi)
    aligned[order] = np.sort(pi)[::-1]
    return aligned


def _descend(
    start: np.ndarray, p: np.ndarray, config: NetworkConfig, opts: SolverOptions
) -> tuple[np.ndarray, float, bool, list]:
    x = start.copy()
    obj = _objective(x, p, config)
    trace = [obj]
    step = opts.step_size
    converged = False
    for _ in range(opts.max_iterations):
        grad = _gradient(x, p, config)
        if opts.step_rule == "fixed":
            y = _project(x - opts.step_size * grad)
            new_obj = _objective(y, p, config)
        else:
            step = min(step * 2.0, 1e6)  # let the step grow back after cautious phases
            while True:
                y = _project(x - step * grad)
                new_obj = _objective(y, p, config)
                if new_obj <= obj + ARMIJO_C * float(np.dot(grad, y - x)):
                    break
                step *= 0.5
                if step < 1e-18:
                    y = x
                    new_obj = obj
                    break
        delta = obj - new_obj
        x, obj = y, new_obj
        trace.append(obj)
        if 0 <= delta < opts.tolerance:
            converged = True
            break
    return x, obj, converged, trace


def optimize_strategy(
    profile: PopularityProfile, config: NetworkConfig, opts: SolverOptions | None = None
) -> SolverResult:
    """Minimize the offloading loss over the simplex by multi-start projected
    gradient descent.

    The first start is the uniform strategy, the rest are Dirichlet(1) draws;
    the winner is chosen by (objective, restart index) so results are
    deterministic under parallel restart evaluation.  The returned objective
    never exceeds the loss of the uniform strategy.
    """
    if opts is None:
        opts = SolverOptions()
    if len(profile) != config.N:
        raise ValueError("profile length must match config.N")
    p = profile.p
    n = config.N
    rng = generator(opts.seed)
    starts = [np.full(n, 1.0 / n)]
    starts += [rng.dirichlet(np.ones(n)) for _ in range(opts.restarts - 1)]

    best = None
    restart_objectives = []
    for idx, start in enumerate(starts):
        x, obj, converged, trace = _descend(start, p, config, opts)
        aligned = _align_to_popularity(x, p)
        aligned_obj = _objective(aligned, p, config)
        if aligned_obj <= obj:  # never worse by the rearrangement inequality
            x, obj = aligned, aligned_obj
            trace.append(obj)
        restart_objectives.append(obj)
        if best is None or obj < best[1]:
            best = (x, obj, converged, idx, trace)

    x, obj, converged, idx, trace = best
    return SolverResult(
        strategy=CachingStrategy(_project(x)),
        objective=obj,
        converged=converged,
        restart_index=idx,
        restart_objectives=tuple(restart_objectives),
        objective_trace=tuple(trace),
    )


def waterfilling_M1(profile: PopularityProfile, c: float, M: int = 1) -> CachingStrategy:
    """Exact KKT solution of min sum_i p_i exp(-c pi_i) over the simplex.

    Valid only for cache size 1, where the appendix-form objective reduces to
    sum_i p_i exp(-c pi_i), which is convex.  Stationarity on the active set
    gives pi_i = (1/c) ln(c p_i / mu); coordinates whose c p_i falls below the
    water level mu clamp to zero.
    """
    if M != 1:
        raise ValueError(f"waterfilling closed form requires M=1, got M={M}")
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    p = profile.p
    n = p.size
    order = np.argsort(-p, kind="stable")
    ps = p[order]
    for k in range(n, 0, -1):
        active = ps[:k]
        if active[-1] <= 0:
            continue
        ln_mu = (np.log(c * active).sum() - c) / k
        pi_active = (np.log(c * active) - ln_mu) / c
        mu = math.exp(ln_mu)
        feasible = pi_active[-1] >= 0 and (k == n or c * ps[k] <= mu)
        if feasible:
            pi = np.zeros(n)
            pi[order[:k]] = pi_active
            return CachingStrategy(_project(pi))
    raise RuntimeError("waterfilling failed to find a feasible active set")


@dataclass(frozen=True)
class GridOptimum:
    strategy: CachingStrategy
    objective: float


def brute_force_optimum(
    profile: PopularityProfile, config: NetworkConfig, grid_resolution: float = 0.01
) -> GridOptimum:
    """Exhaustive search over the simplex lattice with the given step.

    Cost grows as C(k+N-1, N-1) with k = 1/step, so this oracle refuses
    N > 4.
    """
    if config.N > 4:
        raise ValueError(f"brute force oracle refuses N > 4, got N={config.N}")
    if not 0.0 < grid_resolution <= 1.0:
        raise ValueError(f"grid_resolution must lie in (0, 1], got {grid_resolution}")
    if len(profile) != config.N:
        raise ValueError("profile length must match config.N")
    k = round(1.0 / grid_resolution)
    n = config.N
    # compositions of k into n parts via divider positions
    dividers = itertools.combinations(range(k + n - 1), n - 1)
    rows = []
    for cut in dividers:
        edges = (-1,) + cut + (k + n - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(n)])
    grid = np.asarray(rows, dtype=float) / k
    losses = config.backhaul_time * (np.exp(-_miss_exponent(grid, config)) @ profile.p)
    best = int(np.argmin(losses))
    return GridOptimum(strategy=CachingStrategy(grid[best]), objective=float(losses[best]))
