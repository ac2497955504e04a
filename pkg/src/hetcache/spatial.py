"""Homogeneous Poisson point processes on planar disks.

Points are sampled exactly: the count is Poisson(density * area) and the
positions are i.i.d. uniform on the disk via the inverse-CDF radius transform
r = R*sqrt(u), theta = 2*pi*v (no rejection step).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Region:
    """Open disk of radius `radius` centered at `center`."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"region radius must be positive, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


class PointSet:
    """Immutable set of 2D points stored as an (n, 2) float array."""

    __slots__ = ("points",)

    def __init__(self, points):
        arr = np.asarray(points, dtype=float).reshape(-1, 2).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.all(self.points == other.points)
        )

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)})"


def sample_ppp(density: float, region: Region, rng: np.random.Generator) -> PointSet:
    """Draw one realization of a homogeneous PPP restricted to `region`.

    The point count is Poisson(density * region.area); given the count, points
    are i.i.d. uniform on the disk.
    """
    if density < 0:
        raise ValueError(f"density must be nonnegative, got {density}")
    n = int(rng.poisson(density * region.area))
    radii = region.radius * np.sqrt(rng.random(n))
    angles = 2.0 * math.pi * rng.random(n)
    cx, cy = region.center
    return PointSet(
        np.column_stack((cx + radii * np.cos(angles), cy + radii * np.sin(angles)))
    )


def count_within(points: PointSet, center: tuple[float, float], radius: float) -> int:
    """Number of points strictly closer than `radius` to `center`.

    The boundary is excluded: a point at distance exactly `radius` does not
    count as a neighbor.
    """
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    if len(points) == 0:
        return 0
    d2 = np.sum((points.points - np.asarray(center, dtype=float)) ** 2, axis=1)
    return int(np.count_nonzero(d2 < radius * radius))
