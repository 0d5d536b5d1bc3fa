"""Spatial deployments: Poisson point processes on a rectangle with torus distance.

Base stations and users are dropped as independent homogeneous PPPs. The
default region wraps around (torus metric) so that interference statistics
are free of edge effects; the flat metric is kept for debugging.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix_seed(master_seed: int, k: int) -> int:
    """Derive the k-th child seed from a master seed.

    Uses the SplitMix64 output function evaluated at stream offset ``k``,
    so child streams are reproducible across runs and implementations:
    ``z = finalize(master + (k + 1) * 0x9E3779B97F4A7C15)`` with the
    standard 64-bit xor-shift/multiply finalizer.
    """
    z = (master_seed + (k + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class Region:
    """Rectangular deployment region, optionally with wraparound distance."""

    width_km: float = 1.0
    height_km: float = 1.0
    wraparound: bool = True

    def __post_init__(self):
        if self.width_km <= 0 or self.height_km <= 0:
            raise ValueError("region dimensions must be positive")

    @property
    def area_km2(self) -> float:
        return self.width_km * self.height_km


@dataclass
class Deployment:
    """One operator's realized BS and UE positions (km) plus the generating intensities."""

    operator_id: int
    bs_xy: np.ndarray  # (n_bs, 2) km
    ue_xy: np.ndarray  # (n_ue, 2) km
    bs_density_per_km2: float = 0.0
    ue_density_per_km2: float = 0.0

    @property
    def n_bs(self) -> int:
        return len(self.bs_xy)

    @property
    def n_ue(self) -> int:
        return len(self.ue_xy)


def deploy_ppp(density_per_km2: float, region: Region, seed: int) -> np.ndarray:
    """Draw one homogeneous PPP realization on the region.

    The point count is Poisson(density * area) and positions are i.i.d.
    uniform. Identical (density, region, seed) gives a bit-identical array.

    Returns an (n, 2) array of (x_km, y_km) positions.
    """
    if density_per_km2 < 0:
        raise ValueError(f"density must be >= 0, got {density_per_km2}")
    rng = np.random.default_rng(seed)
    n = rng.poisson(density_per_km2 * region.area_km2)
    xy = np.empty((n, 2))
    xy[:, 0] = rng.uniform(0.0, region.width_km, n)
    xy[:, 1] = rng.uniform(0.0, region.height_km, n)
    return xy


def wrapped_delta(p_xy: np.ndarray, q_xy: np.ndarray, region: Region) -> np.ndarray:
    """Displacement q - p under the region metric (minimum torus image if wrapping)."""
    d = np.asarray(q_xy, dtype=float) - np.asarray(p_xy, dtype=float)
    if region.wraparound:
        d = d.copy()
        w, h = region.width_km, region.height_km
        d[..., 0] -= w * np.round(d[..., 0] / w)
        d[..., 1] -= h * np.round(d[..., 1] / h)
    return d


def distance(p, q, region: Region) -> float:
    """Distance in km between two points; minimum over torus images when wrapping."""
    d = wrapped_delta(np.asarray(p, dtype=float), np.asarray(q, dtype=float), region)
    return float(math.hypot(d[0], d[1]))


def pairwise_distance_km(a_xy: np.ndarray, b_xy: np.ndarray, region: Region) -> np.ndarray:
    """All pairwise distances (len(a), len(b)) in km under the region metric."""
    a = np.asarray(a_xy, dtype=float)
    b = np.asarray(b_xy, dtype=float)
    d = wrapped_delta(a[:, None, :], b[None, :, :], region)
    return np.hypot(d[..., 0], d[..., 1])


def avg_cell_radius_m(density_per_km2: float) -> float:
    """Radius in meters of a disc whose area is the mean cell area 1/density."""
    if density_per_km2 <= 0:
        raise ValueError(f"density must be > 0, got {density_per_km2}")
    return 1000.0 / math.sqrt(math.pi * density_per_km2)


def deploy_operator(
    operator_id: int,
    bs_density_per_km2: float,
    ue_density_per_km2: float,
    region: Region,
    seed: int,
) -> Deployment:
    """Drop one operator's BSs and UEs from independent child streams of `seed`."""
    return Deployment(
        operator_id=operator_id,
        bs_xy=deploy_ppp(bs_density_per_km2, region, mix_seed(seed, 0)),
        ue_xy=deploy_ppp(ue_density_per_km2, region, mix_seed(seed, 1)),
        bs_density_per_km2=bs_density_per_km2,
        ue_density_per_km2=ue_density_per_km2,
    )
