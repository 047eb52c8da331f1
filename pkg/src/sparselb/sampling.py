"""Deterministic sphere samples with covering-radius bookkeeping.

Sphere searches bracket suprema as ``best sample value + L * mesh`` where
``mesh`` bounds the chordal covering radius of the sample.  In dimensions
1-3 the constructions below carry proven mesh bounds (uniform circle grid;
normalized cube-surface grid, whose mesh bound follows from the 1-Lipschitz
projection onto the unit ball).  In higher dimensions a seeded
low-discrepancy sample is used and the mesh is an empirical estimate with
a safety factor; ``SphereSample.certified`` records which case applies.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["SphereSample", "sphere_sample", "ksparse_sphere_sample"]


@dataclass(frozen=True)
class SphereSample:
    """Unit vectors with a (possibly estimated) covering-radius bound."""

    points: np.ndarray
    mesh: float
    certified: bool

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def with_extra(self, extra: np.ndarray) -> "SphereSample":
        """Append extra unit vectors; the mesh bound can only improve."""
        extra = np.atleast_2d(np.asarray(extra, dtype=float))
        if extra.size == 0:
            return self
        return SphereSample(np.vstack([self.points, extra]), self.mesh, self.certified)


def _circle(n: int) -> SphereSample:
    ang = 2.0 * math.pi * np.arange(n) / n
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    return SphereSample(pts, 2.0 * math.sin(math.pi / (2 * n)), True)


def _cube_surface(d: int, m: int) -> SphereSample:
    """Normalized grid on the cube surface; mesh <= sqrt(d-1)/m."""
    ticks = np.linspace(-1.0, 1.0, m + 1)
    rows = []
    seen = set()
    for axis in range(d):
        for sign in (-1.0, 1.0):
            for combo in itertools.product(ticks, repeat=d - 1):
                v = np.empty(d)
                v[axis] = sign
                v[[i for i in range(d) if i != axis]] = combo
                u = v / np.linalg.norm(v)
                key = u.tobytes()
                if key not in seen:
                    seen.add(key)
                    rows.append(u)
    return SphereSample(np.array(rows), math.sqrt(d - 1) / m, True)


def _gaussian(d: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, d))
    norms = np.linalg.norm(pts, axis=1)
    ok = norms > 1e-12
    return pts[ok] / norms[ok, None]


def _estimate_mesh(points: np.ndarray, seed: int, n_probe: int = 4096,
                   safety: float = 1.5) -> float:
    from scipy.spatial import cKDTree

    d = points.shape[1]
    probes = _gaussian(d, n_probe, seed + 104729)
    dist, _ = cKDTree(points).query(probes, k=1)
    return safety * float(dist.max())


def sphere_sample(d: int, n_target: int, seed: int = 0,
                  estimate_mesh: bool = True) -> SphereSample:
    """A deterministic sample of the unit sphere of R^d.

    Meshes are certified for d <= 3 and estimated (safety factor 1.5)
    above; pass ``estimate_mesh=False`` to skip the estimate when no
    Lipschitz certificate is needed (the mesh is then +inf).
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if n_target < 1:
        raise ValueError("sample size must be >= 1")
    if d == 1:
        return SphereSample(np.array([[1.0], [-1.0]]), 0.0, True)
    if d == 2:
        return _circle(max(8, n_target))
    if d == 3:
        # 6(m+1)^2 points before dedup
        m = max(4, int(math.sqrt(max(1, n_target // 6))))
        return _cube_surface(3, m)
    pts = _gaussian(d, n_target, seed)
    # antithetic pairs keep the sample symmetric
    pts = np.vstack([pts, -pts])
    mesh = _estimate_mesh(pts, seed) if estimate_mesh else math.inf
    return SphereSample(pts, mesh, False)


def ksparse_sphere_sample(d: int, k: int, n_per_support: int,
                          seed: int = 0) -> SphereSample:
    """Union of per-support subsphere samples over all supports of size k.

    Covers the domain of radial profiles restricted to k-sparse directions;
    the mesh is the worst per-support mesh (certified for k <= 3).
    """
    if not 1 <= k <= d:
        raise ValueError(f"k={k} out of range [1, {d}]")
    base = sphere_sample(k, n_per_support, seed)
    rows = []
    for support in itertools.combinations(range(d), k):
        block = np.zeros((len(base.points), d))
        block[:, support] = base.points
        rows.append(block)
    pts = np.unique(np.vstack(rows), axis=0)
    return SphereSample(pts, base.mesh, base.certified)
