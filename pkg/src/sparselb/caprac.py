"""Conjugacy induced by the coupling that is constant along primal rays.

The coupling pairs x with y through ``<x/||x||, y>`` (zero at x = 0), so a
conjugate under it reduces to a Fenchel conjugate of the radial infimum
``inf over t > 0 of f(t x)`` pushed onto the unit sphere.  Suprema over the
sphere are continuous nonconcave problems, so this module brackets them:
a sampled-and-refined lower estimate plus a Lipschitz-mesh upper
certificate (conservative under the declared covering radius of the sample
and the Lipschitz bound supplied by the caller).

Closed forms are exact where the theory gives them: the conjugate of the
indicator of ``{l0 <= k}`` is the order-k gauge norm, and the conjugate of
l0 itself is the envelope ``max over l of gauge(., l) - l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sampling import SphereSample, sphere_sample
from .sparse_norms import gauge_norm, l0

__all__ = [
    "caprac_coupling",
    "normalize",
    "RadialProfile",
    "radial_infimum",
    "radial_infimum_ray",
    "SphereSearchConfig",
    "caprac_conjugate",
    "delta_levelset_conjugate",
    "l0_conjugate",
    "AscentConfig",
    "l0_biconjugate_estimate",
    "LevelSetIndicator",
]


def caprac_coupling(x, y) -> float:
    """Coupling <x, y> / ||x|| for x != 0, and 0 at x = 0."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    nrm = float(np.linalg.norm(x))
    if nrm == 0.0:
        return 0.0
    return float(x @ y) / nrm


def normalize(x) -> np.ndarray:
    """x / ||x|| for x != 0, else the zero vector."""
    x = np.asarray(x, dtype=float).reshape(-1)
    nrm = float(np.linalg.norm(x))
    if nrm == 0.0:
        return np.zeros_like(x)
    return x / nrm


@dataclass(frozen=True)
class RadialProfile:
    """Bracket and tolerance for one-dimensional radial minimization.

    The bracket must reach far enough toward 0+ that boundary infima are
    resolved within the module's accuracy targets; the log-spaced pre-scan
    seeds the golden-section bracket for profiles that are not unimodal
    near their minimum.
    """

    lambda_min: float = 1e-12
    lambda_max: float = 1e12
    tol: float = 1e-10
    prescan: int = 96

    def __post_init__(self):
        if not 0.0 < self.lambda_min < self.lambda_max:
            raise ValueError("need 0 < lambda_min < lambda_max")
        if not math.isfinite(self.lambda_max):
            raise ValueError("bracket must be finite")
        if self.tol <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.prescan < 3:
            raise ValueError("prescan needs at least 3 points")


def _golden_min_log(g, lo: float, hi: float, tol: float) -> float:
    """Golden-section minimum of g over [exp(lo), exp(hi)] in log space."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = g(math.exp(c)), g(math.exp(d))
    best = min(fc, fd)
    for _ in range(400):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = g(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = g(math.exp(d))
        best = min(best, fc, fd)
    return best


def radial_infimum_ray(f, direction, profile: RadialProfile | None = None) -> float:
    """inf over t > 0 of f(t * direction) for any nonzero direction."""
    profile = profile or RadialProfile()
    direction = np.asarray(direction, dtype=float).reshape(-1)
    lams = np.geomspace(profile.lambda_min, profile.lambda_max, profile.prescan)
    vals = np.array([float(f(t * direction)) for t in lams])
    if np.isneginf(vals).any():
        return -math.inf
    finite = np.isfinite(vals)
    if not finite.any():
        return math.inf
    i = int(np.where(finite, vals, math.inf).argmin())
    lo = math.log(lams[max(0, i - 1)])
    hi = math.log(lams[min(len(lams) - 1, i + 1)])
    g = lambda t: float(f(t * direction))
    refined = _golden_min_log(g, lo, hi, profile.tol)
    return min(float(vals[i]), refined)


def radial_infimum(f, x, profile: RadialProfile | None = None) -> float:
    """inf over t > 0 of f(t x) for x on the unit sphere; f(0) at x = 0."""
    x = np.asarray(x, dtype=float).reshape(-1)
    nrm = float(np.linalg.norm(x))
    if nrm == 0.0:
        return float(f(np.zeros_like(x)))
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError("x must lie on the unit sphere (or be zero)")
    return radial_infimum_ray(f, x, profile)


@dataclass(frozen=True)
class SphereSearchConfig:
    """Budget and certificate data for bracketing a supremum over the sphere.

    ``lipschitz_bound`` must dominate the variation of
    ``x -> <x, y> - inf_t f(t x)`` on the sphere; the upper certificate is
    ``best + lipschitz_bound * mesh + radial_slack`` and is rigorous when
    the sample's mesh is certified and the radial profiles are resolved to
    within ``radial_slack``.
    """

    n_samples: int = 2048
    refine_top: int = 8
    refine_iters: int = 40
    lipschitz_bound: float = 1.0
    radial_slack: float = 1e-9
    seed: int = 0
    sample: SphereSample | None = None
    extra_points: np.ndarray | None = None
    profile: RadialProfile = field(default_factory=RadialProfile)

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("sample count must be positive")
        if self.lipschitz_bound <= 0.0:
            raise ValueError("Lipschitz bound must be positive")
        if self.refine_top < 0 or self.refine_iters < 0:
            raise ValueError("refinement budgets must be nonnegative")
        if self.radial_slack < 0.0:
            raise ValueError("radial slack must be nonnegative")


def _radial_batch(f, X: np.ndarray, profile: RadialProfile) -> np.ndarray:
    hook = getattr(f, "radial_inf_on_sphere", None)
    if hook is not None:
        return np.asarray(hook(X), dtype=float)
    return np.array([radial_infimum_ray(f, x, profile) for x in X])


def _refine_on_sphere(f, y, X0, vals0, iters, rng, profile):
    """Derivative-free hill climb of <x, y> - radial(x) on the sphere."""
    X = X0.copy()
    vals = vals0.copy()
    step = 0.3
    for _ in range(iters):
        dirs = rng.standard_normal(X.shape)
        dirs -= (dirs * X).sum(axis=1, keepdims=True) * X
        nrm = np.linalg.norm(dirs, axis=1, keepdims=True)
        nrm[nrm == 0.0] = 1.0
        cand = X + step * dirs / nrm
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        cvals = cand @ y - _radial_batch(f, cand, profile)
        better = cvals > vals
        if better.any():
            X[better] = cand[better]
            vals[better] = cvals[better]
        else:
            step *= 0.6
            if step < 1e-10:
                break
    return vals


def caprac_conjugate(f, y, cfg: SphereSearchConfig) -> tuple[float, float]:
    """Bracket the ray-coupling conjugate of f at y.

    Returns ``(lower_estimate, upper_certificate)`` for
    ``sup over the sphere and 0 of <x, y> - inf_t f(t x)``.  Any callable
    objective works; objectives exposing ``radial_inf_on_sphere`` are
    evaluated in vectorized batches.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    d = y.size
    sample = cfg.sample or sphere_sample(d, cfg.n_samples, cfg.seed)
    if sample.dim != d:
        raise ValueError("sample dimension does not match y")
    if cfg.extra_points is not None:
        sample = sample.with_extra(cfg.extra_points)
    X = sample.points
    radial = _radial_batch(f, X, cfg.profile)
    if np.isneginf(radial).any():
        return math.inf, math.inf
    vals = X @ y - radial
    f0 = float(f(np.zeros(d)))
    lower = max(-f0, float(np.nanmax(vals)) if vals.size else -math.inf)
    if cfg.refine_top > 0 and cfg.refine_iters > 0 and np.isfinite(vals).any():
        finite_vals = np.where(np.isfinite(vals), vals, -math.inf)
        top = np.argsort(-finite_vals, kind="stable")[: cfg.refine_top]
        top = top[np.isfinite(finite_vals[top])]
        if top.size:
            rng = np.random.default_rng(cfg.seed + 1)
            refined = _refine_on_sphere(
                f, y, X[top], vals[top], cfg.refine_iters, rng, cfg.profile
            )
            lower = max(lower, float(refined.max()))
    upper = lower + cfg.lipschitz_bound * sample.mesh + cfg.radial_slack
    bound_hook = getattr(f, "conjugate_upper_bound", None)
    if bound_hook is not None:
        # closed-form cap, padded for its own float slop
        upper = min(upper, float(bound_hook(y)) + cfg.radial_slack)
    return lower, max(lower, upper)


class LevelSetIndicator:
    """Indicator of the sparsity level set {x : l0(x) <= k}."""

    def __init__(self, k: int):
        if k < 0:
            raise ValueError("k must be nonnegative")
        self.k = int(k)

    def __call__(self, v) -> float:
        return 0.0 if l0(v) <= self.k else math.inf

    def radial_inf_on_sphere(self, X: np.ndarray) -> np.ndarray:
        counts = (np.asarray(X) != 0.0).sum(axis=1)
        return np.where(counts <= self.k, 0.0, math.inf)


def delta_levelset_conjugate(y, k: int) -> float:
    """Conjugate of the {l0 <= k} indicator: the order-k gauge norm of y."""
    return gauge_norm(y, k)


def l0_conjugate(y) -> float:
    """max over l in {0, ..., d} of gauge_norm(y, l) - l; always >= 0."""
    y = np.asarray(y, dtype=float).reshape(-1)
    a = np.sort(np.abs(y))[::-1]
    best = 0.0
    for ell in range(1, y.size + 1):
        g = math.sqrt(math.fsum(float(v) * float(v) for v in a[:ell]))
        best = max(best, g - ell)
    return best


@dataclass(frozen=True)
class AscentConfig:
    """Budget for the biconjugate lower estimate of l0."""

    n_starts: int = 8
    t_max: float = 60.0
    n_t: int = 120
    refine_iters: int = 60
    seed: int = 0
    tol: float = 1e-12

    def __post_init__(self):
        if self.n_starts < 0 or self.n_t < 2 or self.refine_iters < 0:
            raise ValueError("ascent budgets must be positive")
        if self.t_max <= 0.0 or self.tol <= 0.0:
            raise ValueError("t_max and tol must be positive")


def _golden_max_concave(phi, lo: float, hi: float, iters: int) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = phi(c), phi(d)
    best = max(fc, fd)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = phi(d)
        best = max(best, fc, fd)
    return best


def l0_biconjugate_estimate(x, cfg: AscentConfig) -> float:
    """Lower estimate of ``sup over y of coupling(x, y) - l0_conjugate(y)``.

    Searches sign-pattern directions of x scaled over a 1-d grid (the
    objective is concave along each ray, so a golden refinement closes the
    grid gap) plus seeded random directions.  The result never exceeds
    l0(x); on equal-magnitude supports the supremum is attained at finite
    scale and the estimate reaches l0(x).
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    d = x.size
    nrm = float(np.linalg.norm(x))
    if nrm == 0.0:
        return 0.0

    directions = []
    order = np.argsort(-np.abs(x), kind="stable")
    for j in range(1, d + 1):
        s = np.zeros(d)
        idx = order[:j]
        s[idx] = np.sign(x[idx])
        if np.any(s):
            directions.append(s)
    directions.append(x / nrm)
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.n_starts):
        directions.append(rng.standard_normal(d))

    t_grid = np.linspace(0.0, cfg.t_max, cfg.n_t)
    best = 0.0  # value at y = 0
    for s in directions:
        coup = float(x @ s) / nrm

        def phi(t: float) -> float:
            return t * coup - l0_conjugate(t * s)

        vals = [phi(t) for t in t_grid]
        i = int(np.argmax(vals))
        best = max(best, vals[i])
        lo = t_grid[max(0, i - 1)]
        hi = t_grid[min(cfg.n_t - 1, i + 1)]
        if hi > lo:
            best = max(best, _golden_max_concave(phi, lo, hi, cfg.refine_iters))
    return best
