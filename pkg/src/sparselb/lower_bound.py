"""Certified lower bounds for l0-constrained minimization.

The dual program maximizes ``y -> -conj(y) - gauge_norm(y, k)`` where
``conj`` is the ray-coupling conjugate of the objective; every dual point
certifies a lower bound on the sparse optimum, so heuristic ascent is
sound.  The inner supremum over the sphere is estimated from a seeded
sample with structured sparse directions plus gradient polish, padded
conservatively, and capped by a closed-form certified bound; the residual
risk is reported as ``inner_sup_tolerance``.  Every report is validated
against the exhaustive support-enumeration oracle at construction.

Matrices map R^d (the sparse variable) to R^p (the observations), so A is
stored with p rows and d columns.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .caprac import RadialProfile, _refine_on_sphere, radial_infimum_ray
from .errors import (
    BoundViolationError,
    DimensionMismatchError,
    EnumerationGuardError,
    PropernessError,
)
from .sampling import sphere_sample
from .sparse_norms import gauge_norm, ksupport_norm, top_k_indices

__all__ = [
    "SupportSet",
    "LsqInstance",
    "LeastSquaresObjective",
    "BoundReport",
    "DualSearchConfig",
    "GridConfig",
    "exact_sparse_lsq",
    "dual_lower_bound_l0",
    "dual_lower_bound_lsq",
    "primal_ksupport_grid",
]

_ENUMERATION_CAP = 10**6
_SV_THRESHOLD = 1e-10


@dataclass(frozen=True)
class SupportSet:
    """A sparsity pattern: a subset of the coordinate axes of R^d."""

    indices: tuple[int, ...]
    d: int

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate indices in support")
        if idx and not (0 <= idx[0] and idx[-1] < self.d):
            raise ValueError("support indices out of range")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def as_one_based(self) -> list[int]:
        return [i + 1 for i in self.indices]


@dataclass(frozen=True)
class LsqInstance:
    """Sparse least-squares data: minimize ||z - A x||^2 over l0(x) <= k."""

    A: np.ndarray
    z: np.ndarray
    k: int

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        z = np.asarray(self.z, dtype=float).reshape(-1)
        if not (np.isfinite(A).all() and np.isfinite(z).all()):
            raise ValueError("instance data must be finite")
        if A.shape[0] != z.shape[0]:
            raise DimensionMismatchError(
                f"A has {A.shape[0]} rows but z has {z.shape[0]} entries"
            )
        if not 0 <= self.k <= A.shape[1]:
            raise ValueError(f"k={self.k} out of range [0, {A.shape[1]}]")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "k", int(self.k))

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @property
    def p(self) -> int:
        return self.A.shape[0]


class LeastSquaresObjective:
    """f(x) = ||z - A x||^2 with closed-form radial machinery.

    The radial infimum along a ray through x is
    ``||z||^2 - <z, Ax>^2 / ||Ax||^2`` when ``<z, Ax> > 0`` and ``||z||^2``
    otherwise (the ratio term is zero at Ax = 0).
    """

    def __init__(self, A, z):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        z = np.asarray(z, dtype=float).reshape(-1)
        if A.shape[0] != z.shape[0]:
            raise DimensionMismatchError("A rows must match z length")
        self.A = A
        self.z = z
        self.dim = A.shape[1]
        self.f0 = float(z @ z)
        # range projection for the certified cap on the ratio term: every
        # numerically nonzero singular direction is reachable (needle rays),
        # so only directions at relative machine zero may be dropped --
        # over-inclusion merely loosens the cap, under-inclusion breaks it
        u, s, _ = np.linalg.svd(A, full_matrices=False)
        keep = s > (float(s.max()) * 1e-14 if s.size else 0.0)
        if keep.any():
            z_range = u[:, keep] @ (u[:, keep].T @ z)
            kappa = float(s.max()) / float(s[keep].min())
        else:
            z_range = np.zeros_like(z)
            kappa = 1.0
        self.z_range_sq = float(z_range @ z_range)
        # near-singular kept directions make the ratio term evaluable only
        # to ~kappa * eps relative accuracy; sup estimates carry this noise
        self.eval_noise = 4.0 * np.finfo(float).eps * self.f0 * kappa

    def __call__(self, v) -> float:
        r = self.z - self.A @ np.asarray(v, dtype=float).reshape(-1)
        return float(r @ r)

    def ratio_term(self, X: np.ndarray) -> np.ndarray:
        """Batch ``<z, Ax>^2 / ||Ax||^2`` on the positive branch, else 0."""
        XA = X @ self.A.T
        num = XA @ self.z
        den = (XA * XA).sum(axis=1)
        q = np.zeros(X.shape[0])
        pos = (num > 0.0) & (den > 0.0)
        q[pos] = num[pos] ** 2 / den[pos]
        return q

    def ratio_grad(self, X: np.ndarray) -> np.ndarray:
        XA = X @ self.A.T
        num = XA @ self.z
        den = (XA * XA).sum(axis=1)
        G = np.zeros_like(X)
        pos = (num > 0.0) & (den > 0.0)
        if pos.any():
            Atz = self.A.T @ self.z
            G[pos] = (2.0 * num[pos] / den[pos])[:, None] * Atz[None, :] - (
                2.0 * num[pos] ** 2 / den[pos] ** 2
            )[:, None] * (XA[pos] @ self.A)
        return G

    def radial_inf_on_sphere(self, X: np.ndarray) -> np.ndarray:
        return self.f0 - self.ratio_term(np.atleast_2d(X))

    def conjugate_upper_bound(self, y) -> float:
        """Certified bound: sup <x,y> <= ||y|| and the ratio <= ||P z||^2."""
        y = np.asarray(y, dtype=float).reshape(-1)
        return float(np.linalg.norm(y)) + self.z_range_sq - self.f0


@dataclass(frozen=True)
class BoundReport:
    """A certified lower bound together with the exact oracle value."""

    dual_value: float
    certificate_y: np.ndarray
    exact_value: float
    exact_support: SupportSet
    gap: float
    inner_sup_tolerance: float
    wallclock_s: float
    k: int

    def __post_init__(self):
        object.__setattr__(
            self, "certificate_y", np.asarray(self.certificate_y, dtype=float).reshape(-1)
        )
        if not self.dual_value <= self.exact_value + self.inner_sup_tolerance:
            raise BoundViolationError(
                f"dual value {self.dual_value} exceeds exact optimum "
                f"{self.exact_value} beyond tolerance {self.inner_sup_tolerance}"
            )
        if self.gap < -self.inner_sup_tolerance:
            raise BoundViolationError("negative certified gap")
        if len(self.exact_support) > self.k:
            raise BoundViolationError("oracle support exceeds sparsity level")


def _restricted_lsq_value(Asub: np.ndarray, z: np.ndarray,
                          f0: float) -> tuple[float, np.ndarray]:
    """Minimum-norm restricted least squares with a stable value.

    Singular values below 1e-10 are treated as zero.  The optimal value is
    evaluated as ``||z||^2 - ||U' z||^2`` in the kept orthonormal basis,
    which stays accurate when tiny kept singular values make the
    coefficient-based residual lose ~kappa*eps digits.
    """
    u, s, vt = np.linalg.svd(Asub, full_matrices=False)
    keep = s > _SV_THRESHOLD
    proj = u[:, keep].T @ z
    coef = vt[keep].T @ (proj / s[keep])
    val = max(0.0, f0 - math.fsum(float(p) * float(p) for p in proj))
    return val, coef


def exact_sparse_lsq(inst: LsqInstance) -> tuple[float, SupportSet, np.ndarray]:
    """Exhaustive sparse least squares over all supports of size <= k.

    Each restricted problem is solved through an SVD with singular values
    below 1e-10 treated as zero (minimum-norm solution on rank deficiency).
    Ties keep the lexicographically first support.
    """
    d, k = inst.d, inst.k
    total = sum(math.comb(d, i) for i in range(k + 1))
    if total > _ENUMERATION_CAP:
        raise EnumerationGuardError(
            f"{total} supports exceed the enumeration cap {_ENUMERATION_CAP}"
        )
    f0 = float(inst.z @ inst.z)
    best_val = f0
    best_support: tuple[int, ...] = ()
    best_x = np.zeros(d)
    for size in range(1, k + 1):
        for cols in itertools.combinations(range(d), size):
            val, coef = _restricted_lsq_value(inst.A[:, cols], inst.z, f0)
            if val < best_val:
                best_val = val
                best_support = cols
                best_x = np.zeros(d)
                best_x[list(cols)] = coef
    return best_val, SupportSet(best_support, d), best_x


@dataclass(frozen=True)
class DualSearchConfig:
    """Budgets, seed, and tolerance bookkeeping for the dual ascent."""

    n_starts: int = 16
    max_iters: int = 500
    patience: int = 60
    step0: float = 0.5
    n_samples: int = 4096
    polish_top: int = 12
    polish_iters: int = 120
    sup_pad: float = 1e-9
    heuristic_tol: float = 1e-7
    seed: int = 42
    profile: RadialProfile = field(default_factory=RadialProfile)

    def __post_init__(self):
        if self.n_starts < 1 or self.max_iters < 1 or self.n_samples < 1:
            raise ValueError("search budgets must be positive")
        if self.step0 <= 0.0:
            raise ValueError("step size must be positive")
        if self.sup_pad < 0.0 or self.heuristic_tol < 0.0:
            raise ValueError("tolerances must be nonnegative")

    @property
    def inner_tolerance(self) -> float:
        return self.sup_pad + self.heuristic_tol


def _gauge_subgradient(y: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros_like(y)
    sel = top_k_indices(y, k)
    sub = np.zeros_like(y)
    block = y[sel]
    nrm = float(np.linalg.norm(block))
    if nrm > 0.0:
        sub[sel] = block / nrm
    return sub


class _SphereInnerProblem:
    """Precomputed sphere sample for fast inner conjugate estimates."""

    def __init__(self, objective, d: int, cfg: DualSearchConfig,
                 extra_points: np.ndarray | None = None):
        self.objective = objective
        self.d = d
        self.cfg = cfg
        sample = sphere_sample(d, cfg.n_samples, cfg.seed, estimate_mesh=False)
        axes = np.vstack([np.eye(d), -np.eye(d)])
        extras = [axes]
        if extra_points is not None and len(extra_points):
            pts = np.atleast_2d(np.asarray(extra_points, dtype=float))
            nrm = np.linalg.norm(pts, axis=1)
            ok = nrm > 1e-12
            if ok.any():
                extras.append(pts[ok] / nrm[ok, None])
        self.X = sample.with_extra(np.vstack(extras)).points
        hook = getattr(objective, "radial_inf_on_sphere", None)
        if hook is not None:
            self.radial = np.asarray(hook(self.X), dtype=float)
        else:
            self.radial = np.array(
                [radial_infimum_ray(objective, x, cfg.profile) for x in self.X]
            )
        if np.isneginf(self.radial).any():
            raise PropernessError("radial profile reaches -inf: conjugate improper")
        self.f0 = float(objective(np.zeros(d)))
        if self.f0 == -math.inf:
            raise PropernessError("objective is -inf at the origin")
        finite = self.radial[np.isfinite(self.radial)]
        if finite.size == 0 and not math.isfinite(self.f0):
            raise PropernessError("conjugate is identically -inf: improper")
        span = abs(self.f0 - float(finite.min())) if finite.size else 0.0
        # the ascent is scale-covariant only if the step scale tracks the
        # problem's magnitude exactly (no absolute floor)
        self.scale = span if span > 0.0 else 1.0
        # directions with the deepest radial profiles: arc candidates toward
        # y are added during polishing (needle maximizers live there)
        order = np.argsort(np.where(np.isfinite(self.radial), self.radial,
                                    math.inf), kind="stable")
        self.deep_dirs = self.X[order[:4]][np.isfinite(self.radial[order[:4]])]

    def inner(self, y: np.ndarray) -> tuple[float, np.ndarray | None]:
        """Fast lower estimate of the conjugate at y with its argmax point."""
        vals = self.X @ y - self.radial
        i = int(vals.argmax())
        sphere_val = float(vals[i])
        if sphere_val >= -self.f0:
            return sphere_val, self.X[i]
        return -self.f0, None

    def polish(self, y: np.ndarray) -> float:
        """Tighter conjugate lower estimate at y via local sphere ascent."""
        cfg = self.cfg
        vals = self.X @ y - self.radial
        base = max(float(vals.max()), -self.f0)
        finite = np.isfinite(vals)
        if not finite.any() or cfg.polish_top == 0:
            return base
        masked = np.where(finite, vals, -math.inf)
        top = np.argsort(-masked, kind="stable")[: cfg.polish_top]
        top = top[np.isfinite(masked[top])]
        if top.size == 0:
            return base
        obj = self.objective
        if hasattr(obj, "ratio_term") and hasattr(obj, "ratio_grad"):
            starts = [self.X[top]]
            ynorm = float(np.linalg.norm(y))
            if ynorm > 0.0 and len(self.deep_dirs):
                # arcs between the deepest radial directions and y: on
                # near-singular designs the maximizer sits between the
                # ratio needle and the linear-term direction
                yhat = y / ynorm
                for w in self.deep_dirs:
                    for sgn in (1.0, -1.0):
                        arc = (1.0 - np.linspace(0.0, 1.0, 9))[:, None] * (
                            sgn * w
                        )[None, :] + np.linspace(0.0, 1.0, 9)[:, None] * yhat[None, :]
                        nrm = np.linalg.norm(arc, axis=1, keepdims=True)
                        ok = nrm[:, 0] > 0.0
                        starts.append(arc[ok] / nrm[ok])
            refined = _polish_lsq(obj, y, np.vstack(starts), cfg.polish_iters)
        else:
            rng = np.random.default_rng(cfg.seed + 7)
            refined = float(
                _refine_on_sphere(
                    obj, y, self.X[top], vals[top], cfg.polish_iters, rng, cfg.profile
                ).max()
            )
        return max(base, refined)

    @property
    def eval_noise(self) -> float:
        return float(getattr(self.objective, "eval_noise", 0.0))

    def conjugate_value(self, y: np.ndarray) -> float:
        """Best available conjugate estimate capped by the certified bound."""
        est = self.polish(y) + self.cfg.sup_pad + self.eval_noise
        hook = getattr(self.objective, "conjugate_upper_bound", None)
        if hook is not None:
            # the closed-form cap gets the same float-slop pad
            est = min(est, float(hook(y)) + self.cfg.sup_pad)
        return est


def _polish_lsq(obj: LeastSquaresObjective, y: np.ndarray, X0: np.ndarray,
                iters: int) -> float:
    """Projected-gradient ascent of <x,y> + ratio(x) over the sphere.

    Moves by a fixed arc length along the normalized tangent gradient and
    halves the step whenever nothing improves, which resolves the maximum
    geometrically.
    """
    X = X0.copy()
    vals = X @ y + obj.ratio_term(X) - obj.f0
    step = 0.3
    for _ in range(iters):
        G = y[None, :] + obj.ratio_grad(X)
        G -= (G * X).sum(axis=1, keepdims=True) * X
        gn = np.linalg.norm(G, axis=1, keepdims=True)
        gn[gn == 0.0] = 1.0
        cand = X + step * G / gn
        nrm = np.linalg.norm(cand, axis=1, keepdims=True)
        nrm[nrm == 0.0] = 1.0
        cand /= nrm
        cvals = cand @ y + obj.ratio_term(cand) - obj.f0
        better = cvals > vals
        if better.any():
            X[better] = cand[better]
            vals[better] = cvals[better]
        else:
            step *= 0.5
            if step < 1e-14:
                break
    return float(vals.max())


def _dual_starts(problem: _SphereInnerProblem, k: int, cfg: DualSearchConfig,
                 correlation: np.ndarray | None) -> list[np.ndarray]:
    d = problem.d
    scale = problem.scale
    starts: list[np.ndarray] = [np.zeros(d)]
    seeds = []
    if correlation is not None and np.linalg.norm(correlation) > 0:
        seeds.append(correlation)
    finite = np.isfinite(problem.radial)
    if finite.any():
        best_dir = problem.X[int(np.where(finite, problem.radial, math.inf).argmin())]
        seeds.append(best_dir)
    for v in seeds:
        for size in sorted({1, max(k, 1)}):
            sel = top_k_indices(v, min(size, d))
            direction = np.zeros(d)
            direction[sel] = v[sel]
            nrm = np.linalg.norm(direction)
            if nrm == 0.0:
                continue
            direction /= nrm
            for c in (0.25, 1.0):
                starts.append(-c * scale * direction)
                starts.append(c * scale * direction)
    rng = np.random.default_rng(cfg.seed + 13)
    while len(starts) < cfg.n_starts:
        starts.append(0.5 * scale * rng.standard_normal(d))
    return starts[: max(cfg.n_starts, 1)]


def _ascend(inner, penalty, scale: float, d: int, cfg: DualSearchConfig,
            starts: list[np.ndarray]) -> tuple[float, np.ndarray]:
    """Multi-start diminishing-step supergradient ascent of a concave dual.

    ``inner(y) -> (conjugate_estimate, argmax_point_or_None)`` and
    ``penalty(y) -> (value, subgradient)`` define the objective
    ``-inner - penalty``.
    """

    def fast_phi(y):
        conj, xstar = inner(y)
        pval, psub = penalty(y)
        return -conj - pval, xstar, psub

    best_val = -math.inf
    best_y = np.zeros(d)
    for y0 in starts:
        y = np.asarray(y0, dtype=float).copy()
        local_best = -math.inf
        stall = 0
        for t in range(cfg.max_iters):
            val, xstar, psub = fast_phi(y)
            if val > best_val:
                best_val, best_y = val, y.copy()
            if val > local_best + 1e-14 * scale:
                local_best = val
                stall = 0
            else:
                stall += 1
                if stall > cfg.patience:
                    break
            direction = -psub
            if xstar is not None:
                direction = direction - xstar
            y = y + (cfg.step0 * scale / math.sqrt(t + 1.0)) * direction
        val, _, _ = fast_phi(y)
        if val > best_val:
            best_val, best_y = val, y.copy()
    return best_val, best_y


def _certified_dual_value(problem: _SphereInnerProblem, y: np.ndarray,
                          k: int) -> float:
    return -problem.conjugate_value(y) - gauge_norm(y, k)


def dual_lower_bound_l0(f, k: int, cfg: DualSearchConfig | None = None,
                        dim: int | None = None) -> tuple[float, np.ndarray]:
    """Lower bound on ``inf over l0(x) <= k of f(x)`` with its certificate.

    f may be any callable from R^d to the extended reals; objectives that
    expose ``radial_inf_on_sphere`` (e.g. :class:`LeastSquaresObjective`)
    are evaluated in fast vectorized form.  The returned value evaluates
    the concave dual at the best y found, using a conservative estimate of
    the inner supremum, so it is a valid bound up to the configured inner
    tolerance.
    """
    cfg = cfg or DualSearchConfig()
    d = dim if dim is not None else getattr(f, "dim", None)
    if d is None:
        raise ValueError("pass dim= for plain-callable objectives")
    if not 0 <= k <= d:
        raise ValueError(f"k={k} out of range [0, {d}]")
    extra = None
    corr = None
    if isinstance(f, LeastSquaresObjective):
        corr = f.A.T @ f.z
        extra = _lsq_extra_directions(f, k)
    problem = _SphereInnerProblem(f, d, cfg, extra_points=extra)
    starts = _dual_starts(problem, k, cfg, corr)
    penalty = lambda y: (gauge_norm(y, k), _gauge_subgradient(y, k))
    _, y_best = _ascend(problem.inner, penalty, problem.scale, d, cfg, starts)
    candidates = [np.zeros(d), y_best]
    vals = [_certified_dual_value(problem, y, k) for y in candidates]
    i = int(np.argmax(vals))
    return float(vals[i]), candidates[i]


def _lsq_extra_directions(obj: LeastSquaresObjective, k: int) -> np.ndarray:
    """Structured sphere candidates where the inner supremum tends to live.

    The normalized minimum-norm solution maximizes the ratio term exactly,
    and the restricted-support solutions witness the sparse optima; right
    singular vectors cover the remaining curvature directions.
    """
    rows = [obj.A.T @ obj.z, np.linalg.pinv(obj.A) @ obj.z]
    _, _, vt = np.linalg.svd(obj.A, full_matrices=False)
    rows.extend(vt)
    rows.extend(-v for v in vt)
    d = obj.dim
    if sum(math.comb(d, i) for i in range(1, k + 1)) <= 5000:
        for size in range(1, k + 1):
            for cols in itertools.combinations(range(d), size):
                Asub = obj.A[:, cols]
                u, s, vtk = np.linalg.svd(Asub, full_matrices=False)
                keep = s > _SV_THRESHOLD
                if not keep.any():
                    continue
                coef = vtk[keep].T @ ((u[:, keep].T @ obj.z) / s[keep])
                x = np.zeros(d)
                x[list(cols)] = coef
                rows.append(x)
                rows.append(-x)
    return np.array(rows)


def dual_lower_bound_lsq(inst: LsqInstance,
                         cfg: DualSearchConfig | None = None) -> BoundReport:
    """Certified lower bound for a sparse least-squares instance.

    Runs the dual ascent with the closed-form radial machinery, evaluates
    the exact optimum by support enumeration, and returns a validated
    report (construction fails if the bound exceeds the exact optimum
    beyond the reported inner tolerance).
    """
    cfg = cfg or DualSearchConfig()
    t0 = time.perf_counter()
    exact_value, support, _ = exact_sparse_lsq(inst)
    obj = LeastSquaresObjective(inst.A, inst.z)
    dual_value, y = dual_lower_bound_l0(obj, inst.k, cfg)
    wall = time.perf_counter() - t0
    return BoundReport(
        dual_value=dual_value,
        certificate_y=y,
        exact_value=exact_value,
        exact_support=support,
        gap=exact_value - dual_value,
        inner_sup_tolerance=cfg.inner_tolerance,
        wallclock_s=wall,
        k=inst.k,
    )


@dataclass(frozen=True)
class GridConfig:
    """Grids for the toy-dimension primal program over the k-support ball."""

    primal_h: float = 0.05
    primal_pad: float = 0.05
    dual_radius: float = 6.0
    dual_h: float = 0.1
    sphere_n: int = 4096
    chunk: int = 4096

    def __post_init__(self):
        if min(self.primal_h, self.dual_h, self.dual_radius, self.chunk) <= 0:
            raise ValueError("degenerate grid configuration")


def _axis(radius: float, h: float) -> np.ndarray:
    n = int(math.floor(radius / h))
    return h * np.arange(-n, n + 1)


def primal_ksupport_grid(inst: LsqInstance, grid: GridConfig | None = None,
                         objective=None) -> float:
    """Grid approximation of the primal program over the k-support ball.

    Tabulates the ray-coupling conjugate on a dual grid, biconjugates on a
    primal grid, and minimizes over grid points inside the unit ball of the
    k-support norm.  Only toy dimensions (d <= 3) are supported; refuses
    objectives whose conjugate is improper.
    """
    grid = grid or GridConfig()
    d, k = inst.d, inst.k
    if d > 3:
        raise ValueError("dense-grid biconjugation supports d <= 3 only")
    if k < 1:
        raise ValueError("the k-support ball program needs k >= 1")
    obj = objective if objective is not None else LeastSquaresObjective(inst.A, inst.z)
    sample = sphere_sample(d, grid.sphere_n, seed=0)
    X = sample.points
    hook = getattr(obj, "radial_inf_on_sphere", None)
    if hook is not None:
        radial = np.asarray(hook(X), dtype=float)
    else:
        radial = np.array([radial_infimum_ray(obj, x) for x in X])
    f0 = float(obj(np.zeros(d)))
    if np.isneginf(radial).any() or f0 == -math.inf:
        raise PropernessError("conjugate is improper: the primal program is void")

    axis_d = _axis(grid.dual_radius, grid.dual_h)
    Y = np.array(list(itertools.product(axis_d, repeat=d)))
    conj = np.empty(len(Y))
    for lo in range(0, len(Y), grid.chunk):
        block = Y[lo: lo + grid.chunk]
        vals = X @ block.T - radial[:, None]
        conj[lo: lo + grid.chunk] = np.maximum(vals.max(axis=0), -f0)

    axis_p = _axis(1.0 + grid.primal_pad, grid.primal_h)
    P = np.array(list(itertools.product(axis_p, repeat=d)))
    feasible = np.array([ksupport_norm(x, k) <= 1.0 + 1e-12 if np.any(x) else True
                         for x in P])
    P = P[feasible]
    if len(P) == 0:
        raise ValueError("degenerate grid: no feasible primal points")
    biconj = np.full(len(P), -math.inf)
    for lo in range(0, len(Y), grid.chunk):
        block = Y[lo: lo + grid.chunk]
        vals = P @ block.T - conj[None, lo: lo + grid.chunk]
        biconj = np.maximum(biconj, vals.max(axis=1))
    return float(biconj.min())
