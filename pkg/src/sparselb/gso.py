"""Generalized sparse optimization over unions of coordinate subspaces.

A group structure assigns a positively weighted Euclidean norm to each
coordinate subspace.  The global norm is the infimal convolution of the
local norms (decomposition program); its dual is the supremum of the local
dual norms, which is closed form.  Norms can alternatively be built from
symmetric point families as the gauge of the convex hull of their union,
evaluated by a small linear program.

The certified lower bound for minimization over the union of equal-support
classes mirrors the l0 machinery: per-group sphere searches feed a concave
dual whose every evaluation point certifies a bound, validated against a
per-group continuous minimization oracle.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import optimize as sciopt

from .caprac import radial_infimum_ray
from .errors import (
    DimensionMismatchError,
    EnumerationGuardError,
    NotANormError,
    PropernessError,
    SolverError,
)
from .lower_bound import (
    BoundReport,
    DualSearchConfig,
    LeastSquaresObjective,
    SupportSet,
    _ascend,
    _restricted_lsq_value,
)
from .sampling import sphere_sample

__all__ = [
    "GroupStructure",
    "PointFamily",
    "convolution_norm",
    "dual_sup_norm",
    "norm_from_point_family",
    "dual_norm_from_point_family",
    "compatibility_check",
    "gso_lower_bound",
]

_GROUP_DIM_CAP = 4


@dataclass(frozen=True)
class GroupStructure:
    """Index groups with positive weights defining local Euclidean norms.

    The local norm on group J is ``w_J * ||.||_2`` restricted to the
    coordinates in J.  Groups use 0-based indices; JSON I/O converts from
    the 1-based external schema.
    """

    d: int
    groups: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("ambient dimension must be >= 1")
        groups = tuple(tuple(sorted(int(i) for i in g)) for g in self.groups)
        if not groups:
            raise ValueError("at least one group is required")
        for g in groups:
            if not g:
                raise ValueError("groups must be nonempty")
            if len(set(g)) != len(g):
                raise ValueError("duplicate index inside a group")
            if g[0] < 0 or g[-1] >= self.d:
                raise ValueError("group index out of range")
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != len(groups):
            raise DimensionMismatchError("one weight per group required")
        if any(not (w > 0.0) or not math.isfinite(w) for w in weights):
            raise ValueError("weights must be positive finite")
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def with_unit_weights(cls, d: int, groups) -> "GroupStructure":
        groups = tuple(tuple(g) for g in groups)
        return cls(d, groups, tuple(1.0 for _ in groups))

    def covers_all(self) -> bool:
        covered = set().union(*map(set, self.groups))
        return covered == set(range(self.d))


@dataclass(frozen=True)
class PointFamily:
    """A finite family of symmetric point clouds in a common dimension."""

    sets: tuple[np.ndarray, ...]

    def __post_init__(self):
        sets = tuple(np.atleast_2d(np.asarray(s, dtype=float)) for s in self.sets)
        if not sets:
            raise ValueError("at least one point set is required")
        d = sets[0].shape[1]
        for s in sets:
            if s.shape[1] != d:
                raise DimensionMismatchError("point sets have mixed dimensions")
            if not np.isfinite(s).all():
                raise ValueError("points must be finite")
            # + 0.0 canonicalizes signed zeros before byte comparison
            keys = {(row + 0.0).tobytes() for row in s}
            for row in s:
                if (-row + 0.0).tobytes() not in keys:
                    raise ValueError("point set is not symmetric")
        object.__setattr__(self, "sets", sets)

    @property
    def dim(self) -> int:
        return self.sets[0].shape[1]

    def all_points(self) -> np.ndarray:
        return np.vstack(self.sets)


def dual_sup_norm(gs: GroupStructure, v_prime) -> float:
    """Supremum of the local dual norms: max_j ||v'_{G_j}|| / w_j."""
    v = np.asarray(v_prime, dtype=float).reshape(-1)
    if v.shape[0] != gs.d:
        raise DimensionMismatchError("vector dimension does not match structure")
    return max(
        float(np.linalg.norm(v[list(g)])) / w for g, w in zip(gs.groups, gs.weights)
    )


def _dual_sup_subgradient(gs: GroupStructure, y: np.ndarray) -> np.ndarray:
    vals = [float(np.linalg.norm(y[list(g)])) / w
            for g, w in zip(gs.groups, gs.weights)]
    j = int(np.argmax(vals))
    g, w = gs.groups[j], gs.weights[j]
    sub = np.zeros_like(y)
    block = y[list(g)]
    nrm = float(np.linalg.norm(block))
    if nrm > 0.0:
        sub[list(g)] = block / (w * nrm)
    return sub


def _feasibility_fix_assignment(gs: GroupStructure) -> np.ndarray:
    """For each coordinate, the covering group of smallest weight."""
    assign = np.full(gs.d, -1, dtype=int)
    for j, (g, w) in enumerate(zip(gs.groups, gs.weights)):
        for i in g:
            if assign[i] < 0 or w < gs.weights[assign[i]]:
                assign[i] = j
    return assign


def convolution_norm(gs: GroupStructure, v, tol: float = 1e-8,
                     max_sweeps: int = 200_000) -> float:
    """Infimal convolution of the local norms at v.

    Solves ``min sum_j w_j ||v^j||`` subject to ``sum_j v^j = v`` and
    ``supp(v^j) in G_j`` by alternating group soft-threshold sweeps with a
    running multiplier, terminating when the duality gap against the
    feasible dual certificate (scaled to ``dual_sup_norm <= 1``) drops
    below ``tol``.  The returned value is the feasible decomposition's
    objective, hence within ``tol`` above the true norm.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != gs.d:
        raise DimensionMismatchError("vector dimension does not match structure")
    if not gs.covers_all():
        raise NotANormError("groups do not cover every coordinate: "
                            "the convolution is not a norm on R^d")
    if not np.any(v):
        return 0.0
    value, _, _ = _convolution_decomposition(gs, v, tol, max_sweeps)
    return value


def _convolution_decomposition(gs: GroupStructure, v: np.ndarray, tol: float,
                               max_sweeps: int):
    m = len(gs.groups)
    masks = [np.array(g, dtype=int) for g in gs.groups]
    assign = _feasibility_fix_assignment(gs)
    V = np.zeros((m, gs.d))
    # seed: split v across the cheapest covering groups
    for i in range(gs.d):
        V[assign[i], i] = v[i]
    u = np.zeros(gs.d)
    rho = max(float(np.linalg.norm(v)), 1e-12)
    best_gap = math.inf
    stall = 0
    for sweep in range(max_sweeps):
        total = V.sum(axis=0)
        for j in range(m):
            idx = masks[j]
            cj = (v - (total - V[j]) - u / rho)[idx]
            nrm = float(np.linalg.norm(cj))
            shrink = max(0.0, 1.0 - gs.weights[j] / (rho * nrm)) if nrm > 0 else 0.0
            total[idx] -= V[j, idx]
            V[j, :] = 0.0
            V[j, idx] = shrink * cj
            total[idx] += V[j, idx]
        resid = total - v
        u = u + rho * resid
        # feasible primal value: push the residual into the cheapest groups
        Vfix = V.copy()
        for i in range(gs.d):
            Vfix[assign[i], i] -= resid[i]
        primal = math.fsum(
            gs.weights[j] * float(np.linalg.norm(Vfix[j, masks[j]]))
            for j in range(m)
        )
        # dual certificate: mu = -u scaled into the dual unit ball
        mu = -u
        s = max(
            float(np.linalg.norm(mu[masks[j]])) / gs.weights[j] for j in range(m)
        )
        lower = float(mu @ v) / s if s > 1e-300 else 0.0
        lower = max(lower, 0.0)
        gap = primal - lower
        if gap <= tol:
            return primal, Vfix, mu / s if s > 1e-300 else mu
        if gap < best_gap - 1e-16:
            best_gap = gap
            stall = 0
        else:
            stall += 1
            if stall > 2000:
                rho *= 5.0
                stall = 0
    raise SolverError(
        f"convolution norm did not reach gap {tol} in {max_sweeps} sweeps "
        f"(best gap {best_gap})"
    )


def norm_from_point_family(pf: PointFamily, v) -> float:
    """Gauge of the convex hull of the union of the family's points.

    Evaluates ``min { t >= 0 : v in t * co(union) }`` as a linear program
    over convex-combination coefficients.  Raises when the family does not
    span R^d (the gauge is then infinite somewhere, so not a norm).
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    P = pf.all_points()
    if P.shape[1] != v.shape[0]:
        raise DimensionMismatchError("vector dimension does not match family")
    if np.linalg.matrix_rank(P) < P.shape[1]:
        raise NotANormError("point family does not span R^d: not a norm")
    if not np.any(v):
        return 0.0
    res = sciopt.linprog(
        c=np.ones(P.shape[0]),
        A_eq=P.T,
        b_eq=v,
        bounds=(0.0, None),
        method="highs",
    )
    if not res.success:
        raise NotANormError(f"gauge program infeasible for v={v!r}: not a norm")
    return float(res.fun)


def dual_norm_from_point_family(pf: PointFamily, y) -> float:
    """Support function of the union of the family's points at y."""
    y = np.asarray(y, dtype=float).reshape(-1)
    P = pf.all_points()
    if P.shape[1] != y.shape[0]:
        raise DimensionMismatchError("vector dimension does not match family")
    return float((P @ y).max())


def compatibility_check(groups, disjoint_required: bool, weights=None) -> bool:
    """Check the family of equal-support classes is usable for the bound.

    With ``disjoint_required`` the classes must be pairwise disjoint, which
    for equal-support classes means pairwise distinct index sets.  Without
    it, duplicated sets are tolerated only when their local normalization
    maps agree, i.e. their weights match.
    """
    keys = []
    for g in groups:
        idx = getattr(g, "indices", g)
        keys.append(frozenset(int(i) for i in idx))
    if disjoint_required:
        return len(set(keys)) == len(keys)
    w = list(weights) if weights is not None else [1.0] * len(keys)
    if len(w) != len(keys):
        raise DimensionMismatchError("one weight per group required")
    seen: dict[frozenset, float] = {}
    for key, wj in zip(keys, w):
        if key in seen and seen[key] != wj:
            return False
        seen.setdefault(key, wj)
    return True


def _normalization_closure_check(gs: GroupStructure, tol: float = 1e-6) -> None:
    """Runtime check that normalized equal-support classes fill each sphere.

    Every local sphere point (including on-axis points with a strictly
    smaller support) must be approachable by normalized full-support
    vectors; a tiny full-support perturbation certifies it.
    """
    eps = 1e-9
    for g, w in zip(gs.groups, gs.weights):
        idx = list(g)
        probes = [np.eye(len(idx))[i] for i in range(len(idx))]
        probes.append(np.ones(len(idx)) / math.sqrt(len(idx)))
        for p in probes:
            s = np.zeros(gs.d)
            s[idx] = p / w
            full = s.copy()
            full[idx] = full[idx] + eps * np.where(full[idx] == 0.0, 1.0, 0.0)
            full = full / (w * float(np.linalg.norm(full)))
            if np.count_nonzero(full[idx]) != len(idx):
                raise AssertionError("perturbation lost full support")
            if float(np.linalg.norm(full - s)) > tol:
                raise AssertionError("normalized class does not approach sphere")


def _group_oracle_min(h, gs: GroupStructure, j: int, seed: int) -> float:
    """Continuous minimum of h over the subspace of group j (dim <= 4)."""
    idx = list(gs.groups[j])
    if isinstance(h, LeastSquaresObjective):
        val, _ = _restricted_lsq_value(h.A[:, idx], h.z, h.f0)
        return val

    def local(t):
        x = np.zeros(gs.d)
        x[idx] = t
        return float(h(x))

    rng = np.random.default_rng(seed)
    best = local(np.zeros(len(idx)))
    starts = [np.zeros(len(idx))] + [rng.standard_normal(len(idx)) for _ in range(6)]
    for t0 in starts:
        res = sciopt.minimize(local, t0, method="Nelder-Mead",
                              options={"xatol": 1e-10, "fatol": 1e-12,
                                       "maxiter": 4000})
        best = min(best, float(res.fun))
    return best


def _polish_group_lsq(obj: LeastSquaresObjective, y: np.ndarray,
                      idx: list[int], radius: float, X0: np.ndarray,
                      iters: int) -> float:
    """Gradient ascent of <x,y> + ratio(x) on one coordinate subsphere."""
    X = X0.copy()
    vals = X @ y + obj.ratio_term(X) - obj.f0
    step = 0.3 * radius
    mask = np.zeros(X.shape[1], dtype=bool)
    mask[idx] = True
    for _ in range(iters):
        G = y[None, :] + obj.ratio_grad(X)
        G[:, ~mask] = 0.0
        G -= ((G * X).sum(axis=1, keepdims=True) / radius**2) * X
        gn = np.linalg.norm(G, axis=1, keepdims=True)
        gn[gn == 0.0] = 1.0
        cand = X + step * G / gn
        nrm = np.linalg.norm(cand[:, idx], axis=1, keepdims=True)
        nrm[nrm == 0.0] = 1.0
        cand[:, idx] *= radius / nrm
        cvals = cand @ y + obj.ratio_term(cand) - obj.f0
        better = cvals > vals
        if better.any():
            X[better] = cand[better]
            vals[better] = cvals[better]
        else:
            step *= 0.5
            if step < 1e-14 * radius:
                break
    return float(vals.max())


def _polish_group_generic(h, y: np.ndarray, idx: list[int], radius: float,
                          X0: np.ndarray, vals0: np.ndarray, iters: int,
                          seed: int, profile) -> float:
    """Random-tangent hill climb on one coordinate subsphere."""
    rng = np.random.default_rng(seed)
    X = X0.copy()
    vals = vals0.copy()
    step = 0.3 * radius
    for _ in range(iters):
        dirs = np.zeros_like(X)
        dirs[:, idx] = rng.standard_normal((X.shape[0], len(idx)))
        dirs -= ((dirs * X).sum(axis=1, keepdims=True) / radius**2) * X
        nrm = np.linalg.norm(dirs, axis=1, keepdims=True)
        nrm[nrm == 0.0] = 1.0
        cand = X + step * dirs / nrm
        cnrm = np.linalg.norm(cand[:, idx], axis=1, keepdims=True)
        cnrm[cnrm == 0.0] = 1.0
        cand[:, idx] *= radius / cnrm
        cvals = np.array(
            [float(c @ y) - radial_infimum_ray(h, c, profile) for c in cand]
        )
        better = cvals > vals
        if better.any():
            X[better] = cand[better]
            vals[better] = cvals[better]
        else:
            step *= 0.6
            if step < 1e-11 * radius:
                break
    return float(vals.max())


def _arc_candidates(witness_local: np.ndarray | None, y: np.ndarray,
                    idx: list[int], radius: float) -> np.ndarray | None:
    """Subsphere points between the ratio-term witness and the y direction.

    On near-singular designs the maximizer of <x,y> + ratio(x) sits on the
    arc joining the needle (where the ratio peaks) and the direction that
    maximizes the linear term; local ascent alone stalls there.
    """
    if witness_local is None:
        return None
    yloc = y[idx]
    nrm = float(np.linalg.norm(yloc))
    if nrm == 0.0:
        return None
    yhat = yloc / nrm * radius
    rows = []
    for w in (witness_local, -witness_local):
        for t in np.linspace(0.0, 1.0, 9):
            v = (1.0 - t) * w + t * yhat
            n2 = float(np.linalg.norm(v))
            if n2 > 0.0:
                rows.append(v / n2 * radius)
    out = np.zeros((len(rows), y.size))
    out[:, idx] = np.array(rows)
    return out


class _GroupInnerProblem:
    """Per-group sphere samples for the union-of-subspaces dual."""

    def __init__(self, gs: GroupStructure, h, cfg: DualSearchConfig):
        self.gs = gs
        self.h = h
        self.cfg = cfg
        self.f0 = float(h(np.zeros(gs.d)))
        self.samples: list[np.ndarray] = []
        self.radials: list[np.ndarray] = []
        per_group = max(64, cfg.n_samples // max(1, len(gs.groups)))
        lsq = isinstance(h, LeastSquaresObjective)
        self.group_caps: list[float] | None = [] if lsq else None
        self.witnesses: list[np.ndarray | None] = []
        self.eval_noise = 0.0
        for j, (g, w) in enumerate(zip(gs.groups, gs.weights)):
            idx = list(g)
            local = sphere_sample(len(idx), per_group, cfg.seed + j,
                                  estimate_mesh=False).points / w
            axes = np.vstack([np.eye(len(idx)), -np.eye(len(idx))]) / w
            local = np.vstack([local, axes])
            self.witnesses.append(None)
            if lsq:
                # the normalized restricted solution maximizes the ratio
                # term on this subsphere exactly
                witness = np.linalg.pinv(h.A[:, idx]) @ h.z
                nrm = float(np.linalg.norm(witness))
                if nrm > 0.0:
                    witness = witness / (w * nrm)
                    local = np.vstack([local, witness[None, :], -witness[None, :]])
                    self.witnesses[-1] = witness
                # certified per-group cap on the ratio term: the restricted
                # range projection, keeping every numerically nonzero
                # singular direction (needle rays reach them)
                uu, ss, _ = np.linalg.svd(h.A[:, idx], full_matrices=False)
                keep = ss > (float(ss.max()) * 1e-14 if ss.size else 0.0)
                if keep.any():
                    zr = uu[:, keep] @ (uu[:, keep].T @ h.z)
                    self.group_caps.append(float(zr @ zr))
                    kappa = float(ss.max()) / float(ss[keep].min())
                else:
                    self.group_caps.append(0.0)
                    kappa = 1.0
                self.eval_noise = max(
                    self.eval_noise,
                    4.0 * np.finfo(float).eps * self.f0 * kappa,
                )
            X = np.zeros((len(local), gs.d))
            X[:, idx] = local
            hook = getattr(h, "radial_inf_on_sphere", None)
            if hook is not None:
                r = np.asarray(hook(X), dtype=float)
            else:
                r = np.array([radial_infimum_ray(h, x, cfg.profile) for x in X])
            if np.isneginf(r).any():
                raise PropernessError(f"group {j}: conjugate is improper (+inf)")
            if not np.isfinite(r).any():
                raise PropernessError(f"group {j}: conjugate identically -inf")
            self.samples.append(X)
            self.radials.append(r)
        finite_min = min(float(r[np.isfinite(r)].min()) for r in self.radials)
        span = abs(self.f0 - finite_min)
        self.scale = span if span > 0.0 else 1.0
        self.X_all = np.vstack(self.samples)
        self.r_all = np.concatenate(self.radials)

    def inner(self, y: np.ndarray) -> tuple[float, np.ndarray | None]:
        vals = self.X_all @ y - self.r_all
        i = int(vals.argmax())
        if float(vals[i]) >= -self.f0:
            return float(vals[i]), self.X_all[i]
        return -self.f0, None

    def _polished_max(self, y: np.ndarray) -> float:
        """Tighten the union supremum by polishing per-group top candidates."""
        cfg = self.cfg
        vals = self.X_all @ y - self.r_all
        best = max(float(vals.max()), -self.f0)
        if cfg.polish_top == 0 or cfg.polish_iters == 0:
            return best
        per_group_budget = max(2, cfg.polish_top // max(1, len(self.gs.groups)))
        lsq = isinstance(self.h, LeastSquaresObjective)
        offset = 0
        for j, (X, r) in enumerate(zip(self.samples, self.radials)):
            gvals = vals[offset: offset + len(X)]
            offset += len(X)
            finite = np.isfinite(gvals)
            if not finite.any():
                continue
            masked = np.where(finite, gvals, -math.inf)
            top = np.argsort(-masked, kind="stable")[:per_group_budget]
            top = top[np.isfinite(masked[top])]
            if top.size == 0:
                continue
            idx = list(self.gs.groups[j])
            radius = 1.0 / self.gs.weights[j]
            starts = X[top]
            if lsq:
                arcs = _arc_candidates(self.witnesses[j], y, idx, radius)
                if arcs is not None:
                    starts = np.vstack([starts, arcs])
                refined = _polish_group_lsq(
                    self.h, y, idx, radius, starts, cfg.polish_iters
                )
            else:
                refined = _polish_group_generic(
                    self.h, y, idx, radius, starts, gvals[top],
                    cfg.polish_iters, cfg.seed + 31 * (j + 1), cfg.profile,
                )
            best = max(best, refined)
        return best

    def conjugate_value(self, y: np.ndarray) -> float:
        est = self._polished_max(y) + self.cfg.sup_pad + self.eval_noise
        if self.group_caps is not None:
            # per-group certified cap: sup <x,y> on the subsphere plus the
            # restricted range projection, padded for float slop; the zero
            # branch (-f0) is dominated because both terms are nonnegative
            cap = max(
                float(np.linalg.norm(y[list(g)])) / w + zr
                for (g, w, zr) in zip(self.gs.groups, self.gs.weights,
                                      self.group_caps)
            ) - self.f0
            est = min(est, cap + self.cfg.sup_pad)
        return est


def gso_lower_bound(gs: GroupStructure, theta_mode: str, h,
                    cfg: DualSearchConfig | None = None) -> BoundReport:
    """Certified lower bound for minimizing h over equal-support classes.

    The feasible set is the union over groups J of ``{w : supp(w) = J}``
    together with the origin.  ``theta_mode`` selects the per-group
    mapping; only local normalization is supported.  The dual value is
    validated against the per-group continuous minimization oracle (group
    dimensions capped at 4).
    """
    cfg = cfg or DualSearchConfig()
    if theta_mode != "normalize":
        raise ValueError(f"unsupported theta mode {theta_mode!r}")
    if any(len(g) > _GROUP_DIM_CAP for g in gs.groups):
        raise EnumerationGuardError(
            f"group dimension exceeds the oracle cap {_GROUP_DIM_CAP}"
        )
    if not compatibility_check(gs.groups, disjoint_required=True):
        raise ValueError("duplicate groups: equal-support classes must differ")
    _normalization_closure_check(gs)

    t0 = time.perf_counter()
    problem = _GroupInnerProblem(gs, h, cfg)
    penalty = lambda y: (dual_sup_norm(gs, y), _dual_sup_subgradient(gs, y))

    rng = np.random.default_rng(cfg.seed + 17)
    starts = [np.zeros(gs.d)]
    finite = np.isfinite(problem.r_all)
    if finite.any():
        best_dir = problem.X_all[
            int(np.where(finite, problem.r_all, math.inf).argmin())
        ]
        nrm = float(np.linalg.norm(best_dir))
        if nrm > 0:
            for c in (0.25, 1.0):
                starts.append(-c * problem.scale * best_dir / nrm)
                starts.append(c * problem.scale * best_dir / nrm)
    while len(starts) < cfg.n_starts:
        starts.append(0.5 * problem.scale * rng.standard_normal(gs.d))

    _, y_best = _ascend(problem.inner, penalty, problem.scale, gs.d, cfg,
                        starts[: cfg.n_starts])
    candidates = [np.zeros(gs.d), y_best]
    vals = [
        -problem.conjugate_value(y) - dual_sup_norm(gs, y) for y in candidates
    ]
    i = int(np.argmax(vals))
    dual_value, y = float(vals[i]), candidates[i]

    oracle_vals = [
        _group_oracle_min(h, gs, j, cfg.seed + 29 * (j + 1))
        for j in range(len(gs.groups))
    ]
    j_best = int(np.argmin(oracle_vals))
    exact_value = min(problem.f0, oracle_vals[j_best])
    if problem.f0 <= oracle_vals[j_best]:
        support = SupportSet((), gs.d)
    else:
        support = SupportSet(gs.groups[j_best], gs.d)
    wall = time.perf_counter() - t0
    return BoundReport(
        dual_value=dual_value,
        certificate_y=y,
        exact_value=exact_value,
        exact_support=support,
        gap=exact_value - dual_value,
        inner_sup_tolerance=cfg.inner_tolerance,
        wallclock_s=wall,
        k=max(len(g) for g in gs.groups),
    )
