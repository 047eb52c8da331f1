"""Generalized Fenchel-Moreau conjugacy, exact on finite sampled spaces.

A coupling is an arbitrary extended-real table c(x, y) over a finite primal
sample X and a finite dual sample Y.  Because the spaces are finite, every
supremum in a conjugate is an exact maximum, so the weak-duality
inequalities checked here hold exactly (no tolerance).

Infinite coupling or function values are stored as IEEE +/-inf; the
inf - inf corner cases are resolved by the Moreau additions from
:mod:`sparselb.extreal`.  Tie-breaking for argmax/argmin is always the
lowest point index, so certificates are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .extreal import ExtReal, lower_add_arrays, upper_add_arrays

__all__ = [
    "SampledSpace",
    "ExtFunction",
    "CouplingTable",
    "ThetaMapping",
    "conjugate",
    "reverse_conjugate",
    "biconjugate",
    "weak_duality_gap",
    "infimal_postcomposition",
    "theta_conjugate_identity_check",
    "support_function",
    "polar_membership",
    "lower_bound_finite",
]


def _check_values(values: np.ndarray, what: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if np.isnan(values).any():
        raise ValueError(f"{what} contains NaN")
    return values


@dataclass(frozen=True)
class SampledSpace:
    """A finite ordered list of distinct points of R^d."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise ValueError("sampled space must be nonempty")
        if pts.ndim != 2:
            raise ValueError("points must be a (n, d) array")
        if not np.isfinite(pts).all():
            raise ValueError("sample points must be finite")
        seen = set()
        for row in pts:
            key = row.tobytes()
            if key in seen:
                raise ValueError("duplicate point in sampled space")
            seen.add(key)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def row_index(self) -> dict[bytes, int]:
        """Exact-match lookup from point bytes to its index."""
        return {row.tobytes(): i for i, row in enumerate(self.points)}


@dataclass(frozen=True)
class ExtFunction:
    """An extended-real function given by one value per sampled point."""

    space: SampledSpace
    values: np.ndarray

    def __post_init__(self):
        vals = _check_values(self.values, "function values").reshape(-1)
        if vals.shape[0] != len(self.space):
            raise DimensionMismatchError(
                f"{vals.shape[0]} values for a {len(self.space)}-point space"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, space: SampledSpace, c: float) -> "ExtFunction":
        return cls(space, np.full(len(space), float(c)))

    @classmethod
    def indicator(cls, space: SampledSpace, mask: np.ndarray) -> "ExtFunction":
        """Characteristic function: 0 on masked points, +inf elsewhere."""
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        if mask.shape[0] != len(space):
            raise DimensionMismatchError("mask length does not match space")
        return cls(space, np.where(mask, 0.0, np.inf))


@dataclass(frozen=True)
class CouplingTable:
    """Coupling values c(x_i, y_j) between two sampled spaces."""

    primal: SampledSpace
    dual: SampledSpace
    values: np.ndarray

    def __post_init__(self):
        vals = _check_values(self.values, "coupling values")
        if vals.shape != (len(self.primal), len(self.dual)):
            raise DimensionMismatchError(
                f"coupling shape {vals.shape} does not match "
                f"({len(self.primal)}, {len(self.dual)})"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def bilinear(cls, primal: SampledSpace, dual: SampledSpace) -> "CouplingTable":
        if primal.dim != dual.dim:
            raise DimensionMismatchError("bilinear coupling needs equal dims")
        return cls(primal, dual, primal.points @ dual.points.T)

    @classmethod
    def from_theta(cls, theta: "ThetaMapping", dual: SampledSpace) -> "CouplingTable":
        """One-sided linear coupling c(w, y) = <theta(w), y>."""
        if theta.images.shape[1] != dual.dim:
            raise DimensionMismatchError("theta images do not match dual dim")
        return cls(theta.source, dual, theta.images @ dual.points.T)

    def negated(self) -> "CouplingTable":
        return CouplingTable(self.primal, self.dual, -self.values)

    def reverse(self) -> "CouplingTable":
        return CouplingTable(self.dual, self.primal, self.values.T)


@dataclass(frozen=True)
class ThetaMapping:
    """A pointwise mapping from a sampled source into a target space."""

    source: SampledSpace
    images: np.ndarray

    def __post_init__(self):
        imgs = np.atleast_2d(np.asarray(self.images, dtype=float))
        if imgs.shape[0] != len(self.source):
            raise DimensionMismatchError("one image per source point required")
        if not np.isfinite(imgs).all():
            raise ValueError("theta images must be finite")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, space: SampledSpace) -> "ThetaMapping":
        return cls(space, space.points.copy())


def _require_primal(f: ExtFunction, c: CouplingTable) -> None:
    if f.space is not c.primal and not np.array_equal(f.space.points, c.primal.points):
        raise DimensionMismatchError("function space does not match coupling primal")


def conjugate(f: ExtFunction, c: CouplingTable) -> ExtFunction:
    """Conjugate g(y) = max_x [ c(x, y) (+.) -f(x) ].

    Suprema pair with the lower addition (inf - inf resolves downward), so
    points where f = +inf never contribute, whatever the coupling value.
    """
    _require_primal(f, c)
    table = lower_add_arrays(c.values, -f.values[:, None])
    return ExtFunction(c.dual, table.max(axis=0))


def reverse_conjugate(g: ExtFunction, c: CouplingTable) -> ExtFunction:
    """Conjugate along the reverse coupling, mapping dual functions back."""
    if g.space is not c.dual and not np.array_equal(g.space.points, c.dual.points):
        raise DimensionMismatchError("function space does not match coupling dual")
    return conjugate(g, c.reverse())


def biconjugate(f: ExtFunction, c: CouplingTable) -> ExtFunction:
    """Conjugate twice: always a pointwise lower bound on f."""
    return reverse_conjugate(conjugate(f, c), c)


def weak_duality_gap(
    f: ExtFunction, h: ExtFunction, c: CouplingTable
) -> tuple[ExtReal, ExtReal]:
    """Both sides of the generalized weak-duality inequality.

    Returns ``(lhs, rhs)`` with
    ``lhs = max_y [ -f^c(y) (+.) -h^{-c}(y) ]`` under the lower addition
    (the supremum convention) and ``rhs = min_x [ f(x) (+..) h(x) ]`` under
    the upper addition (the constrained-infimum convention, so an indicator
    h = +inf excludes a point even where f = -inf); ``lhs <= rhs`` holds on
    every instance, including infinite values.
    """
    _require_primal(f, c)
    _require_primal(h, c)
    fc = conjugate(f, c).values
    hmc = conjugate(h, c.negated()).values
    lhs = lower_add_arrays(-fc, -hmc).max()
    rhs = upper_add_arrays(f.values, h.values).min()
    return ExtReal(float(lhs)), ExtReal(float(rhs))


def infimal_postcomposition(
    h: ExtFunction, theta: ThetaMapping, target: SampledSpace
) -> ExtFunction:
    """Pushforward infimum of h along theta; +inf where no preimage exists."""
    if theta.source is not h.space and not np.array_equal(
        theta.source.points, h.space.points
    ):
        raise DimensionMismatchError("theta source does not match h's space")
    if theta.images.shape[1] != target.dim:
        raise DimensionMismatchError("theta images do not match target dim")
    index = target.row_index()
    out = np.full(len(target), np.inf)
    for img, hv in zip(theta.images, h.values):
        j = index.get(img.tobytes())
        if j is not None and hv < out[j]:
            out[j] = hv
    return ExtFunction(target, out)


def support_function(points: np.ndarray, y: np.ndarray) -> float:
    """sigma(y) = max over the point list of <x, y>."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.size == 0:
        raise ValueError("support function of an empty set")
    y = np.asarray(y, dtype=float).reshape(-1)
    if points.shape[1] != y.shape[0]:
        raise DimensionMismatchError("point dimension does not match y")
    return float((points @ y).max())


def polar_membership(points: np.ndarray, y: np.ndarray) -> bool:
    """True iff <x, y> <= 1 for every point, i.e. y lies in the polar set."""
    return support_function(points, y) <= 1.0


def theta_conjugate_identity_check(
    h: ExtFunction, theta: ThetaMapping, c_theta: CouplingTable
) -> bool:
    """Self-test of the engine on the one-sided linear coupling identities.

    Checks, exactly on the sampled spaces:

    * the coupling conjugate of h equals the Fenchel conjugate of the
      pushforward of h onto theta's image points;
    * reverse-conjugation of a dual function equals its Fenchel conjugate
      composed with theta;
    * the negated-coupling conjugate of a characteristic function equals
      the support function of the negated image set.
    """
    dual = c_theta.dual
    expected = theta.images @ dual.points.T
    if c_theta.values.shape != expected.shape or not np.array_equal(
        c_theta.values, expected
    ):
        raise DimensionMismatchError("coupling table was not built from theta")

    # pushforward target: the distinct image points, in first-seen order
    seen: dict[bytes, int] = {}
    rows = []
    for img in theta.images:
        key = img.tobytes()
        if key not in seen:
            seen[key] = len(rows)
            rows.append(img)
    target = SampledSpace(np.array(rows))

    lhs = conjugate(h, c_theta).values
    push = infimal_postcomposition(h, theta, target)
    fenchel = conjugate(push, CouplingTable.bilinear(target, dual)).values
    if not np.array_equal(lhs, fenchel):
        return False

    g = ExtFunction(dual, lhs)
    back = reverse_conjugate(g, c_theta).values
    # Fenchel conjugate of g evaluated at the image points theta(w)
    composed = lower_add_arrays(
        theta.images @ dual.points.T, -g.values[None, :]
    ).max(axis=1)
    if not np.array_equal(back, composed):
        return False

    for mask in (np.ones(len(theta.source), dtype=bool), np.isfinite(h.values)):
        if not mask.any():
            continue
        delta = ExtFunction.indicator(theta.source, mask)
        conj_neg = conjugate(delta, c_theta.negated()).values
        sigma = ((-theta.images[mask]) @ dual.points.T).max(axis=0)
        if not np.array_equal(conj_neg, sigma):
            return False
    return True


def lower_bound_finite(
    h: ExtFunction,
    w_mask: np.ndarray,
    theta: ThetaMapping,
    dual: SampledSpace,
) -> tuple[ExtReal, int]:
    """Finite-sample dual lower bound for min of h over the masked set.

    Maximizes ``-(theta |> h)*(y) (+.) -sigma_{-theta(W)}(y)`` over the dual
    sample and returns the value with the maximizing index (lowest index on
    ties).  The value never exceeds ``min over W of h``.
    """
    w_mask = np.asarray(w_mask, dtype=bool).reshape(-1)
    if w_mask.shape[0] != len(theta.source):
        raise DimensionMismatchError("mask length does not match theta source")
    if not w_mask.any():
        raise ValueError("the constraint set W is empty")
    c = CouplingTable.from_theta(theta, dual)
    conj = conjugate(h, c).values
    sigma = ((-theta.images[w_mask]) @ dual.points.T).max(axis=0)
    obj = lower_add_arrays(-conj, -sigma)
    j = int(obj.argmax())
    return ExtReal(float(obj[j])), j
