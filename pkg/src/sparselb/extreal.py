"""Extended-real arithmetic with the Moreau lower and upper additions.

Values live on the extended line [-inf, +inf].  Ordinary addition is
undefined for (+inf) + (-inf); the two Moreau additions resolve that case
in opposite directions:

* lower addition:  (+inf) + (-inf) = -inf   (the convention under infima)
* upper addition:  (+inf) + (-inf) = +inf   (the convention under suprema)

Both extensions are commutative, associative and monotone in each operand.
No NaN state exists: constructors reject it, and the array helpers never
produce one.  Comparisons use the standard total order with
-inf < finite < +inf; no tolerance is applied here (solver modules own all
tolerances).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ExtReal",
    "POS_INF",
    "NEG_INF",
    "lower_add",
    "upper_add",
    "neg",
    "lower_add_arrays",
    "upper_add_arrays",
]


@dataclass(frozen=True, order=True)
class ExtReal:
    """A single extended-real value (finite float, +inf or -inf)."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("ExtReal has no NaN state")
        object.__setattr__(self, "value", v)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def is_pos_inf(self) -> bool:
        return self.value == math.inf

    @property
    def is_neg_inf(self) -> bool:
        return self.value == -math.inf

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"ExtReal({self.value!r})"


POS_INF = ExtReal(math.inf)
NEG_INF = ExtReal(-math.inf)


def _as_float(u: ExtReal | float | int) -> float:
    v = float(u)
    if math.isnan(v):
        raise ValueError("NaN is not an extended real")
    return v


def lower_add(u: ExtReal | float, v: ExtReal | float) -> ExtReal:
    """Moreau lower addition: (+inf) + (-inf) resolves to -inf."""
    a, b = _as_float(u), _as_float(v)
    if math.isinf(a) and math.isinf(b) and (a > 0) != (b > 0):
        return NEG_INF
    return ExtReal(a + b)


def upper_add(u: ExtReal | float, v: ExtReal | float) -> ExtReal:
    """Moreau upper addition: (+inf) + (-inf) resolves to +inf."""
    a, b = _as_float(u), _as_float(v)
    if math.isinf(a) and math.isinf(b) and (a > 0) != (b > 0):
        return POS_INF
    return ExtReal(a + b)


def neg(u: ExtReal | float) -> ExtReal:
    """Negation; swaps the infinities."""
    return ExtReal(-_as_float(u))


def _mixed_inf_mask(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.isinf(a) & np.isinf(b) & (np.signbit(a) != np.signbit(b))


def lower_add_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise lower addition of broadcastable float arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a + b
    mask = _mixed_inf_mask(*np.broadcast_arrays(a, b))
    if mask.any():
        out = np.where(mask, -np.inf, out)
    return out


def upper_add_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise upper addition of broadcastable float arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a + b
    mask = _mixed_inf_mask(*np.broadcast_arrays(a, b))
    if mask.any():
        out = np.where(mask, np.inf, out)
    return out
