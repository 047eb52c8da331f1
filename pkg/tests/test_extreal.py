"""Exhaustive verification of the Moreau addition algebra.

All identities are checked over the operand lattice
{-inf, -2, -1, 0, 1, 2, +inf}; the function-valued identities use every
assignment of two-point functions into the lattice.  Everything asserts
exact (float) equality: the lattice values make every addition exact.
"""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparselb.extreal import (
    NEG_INF,
    POS_INF,
    ExtReal,
    lower_add,
    lower_add_arrays,
    neg,
    upper_add,
    upper_add_arrays,
)

INF = math.inf
LATTICE = [-INF, -2.0, -1.0, 0.0, 1.0, 2.0, INF]
PAIRS = list(itertools.product(LATTICE, repeat=2))
TRIPLES = list(itertools.product(LATTICE, repeat=3))


def lo(u, v):
    return float(lower_add(u, v))


def up(u, v):
    return float(upper_add(u, v))


class TestExtReal:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            ExtReal(float("nan"))

    def test_total_order(self):
        assert NEG_INF < ExtReal(-1e300) < ExtReal(0.0) < ExtReal(1e300) < POS_INF

    def test_flags(self):
        assert POS_INF.is_pos_inf and not POS_INF.is_finite
        assert NEG_INF.is_neg_inf
        assert ExtReal(2.0).is_finite


class TestBaseCases:
    def test_lower_add_resolves_down(self):
        assert lo(INF, -INF) == -INF
        assert lo(-INF, INF) == -INF

    def test_upper_add_resolves_up(self):
        assert up(INF, -INF) == INF
        assert up(-INF, INF) == INF

    def test_finite_addition(self):
        assert lo(2.0, 3.0) == 5.0
        assert up(-3.0, -4.0) == -7.0

    def test_one_sided_infinities(self):
        assert lo(INF, 5.0) == INF
        assert lo(-INF, 0.0) == -INF
        assert up(-INF, 0.0) == -INF

    def test_neg(self):
        assert float(neg(POS_INF)) == -INF
        assert float(neg(0.0)) == 0.0
        assert float(neg(-2.5)) == 2.5


class TestLowerAdditionLattice:
    def test_commutative_associative(self):
        for u, v in PAIRS:
            assert lo(u, v) == lo(v, u)
        for u, v, w in TRIPLES:
            assert lo(lo(u, v), w) == lo(u, lo(v, w))

    def test_monotone(self):
        for u, v in PAIRS:
            for u2, v2 in PAIRS:
                if u <= u2 and v <= v2:
                    assert lo(u, v) <= lo(u2, v2)

    def test_negation_superadditive(self):
        for u, v in PAIRS:
            assert lo(-u, -v) <= -lo(u, v)

    def test_self_cancellation(self):
        for u in LATTICE:
            assert lo(-u, u) <= 0.0

    def test_sup_distribution(self):
        # sup f + sup g = sup of the pairwise lower sums, for every pair of
        # two-point functions into the lattice
        for f in PAIRS:
            for g in PAIRS:
                lhs = lo(max(f), max(g))
                rhs = max(lo(a, b) for a in f for b in g)
                assert lhs == rhs

    def test_inf_subdistribution(self):
        for f in PAIRS:
            for g in PAIRS:
                lhs = lo(min(f), min(g))
                rhs = min(lo(a, b) for a in f for b in g)
                assert lhs <= rhs

    def test_inf_translation(self):
        for f in PAIRS:
            for t in LATTICE:
                if t < INF:
                    assert lo(min(f), t) == min(lo(a, t) for a in f)


class TestUpperAdditionLattice:
    def test_commutative_associative(self):
        for u, v in PAIRS:
            assert up(u, v) == up(v, u)
        for u, v, w in TRIPLES:
            assert up(up(u, v), w) == up(u, up(v, w))

    def test_monotone(self):
        for u, v in PAIRS:
            for u2, v2 in PAIRS:
                if u <= u2 and v <= v2:
                    assert up(u, v) <= up(u2, v2)

    def test_negation_subadditive(self):
        for u, v in PAIRS:
            assert up(-u, -v) >= -up(u, v)

    def test_self_cancellation(self):
        for u in LATTICE:
            assert up(-u, u) >= 0.0

    def test_inf_distribution(self):
        for f in PAIRS:
            for g in PAIRS:
                lhs = up(min(f), min(g))
                rhs = min(up(a, b) for a in f for b in g)
                assert lhs == rhs

    def test_sup_superdistribution(self):
        for f in PAIRS:
            for g in PAIRS:
                lhs = up(max(f), max(g))
                rhs = max(up(a, b) for a in f for b in g)
                assert lhs >= rhs

    def test_sup_translation(self):
        for f in PAIRS:
            for t in LATTICE:
                if t > -INF:
                    assert up(max(f), t) == max(up(a, t) for a in f)


class TestJointIdentities:
    def test_lower_below_upper(self):
        for u, v in PAIRS:
            assert lo(u, v) <= up(u, v)

    def test_negation_swaps_additions(self):
        for u, v in PAIRS:
            assert -lo(u, v) == up(-u, -v)
            assert -up(u, v) == lo(-u, -v)

    def test_mixed_associativity_with_strictness(self):
        # lower(upper(u, v), w) <= upper(u, lower(v, w)), strict exactly when
        # u = +inf, w = -inf, or u = -inf, w = +inf with v finite
        for u, v, w in TRIPLES:
            lhs = lo(up(u, v), w)
            rhs = up(u, lo(v, w))
            assert lhs <= rhs
            strict = (u == INF and w == -INF) or (
                u == -INF and w == INF and -INF < v < INF
            )
            assert (lhs < rhs) == strict

    def test_order_equivalences(self):
        for u, v in PAIRS:
            assert (lo(u, -v) <= 0.0) == (u <= v) == (0.0 <= up(v, -u))

    def test_three_way_transposition(self):
        # lower(u, -v) <= w  iff  u <= upper(v, w)  iff  lower(u, -w) <= v
        for u, v, w in TRIPLES:
            p1 = lo(u, -v) <= w
            p2 = u <= up(v, w)
            p3 = lo(u, -w) <= v
            assert p1 == p2 == p3

    def test_three_way_transposition_dual(self):
        # w <= upper(v, -u)  iff  lower(u, w) <= v  iff  u <= upper(v, -w)
        for u, v, w in TRIPLES:
            p1 = w <= up(v, -u)
            p2 = lo(u, w) <= v
            p3 = u <= up(v, -w)
            assert p1 == p2 == p3


finite_or_inf = st.one_of(
    st.floats(allow_nan=False, allow_infinity=False, width=64,
              min_value=-1e100, max_value=1e100),
    st.sampled_from([INF, -INF]),
)


@given(finite_or_inf, finite_or_inf)
def test_scalar_matches_array_helpers(u, v):
    assert float(lower_add(u, v)) == lower_add_arrays(np.array([u]), np.array([v]))[0]
    assert float(upper_add(u, v)) == upper_add_arrays(np.array([u]), np.array([v]))[0]


@given(finite_or_inf, finite_or_inf)
def test_lower_upper_never_nan(u, v):
    assert not math.isnan(float(lower_add(u, v)))
    assert not math.isnan(float(upper_add(u, v)))
    assert float(lower_add(u, v)) <= float(upper_add(u, v))
