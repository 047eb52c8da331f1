"""Group-structured norms and the union-of-subspaces lower bound."""

import itertools
import math

import numpy as np
import pytest

from sparselb.errors import (
    EnumerationGuardError,
    NotANormError,
    PropernessError,
)
from sparselb.gso import (
    GroupStructure,
    PointFamily,
    compatibility_check,
    convolution_norm,
    dual_norm_from_point_family,
    dual_sup_norm,
    gso_lower_bound,
    norm_from_point_family,
)
from sparselb.lower_bound import (
    DualSearchConfig,
    LeastSquaresObjective,
    LsqInstance,
    dual_lower_bound_l0,
    exact_sparse_lsq,
)
from sparselb.sparse_norms import ksupport_norm

from _oracles import convolution_by_decomposition, random_cover_structure

FAST = DualSearchConfig(n_samples=768, max_iters=150, n_starts=8, seed=11)

CHAIN = GroupStructure.with_unit_weights(3, [(0, 1), (1, 2)])


class TestGroupStructure:
    def test_validation(self):
        with pytest.raises(ValueError):
            GroupStructure(3, ((),), (1.0,))
        with pytest.raises(ValueError):
            GroupStructure(3, ((0, 3),), (1.0,))
        with pytest.raises(ValueError):
            GroupStructure(3, ((0,),), (0.0,))

    def test_cover_detection(self):
        assert CHAIN.covers_all()
        assert not GroupStructure.with_unit_weights(3, [(0, 1)]).covers_all()


class TestConvolutionNorm:
    def test_single_group_is_weighted_euclidean(self, rng):
        gs = GroupStructure(4, ((0, 1, 2, 3),), (1.0,))
        v = rng.standard_normal(4)
        assert convolution_norm(gs, v) == pytest.approx(
            float(np.linalg.norm(v)), abs=1e-8
        )

    def test_singletons_give_l1(self, rng):
        gs = GroupStructure.with_unit_weights(4, [(i,) for i in range(4)])
        v = rng.standard_normal(4)
        assert convolution_norm(gs, v) == pytest.approx(
            float(np.abs(v).sum()), abs=1e-8
        )

    def test_chain_example(self):
        assert convolution_norm(CHAIN, np.array([3.0, 4.0, 0.0])) == pytest.approx(
            5.0, abs=1e-8
        )

    def test_zero_vector(self):
        assert convolution_norm(CHAIN, np.zeros(3)) == 0.0

    def test_cover_violation_rejected(self):
        gs = GroupStructure.with_unit_weights(3, [(0, 1)])
        with pytest.raises(NotANormError):
            convolution_norm(gs, np.ones(3))

    def test_matches_convex_decomposition_oracle(self, rng):
        for _ in range(15):
            d = int(rng.integers(2, 7))
            groups, weights = random_cover_structure(d, rng)
            gs = GroupStructure(d, tuple(groups), weights)
            v = rng.standard_normal(d) * float(rng.choice([0.3, 1.0, 4.0]))
            mine = convolution_norm(gs, v, tol=1e-10)
            ref = convolution_by_decomposition(d, groups, weights, v)
            assert mine == pytest.approx(ref, rel=1e-6, abs=1e-6)

    def test_norm_axioms(self, rng):
        for _ in range(5):
            d = int(rng.integers(2, 6))
            groups, weights = random_cover_structure(d, rng)
            gs = GroupStructure(d, tuple(groups), weights)
            for _ in range(6):
                v = rng.standard_normal(d)
                w = rng.standard_normal(d)
                lam = float(rng.uniform(-3, 3))
                nv = convolution_norm(gs, v, tol=1e-10)
                assert convolution_norm(gs, lam * v, tol=1e-10) == pytest.approx(
                    abs(lam) * nv, rel=1e-7, abs=1e-8
                )
                assert (
                    convolution_norm(gs, v + w, tol=1e-10)
                    <= nv + convolution_norm(gs, w, tol=1e-10) + 1e-8
                )
                if np.any(v):
                    assert nv > 0.0

    def test_subspace_restriction_unit_weights(self, rng):
        # with unit weights a vector supported inside a single group costs
        # exactly its Euclidean norm (splitting cannot beat one group)
        for _ in range(10):
            d = int(rng.integers(3, 6))
            groups, _ = random_cover_structure(d, rng)
            gs = GroupStructure.with_unit_weights(d, tuple(groups))
            j = int(rng.integers(0, len(groups)))
            v = np.zeros(d)
            v[list(groups[j])] = rng.standard_normal(len(groups[j]))
            assert convolution_norm(gs, v, tol=1e-10) == pytest.approx(
                float(np.linalg.norm(v)), rel=1e-7, abs=1e-8
            )

    def test_subspace_restriction_weighted_sandwich(self, rng):
        # with weights, splitting across overlapping groups may beat the
        # cheapest containing group, but never the global-minimum weight
        for _ in range(10):
            d = int(rng.integers(3, 6))
            groups, weights = random_cover_structure(d, rng)
            gs = GroupStructure(d, tuple(groups), weights)
            j = int(rng.integers(0, len(groups)))
            v = np.zeros(d)
            v[list(groups[j])] = rng.standard_normal(len(groups[j]))
            val = convolution_norm(gs, v, tol=1e-10)
            containing = min(
                w for g, w in zip(gs.groups, gs.weights)
                if set(np.flatnonzero(v)) <= set(g)
            )
            l2 = float(np.linalg.norm(v))
            assert val <= containing * l2 + 1e-8
            assert val >= min(gs.weights) * l2 - 1e-8


class TestDualSupNorm:
    def test_chain_example(self):
        val = dual_sup_norm(CHAIN, np.array([1.0, 2.0, 2.0]))
        assert val == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-12)

    def test_single_group(self, rng):
        gs = GroupStructure(4, ((0, 1, 2, 3),), (1.0,))
        v = rng.standard_normal(4)
        assert dual_sup_norm(gs, v) == pytest.approx(float(np.linalg.norm(v)))

    def test_singletons_give_linf(self, rng):
        gs = GroupStructure.with_unit_weights(4, [(i,) for i in range(4)])
        v = rng.standard_normal(4)
        assert dual_sup_norm(gs, v) == pytest.approx(float(np.abs(v).max()))

    def test_mutual_duality_sampled(self, rng):
        for _ in range(6):
            d = int(rng.integers(2, 6))
            groups, weights = random_cover_structure(d, rng)
            gs = GroupStructure(d, tuple(groups), weights)
            vp = rng.standard_normal(d)
            s = dual_sup_norm(gs, vp)
            vp = vp / s
            # witness: the restriction of vp to its argmax group attains the
            # unit pairing ratio, so the sampled sup brackets 1
            vals = [float(np.linalg.norm(vp[list(g)])) / w
                    for g, w in zip(gs.groups, gs.weights)]
            jstar = int(np.argmax(vals))
            witness = np.zeros(d)
            witness[list(gs.groups[jstar])] = vp[list(gs.groups[jstar])]
            samples = [witness] + [rng.standard_normal(d) for _ in range(200)]
            best = 0.0
            for v in samples:
                nv = convolution_norm(gs, v, tol=1e-9)
                if nv > 0:
                    best = max(best, float(v @ vp) / nv)
                assert float(v @ vp) <= nv * 1.0 + 1e-7
            assert 1.0 - 1e-2 <= best <= 1.0 + 1e-7

    def test_ksupport_consistency(self, rng):
        for d, k in [(4, 2), (5, 2), (6, 3)]:
            groups = tuple(itertools.combinations(range(d), k))
            gs = GroupStructure.with_unit_weights(d, groups)
            for _ in range(5):
                v = rng.standard_normal(d)
                assert convolution_norm(gs, v, tol=1e-9) == pytest.approx(
                    ksupport_norm(v, k), abs=1e-6
                )


class TestPointFamily:
    def test_symmetry_required(self):
        with pytest.raises(ValueError):
            PointFamily((np.array([[1.0, 0.0]]),))

    def test_cross_polytope_gives_l1_linf_pair(self, rng):
        pf = PointFamily((np.vstack([np.eye(2), -np.eye(2)]),))
        for _ in range(20):
            v = rng.standard_normal(2)
            assert norm_from_point_family(pf, v) == pytest.approx(
                float(np.abs(v).sum()), abs=1e-9
            )
            assert dual_norm_from_point_family(pf, v) == pytest.approx(
                float(np.abs(v).max()), abs=1e-12
            )

    def test_square_vertices_give_linf(self, rng):
        pf = PointFamily(
            (np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]),)
        )
        for _ in range(20):
            v = rng.standard_normal(2)
            assert norm_from_point_family(pf, v) == pytest.approx(
                float(np.abs(v).max()), abs=1e-9
            )

    def test_span_deficiency_rejected(self):
        pf = PointFamily((np.array([[1.0, 0.0], [-1.0, 0.0]]),))
        with pytest.raises(NotANormError):
            norm_from_point_family(pf, np.array([0.0, 1.0]))

    def test_zero_vector(self):
        pf = PointFamily((np.vstack([np.eye(3), -np.eye(3)]),))
        assert norm_from_point_family(pf, np.zeros(3)) == 0.0

    def test_dual_is_union_support(self, rng):
        sets = tuple(
            np.vstack([p, -p])
            for p in (rng.standard_normal((3, 2)), rng.standard_normal((2, 2)))
        )
        pf = PointFamily(sets)
        y = rng.standard_normal(2)
        parts = [float((s @ y).max()) for s in sets]
        assert dual_norm_from_point_family(pf, y) == max(parts)

    def test_duality_sandwich(self, rng):
        pf = PointFamily(
            (np.vstack([np.eye(2), -np.eye(2)]),
             np.array([[0.5, 0.5], [-0.5, -0.5]]))
        )
        for _ in range(50):
            v = rng.standard_normal(2)
            y = rng.standard_normal(2)
            lhs = float(v @ y)
            rhs = norm_from_point_family(pf, v) * dual_norm_from_point_family(pf, y)
            assert lhs <= rhs + 1e-9

    def test_gauge_norm_axioms(self, rng):
        for _ in range(5):
            pts = rng.standard_normal((int(rng.integers(3, 7)), 3))
            pf = PointFamily((np.vstack([pts, -pts]),))
            for _ in range(8):
                v = rng.standard_normal(3)
                w = rng.standard_normal(3)
                lam = float(rng.uniform(-3, 3))
                nv = norm_from_point_family(pf, v)
                assert norm_from_point_family(pf, lam * v) == pytest.approx(
                    abs(lam) * nv, rel=1e-8, abs=1e-9
                )
                assert (
                    norm_from_point_family(pf, v + w)
                    <= nv + norm_from_point_family(pf, w) + 1e-8
                )
                assert nv > 0.0
                # duals are support functions: subadditive and homogeneous
                dv = dual_norm_from_point_family(pf, v)
                assert dual_norm_from_point_family(pf, lam * v) == pytest.approx(
                    abs(lam) * dv, rel=1e-12, abs=1e-12
                )


class TestCompatibility:
    def test_distinct_supports_disjoint(self):
        assert compatibility_check([(0, 1), (1, 2), (2,)], True)

    def test_duplicate_rejected_in_disjoint_mode(self):
        assert not compatibility_check([(0, 1), (0, 1)], True)

    def test_overlap_mode_checks_weights(self):
        assert compatibility_check([(0, 1), (0, 1)], False, weights=[1.0, 1.0])
        assert not compatibility_check([(0, 1), (0, 1)], False, weights=[1.0, 2.0])


class TestGsoLowerBound:
    def test_zero_objective(self):
        rep = gso_lower_bound(CHAIN, "normalize", lambda v: 0.0, FAST)
        assert rep.exact_value == 0.0
        assert rep.dual_value <= rep.inner_sup_tolerance

    def test_lsq_on_disjoint_groups(self, rng):
        gs = GroupStructure.with_unit_weights(3, [(0, 1), (2,)])
        A = rng.standard_normal((4, 3))
        z = rng.standard_normal(4)
        h = LeastSquaresObjective(A, z)
        rep = gso_lower_bound(gs, "normalize", h, FAST)
        per_group = []
        for g in gs.groups:
            coef, *_ = np.linalg.lstsq(A[:, list(g)], z, rcond=None)
            resid = z - A[:, list(g)] @ coef
            per_group.append(float(resid @ resid))
        assert rep.exact_value == pytest.approx(min(min(per_group), float(z @ z)))
        assert rep.dual_value <= min(per_group) + 1e-6

    def test_matches_oracle_on_random_structures(self, rng):
        for trial in range(6):
            d = int(rng.integers(2, 6))
            groups, weights = random_cover_structure(d, rng)
            gs = GroupStructure(d, tuple(groups), weights)
            p = int(rng.integers(2, 6))
            h = LeastSquaresObjective(rng.standard_normal((p, d)),
                                      rng.standard_normal(p))
            rep = gso_lower_bound(gs, "normalize", h, FAST)
            assert rep.dual_value <= rep.exact_value + rep.inner_sup_tolerance

    def test_size_capped_groups_recover_l0_bound(self, rng):
        # groups = all supports of size <= k: the union equals the sparsity
        # level set, and the group dual dominates the level-set dual
        d, k = 4, 2
        groups = [g for size in (1, 2)
                  for g in itertools.combinations(range(d), size)]
        gs = GroupStructure.with_unit_weights(d, groups)
        A = rng.standard_normal((4, d))
        z = rng.standard_normal(4)
        h = LeastSquaresObjective(A, z)
        inst = LsqInstance(A, z, k)
        exact, _, _ = exact_sparse_lsq(inst)
        rep = gso_lower_bound(gs, "normalize", h, FAST)
        val_l0, _ = dual_lower_bound_l0(h, k, FAST)
        assert rep.exact_value == pytest.approx(exact, abs=1e-9)
        assert rep.dual_value <= exact + 1e-6
        assert val_l0 <= rep.dual_value + 1e-6

    def test_identity_design_agreement(self):
        # on the identity design both duals are tight at y = 0
        d, k = 3, 1
        groups = list(itertools.combinations(range(d), 1))
        gs = GroupStructure.with_unit_weights(d, groups)
        z = np.array([3.0, 1.0, 2.0])
        h = LeastSquaresObjective(np.eye(d), z)
        rep = gso_lower_bound(gs, "normalize", h, FAST)
        val_l0, _ = dual_lower_bound_l0(h, k, FAST)
        assert rep.exact_value == pytest.approx(5.0, abs=1e-12)
        assert rep.dual_value <= 5.0 + 1e-6
        assert val_l0 <= rep.dual_value + 1e-6

    def test_group_dimension_cap(self, rng):
        gs = GroupStructure.with_unit_weights(5, [(0, 1, 2, 3, 4)])
        with pytest.raises(EnumerationGuardError):
            gso_lower_bound(gs, "normalize", lambda v: 0.0, FAST)

    def test_unknown_theta_mode(self):
        with pytest.raises(ValueError):
            gso_lower_bound(CHAIN, "identity", lambda v: 0.0, FAST)

    def test_duplicate_groups_rejected(self):
        gs = GroupStructure.with_unit_weights(3, [(0, 1), (0, 1), (2,)])
        with pytest.raises(ValueError):
            gso_lower_bound(gs, "normalize", lambda v: 0.0, FAST)

    def test_improper_objective_rejected(self):
        with pytest.raises(PropernessError):
            gso_lower_bound(CHAIN, "normalize", lambda v: -math.inf, FAST)

    def test_generic_callable_objective(self, rng):
        # quartic well: oracle by per-group continuous minimization
        gs = GroupStructure.with_unit_weights(2, [(0,), (1,)])
        target = np.array([1.0, -2.0])

        def h(v):
            w = np.asarray(v, dtype=float).reshape(-1)
            return float(((w - target) ** 2).sum() + 0.1 * (w ** 4).sum())

        cfg = DualSearchConfig(n_samples=128, max_iters=80, n_starts=6, seed=2)
        rep = gso_lower_bound(gs, "normalize", h, cfg)
        assert rep.dual_value <= rep.exact_value + rep.inner_sup_tolerance
