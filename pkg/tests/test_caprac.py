"""Ray-invariant coupling, radial infima, conjugate brackets, and the
closed-form conjugates of l0 and its level sets."""

import itertools
import math

import numpy as np
import pytest

from sparselb.caprac import (
    AscentConfig,
    LevelSetIndicator,
    RadialProfile,
    SphereSearchConfig,
    caprac_conjugate,
    caprac_coupling,
    delta_levelset_conjugate,
    l0_biconjugate_estimate,
    l0_conjugate,
    normalize,
    radial_infimum,
)
from sparselb.lower_bound import LeastSquaresObjective
from sparselb.sampling import ksparse_sphere_sample, sphere_sample
from sparselb.sparse_norms import gauge_norm, l0


class TestCoupling:
    def test_zero_primal(self, rng):
        assert caprac_coupling(np.zeros(3), rng.standard_normal(3)) == 0.0

    def test_unit_example(self):
        assert caprac_coupling([2.0, 0.0], [3.0, 1.0]) == 3.0

    def test_ray_invariance(self, rng):
        for _ in range(50):
            x = rng.standard_normal(4)
            y = rng.standard_normal(4)
            lam = float(rng.uniform(0.1, 10))
            assert caprac_coupling(lam * x, y) == pytest.approx(
                caprac_coupling(x, y), rel=1e-12, abs=1e-12
            )


class TestNormalize:
    def test_zero(self):
        assert not np.any(normalize(np.zeros(4)))

    def test_example(self):
        np.testing.assert_allclose(normalize([3.0, 4.0]), [0.6, 0.8])

    def test_idempotent_on_sphere(self, rng):
        x = normalize(rng.standard_normal(5))
        np.testing.assert_allclose(normalize(x), x, atol=1e-15)


class TestRadialInfimum:
    def test_constant(self):
        f = lambda v: 4.5
        assert radial_infimum(f, np.array([1.0, 0.0])) == 4.5

    def test_least_squares_aligned(self):
        z = np.array([1.0, 0.0])
        f = lambda v: float((z - v) @ (z - v))
        assert radial_infimum(f, np.array([1.0, 0.0])) == pytest.approx(0.0, abs=1e-9)

    def test_least_squares_orthogonal(self):
        z = np.array([1.0, 0.0])
        f = lambda v: float((z - v) @ (z - v))
        assert radial_infimum(f, np.array([0.0, 1.0])) == pytest.approx(1.0, abs=1e-9)

    def test_zero_input_evaluates_origin(self):
        f = lambda v: 7.0 if not np.any(v) else 0.0
        assert radial_infimum(f, np.zeros(2)) == 7.0

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            radial_infimum(lambda v: 0.0, np.array([0.5, 0.0]))

    def test_matches_closed_form_on_random_lsq(self, rng):
        # golden section against the analytic radial value of the
        # least-squares profile, including the boundary branch
        for _ in range(40):
            d = int(rng.integers(1, 6))
            p = int(rng.integers(1, 6))
            A = rng.standard_normal((p, d))
            z = rng.standard_normal(p)
            obj = LeastSquaresObjective(A, z)
            x = normalize(rng.standard_normal(d))
            closed = float(obj.radial_inf_on_sphere(x[None, :])[0])
            golden = radial_infimum(obj, x)
            assert golden == pytest.approx(closed, abs=1e-8)
            assert golden >= closed - 1e-12  # sampled min never undershoots

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            RadialProfile(lambda_min=0.0)
        with pytest.raises(ValueError):
            RadialProfile(tol=-1.0)


class TestCapracConjugate:
    def test_zero_objective_bracket_contains_norm(self, rng):
        f = lambda v: 0.0
        for d in (2, 3):
            y = rng.standard_normal(d)
            cfg = SphereSearchConfig(
                n_samples=2048,
                lipschitz_bound=float(np.linalg.norm(y)) + 1e-9,
                refine_top=4,
                refine_iters=30,
            )
            lower, upper = caprac_conjugate(f, y, cfg)
            target = float(np.linalg.norm(y))
            assert lower <= target + 1e-9 <= upper + 2e-9
            assert lower == pytest.approx(target, abs=1e-3)

    def test_levelset_indicator_bracket(self, rng):
        d, k = 4, 2
        y = rng.standard_normal(d)
        sample = ksparse_sphere_sample(d, k, 512)
        cfg = SphereSearchConfig(
            sample=sample,
            lipschitz_bound=float(np.linalg.norm(y)) + 1e-9,
            refine_top=0,
            refine_iters=0,
        )
        lower, upper = caprac_conjugate(LevelSetIndicator(k), y, cfg)
        target = gauge_norm(y, k)
        assert lower <= target <= upper
        assert lower == pytest.approx(target, abs=1e-4)

    def test_lsq_two_paths_agree(self, rng):
        # generic golden-section path brackets the closed-form-profile value
        d, p = 2, 3
        A = rng.standard_normal((p, d))
        z = rng.standard_normal(p)
        obj = LeastSquaresObjective(A, z)
        y = rng.standard_normal(d)
        lip = float(np.linalg.norm(y)) + 8.0 * float(z @ z)
        base = sphere_sample(d, 4096)
        fast_cfg = SphereSearchConfig(sample=base, lipschitz_bound=lip,
                                      refine_top=6, refine_iters=40)
        lower_fast, upper_fast = caprac_conjugate(obj, y, fast_cfg)

        plain = lambda v: float((z - A @ v) @ (z - A @ v))
        lower_gold, upper_gold = caprac_conjugate(plain, y, fast_cfg)
        assert lower_gold == pytest.approx(lower_fast, abs=1e-6)
        assert lower_fast <= upper_gold + 1e-9

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            SphereSearchConfig(n_samples=0)
        with pytest.raises(ValueError):
            SphereSearchConfig(lipschitz_bound=0.0)

    def test_bracket_order(self, rng):
        f = lambda v: float(v @ v)
        y = rng.standard_normal(3)
        cfg = SphereSearchConfig(n_samples=512, lipschitz_bound=5.0)
        lower, upper = caprac_conjugate(f, y, cfg)
        assert lower <= upper


class TestLevelSetConjugate:
    def test_examples(self):
        assert delta_levelset_conjugate([3.0, -4.0, 0.0], 1) == 4.0
        assert delta_levelset_conjugate([3.0, -4.0, 0.0], 0) == 0.0
        y = np.array([1.0, -2.0, 2.0])
        assert delta_levelset_conjugate(y, 3) == float(np.linalg.norm(y))

    def test_equals_support_enumeration_exactly(self, rng):
        # both sides are finite maxima over identical fsum expressions
        for _ in range(30):
            d = int(rng.integers(1, 9))
            y = rng.standard_normal(d)
            for k in range(d + 1):
                enum = 0.0
                for K in itertools.combinations(range(d), k):
                    enum = max(enum, math.sqrt(
                        math.fsum(float(y[i]) ** 2 for i in K)))
                assert delta_levelset_conjugate(y, k) == enum

    def test_enumeration_witness(self, rng):
        # the maximizing support's normalized restriction attains the value
        for _ in range(20):
            d = int(rng.integers(2, 7))
            k = int(rng.integers(1, d + 1))
            y = rng.standard_normal(d)
            best = -math.inf
            for K in itertools.combinations(range(d), k):
                xk = np.zeros(d)
                xk[list(K)] = y[list(K)]
                if np.any(xk):
                    best = max(best, caprac_coupling(xk, y))
            assert best == pytest.approx(delta_levelset_conjugate(y, k), abs=1e-12)


class TestL0Conjugate:
    def test_examples(self):
        assert l0_conjugate(np.zeros(3)) == 0.0
        e1 = np.array([1.0, 0.0, 0.0])
        assert l0_conjugate(e1) == 0.0
        assert l0_conjugate(np.array([2.0, 0.0, 0.0])) == 1.0

    def test_scaled_axis_formula(self):
        for t in (0.0, 0.5, 1.0, 2.0, 10.0):
            y = np.array([t, 0.0, 0.0, 0.0])
            assert l0_conjugate(y) == max(0.0, t - 1.0)

    def test_matches_loop_over_levels(self, rng):
        for _ in range(30):
            d = int(rng.integers(1, 9))
            y = rng.standard_normal(d) * 3
            ref = max(gauge_norm(y, ell) - ell for ell in range(d + 1))
            assert l0_conjugate(y) == ref


class TestL0Biconjugate:
    def test_zero_vector(self):
        assert l0_biconjugate_estimate(np.zeros(4), AscentConfig()) == 0.0

    def test_equal_magnitude_supports_reach_count(self):
        cfg = AscentConfig()
        for m in (1, 2, 3):
            x = np.zeros(5)
            x[:m] = 1.0
            assert l0_biconjugate_estimate(x, cfg) == pytest.approx(m, abs=1e-3)

    def test_never_exceeds_l0(self, rng):
        cfg = AscentConfig(n_starts=4, n_t=60)
        for _ in range(100):
            d = int(rng.integers(1, 8))
            x = rng.standard_normal(d) * (rng.random(d) > 0.3)
            assert l0_biconjugate_estimate(x, cfg) <= l0(x) + 1e-9

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            AscentConfig(t_max=-1.0)


class TestLevelSetBiconjugateDirection:
    def test_sparse_vectors_never_positive(self, rng):
        # for l0(x) <= k the conjugate pair value coupling - gauge stays <= 0
        for _ in range(50):
            d = int(rng.integers(2, 7))
            k = int(rng.integers(1, d + 1))
            x = np.zeros(d)
            support = rng.choice(d, size=min(k, d), replace=False)
            x[support] = rng.standard_normal(len(support))
            for _ in range(20):
                y = rng.standard_normal(d) * float(rng.choice([0.5, 5.0, 50.0]))
                assert caprac_coupling(x, y) - gauge_norm(y, k) <= 1e-12

    def test_oversparse_grows_unboundedly(self):
        # equal magnitudes with m > k: along y = t sign(x) the value grows
        # like t (sqrt(m) - sqrt(k))
        d, m, k = 5, 3, 1
        x = np.zeros(d)
        x[:m] = 1.0
        t = 1e3
        y = t * np.sign(x)
        val = caprac_coupling(x, y) - gauge_norm(y, k)
        assert val >= t * (math.sqrt(m) - math.sqrt(k)) - 1e-6
