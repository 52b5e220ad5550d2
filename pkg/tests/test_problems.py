import numpy as np
import pytest

from prefmoo.errors import ValidationError
from prefmoo.problems import (
    evaluate,
    evaluate_batch,
    make_problem,
    sample_pf,
    theoretical_optimum,
)


class TestSpecs:
    def test_default_variable_counts(self):
        assert make_problem("ZDT1", 2).n == 30
        assert make_problem("DTLZ1", 3).n == 3 - 1 + 5
        assert make_problem("DTLZ2", 3).n == 3 - 1 + 10
        assert make_problem("DTLZ4", 10).n == 10 - 1 + 10

    def test_zdt1_is_two_objective(self):
        with pytest.raises(ValidationError):
            make_problem("ZDT1", 3)

    def test_unknown_problem(self):
        with pytest.raises(ValidationError):
            make_problem("WFG1", 3)


class TestEvaluate:
    def test_zdt1_origin(self):
        p = make_problem("ZDT1", 2)
        np.testing.assert_allclose(evaluate(p, np.zeros(p.n)), [0.0, 1.0], atol=1e-15)

    def test_zdt1_front_membership(self):
        p = make_problem("ZDT1", 2)
        for f1 in (0.0, 0.25, 0.49, 1.0):
            x = np.zeros(p.n)
            x[0] = f1
            f = evaluate(p, x)
            assert f[1] == pytest.approx(1.0 - np.sqrt(f1), abs=1e-12)

    def test_dtlz2_sphere_identity(self):
        p = make_problem("DTLZ2", 3)
        rng = np.random.default_rng(1)
        for _ in range(20):
            x = rng.random(p.n)
            x[p.m - 1 :] = 0.5
            f = evaluate(p, x)
            assert np.sum(f**2) == pytest.approx(1.0, abs=1e-12)

    def test_dtlz1_plane_point(self):
        p = make_problem("DTLZ1", 3)
        x = np.full(p.n, 0.5)
        x[:2] = 0.0
        np.testing.assert_allclose(evaluate(p, x), [0.0, 0.0, 0.5], atol=1e-12)

    def test_dtlz1_plane_identity_on_optimum(self):
        p = make_problem("DTLZ1", 3)
        rng = np.random.default_rng(2)
        for _ in range(20):
            x = rng.random(p.n)
            x[p.m - 1 :] = 0.5
            f = evaluate(p, x)
            assert f.sum() == pytest.approx(0.5, abs=1e-10)

    def test_dtlz3_shares_dtlz2_front(self):
        p2 = make_problem("DTLZ2", 3)
        p3 = make_problem("DTLZ3", 3, n=p2.n)
        x = np.random.default_rng(3).random(p2.n)
        x[2:] = 0.5
        np.testing.assert_allclose(evaluate(p2, x), evaluate(p3, x), atol=1e-9)

    def test_dtlz4_bias_exponent(self):
        p = make_problem("DTLZ4", 3)
        x = np.full(p.n, 0.5)
        f = evaluate(p, x)
        # 0.5**100 ~ 0 puts the point at the f3 corner
        np.testing.assert_allclose(f, [1.0, 0.0, 0.0], atol=1e-12)

    def test_out_of_bounds_rejected(self):
        p = make_problem("DTLZ2", 3)
        x = np.full(p.n, 0.5)
        x[0] = 1.5
        with pytest.raises(ValidationError):
            evaluate(p, x)

    def test_wrong_length_rejected(self):
        p = make_problem("DTLZ2", 3)
        with pytest.raises(ValidationError):
            evaluate(p, np.zeros(p.n + 1))

    def test_batch_matches_single(self):
        p = make_problem("DTLZ1", 4)
        rng = np.random.default_rng(4)
        X = rng.random((10, p.n))
        F = evaluate_batch(p, X)
        for i in range(10):
            np.testing.assert_allclose(F[i], evaluate(p, X[i]), atol=1e-15)

    def test_finite_difference_smoothness(self):
        # guards formula transcription: objectives vary smoothly, no NaN/Inf
        rng = np.random.default_rng(5)
        h = 1e-6
        for name in ("ZDT1", "DTLZ1", "DTLZ2", "DTLZ3", "DTLZ4"):
            p = make_problem(name, 2 if name == "ZDT1" else 3)
            for _ in range(10):
                x = rng.uniform(0.1, 0.9, size=p.n)
                for j in range(p.n):
                    xp, xm = x.copy(), x.copy()
                    xp[j] += h
                    xm[j] -= h
                    grad = (evaluate(p, xp) - evaluate(p, xm)) / (2 * h)
                    assert np.all(np.isfinite(grad))


class TestSamplePF:
    def test_zdt1_structured_points(self):
        p = make_problem("ZDT1", 2)
        pts = sample_pf(p, 3, seed=0)
        np.testing.assert_allclose(pts, [[0.0, 1.0], [0.25, 0.5], [1.0, 0.0]], atol=1e-15)

    def test_zdt1_membership(self):
        p = make_problem("ZDT1", 2)
        pts = sample_pf(p, 500, seed=0)
        np.testing.assert_allclose(pts[:, 1], 1.0 - np.sqrt(pts[:, 0]), atol=1e-12)

    @pytest.mark.parametrize("m,count", [(3, 10_000), (5, 17_550)])
    def test_dtlz2_sphere_membership_at_reported_counts(self, m, count):
        p = make_problem("DTLZ2", m)
        pts = sample_pf(p, count, seed=1)
        assert pts.shape == (count, m)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_dtlz1_plane_membership(self):
        p = make_problem("DTLZ1", 3)
        pts = sample_pf(p, 2_000, seed=2)
        np.testing.assert_allclose(pts.sum(axis=1), 0.5, atol=1e-12)
        assert np.all(pts >= 0.0)

    def test_deterministic_given_seed(self):
        p = make_problem("DTLZ2", 4)
        a = sample_pf(p, 777, seed=9)
        b = sample_pf(p, 777, seed=9)
        np.testing.assert_array_equal(a, b)

    def test_many_objective_direction_sampling(self):
        p = make_problem("DTLZ2", 8)
        pts = sample_pf(p, 1_000, seed=3)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)


class TestTheoreticalOptimum:
    def test_unit_vector_is_fixed(self):
        p = make_problem("DTLZ2", 3)
        np.testing.assert_allclose(
            theoretical_optimum([1.0, 0.0, 0.0], p), [1.0, 0.0, 0.0], atol=1e-15
        )

    def test_centroid_normalizes(self):
        p = make_problem("DTLZ2", 3)
        out = theoretical_optimum(np.full(3, 1.0 / 3.0), p)
        np.testing.assert_allclose(out, np.full(3, 1.0 / np.sqrt(3.0)), atol=1e-9)
        assert out[0] == pytest.approx(0.57735, abs=1e-5)

    def test_centroid_against_scalarization_argmin_oracle(self):
        # densely sample the sphere octant and minimize the achievement
        # scalarization; the argmin must sit at the radial projection
        p = make_problem("DTLZ2", 3)
        w = np.array([0.2, 0.5, 0.3])
        expected = theoretical_optimum(w, p)
        pts = sample_pf(p, 200_000, seed=4)
        scal = (pts / np.maximum(w, 1e-6)).max(axis=1)
        best = pts[np.argmin(scal)]
        assert np.linalg.norm(best - expected) < 1e-2

    def test_dtlz1_scaling(self):
        p = make_problem("DTLZ1", 3)
        out = theoretical_optimum([0.2, 0.3, 0.5], p)
        np.testing.assert_allclose(out, [0.1, 0.15, 0.25], atol=1e-15)
        assert out.sum() == pytest.approx(0.5, abs=1e-15)

    def test_dtlz_family_agreement(self):
        w = np.array([0.3, 0.3, 0.4])
        outs = [
            theoretical_optimum(w, make_problem(name, 3))
            for name in ("DTLZ2", "DTLZ3", "DTLZ4")
        ]
        np.testing.assert_allclose(outs[0], outs[1], atol=1e-12)
        np.testing.assert_allclose(outs[0], outs[2], atol=1e-12)

    def test_unsupported_problem(self):
        p = make_problem("ZDT1", 2)
        with pytest.raises(NotImplementedError):
            theoretical_optimum([0.5, 0.5], p)

    def test_zero_vector_rejected(self):
        p = make_problem("DTLZ2", 3)
        with pytest.raises(ValidationError):
            theoretical_optimum([0.0, 0.0, 0.0], p)
