import numpy as np
import pytest

from prefmoo.errors import ValidationError
from prefmoo.lattice import generate_das_dennis
from prefmoo.optimizer import (
    Individual,
    NeighborhoodParams,
    OperatorParams,
    aggregation,
    build_subproblems,
    diversity_distance,
    evolve_generation,
    init_state,
    make_rng,
    polynomial_mutation,
    population_to_csv,
    run,
    sbx_crossover,
    stable_match,
)
from prefmoo.problems import make_problem


def find_blocking_pairs(W, F, ideal, assignment):
    """Exhaustive stability oracle: every (subproblem, candidate) pair where
    both sides strictly prefer each other over their assignments."""
    S, C = W.shape[0], F.shape[0]
    conv = np.array([[aggregation(F[c], W[s], ideal) for c in range(C)] for s in range(S)])
    div = np.array(
        [[diversity_distance(F[c], W[s], ideal) for s in range(S)] for c in range(C)]
    )
    cand_of_sub = assignment
    sub_of_cand = {int(c): s for s, c in enumerate(assignment)}
    blocking = []
    for s in range(S):
        for c in range(C):
            if c == cand_of_sub[s]:
                continue
            # s prefers c over its current candidate (index breaks ties)
            cur = cand_of_sub[s]
            s_prefers = (conv[s, c], c) < (conv[s, cur], cur)
            holder = sub_of_cand.get(c)
            if holder is None:
                c_prefers = True  # unmatched candidate takes anyone
            else:
                c_prefers = (div[c, s], s) < (div[c, holder], holder)
            if s_prefers and c_prefers:
                blocking.append((s, c))
    return blocking


class TestSBX:
    def test_no_crossover_returns_parents(self):
        rng = make_rng(0)
        p1 = np.array([0.2, 0.4, 0.6])
        p2 = np.array([0.3, 0.5, 0.7])
        c1, c2 = sbx_crossover(p1, p2, pc=0.0, eta_c=10.0, rng=rng)
        np.testing.assert_array_equal(c1, p1)
        np.testing.assert_array_equal(c2, p2)

    def test_identical_parents_identical_children(self):
        rng = make_rng(1)
        p = np.array([0.25, 0.5, 0.75])
        c1, c2 = sbx_crossover(p, p.copy(), pc=1.0, eta_c=10.0, rng=rng)
        np.testing.assert_array_equal(c1, p)
        np.testing.assert_array_equal(c2, p)

    def test_mean_preservation_monte_carlo(self):
        rng = make_rng(2)
        p1 = np.full(4, 0.45)
        p2 = np.full(4, 0.55)
        acc = np.zeros(4)
        trials = 10_000
        for _ in range(trials):
            c1, c2 = sbx_crossover(p1, p2, pc=1.0, eta_c=10.0, rng=rng)
            acc += 0.5 * (c1 + c2)
        np.testing.assert_allclose(acc / trials, 0.5 * (p1 + p2), atol=1e-3)

    def test_children_in_bounds(self):
        rng = make_rng(3)
        p1 = np.array([0.01, 0.99])
        p2 = np.array([0.99, 0.01])
        for _ in range(500):
            c1, c2 = sbx_crossover(p1, p2, pc=1.0, eta_c=2.0, rng=rng)
            for c in (c1, c2):
                assert np.all(c >= 0.0) and np.all(c <= 1.0)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            sbx_crossover(np.zeros(3), np.zeros(4), 1.0, 10.0, make_rng(0))


class TestPolynomialMutation:
    def test_zero_probability_is_identity(self):
        rng = make_rng(4)
        x = np.array([0.3, 0.6, 0.9])
        np.testing.assert_array_equal(polynomial_mutation(x, 0.0, 20.0, rng), x)

    def test_stays_at_bounds(self):
        rng = make_rng(5)
        x = np.zeros(6)
        for _ in range(200):
            out = polynomial_mutation(x, 1.0, 20.0, rng)
            assert np.all(out >= 0.0) and np.all(out <= 1.0)

    def test_empirical_rate(self):
        rng = make_rng(6)
        pm = 0.15
        genes = 100_000
        x = np.full(genes, 0.5)
        out = polynomial_mutation(x, pm, 20.0, rng)
        flipped = int(np.sum(out != x))
        sigma = np.sqrt(genes * pm * (1.0 - pm))
        assert abs(flipped - genes * pm) < 3.0 * sigma


class TestAggregation:
    def test_ideal_scores_zero(self):
        assert aggregation([0.1, 0.2], [0.5, 0.5], [0.1, 0.2]) == 0.0

    def test_floor_on_zero_weights(self):
        # achievement form: zero components are floored, so deviations on
        # them dominate and drive solutions to the weight's face
        v = aggregation([2.0, 9.0, 9.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0])
        assert v == pytest.approx(9.0 / 1e-6, rel=1e-12)

    def test_below_ideal_clamped(self):
        assert aggregation([0.0, 0.1], [0.5, 0.5], [0.2, 0.1]) == 0.0

    def test_sphere_argmin_matches_weight_direction(self):
        from prefmoo.problems import make_problem, sample_pf, theoretical_optimum

        p = make_problem("DTLZ2", 3)
        pts = sample_pf(p, 300_000, seed=10)
        w = np.array([0.1, 0.4, 0.5])
        ideal = np.zeros(3)
        scal = (np.maximum(pts - ideal, 0.0) / np.maximum(w, 1e-6)).max(axis=1)
        best = pts[np.argmin(scal)]
        expected = theoretical_optimum(w, p)
        assert np.linalg.norm(best - expected) < 1e-2


class TestDiversityDistance:
    def test_collinear_is_zero(self):
        w = np.array([0.2, 0.8])
        f = 3.0 * w
        assert diversity_distance(f, w, np.zeros(2)) == pytest.approx(0.0, abs=1e-12)

    def test_perpendicular_is_full_norm(self):
        w = np.array([1.0, 0.0])
        f = np.array([0.0, 2.5])
        assert diversity_distance(f, w, np.zeros(2)) == pytest.approx(2.5, abs=1e-12)

    def test_against_line_sampling_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            m = int(rng.integers(2, 5))
            w = rng.random(m) + 0.05
            f = rng.random(m) * 2.0
            ideal = np.zeros(m)
            got = diversity_distance(f, w, ideal)
            w_hat = w / np.linalg.norm(w)
            ts = np.linspace(-1.0, 5.0, 10_000)
            oracle = np.min(np.linalg.norm(f[None, :] - ts[:, None] * w_hat[None, :], axis=1))
            assert got <= oracle + 1e-6
            assert got == pytest.approx(oracle, abs=1e-3)


class TestStableMatch:
    def test_one_to_one(self):
        W = np.array([[1.0, 0.0]])
        F = np.array([[0.3, 0.7]])
        assignment = stable_match(W, F, np.zeros(2))
        assert assignment.tolist() == [0]

    def test_two_by_two_crossed_matches_brute_force(self):
        # crossed preferences: each subproblem converges best with one
        # candidate while the candidates' diversity ranks disagree
        W = np.array([[0.9, 0.1], [0.1, 0.9]])
        F = np.array([[0.2, 0.9], [0.9, 0.2]])
        ideal = np.zeros(2)
        assignment = stable_match(W, F, ideal)
        # brute force over both perfect matchings: pick the stable one
        stable = []
        for perm in ([0, 1], [1, 0]):
            if not find_blocking_pairs(W, F, ideal, np.array(perm)):
                stable.append(perm)
        assert assignment.tolist() in stable

    def test_random_instances_have_no_blocking_pairs(self):
        rng = np.random.default_rng(12)
        for _ in range(60):
            S = int(rng.integers(1, 11))
            C = int(rng.integers(S, 2 * S + 1))
            m = int(rng.integers(2, 4))
            W = rng.random((S, m)) + 1e-3
            W /= W.sum(axis=1, keepdims=True)
            F = rng.random((C, m))
            ideal = np.zeros(m)
            assignment = stable_match(W, F, ideal)
            assert len(set(assignment.tolist())) == S  # injective
            assert not find_blocking_pairs(W, F, ideal, assignment)

    def test_too_few_candidates(self):
        with pytest.raises(ValidationError):
            stable_match(np.eye(2), np.array([[0.5, 0.5]]), np.zeros(2))


class TestEvolveAndRun:
    def test_zero_variation_reselects_parents(self):
        problem = make_problem("DTLZ2", 3)
        weights = generate_das_dennis(3, 4).points
        rng = make_rng(21)
        state = init_state(problem, weights, seed=21, rng=rng)
        parents = {ind.x.tobytes() for ind in state.population}
        ops = OperatorParams(pc=0.0, pm=0.0)
        nxt = evolve_generation(state, problem, rng, operators=ops)
        assert len(nxt.population) == len(state.population)
        for ind in nxt.population:
            assert ind.x.tobytes() in parents

    def test_ideal_monotone_over_generations(self):
        problem = make_problem("DTLZ2", 3)
        weights = generate_das_dennis(3, 5).points
        result = run(problem, weights, generations=50, seed=3)
        ideals = np.array([row["ideal"] for row in result.history])
        assert np.all(np.diff(ideals, axis=0) <= 1e-12)
        F = np.vstack([ind.f for ind in result.population])
        assert np.all(result.state.ideal <= F.min(axis=0) + 1e-12)

    def test_bitwise_determinism(self):
        problem = make_problem("ZDT1", 2)
        weights = generate_das_dennis(2, 19).points
        a = run(problem, weights, generations=20, seed=5)
        b = run(problem, weights, generations=20, seed=5)
        for ia, ib in zip(a.population, b.population):
            assert ia.x.tobytes() == ib.x.tobytes()
            assert ia.f.tobytes() == ib.f.tobytes()

    def test_seeds_differ(self):
        problem = make_problem("ZDT1", 2)
        weights = generate_das_dennis(2, 9).points
        a = run(problem, weights, generations=5, seed=1)
        b = run(problem, weights, generations=5, seed=2)
        xa = np.vstack([i.x for i in a.population])
        xb = np.vstack([i.x for i in b.population])
        assert not np.array_equal(xa, xb)

    def test_zero_generations_returns_initial_population(self):
        problem = make_problem("DTLZ2", 3)
        weights = generate_das_dennis(3, 3).points
        result = run(problem, weights, generations=0, seed=7)
        assert result.state.generation == 0
        assert len(result.population) == len(weights)
        assert len(result.history) == 1

    def test_bounds_hold_through_evolution(self):
        problem = make_problem("DTLZ1", 3)
        weights = generate_das_dennis(3, 4).points
        result = run(problem, weights, generations=30, seed=9)
        X = np.vstack([ind.x for ind in result.population])
        assert np.all(X >= 0.0) and np.all(X <= 1.0)

    def test_warm_start_reuses_vectors(self):
        problem = make_problem("DTLZ2", 3)
        weights = generate_das_dennis(3, 3).points
        first = run(problem, weights, generations=5, seed=11)
        warm = run(
            problem,
            weights,
            generations=0,
            seed=12,
            warm_start_population=first.population,
        )
        for a, b in zip(first.population, warm.population):
            assert a.x.tobytes() == b.x.tobytes()

    def test_warm_start_pads_and_truncates(self):
        problem = make_problem("DTLZ2", 3)
        small = generate_das_dennis(3, 2).points  # 6
        large = generate_das_dennis(3, 3).points  # 10
        base = run(problem, small, generations=1, seed=13)
        grown = run(
            problem, large, generations=0, seed=14, warm_start_population=base.population
        )
        assert len(grown.population) == len(large)
        shrunk = run(
            problem, small, generations=0, seed=15, warm_start_population=grown.population
        )
        assert len(shrunk.population) == len(small)

    def test_neighbors_sorted_and_include_self(self):
        weights = generate_das_dennis(3, 4).points
        subs = build_subproblems(weights, size=5)
        for i, sp in enumerate(subs):
            assert sp.neighbors[0] == i
            d = np.linalg.norm(weights[sp.neighbors] - weights[i], axis=1)
            assert np.all(np.diff(d) >= -1e-12)

    def test_neighborhood_params_respected(self):
        weights = generate_das_dennis(3, 4).points
        subs = build_subproblems(weights, size=200)
        assert len(subs[0].neighbors) == len(weights)  # capped at N


def test_population_csv_round_trip(tmp_path):
    pop = [
        Individual(x=np.array([0.1, 0.2]), f=np.array([0.3, 0.4, 0.5])),
        Individual(x=np.array([0.6, 0.7]), f=np.array([0.8, 0.9, 1.0])),
    ]
    path = tmp_path / "pop.csv"
    population_to_csv(pop, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x1,x2,f1,f2,f3"
    row = [float(v) for v in lines[1].split(",")]
    np.testing.assert_allclose(row, [0.1, 0.2, 0.3, 0.4, 0.5])
