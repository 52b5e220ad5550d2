"""Decomposition-based evolutionary optimizer with stable-matching selection.

Each reference point defines a scalar subproblem. Every generation produces
one offspring per subproblem (SBX + polynomial mutation, mating inside the
subproblem's neighborhood with high probability), then selects the next
population by a deferred-acceptance matching between subproblems and the
merged parent+offspring pool: subproblems rank candidates by scalarized
convergence, candidates rank subproblems by perpendicular distance to the
subproblem's direction, and the matching balances the two.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .lattice import ReferenceSet
from .problems import ProblemSpec, evaluate_batch

WEIGHT_FLOOR = 1e-6


@dataclass
class Individual:
    """A candidate solution: decision vector and its objective vector."""

    x: np.ndarray
    f: np.ndarray


@dataclass
class Subproblem:
    weight: np.ndarray
    neighbors: np.ndarray  # indices into the subproblem list, self included


@dataclass(frozen=True)
class OperatorParams:
    pc: float = 1.0
    eta_c: float = 10.0
    pm: float | None = None  # None means 1/n
    eta_m: float = 20.0


@dataclass(frozen=True)
class NeighborhoodParams:
    size: int = 20
    delta: float = 0.9  # probability of mating inside the neighborhood


@dataclass
class OptimizerState:
    subproblems: list[Subproblem]
    population: list[Individual]
    ideal: np.ndarray
    generation: int
    rng_seed: int


@dataclass
class RunResult:
    state: OptimizerState
    history: list[dict] = field(default_factory=list)

    @property
    def population(self) -> list[Individual]:
        return self.state.population


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator so per-seed streams stay independent."""
    return np.random.Generator(np.random.Philox(seed))


def sbx_crossover(
    p1: np.ndarray,
    p2: np.ndarray,
    pc: float,
    eta_c: float,
    rng: np.random.Generator,
    bounds: tuple[float, float] = (0.0, 1.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover; returns two children clipped to bounds.

    Bounded variant: the spread distribution is renormalized against the
    distance of the parents to the variable bounds, so children reach bound
    optima with useful probability instead of through the bare power-law
    tail. Each crossed variable swaps its two children with probability 0.5.
    The per-call draw structure is fixed (one gate draw, then three vectors
    of per-variable draws) so the stream consumed does not depend on values.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape:
        raise ValidationError("parents must have the same length")
    c1, c2 = p1.copy(), p2.copy()
    if rng.random() > pc:
        return c1, c2
    n = p1.shape[0]
    lo, hi = bounds
    do_var = (rng.random(n) <= 0.5) & (np.abs(p1 - p2) > 1e-14)
    u = rng.random(n)
    swap = rng.random(n) <= 0.5

    y1 = np.minimum(p1, p2)
    y2 = np.maximum(p1, p2)
    span = np.where(do_var, y2 - y1, 1.0)  # dummy span avoids 0/0 off-mask
    exponent = 1.0 / (eta_c + 1.0)

    def spread(beta_bound: np.ndarray) -> np.ndarray:
        alpha = 2.0 - beta_bound ** -(eta_c + 1.0)
        return np.where(
            u <= 1.0 / alpha,
            (u * alpha) ** exponent,
            (1.0 / (2.0 - u * alpha)) ** exponent,
        )

    betaq_low = spread(1.0 + 2.0 * (y1 - lo) / span)
    betaq_high = spread(1.0 + 2.0 * (hi - y2) / span)
    child_low = np.clip(0.5 * ((y1 + y2) - betaq_low * span), lo, hi)
    child_high = np.clip(0.5 * ((y1 + y2) + betaq_high * span), lo, hi)

    h1 = np.where(swap, child_high, child_low)
    h2 = np.where(swap, child_low, child_high)
    c1[do_var] = h1[do_var]
    c2[do_var] = h2[do_var]
    return c1, c2


def polynomial_mutation(
    x: np.ndarray,
    pm: float,
    eta_m: float,
    rng: np.random.Generator,
    bounds: tuple[float, float] = (0.0, 1.0),
) -> np.ndarray:
    """Bounded polynomial mutation applied per variable with probability pm."""
    x = np.asarray(x, dtype=float)
    lo, hi = bounds
    span = hi - lo
    n = x.shape[0]
    mask = rng.random(n) < pm
    u = rng.random(n)
    out = x.copy()
    if not np.any(mask):
        return out
    dl = (out - lo) / span
    dr = (hi - out) / span
    power = 1.0 / (eta_m + 1.0)
    low_branch = u < 0.5
    dq = np.empty(n)
    val_l = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - dl) ** (eta_m + 1.0)
    dq_l = val_l**power - 1.0
    val_r = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - dr) ** (eta_m + 1.0)
    dq_r = 1.0 - val_r**power
    dq = np.where(low_branch, dq_l, dq_r)
    out[mask] = out[mask] + dq[mask] * span
    return np.clip(out, lo, hi)


def aggregation(f, weight, ideal) -> float:
    """Scalarized convergence of f for a subproblem direction.

    Weighted worst-case deviation from the ideal point with the deviation
    divided by the direction component, so the minimizer over a front lies
    along the direction itself (boundary directions pull solutions to the
    front's extremes). Zero components are floored at 1e-6 to avoid
    degenerate ties; deviations below the ideal clamp at 0.
    """
    f = np.asarray(f, dtype=float)
    weight = np.asarray(weight, dtype=float)
    ideal = np.asarray(ideal, dtype=float)
    d = np.maximum(f - ideal, 0.0)
    return float(np.max(d / np.maximum(weight, WEIGHT_FLOOR)))


def diversity_distance(f, weight, ideal) -> float:
    """Perpendicular distance from f - ideal to the ray along the direction.

    Computed as the norm of the rejection v - (v . w_hat) w_hat, which stays
    exact for collinear vectors.
    """
    v = np.asarray(f, dtype=float) - np.asarray(ideal, dtype=float)
    w = np.asarray(weight, dtype=float)
    w_hat = w / np.linalg.norm(w)
    rej = v - np.dot(v, w_hat) * w_hat
    return float(np.linalg.norm(rej))


def _preference_matrices(W: np.ndarray, F: np.ndarray, ideal: np.ndarray):
    """conv[s, c]: subproblem s's scalarization of candidate c.
    div[s, c]: candidate c's perpendicular distance to direction s."""
    D = np.maximum(F - ideal[None, :], 0.0)  # (C, m)
    Wf = np.maximum(W, WEIGHT_FLOOR)  # (S, m)
    conv = (D[None, :, :] / Wf[:, None, :]).max(axis=2)
    V = F - ideal[None, :]
    W_hat = W / np.linalg.norm(W, axis=1, keepdims=True)
    proj = V @ W_hat.T  # (C, S)
    rej = V[:, None, :] - proj[:, :, None] * W_hat[None, :, :]  # (C, S, m)
    div = np.linalg.norm(rej, axis=2).T  # (S, C)
    return conv, div


def stable_match(
    subproblems: list[Subproblem] | np.ndarray,
    candidates: list[Individual] | np.ndarray,
    ideal: np.ndarray,
) -> np.ndarray:
    """Deferred-acceptance matching; returns one candidate index per subproblem.

    Subproblems propose in ascending scalarization order; candidates hold the
    proposer with the smallest perpendicular distance. Ties break toward the
    lower index on both sides. The result has no blocking pair: no
    subproblem-candidate pair prefers each other over their assignments.
    """
    W = _weights_array(subproblems)
    F = _objectives_array(candidates)
    S, C = W.shape[0], F.shape[0]
    if C < S:
        raise ValidationError(f"need at least {S} candidates, got {C}")
    conv, div = _preference_matrices(W, F, np.asarray(ideal, dtype=float))

    pref = np.argsort(conv, axis=1, kind="stable")  # (S, C)
    order = np.argsort(div.T, axis=1, kind="stable")  # (C, S)
    rank = np.empty((C, S), dtype=np.int64)
    cols = np.arange(S)
    for c in range(C):
        rank[c, order[c]] = cols

    match_of_sub = np.full(S, -1, dtype=np.int64)
    match_of_cand = np.full(C, -1, dtype=np.int64)
    next_prop = np.zeros(S, dtype=np.int64)
    free = deque(range(S))
    while free:
        s = free.popleft()
        c = pref[s, next_prop[s]]
        next_prop[s] += 1
        holder = match_of_cand[c]
        if holder == -1:
            match_of_cand[c] = s
            match_of_sub[s] = c
        elif rank[c, s] < rank[c, holder]:
            match_of_cand[c] = s
            match_of_sub[s] = c
            match_of_sub[holder] = -1
            free.append(holder)
        else:
            free.append(s)
    return match_of_sub


def _weights_array(subproblems) -> np.ndarray:
    if isinstance(subproblems, np.ndarray):
        return np.atleast_2d(subproblems)
    return np.vstack([sp.weight for sp in subproblems])


def _objectives_array(candidates) -> np.ndarray:
    if isinstance(candidates, np.ndarray):
        return np.atleast_2d(candidates)
    return np.vstack([ind.f for ind in candidates])


def build_subproblems(weights: np.ndarray, size: int = 20) -> list[Subproblem]:
    """Attach to each weight its `size` nearest weights (self included)."""
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    N = W.shape[0]
    t = min(size, N)
    d2 = ((W[:, None, :] - W[None, :, :]) ** 2).sum(axis=2)
    subs = []
    for i in range(N):
        nb = np.argsort(d2[i], kind="stable")[:t]
        subs.append(Subproblem(weight=W[i].copy(), neighbors=nb))
    return subs


def init_state(
    problem: ProblemSpec,
    weights: np.ndarray,
    seed: int,
    rng: np.random.Generator,
    warm_start: list[Individual] | None = None,
    neighborhood: NeighborhoodParams | None = None,
) -> OptimizerState:
    """Random or warm-started initial state; warm starts are re-evaluated.

    A warm-start population that is too large is truncated; one that is too
    small is padded with random individuals.
    """
    nb = neighborhood or NeighborhoodParams()
    subproblems = build_subproblems(weights, nb.size)
    N = len(subproblems)
    if warm_start is not None:
        X = np.vstack([ind.x for ind in warm_start]) if warm_start else np.empty((0, problem.n))
        if X.shape[0] > N:
            X = X[:N]
        elif X.shape[0] < N:
            pad = rng.random((N - X.shape[0], problem.n))
            X = np.vstack([X, pad]) if X.size else pad
    else:
        X = rng.random((N, problem.n))
    F = evaluate_batch(problem, X)
    population = [Individual(x=X[i].copy(), f=F[i].copy()) for i in range(N)]
    ideal = F.min(axis=0)
    return OptimizerState(
        subproblems=subproblems,
        population=population,
        ideal=ideal,
        generation=0,
        rng_seed=seed,
    )


def evolve_generation(
    state: OptimizerState,
    problem: ProblemSpec,
    rng: np.random.Generator,
    operators: OperatorParams | None = None,
    neighborhood: NeighborhoodParams | None = None,
) -> OptimizerState:
    """One generation: variation, evaluation, ideal update, matched selection."""
    ops = operators or OperatorParams()
    nb = neighborhood or NeighborhoodParams()
    pm = ops.pm if ops.pm is not None else 1.0 / problem.n
    N = len(state.subproblems)
    pop = state.population

    offspring_x = np.empty((N, problem.n))
    all_idx = np.arange(N)
    for i, sp in enumerate(state.subproblems):
        pool = sp.neighbors if rng.random() < nb.delta else all_idx
        if pool.shape[0] >= 2:
            a, b = rng.choice(pool, size=2, replace=False)
        else:
            a = b = pool[0]
        c1, _ = sbx_crossover(pop[a].x, pop[b].x, ops.pc, ops.eta_c, rng)
        offspring_x[i] = polynomial_mutation(c1, pm, ops.eta_m, rng)

    offspring_f = evaluate_batch(problem, offspring_x)
    ideal = np.minimum(state.ideal, offspring_f.min(axis=0))

    merged = pop + [
        Individual(x=offspring_x[i].copy(), f=offspring_f[i].copy()) for i in range(N)
    ]
    assignment = stable_match(state.subproblems, merged, ideal)
    new_pop = [merged[j] for j in assignment]
    return OptimizerState(
        subproblems=state.subproblems,
        population=new_pop,
        ideal=ideal,
        generation=state.generation + 1,
        rng_seed=state.rng_seed,
    )


def run(
    problem: ProblemSpec,
    reference_set: ReferenceSet | np.ndarray,
    generations: int,
    seed: int,
    warm_start_population: list[Individual] | None = None,
    operators: OperatorParams | None = None,
    neighborhood: NeighborhoodParams | None = None,
) -> RunResult:
    """Full optimization run, deterministic for a given seed."""
    weights = (
        reference_set.points
        if isinstance(reference_set, ReferenceSet)
        else np.atleast_2d(np.asarray(reference_set, dtype=float))
    )
    rng = make_rng(seed)
    state = init_state(
        problem, weights, seed, rng, warm_start=warm_start_population,
        neighborhood=neighborhood,
    )
    history = [_history_row(state)]
    for _ in range(generations):
        state = evolve_generation(state, problem, rng, operators, neighborhood)
        history.append(_history_row(state))
    return RunResult(state=state, history=history)


def _history_row(state: OptimizerState) -> dict:
    F = np.vstack([ind.f for ind in state.population])
    return {
        "generation": state.generation,
        "ideal": state.ideal.tolist(),
        "f_min": F.min(axis=0).tolist(),
        "f_mean": F.mean(axis=0).tolist(),
        "f_max": F.max(axis=0).tolist(),
    }


def population_to_csv(population: list[Individual], path: str | Path) -> None:
    """Write a population as CSV: x columns first, then f columns."""
    if not population:
        raise ValidationError("cannot export an empty population")
    n = population[0].x.shape[0]
    m = population[0].f.shape[0]
    header = [f"x{i + 1}" for i in range(n)] + [f"f{i + 1}" for i in range(m)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for ind in population:
            writer.writerow(
                [format(v, ".17g") for v in ind.x] + [format(v, ".17g") for v in ind.f]
            )
