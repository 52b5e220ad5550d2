"""Scalable benchmark problems (ZDT1, DTLZ1-4) with analytic front samplers.

All problems minimize every objective over decision variables in [0, 1].
Decision-vector lengths follow the suites' standard defaults: n = 30 for
ZDT1, n = m - 1 + k with k = 5 for DTLZ1 and k = 10 for DTLZ2-4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .lattice import generate_das_dennis, lattice_point_count

PROBLEM_NAMES = ("ZDT1", "DTLZ1", "DTLZ2", "DTLZ3", "DTLZ4")

_DTLZ_K = {"DTLZ1": 5, "DTLZ2": 10, "DTLZ3": 10, "DTLZ4": 10}
_DTLZ4_ALPHA = 100.0


@dataclass(frozen=True)
class ProblemSpec:
    """A benchmark instance: which problem, how many objectives and variables."""

    name: str
    m: int
    n: int

    @property
    def bounds(self) -> tuple[float, float]:
        return (0.0, 1.0)


def make_problem(name: str, m: int, n: int | None = None) -> ProblemSpec:
    """Build a ProblemSpec, filling in the suite-standard variable count."""
    name = name.upper()
    if name not in PROBLEM_NAMES:
        raise ValidationError(f"unknown problem {name!r}; choose from {PROBLEM_NAMES}")
    if name == "ZDT1":
        if m != 2:
            raise ValidationError(f"ZDT1 is two-objective; got m={m}")
        n = 30 if n is None else n
        if n < 2:
            raise ValidationError(f"ZDT1 needs n >= 2, got {n}")
    else:
        if m < 2:
            raise ValidationError(f"{name} needs m >= 2, got {m}")
        n = (m - 1 + _DTLZ_K[name]) if n is None else n
        if n < m:
            raise ValidationError(f"{name} with m={m} needs n >= m, got {n}")
    return ProblemSpec(name=name, m=m, n=n)


def _check_x(problem: ProblemSpec, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != problem.n:
        raise ValidationError(
            f"{problem.name} expects {problem.n} variables, got {X.shape[1]}"
        )
    if np.any(X < 0.0) or np.any(X > 1.0):
        raise ValidationError("decision vector outside [0, 1] bounds")
    return X


def evaluate_batch(problem: ProblemSpec, X) -> np.ndarray:
    """Evaluate a batch of decision vectors; rows of X map to rows of F."""
    X = _check_x(problem, X)
    m, n = problem.m, problem.n
    name = problem.name

    if name == "ZDT1":
        f1 = X[:, 0]
        g = 1.0 + 9.0 * X[:, 1:].sum(axis=1) / (n - 1)
        f2 = g * (1.0 - np.sqrt(f1 / g))
        return np.column_stack([f1, f2])

    tail = X[:, m - 1 :]
    if name in ("DTLZ1", "DTLZ3"):
        g = 100.0 * (
            tail.shape[1]
            + ((tail - 0.5) ** 2 - np.cos(20.0 * np.pi * (tail - 0.5))).sum(axis=1)
        )
    else:
        g = ((tail - 0.5) ** 2).sum(axis=1)

    head = X[:, : m - 1]
    if name == "DTLZ4":
        head = head**_DTLZ4_ALPHA

    F = np.empty((X.shape[0], m))
    if name == "DTLZ1":
        for i in range(m):
            f = 0.5 * (1.0 + g)
            if m - 1 - i > 0:
                f = f * head[:, : m - 1 - i].prod(axis=1)
            if i > 0:
                f = f * (1.0 - head[:, m - 1 - i])
            F[:, i] = f
    else:
        theta = head * (np.pi / 2.0)
        for i in range(m):
            f = 1.0 + g
            if m - 1 - i > 0:
                f = f * np.cos(theta[:, : m - 1 - i]).prod(axis=1)
            if i > 0:
                f = f * np.sin(theta[:, m - 1 - i])
            F[:, i] = f
    return F


def evaluate(problem: ProblemSpec, x) -> np.ndarray:
    """Objective vector for one decision vector."""
    return evaluate_batch(problem, np.asarray(x, dtype=float)[None, :])[0]


def sample_pf(problem: ProblemSpec, count: int, seed: int = 0) -> np.ndarray:
    """Sample `count` points exactly on the analytic Pareto front.

    For m <= 5 a structured simplex lattice (plus a seeded jitter to hit the
    exact count) keeps samples reproducible; for larger m the sampler draws
    uniform directions. Either way every output satisfies the front equation
    to machine precision.
    """
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    name, m = problem.name, problem.m

    if name == "ZDT1":
        # Parameterize by t in [0, 1]: f = (t^2, 1 - t).
        t = np.linspace(0.0, 1.0, count)
        return np.column_stack([t**2, 1.0 - t])

    dirs = _simplex_directions(m, count, rng)
    if name == "DTLZ1":
        return 0.5 * dirs
    # DTLZ2-4 share the unit-sphere octant front.
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return dirs / norms


def _simplex_directions(m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if m <= 5:
        H = 1
        while lattice_point_count(m, H) < count:
            H += 1
        pts = generate_das_dennis(m, H).points
        if pts.shape[0] > count:
            idx = rng.choice(pts.shape[0], size=count, replace=False)
            idx.sort()
            pts = pts[idx]
        # Jitter within the simplex so repeated counts do not alias the
        # lattice exactly; renormalize to stay on the simplex.
        jitter = rng.dirichlet(np.ones(m), size=count)
        pts = 0.97 * pts + 0.03 * jitter
        return pts / pts.sum(axis=1, keepdims=True)
    draws = rng.dirichlet(np.ones(m), size=count)
    return draws


def theoretical_optimum(w, problem: ProblemSpec) -> np.ndarray:
    """Front point a reference direction w aims at.

    DTLZ2-4: radial projection w / ||w|| onto the unit sphere. DTLZ1:
    scaling 0.5 * w onto the sum-0.5 plane.
    """
    w = np.asarray(w, dtype=float).ravel()
    if w.shape[0] != problem.m:
        raise ValidationError(f"w has {w.shape[0]} components, problem has m={problem.m}")
    if np.all(w == 0.0):
        raise ValidationError("w must be nonzero")
    if problem.name == "DTLZ1":
        return 0.5 * w
    if problem.name in ("DTLZ2", "DTLZ3", "DTLZ4"):
        return w / np.linalg.norm(w)
    raise NotImplementedError(
        f"no theoretical optimum mapping for {problem.name}"
    )
