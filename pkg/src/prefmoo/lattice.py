"""Structured reference points on the unit simplex.

Provides the standard simplex-lattice design (all coordinate vectors k/H with
non-negative integer k summing to H), Euclidean projection of arbitrary
vectors onto the simplex, multi-layer generation for many-objective runs, and
the plain-text ``.dat`` point format used to exchange point sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LatticeSizeError, ValidationError

# Largest point count we are willing to materialize as a dense array.
_MAX_POINTS = 50_000_000

# L-inf tolerance below which two points count as the same point.
DISTINCT_TOL = 1e-9


def clamp_point(p: np.ndarray) -> np.ndarray:
    """Clamp tiny negative coordinates (>= -1e-12) to exactly 0."""
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e-12):
        raise ValidationError(f"point has a negative coordinate beyond tolerance: {p}")
    return np.where(p < 0.0, 0.0, p)


def _check_on_simplex(points: np.ndarray) -> None:
    sums = points.sum(axis=1)
    bad = np.abs(sums - 1.0) > 1e-9
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValidationError(f"point {i} does not sum to 1: sum={sums[i]!r}")


@dataclass(frozen=True)
class ReferenceSet:
    """A set of points on the unit simplex with generation metadata.

    Attributes:
        points: (N, m) array, one simplex point per row, read-only.
        m: number of objectives (coordinates per point).
        H: divisions per layer; None for merged sets that lost lattice structure.
        layer_tau: per-layer shrinkage factors for merged multi-layer sets
            (None entries mark unshifted layers).
    """

    points: np.ndarray
    m: int
    H: int | None = None
    layer_tau: tuple[float | None, ...] | None = field(default=None)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != self.m:
            raise ValidationError(
                f"points must be (N, {self.m}); got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise ValidationError("points contain non-finite values")
        pts = clamp_point(pts)
        _check_on_simplex(pts)
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def lattice_point_count(m: int, H: int) -> int:
    """Number of simplex-lattice points for m objectives and H divisions."""
    return math.comb(H + m - 1, m - 1)


def generate_das_dennis(m: int, H: int) -> ReferenceSet:
    """Generate the full simplex-lattice design with spacing 1/H.

    Points are every vector whose coordinates are k_i/H with non-negative
    integers k_i summing to H, emitted in a fixed order (first coordinate
    descending, recursively), so output files are reproducible byte for byte.

    Args:
        m: number of objectives, >= 2.
        H: divisions along each coordinate, >= 1.

    Returns:
        ReferenceSet with C(H+m-1, m-1) points.

    Raises:
        ValidationError: m or H out of range.
        LatticeSizeError: the design is too large to materialize.
    """
    if m < 2:
        raise ValidationError(f"m must be >= 2, got {m}")
    if H < 1:
        raise ValidationError(f"H must be >= 1, got {H}")
    count = lattice_point_count(m, H)
    if count >= 2**63:
        raise LatticeSizeError(
            f"lattice for m={m}, H={H} has {count} points, beyond 64-bit range"
        )
    if count > _MAX_POINTS:
        raise LatticeSizeError(
            f"lattice for m={m}, H={H} has {count} points, "
            f"over the materialization cap of {_MAX_POINTS}"
        )

    cache: dict[tuple[int, int], np.ndarray] = {}

    def compositions(width: int, total: int) -> np.ndarray:
        # All integer vectors of `width` non-negative entries summing to
        # `total`, first entry descending, recursively. Memoized per call.
        key = (width, total)
        hit = cache.get(key)
        if hit is not None:
            return hit
        if width == 1:
            result = np.array([[total]], dtype=np.int64)
        else:
            blocks = []
            for k in range(total, -1, -1):
                tail = compositions(width - 1, total - k)
                head = np.full((tail.shape[0], 1), k, dtype=np.int64)
                blocks.append(np.hstack([head, tail]))
            result = np.vstack(blocks)
        cache[key] = result
        return result

    out = compositions(m, H).astype(float) / H
    assert out.shape[0] == count
    return ReferenceSet(points=out, m=m, H=H)


def generate_multilayer(m: int, H: int, layers: int) -> list[ReferenceSet]:
    """Generate `layers` identical lattice layers.

    Layers come out identical on purpose; differentiation happens afterwards
    by contracting each layer toward a pivot with its own shrinkage factor.
    Pre-shrinking here would apply the bias twice.
    """
    if layers < 1:
        raise ValidationError(f"layers must be >= 1, got {layers}")
    base = generate_das_dennis(m, H)
    return [base] + [
        ReferenceSet(points=base.points.copy(), m=m, H=H) for _ in range(layers - 1)
    ]


def project_to_simplex(z_r) -> np.ndarray:
    """Euclidean projection of an arbitrary vector onto the unit simplex.

    Uses the sorted-threshold scan: with components sorted ascending, find the
    largest suffix whose shifted mean exceeds the next component; subtract
    that threshold and clamp negatives to zero. Negative and >1 components
    are allowed on input. Equal components give identical threshold
    candidates, so sort stability does not affect the result.

    Args:
        z_r: finite vector of length >= 2, any real components.

    Returns:
        The closest simplex point (sums to 1, non-negative).
    """
    z = np.asarray(z_r, dtype=float).ravel()
    m = z.shape[0]
    if m < 2:
        raise ValidationError(f"need at least 2 components, got {m}")
    if not np.all(np.isfinite(z)):
        raise ValidationError(f"non-finite input: {z}")

    s = np.sort(z)
    t_hat = None
    for i in range(m - 1, 0, -1):
        t_i = (s[i:].sum() - 1.0) / (m - i)
        if t_i >= s[i - 1]:
            t_hat = t_i
            break
    if t_hat is None:
        t_hat = (z.sum() - 1.0) / m
    w = np.maximum(z - t_hat, 0.0)
    # Renormalization is a no-op up to float error; keep the raw clamp so the
    # output is exactly [z - t]_+ as advertised.
    return w


def dedup_points(points: np.ndarray, tol: float = DISTINCT_TOL) -> np.ndarray:
    """Drop points that duplicate an earlier point under L-inf `tol`.

    Keeps first occurrences in order. Quadratic, intended for merged
    reference sets (hundreds to a few thousand points).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    keep: list[int] = []
    for i, p in enumerate(pts):
        if keep and np.min(np.max(np.abs(pts[keep] - p), axis=1)) <= tol:
            continue
        keep.append(i)
    return pts[keep]


def all_distinct(points: np.ndarray, tol: float = DISTINCT_TOL) -> bool:
    """True if no two points coincide under L-inf `tol`."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    for i in range(n - 1):
        if np.min(np.max(np.abs(pts[i + 1 :] - pts[i]), axis=1)) <= tol:
            return False
    return True


def write_dat(points: np.ndarray, path: str | Path) -> None:
    """Write points in the ``.dat`` format: one point per line, coordinates as
    decimal floats separated by single spaces, newline-terminated."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        for row in pts:
            fh.write(" ".join(format(v, ".10g") for v in row))
            fh.write("\n")


def read_dat(path: str | Path) -> np.ndarray:
    """Read a ``.dat`` point file; tolerates arbitrary whitespace and blank lines."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            try:
                vals = [float(v) for v in parts]
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: not a number row: {line!r}") from exc
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ValidationError(
                    f"{path}:{lineno}: expected {width} columns, got {len(vals)}"
                )
            rows.append(vals)
    if not rows:
        return np.empty((0, 0))
    return np.asarray(rows, dtype=float)
