"""Non-uniform remapping of simplex reference points toward a region of interest.

Every uniformly spaced reference point is pulled along the ray from the pivot
(the projection of the decision maker's aspiration vector onto the simplex)
through itself, with a power-law density whose exponent is available in
closed form from the desired relative extent tau of the biased region.
Boundary points can either stay fixed, so the optimizer keeps approximating
the front's extremes, or be contracted onto the region as well. Multi-layer
and multi-region compositions build on the same per-point step.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateRayError,
    TauBoundError,
    ValidationError,
)
from .lattice import ReferenceSet, clamp_point, dedup_points, project_to_simplex

# Tolerance of the on-boundary test Delta - ell < eps. Exposed for
# experimentation, but the default is part of the method's contract.
BOUNDARY_EPS = 1e-6

# Below this ray length a point is treated as sitting on the pivot.
_DEGENERATE_TOL = 1e-12

_UNSHIFTED = "unshifted"


@dataclass(frozen=True)
class RoiSpec:
    """One region of interest.

    Attributes:
        z_r: aspiration vector in objective space (any finite reals).
        tau: shrinkage factor, the region's extent as a fraction of the
            whole front's extent.
        keep_boundary: if True, boundary reference points stay fixed.
        pivot: derived simplex anchor (projection of z_r); filled by resolve().
        eta: derived mapping exponent; filled by resolve().
    """

    z_r: np.ndarray
    tau: float
    keep_boundary: bool = True
    pivot: np.ndarray | None = None
    eta: float | None = None

    def __post_init__(self):
        z = np.array(self.z_r, dtype=float).ravel()
        if z.size < 2 or not np.all(np.isfinite(z)):
            raise ValidationError(f"z_r must be a finite vector of length >= 2: {z}")
        z.setflags(write=False)
        object.__setattr__(self, "z_r", z)
        if not math.isfinite(self.tau):
            raise ValidationError(f"tau must be finite, got {self.tau}")

    @property
    def m(self) -> int:
        return self.z_r.shape[0]

    def resolve(self, m: int, H: int) -> "RoiSpec":
        """Derive pivot and eta for a lattice of m objectives, H divisions."""
        if self.m != m:
            raise ValidationError(
                f"z_r has {self.m} components but the reference set has m={m}"
            )
        pivot = project_to_simplex(self.z_r)
        eta = compute_eta(m, H, self.tau, self.keep_boundary)
        return replace(self, pivot=pivot, eta=eta)

    def to_json(self) -> dict:
        return {
            "z_r": [float(v) for v in self.z_r],
            "tau": float(self.tau),
            "keep_boundary": bool(self.keep_boundary),
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> "RoiSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict):
            raise ValidationError(f"ROI spec must be a JSON object, got {type(obj)}")
        unknown = set(obj) - {"z_r", "tau", "keep_boundary"}
        if unknown:
            raise ValidationError(f"unknown ROI keys: {sorted(unknown)}")
        try:
            return cls(
                z_r=np.asarray(obj["z_r"], dtype=float),
                tau=float(obj["tau"]),
                keep_boundary=bool(obj.get("keep_boundary", True)),
            )
        except KeyError as exc:
            raise ValidationError(f"ROI spec missing key: {exc}") from exc


def compute_eta(m: int, H: int, tau: float, keep_boundary: bool) -> float:
    """Closed-form mapping exponent for a desired relative extent tau.

    keep_boundary=True:  eta = log(m/H) / log(1 - tau) - 1,
        valid for 0 < tau < 1 - m/H (Corollary 1). tau = 1 - m/H is also
        accepted as the documented whole-front identity setting (eta = 0).
    keep_boundary=False: eta = log(m/H) / log(1 - (1 - m/H) * tau) - 1,
        valid for 0 < tau < 1 (Corollary 3).

    Both forms require H > m; with H <= m the lattice has no interior points
    and the multi-layer contraction path applies instead.
    """
    if H <= m:
        raise ConfigurationError(
            f"the closed-form exponent needs H > m; got m={m}, H={H} "
            "(use the multi-layer contraction for boundary-only lattices)"
        )
    q = m / H
    if keep_boundary:
        bound = 1.0 - q
        at_identity = abs(tau - bound) <= 1e-12
        if not (0.0 < tau < bound) and not at_identity:
            raise TauBoundError(
                f"tau={tau} violates Corollary 1: keep-boundary mapping needs "
                f"0 < tau < 1 - m/H = {bound:.6g} "
                "(tau = 1 - m/H exactly is accepted as the whole-front identity)"
            )
        beta = 1.0 - tau
    else:
        if not (0.0 < tau < 1.0):
            raise TauBoundError(
                f"tau={tau} violates Corollary 3: shift-all mapping needs 0 < tau < 1"
            )
        beta = 1.0 - (1.0 - q) * tau
    return math.log(q) / math.log(beta) - 1.0


def _ray_geometry(W: np.ndarray, pivot: np.ndarray):
    """Distances along pivot rays for a batch of points.

    Returns (ell, delta_big, degenerate): per-point distance to the pivot,
    distance from the pivot to the simplex boundary along the ray, and a mask
    of points sitting on the pivot itself (for which delta_big is 0).
    """
    diff = W - pivot[None, :]
    ell = np.linalg.norm(diff, axis=1)
    degenerate = ell <= _DEGENERATE_TOL

    with np.errstate(divide="ignore", invalid="ignore"):
        cand = pivot[None, :] * ell[:, None] / (pivot[None, :] - W)
    valid = np.isfinite(cand) & (cand > 0.0)

    delta_big = np.zeros_like(ell)
    active = ~degenerate
    if np.any(active):
        rows = np.where(active)[0]
        ok = valid[rows]
        if not np.all(ok.any(axis=1)):
            # Impossible for points inside the simplex: the ray must exit
            # through a zero-coordinate face.
            bad = rows[~ok.any(axis=1)][0]
            raise AssertionError(f"no boundary intersection for point {W[bad]}")
        c = np.where(ok, cand[rows], np.inf)
        delta_big[rows] = c.min(axis=1)
    return ell, delta_big, degenerate


def boundary_intersection(w, pivot) -> tuple[np.ndarray, float]:
    """Intersection of the ray pivot->w with the simplex boundary.

    Returns (b, delta_big) where b is the exit point (at least one coordinate
    is 0 unless the pivot itself sits on the boundary face containing the
    ray) and delta_big its distance from the pivot.

    Raises:
        DegenerateRayError: w coincides with the pivot.
    """
    w = np.asarray(w, dtype=float).ravel()
    pivot = np.asarray(pivot, dtype=float).ravel()
    ell, delta_big, degenerate = _ray_geometry(w[None, :], pivot)
    if degenerate[0]:
        raise DegenerateRayError("point coincides with the pivot")
    d = float(delta_big[0])
    b = pivot + d * (w - pivot) / ell[0]
    return clamp_point(b), d


def map_point(w, pivot, eta: float) -> np.ndarray:
    """Pull one reference point toward the pivot along its pivot ray.

    delta = Delta * ((Delta - ell) / Delta) ** (1 / (eta + 1)) is the mapped
    distance from the boundary; the point moves to pivot + (Delta - delta)
    times the unit ray direction. A point on the pivot maps to itself.
    """
    w = np.asarray(w, dtype=float).ravel()
    pivot = np.asarray(pivot, dtype=float).ravel()
    ell, delta_big, degenerate = _ray_geometry(w[None, :], pivot)
    if degenerate[0]:
        return pivot.copy()
    D, L = float(delta_big[0]), float(ell[0])
    frac = max(D - L, 0.0) / D
    delta = D * frac ** (1.0 / (eta + 1.0))
    rho = D - delta
    return clamp_point(pivot + rho * (w - pivot) / L)


def shift_boundary_point(w_b, pivot, tau: float) -> np.ndarray:
    """Contract a boundary point radially toward the pivot by factor tau."""
    w_b = np.asarray(w_b, dtype=float).ravel()
    pivot = np.asarray(pivot, dtype=float).ravel()
    if not (0.0 < tau < 1.0):
        raise TauBoundError(f"boundary shift needs 0 < tau < 1, got {tau}")
    ell, delta_big, degenerate = _ray_geometry(w_b[None, :], pivot)
    if not degenerate[0] and delta_big[0] - ell[0] >= BOUNDARY_EPS:
        raise ValidationError(
            f"point {w_b} is not on the simplex boundary "
            f"(Delta - ell = {delta_big[0] - ell[0]:.3g} >= {BOUNDARY_EPS})"
        )
    return clamp_point(pivot + tau * (w_b - pivot))


def map_reference_set(
    refset: ReferenceSet, roi: RoiSpec, eps: float = BOUNDARY_EPS
) -> ReferenceSet:
    """Apply the non-uniform mapping to a whole structured reference set.

    With keep_boundary, points on the simplex boundary are returned bitwise
    unchanged and in place; interior points contract toward the pivot with
    the closed-form exponent. Without it, boundary points contract radially
    by tau and interior points use the shift-all exponent.
    """
    if refset.H is None:
        raise ValidationError("mapping needs a structured single-layer set with H")
    roi = roi.resolve(refset.m, refset.H)
    W = refset.points
    pivot = roi.pivot
    eta = roi.eta

    ell, delta_big, degenerate = _ray_geometry(W, pivot)
    on_boundary = ~degenerate & (delta_big - ell < eps)

    out = np.empty_like(W)
    out[degenerate] = pivot

    if roi.keep_boundary:
        out[on_boundary] = W[on_boundary]
        interior = ~degenerate & ~on_boundary
    else:
        rho_b = roi.tau * ell[on_boundary]
        out[on_boundary] = (
            pivot + rho_b[:, None] * (W[on_boundary] - pivot) / ell[on_boundary, None]
        )
        interior = ~degenerate & ~on_boundary

    if np.any(interior):
        D = delta_big[interior]
        L = ell[interior]
        frac = np.maximum(D - L, 0.0) / D
        delta = D * frac ** (1.0 / (eta + 1.0))
        rho = D - delta
        out[interior] = pivot + rho[:, None] * (W[interior] - pivot) / L[:, None]

    out = clamp_point(out)
    if roi.keep_boundary:
        out[on_boundary] = W[on_boundary]
    return ReferenceSet(points=out, m=refset.m, H=refset.H)


def map_multilayer(
    layers: list[ReferenceSet],
    roi_base: RoiSpec,
    tau_per_layer: list[float | str | None],
) -> ReferenceSet:
    """Contract each lattice layer toward the pivot by its own factor, merge,
    and drop duplicates.

    A tau entry of None (or "unshifted") keeps that layer at the boundary.
    Intended for many-objective runs with H < m, where every lattice point
    lies on the simplex boundary and the radial contraction replaces the
    exponent-based map.
    """
    if len(tau_per_layer) != len(layers):
        raise ValidationError(
            f"{len(layers)} layers but {len(tau_per_layer)} tau entries"
        )
    if not layers:
        raise ValidationError("need at least one layer")
    m = layers[0].m
    pivot = project_to_simplex(roi_base.z_r) if roi_base.pivot is None else roi_base.pivot
    if pivot.shape[0] != m:
        raise ValidationError(f"pivot has {pivot.shape[0]} components, layers have m={m}")

    taus: list[float | None] = []
    for t in tau_per_layer:
        if t is None or (isinstance(t, str) and t == _UNSHIFTED):
            taus.append(None)
        else:
            t = float(t)
            if not (0.0 < t < 1.0):
                raise TauBoundError(f"layer tau={t} outside (0, 1)")
            taus.append(t)

    parts = []
    for layer, t in zip(layers, taus):
        if layer.m != m:
            raise ValidationError("layers disagree on m")
        if t is None:
            parts.append(layer.points)
        else:
            parts.append(clamp_point(pivot + t * (layer.points - pivot)))
    merged = dedup_points(np.vstack(parts))
    return ReferenceSet(points=merged, m=m, H=layers[0].H, layer_tau=tuple(taus))


def map_multi_roi(refset: ReferenceSet, rois: list[RoiSpec]) -> ReferenceSet:
    """Union of the per-region mappings, keeping shared boundary points once.

    All regions must preserve the boundary: without a shared boundary there
    is nothing to merge on, so mixed or all-shift configurations are
    rejected.
    """
    if not rois:
        raise ValidationError("need at least one ROI")
    if not all(r.keep_boundary for r in rois):
        raise ConfigurationError(
            "multi-ROI mapping requires keep_boundary=True for every ROI"
        )
    mapped = [map_reference_set(refset, roi).points for roi in rois]
    merged = dedup_points(np.vstack(mapped))
    return ReferenceSet(points=merged, m=refset.m, H=None)
