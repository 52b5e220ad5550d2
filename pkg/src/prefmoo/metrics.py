"""Quality indicators: IGD, hypervolume, and their region-aware variants.

The region-aware variants (r_igd / r_hv) preprocess an approximation set in
three steps before scoring it: pick the member closest to the set's centroid
as representative, drop members outside a relative extent window around the
representative, then translate the survivors rigidly so the representative
lands on the line from the aspiration vector z_r to the worst point z_w at
its own achievement-scalarizing value. Sets that converge far from the
preferred region end up translated deep toward z_w and score poorly even if
their plain IGD/HV looks good.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, ValidationError


@dataclass(frozen=True)
class RMetricConfig:
    """Configuration of the region-aware metric preprocessing.

    z_w defaults to z_r + 2 in every objective. extent is the region size
    relative to the per-objective range of pf_reference (or to the L-inf
    norm of z_w - z_r when no front sample is given).
    """

    z_r: np.ndarray
    z_w: np.ndarray | None = None
    extent: float = 0.2
    pf_reference: np.ndarray | None = None
    hv_reference: np.ndarray | None = None
    hv_samples: int = 100_000
    hv_seed: int = 0

    def __post_init__(self):
        z_r = np.array(self.z_r, dtype=float).ravel()
        if z_r.size < 2 or not np.all(np.isfinite(z_r)):
            raise ValidationError(f"z_r must be a finite vector: {z_r}")
        object.__setattr__(self, "z_r", z_r)
        z_w = self.z_w
        if z_w is None:
            z_w = z_r + 2.0
        else:
            z_w = np.array(z_w, dtype=float).ravel()
            if z_w.shape != z_r.shape:
                raise ValidationError("z_w and z_r must have the same length")
            if np.any(z_w <= z_r):
                raise ValidationError("z_w must exceed z_r in every objective")
        object.__setattr__(self, "z_w", z_w)
        if not (0.0 < self.extent <= 1.0):
            raise ValidationError(f"extent must be in (0, 1], got {self.extent}")
        if self.pf_reference is not None:
            pf = np.atleast_2d(np.asarray(self.pf_reference, dtype=float))
            if pf.shape[1] != z_r.shape[0]:
                raise ValidationError("pf_reference width must match z_r")
            object.__setattr__(self, "pf_reference", pf)

    @property
    def m(self) -> int:
        return self.z_r.shape[0]

    def asf(self, f) -> float:
        """Achievement value of f: max over objectives of the normalized
        excess over z_r, with weights z_w - z_r."""
        f = np.asarray(f, dtype=float)
        return float(np.max((f - self.z_r) / (self.z_w - self.z_r)))

    def window(self) -> np.ndarray:
        """Per-objective half-width of the filtering window."""
        if self.pf_reference is not None:
            rng = self.pf_reference.max(axis=0) - self.pf_reference.min(axis=0)
            fallback = np.max(np.abs(self.z_w - self.z_r))
            rng = np.where(rng > 0.0, rng, fallback)
        else:
            rng = np.full(self.m, np.max(np.abs(self.z_w - self.z_r)))
        return self.extent * rng


def igd(approx, reference) -> float:
    """Mean over reference points of the distance to the nearest approx point.

    Returns +inf for an empty approximation set (the "no usable solutions"
    sentinel).
    """
    ref = np.atleast_2d(np.asarray(reference, dtype=float))
    apx = np.asarray(approx, dtype=float)
    if apx.size == 0:
        return math.inf
    apx = np.atleast_2d(apx)
    if ref.size == 0:
        raise ValidationError("reference set is empty")
    total = 0.0
    # Chunk the reference side; front samples can be large.
    for start in range(0, ref.shape[0], 4096):
        block = ref[start : start + 4096]
        d2 = ((block[:, None, :] - apx[None, :, :]) ** 2).sum(axis=2)
        total += np.sqrt(d2.min(axis=1)).sum()
    return total / ref.shape[0]


def hv_exact(points, ref) -> float:
    """Exact dominated hypervolume (minimization) by recursive slicing.

    Supported for up to 4 objectives; larger m is directed to the
    Monte-Carlo estimator. Points that do not dominate the reference point
    contribute nothing.
    """
    ref = np.asarray(ref, dtype=float).ravel()
    m = ref.shape[0]
    if m > 4:
        raise CapabilityError(
            f"exact hypervolume supports m <= 4 (got m={m}); use hv_monte_carlo"
        )
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return 0.0
    pts = np.atleast_2d(pts)
    if pts.shape[1] != m:
        raise ValidationError("points and reference disagree on m")
    pts = pts[np.all(pts < ref[None, :], axis=1)]
    if pts.shape[0] == 0:
        return 0.0
    return _hv_slice(pts, ref)


def _hv_slice(pts: np.ndarray, ref: np.ndarray) -> float:
    d = ref.shape[0]
    if d == 1:
        return float(ref[0] - pts[:, 0].min())
    order = np.argsort(pts[:, -1], kind="stable")
    pts = pts[order]
    z = pts[:, -1]
    total = 0.0
    for j in range(pts.shape[0]):
        upper = z[j + 1] if j + 1 < pts.shape[0] else ref[-1]
        thickness = upper - z[j]
        if thickness > 0.0:
            total += thickness * _hv_slice(pts[: j + 1, :-1], ref[:-1])
    return total


def hv_monte_carlo(
    points, ref, samples: int, seed: int
) -> tuple[float, float]:
    """Monte-Carlo dominated hypervolume: (estimate, standard error).

    Samples uniformly in the box spanned by the componentwise minimum of the
    points and the reference point; the estimate is the box volume times the
    fraction of samples dominated by at least one point.
    """
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    ref = np.asarray(ref, dtype=float).ravel()
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return 0.0, 0.0
    lower = pts.min(axis=0)
    span = ref - lower
    if np.any(span <= 0.0):
        return 0.0, 0.0
    volume = float(np.prod(span))
    rng = np.random.default_rng(seed)
    hits = 0
    for start in range(0, samples, 65536):
        k = min(65536, samples - start)
        draws = lower + span * rng.random((k, ref.shape[0]))
        dominated = (pts[None, :, :] <= draws[:, None, :]).all(axis=2).any(axis=1)
        hits += int(dominated.sum())
    p_hat = hits / samples
    stderr = volume * math.sqrt(p_hat * (1.0 - p_hat) / samples)
    return volume * p_hat, stderr


def _representative(apx: np.ndarray) -> np.ndarray:
    """The set member closest to the set's centroid."""
    centroid = apx.mean(axis=0)
    return apx[int(np.argmin(((apx - centroid) ** 2).sum(axis=1)))]


def _line_anchor(rep: np.ndarray, cfg: RMetricConfig) -> np.ndarray:
    """Point on the z_r -> z_w line sharing the representative's achievement
    value; the rigid translation maps rep onto it."""
    return cfg.z_r + cfg.asf(rep) * (cfg.z_w - cfg.z_r)


def r_preprocess(approx, cfg: RMetricConfig) -> np.ndarray:
    """Filter an approximation set around its representative and translate it
    onto the z_r -> z_w reference line. Returns the processed points
    ((0, m) for an empty or fully filtered input)."""
    apx = np.asarray(approx, dtype=float)
    if apx.size == 0:
        return np.empty((0, cfg.m))
    apx = np.atleast_2d(apx)
    if apx.shape[1] != cfg.m:
        raise ValidationError(f"approx width {apx.shape[1]} != m {cfg.m}")

    rep = _representative(apx)
    window = cfg.window()
    keep = np.all(np.abs(apx - rep) <= window[None, :], axis=1)
    kept = apx[keep]
    if kept.shape[0] == 0:
        return np.empty((0, cfg.m))
    return kept + (_line_anchor(rep, cfg) - rep)[None, :]


def r_igd(approx, cfg: RMetricConfig) -> float:
    """Region-aware IGD: IGD of the processed set against the front sample
    restricted to the window around the transferred representative."""
    if cfg.pf_reference is None:
        raise ValidationError("r_igd needs cfg.pf_reference")
    processed = r_preprocess(approx, cfg)
    if processed.shape[0] == 0:
        return math.inf
    apx = np.atleast_2d(np.asarray(approx, dtype=float))
    z_p = _line_anchor(_representative(apx), cfg)
    window = cfg.window()
    local = cfg.pf_reference[
        np.all(np.abs(cfg.pf_reference - z_p) <= window[None, :], axis=1)
    ]
    if local.shape[0] == 0:
        # Nothing of the front sits inside the window; fall back to the full
        # sample rather than scoring against nothing.
        local = cfg.pf_reference
    return igd(processed, local)


def r_hv(approx, cfg: RMetricConfig) -> float:
    """Region-aware hypervolume of the processed set, NaN when everything was
    filtered out."""
    processed = r_preprocess(approx, cfg)
    if processed.shape[0] == 0:
        return math.nan
    ref = cfg.hv_reference if cfg.hv_reference is not None else cfg.z_w
    ref = np.asarray(ref, dtype=float).ravel()
    if cfg.m <= 4:
        return hv_exact(processed, ref)
    estimate, _ = hv_monte_carlo(processed, ref, cfg.hv_samples, cfg.hv_seed)
    return estimate


def metric_report(
    metric: str,
    value: float,
    stderr: float | None = None,
    filtered_count: int | None = None,
) -> dict:
    """JSON-ready report row; non-finite values render as the "--" marker
    used in results tables."""
    rep: dict = {
        "metric": metric,
        "value": value if math.isfinite(value) else "--",
    }
    if stderr is not None:
        rep["stderr"] = stderr
    if filtered_count is not None:
        rep["filtered_count"] = filtered_count
    return rep
