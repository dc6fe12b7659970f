"""Dynamical- and parameter-plane rasters, Cantor-region thresholds, connectivity.

Pixel work is vectorised with numpy and split into fixed blocks of rows.  The
block size does not depend on the worker count and every pixel is computed
independently, so rasters are bit-identical for any number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage

from .mapcore import ParamLike, as_parameter, derivative_array, evaluate_array
from .orbit import CANTOR_RADIUS, CYCLE_TOL, MAX_PERIOD, PERIOD_MERGE_TOL

BASIN = 0
PREPOLE = 1
UNRESOLVED = 2
CLASS_CODES = (BASIN, PREPOLE, UNRESOLVED)
PERIOD_CAP = 15

DYNAMICAL_MAX_ITER = 200
PARAMETER_MAX_ITER = 100
BLOCK_ROWS = 8
THREADS_ENV = "TANLAB_THREADS"


@dataclass(frozen=True)
class GridSpec:
    """Pixel (c, r) has centre ``center + (2c+1-cols)/(2 cols) * width + i (rows-2r-1)/(2 rows) * height``.

    Row 0 is the top row.  The integer numerators make origin-centred grids
    exactly antisymmetric under c -> cols-1-c and r -> rows-1-r.
    """

    center: complex
    width: float
    height: float
    cols: int
    rows: int

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("grid width and height must be positive")
        if self.cols < 1 or self.rows < 1:
            raise ValueError("grid needs at least one column and one row")
        object.__setattr__(self, "center", complex(self.center))

    def xs(self) -> np.ndarray:
        c = np.arange(self.cols)
        return self.center.real + (2 * c + 1 - self.cols) / (2 * self.cols) * self.width

    def ys(self) -> np.ndarray:
        r = np.arange(self.rows)
        return self.center.imag + (self.rows - 2 * r - 1) / (2 * self.rows) * self.height

    def points(self) -> np.ndarray:
        """Complex pixel centres, shape (rows, cols)."""
        out = np.empty((self.rows, self.cols), dtype=np.complex128)
        out.real = self.xs()[None, :]
        out.imag = self.ys()[:, None]
        return out

    def pixel(self, c: int, r: int) -> complex:
        return complex(self.points()[r, c])


@dataclass
class Raster:
    spec: GridSpec
    class_codes: np.ndarray
    iter_counts: np.ndarray
    periods: np.ndarray
    kind: str = "dynamical"
    param: Optional[complex] = None
    cantor_flags: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        shape = (self.spec.rows, self.spec.cols)
        for name in ("class_codes", "iter_counts", "periods"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    def fraction(self, *codes: int) -> float:
        return float(np.isin(self.class_codes, codes).mean())


def worker_count(workers: Optional[int] = None) -> int:
    """Explicit value, else ``TANLAB_THREADS`` (0 or unset means one per CPU)."""
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        workers = int(raw)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def classify_orbits(lam, z0, max_iter: int, *, cycle_tol: float = CYCLE_TOL,
                    max_period: int = MAX_PERIOD):
    """Vectorised twin of :func:`tanlab.orbit.iterate_orbit` for flat arrays.

    Returns (codes, steps, periods, cycle_points); the cycle point is the
    first point of the detected cycle (``cycle.points[0]``).
    """
    z = np.array(z0, dtype=np.complex128).ravel()
    n_seeds = z.size
    lam = np.broadcast_to(np.asarray(lam, dtype=np.complex128), z.shape).copy()
    codes = np.full(n_seeds, UNRESOLVED, dtype=np.uint8)
    steps = np.full(n_seeds, max_iter, dtype=np.int32)
    periods = np.zeros(n_seeds, dtype=np.int32)
    cycle_pts = np.zeros(n_seeds, dtype=np.complex128)
    depth = max(1, min(max_period, max_iter))
    hist = np.zeros((depth, n_seeds), dtype=np.complex128)  # hist[m % depth] = z_m, m >= 1
    active = np.arange(n_seeds)
    for n in range(max_iter):
        if active.size == 0:
            break
        w, pole = evaluate_array(lam[active], z[active])
        if pole.any():
            hit = active[pole]
            codes[hit] = PREPOLE
            steps[hit] = n
            active = active[~pole]
            w = w[~pole]
        z[active] = w
        m = n + 1
        pmax = min(depth, m - 1)
        if pmax >= 1 and active.size:
            rows = np.array([(m - p) % depth for p in range(1, pmax + 1)])
            close = np.abs(hist[np.ix_(rows, active)] - w[None, :]) < cycle_tol
            found = close.any(axis=0)
            accepted = np.zeros(active.size, dtype=bool)
            if found.any():
                first_p = np.argmax(close, axis=0) + 1
                for p in np.unique(first_p[found]):
                    sel = np.flatnonzero(found & (first_p == p))
                    idx = active[sel]
                    mult = np.ones(sel.size, dtype=np.complex128)
                    for j in range(p):
                        mult = mult * derivative_array(hist[(m - p + j) % depth, idx])
                    ok = np.abs(mult) < 1.0
                    good = idx[ok]
                    codes[good] = BASIN
                    steps[good] = m
                    periods[good] = _minimal_periods(hist, good, m - p, p, depth)
                    cycle_pts[good] = hist[(m - p) % depth, good]
                    accepted[sel[ok]] = True
            active = active[~accepted]
            w = w[~accepted]
        hist[m % depth, active] = w
    return codes, steps, periods, cycle_pts


def _minimal_periods(hist, idx, start, p, depth):
    # array form of orbit.minimal_period over the cycle hist[start .. start+p-1]
    out = np.full(idx.size, p, dtype=np.int32)
    pending = np.ones(idx.size, dtype=bool)
    cyc = np.stack([hist[(start + j) % depth, idx] for j in range(p)])
    for d in range(1, p):
        if p % d:
            continue
        same = (np.abs(cyc - np.roll(cyc, -d, axis=0)) < PERIOD_MERGE_TOL).all(axis=0)
        hit = pending & same
        out[hit] = d
        pending &= ~hit
    return out


def _run_blocks(func, spec: GridSpec, workers: Optional[int]):
    blocks = [(r0, min(r0 + BLOCK_ROWS, spec.rows)) for r0 in range(0, spec.rows, BLOCK_ROWS)]
    points = spec.points()
    n = worker_count(workers)
    if n == 1 or len(blocks) == 1:
        results = [func(points[a:b]) for a, b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(lambda ab: func(points[ab[0]:ab[1]]), blocks))
    # assembled by block index, never by completion order
    return [np.concatenate([res[i] for res in results], axis=0) for i in range(len(results[0]))]


def render_dynamical(param: ParamLike, spec: GridSpec, *, max_iter: int = DYNAMICAL_MAX_ITER,
                     cycle_tol: float = CYCLE_TOL, max_period: int = MAX_PERIOD,
                     workers: Optional[int] = None) -> Raster:
    lam = as_parameter(param).lam

    def block(pts):
        codes, steps, periods, _ = classify_orbits(lam, pts, max_iter, cycle_tol=cycle_tol,
                                                   max_period=max_period)
        shape = pts.shape
        return (codes.reshape(shape), steps.reshape(shape),
                np.minimum(periods, PERIOD_CAP).astype(np.uint8).reshape(shape))

    codes, steps, periods = _run_blocks(block, spec, workers)
    return Raster(spec, codes, steps, periods, kind="dynamical", param=lam)


def classify_parameters(lams: np.ndarray, *, max_iter: int = PARAMETER_MAX_ITER,
                        cycle_tol: float = CYCLE_TOL, max_period: int = MAX_PERIOD):
    """Singular-orbit verdicts for an array of parameters.

    Returns (codes, steps, periods, cantor_flags) shaped like ``lams``.
    """
    lams = np.asarray(lams, dtype=np.complex128)
    flat = lams.ravel()
    seeds = np.concatenate([flat, flat + 1j, flat - 1j])
    codes, steps, periods, pts = classify_orbits(np.tile(flat, 3), seeds, max_iter,
                                                 cycle_tol=cycle_tol, max_period=max_period)
    k = flat.size
    codes = codes.reshape(3, k)
    steps = steps.reshape(3, k)
    periods = periods.reshape(3, k)
    pts = pts.reshape(3, k)
    hyperbolic = (codes == BASIN).all(axis=0)
    out_codes = np.where(hyperbolic, BASIN,
                         np.where((codes == PREPOLE).any(axis=0), PREPOLE, UNRESOLVED))
    near = np.minimum(np.abs(pts - (flat + 1j)), np.abs(pts - (flat - 1j))) < CANTOR_RADIUS
    flags = hyperbolic & (periods == 1).all(axis=0) & near.all(axis=0)
    out_periods = np.where(hyperbolic, np.minimum(periods[0], PERIOD_CAP), 0)
    out_steps = steps.max(axis=0)
    shape = lams.shape
    return (out_codes.astype(np.uint8).reshape(shape), out_steps.reshape(shape),
            out_periods.astype(np.uint8).reshape(shape), flags.reshape(shape))


def render_parameter(spec: GridSpec, *, max_iter: int = PARAMETER_MAX_ITER,
                     cycle_tol: float = CYCLE_TOL, max_period: int = MAX_PERIOD,
                     workers: Optional[int] = None) -> Raster:
    """Classify each parameter pixel by the fate of its three singular orbits.

    Code BASIN means hyperbolic (period from the critical orbit), PREPOLE
    means some singular value lands on a pole, UNRESOLVED otherwise.
    ``cantor_flags`` marks hyperbolic pixels whose singular orbits all sit on
    a fixed point within ``CANTOR_RADIUS`` of lam + i or lam - i.
    """
    def block(pts):
        return classify_parameters(pts, max_iter=max_iter, cycle_tol=cycle_tol,
                                   max_period=max_period)

    codes, steps, periods, flags = _run_blocks(block, spec, workers)
    return Raster(spec, codes, steps, periods, kind="parameter", cantor_flags=flags)


# ---------------------------------------------------------------------------
# Cantor regions A_q = {lam in quadrant q : |Re lam * Im lam| > T}
# ---------------------------------------------------------------------------

_QUADRANT_SIGNS = {1: (1, 1), 2: (-1, 1), 3: (-1, -1), 4: (1, -1)}


@dataclass(frozen=True)
class RegionAi:
    quadrant: int
    threshold: float

    def __post_init__(self):
        if self.quadrant not in _QUADRANT_SIGNS:
            raise ValueError("quadrant must be 1, 2, 3 or 4")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")

    def contains(self, lam: complex) -> bool:
        sx, sy = _QUADRANT_SIGNS[self.quadrant]
        lam = complex(lam)
        if lam.real * sx <= 0 or lam.imag * sy <= 0:
            return False
        return abs(lam.real * lam.imag) > self.threshold


def hyperbola_arc(quadrant: int, t: float, bound: float, samples: int = 64) -> np.ndarray:
    """Log-spaced points of {|l1 l2| = t, |lam| <= bound} in the given quadrant."""
    sx, sy = _QUADRANT_SIGNS[quadrant]
    disc = bound ** 4 - 4 * t * t
    if disc < 0:
        return np.empty(0, dtype=np.complex128)
    lo = math.sqrt((bound ** 2 - math.sqrt(disc)) / 2)
    hi = math.sqrt((bound ** 2 + math.sqrt(disc)) / 2)
    l1 = np.geomspace(lo, hi, samples) if hi > lo else np.array([lo])
    l2 = t / l1
    return sx * l1 + 1j * sy * l2


@dataclass
class ThresholdScan:
    quadrant: int
    bound: float
    levels: np.ndarray
    passed: np.ndarray
    threshold: float


def scan_region_threshold(quadrant: int, bound: float = 10.0, step: float = 0.5, *,
                          samples: int = 64, max_iter: int = PARAMETER_MAX_ITER) -> ThresholdScan:
    """Test every sampled arc with level t = step, 2 step, ... up to bound^2 / 2.

    The estimate is the smallest level from which every higher sampled arc
    passes, so the returned T is consistent with all arcs above it.
    """
    if not (bound > 0 and step > 0):
        raise ValueError("search bounds must be positive")
    top = bound * bound / 2
    levels = step * np.arange(1, int(math.floor(top / step + 1e-12)) + 1)
    arcs = [hyperbola_arc(quadrant, float(t), bound, samples) for t in levels]
    lams = np.concatenate(arcs) if arcs else np.empty(0, dtype=np.complex128)
    _, _, _, flags = classify_parameters(lams, max_iter=max_iter)
    passed = np.zeros(levels.size, dtype=bool)
    pos = 0
    for i, arc in enumerate(arcs):
        passed[i] = arc.size > 0 and bool(flags[pos:pos + arc.size].all())
        pos += arc.size
    threshold = top
    for i in range(levels.size - 1, -1, -1):
        if not passed[i]:
            break
        threshold = float(levels[i])
    return ThresholdScan(quadrant, bound, levels, passed, threshold)


def estimate_region_threshold(quadrant: int, bound: float = 10.0, step: float = 0.5,
                              **kwargs) -> float:
    return scan_region_threshold(quadrant, bound, step, **kwargs).threshold


def component_count(raster: Raster, class_code: int) -> tuple[int, float]:
    """Number of 4-connected components of ``class_code`` pixels and the share of the largest."""
    mask = raster.class_codes == class_code
    labels, count = ndimage.label(mask)
    if count == 0:
        return 0, 0.0
    sizes = np.bincount(labels.ravel())[1:]
    return int(count), float(sizes.max() / mask.sum())
