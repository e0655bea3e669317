"""Pixel classification of windows, Julia-set approximation and distances to
the boundary of a point's Fatou label class.

Labels in a :class:`FatouGrid` are integers: ``k >= 0`` is the basin of
``attractors[k]``; negative values are ESCAPED, POLE and UNDECIDED. Undecided
pixels form their own class for every boundary computation, which can only
shrink the disks reported around a point.

FH is classified through its semiconjugacy to GFH: the label of z is the
label of exp(z) under GFH, with the superattracting basin of 0 reported as
ESCAPED (it lifts to the Baker domain, where Re f^n -> -infinity). Its own
orbits escape in every Fatou component, so direct classification carries no
information.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import UnlabeledSeed
from .mapcat import MeromorphicMap, Window
from .orbit import IterParams

ESCAPED = -1
POLE = -2
UNDECIDED = -3
ATTRACTOR_DEDUP = 1e-6
BISECTION_DEPTH = 40
MIN_DISK_RAYS = 64

_GFH = MeromorphicMap("gfh")


def label_points(m: MeromorphicMap, zs, params: IterParams) -> tuple[np.ndarray, np.ndarray]:
    """Kernel verdict codes and converged targets for a flat array of points."""
    zs = np.ascontiguousarray(zs, dtype=np.complex128).ravel()
    codes = np.empty(zs.shape, dtype=np.int8)
    targets = np.empty(zs.shape, dtype=np.complex128)
    if m.map_id == "fh":
        with np.errstate(over="ignore", invalid="ignore"):
            ws = np.exp(zs)
        K.classify_many(_GFH.code, _GFH.params, ws, params.max_iter,
                        float(params.escape_radius), float(params.tol_conv), codes, targets)
        # basin of 0 downstairs is the Baker domain upstairs
        codes[codes == K.CONVERGED] = K.ESCAPED
        return codes, targets
    K.classify_many(m.code, m.params, zs, params.max_iter, float(params.escape_radius),
                    float(params.tol_conv), codes, targets)
    return codes, targets


def _same_class(codes, targets, code0, target0):
    same = codes == code0
    if code0 == K.CONVERGED:
        same &= np.abs(targets - target0) < ATTRACTOR_DEDUP
    return same


@dataclass
class FatouGrid:
    window: Window
    res_x: int
    res_y: int
    # shape (res_y, res_x); row 0 is the top edge (largest imaginary part)
    labels: np.ndarray
    attractors: list
    iter_params: IterParams = field(default_factory=IterParams)

    def centers(self) -> np.ndarray:
        return pixel_centers(self.window, self.res_x, self.res_y)


def pixel_centers(window: Window, res_x: int, res_y: int) -> np.ndarray:
    x0, y0, x1, y1 = window
    xs = x0 + (np.arange(res_x) + 0.5) * (x1 - x0) / res_x
    ys = y1 - (np.arange(res_y) + 0.5) * (y1 - y0) / res_y
    return xs[None, :] + 1j * ys[:, None]


def _run_rows(m, centers, params, workers):
    rows = centers.shape[0]
    codes = np.empty(centers.shape, dtype=np.int8)
    targets = np.empty(centers.shape, dtype=np.complex128)

    def work(r0, r1):
        c, t = label_points(m, centers[r0:r1], params)
        codes[r0:r1] = c.reshape(r1 - r0, -1)
        targets[r0:r1] = t.reshape(r1 - r0, -1)

    chunk = max(1, rows // (4 * workers))
    spans = [(r, min(rows, r + chunk)) for r in range(0, rows, chunk)]
    if workers == 1:
        for span in spans:
            work(*span)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda s: work(*s), spans))
    return codes, targets


def _assign_attractors(codes, targets):
    labels = np.full(codes.shape, UNDECIDED, dtype=np.int32)
    labels[codes == K.ESCAPED] = ESCAPED
    labels[codes == K.POLE_HIT] = POLE
    conv = codes == K.CONVERGED
    attractors: list[complex] = []
    if conv.any():
        flat_t = targets[conv]
        keys = np.round(flat_t.real / ATTRACTOR_DEDUP) + 1j * np.round(flat_t.imag / ATTRACTOR_DEDUP)
        _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        reps = flat_t[first]
        order = np.lexsort((reps.imag, reps.real))
        rep_index = np.empty(len(reps), dtype=np.int64)
        for i in order:
            r = complex(reps[i])
            for j, a in enumerate(attractors):
                if abs(a - r) < ATTRACTOR_DEDUP:
                    rep_index[i] = j
                    break
            else:
                rep_index[i] = len(attractors)
                attractors.append(r)
        labels[conv] = rep_index[inverse.ravel()]
    return labels, attractors


def classify_grid(m: MeromorphicMap, window, res, iter_params: IterParams | None = None,
                  workers: int = 1) -> FatouGrid:
    """Label every pixel center of the window by its orbit verdict.

    ``res`` is an int or a (res_x, res_y) pair. Output does not depend on
    ``workers``: rows are independent and attractor indices are assigned
    after all rows are done, sorted by real then imaginary part.
    """
    window = Window(*window)
    res_x, res_y = (res, res) if np.isscalar(res) else res
    if res_x < 2 or res_y < 2:
        raise ValueError("resolution must be at least 2 in each axis")
    params = iter_params or IterParams.for_map(m)
    centers = pixel_centers(window, res_x, res_y)
    codes, targets = _run_rows(m, centers, params, max(1, int(workers)))
    labels, attractors = _assign_attractors(codes, targets)
    return FatouGrid(window, int(res_x), int(res_y), labels, attractors, params)


def julia_pixels(grid: FatouGrid) -> list[tuple[int, int]]:
    """(row, col) of pixels with a 4-neighbour in a different label class."""
    lab = grid.labels
    edge = np.zeros(lab.shape, dtype=bool)
    dv = lab[1:, :] != lab[:-1, :]
    dh = lab[:, 1:] != lab[:, :-1]
    edge[1:, :] |= dv
    edge[:-1, :] |= dv
    edge[:, 1:] |= dh
    edge[:, :-1] |= dh
    rows, cols = np.nonzero(edge)
    return list(zip(rows.tolist(), cols.tolist()))


@dataclass
class BoundaryDistance:
    distance: float
    # True when no label change was found within r_max on the minimising ray
    lower_bound: bool
    ray_distances: np.ndarray

    def __float__(self) -> float:
        return self.distance


def _ray_search(m, z, params, directions, r_max, samples, depth, allow_undecided):
    code0, target0 = label_points(m, np.array([z]), params)
    code0, target0 = int(code0[0]), complex(target0[0])
    if code0 == K.UNDECIDED and not allow_undecided:
        raise UnlabeledSeed(f"orbit of {z!r} is undecided")
    n_rays = len(directions)
    radii = r_max * np.arange(1, samples + 1) / samples
    pts = z + directions[:, None] * radii[None, :]
    codes, targets = label_points(m, pts, params)
    differs = ~_same_class(codes, targets, code0, target0).reshape(n_rays, samples)
    found = differs.any(axis=1)
    first = np.where(found, differs.argmax(axis=1), samples - 1)
    hi = np.where(found, radii[first], r_max)
    lo = np.where(first > 0, radii[np.maximum(first - 1, 0)], 0.0)
    lo = np.where(found, lo, r_max)
    idx = np.nonzero(found)[0]
    if len(idx):
        a, b = lo[idx].copy(), hi[idx].copy()
        for _ in range(depth):
            mid = 0.5 * (a + b)
            c, t = label_points(m, z + directions[idx] * mid, params)
            same = _same_class(c, t, code0, target0)
            a = np.where(same, mid, a)
            b = np.where(same, b, mid)
        hi[idx] = b
    dist = np.where(found, hi, r_max)
    k = int(np.argmin(dist))
    return BoundaryDistance(float(dist[k]), not bool(found[k]), dist)


def ray_directions(ray_count: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(ray_count) / ray_count)


def boundary_distance(m: MeromorphicMap, z, iter_params: IterParams | None = None,
                      ray_count: int = 32, r_max: float = 4.0, samples: int = 64,
                      depth: int = BISECTION_DEPTH, allow_undecided: bool = False
                      ) -> BoundaryDistance:
    """Distance from z to the nearest point with a different label, by ray search.

    Each ray is sampled at ``samples`` evenly spaced radii up to ``r_max``;
    the first change is refined by ``depth`` bisection steps. Label regions
    thinner than r_max/samples can be stepped over.
    """
    params = iter_params or IterParams.for_map(m)
    return _ray_search(m, complex(z), params, ray_directions(ray_count), float(r_max),
                       samples, depth, allow_undecided)


def inscribed_disk_radius(m: MeromorphicMap, z, iter_params: IterParams | None = None,
                          r_max: float = 4.0, ray_count: int = MIN_DISK_RAYS,
                          samples: int = 64, depth: int = BISECTION_DEPTH,
                          allow_undecided: bool = False) -> BoundaryDistance:
    """Radius of the largest sampled disk around z inside z's label class.

    A sampling approximation with at least 64 rays, not a certificate.
    """
    return boundary_distance(m, z, iter_params, max(ray_count, MIN_DISK_RAYS), r_max,
                             samples, depth, allow_undecided)
