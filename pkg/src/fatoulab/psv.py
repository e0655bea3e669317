"""Finite truncations of the postsingular set and nearest-point queries."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import EmptyCloud
from .mapcat import MeromorphicMap, Window, singular_points

DEDUP = 1e-9
SEED_DILATION = 0.5
CUT_RADIUS = 1e8


@dataclass
class PostsingularCloud:
    points: np.ndarray  # complex128, in insertion order
    depth: int
    window: Window
    source_map: dict
    # (singular point index, iteration index) for every stored point
    origins: list = field(default_factory=list)
    # singular point index -> reason its orbit stopped before ``depth``
    cuts: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def summary(self) -> dict:
        return {"count": len(self.points), "depth": self.depth, "window": list(self.window)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("s_index,n,re,im\n")
        for (s, n), z in zip(self.origins, self.points):
            buf.write(f"{s},{n},{float(z.real)!r},{float(z.imag)!r}\n")
        return buf.getvalue()


def _orbit_table(m: MeromorphicMap, seeds: list[complex], depth: int):
    """rows[n][s] = f^n(seeds[s]) or None once the orbit was cut."""
    cuts: dict[int, str] = {}
    rows = [list(seeds)]
    current = list(seeds)
    for n in range(1, depth + 1):
        nxt = []
        for s, z in enumerate(current):
            if z is None:
                nxt.append(None)
                continue
            w, st = K.map_eval(m.code, m.params, z)
            if st == K.POLE:
                cuts[s] = f"pole at n={n - 1}"
                nxt.append(None)
            elif st == K.OVERFLOW or not math.isfinite(abs(w)):
                cuts[s] = f"overflow at n={n}"
                nxt.append(None)
            elif abs(w) > CUT_RADIUS:
                cuts[s] = f"escaped at n={n}"
                nxt.append(None)
            else:
                nxt.append(complex(w))
        rows.append(nxt)
        current = nxt
    return rows, cuts


def _translates(base: complex, shift: complex, window: Window) -> list[tuple[int, complex]]:
    if shift.imag == 0:
        lo, hi, b, s = window.re_min, window.re_max, base.real, shift.real
    else:
        lo, hi, b, s = window.im_min, window.im_max, base.imag, shift.imag
    k0 = math.ceil((lo - b) / s)
    k1 = math.floor((hi - b) / s)
    out = []
    for k in range(k0, k1 + 1):
        z = base + k * shift
        if window.contains(z):
            out.append((k, z))
    return out


def _candidates(m: MeromorphicMap, window: Window, depth: int):
    """Yield (s_index, n, z) in n-major order, so depth d is a prefix of d+1."""
    tr = m.translation
    if tr is None:
        seed_set = singular_points(m, window.dilate(SEED_DILATION))
        seeds = seed_set.points
        if m.asymptotic_value is not None and m.asymptotic_value not in seeds:
            seeds = seeds + [m.asymptotic_value]
        rows, cuts = _orbit_table(m, seeds, depth)
        out = []
        for n, row in enumerate(rows):
            for s, z in enumerate(row):
                if z is not None and window.contains(z):
                    out.append((s, n, z))
        return out, cuts
    # f(z + T) = f(z) + mult*T: iterate one representative per translation
    # class and place its translates, f^n(s + kT) = f^n(s) + mult^n k T.
    period, mult = tr
    if period.imag == 0:
        fundamental = Window(0.0, window.im_min, period.real, window.im_max).dilate(SEED_DILATION)
        fundamental = Window(0.0, fundamental.im_min, period.real, fundamental.im_max)
    else:
        fundamental = Window(window.re_min, 0.0, window.re_max, period.imag).dilate(SEED_DILATION)
        fundamental = Window(fundamental.re_min, 0.0, fundamental.re_max, period.imag)
    reps = [p for p in singular_points(m, fundamental).points
            if (p.real < period.real if period.imag == 0 else p.imag < period.imag)]
    rows, cuts = _orbit_table(m, reps, depth)
    out = []
    n_reps = len(reps)
    for n, row in enumerate(rows):
        shift = period * mult ** n
        for r, z in enumerate(row):
            if z is None:
                continue
            for k, w in _translates(z, shift, window):
                out.append((k * n_reps + r, n, w))
    out.sort(key=lambda t: (t[1], t[0]))
    return out, cuts


def build_cloud(m: MeromorphicMap, window, depth: int) -> PostsingularCloud:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    window = Window(*window)
    cands, cuts = _candidates(m, window, depth)
    kept: list[complex] = []
    origins: list[tuple[int, int]] = []
    cells: dict[tuple[int, int], list[int]] = {}
    for s, n, z in cands:
        cx, cy = math.floor(z.real / DEDUP), math.floor(z.imag / DEDUP)
        dup = False
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in cells.get((cx + dx, cy + dy), ()):
                    if abs(kept[j] - z) <= DEDUP:
                        dup = True
                        break
                if dup:
                    break
            if dup:
                break
        if dup:
            continue
        cells.setdefault((cx, cy), []).append(len(kept))
        kept.append(z)
        origins.append((s, n))
    pts = np.array(kept, dtype=np.complex128)
    return PostsingularCloud(pts, depth, window, m.to_config(), origins, cuts)


def nearest(cloud: PostsingularCloud, z) -> tuple[complex, float]:
    """Exact nearest cloud point by linear scan; ties go to the earliest point."""
    if len(cloud.points) == 0:
        raise EmptyCloud("postsingular cloud is empty")
    z = complex(z)
    i = int(np.argmin(np.abs(cloud.points - z)))
    p = complex(cloud.points[i])
    return p, abs(p - z)
