"""Winding numbers of sampled closed curves."""

import numpy as np


def accumulated_argument(curve, center=0j):
    """Total change of arg(curve - center) along an open polyline."""
    rel = np.asarray(curve, dtype=np.complex128) - center
    steps = np.angle(rel[1:] / rel[:-1])
    return float(np.sum(steps))


def winding_number(curve, center=0j):
    """Winding number of the closed polyline through ``curve`` about ``center``.

    The last point is joined back to the first. Consecutive samples must be
    close enough that the argument changes by less than pi between them.
    """
    pts = np.asarray(curve, dtype=np.complex128)
    closed = np.concatenate([pts, pts[:1]])
    return int(round(accumulated_argument(closed, center) / (2 * np.pi)))


def rectangle_boundary(window, func, base_samples=4096, max_refine=12):
    """Sample ``func`` counterclockwise around a rectangle.

    Segments whose image turns by more than pi/4 are bisected until the
    argument is resolved (or ``max_refine`` rounds pass). Returns the
    image samples.
    """
    x0, y0, x1, y1 = window
    corners = np.array([complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)])
    n = max(base_samples // 4, 8)
    t = np.linspace(0.0, 1.0, n, endpoint=False)
    path = np.concatenate([a + (b - a) * t for a, b in zip(corners, np.roll(corners, -1))])
    vals = func(path)
    for _ in range(max_refine):
        nxt = np.roll(vals, -1)
        jumps = np.abs(np.angle(nxt / vals)) > np.pi / 4
        if not jumps.any():
            break
        mids = 0.5 * (path + np.roll(path, -1))
        # the wrap-around segment closes the loop
        mids[-1] = 0.5 * (path[-1] + path[0])
        idx = np.nonzero(jumps)[0]
        path = np.insert(path, idx + 1, mids[idx])
        vals = np.insert(vals, idx + 1, func(mids[idx]))
    return vals


def count_zeros(window, func, base_samples=4096):
    """Zeros minus poles of ``func`` inside the rectangle (argument principle)."""
    return winding_number(rectangle_boundary(window, func, base_samples), 0j)
