"""Catalog of the transcendental meromorphic maps under study.

Map ids:

* ``nf``  - z - tan z, Newton's method of sin z
* ``ng``  - z + i + tan z
* ``nh``  - (z - 1 - alpha e^-z) / (1 + beta e^-z), Newton's method of
  h(z) = e^z + beta z + alpha
* ``fh``  - 2 - lam - Log(2 - lam) + 2z - e^z with lam = exp(2 pi i (1 - sqrt 5)/2)
* ``gfh`` - the map w -> e^(2-lam)/(2-lam) w^2 e^-w, satisfying
  exp(fh(z)) = gfh(exp(z))

Points are plain Python ``complex`` values; a pole is signalled by raising
:class:`~fatoulab.errors.PoleHit` rather than returning a huge number.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .contour import count_zeros
from .errors import OverflowDomain, PoleHit, RootSearchFailed

MAP_IDS = ("nf", "ng", "nh", "fh", "gfh")
_CODES = {"nf": K.NF, "ng": K.NG, "nh": K.NH, "fh": K.FH, "gfh": K.GFH}

LAMBDA = cmath.exp(2j * math.pi * (1 - math.sqrt(5)) / 2)
SIEGEL_CENTER = 2 - LAMBDA
FH_CONST = 2 - LAMBDA - cmath.log(2 - LAMBDA)
GFH_CONST = cmath.exp(2 - LAMBDA) / (2 - LAMBDA)

TOL_POLE = K.TOL_POLE
ROOT_RESIDUAL = 1e-10


class Window(NamedTuple):
    re_min: float
    im_min: float
    re_max: float
    im_max: float

    @classmethod
    def parse(cls, text: str) -> "Window":
        parts = [float(p) for p in str(text).split(",")]
        if len(parts) != 4:
            raise ValueError(f"window needs x0,y0,x1,y1, got {text!r}")
        return cls(*parts)

    @classmethod
    def around(cls, z: complex, half_width: float) -> "Window":
        return cls(z.real - half_width, z.imag - half_width,
                   z.real + half_width, z.imag + half_width)

    def contains(self, z) -> bool | np.ndarray:
        z = np.asarray(z)
        return ((z.real >= self.re_min) & (z.real <= self.re_max)
                & (z.imag >= self.im_min) & (z.imag <= self.im_max))

    def dilate(self, factor: float) -> "Window":
        """Grow each side by ``factor`` times the half-extent."""
        dx = 0.5 * (self.re_max - self.re_min) * factor
        dy = 0.5 * (self.im_max - self.im_min) * factor
        return Window(self.re_min - dx, self.im_min - dy, self.re_max + dx, self.im_max + dy)

    def pad(self, margin: float) -> "Window":
        return Window(self.re_min - margin, self.im_min - margin,
                      self.re_max + margin, self.im_max + margin)


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex literal needs [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


@dataclass(frozen=True)
class MeromorphicMap:
    map_id: str
    alpha: complex = 0j
    beta: complex = 0j

    def __post_init__(self):
        if self.map_id not in MAP_IDS:
            raise ValueError(f"unknown map id {self.map_id!r}; expected one of {MAP_IDS}")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if self.map_id == "nh":
            if self.beta == 0:
                raise ValueError("nh requires beta != 0")
            if not (cmath.isfinite(self.alpha) and cmath.isfinite(self.beta)):
                raise ValueError("nh parameters must be finite")
        elif self.alpha != 0 or self.beta != 0:
            raise ValueError(f"{self.map_id} takes no parameters")

    @classmethod
    def nh(cls, alpha, beta) -> "MeromorphicMap":
        return cls("nh", alpha, beta)

    @classmethod
    def from_config(cls, cfg: dict) -> "MeromorphicMap":
        unknown = set(cfg) - {"map", "alpha", "beta"}
        if unknown:
            raise ValueError(f"unknown map keys: {sorted(unknown)}")
        map_id = str(cfg["map"]).lower()
        if map_id == "nh":
            return cls.nh(_as_complex(cfg.get("alpha", 0.0)), _as_complex(cfg["beta"]))
        if "alpha" in cfg or "beta" in cfg:
            raise ValueError(f"{map_id} takes no parameters")
        return cls(map_id)

    def to_config(self) -> dict:
        cfg = {"map": self.map_id}
        if self.map_id == "nh":
            cfg["alpha"] = [self.alpha.real, self.alpha.imag]
            cfg["beta"] = [self.beta.real, self.beta.imag]
        return cfg

    @property
    def code(self) -> int:
        return _CODES[self.map_id]

    @cached_property
    def params(self) -> np.ndarray:
        prm = np.zeros(4, dtype=np.complex128)
        if self.map_id == "nh":
            prm[0] = self.alpha
            prm[1] = self.beta
            ct = self.ctilde
            if ct is not None:
                prm[2] = ct
                prm[3] = 1.0
        elif self.map_id == "fh":
            prm[0] = FH_CONST
        elif self.map_id == "gfh":
            prm[0] = GFH_CONST
        prm.flags.writeable = False
        return prm

    @property
    def ctilde(self) -> complex | None:
        """Double root 1 - alpha/beta of h when e^(1-alpha/beta) + beta = 0."""
        if self.map_id != "nh":
            return None
        c = 1 - self.alpha / self.beta
        try:
            gap = abs(cmath.exp(c) + self.beta)
        except OverflowError:
            return None
        if gap <= 1e-12 * max(1.0, abs(self.beta)):
            return c
        return None

    @property
    def asymptotic_value(self) -> complex | None:
        """The finite asymptotic value, when the map has exactly one."""
        if self.map_id == "nh":
            return -self.alpha / self.beta
        if self.map_id == "gfh":
            # w^2 e^{-w} -> 0 as Re w -> +infinity
            return 0j
        return None

    @property
    def translation(self) -> tuple[complex, int] | None:
        """(T, m) with f(z + T) = f(z) + m T, when the map has one."""
        if self.map_id in ("nf", "ng"):
            return (complex(math.pi, 0.0), 1)
        if self.map_id == "fh":
            return (complex(0.0, 2 * math.pi), 2)
        return None

    def label(self) -> str:
        if self.map_id == "nh":
            return f"nh(alpha={self.alpha}, beta={self.beta})"
        return self.map_id


def _check(value, status, z):
    if status == K.POLE:
        raise PoleHit(z)
    if status == K.OVERFLOW or not cmath.isfinite(value):
        raise OverflowDomain(z)
    return value


def evaluate(m: MeromorphicMap, z) -> complex:
    """f(z). Raises PoleHit near poles and OverflowDomain past the exp range."""
    z = complex(z)
    if not cmath.isfinite(z):
        raise ValueError("z must be finite")
    value, status = K.map_eval(m.code, m.params, z)
    return _check(value, status, z)


def deriv(m: MeromorphicMap, z, order: int = 1) -> complex:
    """Closed-form f'(z) (order=1) or f''(z) (order=2)."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    z = complex(z)
    value, status = K.map_deriv(m.code, m.params, z, order)
    return _check(value, status, z)


def evaluate_array(m: MeromorphicMap, zs) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised evaluation; returns (values, status) with status 0 = ok."""
    zs = np.ascontiguousarray(zs, dtype=np.complex128)
    flat = zs.ravel()
    values = np.empty_like(flat)
    status = np.empty(flat.shape, dtype=np.int8)
    K.eval_many(m.code, m.params, flat, values, status)
    return values.reshape(zs.shape), status.reshape(zs.shape)


def deriv_array(m: MeromorphicMap, zs, order: int = 1) -> tuple[np.ndarray, np.ndarray]:
    zs = np.ascontiguousarray(zs, dtype=np.complex128)
    flat = zs.ravel()
    values = np.empty_like(flat)
    status = np.empty(flat.shape, dtype=np.int8)
    K.deriv_many(m.code, m.params, flat, order, values, status)
    return values.reshape(zs.shape), status.reshape(zs.shape)


def _sorted_points(points) -> list[complex]:
    return sorted(points, key=lambda p: (p.imag, p.real))


def _lattice(offset: complex, step: complex, window: Window) -> list[complex]:
    """offset + k*step (step real or imaginary) inside the window."""
    if step.imag == 0:
        lo, hi, base, s = window.re_min, window.re_max, offset.real, step.real
    else:
        lo, hi, base, s = window.im_min, window.im_max, offset.imag, step.imag
    k0 = math.ceil((lo - base) / s)
    k1 = math.floor((hi - base) / s)
    pts = [offset + k * step for k in range(k0, k1 + 1)]
    return [p for p in pts if window.contains(p)]


def poles_in_window(m: MeromorphicMap, window: Window) -> list[complex]:
    window = Window(*window)
    if m.map_id in ("nf", "ng"):
        pts = _lattice(complex(math.pi / 2, 0.0), complex(math.pi, 0.0), window)
    elif m.map_id == "nh":
        base = complex(math.log(abs(m.beta)), cmath.phase(-m.beta))
        pts = _lattice(base, complex(0.0, 2 * math.pi), window)
        ct = m.ctilde
        if ct is not None:
            pts = [p for p in pts if abs(p - ct) > 1e-6]
    else:
        pts = []
    return _sorted_points(pts)


@dataclass(frozen=True)
class SingularPointSet:
    critical_points: list
    asymptotic_values: list
    window: Window

    @property
    def points(self) -> list[complex]:
        """Critical points and asymptotic values, without duplicates."""
        out: list[complex] = []
        for p in list(self.critical_points) + list(self.asymptotic_values):
            if all(abs(p - q) > 1e-12 for q in out):
                out.append(p)
        return out


def _h(alpha, beta, z):
    return np.exp(z) + beta * z + alpha


def _newton_h(alpha, beta, seeds, steps=100):
    c = np.array(seeds, dtype=np.complex128)
    with np.errstate(all="ignore"):
        for _ in range(steps):
            e = np.exp(c)
            step = (e + beta * c + alpha) / (e + beta)
            # damping keeps seeds from jumping across several branches
            big = np.abs(step) > 2.0
            step[big] *= 2.0 / np.abs(step[big])
            step[~np.isfinite(step)] = 0
            c = c - step
        res = np.abs(_h(alpha, beta, c))
    ok = np.isfinite(c) & (res < ROOT_RESIDUAL)
    return c[ok]


def _branch_seeds(alpha, beta, window):
    # c = Log(-beta c - alpha) + 2 pi i k converges for large |k|
    k0 = math.floor((window.im_min - math.pi) / (2 * math.pi))
    k1 = math.ceil((window.im_max + math.pi) / (2 * math.pi))
    seeds = []
    for k in range(k0, k1 + 1):
        c = complex(math.log(abs(beta)) + 1.0, 2 * math.pi * k)
        for _ in range(40):
            arg = -beta * c - alpha
            if arg == 0:
                break
            c = cmath.log(arg) + 2j * math.pi * k
        seeds.append(c)
    return seeds


def _dedupe(points, tol):
    out: list[complex] = []
    for p in points:
        if all(abs(p - q) > tol for q in out):
            out.append(complex(p))
    return out


def nh_zeros(alpha, beta, window: Window) -> list[tuple[complex, int]]:
    """Zeros of h(z) = e^z + beta z + alpha in the window, with multiplicity.

    Candidates come from per-branch seeds plus a seed lattice refined by
    damped Newton; completeness is checked against an argument-principle
    count on a slightly padded rectangle.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    window = Window(*window)
    box = window.pad(1e-3)
    func = lambda z: _h(alpha, beta, z)  # noqa: E731
    expected = count_zeros(box, func)
    ctilde = MeromorphicMap.nh(alpha, beta).ctilde
    spacing = 1.0
    for _ in range(4):
        grid_box = box.pad(1.0)
        xs = np.arange(grid_box.re_min, grid_box.re_max + spacing, spacing)
        ys = np.arange(grid_box.im_min, grid_box.im_max + spacing, spacing * math.pi / 2)
        lattice = (xs[None, :] + 1j * ys[:, None]).ravel()
        seeds = np.concatenate([np.array(_branch_seeds(alpha, beta, box)), lattice])
        roots = _newton_h(alpha, beta, seeds)
        roots = roots[box.contains(roots)]
        roots = roots[np.lexsort((roots.real, roots.imag))]
        found = [(r, 1) for r in _dedupe(roots, 1e-8)]
        if ctilde is not None:
            # Newton only reaches the double root to ~sqrt(eps); use the exact value
            found = [(r, 1) for r, _ in found if abs(r - ctilde) > 1e-4]
            if box.contains(ctilde):
                found.append((ctilde, 2))
                found.sort(key=lambda rm: (rm[0].imag, rm[0].real))
        if sum(mult for _, mult in found) == expected:
            return [(r, mult) for r, mult in found if window.contains(r)]
        spacing /= 2
    raise RootSearchFailed(
        f"found {len(found)} zeros of h in {window}, argument principle says {expected}")


def singular_points(m: MeromorphicMap, window: Window) -> SingularPointSet:
    window = Window(*window)
    asym: list[complex] = []
    if m.map_id == "nf":
        crit = _lattice(0j, complex(math.pi, 0.0), window)
    elif m.map_id == "ng":
        y = math.asinh(1.0)
        crit = (_lattice(complex(math.pi / 2, y), complex(math.pi, 0.0), window)
                + _lattice(complex(math.pi / 2, -y), complex(math.pi, 0.0), window))
    elif m.map_id == "nh":
        crit = [r for r, mult in nh_zeros(m.alpha, m.beta, window) if mult == 1]
        u = m.asymptotic_value
        if window.contains(u):
            asym = [u]
    elif m.map_id == "fh":
        crit = _lattice(complex(math.log(2.0), 0.0), complex(0.0, 2 * math.pi), window)
    else:
        crit = [p for p in (0j, 2 + 0j) if window.contains(p)]
        if window.contains(0j):
            asym = [0j]
    return SingularPointSet(_sorted_points(crit), asym, window)
