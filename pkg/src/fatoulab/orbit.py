"""Forward orbits, termination verdicts and convergence order."""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import InsufficientData, RealPoleCrossing
from .mapcat import MeromorphicMap

TOL_CONV = 1e-10
ESCAPE_RADIUS = 1e8
MAX_ITER = 2000
MAX_STORED = 4096
ERROR_FLOOR = 1e-14
MONOTONE_ULPS = 8


@dataclass(frozen=True)
class IterParams:
    max_iter: int = MAX_ITER
    escape_radius: float = ESCAPE_RADIUS
    tol_conv: float = TOL_CONV

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.escape_radius > 0:
            raise ValueError("escape_radius must be positive")

    @classmethod
    def for_map(cls, m: MeromorphicMap, **overrides) -> "IterParams":
        """Defaults, except NG escapes at radius 1e3.

        Orbits in the NG upper half-plane drift by about 2i per step, so the
        global radius of 1e8 is out of reach within max_iter.
        """
        base = {"escape_radius": 1e3} if m.map_id == "ng" else {}
        base.update(overrides)
        return cls(**base)

    def to_dict(self) -> dict:
        return {"max_iter": self.max_iter, "escape_radius": self.escape_radius,
                "tol_conv": self.tol_conv}


@dataclass(frozen=True)
class Verdict:
    kind: str  # converged | escaped | pole | undecided
    step: int
    target: complex | None = None
    period: int = 0

    def __str__(self) -> str:
        if self.kind == "converged":
            t = self.target
            return f"ConvergedTo({t.real:.17g}{t.imag:+.17g}j,{self.period})"
        if self.kind == "escaped":
            return f"Escaped({self.step})"
        if self.kind == "pole":
            return f"PoleHit({self.step})"
        return "Undecided"


_KINDS = {K.CONVERGED: "converged", K.ESCAPED: "escaped",
          K.POLE_HIT: "pole", K.UNDECIDED: "undecided"}


def params_hash(m: MeromorphicMap) -> str:
    blob = json.dumps(m.to_config(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Orbit:
    seed: complex
    points: list
    verdict: Verdict
    params_hash: str
    # iterates elided from the middle when the orbit exceeded MAX_STORED
    dropped: int = 0
    iter_params: IterParams = field(default_factory=IterParams)

    def steps(self) -> list[int]:
        """Iteration index of every stored point."""
        n = len(self.points)
        if not self.dropped:
            return list(range(n))
        head = MAX_STORED // 2
        return list(range(head)) + list(range(head + self.dropped, n + self.dropped))


def iterate(m: MeromorphicMap, seed, max_iter: int = MAX_ITER,
            escape_radius: float = ESCAPE_RADIUS, tol_conv: float = TOL_CONV) -> Orbit:
    seed = complex(seed)
    prm = IterParams(max_iter, escape_radius, tol_conv)
    buf = np.empty(max_iter + 1, dtype=np.complex128)
    code, step, period, target, n = K.run_orbit(
        m.code, m.params, seed, max_iter, float(escape_radius), float(tol_conv), buf)
    kind = _KINDS[code]
    verdict = Verdict(kind, int(step), complex(target) if kind == "converged" else None,
                      int(period))
    pts = buf[:n]
    dropped = 0
    if n > MAX_STORED:
        head = MAX_STORED // 2
        dropped = n - MAX_STORED
        pts = np.concatenate([pts[:head], pts[n - head:]])
    return Orbit(seed, [complex(p) for p in pts], verdict, params_hash(m), dropped, prm)


def iterate_with(m: MeromorphicMap, seed, params: IterParams) -> Orbit:
    return iterate(m, seed, params.max_iter, params.escape_radius, params.tol_conv)


def forward_points(m: MeromorphicMap, seed, n: int) -> list[complex]:
    """seed, f(seed), ..., f^n(seed), stopping early only at a pole or overflow."""
    z = complex(seed)
    out = [z]
    for _ in range(n):
        w, st = K.map_eval(m.code, m.params, z)
        if st != K.OK or not math.isfinite(abs(w)):
            break
        out.append(complex(w))
        z = w
    return out


def orbit_csv(orbit: Orbit) -> str:
    """CSV text with header n,re,im,abs,verdict; verdict only on the last row."""
    buf = io.StringIO()
    buf.write("n,re,im,abs,verdict\n")
    steps = orbit.steps()
    last = len(orbit.points) - 1
    for i, (n, z) in enumerate(zip(steps, orbit.points)):
        tag = str(orbit.verdict) if i == last else ""
        buf.write(f"{n},{z.real!r},{z.imag!r},{abs(z)!r},{tag}\n")
    return buf.getvalue()


def convergence_order(orbit: Orbit, max_pairs: int = 6) -> float:
    """Least-squares slope of log e_{n+1} against log e_n near the limit.

    Errors are measured against the verdict's target; only errors above
    1e-14 are used. At least three consecutive usable errors are required.
    """
    if orbit.verdict.kind != "converged":
        raise InsufficientData("orbit did not converge")
    target = orbit.verdict.target
    errs = [abs(z - target) for z in orbit.points]
    pairs = [(a, b) for a, b in zip(errs, errs[1:]) if a > ERROR_FLOOR and b > ERROR_FLOOR]
    if len(pairs) < 2:
        raise InsufficientData(f"only {len(pairs)} usable error pairs above {ERROR_FLOOR}")
    pairs = pairs[-max_pairs:]
    x = np.log([a for a, _ in pairs])
    y = np.log([b for _, b in pairs])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


# -- real-line iteration of NH ------------------------------------------------

def _nh_real(alpha: float, beta: float, t: float) -> float:
    """N_h on the real line, written to stay accurate near the real pole.

    With p = ln(-beta) and s = t - p: h'(t) = -beta expm1(s) and
    h(t) = -beta (expm1(s) - s) + alpha + beta (p - 1).
    """
    if beta < 0:
        p = math.log(-beta)
        s = t - p
        if abs(s) < 30.0:
            em = math.expm1(s)
            shift = alpha + beta * (p - 1.0)
            if abs(em) < 1e-300 or abs(em) < K.TOL_POLE * math.exp(s):
                if shift == 0.0:
                    return t
                raise RealPoleCrossing(f"iterate {t!r} sits on the real pole {p!r}")
            return t - ((em - s) / em - shift / (beta * em))
    if t >= 0.0:
        e = math.exp(-t)
        return (t - 1.0 - alpha * e) / (1.0 + beta * e)
    e = math.exp(t)
    return (e * (t - 1.0) - alpha) / (e + beta)


@dataclass
class RealOrbit:
    points: list
    verdict: str  # monotone | not_monotone | diverged
    limit: float | None = None
    reason: str = ""

    def __str__(self) -> str:
        if self.verdict == "monotone":
            return f"MonotoneTo({self.limit!r})"
        if self.verdict == "diverged":
            return "Diverged"
        return "NotMonotone"


def _is_monotone(xs: list[float], limit: float) -> bool:
    """Monotone up to rounding: steps within a few ulps of the limit are ignored."""
    start = next(i for i, x in enumerate(xs) if abs(x - limit) < 1.0)
    tail = xs[start:]
    noise = MONOTONE_ULPS * math.ulp(max(abs(limit), 1.0))
    diffs = [b - a for a, b in zip(tail, tail[1:]) if abs(b - a) > noise]
    if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
        return False
    dist = [abs(x - limit) for x in tail]
    return all(b <= a + noise for a, b in zip(dist, dist[1:]))


def real_orbit(m: MeromorphicMap, seed: float, max_iter: int = MAX_ITER,
               escape_radius: float = ESCAPE_RADIUS, tol_conv: float = TOL_CONV) -> RealOrbit:
    if m.map_id != "nh" or m.alpha.imag != 0 or m.beta.imag != 0:
        raise ValueError("real_orbit needs nh with real alpha and beta")
    alpha, beta = m.alpha.real, m.beta.real
    x = float(seed)
    xs = [x]
    for _ in range(max_iter):
        try:
            y = _nh_real(alpha, beta, x)
        except OverflowError:
            return RealOrbit(xs, "diverged", reason="overflow")
        if not math.isfinite(y) or abs(y) > escape_radius:
            return RealOrbit(xs, "diverged", reason="escaped")
        xs.append(y)
        if abs(y - x) < tol_conv:
            if _is_monotone(xs, y):
                return RealOrbit(xs, "monotone", y)
            return RealOrbit(xs, "not_monotone", y, reason="sign change near the limit")
        x = y
    return RealOrbit(xs, "not_monotone", reason="no convergence within max_iter")
