"""Numerical checks of the quantitative claims about the catalog maps.

Each check returns a :class:`VerificationReport`. A report's ``passed`` flag
is recomputed by :func:`evaluate_pass` from the series and tolerances alone,
so a serialized report can be re-judged without rerunning the check.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import contour
from . import _kernels as K
from .errors import (MarginInconclusive, NoPointsFound, OrbitTooShort, RealPoleCrossing,
                     SetupInfeasible)
from .fatou import boundary_distance, inscribed_disk_radius, label_points
from .mapcat import (GFH_CONST, FH_CONST, MeromorphicMap, Window, deriv_array,
                     evaluate_array, nh_zeros, poles_in_window, singular_points)
from .orbit import IterParams, forward_points, iterate, iterate_with, real_orbit
from .psv import PostsingularCloud, build_cloud, nearest

DEFAULT_SEED = 0x5EED
NF_LINE_TOL = 1e-9
NG_STRIP_HALF_WIDTH = math.pi / 8
NG_STRIP_TOP = -math.log(2.0) / 2
DISK_BOUND = math.pi + 0.1
GROWTH_MIN = 3.0
THEOREM_A_DIST = 0.2
THEOREM_A_MODULUS = 2.0
GAMMA1_REL = 1e-6
GAMMA2_FRAC = 0.01
LIMIT_TOL = 1e-6


@dataclass
class VerificationReport:
    check: str
    map: dict | None
    params: dict
    passed: bool
    tolerances: dict
    series: list = field(default_factory=list)  # [(label, [float, ...]), ...]
    notes: str = ""
    seed: int = DEFAULT_SEED

    def get(self, label: str) -> list:
        for name, values in self.series:
            if name == label:
                return values
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "map": self.map,
            "params": self.params,
            "pass": self.passed,
            "tolerances": self.tolerances,
            "series": [{"label": s, "values": [float(v) for v in vals]} for s, vals in self.series],
            "notes": self.notes,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _make(check, m, params, tolerances, series, notes="", seed=DEFAULT_SEED):
    series = [(s, [float(v) for v in vals]) for s, vals in series]
    rep = VerificationReport(check, m.to_config() if m is not None else None, params,
                             False, tolerances, series, notes, seed)
    rep.passed = evaluate_pass(rep.to_dict())
    return rep


def _median(xs):
    return float(np.median(np.asarray(xs, dtype=float)))


def _pmap(func, items, workers: int = 1) -> list:
    """Ordered map; threads only change scheduling, never the result order."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def evaluate_pass(report: dict) -> bool:
    """The pass rule of every check, reading only series and tolerances."""
    s = {d["label"]: d["values"] for d in report["series"]}
    tol = report["tolerances"]
    check = report["check"]
    if check == "semiconjugacy":
        return max(s["abs_error"]) < tol["abs"]
    if check == "catalog_anchors":
        return (max(s["nf_d1"]) < tol["nf_d1"] and max(s["nf_d2"]) < tol["nf_d2"]
                and max(s["ng_residual"]) < tol["ng_residual"]
                and max(s["ng_y_offset"]) < tol["ng_y"]
                and max(s["nh_pole_error"]) < tol["nh_pole"])
    if check == "invariant_line_nf":
        return max(s["re_deviation"]) < tol["line"]
    if check == "strip_ng":
        return (all(v < tol["half_width"] for v in s["image_re_offset"])
                and all(v < tol["im_top"] for v in s["image_im"])
                and all(v < 0 for v in s["drift"]))
    if check == "contraction_disk":
        certified = s["sampled_sup"][0] + tol["margin_factor"] * s["lipschitz"][0] * s["spacing"][0]
        return certified < tol["threshold"]
    if check == "theorem_b":
        ratio = s["ratio"]
        q = max(1, len(ratio) // 4)
        return _median(ratio[-q:]) < _median(ratio[:q])
    if check == "theorem_a":
        if s.get("precondition", [1])[0] == 0:
            return False
        return (max(s["dist_over_abs"]) <= tol["dist_ratio"]
                and max(s["modulus_ratio"], default=0.0) <= tol["modulus_ratio"])
    if check == "corollary_c":
        r = s["radius"]
        if tol["mode"] == "bounded":
            return all(v <= tol["bound"] for v in r)
        return r[-1] > r[0] and r[-1] > tol["growth_min"]
    if check == "theorem_d":
        r = s["r"][0]
        return (s["gamma1_deviation"][0] < tol["gamma1_rel"] * r
                and s["gamma2_max"][0] < tol["gamma2_frac"] * r
                and s["winding"][0] != 0)
    if check == "corollary_e":
        if s["case"][0] == CASE_OUTSIDE:
            return True
        return (s["monotone"][0] == 1 and s["ordering_ok"][0] == 1
                and abs(s["limit"][0] - s["predicted"][0]) < tol["limit"])
    raise ValueError(f"unknown check {check!r}")


# -- catalog identities ----------------------------------------------------------

def check_semiconjugacy(samples: int = 1000, box: float = 3.0, seed: int = DEFAULT_SEED,
                        tol: float = 1e-8) -> VerificationReport:
    """|exp(FH(z)) - GFH(exp z)| on random points of [-box, box]^2."""
    rng = np.random.default_rng(seed)
    z = rng.uniform(-box, box, samples) + 1j * rng.uniform(-box, box, samples)
    fz, _ = evaluate_array(MeromorphicMap("fh"), z)
    gw, _ = evaluate_array(MeromorphicMap("gfh"), np.exp(z))
    lhs = np.exp(fz)
    err = np.abs(lhs - gw)
    rel = err / np.maximum(np.abs(gw), 1e-300)
    n_bad = int(np.sum(err >= tol))
    notes = (f"max |g| = {float(np.max(np.abs(gw))):.3e}; max relative error "
             f"{float(np.max(rel)):.3e}; {n_bad} of {samples} points at or above {tol}")
    return _make("semiconjugacy", MeromorphicMap("fh"),
                 {"samples": samples, "box": box, "fh_const": [FH_CONST.real, FH_CONST.imag],
                  "gfh_const": [GFH_CONST.real, GFH_CONST.imag]},
                 {"abs": tol}, [("abs_error", err), ("rel_error", rel)], notes, seed)


def check_catalog_anchors(k_max: int = 10) -> VerificationReport:
    """Derivatives at the NF fixed points, NG critical points, NH(0, 1) poles."""
    nf, ng, nh = MeromorphicMap("nf"), MeromorphicMap("ng"), MeromorphicMap.nh(0, 1)
    ks = np.arange(-k_max, k_max + 1)
    fixed = ks * math.pi + 0j
    d1, _ = deriv_array(nf, fixed, 1)
    d2, _ = deriv_array(nf, fixed, 2)
    span = (k_max + 1) * math.pi
    crit = singular_points(ng, Window(-span, -2.0, span, 2.0)).critical_points
    res, _ = deriv_array(ng, np.array(crit), 1)
    y_off = [abs(abs(c.imag) - 0.8814) for c in crit]
    poles = poles_in_window(nh, Window(-1.0, -7.0, 1.0, 7.0))
    pole_err = [min(abs(p - 1j * math.pi), abs(p + 1j * math.pi)) for p in poles]
    if len(poles) != 2:
        pole_err.append(math.inf)
    pole_err = [min(v, 1e300) for v in pole_err]
    return _make("catalog_anchors", None, {"k_max": k_max},
                 {"nf_d1": 1e-12, "nf_d2": 1e-10, "ng_residual": 1e-8, "ng_y": 5e-5,
                  "nh_pole": 1e-10},
                 [("nf_d1", np.abs(d1)), ("nf_d2", np.abs(d2)), ("ng_residual", np.abs(res)),
                  ("ng_y_offset", y_off), ("nh_pole_error", pole_err)],
                 f"NG critical heights {math.asinh(1.0)!r}; NH(0,1) poles {poles}")


# -- invariant structures -----------------------------------------------------

def check_invariant_line_nf(k: int, samples: int, offset: float = 0.0) -> VerificationReport:
    """Re N_f stays on the vertical line through the pole pi/2 + k pi.

    ``offset`` shifts the sampled line off the pole line (control case).
    """
    if samples < 10:
        raise ValueError("samples must be >= 10")
    m = MeromorphicMap("nf")
    x = math.pi / 2 + k * math.pi + offset
    t = np.linspace(-20.0, 20.0, samples)
    t = t[np.abs(t) >= 0.01]
    vals, status = evaluate_array(m, x + 1j * t)
    dev = np.where(status == K.OK, np.abs(vals.real - x), np.inf)
    dev = np.minimum(dev, 1e300)
    notes = "" if offset == 0 else f"control line shifted by {offset}"
    return _make("invariant_line_nf", m, {"k": k, "samples": samples, "offset": offset},
                 {"line": NF_LINE_TOL}, [("t", t), ("re_deviation", dev)], notes)


def check_strip_ng(k: int, samples: int, half_width: float = NG_STRIP_HALF_WIDTH,
                   seed: int = DEFAULT_SEED) -> VerificationReport:
    """Closed strip S_k maps into the open strip; Im decreases on the half-line s_k^-."""
    m = MeromorphicMap("ng")
    rng = np.random.default_rng(seed)
    center = math.pi / 2 + k * math.pi
    xs = center + rng.uniform(-half_width, half_width, samples)
    ys = rng.uniform(-20.0, NG_STRIP_TOP, samples)
    w, _ = evaluate_array(m, xs + 1j * ys)
    off = np.abs(w.real - center)
    line_y = rng.uniform(-15.0, -0.01, samples)
    lw, _ = evaluate_array(m, center + 1j * line_y)
    drift = lw.imag - line_y
    bad = np.nonzero((off >= half_width) | (w.imag >= NG_STRIP_TOP))[0]
    notes = []
    if len(bad):
        i = bad[0]
        notes.append(f"first strip violation at z={complex(xs[i], ys[i])!r} -> {complex(w[i])!r}")
    bad = np.nonzero(drift >= 0)[0]
    if len(bad):
        notes.append(f"first drift violation at Im={line_y[bad[0]]!r}")
    return _make("strip_ng", m, {"k": k, "samples": samples},
                 {"half_width": half_width, "im_top": NG_STRIP_TOP},
                 [("image_re_offset", off), ("image_im", w.imag), ("drift", drift)],
                 "; ".join(notes), seed)


# -- contraction disks --------------------------------------------------------

def _disk_cover(c: complex, r: float, grid_n: int):
    h = 2 * r / (grid_n - 1)
    u = np.linspace(-r, r, grid_n)
    pts = (u[None, :] + 1j * u[:, None]).ravel()
    pts = pts[np.abs(pts) <= r + h / math.sqrt(2)]
    return c + pts, h


def nh_contraction_radius(m: MeromorphicMap, c, grid_n: int = 101) -> float:
    """r = 1/C with C the sampled sup of |N_h''| on the unit disk around c (C >= 1)."""
    pts, _ = _disk_cover(complex(c), 1.0, grid_n)
    d2, st = deriv_array(m, pts, 2)
    if (st != K.OK).any():
        raise MarginInconclusive(None)
    return 1.0 / max(1.0, float(np.max(np.abs(d2))))


def certify_contraction_disk(m: MeromorphicMap, c, r: float, grid_n: int = 201
                             ) -> VerificationReport:
    """Certify sup |f'| on the disk D(c, r) below 1/2 (NF) or 1 (other maps).

    The sup is sampled on a grid of spacing h covering the disk and padded by
    2 L h, with L the sampled sup of |f''|.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    c = complex(c)
    pts, h = _disk_cover(c, r, grid_n)
    d1, s1 = deriv_array(m, pts, 1)
    d2, s2 = deriv_array(m, pts, 2)
    threshold = 0.5 if m.map_id == "nf" else 1.0
    if (s1 != K.OK).any() or (s2 != K.OK).any():
        sup, lip = math.inf, math.inf
    else:
        sup, lip = float(np.max(np.abs(d1))), float(np.max(np.abs(d2)))
    sup, lip = min(sup, 1e300), min(lip, 1e300)
    tol = {"threshold": threshold, "margin_factor": 2.0}
    certified = sup + 2.0 * lip * h
    rep = _make("contraction_disk", m, {"c": [c.real, c.imag], "r": r, "grid_n": grid_n}, tol,
                [("sampled_sup", [sup]), ("lipschitz", [lip]), ("spacing", [h]),
                 ("certified_sup", [certified])],
                f"certified sup |f'| = {certified!r} on D(c, {r})")
    if sup < threshold <= certified:
        raise MarginInconclusive(rep)
    return rep


# -- theorem_b: postsingular vs boundary distance ------------------------------

def theorem_b_ratio(m: MeromorphicMap, seed, n_max: int = 20, cloud_depth: int = 12,
                    local_points: int = 256, cloud_half_width: float = 4.0,
                    r_max: float = 2.0, iter_params: IterParams | None = None,
                    workers: int = 1) -> VerificationReport:
    """Ratio of postsingular distance to boundary distance along an orbit.

    a_n is the distance from f^n(seed) to the nearest point of a depth
    ``cloud_depth`` cloud on a window centred there; b_n is the ray-search
    boundary distance, with ``local_points`` initial samples per point
    (32 rays). Undecided points form their own class, which is how the lifted
    Siegel components of FH are seen.
    """
    seed = complex(seed)
    params = iter_params or IterParams.for_map(m)
    run = iterate(m, seed, max_iter=n_max, escape_radius=params.escape_radius,
                  tol_conv=params.tol_conv)
    vacuous = run.verdict.kind == "converged"
    if run.verdict.kind in ("escaped", "pole") and run.verdict.step < n_max / 2:
        raise OrbitTooShort(f"verdict {run.verdict} before n_max/2")
    orbit = forward_points(m, seed, n_max)
    if len(orbit) < n_max + 1:
        raise OrbitTooShort(f"orbit stopped after {len(orbit) - 1} steps")
    rays = 32
    samples = max(2, local_points // rays)

    def step(n):
        z = orbit[n]
        cloud = build_cloud(m, Window.around(z, cloud_half_width), cloud_depth)
        a_n = nearest(cloud, z)[1] if len(cloud) else cloud_half_width
        b_n = boundary_distance(m, z, params, ray_count=rays, r_max=r_max, samples=samples,
                                allow_undecided=True).distance
        return a_n, b_n

    ns = list(range(1, n_max + 1))
    a, b = zip(*_pmap(step, ns, workers))
    ratio = [x / y for x, y in zip(a, b)]
    notes = "orbit converges: trend test is vacuous" if vacuous else ""
    return _make("theorem_b", m,
                 {"seed": [seed.real, seed.imag], "n_max": n_max, "cloud_depth": cloud_depth,
                  "local_points": local_points, "cloud_half_width": cloud_half_width,
                  "r_max": r_max},
                 {"trend": "last-quartile median < first-quartile median"},
                 [("n", ns), ("a", a), ("b", b), ("ratio", ratio), ("vacuous", [int(vacuous)])],
                 notes)


# -- theorem_a: postsingular points near circles -------------------------------

def _escape_proxy_distance(m, p, anchor, params, samples=64, depth=40):
    """Distance from p to the first escaping point on the segment p -> anchor."""
    codes, _ = label_points(m, np.array([p]), params)
    if codes[0] == K.ESCAPED:
        return 0.0
    s = np.linspace(0.0, 1.0, samples + 1)[1:]
    codes, _ = label_points(m, p + s * (anchor - p), params)
    hits = np.nonzero(codes == K.ESCAPED)[0]
    if not len(hits):
        return abs(anchor - p)
    i = hits[0]
    lo, hi = (s[i - 1] if i > 0 else 0.0), s[i]
    for _ in range(depth):
        mid = 0.5 * (lo + hi)
        c, _ = label_points(m, np.array([p + mid * (anchor - p)]), params)
        if c[0] == K.ESCAPED:
            hi = mid
        else:
            lo = mid
    return hi * abs(anchor - p)


def theorem_a_scan(m: MeromorphicMap, baker_seed, radii=(5.0, 1.3, 11), cloud_depth: int = 12,
                   cloud: PostsingularCloud | None = None,
                   iter_params: IterParams | None = None) -> VerificationReport:
    """Postsingular points near circles |z| = r_j and their escape-region distance.

    ``radii`` is (r0, ratio, count) for r_j = r0 ratio^j. For each r_j the
    cloud point nearest the circle is taken from the annulus
    r_j / sqrt(ratio) <= |p| <= r_j sqrt(ratio); its distance to the escaping
    region is measured along the segment to the last point of the seed's
    orbit (an overestimate of dist(p, U)).
    """
    baker_seed = complex(baker_seed)
    params = iter_params or IterParams.for_map(m)
    r0, q, count = radii
    rs = [r0 * q ** j for j in range(int(count))]
    run = iterate_with(m, baker_seed, params)
    call = {"baker_seed": [baker_seed.real, baker_seed.imag], "radii": [r0, q, int(count)],
            "cloud_depth": cloud_depth}
    tol = {"dist_ratio": THEOREM_A_DIST, "modulus_ratio": THEOREM_A_MODULUS}
    if run.verdict.kind != "escaped":
        return _make("theorem_a", m, call, tol,
                     [("precondition", [0]), ("dist_over_abs", [1e300]),
                      ("modulus_ratio", [1e300])],
                     f"precondition violated: seed verdict is {run.verdict}, not Escaped")
    if cloud is None:
        half = rs[-1] * math.sqrt(q) * 1.05
        cloud = build_cloud(m, Window(-half, -half, half, half), cloud_depth)
    pts = np.asarray(cloud.points, dtype=np.complex128)
    mods = np.abs(pts)
    tail = complex(run.points[-1])
    found, dist_ratio = [], []
    for r in rs:
        inside = np.nonzero((mods >= r / math.sqrt(q)) & (mods <= r * math.sqrt(q)))[0]
        if not len(inside):
            raise NoPointsFound(f"no postsingular point in the annulus around |z| = {r}")
        i = inside[np.argmin(np.abs(mods[inside] - r))]
        p = complex(pts[i])
        d = _escape_proxy_distance(m, p, tail, params)
        found.append(p)
        dist_ratio.append(d / abs(p))
    mod_ratio = [abs(found[j + 1] / found[j]) for j in range(len(found) - 1)]
    return _make("theorem_a", m, call, tol,
                 [("radius", rs), ("abs_p", [abs(p) for p in found]),
                  ("dist_over_abs", dist_ratio), ("modulus_ratio", mod_ratio)],
                 "targets |p_(j+1)/p_j| -> 1; the conflicting "
                 "'-> infinity' form is flagged as a likely typo")


# -- corollary_c: inscribed disks along orbits --------------------------------

def corollary_c_disks(m: MeromorphicMap, seed, n_max: int = 30, mode: str | None = None,
                      r_max: float | None = None, ray_count: int = 64, samples: int = 64,
                      iter_params: IterParams | None = None, workers: int = 1
                      ) -> VerificationReport:
    """Inscribed disk radii along an orbit.

    mode "bounded": every radius must stay <= pi + 0.1. mode "growing": the
    last radius must exceed the first and 3. By default NG seeds that escape
    use "growing" and everything else "bounded".
    """
    seed = complex(seed)
    params = iter_params or IterParams.for_map(m)
    run = iterate_with(m, seed, params)
    if mode is None:
        mode = "growing" if (m.map_id == "ng" and run.verdict.kind == "escaped") else "bounded"
    if r_max is None:
        r_max = 64.0 if mode == "growing" else 4.0
    orbit = forward_points(m, seed, n_max)
    # converged orbits repeat their limit; each distinct point is measured once
    distinct = list(dict.fromkeys(orbit))

    def disk(z):
        d = inscribed_disk_radius(m, z, params, r_max=r_max, ray_count=ray_count,
                                  samples=samples, allow_undecided=True)
        return d.distance, d.lower_bound

    memo = dict(zip(distinct, _pmap(disk, distinct, workers)))
    ns = list(range(len(orbit)))
    radii = [memo[z][0] for z in orbit]
    lower = [int(memo[z][1]) for z in orbit]
    vacuous = len(set(radii)) == 1
    notes = "radii constant along the orbit: vacuous" if vacuous else ""
    return _make("corollary_c", m,
                 {"seed": [seed.real, seed.imag], "n_max": n_max, "r_max": r_max,
                  "ray_count": ray_count, "samples": samples},
                 {"mode": mode, "bound": DISK_BOUND, "growth_min": GROWTH_MIN},
                 [("n", ns), ("radius", radii), ("lower_bound", lower)], notes)


# -- theorem_d: winding of a segment image ------------------------------------

@dataclass(frozen=True)
class WindingSetup:
    R: float
    M: float
    l: int
    z0: complex
    zeta: complex
    p: float
    q: float
    r: float

    @classmethod
    def build(cls, beta: complex, M: float, R: float) -> "WindingSetup":
        b = abs(beta)
        try:
            scale = M * math.exp(R) / (2 * math.pi)
        except OverflowError:
            raise SetupInfeasible("M e^R overflows") from None
        # beyond 2^52 the vertical segment can no longer be resolved in double
        if not math.isfinite(scale) or scale > 2.0 ** 52:
            raise SetupInfeasible(f"l = ceil({scale!r}) is out of range")
        l = max(1, math.ceil(scale))
        z0 = complex(R, 2 * l * math.pi)
        zeta = z0 / (math.exp(2 * R) / b ** 2 - 1)
        r = abs(z0) / (math.exp(R) / b - b * math.exp(-R))
        return cls(R, M, l, z0, zeta, math.log(3 * b * M), 0.0, r)


def _segment_crossings(p0, p1, q0, q1):
    """Parameters (s, u) of proper crossings of segment p0p1 with each q0q1."""
    d1 = p1 - p0
    d2 = q1 - q0
    den = d1.real * d2.imag - d1.imag * d2.real
    w = q0 - p0
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (w.real * d2.imag - w.imag * d2.real) / den
        u = (w.real * d1.imag - w.imag * d1.real) / den
    ok = (den != 0) & (s >= 0) & (s < 1) & (u >= 0) & (u < 1)
    return ok, s, u


def first_loop(curve) -> np.ndarray | None:
    """Closed sub-loop of an open polyline at its first self-crossing."""
    pts = np.asarray(curve, dtype=np.complex128)
    n = len(pts)
    for i in range(n - 3):
        ok, s, _ = _segment_crossings(pts[i], pts[i + 1], pts[i + 2:-1], pts[i + 3:])
        hit = np.nonzero(ok)[0]
        if len(hit):
            j = i + 2 + hit[0]
            x = pts[i] + s[hit[0]] * (pts[i + 1] - pts[i])
            return np.concatenate([[x], pts[i + 1:j + 1]])
    return None


def loop_winding(curve, center, closed: bool = False) -> int:
    """Winding number about ``center``: of the curve itself when closed,
    otherwise of its first self-crossing loop (0 when it never crosses itself)."""
    if closed:
        return contour.winding_number(curve, center)
    loop = first_loop(curve)
    if loop is None:
        return 0
    return contour.winding_number(loop, center)


def winding_calibration(orientation: int = 1, samples: int = 4096) -> int:
    t = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
    return loop_winding(np.exp(1j * orientation * t), 0j, closed=True)


def theorem_d_winding(alpha, beta, M: float, R: float, samples: int = 8192) -> VerificationReport:
    """Image of the vertical segment z0 + it, |t| <= 3 pi, under N_h winds around z0."""
    m = MeromorphicMap.nh(alpha, beta)
    alpha, beta = m.alpha, m.beta
    samples = max(samples, 4096)
    st = WindingSetup.build(beta, M, R)
    t = np.linspace(-3 * math.pi, 3 * math.pi, samples)
    eta = st.z0 + 1j * t
    image, status = evaluate_array(m, eta)
    if (status != K.OK).any():
        raise SetupInfeasible("the segment meets a pole of N_h")
    gamma = image - st.z0 + 1 - st.zeta
    e = np.exp(st.R + 1j * t)
    gamma2 = (beta - alpha - 1j * beta * t) / (beta + e)
    gamma1 = gamma - gamma2 - 1j * t
    dev = float(np.max(np.abs(np.abs(gamma1) - st.r)))
    g2 = float(np.max(np.abs(gamma2)))
    turns = contour.accumulated_argument(image, st.z0) / (2 * math.pi)
    wind = loop_winding(image, st.z0)
    return _make("theorem_d", m,
                 {"M": M, "R": R, "samples": samples, "l": st.l,
                  "z0": [st.z0.real, st.z0.imag], "zeta": [st.zeta.real, st.zeta.imag],
                  "p": st.p, "q": st.q},
                 {"gamma1_rel": GAMMA1_REL, "gamma2_frac": GAMMA2_FRAC},
                 [("r", [st.r]), ("gamma1_deviation", [dev]), ("gamma2_max", [g2]),
                  ("winding", [wind]), ("accumulated_turns", [turns])],
                 "winding of the first self-crossing loop of N_h(eta) about z0; "
                 "the 0.01 r smallness threshold is a chosen convention")


# -- corollary_e: real capture of the asymptotic value -------------------------

CASE_POSITIVE, CASE_EQUAL, CASE_STRICT, CASE_OUTSIDE = 0, 1, 2, 3
CASE_NAMES = {CASE_POSITIVE: "beta>0", CASE_EQUAL: "equality", CASE_STRICT: "strict",
              CASE_OUTSIDE: "outside"}
# relative slack under which alpha counts as sitting on the boundary curve
BOUNDARY_REL = 1e-12


def capture_case(alpha: float, beta: float) -> int:
    if beta == 0:
        raise ValueError("beta must be nonzero")
    if beta > 0:
        return CASE_POSITIVE
    edge = beta * (1 - math.log(-beta))
    if abs(alpha - edge) <= BOUNDARY_REL * max(1.0, abs(edge)):
        return CASE_EQUAL
    return CASE_STRICT if alpha < edge else CASE_OUTSIDE


def _real_zeros(alpha: float, beta: float) -> list[float]:
    h = lambda t: math.exp(t) + beta * t + alpha
    if beta > 0:
        lo, hi = -1.0, 1.0
        while h(lo) > 0:
            lo *= 2
        while h(hi) < 0:
            hi *= 2
        return [brentq(h, lo, hi, xtol=1e-15)]
    p = math.log(-beta)
    lo = p - 1.0
    while h(lo) < 0:
        lo = p - 2 * (p - lo)
    hi = p + 1.0
    while h(hi) < 0:
        hi = p + 2 * (hi - p)
    return [brentq(h, lo, p, xtol=1e-15),
            brentq(h, p, hi, xtol=1e-15)]


def corollary_e_capture(alpha: float, beta: float) -> VerificationReport:
    """Real orbit of the asymptotic value u = -alpha/beta under N_h."""
    alpha, beta = float(alpha), float(beta)
    case = capture_case(alpha, beta)
    m = MeromorphicMap.nh(alpha, beta)
    u = -alpha / beta
    call = {"alpha": alpha, "beta": beta}
    tol = {"limit": LIMIT_TOL}
    if case == CASE_OUTSIDE:
        return _make("corollary_e", m, call, tol,
                     [("case", [case]), ("u", [u]), ("limit", [0.0]), ("predicted", [0.0]),
                      ("monotone", [0]), ("ordering_ok", [0])],
                     "outside the parameter region: no claim, vacuous pass")
    if case == CASE_POSITIVE:
        c0 = _real_zeros(alpha, beta)[0]
        # h(u) = e^u > 0 puts u above c0; they agree in double once e^u underflows
        predicted, ordering = c0, u >= c0
    elif case == CASE_EQUAL:
        predicted, ordering = 1 - alpha / beta, True
    else:
        c0, c1 = _real_zeros(alpha, beta)
        p = math.log(-beta)
        predicted, ordering = c0, (c0 < p < c1) and u < c0
    notes = CASE_NAMES[case]
    try:
        ro = real_orbit(m, u)
        monotone = ro.verdict == "monotone"
        limit = ro.limit if ro.limit is not None else math.nan
        notes += f"; {ro}"
    except RealPoleCrossing as exc:
        monotone, limit = False, math.nan
        notes += f"; {exc}"
    if not math.isfinite(limit):
        limit = 1e300
    return _make("corollary_e", m, call, tol,
                 [("case", [case]), ("u", [u]), ("limit", [limit]), ("predicted", [predicted]),
                  ("monotone", [int(monotone)]), ("ordering_ok", [int(ordering)])], notes)


def nh_contraction_center(m: MeromorphicMap) -> complex:
    """Zero of h with the smallest modulus (a superattracting fixed point of N_h)."""
    roots = [z for z, mult in nh_zeros(m.alpha, m.beta, Window(-8, -8, 8, 8)) if mult == 1]
    return min(roots, key=lambda z: (abs(z), z.real, z.imag))


CHECKS = ("invariant_line", "strip", "contraction", "theorem_b", "theorem_a",
          "corollary_c", "theorem_d", "corollary_e")
