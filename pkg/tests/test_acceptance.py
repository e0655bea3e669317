"""Exit criteria 1-9. Each test prints one PASS/FAIL line with its runtime.

Tolerances are written out literally here rather than read from the package,
so a change to a package constant cannot silently relax a criterion.

Run directly for the summary alone: ``python tests/test_acceptance.py``.
"""

import cmath
import contextlib
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from fatoulab.cli import main as cli_main
from fatoulab.mapcat import LAMBDA, MeromorphicMap
from fatoulab.orbit import iterate
from fatoulab.verify import (CASE_EQUAL, CASE_OUTSIDE, CASE_POSITIVE, CASE_STRICT,
                             capture_case, certify_contraction_disk, check_catalog_anchors,
                             check_invariant_line_nf, check_semiconjugacy, check_strip_ng,
                             corollary_c_disks, corollary_e_capture, theorem_b_ratio,
                             theorem_d_winding, winding_calibration)

NF = MeromorphicMap("nf")
NG = MeromorphicMap("ng")
FH = MeromorphicMap("fh")
SEED = 0x5EED
FH_WANDERING_SEED = cmath.log(2 - LAMBDA) + 2j * math.pi


def nf_fatou_seeds(count=10):
    """Fixed-seed points of [-10,10] x [-5,5] whose NF orbit converges."""
    rng = np.random.default_rng(SEED)
    seeds = []
    while len(seeds) < count:
        z = complex(rng.uniform(-10, 10), rng.uniform(-5, 5))
        if iterate(NF, z).verdict.kind == "converged":
            seeds.append(z)
    return seeds


def corollary_e_grid():
    alphas = np.linspace(-6, 6, 21)
    betas = [b for b in np.linspace(-3, 3, 21) if b != 0]
    return [(float(a), float(b)) for a in alphas for b in betas]


def announce(n, ok, elapsed, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s) {detail}"
    capman = _capture_manager[0]
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)
    return ok


_capture_manager = [None]


@pytest.fixture(autouse=True)
def _uncaptured(request):
    _capture_manager[0] = request.config.pluginmanager.getplugin("capturemanager")
    yield


def criterion_1():
    t = time.perf_counter()
    rep = check_semiconjugacy(samples=1000, box=3.0, seed=SEED)
    err = rep.get("abs_error")
    elapsed = time.perf_counter() - t
    worst = max(err)
    bad = sum(e >= 1e-8 for e in err)
    ok = worst < 1e-8 and elapsed < 1.0
    return ok, elapsed, (f"max |exp(FH) - GFH(exp)| = {worst:.3e} (tol 1e-8), {bad}/1000 over; "
                         f"max relative {max(rep.get('rel_error')):.2e}")


def criterion_2():
    t = time.perf_counter()
    rep = check_catalog_anchors(k_max=10)
    elapsed = time.perf_counter() - t
    d1, d2 = max(rep.get("nf_d1")), max(rep.get("nf_d2"))
    res, yoff = max(rep.get("ng_residual")), max(rep.get("ng_y_offset"))
    pole = max(rep.get("nh_pole_error"))
    ok = d1 < 1e-12 and d2 < 1e-10 and res < 1e-8 and yoff < 5e-5 and pole < 1e-10
    return ok, elapsed, (f"|Nf'| {d1:.1e}, |Nf''| {d2:.1e}, |Ng'| {res:.1e}, "
                         f"|y - 0.8814| {yoff:.1e}, pole error {pole:.1e}")


def criterion_3():
    t = time.perf_counter()
    values = {}
    ok = True
    for k in (0, 1, -1, 5, -5):
        rep = certify_contraction_disk(NF, k * math.pi, 0.5)
        ok &= rep.get("certified_sup")[0] < 0.5
        values[k] = rep.get("certified_sup")[0]
    elapsed = time.perf_counter() - t
    spread = max(values.values()) - min(values.values())
    ok = ok and spread <= 1e-12 * values[0] and elapsed < 5.0
    return ok, elapsed, f"certified sup {values[0]!r}, spread over k = {spread:.1e}"


def criterion_4():
    t = time.perf_counter()
    lines = {k: max(check_invariant_line_nf(k, 100).get("re_deviation")) for k in range(-3, 4)}
    strips = {k: check_strip_ng(k, 500, seed=SEED) for k in range(-2, 3)}
    control_line = check_invariant_line_nf(0, 100, offset=0.1)
    control_strip = check_strip_ng(0, 500, half_width=math.pi / 4, seed=SEED)
    elapsed = time.perf_counter() - t
    lines_ok = all(v < 1e-9 for v in lines.values())
    strip_ok = {k: all(v < math.pi / 8 for v in r.get("image_re_offset"))
                and all(v < -math.log(2) / 2 for v in r.get("image_im"))
                and all(v < 0 for v in r.get("drift")) for k, r in strips.items()}
    controls_fail = (max(control_line.get("re_deviation")) >= 1e-9
                     and not control_strip.passed)
    ok = lines_ok and all(strip_ok.values()) and controls_fail and elapsed < 5.0
    failing = [k for k, v in strip_ok.items() if not v]
    detail = (f"lines max dev {max(lines.values()):.1e}; strips failing for k = {failing}; "
              f"controls fail: {controls_fail}")
    if failing:
        detail += f"; e.g. {strips[failing[0]].notes}"
    return ok, elapsed, detail


def criterion_5():
    t = time.perf_counter()
    worst = 0.0
    for z in nf_fatou_seeds():
        rep = corollary_c_disks(NF, z, n_max=30, mode="bounded", ray_count=64)
        worst = max(worst, max(rep.get("radius")))
    ng = corollary_c_disks(NG, 5j, n_max=20, mode="growing", ray_count=64)
    r = ng.get("radius")
    elapsed = time.perf_counter() - t
    ok = worst <= math.pi + 0.1 and r[-1] > r[0] and r[-1] > 3 and elapsed < 120
    return ok, elapsed, (f"NF max radius {worst:.4f} (bound {math.pi + 0.1:.4f}); "
                         f"NG radius {r[0]:.3f} -> {r[-1]:.3f}")


def criterion_6():
    t = time.perf_counter()
    rep = theorem_b_ratio(FH, FH_WANDERING_SEED, n_max=20, local_points=256)
    ratio = rep.get("ratio")
    q = len(ratio) // 4
    first, last = float(np.median(ratio[:q])), float(np.median(ratio[-q:]))
    elapsed = time.perf_counter() - t
    ok = last < first and elapsed < 300
    return ok, elapsed, (f"quartile medians {first!r} -> {last!r} "
                         f"(difference {first - last:.2e})")


def criterion_7():
    t = time.perf_counter()
    rep = theorem_d_winding(0, 1, 100, 8)
    cal = winding_calibration(1)
    elapsed = time.perf_counter() - t
    r = rep.get("r")[0]
    dev, g2, wind = rep.get("gamma1_deviation")[0], rep.get("gamma2_max")[0], rep.get("winding")[0]
    ok = dev < 1e-6 * r and g2 < 0.01 * r and wind != 0 and cal == 1 and elapsed < 5.0
    return ok, elapsed, (f"r = {r:.4f}, |gamma1| dev {dev:.1e}, max |gamma2| {g2:.2e}, "
                         f"winding {wind:g}, calibration {cal}")


def criterion_8():
    t = time.perf_counter()
    bad = []
    counts = {CASE_POSITIVE: 0, CASE_EQUAL: 0, CASE_STRICT: 0, CASE_OUTSIDE: 0}
    for a, b in corollary_e_grid():
        in_region = b > 0 or a <= b * (1 - math.log(-b))
        rep = corollary_e_capture(a, b)
        counts[capture_case(a, b)] += 1
        if in_region and not (rep.get("monotone")[0] == 1 and rep.passed):
            bad.append((a, b))
    anchor = corollary_e_capture(0, 1).get("limit")[0]
    elapsed = time.perf_counter() - t
    ok = not bad and abs(anchor + 0.567143) < 1e-6 and elapsed < 30
    return ok, elapsed, (f"{len(bad)} failing in-region pairs, cases {counts}, "
                         f"(0,1) -> {anchor:.9f}")


def criterion_runs():
    """CLI invocations producing the files of criteria 1-8."""
    runs = [("c1", ["verify", "--check", "semiconjugacy"]),
            ("c2", ["verify", "--check", "anchors"])]
    for k in (0, 1, -1, 5, -5):
        runs.append((f"c3_{k}", ["verify", "--check", "contraction", "--map", "nf",
                                 "--c", f"{k * math.pi!r},0", "--r", "0.5"]))
    for k in range(-3, 4):
        runs.append((f"c4_line{k}", ["verify", "--check", "invariant_line", "--k", str(k)]))
    for k in range(-2, 3):
        runs.append((f"c4_strip{k}", ["verify", "--check", "strip", "--k", str(k)]))
    for i, z in enumerate(nf_fatou_seeds()):
        runs.append((f"c5_nf{i}", ["verify", "--check", "corollary_c", "--map", "nf",
                                   "--seed-z", f"{z.real!r},{z.imag!r}", "--n-max", "30"]))
    runs.append(("c5_ng", ["verify", "--check", "corollary_c", "--map", "ng",
                           "--seed-z", "0,5", "--n-max", "20"]))
    s = FH_WANDERING_SEED
    runs.append(("c6", ["verify", "--check", "theorem_b", "--map", "fh",
                        "--seed-z", f"{s.real!r},{s.imag!r}", "--n-max", "20"]))
    runs.append(("c7", ["verify", "--check", "theorem_d", "--alpha", "0", "--beta", "1",
                        "--M", "100", "--R", "8"]))
    for i, (a, b) in enumerate(corollary_e_grid()):
        runs.append((f"c8_{i}", ["verify", "--check", "corollary_e",
                                 "--alpha", repr(a), "--beta", repr(b)]))
    runs.append(("render_fh", ["render", "--map", "fh", "--res", "96"]))
    return runs


def criterion_9(root: Path):
    t = time.perf_counter()
    runs = criterion_runs()
    blobs = {}
    for w in (1, 8):
        d = root / f"workers{w}"
        d.mkdir(parents=True, exist_ok=True)
        for name, argv in runs:
            out = d / (name + (".png" if argv[0] == "render" else ".json"))
            with contextlib.redirect_stdout(io.StringIO()):
                code = cli_main(argv + ["--workers", str(w), "--out", str(out)])
            if code not in (0, 3):
                return False, time.perf_counter() - t, f"{name} exited {code}"
            blobs.setdefault(name, []).append(out.read_bytes())
    differ = [n for n, (a, b) in blobs.items() if a != b]
    embedded = all(json.loads(b[0])["config"]["check"] for n, b in blobs.items()
                   if n.startswith("c"))
    elapsed = time.perf_counter() - t
    ok = not differ and embedded
    return ok, elapsed, f"{len(runs)} outputs compared, {len(differ)} differ {differ[:3]}"


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, elapsed, detail = CRITERIA[n]()
    assert announce(n, ok, elapsed, detail), detail


def test_criterion_9(tmp_path):
    ok, elapsed, detail = criterion_9(tmp_path)
    assert announce(9, ok, elapsed, detail), detail


if __name__ == "__main__":
    import tempfile

    results = []
    for n, fn in sorted(CRITERIA.items()):
        results.append(announce(n, *fn()))
    with tempfile.TemporaryDirectory() as tmp:
        results.append(announce(9, *criterion_9(Path(tmp))))
    sys.exit(0 if all(results) else 1)
