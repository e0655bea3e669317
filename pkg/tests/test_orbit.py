import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fatoulab.errors import InsufficientData, RealPoleCrossing
from fatoulab.mapcat import MeromorphicMap, evaluate
from fatoulab.orbit import (MAX_STORED, IterParams, convergence_order, iterate, orbit_csv,
                            real_orbit)

NF = MeromorphicMap("nf")
NG = MeromorphicMap("ng")
NH01 = MeromorphicMap.nh(0, 1)


def _mp_error_table(f, z0, target, steps, dps=80):
    mp.mp.dps = dps
    z = mp.mpc(z0)
    errs = []
    for _ in range(steps):
        errs.append(abs(z - target))
        z = f(z)
    return errs


@pytest.mark.parametrize("k", [-3, 0, 1, 4])
def test_fixed_seed_converges_at_step_zero(k):
    o = iterate(NF, k * math.pi)
    assert o.verdict.kind == "converged" and o.verdict.step == 0 and o.verdict.period == 1
    assert o.verdict.target == pytest.approx(k * math.pi, abs=1e-12)


def test_pole_seed():
    o = iterate(NF, math.pi / 2)
    assert str(o.verdict) == "PoleHit(0)"
    assert o.points == [math.pi / 2]


def test_ng_lower_half_line_drifts_down():
    # Im decreases at every step, but only by ~2 e^{2 Im z}: the orbit cannot
    # reach any escape radius within max_iter
    o = iterate(NG, math.pi / 2 - 5j)
    ims = [z.imag for z in o.points]
    assert all(b < a for a, b in zip(ims, ims[1:]))
    assert all(abs(z.real - math.pi / 2) < 1e-9 for z in o.points)
    assert o.verdict.kind == "undecided"
    assert -6 < ims[-1] < -5


def test_ng_upper_half_plane_escapes():
    o = iterate(NG, 5j, escape_radius=1e3)
    assert o.verdict.kind == "escaped"
    assert IterParams.for_map(NG).escape_radius == 1e3


def test_nf_convergence_order_cubic():
    o = iterate(NF, math.pi + 0.1)
    assert 2.7 <= convergence_order(o) <= 3.3
    # brute-force error table in high precision: e_{n+1} ~ (2/3) e_n^3
    mp.mp.dps = 60
    errs = _mp_error_table(lambda z: z - mp.tan(z), math.pi + 0.1, mp.pi, 4, dps=60)
    rho = float(mp.log(errs[2] / errs[1]) / mp.log(errs[1] / errs[0]))
    assert 2.7 <= rho <= 3.3
    rho2 = float(mp.log(errs[3] / errs[2]) / mp.log(errs[2] / errs[1]))
    assert 2.95 <= rho2 <= 3.05


def test_nh_convergence_order_quadratic():
    o = iterate(NH01, -1.2 + 0.3j)
    assert o.verdict.target == pytest.approx(-0.5671432904097838, abs=1e-12)
    assert 1.8 <= convergence_order(o) <= 2.6


def test_convergence_order_needs_data():
    with pytest.raises(InsufficientData):
        convergence_order(iterate(NF, 0.0))
    with pytest.raises(InsufficientData):
        convergence_order(iterate(NG, 5j, escape_radius=1e3))


def test_real_orbit_cases():
    r = real_orbit(NH01, 0.0)
    # oracle: the real root of e^x + x is -W(1)
    c0 = float(-mp.lambertw(1))
    assert r.verdict == "monotone" and r.limit == pytest.approx(c0, abs=1e-9)
    r = real_orbit(MeromorphicMap.nh(-1, -1), -1.0)
    assert str(r).startswith("MonotoneTo") and abs(r.limit) < 1e-9


def test_real_orbit_pole_seed():
    # beta = -1: the real pole sits at ln 1 = 0
    with pytest.raises(RealPoleCrossing):
        real_orbit(MeromorphicMap.nh(-5, -1), 0.0)


def test_real_orbit_rejects_complex_params():
    with pytest.raises(ValueError):
        real_orbit(MeromorphicMap.nh(1j, 1), 0.0)


def test_stored_points_are_thinned():
    o = iterate(NG, math.pi / 2 - 3j, max_iter=6000)
    assert len(o.points) == MAX_STORED
    assert o.dropped == 6001 - MAX_STORED
    steps = o.steps()
    assert steps[0] == 0 and steps[-1] == 6000 and len(steps) == MAX_STORED


def test_orbit_csv():
    text = orbit_csv(iterate(NF, 0.1))
    lines = text.strip().split("\n")
    assert lines[0] == "n,re,im,abs,verdict"
    assert lines[-1].endswith("ConvergedTo(0+0j,1)")
    assert all(line.endswith(",") for line in lines[1:-1])


seeds = st.builds(complex, st.floats(-4, 4), st.floats(-4, 4))


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 40), st.integers(1, 40))
def test_prefix_property(z, m1, extra):
    for m in (NF, NG, NH01):
        a = iterate(m, z, max_iter=m1)
        b = iterate(m, z, max_iter=m1 + extra)
        if a.verdict.kind == "undecided":
            assert b.points[: len(a.points)] == a.points
        else:
            assert a.points == b.points and a.verdict == b.verdict


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_orbit_recurrence_and_determinism(z):
    for m in (NF, NH01):
        o = iterate(m, z, max_iter=200)
        assert o.points[0] == z
        for a, b in zip(o.points, o.points[1:]):
            assert b == evaluate(m, a)
        assert iterate(m, z, max_iter=200) == o
        if o.verdict.kind == "converged":
            t = o.verdict.target
            assert abs(o.points[-1] - t) < 1e-10
            if o.verdict.period == 1:
                assert abs(evaluate(m, t) - t) < 10 * o.iter_params.tol_conv


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.floats(-15, -0.05))
def test_ng_vertical_half_lines(k, y):
    x = math.pi / 2 + k * math.pi
    o = iterate(NG, complex(x, y), max_iter=50)
    ims = np.array([z.imag for z in o.points])
    steps = np.diff(ims)
    # the downward drift is about 2 e^{2 Im z}; once that is below one ulp of
    # Im z the orbit stalls in double precision
    assert steps[0] < 0 and np.all(steps <= 0)
    resolvable = 2 * np.exp(2 * ims[:-1]) > 4 * np.spacing(np.abs(ims[:-1]))
    assert np.all(steps[resolvable] < 0)
    assert all(abs(z.real - x) < 1e-9 for z in o.points)
