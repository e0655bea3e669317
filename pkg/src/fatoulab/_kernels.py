"""Compiled evaluation and iteration kernels.

Every numeric path in the package (scalar evaluation, orbit recording, grid
classification, ray bisection) goes through these functions, so a pixel label
and a recorded orbit from the same seed always agree bit for bit.
"""

import cmath
import math

import numpy as np
from numba import njit

NF, NG, NH, FH, GFH = 0, 1, 2, 3, 4

OK, POLE, OVERFLOW = 0, 1, 2

CONVERGED, ESCAPED, POLE_HIT, UNDECIDED = 0, 1, 2, 3

TOL_POLE = 1e-12
# exp() overflows just above 709.78
EXP_LIMIT = 700.0
# |multiplier| must stay this far below 1 for a close return to count
ATTRACTING_MARGIN = 1e-6
MAX_PERIOD = 8


@njit(cache=True, nogil=True)
def _tan(z):
    x = z.real
    y = z.imag
    if abs(y) < 20.0:
        s = complex(math.sin(x) * math.cosh(y), math.cos(x) * math.sinh(y))
        c = complex(math.cos(x) * math.cosh(y), -math.sin(x) * math.sinh(y))
        return s / c
    e = math.exp(-2.0 * abs(y))
    sech = 2.0 * e / (1.0 + e * e)
    den = 1.0 + math.cos(2.0 * x) * sech
    im = math.tanh(2.0 * abs(y)) / den
    if y < 0.0:
        im = -im
    return complex(math.sin(2.0 * x) * sech / den, im)


@njit(cache=True, nogil=True)
def _near_cos_zero(z):
    if abs(z.imag) >= 1.0:
        return False
    x = z.real
    y = z.imag
    c = complex(math.cos(x) * math.cosh(y), -math.sin(x) * math.sinh(y))
    return abs(c) < TOL_POLE


@njit(cache=True, nogil=True)
def map_eval(code, prm, z):
    """Return (value, status) for one point."""
    if code == NF:
        if _near_cos_zero(z):
            return 0j, POLE
        return z - _tan(z), OK
    if code == NG:
        if _near_cos_zero(z):
            return 0j, POLE
        return z + 1j + _tan(z), OK
    if code == NH:
        alpha = prm[0]
        beta = prm[1]
        if z.real >= 0.0:
            e = cmath.exp(-z)
            num = z - 1.0 - alpha * e
            den = 1.0 + beta * e
            small = abs(den) < TOL_POLE
        else:
            e = cmath.exp(z)
            num = e * (z - 1.0) - alpha
            den = e + beta
            small = abs(den) < TOL_POLE * abs(e)
        if small:
            # removable singularity at the double root of h
            if prm[3].real > 0.5 and abs(z - prm[2]) < 1e-6:
                return prm[2] + 0.5 * (z - prm[2]), OK
            return 0j, POLE
        return num / den, OK
    if code == FH:
        if z.real > EXP_LIMIT:
            return 0j, OVERFLOW
        return prm[0] + 2.0 * z - cmath.exp(z), OK
    # GFH
    if z.real < -EXP_LIMIT:
        return 0j, OVERFLOW
    return prm[0] * z * z * cmath.exp(-z), OK


@njit(cache=True, nogil=True)
def map_deriv(code, prm, z, order):
    """First (order=1) or second (order=2) derivative, with status."""
    if code == NF or code == NG:
        if _near_cos_zero(z):
            return 0j, POLE
        t = _tan(z)
        if order == 1:
            if code == NF:
                return -t * t, OK
            return 2.0 + t * t, OK
        d2 = 2.0 * t * (1.0 + t * t)
        if code == NF:
            return -d2, OK
        return d2, OK
    if code == NH:
        alpha = prm[0]
        beta = prm[1]
        if z.real >= 0.0:
            e = cmath.exp(-z)
            hn = 1.0 + (beta * z + alpha) * e  # h / e^z
            dn = 1.0 + beta * e  # h' / e^z
            small = abs(dn) < TOL_POLE
            if not small:
                if order == 1:
                    return hn / (dn * dn), OK
                return 1.0 / dn + hn / (dn * dn) - 2.0 * hn / (dn * dn * dn), OK
        else:
            e = cmath.exp(z)
            h = e + beta * z + alpha
            dn = e + beta
            small = abs(dn) < TOL_POLE * abs(e)
            if not small:
                if order == 1:
                    return h * e / (dn * dn), OK
                return (e / dn + h * e / (dn * dn)
                        - 2.0 * h * e * e / (dn * dn * dn)), OK
        if prm[3].real > 0.5 and abs(z - prm[2]) < 1e-6:
            if order == 1:
                return 0.5 + 0j, OK
            return 0j, POLE
        return 0j, POLE
    if code == FH:
        if z.real > EXP_LIMIT:
            return 0j, OVERFLOW
        e = cmath.exp(z)
        if order == 1:
            return 2.0 - e, OK
        return -e, OK
    if z.real < -EXP_LIMIT:
        return 0j, OVERFLOW
    e = prm[0] * cmath.exp(-z)
    if order == 1:
        return e * z * (2.0 - z), OK
    return e * (2.0 - 4.0 * z + z * z), OK


@njit(cache=True, nogil=True)
def _finite(z):
    return math.isfinite(z.real) and math.isfinite(z.imag)


@njit(cache=True, nogil=True)
def run_orbit(code, prm, z0, max_iter, escape_radius, tol, out):
    """Iterate from z0 and return (verdict, step, period, target, n_stored).

    When ``out`` is non-empty every iterate is written to it; it must hold
    at least max_iter + 1 entries.
    """
    record = out.shape[0] > 0
    if record:
        out[0] = z0
    if not _finite(z0) or abs(z0) > escape_radius:
        return ESCAPED, 0, 0, z0, 1
    ring = np.empty(MAX_PERIOD, dtype=np.complex128)
    # derivatives at ring entries, computed on first use
    dring = np.empty(MAX_PERIOD, dtype=np.complex128)
    dstate = np.zeros(MAX_PERIOD, dtype=np.int8)  # 0 unknown, 1 ok, 2 bad
    ring[0] = z0
    filled = 1
    z = z0
    for n in range(max_iter):
        w, st = map_eval(code, prm, z)
        if st == POLE:
            return POLE_HIT, n, 0, z, n + 1
        if st == OVERFLOW or not _finite(w):
            return ESCAPED, n + 1, 0, z, n + 1
        if record:
            out[n + 1] = w
        if abs(w) > escape_radius:
            return ESCAPED, n + 1, 0, w, n + 2
        for p in range(1, filled + 1):
            if abs(w - ring[p - 1]) < tol:
                mult = 1.0 + 0j
                bad = False
                for j in range(p):
                    if dstate[j] == 0:
                        d, dst = map_deriv(code, prm, ring[j], 1)
                        dring[j] = d
                        dstate[j] = 1 if dst == OK else 2
                    if dstate[j] == 2:
                        bad = True
                        break
                    mult *= dring[j]
                if not bad and _finite(mult) and abs(mult) < 1.0 - ATTRACTING_MARGIN:
                    return CONVERGED, n + 1 - p, p, w, n + 2
        for j in range(MAX_PERIOD - 1, 0, -1):
            ring[j] = ring[j - 1]
            dring[j] = dring[j - 1]
            dstate[j] = dstate[j - 1]
        ring[0] = w
        dstate[0] = 0
        if filled < MAX_PERIOD:
            filled += 1
        z = w
    return UNDECIDED, max_iter, 0, z, max_iter + 1


@njit(cache=True, nogil=True)
def classify_many(code, prm, zs, max_iter, escape_radius, tol, verdicts, targets):
    empty = np.empty(0, dtype=np.complex128)
    for i in range(zs.shape[0]):
        v, _, _, t, _ = run_orbit(code, prm, zs[i], max_iter, escape_radius, tol, empty)
        verdicts[i] = v
        targets[i] = t


@njit(cache=True, nogil=True)
def eval_many(code, prm, zs, values, status):
    for i in range(zs.shape[0]):
        v, st = map_eval(code, prm, zs[i])
        values[i] = v
        status[i] = st


@njit(cache=True, nogil=True)
def deriv_many(code, prm, zs, order, values, status):
    for i in range(zs.shape[0]):
        v, st = map_deriv(code, prm, zs[i], order)
        values[i] = v
        status[i] = st
