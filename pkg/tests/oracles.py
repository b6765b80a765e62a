"""Independent reference computations used by the test suite.

Everything here is written directly from the defining expressions, using
mpmath / scipy / numpy machinery rather than the package's own evaluation
paths, so agreement is meaningful.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad

DPS = 45


def mp_psi(m: int, x) -> mp.mpf:
    """Kernel from its printed definition: sign(x)/2 (sinh x - odd Taylor head)."""
    with mp.workdps(DPS):
        x = mp.mpf(x)
        if x == 0:
            return mp.mpf(0)
        s = mp.sinh(x)
        for k in range(1, m):
            s -= x ** (2 * k - 1) / mp.factorial(2 * k - 1)
        return mp.sign(x) / 2 * s


def mp_moment(m: int, t) -> mp.mpf:
    """Kernel moment from its printed exponential form (not the series tail)."""
    with mp.workdps(DPS):
        t = mp.mpf(t)
        val = (mp.exp(t) + mp.exp(-t) + mp.exp(1 - t) + mp.exp(t - 1) - 4) / 4
        for k in range(1, m):
            val -= (t ** (2 * k) + (1 - t) ** (2 * k)) / (2 * mp.factorial(2 * k))
        return val


def quad_moment(m: int, t: float) -> float:
    """Adaptive integration of psi(m, x - t) over [0, 1], split at the kink."""

    def f(x: float) -> float:
        return float(mp_psi(m, x - t))

    points = [t] if 0.0 < t < 1.0 else None
    val, err = quad(f, 0.0, 1.0, points=points, epsabs=1e-14, epsrel=1e-13, limit=200)
    assert err < 1e-12
    return val


def mp_char_coeffs(m: int, h) -> list[mp.mpf]:
    """Characteristic coefficients, ascending, straight from the defining product."""
    with mp.workdps(DPS):
        h = mp.mpf(h)
        E, E2 = mp.exp(h), mp.exp(2 * h)
        if m == 2:
            p = 1 - E2 + 2 * h * E
            p1 = 2 * (E2 - 1) - 2 * h * (E2 + 1)
            return [p, p1, p]
        b0 = h + h**3 / 6
        b1 = -2 * h + 2 * h**3 / 3
        p4 = (1 - E2) + 2 * E * b0
        p3 = -4 * (1 - E2) + 2 * E * b1 - 2 * (E2 + 1) * b0
        p2 = 6 * (1 - E2) + 4 * E * b0 - 2 * (E2 + 1) * b1
        return [p4, p3, p2, p3, p4]


def mp_inner_roots(m: int, h) -> list[float]:
    """All |lambda| < 1 roots by generic polynomial root finding."""
    with mp.workdps(DPS):
        coeffs = mp_char_coeffs(m, h)
        roots = mp.polyroots(list(reversed(coeffs)), maxsteps=300, extraprec=160)
        return sorted(float(r.real) for r in roots if abs(r) < 1)


def np_inner_roots(m: int, h: float) -> list[float]:
    coeffs = [float(c) for c in mp_char_coeffs(m, h)]
    roots = np.roots(list(reversed(coeffs)))
    return sorted(float(r.real) for r in roots if abs(r) < 1 and abs(r.imag) < 1e-12)


def panel_double_integral(m: int, panels: int = 24, order: int = 12) -> float:
    """Deterministic tensor Gauss-Legendre value of the kernel's double integral.

    The square is split along the diagonal kink; each triangle maps to the
    unit square via y = x * t, where the integrand is analytic.  Both
    triangles contribute equally because the kernel is even.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    xs = (x + 1.0) / 2.0
    ws = w / 2.0
    total = []
    for i in range(panels):
        for gi, wi in zip(xs, ws):
            u = (i + gi) / panels
            for j in range(panels):
                for gj, wj in zip(xs, ws):
                    v = (j + gj) / panels
                    total.append(wi * wj / panels**2 * u * float(mp_psi(m, u * (1.0 - v))))
    return 2.0 * math.fsum(total)


def central_difference(f, x: float, k: int) -> float:
    """k-th derivative by central differences (k <= 3), roundoff-aware steps."""
    if k == 0:
        return f(x)
    if k == 1:
        step = 1e-6
        return (f(x + step) - f(x - step)) / (2 * step)
    if k == 2:
        step = 1e-5
        return (f(x + step) - 2 * f(x) + f(x - step)) / step**2
    if k == 3:
        step = 1e-3
        return (f(x + 2 * step) - 2 * f(x + step) + 2 * f(x - step) - f(x - 2 * step)) / (
            2 * step**3
        )
    raise ValueError(k)


def mp_series_reference(name: str, h: float) -> float:
    """Direct high-precision values of the series-stabilised quantities.

    The quartic coefficients cancel through fifth order, so tiny h burns
    ~5*log10(1/h) digits; 130 digits covers the whole test grid.
    """
    with mp.workdps(130):
        hm = mp.mpf(h)
        E, E2 = mp.exp(hm), mp.exp(2 * hm)
        refs = {
            "p_m2": 1 - E2 + 2 * hm * E,
            "p1_m2": 2 * (E2 - 1) - 2 * hm * (E2 + 1),
            "radicand_factor": hm * (E + 1) ** 2 + 2 * (1 - E2),
            "k_num": 2 * E - 2 - hm * E - hm,
            "p4_m3": (1 - E2) + 2 * E * (hm + hm**3 / 6),
            "p3_m3": -4 * (1 - E2) + 2 * E * (-2 * hm + 2 * hm**3 / 3)
            - 2 * (E2 + 1) * (hm + hm**3 / 6),
            "p2_m3": 6 * (1 - E2) + 4 * E * (hm + hm**3 / 6)
            - 2 * (E2 + 1) * (-2 * hm + 2 * hm**3 / 3),
        }
        return float(refs[name])
