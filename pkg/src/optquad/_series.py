"""Cancellation-safe evaluation of small exponential-polynomial combinations.

Every quantity here has the form sum_j c_j * h^(a_j) * e^(b_j * h) with small
integer/rational c_j, a_j, b_j, and vanishes to third or fifth order at h = 0.
Evaluating the printed expression directly loses ~(order * log10(1/h)) digits
to cancellation, which is fatal below h ~ 0.25 for the tolerances used here.

Instead we expand in h with exact rational coefficients,

    coeff of h^k  =  sum_j c_j * b_j^(k - a_j) / (k - a_j)!,

computed with Fraction arithmetic and rounded once to float.  Thirty terms
make the series exact to working precision for h in (0, 2]; all inputs in
this package satisfy h = 1/n <= 1.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

_KMAX = 30

# (coefficient, power of h, exponential multiple) triples for each quantity
_TERMS = {
    # 1 - e^(2h) + 2h e^h ... leading term -h^3/3  (quadratic's outer coefficients)
    "p_m2": ((1, 0, 0), (-1, 0, 2), (2, 1, 1)),
    # 2(e^(2h) - 1) - 2h(e^(2h) + 1) ... -4h^3/3   (quadratic's middle coefficient)
    "p1_m2": ((2, 0, 2), (-2, 0, 0), (-2, 1, 2), (-2, 1, 0)),
    # h(e^h + 1)^2 + 2(1 - e^(2h)) ... h^3/3       (discriminant factor)
    "radicand_factor": ((1, 1, 2), (2, 1, 1), (1, 1, 0), (-2, 0, 2), (2, 0, 0)),
    # 2e^h - 2 - h e^h - h ... -h^3/6              (boundary-constant numerator)
    "k_num": ((2, 0, 1), (-2, 0, 0), (-1, 1, 1), (-1, 1, 0)),
    # quartic coefficients: leading, subleading, middle; leading terms multiples of h^5
    "p4_m3": ((1, 0, 0), (-1, 0, 2), (2, 1, 1), (Fraction(1, 3), 3, 1)),
    "p3_m3": (
        (-4, 0, 0), (4, 0, 2), (-4, 1, 1), (Fraction(4, 3), 3, 1),
        (-2, 1, 2), (-2, 1, 0), (Fraction(-1, 3), 3, 2), (Fraction(-1, 3), 3, 0),
    ),
    "p2_m3": (
        (6, 0, 0), (-6, 0, 2), (4, 1, 1), (Fraction(2, 3), 3, 1),
        (4, 1, 2), (4, 1, 0), (Fraction(-4, 3), 3, 2), (Fraction(-4, 3), 3, 0),
    ),
}


@lru_cache(maxsize=None)
def _coeffs(name: str) -> tuple[float, ...]:
    out = []
    for k in range(_KMAX + 1):
        c = Fraction(0)
        for coef, a, b in _TERMS[name]:
            if k >= a:
                c += Fraction(coef) * Fraction(b) ** (k - a) / math.factorial(k - a)
        out.append(float(c))
    return tuple(out)


def _eval(name: str, h: float) -> float:
    coeffs = _coeffs(name)
    val = 0.0
    for k in range(_KMAX, -1, -1):
        val = val * h + coeffs[k]
    return val


def p_m2(h: float) -> float:
    """1 - e^(2h) + 2h e^h, stable for small h (~ -h^3/3)."""
    return _eval("p_m2", h)


def p1_m2(h: float) -> float:
    """2(e^(2h) - 1) - 2h(e^(2h) + 1), stable for small h (~ -4h^3/3)."""
    return _eval("p1_m2", h)


def radicand_factor(h: float) -> float:
    """h(e^h + 1)^2 + 2(1 - e^(2h)), stable for small h (~ h^3/3, positive)."""
    return _eval("radicand_factor", h)


def k_num(h: float) -> float:
    """2e^h - 2 - he^h - h, stable for small h (~ -h^3/6)."""
    return _eval("k_num", h)


def p4_m3(h: float) -> float:
    """Quartic leading coefficient, ~ -h^5/60."""
    return _eval("p4_m3", h)


def p3_m3(h: float) -> float:
    """Quartic subleading coefficient, ~ -13h^5/30."""
    return _eval("p3_m3", h)


def p2_m3(h: float) -> float:
    """Quartic middle coefficient, ~ -11h^5/10."""
    return _eval("p2_m3", h)
