"""Closed-form optimal coefficients (orders 1 and 2) and the convolution-style
assembly that rebuilds them from the discrete operator's boundary constants.

Order 1: constant interior weight 2(e^h-1)/(e^h+1) with half weights at the
endpoints.  Order 2: interior weights h plus geometric boundary layers
lambda1^beta / lambda1^(n-beta), lambda1 the stable characteristic root.
Orders >= 3 have no closed form here; use :mod:`optquad.solver`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _series
from .core import ConstructionError, GridSpec, QuadratureRule, RuleMethod, moment_f, psi


def lambda1(h: float) -> float:
    """Stable root (|lambda| < 1, negative) of the order-2 characteristic quadratic.

    Cancellation-safe: the discriminant is taken through its factored form
    4h(e^h-1)^2 * (h(e^h+1)^2 + 2(1-e^(2h))) and the root through the
    division-form quadratic formula, so accuracy holds uniformly in h.
    """
    if not h > 0:
        raise ValueError(f"spacing h must be positive, got {h}")
    radicand = h * _series.radicand_factor(h)
    if not radicand > 0:
        raise ConstructionError(f"discriminant not positive at h={h}")
    sqrt_disc = 2.0 * math.expm1(h) * math.sqrt(radicand)
    p = _series.p_m2(h)
    p1 = _series.p1_m2(h)
    q = (-p1 + sqrt_disc) / 2.0  # p1 < 0 for all h > 0, so no cancellation here
    lam = p / q
    if not abs(lam) < 1.0:
        raise ConstructionError(f"stable root left the unit disk at h={h}: {lam}")
    return lam


def closed_form_m1(n: int) -> QuadratureRule:
    """Order-1 optimal rule: endpoints (e^h-1)/(e^h+1), interior twice that."""
    grid = GridSpec(1, n)
    h = grid.h
    w = math.expm1(h) / (math.exp(h) + 1.0)
    coeffs = (w,) + (2.0 * w,) * (n - 1) + (w,)
    return QuadratureRule(grid, coeffs, RuleMethod.CLOSED_FORM, multiplier_d=0.0)


def _k_constant(h: float, lam: float, n: int) -> float:
    lam_n1 = _powi(lam, n + 1)
    denom = 2.0 * math.expm1(h) ** 2 * (lam + lam_n1)
    if denom == 0.0:
        raise ConstructionError(f"boundary-layer denominator vanished at n={n}")
    return _series.k_num(h) * (lam - 1.0) / denom


def _powi(x: float, n: int) -> float:
    """x**n for integer n >= 0 by squaring; underflow to 0 is harmless."""
    acc = 1.0
    base = x
    while n:
        if n & 1:
            acc *= base
        base *= base
        n >>= 1
    return acc


def closed_form_m2(n: int) -> QuadratureRule:
    """Order-2 optimal rule: interior h plus geometric boundary layers."""
    grid = GridSpec(2, n)
    h = grid.h
    E = math.exp(h)
    lam = lambda1(h)
    lam_n = _powi(lam, n)
    K = _k_constant(h, lam, n)
    t = h / math.expm1(h)
    kterm = K * (lam - lam_n)
    coeffs = [1.0 - t - kterm]
    for beta in range(1, n):
        coeffs.append(h + K * ((E - lam) * _powi(lam, beta) + (1.0 - lam * E) * _powi(lam, n - beta)))
    coeffs.append(-1.0 + E * (t - kterm))
    return QuadratureRule(grid, tuple(coeffs), RuleMethod.CLOSED_FORM)


@dataclass(frozen=True)
class BoundaryConstants:
    """Constants entering the convolution assembly of the optimal weights.

    ``a``/``b`` correct the two endpoint weights, ``a_k``/``b_k`` scale the
    geometric layers (one pair per stable root), ``d`` is the multiplier of
    the exponential constraint and ``big_d`` the quarter-sum of C_beta e^(x_beta).
    For order 1: a = b = (1 - e^h)/(e^h + 1) and d = 0 exactly.
    """

    a: float
    b: float
    a_k: tuple[float, ...]
    b_k: tuple[float, ...]
    d: float
    big_d: float


def _recover_multipliers(m: int, coeffs, grid: GridSpec) -> tuple[float, float]:
    """Solve the two boundary rows of the constrained system for (P0, d).

    For m = 1 the polynomial block is empty and the single unknown d comes
    from the first row alone (it is 0 up to roundoff).
    """
    n = grid.n
    resid = []
    for beta in (0, n):
        s = math.fsum(c * psi(m, (beta - gamma) / n) for gamma, c in enumerate(coeffs))
        resid.append(moment_f(m, beta, grid) - s)
    if m == 1:
        return 0.0, resid[0]  # no polynomial unknown; e^0 = 1 multiplies d
    e0, en = 1.0, math.exp(-1.0)
    det = en - e0
    c0 = (resid[0] * en - resid[1] * e0) / det
    d = (resid[1] - resid[0]) / det
    return c0, d


def coefficients_via_convolution(m: int, n: int) -> QuadratureRule:
    """Assemble the optimal weights from the operator's analytic convolution
    values plus boundary constants, as an independent arithmetic path.

    Order 1: interior value 2(e^h-1)/(e^h+1) with a = b = -(e^h-1)/(e^h+1);
    collapses to the closed form exactly.  Order 2: interior value h with the
    layer amplitudes a1 = K(e^h - lambda1), b1 = K(1 - e^h lambda1) and the
    endpoint weights in their expanded fraction form, grouped differently
    from :func:`closed_form_m2`.  Orders >= 3 are unsupported (the boundary
    constants are not resolved in closed form).
    """
    if m == 1:
        grid = GridSpec(1, n)
        h = grid.h
        w = math.expm1(h) / (math.exp(h) + 1.0)
        interior = 2.0 * w
        a = b = -w
        coeffs = (interior + a,) + (interior,) * (n - 1) + (interior + b,)
        return QuadratureRule(grid, coeffs, RuleMethod.CONVOLUTION, multiplier_d=0.0)
    if m != 2:
        raise ValueError("convolution assembly is available for orders 1 and 2 only")
    grid = GridSpec(2, n)
    h = grid.h
    E = math.exp(h)
    lam = lambda1(h)
    lam_n = _powi(lam, n)
    K = _k_constant(h, lam, n)
    a1 = K * (E - lam)
    b1 = K * (1.0 - E * lam)
    # endpoint weights in expanded form; the shared numerator couples the layers
    g = _series.k_num(h)
    denom = 2.0 * math.expm1(h) ** 2 * (lam + lam * lam_n)
    layer_sum = g * (lam * lam + lam_n - lam - lam * lam_n) / denom
    c_first = (math.expm1(h) - h) / math.expm1(h) - layer_sum
    c_last = (h * E - E + 1.0) / math.expm1(h) - E * layer_sum
    coeffs = [c_first]
    for beta in range(1, n):
        coeffs.append(h + a1 * _powi(lam, beta) + b1 * _powi(lam, n - beta))
    coeffs.append(c_last)
    c0, d = _recover_multipliers(2, coeffs, grid)
    return QuadratureRule(
        grid, tuple(coeffs), RuleMethod.CONVOLUTION,
        multiplier_d=d, polynomial_multipliers=(c0,),
    )


def boundary_constants(m: int, n: int) -> BoundaryConstants:
    """Boundary constants of the convolution assembly for orders 1 and 2."""
    if m == 1:
        grid = GridSpec(1, n)
        h = grid.h
        w = math.expm1(h) / (math.exp(h) + 1.0)
        rule = closed_form_m1(n)
        big_d = 0.25 * math.fsum(
            c * math.exp(beta / n) for beta, c in enumerate(rule.coefficients)
        )
        return BoundaryConstants(-w, -w, (), (), 0.0, big_d)
    if m != 2:
        raise ValueError("boundary constants are resolved for orders 1 and 2 only")
    rule = coefficients_via_convolution(2, n)
    grid = rule.grid
    h, E = grid.h, math.exp(grid.h)
    lam = lambda1(h)
    lam_n = _powi(lam, n)
    K = _k_constant(h, lam, n)
    a1 = K * (E - lam)
    b1 = K * (1.0 - E * lam)
    a = rule.coefficients[0] - (h + a1 + b1 * lam_n)
    b = rule.coefficients[n] - (h + a1 * lam_n + b1)
    big_d = 0.25 * math.fsum(c * math.exp(beta / n) for beta, c in enumerate(rule.coefficients))
    return BoundaryConstants(a, b, (a1,), (b1,), rule.multiplier_d, big_d)


def build_rule(m: int, n: int, method: str = "auto") -> QuadratureRule:
    """Construct a rule by method name: closed | solve | conv | auto.

    ``auto`` picks the closed form for m <= 2 and the direct solve for m = 3.
    Method/order combinations without a construction raise ValueError.
    """
    if method == "auto":
        method = "closed" if m in (1, 2) else "solve"
    if method == "closed":
        if m == 1:
            return closed_form_m1(n)
        if m == 2:
            return closed_form_m2(n)
        raise ValueError("closed form is available for orders 1 and 2 only")
    if method == "conv":
        return coefficients_via_convolution(m, n)
    if method == "solve":
        from .solver import assemble_system, solve

        return solve(assemble_system(m, n))
    raise ValueError(f"unknown method {method!r}; use closed, solve, conv or auto")
