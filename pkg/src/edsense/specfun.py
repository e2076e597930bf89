"""Special functions backing the detection and rate formulas.

Everything here is self-contained (stdlib ``math`` plus the local quadrature
kernels): incomplete gamma and beta, the generalized Marcum-Q, the Kummer,
Gauss, and 2F2 hypergeometric series, and the Tricomi U function evaluated
through its real integral representation.  All routines are pure and
deterministic; accuracy targets are stated per function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quad import adaptive_gk, tanhsinh_01
from .errors import ConvergenceError, DomainError

__all__ = [
    "AccuracyPolicy",
    "DEFAULT_POLICY",
    "ln_gamma",
    "lower_inc_gamma",
    "upper_inc_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "beta",
    "ln_beta",
    "reg_inc_beta",
    "pochhammer",
    "binomial",
    "marcum_q",
    "kummer_1f1",
    "gauss_2f1",
    "hyp_2f2",
    "tricomi_u",
    "ln_tricomi_u",
]


@dataclass(frozen=True)
class AccuracyPolicy:
    """Convergence budget for the series and quadrature routines.

    rel_tol: target relative tolerance for truncated series (also used as the
        absolute tolerance for probability-valued results, which live in
        [0, 1]).
    max_terms: hard cap on series terms before giving up.
    """

    rel_tol: float = 1e-12
    max_terms: int = 10000

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1e-3):
            raise DomainError(f"rel_tol must be in (0, 1e-3), got {self.rel_tol}")
        if self.max_terms < 100:
            raise DomainError(f"max_terms must be >= 100, got {self.max_terms}")


DEFAULT_POLICY = AccuracyPolicy()

_MAX_INNER_ITER = 20000


def ln_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0; exp(result) is accurate to well under 1e-13."""
    if x <= 0.0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _reg_lower_series(z: float, y: float) -> tuple[float, float]:
    """Regularized lower gamma P(z, y) for y < z + 1, returned as (P, ln P)."""
    ap = z
    term = 1.0 / z
    total = term
    for _ in range(_MAX_INNER_ITER):
        ap += 1.0
        term *= y / ap
        total += term
        if abs(term) < abs(total) * 1e-17:
            ln_p = math.log(total) - y + z * math.log(y) - math.lgamma(z)
            return math.exp(ln_p), ln_p
    raise ConvergenceError(f"incomplete gamma series stalled at z={z}, y={y}")


def _reg_upper_cf(z: float, y: float) -> float:
    """Regularized upper gamma Q(z, y) for y >= z + 1, by Lentz's method."""
    tiny = 1e-300
    b = y + 1.0 - z
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_INNER_ITER):
        an = -i * (i - z)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return math.exp(-y + z * math.log(y) - math.lgamma(z)) * h
    raise ConvergenceError(f"incomplete gamma continued fraction stalled at z={z}, y={y}")


def reg_lower_gamma(z: float, y: float) -> float:
    """Regularized lower incomplete gamma P(z, y) = G(z, y) / Gamma(z)."""
    if z <= 0.0 or y < 0.0:
        raise DomainError(f"reg_lower_gamma requires z > 0, y >= 0, got z={z}, y={y}")
    if y == 0.0:
        return 0.0
    if y < z + 1.0:
        return _reg_lower_series(z, y)[0]
    return 1.0 - _reg_upper_cf(z, y)


def ln_reg_lower_gamma(z: float, y: float) -> float:
    """ln P(z, y); stays finite where P itself underflows."""
    if z <= 0.0 or y < 0.0:
        raise DomainError(f"ln_reg_lower_gamma requires z > 0, y >= 0, got z={z}, y={y}")
    if y == 0.0:
        return -math.inf
    if y < z + 1.0:
        return _reg_lower_series(z, y)[1]
    return math.log1p(-_reg_upper_cf(z, y))


def reg_upper_gamma(z: float, y: float) -> float:
    """Regularized upper incomplete gamma Q(z, y) = Gamma(z, y) / Gamma(z)."""
    if z <= 0.0 or y < 0.0:
        raise DomainError(f"reg_upper_gamma requires z > 0, y >= 0, got z={z}, y={y}")
    if y == 0.0:
        return 1.0
    if y < z + 1.0:
        return 1.0 - _reg_lower_series(z, y)[0]
    return _reg_upper_cf(z, y)


def lower_inc_gamma(z: float, y: float) -> float:
    """Lower incomplete gamma G(z, y) = integral of x^(z-1) e^(-x) over [0, y].

    Relative error <= 1e-12 on the tested domain; tends to Gamma(z) as
    y grows.
    """
    return math.exp(ln_gamma(z)) * reg_lower_gamma(z, y)


def upper_inc_gamma(z: float, y: float) -> float:
    """Upper incomplete gamma Gamma(z, y); satisfies Gamma(z,y) = Gamma(z) - G(z,y)."""
    return math.exp(ln_gamma(z)) * reg_upper_gamma(z, y)


def beta(c1: float, c2: float) -> float:
    """Beta function B(c1, c2) = Gamma(c1) Gamma(c2) / Gamma(c1 + c2)."""
    return math.exp(ln_beta(c1, c2))


def ln_beta(c1: float, c2: float) -> float:
    if c1 <= 0.0 or c2 <= 0.0:
        raise DomainError(f"beta requires positive arguments, got ({c1}, {c2})")
    return math.lgamma(c1) + math.lgamma(c2) - math.lgamma(c1 + c2)


def _beta_cf(a: float, b: float, x: float) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for i in range(1, _MAX_INNER_ITER):
        m2 = 2 * i
        aa = i * (b - i) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + i) * (qab + i) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ConvergenceError(f"incomplete beta continued fraction stalled at a={a}, b={b}, x={x}")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"reg_inc_beta requires positive parameters, got ({a}, {b})")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_inc_beta requires x in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(-ln_beta(a, b) + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1."""
    if n < 0:
        raise DomainError(f"pochhammer requires n >= 0, got {n}")
    out = 1.0
    for k in range(n):
        out *= a + k
    return out


def binomial(a: int, b: int) -> int:
    """Exact binomial coefficient C(a, b) for integers 0 <= b <= a."""
    if b < 0 or a < 0 or b > a:
        raise DomainError(f"binomial requires 0 <= b <= a, got ({a}, {b})")
    return math.comb(a, b)


def _poisson_left_tail_bound(x: float, k: int) -> float:
    """Chernoff bound on P[Poisson(x) <= k] for k < x."""
    if k < 0:
        return 0.0
    if k == 0:
        return math.exp(-x)
    return math.exp(-x + k + k * math.log(x / k))


def marcum_q(u: int, a: float, b: float, policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """Generalized Marcum-Q Q_u(a, b) for integer order u >= 1.

    Evaluated as the Poisson mixture of regularized upper incomplete gammas,
    Q_u(a,b) = sum_k e^(-a^2/2) (a^2/2)^k / k! * Q(u+k, b^2/2), summed over a
    window around the Poisson mode; the neglected Poisson mass bounds the
    absolute error below ``policy.rel_tol``.
    """
    if u < 1 or int(u) != u:
        raise DomainError(f"marcum_q requires integer order u >= 1, got {u}")
    if a < 0.0 or b < 0.0:
        raise DomainError(f"marcum_q requires a, b >= 0, got a={a}, b={b}")
    if b == 0.0:
        return 1.0
    y = 0.5 * b * b
    if a == 0.0:
        return reg_upper_gamma(u, y)
    x = 0.5 * a * a
    tol = policy.rel_tol

    k0 = 0
    if x > 40.0:
        # skip the negligible left Poisson mass; its contribution is bounded
        # by the Chernoff tail kept below tol/4
        step = int(math.sqrt(x)) + 1
        k0 = max(0, int(x - 9.0 * math.sqrt(x)) - 10)
        while k0 > 0 and _poisson_left_tail_bound(x, k0 - 1) > 0.25 * tol:
            k0 = max(0, k0 - step)

    q = reg_upper_gamma(u + k0, y)
    p = math.exp(k0 * math.log(x) - x - math.lgamma(k0 + 1.0))
    dq = math.exp((u + k0) * math.log(y) - y - math.lgamma(u + k0 + 1.0))
    total = 0.0
    for k in range(k0, k0 + policy.max_terms):
        total += p * q
        if k + 1 > x:
            # geometric majorant of the remaining Poisson mass (Q factors <= 1)
            r = x / (k + 1)
            if p * r / (1.0 - r) <= 0.5 * tol:
                return min(1.0, max(0.0, total))
        q += dq
        dq *= y / (u + k + 1.0)
        p *= x / (k + 1.0)
    raise ConvergenceError(
        f"marcum_q series exceeded {policy.max_terms} terms at u={u}, a={a}, b={b}")


def _series_phq(num: tuple, den: tuple, z: float, policy: AccuracyPolicy,
                what: str) -> float:
    """Generalized hypergeometric power series with a three-small-terms stop."""
    term = 1.0
    total = 1.0
    small = 0
    for l in range(policy.max_terms):
        ratio = z / (l + 1.0)
        for p in num:
            ratio *= p + l
        for q in den:
            ratio /= q + l
        term *= ratio
        total += term
        if abs(term) <= policy.rel_tol * abs(total):
            small += 1
            if small == 3:
                return total
        else:
            small = 0
    raise ConvergenceError(f"{what} series exceeded {policy.max_terms} terms")


def kummer_1f1(a: float, b: float, z: float, policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """Confluent hypergeometric 1F1(a; b; z).

    Direct power series for z >= 0; for z < 0 the Kummer transformation
    1F1(a;b;z) = e^z 1F1(b-a; b; -z) avoids the alternating-series
    cancellation.
    """
    if b <= 0.0 and b == round(b):
        raise DomainError(f"kummer_1f1 undefined for nonpositive integer b={b}")
    if z == 0.0:
        return 1.0
    if z < 0.0:
        return math.exp(z) * _series_phq((b - a,), (b,), -z, policy, "kummer_1f1")
    return _series_phq((a,), (b,), z, policy, "kummer_1f1")


def _gamma_sign_ln(x: float):
    """(sign, ln|Gamma(x)|) for real non-pole x; None at a pole."""
    if x > 0.0:
        return 1.0, math.lgamma(x)
    if x == round(x):
        return None
    s = math.sin(math.pi * x)
    ln = math.log(math.pi) - math.log(abs(s)) - math.lgamma(1.0 - x)
    return (1.0 if s > 0 else -1.0), ln


def _euler_2f1(a: float, b: float, c: float, z: float, policy: AccuracyPolicy) -> float:
    """Euler integral for 2F1 when c > b > 0; handles 0.5 < z < 1 robustly."""
    bm1 = b - 1.0
    cbm1 = c - b - 1.0

    def integrand(t, omt, w):
        with np.errstate(divide="ignore"):
            ln = bm1 * np.log(t) + cbm1 * np.log(omt) - a * np.log(omt + t * (1.0 - z))
        return w * np.exp(ln)

    integral = tanhsinh_01(integrand, rel_tol=min(1e-13, policy.rel_tol))
    return math.exp(math.lgamma(c) - math.lgamma(b) - math.lgamma(c - b)) * integral


def gauss_2f1(a: float, b: float, c: float, z: float,
              policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """Gauss hypergeometric 2F1(a, b; c; z) for real z < 1.

    Direct series for z in [0, 0.5]; the z -> 1-z linear transformation for
    z in (0.5, 1) away from its integer-parameter degeneracy, otherwise the
    Euler integral; the Pfaff transformation maps z < 0 into [0, 1).
    """
    if c <= 0.0 and c == round(c):
        raise DomainError(f"gauss_2f1 undefined for nonpositive integer c={c}")
    if z >= 1.0:
        raise DomainError(f"gauss_2f1 requires z < 1, got {z}")
    if z == 0.0:
        return 1.0
    if z < 0.0:
        w = z / (z - 1.0)
        if abs(a) <= abs(b):
            return (1.0 - z) ** (-a) * gauss_2f1(a, c - b, c, w, policy)
        return (1.0 - z) ** (-b) * gauss_2f1(c - a, b, c, w, policy)
    if z <= 0.5:
        return _series_phq((a, b), (c,), z, policy, "gauss_2f1")

    d = c - a - b
    if abs(d - round(d)) > 0.05:
        w = 1.0 - z
        total = 0.0
        gc = _gamma_sign_ln(c)
        for (num, den, coef_args, shift) in (
            ((a, b), (1.0 - d,), (d, c - a, c - b), 0.0),
            ((c - a, c - b), (1.0 + d,), (-d, a, b), d),
        ):
            gn = _gamma_sign_ln(coef_args[0])
            g1 = _gamma_sign_ln(coef_args[1])
            g2 = _gamma_sign_ln(coef_args[2])
            if g1 is None or g2 is None:
                continue  # 1/Gamma(pole) kills the term
            sign = gc[0] * gn[0] * g1[0] * g2[0]
            ln = gc[1] + gn[1] - g1[1] - g2[1] + shift * math.log(w)
            total += sign * math.exp(ln) * _series_phq(num, den, w, policy, "gauss_2f1")
        return total

    for (p, q) in ((a, b), (b, a)):
        if q > 0.0 and c - q > 0.0:
            return _euler_2f1(p, q, c, z, policy)
    raise ConvergenceError(
        f"gauss_2f1 has no stable route for (a={a}, b={b}, c={c}, z={z})")


def hyp_2f2(a1: float, a2: float, b1: float, b2: float, z: float,
            policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """2F2(a1, a2; b1, b2; z) by its everywhere-convergent power series."""
    for bb in (b1, b2):
        if bb <= 0.0 and bb == round(bb):
            raise DomainError(f"hyp_2f2 undefined for nonpositive integer denominator {bb}")
    if z == 0.0:
        return 1.0
    return _series_phq((a1, a2), (b1, b2), z, policy, "hyp_2f2")


def ln_tricomi_u(a: float, b: float, z: float,
                 policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """ln U(a; b; z) for a > 0, z > 0 via the Laplace-type integral.

    U(a;b;z) = (1/Gamma(a)) * integral over t > 0 of e^(-zt) t^(a-1)
    (1+t)^(b-a-1); integrating in s = ln t with the peak value factored out
    keeps the result finite for very large a, where U itself underflows.
    """
    if a <= 0.0 or z <= 0.0:
        raise DomainError(f"tricomi_u requires a > 0 and z > 0, got a={a}, z={z}")
    cba = b - a - 1.0

    def h(s):
        t = np.exp(s)
        return -z * t + a * s + cba * np.logaddexp(0.0, s)

    # interior maximum of the log-integrand: root of z t^2 + (z - b + 1) t - a
    coeff = z - b + 1.0
    t_star = (-coeff + math.sqrt(coeff * coeff + 4.0 * z * a)) / (2.0 * z)
    s_star = math.log(t_star)
    h_star = float(h(np.array([s_star]))[0])

    drop = 55.0
    lo = s_star - 1.0
    width = 1.0
    while float(h(np.array([lo]))[0]) > h_star - drop:
        width *= 2.0
        lo = s_star - width
        if width > 1e8:
            raise ConvergenceError("tricomi_u integrand has no left decay")
    hi = s_star + 1.0
    width = 1.0
    while float(h(np.array([hi]))[0]) > h_star - drop:
        width *= 2.0
        hi = s_star + width
        if width > 1e8:
            raise ConvergenceError("tricomi_u integrand has no right decay")

    integral = adaptive_gk(lambda s: np.exp(h(s) - h_star), lo, hi,
                           rel_tol=min(1e-12, policy.rel_tol), abs_tol=0.0)
    return h_star + math.log(integral) - math.lgamma(a)


def tricomi_u(a: float, b: float, z: float,
              policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """Tricomi confluent hypergeometric U(a; b; z), a > 0, z > 0.

    Relative error target 1e-10.
    """
    return math.exp(ln_tricomi_u(a, b, z, policy))
