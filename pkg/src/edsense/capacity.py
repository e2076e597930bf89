"""Effective rate of the cognitive link under a statistical delay constraint.

The rate is R = -(1/A) log2 E[(1 + gamma)^-A] with A the dimensionless
delay-QoS exponent.  The expectation (the "rate moment" below) reduces to
Tricomi-U terms for the shadowed kappa-mu channel and to a single Gauss
hypergeometric value for the Fisher-Snedecor channel.  Both channel paths
accumulate in log space, so large A only shrinks the moment instead of
underflowing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import FisherFParams, KappaMuShadowedParams
from .errors import ConvergenceError, DomainError
from .specfun import (
    AccuracyPolicy,
    DEFAULT_POLICY,
    gauss_2f1,
    ln_beta,
    ln_tricomi_u,
    pochhammer,
)

__all__ = [
    "DelayQoS",
    "rate_moment_kms",
    "rate_moment_f",
    "eff_rate_kms",
    "eff_rate_f",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class DelayQoS:
    """Delay-QoS exponent A = Theta * T * B / ln 2 (only the product matters)."""

    a_exponent: float

    def __post_init__(self):
        if self.a_exponent <= 0.0:
            raise DomainError(f"a_exponent must be positive, got {self.a_exponent}")


def _ln_signed_sum(pairs) -> float:
    """ln of sum(sign * exp(ln_mag)) for (sign, ln_mag) pairs; the sum must
    be positive."""
    peak = max(ln for _, ln in pairs)
    if peak == -math.inf:
        raise ConvergenceError("rate moment evaluated to zero")
    total = math.fsum(sign * math.exp(ln - peak) for sign, ln in pairs)
    if total <= 0.0:
        raise ConvergenceError("rate moment lost all significance in cancellation")
    return peak + math.log(total)


def _ln_rate_moment_kms(p: KappaMuShadowedParams, a: float,
                        policy: AccuracyPolicy) -> float:
    if p.collapses_to_gamma:
        shape, rate = p._gamma_limit()
        return (shape * math.log(rate)
                + ln_tricomi_u(shape, shape + 1.0 - a, rate, policy))
    th1, th2, mu, m = p.theta1, p.theta2, p.mu, p.m
    d = th1 - th2
    ln_pref = (mu - m) * math.log(th1) + m * math.log(th2) - math.lgamma(m)
    ln_d = math.log(d)
    pairs = []
    for i in range(m):
        n = mu - m + i
        sign = (-1.0) ** i
        ln_coef = (ln_pref + math.log(math.comb(m - 1, i))
                   + math.log(pochhammer(mu - m, i)) - n * ln_d)
        pairs.append((sign, ln_coef + math.lgamma(m - i)
                      + ln_tricomi_u(m - i, m - i - a + 1.0, th2, policy)))
        for k in range(n):
            pairs.append((-sign, ln_coef + k * ln_d - math.lgamma(k + 1)
                          + math.lgamma(m - i + k)
                          + ln_tricomi_u(m - i + k, m - i + k - a + 1.0, th1,
                                         policy)))
    return _ln_signed_sum(pairs)


def _guard_moment(ln_moment: float) -> float:
    """The moment E[(1+gamma)^-A] must sit in (0, 1]."""
    if ln_moment > 1e-9:
        raise ConvergenceError(
            f"rate moment exceeded 1 (ln = {ln_moment:.3e}); evaluation unstable")
    return min(ln_moment, 0.0)


def rate_moment_kms(p: KappaMuShadowedParams, q: DelayQoS,
                    policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """E[(1 + gamma)^-A] over the shadowed kappa-mu channel."""
    return math.exp(_guard_moment(_ln_rate_moment_kms(p, q.a_exponent, policy)))


def rate_moment_f(p: FisherFParams, q: DelayQoS,
                  policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """E[(1 + gamma)^-A] over the Fisher-Snedecor channel."""
    a = q.a_exponent
    m, ms, omega = p.m, p.m_s, p.omega
    hyp = gauss_2f1(m + ms, m, m + ms + a, 1.0 - omega, policy)
    if hyp <= 0.0:
        raise ConvergenceError("hypergeometric factor of the rate moment not positive")
    ln_moment = (m * math.log(omega) + ln_beta(m, ms + a) - ln_beta(m, ms)
                 + math.log(hyp))
    return math.exp(_guard_moment(ln_moment))


def eff_rate_kms(p: KappaMuShadowedParams, q: DelayQoS,
                 policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """Effective rate in bits/s/Hz over shadowed kappa-mu fading."""
    ln_moment = _guard_moment(_ln_rate_moment_kms(p, q.a_exponent, policy))
    return -ln_moment / (q.a_exponent * _LN2)


def eff_rate_f(p: FisherFParams, q: DelayQoS,
               policy: AccuracyPolicy = DEFAULT_POLICY) -> float:
    """Effective rate in bits/s/Hz over Fisher-Snedecor fading."""
    moment = rate_moment_f(p, q, policy)
    return -math.log(moment) / (q.a_exponent * _LN2)
