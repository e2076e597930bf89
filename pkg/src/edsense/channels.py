"""SNR distributions for the two composite fading models.

The shadowed kappa-mu model (integer mu and m) has the moment generating
function M(s) = (1 - s/theta1)^-(mu-m) * (1 - s/theta2)^-m, i.e. the SNR is
the independent sum of Gamma(mu - m, rate theta1) and Gamma(m, rate theta2)
variates.  Its density is evaluated from the closed form obtained by
expanding the convolution of those two Gamma densities; the expansion keeps
the (theta1 - theta2)^-(mu - m + i) factor that dimensional analysis
requires, and each lower-incomplete-gamma bracket is computed through the
regularized form to avoid cancellation.

The Fisher-Snedecor model is the scaled central F distribution: the SNR is
mean_snr * (G1/m) / (G2/m_s) with independent unit-scale Gamma variates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._quad import adaptive_gk
from .errors import DomainError
from .specfun import (
    ln_beta,
    ln_reg_lower_gamma,
    pochhammer,
    reg_inc_beta,
    reg_lower_gamma,
)

__all__ = [
    "KappaMuShadowedParams",
    "FisherFParams",
    "kms_mgf",
    "kms_pdf",
    "kms_cdf",
    "kms_sample",
    "f_pdf",
    "f_cdf",
    "f_sample",
]

# Below this kappa the two MGF poles coalesce numerically; switch to the
# exact single-Gamma limit instead of fighting the cancellation.
KAPPA_ZERO_TOL = 1e-6

# Alternating binomial sums lose roughly one digit per unit of m; beyond this
# order the density falls back to direct numerical convolution.
_CLOSED_FORM_MAX_M = 25


@dataclass(frozen=True)
class KappaMuShadowedParams:
    """Shadowed kappa-mu fading parameters (integer mu and m, mu >= m).

    kappa: dominant-to-scattered power ratio (>= 0).
    mu: number of multipath clusters.
    m: shadowing severity index.
    mean_snr: average SNR, linear scale.
    """

    kappa: float
    mu: int
    m: int
    mean_snr: float
    theta1: float = field(init=False)
    theta2: float = field(init=False)

    def __post_init__(self):
        if self.kappa < 0.0:
            raise DomainError(f"kappa must be >= 0, got {self.kappa}")
        if self.mu < 1 or int(self.mu) != self.mu:
            raise DomainError(f"mu must be a positive integer, got {self.mu}")
        if self.m < 1 or int(self.m) != self.m:
            raise DomainError(f"m must be a positive integer, got {self.m}")
        if self.mu < self.m:
            raise DomainError(f"mu >= m is required, got mu={self.mu}, m={self.m}")
        if self.mean_snr <= 0.0:
            raise DomainError(f"mean_snr must be positive, got {self.mean_snr}")
        th1 = self.mu * (1.0 + self.kappa) / self.mean_snr
        th2 = self.m * th1 / (self.mu * self.kappa + self.m)
        object.__setattr__(self, "theta1", th1)
        object.__setattr__(self, "theta2", th2)

    @property
    def collapses_to_gamma(self) -> bool:
        """True when the model reduces exactly to a single Gamma factor."""
        return self.mu == self.m or self.kappa < KAPPA_ZERO_TOL

    def _gamma_limit(self) -> tuple[int, float]:
        """(shape, rate) of the collapsed single-Gamma SNR distribution."""
        if self.mu == self.m:
            return self.m, self.theta2
        return self.mu, self.theta1


@dataclass(frozen=True)
class FisherFParams:
    """Fisher-Snedecor F fading parameters.

    m: number of multipath clusters (positive real).
    m_s: shadowing shape parameter; the SNR mean is finite only for m_s > 1,
        which ``has_finite_mean`` reports.
    mean_snr: average SNR, linear scale.
    """

    m: float
    m_s: float
    mean_snr: float
    omega: float = field(init=False)

    def __post_init__(self):
        if self.m <= 0.0:
            raise DomainError(f"m must be positive, got {self.m}")
        if self.m_s <= 0.0:
            raise DomainError(f"m_s must be positive, got {self.m_s}")
        if self.mean_snr <= 0.0:
            raise DomainError(f"mean_snr must be positive, got {self.mean_snr}")
        object.__setattr__(self, "omega", self.m / (self.m_s * self.mean_snr))

    @property
    def has_finite_mean(self) -> bool:
        return self.m_s > 1.0


def _gamma_pdf(shape: float, rate: float, x: float) -> float:
    if x < 0.0:
        return 0.0
    if x == 0.0:
        if shape == 1.0:
            return rate
        return 0.0 if shape > 1.0 else math.inf
    return math.exp(shape * math.log(rate) + (shape - 1.0) * math.log(x)
                    - rate * x - math.lgamma(shape))


def kms_mgf(p: KappaMuShadowedParams, s: float) -> float:
    """MGF E[exp(s * gamma)] of the shadowed kappa-mu SNR, for s < theta2."""
    if s >= p.theta2:
        raise DomainError(f"MGF requires s < theta2 = {p.theta2}, got s={s}")
    return math.exp(-(p.mu - p.m) * math.log1p(-s / p.theta1)
                    - p.m * math.log1p(-s / p.theta2))


def _kms_pdf_closed(p: KappaMuShadowedParams, g: float) -> float:
    th1, th2, mu, m = p.theta1, p.theta2, p.mu, p.m
    d = th1 - th2
    ln_d = math.log(d)
    ln_g = math.log(g)
    ln_pref = ((mu - m) * math.log(th1) + m * math.log(th2)
               - math.lgamma(m) - th2 * g)
    pieces = []
    for i in range(m):
        n = mu - m + i
        ln_p = ln_reg_lower_gamma(n, d * g)
        if ln_p == -math.inf:
            continue
        ln_mag = (ln_pref + math.log(math.comb(m - 1, i))
                  + math.lgamma(n) - math.lgamma(mu - m)
                  + (m - 1 - i) * ln_g + ln_p - n * ln_d)
        pieces.append((-1.0) ** i * math.exp(ln_mag))
    return max(0.0, math.fsum(pieces))


def _kms_pdf_convolution(p: KappaMuShadowedParams, g: float) -> float:
    th1, th2, mu, m = p.theta1, p.theta2, p.mu, p.m

    def integrand(x):
        ln = ((mu - m - 1.0) * np.log(x) - th1 * x
              + (m - 1.0) * np.log(g - x) - th2 * (g - x))
        return np.exp(ln)

    ln_norm = ((mu - m) * math.log(th1) + m * math.log(th2)
               - math.lgamma(mu - m) - math.lgamma(m))
    val = adaptive_gk(integrand, 0.0, g, rel_tol=1e-11)
    return math.exp(ln_norm) * val


def kms_pdf(p: KappaMuShadowedParams, gamma: float) -> float:
    """SNR density of the shadowed kappa-mu model at ``gamma`` >= 0."""
    if gamma < 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    if p.collapses_to_gamma:
        shape, rate = p._gamma_limit()
        return _gamma_pdf(shape, rate, gamma)
    if gamma == 0.0:
        return 0.0  # total shape mu > 1 here
    if p.m >= _CLOSED_FORM_MAX_M:
        return _kms_pdf_convolution(p, gamma)
    return _kms_pdf_closed(p, gamma)


def kms_cdf(p: KappaMuShadowedParams, gamma: float) -> float:
    """SNR distribution function, by termwise integration of the density."""
    if gamma < 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0.0:
        return 0.0
    if p.collapses_to_gamma:
        shape, rate = p._gamma_limit()
        return reg_lower_gamma(shape, rate * gamma)
    if p.m >= _CLOSED_FORM_MAX_M:
        val = adaptive_gk(np.vectorize(lambda x: kms_pdf(p, float(x))),
                          0.0, gamma, rel_tol=1e-10)
        return min(1.0, max(0.0, val))
    th1, th2, mu, m = p.theta1, p.theta2, p.mu, p.m
    d = th1 - th2
    ln_d = math.log(d)
    ln_th1 = math.log(th1)
    ln_th2 = math.log(th2)
    ln_pref = (mu - m) * ln_th1 + m * ln_th2 - math.lgamma(m)
    pieces = []
    for i in range(m):
        n = mu - m + i
        sign = (-1.0) ** i
        ln_coef = (ln_pref + math.log(math.comb(m - 1, i))
                   + math.log(pochhammer(mu - m, i)) - n * ln_d)
        ln_p2 = ln_reg_lower_gamma(m - i, th2 * gamma)
        pieces.append(sign * math.exp(
            ln_coef + math.lgamma(m - i) + ln_p2 - (m - i) * ln_th2))
        for k in range(n):
            ln_p1 = ln_reg_lower_gamma(m - i + k, th1 * gamma)
            pieces.append(-sign * math.exp(
                ln_coef + k * ln_d - math.lgamma(k + 1)
                + math.lgamma(m - i + k) + ln_p1 - (m - i + k) * ln_th1))
    return min(1.0, max(0.0, math.fsum(pieces)))


def kms_sample(p: KappaMuShadowedParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` SNR variates as the sum of the two Gamma factors."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if p.mu > p.m:
        first = rng.gamma(p.mu - p.m, 1.0 / p.theta1, size=n)
    else:
        first = np.zeros(n)
    return first + rng.gamma(p.m, 1.0 / p.theta2, size=n)


def f_pdf(p: FisherFParams, gamma) -> float | np.ndarray:
    """Fisher-Snedecor SNR density; accepts a scalar or an array.

    gamma = 0 is only in the domain for m >= 1 (the density has an
    integrable singularity at the origin when m < 1).
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0.0):
        raise DomainError("gamma must be >= 0")
    if np.any(g == 0.0) and p.m < 1.0:
        raise DomainError("density is singular at gamma = 0 for m < 1")
    ln_norm = p.m * math.log(p.omega) - ln_beta(p.m, p.m_s)
    with np.errstate(divide="ignore", invalid="ignore"):
        ln = ln_norm + (p.m - 1.0) * np.log(g) - (p.m + p.m_s) * np.log1p(p.omega * g)
    out = np.exp(ln)
    if g.ndim == 0:
        val = float(out)
        if g == 0.0:
            val = math.exp(ln_norm) if p.m == 1.0 else 0.0
        return val
    out[g == 0.0] = math.exp(ln_norm) if p.m == 1.0 else 0.0
    return out


def f_cdf(p: FisherFParams, gamma: float) -> float:
    """Fisher-Snedecor SNR distribution function (regularized incomplete beta)."""
    if gamma < 0.0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0.0:
        return 0.0
    x = p.omega * gamma / (1.0 + p.omega * gamma)
    return reg_inc_beta(p.m, p.m_s, x)


def f_sample(p: FisherFParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` SNR variates via the Gamma-ratio construction."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    g1 = rng.gamma(p.m, 1.0, size=n)
    g2 = rng.gamma(p.m_s, 1.0, size=n)
    return p.mean_snr * (g1 / p.m) / (g2 / p.m_s)
