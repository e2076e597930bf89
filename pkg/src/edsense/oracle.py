"""Independent reference machinery: averaging by adaptive quadrature with a
certified finite cutoff, and seeded Monte Carlo estimation.

Nothing in this module calls the closed-form averages in ``detection`` or
``capacity``; channel densities and samplers come from ``channels`` and the
instantaneous metrics handed to these routines are either supplied by the
caller or built here from scipy's noncentral chi-square, which shares no code
with the series implementations they are used to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate as _integrate
from scipy import stats as _stats

from .channels import (
    FisherFParams,
    KappaMuShadowedParams,
    f_cdf,
    f_pdf,
    f_sample,
    kms_pdf,
    kms_sample,
)
from .errors import ConvergenceError, DomainError
from .specfun import reg_upper_gamma

__all__ = [
    "QuadratureSpec",
    "MonteCarloSpec",
    "QuadResult",
    "McResult",
    "channel_cutoff",
    "channel_density",
    "channel_sampler",
    "quad_average",
    "average_over_channel",
    "mc_average",
    "detect_metric",
    "auc_metric",
    "rate_metric",
]


def channel_cutoff(params, abs_tol: float) -> float:
    """Finite upper limit L whose analytic tail mass is below abs_tol / 10.

    Shadowed kappa-mu: the SNR is a sum of two Gamma variates, so
    P[gamma > L] <= Q(mu-m, theta1 L/2) + Q(m, theta2 L/2) (union bound on
    the halves).  Fisher-Snedecor: start from the inverted power-law tail
    (1 + omega L)^-m_s scaling and tighten with the exact distribution
    complement.
    """
    target = abs_tol / 10.0
    if isinstance(params, KappaMuShadowedParams):
        L = 10.0 * params.mean_snr + 10.0
        for _ in range(300):
            tail = reg_upper_gamma(params.m, params.theta2 * L / 2.0)
            if params.mu > params.m:
                tail += reg_upper_gamma(params.mu - params.m,
                                        params.theta1 * L / 2.0)
            if tail < target:
                return L
            L *= 1.5
        raise ConvergenceError("no finite cutoff found for kappa-mu tail")
    if isinstance(params, FisherFParams):
        m, ms, omega = params.m, params.m_s, params.omega
        ln_L = (math.log(10.0 / abs_tol) - ms * math.log(omega)
                - (math.lgamma(m) + math.lgamma(ms) - math.lgamma(m + ms))
                - math.log(ms)) / ms
        L = math.exp(min(ln_L, 60.0))
        L = max(L, 10.0 * params.mean_snr)
        while L > 20.0 * params.mean_snr and 1.0 - f_cdf(params, L / 2.0) < target:
            L /= 2.0
        return L
    raise DomainError(f"no cutoff policy for parameter type {type(params)!r}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and cutoff policy for the averaging quadrature."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    upper_cutoff_policy: Callable[[object, float], float] = field(
        default=channel_cutoff)

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 10:
            raise DomainError("max_subdivisions must be >= 10")


@dataclass(frozen=True)
class MonteCarloSpec:
    """Seeded Monte Carlo budget; results are reproducible for a fixed
    (seed, n_streams)."""

    seed: int
    n_samples: int = 10**6
    n_streams: int = 1

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit in 64 unsigned bits")
        if self.n_samples < 10**4:
            raise DomainError("n_samples must be >= 1e4 for statistical use")
        if self.n_streams < 1:
            raise DomainError("n_streams must be >= 1")


class QuadResult(NamedTuple):
    value: float
    error: float


class McResult(NamedTuple):
    mean: float
    std_error: float


def channel_density(params) -> Callable[[float], float]:
    if isinstance(params, KappaMuShadowedParams):
        return lambda g: kms_pdf(params, g)
    if isinstance(params, FisherFParams):
        return lambda g: f_pdf(params, g)
    raise DomainError(f"no density for parameter type {type(params)!r}")


def channel_sampler(params) -> Callable[[np.random.Generator, int], np.ndarray]:
    if isinstance(params, KappaMuShadowedParams):
        return lambda rng, n: kms_sample(params, rng, n)
    if isinstance(params, FisherFParams):
        return lambda rng, n: f_sample(params, rng, n)
    raise DomainError(f"no sampler for parameter type {type(params)!r}")


def quad_average(metric: Callable[[float], float],
                 density: Callable[[float], float],
                 spec: QuadratureSpec = QuadratureSpec(),
                 *,
                 params=None,
                 upper: float | None = None) -> QuadResult:
    """Integral of metric(gamma) * density(gamma) over [0, cutoff].

    The cutoff comes from ``spec.upper_cutoff_policy`` applied to ``params``
    unless ``upper`` overrides it.  The interval is split geometrically so
    heavy-tailed densities integrate accurately piece by piece.
    """
    if upper is None:
        if params is None:
            raise DomainError("quad_average needs channel params or an explicit upper limit")
        upper = spec.upper_cutoff_policy(params, spec.abs_tol)

    edges = [upper]
    e = upper
    while e > 1e-2:
        e /= 6.0
        edges.append(e)
    edges.append(0.0)
    edges.reverse()

    def integrand(g: float) -> float:
        return metric(g) * density(g)

    total = 0.0
    err = 0.0
    per_piece = spec.abs_tol / (2.0 * len(edges))
    for lo, hi in zip(edges, edges[1:]):
        v, a = _integrate.quad(integrand, lo, hi, epsabs=per_piece,
                               epsrel=spec.rel_tol,
                               limit=spec.max_subdivisions)
        total += v
        err += a
    if err > spec.abs_tol + spec.rel_tol * abs(total):
        raise ConvergenceError(
            f"quadrature error estimate {err:.2e} exceeds the requested tolerance")
    return QuadResult(value=total, error=err)


def average_over_channel(metric: Callable[[float], float], params,
                         spec: QuadratureSpec = QuadratureSpec()) -> QuadResult:
    """Convenience wrapper wiring the channel density and cutoff policy."""
    return quad_average(metric, channel_density(params), spec, params=params)


def mc_average(metric: Callable[[np.ndarray], np.ndarray],
               sampler: Callable[[np.random.Generator, int], np.ndarray],
               spec: MonteCarloSpec) -> McResult:
    """Sample mean and standard error of metric(gamma) over channel draws.

    The sample budget is split across ``n_streams`` deterministic
    sub-streams spawned from the seed; streams are reduced in index order,
    so the result is bit-identical for a fixed (seed, n_streams).
    """
    seq = np.random.SeedSequence(spec.seed)
    children = seq.spawn(spec.n_streams)
    base = spec.n_samples // spec.n_streams
    remainder = spec.n_samples % spec.n_streams
    total = 0.0
    total_sq = 0.0
    count = 0
    for idx, child in enumerate(children):
        n = base + (1 if idx < remainder else 0)
        if n == 0:
            continue
        values = np.asarray(metric(sampler(np.random.default_rng(child), n)),
                            dtype=float)
        total += float(np.sum(values))
        total_sq += float(np.sum(values * values))
        count += n
    mean = total / count
    var = max(0.0, (total_sq - count * mean * mean) / (count - 1))
    return McResult(mean=mean, std_error=math.sqrt(var / count))


def detect_metric(u: int, lam: float) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized instantaneous detection probability gamma -> P_d.

    Uses the noncentral chi-square survival function (the detector statistic
    under the signal hypothesis has 2u degrees of freedom and noncentrality
    2 gamma), an implementation independent of the series Marcum-Q.
    """
    def metric(g):
        return _stats.ncx2.sf(lam, 2 * u, 2.0 * np.asarray(g, dtype=float))
    return metric


def auc_metric(u: int) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized instantaneous ROC area gamma -> A(gamma)."""
    def metric(g):
        g = np.asarray(g, dtype=float)
        total = np.zeros_like(g)
        damp = np.exp(-g / 2.0)
        for l in range(u):
            for i in range(l + 1):
                total += (math.comb(l + u - 1, l - i) * 0.5 ** (l + i + u)
                          / math.factorial(i)) * g ** i * damp
        return 1.0 - total
    return metric


def rate_metric(a_exponent: float) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized rate-moment integrand gamma -> (1 + gamma)^-A."""
    def metric(g):
        return np.exp(-a_exponent * np.log1p(np.asarray(g, dtype=float)))
    return metric
