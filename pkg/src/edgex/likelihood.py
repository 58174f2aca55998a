"""Exact likelihood and maximum-likelihood fitting for the Hollywood model.

The log-likelihood of an observed network depends only on ``v``, ``m``, the
arity counts ``M_k`` and the degree counts ``N_k``::

    sum_k M_k log nu_k + sum_{j=1}^{v-1} log(theta + j alpha)
        - sum_{j=1}^{m-1} log(theta + j)
        + sum_k N_k [lgamma(k - alpha) - lgamma(1 - alpha)]

so every routine here works from :class:`~edgex.network.NetworkStats`.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import optimize
from scipy.special import digamma, gammaln, polygamma

from .errors import DomainError, InvalidInputError, RegimeError
from .network import EdgeLabeledNetwork, NetworkStats
from .samplers import AritySpec, HollywoodParams

log = logging.getLogger(__name__)

StatsLike = Union[EdgeLabeledNetwork, NetworkStats]


def _stats(x: StatsLike) -> NetworkStats:
    return x.stats if isinstance(x, EdgeLabeledNetwork) else x


def log_ascending_factorial(x: float, n: int) -> Tuple[float, int]:
    """``log|x^(n)|`` and the sign of ``x (x+1) ... (x+n-1)``.

    Returns ``(-inf, 0)`` when a factor is zero.
    """
    if n < 0:
        raise DomainError("ascending factorial needs n >= 0")
    if n == 0:
        return 0.0, 1
    if x > 0:
        return float(gammaln(x + n) - gammaln(x)), 1
    terms = x + np.arange(n)
    if np.any(terms == 0):
        return -math.inf, 0
    sign = -1 if np.count_nonzero(terms < 0) % 2 else 1
    return float(np.sum(np.log(np.abs(terms)))), sign


def _degree_arrays(s: NetworkStats):
    k = np.fromiter(s.N.keys(), dtype=float, count=len(s.N))
    c = np.fromiter(s.N.values(), dtype=float, count=len(s.N))
    return k, c


def _log_vertex_term(alpha: float, theta: float, v: int) -> float:
    # sum_{j=1}^{v-1} log(theta + j alpha)
    if v <= 1:
        return 0.0
    if alpha > 0:
        r = theta / alpha
        return (v - 1) * math.log(alpha) + float(gammaln(r + v) - gammaln(r + 1))
    terms = theta + alpha * np.arange(1, v)
    if np.any(terms <= 0):
        return -math.inf
    return float(np.sum(np.log(terms)))


def _log_edge_term(theta: float, m: int) -> float:
    # sum_{j=1}^{m-1} log(theta + j)
    if m <= 1:
        return 0.0
    return float(gammaln(theta + m) - gammaln(theta + 1))


def _partition_loglik(alpha: float, theta: float, s: NetworkStats) -> float:
    """Log-likelihood without the arity factor."""
    k, c = _degree_arrays(s)
    deg = float(np.dot(c, gammaln(k - alpha) - gammaln(1 - alpha)))
    return _log_vertex_term(alpha, theta, s.v) - _log_edge_term(theta, s.m) + deg


def arity_loglik(nu: AritySpec, s: NetworkStats) -> float:
    out = 0.0
    for k, c in s.M.items():
        p = nu[k]
        if p == 0:
            log.info("arity %d has probability zero under nu", k)
            return -math.inf
        out += c * math.log(p)
    return out


def hollywood_log_pmf(x: StatsLike, params: HollywoodParams) -> float:
    """Exact log-probability of a directed network under the Hollywood model.

    Returns ``-inf`` when the network uses an arity outside the support of
    ``nu`` or has more vertices than a finite population allows.
    """
    s = _stats(x)
    if s.e == 0:
        return 0.0
    if params.k is not None and s.v > params.k:
        log.info("network has %d vertices, more than the finite population k=%d", s.v, params.k)
        return -math.inf
    a = arity_loglik(params.nu, s)
    if a == -math.inf:
        return a
    return a + _partition_loglik(params.alpha, params.theta, s)


def score_alpha(alpha: float, theta: float, x: StatsLike) -> float:
    s = _stats(x)
    k, c = _degree_arrays(s)
    j = np.arange(1, s.v)
    return float(np.sum(j / (theta + j * alpha)) - np.dot(c, digamma(k - alpha) - digamma(1 - alpha)))


def score_theta(alpha: float, theta: float, x: StatsLike) -> float:
    s = _stats(x)
    j = np.arange(1, s.v)
    edge = digamma(theta + s.m) - digamma(theta + 1) if s.m > 1 else 0.0
    return float(np.sum(1.0 / (theta + j * alpha)) - edge)


def hessian(alpha: float, theta: float, x: StatsLike) -> np.ndarray:
    """Second derivatives of the log-likelihood in ``(alpha, theta)``."""
    s = _stats(x)
    k, c = _degree_arrays(s)
    j = np.arange(1, s.v)
    q = 1.0 / (theta + j * alpha) ** 2
    trig = lambda z: polygamma(1, z)
    haa = -np.sum(j * j * q) + np.dot(c, trig(k - alpha) - trig(1 - alpha))
    hat = -np.sum(j * q)
    htt = -np.sum(q) + (trig(theta + 1) - trig(theta + s.m) if s.m > 1 else 0.0)
    return np.array([[haa, hat], [hat, htt]], dtype=float)


def _finite_profile_score(alpha: float, k: int, s: NetworkStats) -> float:
    # d/d alpha of the log-likelihood with theta = -k alpha
    kk, c = _degree_arrays(s)
    j = np.arange(1, s.m)
    return float(
        (s.v - 1) / alpha
        + np.sum(k / (j - k * alpha))
        - np.dot(c, digamma(kk - alpha) - digamma(1 - alpha))
    )


def _finite_profile_curvature(alpha: float, k: int, s: NetworkStats) -> float:
    kk, c = _degree_arrays(s)
    j = np.arange(1, s.m)
    return float(
        -(s.v - 1) / alpha**2
        + np.sum(k * k / (j - k * alpha) ** 2)
        + np.dot(c, polygamma(1, kk - alpha) - polygamma(1, 1 - alpha))
    )


def fit_nu(x: StatsLike) -> AritySpec:
    """Maximum-likelihood arity distribution ``M_k / e``."""
    s = _stats(x)
    if s.e == 0:
        raise DomainError("cannot fit arity distribution to an empty network")
    return AritySpec.from_counts(s.M)


@dataclass
class FitResult:
    alpha: float
    theta: float
    se_alpha: Optional[float]
    se_theta: Optional[float]
    nu: Dict[int, float]
    loglik: float
    regime: str
    k: Optional[int]
    iterations: int
    converged: bool
    boundary_hit: bool
    loglik_trace: List[float] = field(default_factory=list, repr=False)
    provenance: Dict[str, object] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    alternative: Optional["FitResult"] = field(default=None, repr=False)

    def params(self) -> HollywoodParams:
        nu = AritySpec(self.nu)
        if self.regime == "finite":
            return HollywoodParams.finite(self.alpha, self.k, nu)
        return HollywoodParams(self.alpha, self.theta, nu)

    def to_dict(self) -> dict:
        d = {
            key: value
            for key, value in asdict(self).items()
            if key not in ("loglik_trace", "alternative")
        }
        d["nu"] = {str(k): p for k, p in self.nu.items()}
        if self.alternative is not None:
            d["alternative"] = self.alternative.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


_TOL = 1e-8
_EPS = 1e-9


def _root(f, lo, hi):
    return optimize.brentq(f, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)


def _solve_alpha(theta: float, s: NetworkStats) -> Tuple[float, bool]:
    """Maximize over alpha in the infinite regime for fixed theta."""
    lo = max(_EPS, -theta + _EPS * max(1.0, abs(theta)))
    hi = 1.0 - _EPS
    if lo >= hi:
        return hi, True
    f = lambda a: score_alpha(a, theta, s)
    flo, fhi = f(lo), f(hi)
    if flo <= 0:
        return lo, True
    if fhi >= 0:
        return hi, True
    return _root(f, lo, hi), False


def _solve_theta(alpha: float, s: NetworkStats) -> Tuple[float, bool]:
    """Maximize over theta > -alpha for fixed alpha, via theta = -alpha + exp(eta)."""
    f = lambda eta: score_theta(alpha, -alpha + math.exp(eta), s)
    lo, hi = -30.0, 2.0
    if f(lo) <= 0:
        return -alpha + math.exp(lo), True
    while f(hi) > 0:
        hi += 4.0
        if hi > 50.0:
            return -alpha + math.exp(50.0), True
    return -alpha + math.exp(_root(f, lo, hi)), False


def _infinite_fit(s: NetworkStats, max_sweeps: int, alpha0: float, theta0: float):
    alpha, theta = alpha0, theta0
    trace = [_partition_loglik(alpha, theta, s)]
    boundary = False
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        new_alpha, b1 = _solve_alpha(theta, s)
        new_theta, b2 = _solve_theta(new_alpha, s)
        boundary = b1 or b2
        da = abs(new_alpha - alpha)
        dt = abs(new_theta - theta) / (1.0 + abs(theta))
        alpha, theta = new_alpha, new_theta
        trace.append(_partition_loglik(alpha, theta, s))
        if da < _TOL and dt < _TOL:
            converged = True
            break
    return alpha, theta, sweeps, converged, boundary, trace


def _finite_fit(s: NetworkStats, k: int):
    if s.v > k:
        raise RegimeError(f"network has {s.v} vertices, more than the finite population k={k}")
    f = lambda a: _finite_profile_score(a, k, s)
    hi = -_EPS
    lo = -4.0
    while f(lo) < 0:
        lo *= 2
        if lo < -1e8:
            return lo, True
    if f(hi) > 0:
        return hi, True
    return _root(f, lo, hi), False


def _standard_errors(alpha, theta, s, regime, k):
    try:
        if regime == "finite":
            info = -_finite_profile_curvature(alpha, k, s)
            if not info > 0:
                raise np.linalg.LinAlgError
            se_a = math.sqrt(1.0 / info)
            return se_a, k * se_a
        cov = np.linalg.inv(-hessian(alpha, theta, s))
        if cov[0, 0] <= 0 or cov[1, 1] <= 0:
            raise np.linalg.LinAlgError
        return math.sqrt(cov[0, 0]), math.sqrt(cov[1, 1])
    except np.linalg.LinAlgError:
        log.warning("observed information is not positive definite; standard errors unavailable")
        return None, None


def fit_mle(
    x: StatsLike,
    regime: str = "infinite",
    k: Optional[int] = None,
    *,
    directed: Optional[bool] = None,
    max_sweeps: int = 500,
    init: Tuple[float, float] = (0.5, 1.0),
) -> FitResult:
    """Maximum-likelihood estimate of ``(alpha, theta)`` with ``nu`` at ``M_k / e``.

    ``regime`` is ``"infinite"``, ``"finite"`` (population ``k``, default ``v``)
    or ``"auto"``, which fits both and keeps the one with the higher likelihood.
    The infinite fit alternates one-dimensional root finds in ``alpha`` and
    ``theta``; the finite fit solves the profile score in ``alpha``.
    """
    if isinstance(x, EdgeLabeledNetwork) and directed is None:
        directed = x.directed
    s = _stats(x)
    if s.e == 0 or s.v == 0:
        raise DomainError("cannot fit an empty network")
    if regime == "auto":
        fits = [fit_mle(s, "infinite", directed=directed, max_sweeps=max_sweeps, init=init),
                fit_mle(s, "finite", k, directed=directed)]
        fits.sort(key=lambda r: r.loglik, reverse=True)
        best, other = fits
        best.alternative = other
        best.notes.append(f"auto: {best.regime} regime chosen over {other.regime} "
                          f"(loglik {best.loglik:.6f} vs {other.loglik:.6f})")
        return best
    nu = fit_nu(s)
    notes = []
    if directed is False:
        notes.append("undirected input: log-likelihood is determined up to an additive constant")
    if regime == "infinite":
        alpha, theta, sweeps, converged, boundary, trace = _infinite_fit(s, max_sweeps, *init)
        kk = None
    elif regime == "finite":
        kk = s.v if k is None else int(k)
        alpha, boundary = _finite_fit(s, kk)
        theta = -kk * alpha
        sweeps, converged = 1, not boundary
        trace = [_partition_loglik(alpha, theta, s)]
    else:
        raise InvalidInputError(f"unknown regime {regime!r}")
    if boundary:
        notes.append("estimate on the boundary of the parameter space")
    if not converged:
        log.warning("MLE did not converge after %d sweeps", sweeps)
    se_a, se_t = (None, None) if boundary else _standard_errors(alpha, theta, s, regime, kk)
    loglik = arity_loglik(nu, s) + _partition_loglik(alpha, theta, s)
    return FitResult(
        alpha=float(alpha),
        theta=float(theta),
        se_alpha=se_a,
        se_theta=se_t,
        nu=dict(nu.probs),
        loglik=float(loglik),
        regime=regime,
        k=kk,
        iterations=sweeps,
        converged=converged,
        boundary_hit=boundary,
        loglik_trace=trace,
        notes=notes,
    )


@dataclass
class YuleFit:
    """Maximum-likelihood Yule-Simon fit to the degree sequence."""

    gamma: float
    loglik: float
    boundary_hit: bool

    def to_dict(self) -> dict:
        return asdict(self)


def yule_loglik(gamma: float, x: StatsLike) -> float:
    """``sum_k N_k log[(gamma - 1) B(k, gamma)]`` over observed degrees."""
    s = _stats(x)
    k, c = _degree_arrays(s)
    lp = math.log(gamma - 1) + gammaln(gamma) + gammaln(k) - gammaln(k + gamma)
    return float(np.dot(c, lp))


def fit_yule(x: StatsLike) -> YuleFit:
    s = _stats(x)
    if s.v == 0:
        raise DomainError("cannot fit a Yule distribution without vertices")
    f = lambda g: -yule_loglik(g, s)
    lo, hi = 1.0 + 1e-9, 10.0
    # widen the bracket until the maximum is interior; an increasing profile is a boundary case
    while True:
        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
        if res.x < 0.9 * hi:
            boundary = res.x - lo < 1e-6
            break
        if hi >= 1e6:
            boundary = True
            break
        hi *= 10
    g = float(res.x)
    return YuleFit(gamma=g, loglik=-float(res.fun), boundary_hit=bool(boundary))
