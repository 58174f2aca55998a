"""Asymptotic diagnostics, prediction and the sparsity test for Hollywood networks."""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize, stats as sps
from scipy.special import betaln, gammaln, zeta

from .errors import DomainError, EdgexError, InvalidInputError, RegimeError
from .likelihood import FitResult, fit_mle, log_ascending_factorial
from .network import (
    EdgeLabeledNetwork,
    GrowthTrace,
    NetworkStats,
    geometric_checkpoints,
    restrict,
)
from .samplers import HollywoodParams, SeedLike, make_rng

log = logging.getLogger(__name__)


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise DomainError(f"power-law diagnostics need 0 < alpha < 1, got {alpha}")


def theoretical_degree_pmf(alpha: float, k):
    """Limiting degree pmf ``alpha (1 - alpha)^(k-1 rising) / k!`` (scalar or array ``k``)."""
    _check_alpha(alpha)
    k = np.asarray(k, dtype=float)
    if np.any(k < 1) or np.any(k != np.floor(k)):
        raise DomainError("degrees must be positive integers")
    # alpha Gamma(k - alpha) / (k! Gamma(1 - alpha)) = sin(pi alpha)/pi * B(k - alpha, 1 + alpha);
    # the beta form avoids cancellation between large log-gammas
    out = np.exp(_log_reflection(alpha) + betaln(k - alpha, 1 + alpha))
    return float(out) if out.ndim == 0 else out


def _log_reflection(alpha: float) -> float:
    return math.log(math.sin(math.pi * alpha) / math.pi)


def degree_tail_probability(alpha: float, K: int) -> float:
    """Limiting probability that a degree exceeds ``K``."""
    _check_alpha(alpha)
    if K < 0:
        raise DomainError("K must be nonnegative")
    return float(np.exp(_log_reflection(alpha) + betaln(K + 1 - alpha, alpha)))


def expected_vertices_asymptote(alpha: float, theta: float, mu: float, n: float) -> float:
    """Leading-order ``E v`` after ``n`` interactions of mean arity ``mu``."""
    _check_alpha(alpha)
    if not theta > -alpha:
        raise RegimeError("infinite regime needs theta > -alpha")
    if n < 1 or mu <= 0:
        raise DomainError("need n >= 1 and mu > 0")
    return float(np.exp(gammaln(theta + 1) - gammaln(theta + alpha)) / alpha * (mu * n) ** alpha)


def growth_trace(net: EdgeLabeledNetwork, ratio: float = 1.5) -> GrowthTrace:
    """``(n, v, e, m)`` of the prefixes of ``net`` at geometric checkpoints."""
    if not net.edges:
        raise DomainError("growth trace of an empty network")
    marks = geometric_checkpoints(len(net.edges), ratio)
    rows = []
    seen = set()
    m = 0
    j = 0
    for n, edge in enumerate(net.edges, 1):
        m += len(edge)
        seen.update(edge)
        if n == marks[j]:
            rows.append((n, len(seen), n, m))
            j += 1
    return GrowthTrace(*map(tuple, zip(*rows)))


def alpha_diversity_estimate(trace: GrowthTrace, alpha: float) -> Tuple[float, List[Tuple[int, float]]]:
    """``v / e ** alpha`` at the last checkpoint, plus the trailing ``(n, estimate)`` sequence."""
    _check_alpha(alpha)
    if len(trace) == 0:
        raise DomainError("empty trace")
    if trace.e[-1] == 0:
        raise DomainError("alpha-diversity undefined with e = 0")
    seq = [(n, v / e**alpha) for n, v, e in zip(trace.n, trace.v, trace.e) if e > 0]
    return seq[-1][1], seq


def sparsity_curve(trace: GrowthTrace) -> List[Tuple[int, float]]:
    """``e / v ** (m / e)`` at every checkpoint."""
    out = []
    for n, v, e, m in trace.rows():
        if v < 1:
            raise DomainError(f"no vertices at checkpoint n={n}")
        out.append((n, e / float(v) ** (m / e)))
    return out


def predict_new_vertex_probability(s: NetworkStats, params: HollywoodParams) -> float:
    """Probability that the next interaction involves at least one unseen vertex.

    Given ``v`` vertices and total degree ``m``, an interaction of arity ``k``
    uses only seen vertices with probability
    ``(m - alpha v)^(k rising) / (theta + m)^(k rising)``.
    """
    if s.m == 0:
        return 1.0
    if params.k is not None and s.v > params.k:
        raise RegimeError(f"network has {s.v} vertices, more than k={params.k}")
    a, t = params.alpha, params.theta
    stay = 0.0
    for k, p in params.nu.probs.items():
        num, sn = log_ascending_factorial(s.m - a * s.v, k)
        den, sd = log_ascending_factorial(t + s.m, k)
        stay += p * sn * sd * math.exp(num - den)
    return float(min(1.0, max(0.0, 1.0 - stay)))


def cross_validate_prediction(
    net: EdgeLabeledNetwork,
    sample_size: int,
    iterations: int,
    seed: SeedLike = None,
    regime: str = "infinite",
    k: Optional[int] = None,
) -> Tuple[float, float, List[float]]:
    """Data-splitting check of the predictive probability of a new vertex.

    Each iteration samples ``sample_size`` interactions uniformly without
    replacement, fits the model to them and compares the predicted
    probability with the fraction of held-out interactions containing a
    vertex absent from the sample.  Returns the mean and standard deviation
    of the relative error ``(predicted - empirical) / empirical`` and the
    per-iteration errors.
    """
    n = len(net.edges)
    if not 0 < sample_size < n:
        raise InvalidInputError(f"sample size {sample_size} leaves no held-out interactions out of {n}")
    if iterations < 1:
        raise InvalidInputError("need at least one iteration")
    rng = make_rng(seed)
    # flat role array with edge offsets so the held-out scan is vectorized
    sizes = np.fromiter((len(e) for e in net.edges), dtype=np.int64, count=n)
    roles = np.fromiter((x for e in net.edges for x in e), dtype=np.int64, count=int(sizes.sum()))
    owner = np.repeat(np.arange(n), sizes)
    errors = []
    for it in range(1, iterations + 1):
        chosen = rng.choice(n, size=sample_size, replace=False)
        mask = np.zeros(n, dtype=bool)
        mask[chosen] = True
        sample = restrict(net, (int(i) + 1 for i in chosen))
        seen = np.zeros(int(roles.max(initial=0)) + 1, dtype=bool)
        seen[roles[mask[owner]]] = True
        has_new = np.zeros(n, dtype=bool)
        has_new[owner[~seen[roles]]] = True
        empirical = int(np.count_nonzero(has_new & ~mask)) / (n - sample_size)
        try:
            fit = fit_mle(sample, regime, k)
        except EdgexError as exc:
            raise type(exc)(f"cross-validation iteration {it}: {exc}") from exc
        if not fit.converged:
            raise EdgexError(f"cross-validation iteration {it}: fit did not converge")
        if empirical == 0:
            raise DomainError(f"cross-validation iteration {it}: no held-out interaction has a new vertex")
        pred = predict_new_vertex_probability(sample.stats, fit.params())
        errors.append((pred - empirical) / empirical)
    arr = np.array(errors)
    sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return float(arr.mean()), sd, errors


@dataclass
class SparsityTestResult:
    null_hypothesis: str
    alpha: float
    se_alpha: float
    threshold: float
    statistic: float
    p_value: float
    reject: bool
    level: float
    caveat: str

    def to_dict(self) -> dict:
        return asdict(self)


SPARSITY_CAVEAT = (
    "The test presupposes an infinite vertex population (alpha > 0). "
    "It is degenerate on thresholded data: after standard projection every "
    "alpha > 0 yields a sparse network, so a projected-data fit cannot separate "
    "sparse from dense."
)


def sparsity_test(fit: FitResult, mu: float, level: float = 0.05) -> SparsityTestResult:
    """One-sided Wald test of ``alpha <= 1/mu`` against ``alpha > 1/mu``."""
    if fit.regime != "infinite":
        raise RegimeError(
            "sparsity testing only makes sense for an infinite population; "
            "a finite-regime fit has a bounded number of vertices"
        )
    if mu <= 0:
        raise DomainError("mean arity must be positive")
    if fit.se_alpha is None or not fit.se_alpha > 0:
        raise DomainError("fit has no usable standard error for alpha")
    thr = 1.0 / mu
    z = (fit.alpha - thr) / fit.se_alpha
    p = float(sps.norm.sf(z))
    return SparsityTestResult(
        null_hypothesis=f"0 < alpha <= {thr:.6g}",
        alpha=fit.alpha,
        se_alpha=fit.se_alpha,
        threshold=thr,
        statistic=float(z),
        p_value=p,
        reject=p < level,
        level=level,
        caveat=SPARSITY_CAVEAT,
    )


def degree_distribution(s: NetworkStats) -> List[Tuple[int, int, float]]:
    """Rows ``(k, N_k, d_k)`` over observed degrees."""
    if s.d is None:
        raise DomainError("degree distribution of an empty network")
    return [(k, c, s.d[k]) for k, c in s.N.items()]


def loglog_slope(s: NetworkStats, min_count: int = 5, quantile: float = 0.95) -> float:
    """Least-squares slope of ``log d_k`` on ``log k``.

    Uses degrees with ``N_k >= min_count`` up to the ``quantile`` of the
    vertex degree distribution.  Intended for display; it is biased toward
    steeper slopes by the curvature of the pmf at small ``k``.
    """
    if s.d is None:
        raise DomainError("empty network")
    ks = np.array(list(s.N.keys()))
    cs = np.array(list(s.N.values()))
    cut = ks[np.searchsorted(np.cumsum(cs) / cs.sum(), quantile)]
    keep = (cs >= min_count) & (ks <= cut)
    if keep.sum() < 2:
        raise DomainError("fewer than two degrees qualify for the slope fit")
    x = np.log(ks[keep])
    y = np.log(cs[keep] / cs.sum())
    return float(np.polyfit(x, y, 1)[0])


def tail_exponent(s: NetworkStats, kmin: int = 10) -> float:
    """Maximum-likelihood exponent ``gamma`` of a discrete power law ``k^-gamma`` on ``k >= kmin``.

    The log-log slope of the degree tail is ``-gamma``.
    """
    if kmin < 1:
        raise DomainError("kmin must be positive")
    ks = np.array([k for k in s.N if k >= kmin], dtype=float)
    cs = np.array([s.N[int(k)] for k in ks], dtype=float)
    if cs.sum() < 2:
        raise DomainError(f"fewer than two vertices with degree >= {kmin}")
    total, slog = cs.sum(), float(np.dot(cs, np.log(ks)))
    f = lambda g: g * slog + total * math.log(zeta(g, kmin))
    res = optimize.minimize_scalar(f, bounds=(1.0 + 1e-6, 10.0), method="bounded", options={"xatol": 1e-10})
    return float(res.x)
