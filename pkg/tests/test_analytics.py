import math

import numpy as np
import pytest
from scipy.special import gamma as G

from edgex.analytics import (
    alpha_diversity_estimate,
    cross_validate_prediction,
    degree_tail_probability,
    expected_vertices_asymptote,
    growth_trace,
    loglog_slope,
    predict_new_vertex_probability,
    sparsity_curve,
    sparsity_test,
    tail_exponent,
    theoretical_degree_pmf,
)
from edgex.errors import DomainError, InvalidInputError, RegimeError
from edgex.likelihood import FitResult, fit_mle
from edgex.network import GrowthTrace, NetworkStats, canonicalize, prefix
from edgex.samplers import AritySpec, HollywoodParams, hollywood_simulate
from oracles import urn_new_vertex_prob

BIN = AritySpec.point(2)
NU = AritySpec({1: 0.2, 2: 0.5, 4: 0.3})


class TestDegreePmf:
    def test_values(self):
        assert theoretical_degree_pmf(0.5, 1) == pytest.approx(0.5)
        assert theoretical_degree_pmf(0.5, 2) == pytest.approx(0.125)
        assert theoretical_degree_pmf(0.5, 3) == pytest.approx(0.0625)

    def test_rising_factorial_form(self):
        a = 0.37
        for k in range(1, 12):
            rising = math.prod(1 - a + i for i in range(k - 1))
            assert theoretical_degree_pmf(a, k) == pytest.approx(a * rising / math.factorial(k), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    def test_sums_to_one_with_tail(self, alpha):
        K = 10**6
        body = math.fsum(theoretical_degree_pmf(alpha, np.arange(1, K + 1)))
        assert body + degree_tail_probability(alpha, K) == pytest.approx(1.0, abs=1e-10)

    def test_asymptotic_ratio(self):
        a, k = 0.5, 10**4
        ratio = theoretical_degree_pmf(a, k) * G(1 - a) * k ** (a + 1) / a
        assert abs(ratio - 1) < 0.01

    def test_domain(self):
        with pytest.raises(DomainError):
            theoretical_degree_pmf(1.2, 3)
        with pytest.raises(DomainError):
            theoretical_degree_pmf(0.5, 0)


class TestAsymptote:
    def test_value(self):
        n = 10**4
        assert expected_vertices_asymptote(0.5, 1, 2, n) == pytest.approx(2 / G(1.5) * (2 * n) ** 0.5)
        assert 2 / G(1.5) == pytest.approx(2.2568, abs=1e-4)

    def test_mu_scaling(self):
        a = 0.3
        r = expected_vertices_asymptote(a, 1.0, 4, 100) / expected_vertices_asymptote(a, 1.0, 2, 100)
        assert r == pytest.approx(2**a)

    def test_regime(self):
        with pytest.raises(RegimeError):
            expected_vertices_asymptote(0.5, -0.6, 2, 10)
        with pytest.raises(DomainError):
            expected_vertices_asymptote(-0.5, 1, 2, 10)

    def test_exact_expectation_approaches(self):
        # E v_{m+1} = E v_m + (theta + alpha E v_m) / (theta + m), counting roles
        a, t, m = 0.5, 1.0, 2 * 10**5
        ev = 1.0
        for j in range(1, m):
            ev += (t + a * ev) / (t + j)
        assert ev / expected_vertices_asymptote(a, t, 2, m // 2) == pytest.approx(1.0, abs=0.01)


class TestGrowth:
    def test_trace_matches_prefixes(self):
        net = hollywood_simulate(HollywoodParams(0.5, 1.0, NU), 3000, 2)
        tr = growth_trace(net)
        for n, v, e, m in tr.rows():
            s = prefix(net, n).stats
            assert (v, e, m) == (s.v, s.e, s.m)

    def test_undirected_trace(self):
        net = canonicalize([(1, 2), (2, 3), (1, 3), (4, 4)], directed=False)
        assert growth_trace(net).rows()[-1] == (4, 4, 4, 8)

    def test_diversity_examples(self):
        tr = GrowthTrace((1, 4, 9), (1, 2, 3), (1, 4, 9), (2, 8, 18))
        est, seq = alpha_diversity_estimate(tr, 0.5)
        assert est == pytest.approx(1.0) and [x for _, x in seq] == pytest.approx([1, 1, 1])

    def test_diversity_bounded_numerator(self):
        net = hollywood_simulate(HollywoodParams.finite(-1.0, 5, BIN), 100000, 1)
        _, seq = alpha_diversity_estimate(growth_trace(net), 0.5)
        assert seq[-1][1] < 0.05 and seq[-1][1] < seq[len(seq) // 2][1]

    def test_diversity_zero_edges(self):
        with pytest.raises(DomainError):
            alpha_diversity_estimate(GrowthTrace((), (), (), ()), 0.5)

    def test_sparsity_curve(self):
        tr = GrowthTrace((1, 2), (2, 3), (1, 2), (2, 4))
        assert sparsity_curve(tr) == [(1, 0.25), (2, pytest.approx(2 / 9))]


class TestPrediction:
    def test_empty_network(self):
        s = canonicalize([]).stats
        assert predict_new_vertex_probability(s, HollywoodParams(0.5, -0.2, NU)) == 1.0

    @pytest.mark.parametrize(
        "params",
        [HollywoodParams(0.5, 1.0, NU), HollywoodParams(0.2, -0.1, NU), HollywoodParams.finite(-0.5, 9, NU)],
    )
    def test_matches_role_by_role_complement(self, params):
        net = canonicalize([(1, 2), (2, 3, 3, 1), (4,)])
        s = net.stats
        want = urn_new_vertex_prob(s.v, s.m, params.alpha, params.theta, params.nu.probs)
        assert predict_new_vertex_probability(s, params) == pytest.approx(want, rel=1e-12)

    def test_decreasing_in_total_degree(self):
        params = HollywoodParams(0.4, 2.0, NU)
        probs = [
            predict_new_vertex_probability(NetworkStats(10, 0, m, {}, {}, None, None), params)
            for m in range(10, 200, 7)
        ]
        assert all(b < a for a, b in zip(probs, probs[1:]))

    def test_finite_regime_full(self):
        net = canonicalize([(1, 2), (3, 3)])
        params = HollywoodParams.finite(-1.0, 3, BIN)
        assert predict_new_vertex_probability(net.stats, params) == pytest.approx(0.0, abs=1e-15)


class TestCrossValidation:
    def test_degenerate_split(self):
        net = hollywood_simulate(HollywoodParams(0.5, 1.0, BIN), 100, 1)
        with pytest.raises(InvalidInputError):
            cross_validate_prediction(net, 100, 3, seed=1)

    def test_calibrated_on_model_data(self):
        net = hollywood_simulate(HollywoodParams(0.6, 3.0, BIN), 20000, 4)
        mean, sd, errors = cross_validate_prediction(net, 1000, 20, seed=2)
        assert len(errors) == 20
        assert abs(mean) < 3 * sd

    def test_failure_carries_iteration(self):
        net = hollywood_simulate(HollywoodParams(0.7, 5.0, BIN), 500, 1)
        with pytest.raises(RegimeError, match="iteration 1"):
            cross_validate_prediction(net, 100, 2, seed=0, regime="finite", k=2)

    def test_no_new_vertices_held_out(self):
        net = canonicalize([(1, 1)] * 50 + [(2, 2)] * 50)
        with pytest.raises(DomainError, match="iteration"):
            cross_validate_prediction(net, 60, 5, seed=0)


def _fit(alpha, se, regime="infinite"):
    return FitResult(alpha, 1.0, se, 1.0, {2: 1.0}, 0.0, regime, None, 1, True, False)


class TestSparsityTest:
    def test_null_boundary(self):
        r = sparsity_test(_fit(0.5, 0.1), 2)
        assert r.statistic == 0 and r.p_value == pytest.approx(0.5)

    def test_low_alpha_not_rejected(self):
        r = sparsity_test(_fit(0.13, 0.003), 2)
        assert not r.reject and r.p_value > 0.99
        assert "infinite" in r.caveat and "projection" in r.caveat

    def test_refuses_finite(self):
        with pytest.raises(RegimeError):
            sparsity_test(_fit(-0.5, 0.1, "finite"), 2)

    def test_power(self):
        rejects = 0
        for seed in range(10):
            net = hollywood_simulate(HollywoodParams(0.8, 1.0, BIN), 20000, seed)
            rejects += sparsity_test(fit_mle(net), net.stats.m_avg).reject
        assert rejects >= 9


class TestSlopes:
    def test_tail_exponent_on_exact_counts(self):
        # large counts proportional to the limiting pmf, truncated far in the tail
        a = 0.67
        k = np.arange(1, 200001)
        counts = np.round(theoretical_degree_pmf(a, k) * 1e12).astype(int)
        s = NetworkStats(int(counts.sum()), 0, 0, {}, {int(x): int(c) for x, c in zip(k, counts) if c}, None, None)
        assert tail_exponent(s) == pytest.approx(1 + a, abs=0.05)

    def test_loglog_slope_needs_points(self):
        s = canonicalize([(1, 2)]).stats
        with pytest.raises(DomainError):
            loglog_slope(s)

    def test_loglog_slope_exact_power(self):
        k = np.arange(1, 60)
        counts = np.round(1e9 * k**-2.0).astype(int)
        s = NetworkStats(int(counts.sum()), 0, 0, {}, dict(zip(k.tolist(), counts.tolist())), {1: 1.0}, None)
        assert loglog_slope(s, quantile=1.0) == pytest.approx(-2.0, abs=0.01)
