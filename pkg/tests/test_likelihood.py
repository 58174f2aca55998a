import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.special import gammaln

from edgex.errors import DomainError, InvalidInputError, RegimeError
from edgex.io import load_network
from edgex.likelihood import (
    _partition_loglik as ll,
    fit_mle,
    fit_nu,
    fit_yule,
    hessian,
    hollywood_log_pmf,
    log_ascending_factorial,
    score_alpha,
    score_theta,
    yule_loglik,
)
from edgex.network import canonicalize
from edgex.samplers import AritySpec, HollywoodParams, hollywood_simulate
from oracles import canonical_networks, rel_err, sequential_prob

DATA = Path(__file__).parent / "data"
NU12 = AritySpec({1: 0.4, 2: 0.6})
BIN = AritySpec.point(2)


class TestAscendingFactorial:
    @pytest.mark.parametrize("x,n", [(0.5, 4), (3.0, 0), (2.25, 7), (-2.5, 4), (-3.0, 2), (-0.5, 3)])
    def test_against_product(self, x, n):
        prod = Fraction(1)
        for i in range(n):
            prod *= Fraction(x) + i
        logabs, sign = log_ascending_factorial(x, n)
        assert sign == (prod > 0) - (prod < 0)
        assert math.exp(logabs) == pytest.approx(abs(float(prod)), rel=1e-12)

    def test_zero_factor(self):
        assert log_ascending_factorial(-2.0, 3) == (-math.inf, 0)

    def test_negative_n(self):
        with pytest.raises(DomainError):
            log_ascending_factorial(1.0, -1)


class TestPmf:
    def test_first_edge(self):
        p = HollywoodParams(0.5, 1.0, NU12)
        # one unary edge: nu_1; one binary self-loop: nu_2 (1 - alpha) / (theta + 1)
        assert math.exp(hollywood_log_pmf(canonicalize([(1,)]), p)) == pytest.approx(0.4)
        assert math.exp(hollywood_log_pmf(canonicalize([(1, 1)]), p)) == pytest.approx(0.6 * 0.5 / 2.0)

    def test_exact_rational_oracle(self):
        # exact arithmetic through the sequential urn for a handful of networks
        a, t = Fraction(1, 3), Fraction(3, 4)
        nu = {1: Fraction(1, 4), 2: Fraction(3, 4)}
        params = HollywoodParams(float(a), float(t), AritySpec({1: 0.25, 2: 0.75}))
        for net in list(canonical_networks(3, [1, 2]))[::7]:
            exact = sequential_prob(net, a, t, nu)
            assert rel_err(math.exp(hollywood_log_pmf(net, params)), float(exact)) < 1e-12

    def test_foreign_arity(self):
        p = HollywoodParams(0.5, 1.0, BIN)
        assert hollywood_log_pmf(canonicalize([(1, 2, 3)]), p) == -math.inf

    def test_too_many_vertices(self):
        p = HollywoodParams.finite(-1.0, 2, BIN)
        assert hollywood_log_pmf(canonicalize([(1, 2), (3, 3)]), p) == -math.inf

    def test_negative_theta_infinite_regime(self):
        p = HollywoodParams(0.5, -0.3, NU12)
        for net in canonical_networks(3, [1, 2]):
            got = hollywood_log_pmf(net, p)
            want = sequential_prob(net, 0.5, -0.3, NU12.probs)
            assert rel_err(math.exp(got), want) < 1e-10

    def test_normalizes_n4(self):
        for params in (HollywoodParams(0.3, 2.0, NU12), HollywoodParams.finite(-0.5, 3, NU12)):
            total = math.fsum(math.exp(hollywood_log_pmf(n, params)) for n in canonical_networks(4, [1, 2]))
            assert total == pytest.approx(1.0, abs=1e-10)


def _fd(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


@pytest.fixture(scope="module")
def net():
    return hollywood_simulate(HollywoodParams(0.5, 2.0, NU12), 400, 3)


class TestScores:
    def test_scores_match_differences(self, net):
        s = net.stats
        for a, t in [(0.3, 1.0), (0.7, -0.5), (0.5, 20.0), (-0.5, 200.0)]:
            h = 1e-5
            assert rel_err(score_alpha(a, t, s), _fd(lambda x: ll(x, t, s), a, h)) < 1e-5
            assert rel_err(score_theta(a, t, s), _fd(lambda y: ll(a, y, s), t, h * (1 + abs(t)))) < 1e-5

    def test_hessian_matches_score_differences(self, net):
        s = net.stats
        a, t, h = 0.45, 1.5, 1e-5
        H = hessian(a, t, s)
        assert rel_err(H[0, 0], _fd(lambda x: score_alpha(x, t, s), a, h)) < 1e-5
        assert rel_err(H[1, 1], _fd(lambda y: score_theta(a, y, s), t, h)) < 1e-5
        assert rel_err(H[0, 1], _fd(lambda y: score_alpha(a, y, s), t, h)) < 1e-5


class TestFit:
    def test_fit_nu(self):
        nu = fit_nu(canonicalize([(1,), (1, 2), (2, 3), (1, 2, 3)]))
        assert nu.probs == pytest.approx({1: 0.25, 2: 0.5, 3: 0.25})

    def test_scores_vanish_at_mle(self):
        net = hollywood_simulate(HollywoodParams(0.6, 2.0, NU12), 20000, 4)
        fit = fit_mle(net)
        assert fit.converged and not fit.boundary_hit
        assert abs(score_alpha(fit.alpha, fit.theta, net.stats)) < 1e-4
        assert abs(score_theta(fit.alpha, fit.theta, net.stats)) < 1e-4
        assert fit.se_alpha > 0 and fit.se_theta > 0
        assert fit.nu == pytest.approx(fit_nu(net).probs)
        assert fit.loglik == pytest.approx(hollywood_log_pmf(net, fit.params()))

    def test_mle_beats_grid(self):
        net = hollywood_simulate(HollywoodParams(0.4, 5.0, BIN), 5000, 9)
        fit = fit_mle(net)
        p = lambda a, t: hollywood_log_pmf(net, HollywoodParams(a, t, BIN))
        for da in (-0.01, 0.0, 0.01):
            for dt in (-0.3, 0.0, 0.3):
                assert p(fit.alpha + da, fit.theta + dt) <= fit.loglik + 1e-9

    def test_monotone_sweeps(self):
        net = hollywood_simulate(HollywoodParams(0.3, 10.0, NU12), 5000, 5)
        fit = fit_mle(net, init=(0.9, 0.1))
        trace = fit.loglik_trace
        assert len(trace) > 2
        assert all(b >= a - 1e-9 * abs(a) for a, b in zip(trace, trace[1:]))

    def test_finite_regime(self):
        net = hollywood_simulate(HollywoodParams.finite(-1.0, 30, BIN), 2000, 5)
        fit = fit_mle(net, "finite", 30)
        assert fit.alpha < 0 and fit.theta == pytest.approx(-30 * fit.alpha)
        assert fit.se_theta == pytest.approx(30 * fit.se_alpha)
        # the profile maximum beats neighbours
        p = lambda a: hollywood_log_pmf(net, HollywoodParams.finite(a, 30, BIN))
        assert p(fit.alpha) >= max(p(fit.alpha * 0.99), p(fit.alpha * 1.01))

    def test_finite_rejects_small_k(self):
        net = canonicalize([(1, 2), (3, 4)])
        with pytest.raises(RegimeError):
            fit_mle(net, "finite", 3)

    def test_auto_reports_both(self):
        net = hollywood_simulate(HollywoodParams.finite(-0.5, 50, BIN), 3000, 6)
        fit = fit_mle(net, "auto")
        assert fit.alternative is not None
        assert {fit.regime, fit.alternative.regime} == {"infinite", "finite"}
        assert fit.loglik >= fit.alternative.loglik
        assert "alternative" in fit.to_dict()

    def test_unknown_regime(self):
        with pytest.raises(InvalidInputError):
            fit_mle(canonicalize([(1, 2)]), "other")

    def test_undirected_note(self):
        net = hollywood_simulate(HollywoodParams(0.5, 1.0, BIN), 500, 1, directed=False)
        fit = fit_mle(net)
        assert any("additive constant" in n for n in fit.notes)

    def test_json_stable(self):
        net = hollywood_simulate(HollywoodParams(0.5, 1.0, BIN), 500, 1)
        text = fit_mle(net).to_json()
        assert text.endswith("\n")
        d = json.loads(text)
        for key in ("alpha", "theta", "se_alpha", "se_theta", "nu", "loglik", "regime", "iterations",
                    "converged", "boundary_hit"):
            assert key in d

    def test_karate_club_table(self):
        # 231 repeated interactions among 34 members; finite population k = 34
        net = load_network(DATA / "karate_interactions.txt", directed=False)
        assert (net.stats.v, net.stats.e) == (34, 231)
        fit = fit_mle(net, "finite", 34)
        assert fit.alpha == pytest.approx(-1.80, abs=0.01)
        assert fit.se_alpha == pytest.approx(0.47, abs=0.01)
        assert fit.theta == pytest.approx(61.3, abs=0.1)
        assert fit.se_theta == pytest.approx(16.04, abs=0.05)


class TestYule:
    def test_concave_and_maximized(self):
        net = hollywood_simulate(HollywoodParams(0.6, 1.0, BIN), 20000, 2)
        y = fit_yule(net)
        assert y.gamma > 1 and not y.boundary_hit
        grid = np.linspace(1.05, 4.0, 60)
        vals = np.array([yule_loglik(g, net) for g in grid])
        assert np.all(np.diff(vals, 2) <= 1e-9)
        assert y.loglik >= vals.max() - 1e-9

    def test_normalized_pmf(self):
        # (gamma - 1) B(k, gamma) sums to one over k >= 1
        g = 1.7
        k = np.arange(1, 2_000_000)
        p = np.exp(np.log(g - 1) + gammaln(k) + gammaln(g) - gammaln(k + g))
        tail = np.exp(gammaln(g) + gammaln(k[-1] + 1) - gammaln(k[-1] + g))  # mass beyond the grid
        assert p.sum() + tail == pytest.approx(1.0, abs=1e-9)

    def test_all_degree_one_is_boundary(self):
        y = fit_yule(canonicalize([(1, 2), (3, 4), (5, 6)]))
        assert y.boundary_hit

    def test_empty(self):
        with pytest.raises(DomainError):
            fit_yule(canonicalize([]))
