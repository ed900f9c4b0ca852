import math

import numpy as np
import pytest

from dhillon import (Dataset, DegenerateData, DhillonParams, fisher_info,
                     fit_mle, fit_mom, integrate, log_likelihood, log_pdf,
                     pdf, sample, score)

PI2 = math.pi * math.pi


def _dataset(values):
    return Dataset(np.asarray(values, dtype=float))


class TestLogLikelihood:
    def test_single_point(self):
        assert log_likelihood(DhillonParams(1.0, 1.0), _dataset([1.0])) == \
            pytest.approx(math.log(0.25), rel=1e-14)

    def test_additivity(self):
        assert log_likelihood(DhillonParams(1.0, 1.0), _dataset([1.0, 1.0])) == \
            pytest.approx(2.0 * math.log(0.25), rel=1e-14)

    def test_equals_sum_of_log_pdf(self):
        p = DhillonParams(3.0, 0.5)
        data = sample(p, 50, rng_seed=5)
        expected = float(np.sum(log_pdf(p, data.times)))
        assert log_likelihood(p, data) == pytest.approx(expected, abs=1e-10)


class TestScore:
    def test_zero_at_mle(self):
        data = sample(DhillonParams(2.5, 1.5), 200, rng_seed=42)
        fit = fit_mle(data)
        s_b, s_t = score(fit.params, data)
        assert abs(s_b) < 1e-6
        assert abs(s_t) < 1e-6

    def test_theta_component_root_for_unit_point(self):
        # with one observation at t = 1 the theta component is
        # 1/theta - 2/(1+theta), which vanishes at theta = 1
        data = _dataset([1.0])
        _, s_t = score(DhillonParams(0.7, 1.0), data)
        assert s_t == pytest.approx(0.0, abs=1e-14)
        _, s_t_low = score(DhillonParams(0.7, 0.5), data)
        assert s_t_low > 0

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(314)
        checked = 0
        while checked < 100:
            beta = float(rng.uniform(0.4, 6.0))
            theta = float(rng.uniform(0.1, 4.0))
            n = int(rng.integers(5, 40))
            data = sample(DhillonParams(float(rng.uniform(0.7, 5.0)),
                                        float(rng.uniform(0.2, 3.0))),
                          n, rng_seed=int(rng.integers(1, 2 ** 31)))
            p = DhillonParams(beta, theta)
            s_b, s_t = score(p, data)
            h_b = 1e-6 * beta
            fd_b = (log_likelihood(DhillonParams(beta + h_b, theta), data)
                    - log_likelihood(DhillonParams(beta - h_b, theta), data)) / (2 * h_b)
            h_t = 1e-6 * theta
            fd_t = (log_likelihood(DhillonParams(beta, theta + h_t), data)
                    - log_likelihood(DhillonParams(beta, theta - h_t), data)) / (2 * h_t)
            assert s_b == pytest.approx(fd_b, rel=1e-5, abs=1e-4)
            assert s_t == pytest.approx(fd_t, rel=1e-5, abs=1e-4)
            checked += 1


class TestFisherInfo:
    def test_unit_scale(self):
        info = fisher_info(DhillonParams(2.0, 1.0))
        assert info.i_bt == 0.0
        assert info.i_bb == pytest.approx((PI2 + 3.0) / 36.0, rel=1e-14)
        assert info.i_tt == pytest.approx(1.0 / 3.0, rel=1e-14)

    def test_scale_two(self):
        for beta in (0.5, 1.0, 3.0):
            assert fisher_info(DhillonParams(beta, 2.0)).i_tt == \
                pytest.approx(1.0 / 12.0, rel=1e-14)

    @pytest.mark.parametrize("beta,theta", [(2.0, 1.0), (2.0, 3.0), (4.0, 0.5)])
    def test_matches_expected_curvature_by_quadrature(self, beta, theta):
        p = DhillonParams(beta, theta)

        def sig(t):
            w = math.log(theta) + beta * math.log(t)
            return 1.0 / (1.0 + math.exp(-w)) if w >= 0 else math.exp(w) / (1.0 + math.exp(w))

        def ibb_integrand(t):
            s = sig(t)
            u = s * (1.0 - s)  # theta t^b / (1+theta t^b)^2
            return (1.0 / beta ** 2 + 2.0 * u * math.log(t) ** 2) * pdf(p, t)

        def ibt_integrand(t):
            s = sig(t)
            u = s * (1.0 - s) / theta  # t^b / (1+theta t^b)^2
            return 2.0 * u * math.log(t) * pdf(p, t)

        def itt_integrand(t):
            s = sig(t)
            u = (s / theta) ** 2  # t^{2b} / (1+theta t^b)^2
            return (1.0 / theta ** 2 - 2.0 * u) * pdf(p, t)

        info = fisher_info(p)
        for integrand, value in ((ibb_integrand, info.i_bb),
                                 (ibt_integrand, info.i_bt),
                                 (itt_integrand, info.i_tt)):
            oracle = integrate(integrand, 0.0, math.inf, tol=1e-9)
            assert oracle.converged
            assert value == pytest.approx(oracle.value, abs=1e-5)

    def test_determinant_positive_on_wide_grid(self):
        for beta in (0.1, 0.5, 2.0, 20.0):
            for theta in (0.01, 0.5, 1.0, 10.0, 100.0):
                assert fisher_info(DhillonParams(beta, theta)).determinant > 0


class TestFitMle:
    def test_consistency_large_sample(self):
        data = sample(DhillonParams(4.0, 2.0), 10_000, rng_seed=8)
        fit = fit_mle(data)
        assert fit.converged
        assert abs(fit.params.beta - 4.0) < 0.15
        assert abs(fit.params.theta - 2.0) < 0.20
        s_b, s_t = score(fit.params, data)
        assert max(abs(s_b), abs(s_t)) < 1e-6

    def test_degenerate_all_equal(self):
        with pytest.raises(DegenerateData):
            fit_mle(_dataset([5.0] * 12))

    def test_degenerate_single_point(self):
        with pytest.raises(DegenerateData):
            fit_mle(_dataset([3.0]))

    def test_permutation_invariance(self):
        base = sample(DhillonParams(2.0, 1.0), 40, rng_seed=3).times
        fit1 = fit_mle(Dataset(base))
        fit2 = fit_mle(Dataset(base[::-1].copy()))
        assert fit1.params.beta == fit2.params.beta
        assert fit1.params.theta == fit2.params.theta

    def test_rescaling_equivariance(self):
        data = sample(DhillonParams(3.0, 1.5), 60, rng_seed=21)
        c = 7.3
        fit = fit_mle(data)
        fit_scaled = fit_mle(Dataset(c * data.times))
        assert fit_scaled.params.beta == pytest.approx(fit.params.beta, rel=1e-6)
        expected_theta = fit.params.theta * c ** (-fit.params.beta)
        assert fit_scaled.params.theta == pytest.approx(expected_theta, rel=1e-6)

    def test_interval_and_se_structure(self):
        data = sample(DhillonParams(4.0, 2.0), 500, rng_seed=77)
        fit = fit_mle(data, level=0.95)
        b, t, n = fit.params.beta, fit.params.theta, data.n
        assert fit.se_beta == pytest.approx(math.sqrt(9 * b * b / (n * (PI2 + 3))), rel=1e-12)
        expected_se_t = math.sqrt(3 * t * t * (PI2 + 3 + 3 * math.log(t) ** 2)
                                  / (n * (PI2 + 3)))
        assert fit.se_theta == pytest.approx(expected_se_t, rel=1e-12)
        assert fit.ci_beta[0] < b < fit.ci_beta[1]
        assert fit.ci_theta[0] < t < fit.ci_theta[1]

    def test_small_sample_coverage_sanity(self):
        covered = 0
        reps = 150
        for i in range(reps):
            data = sample(DhillonParams(4.0, 2.0), 100, rng_seed=10_000 + i)
            fit = fit_mle(data)
            covered += fit.ci_beta[0] <= 4.0 <= fit.ci_beta[1]
        assert 0.88 <= covered / reps <= 1.0

    def test_serialization_keys(self):
        data = sample(DhillonParams(2.0, 1.0), 30, rng_seed=9)
        payload = fit_mle(data).to_dict()
        for key in ("params", "loglik", "fisher", "se_beta", "se_theta",
                    "ci_beta", "ci_theta", "level", "converged", "iterations"):
            assert key in payload


class TestFitMom:
    def test_exact_ratio_four_over_pi(self):
        # construct {1, b} whose moment ratio is exactly 4/pi
        ratio = 4.0 / math.pi
        coeff = 2.0 - ratio
        b = (2 * ratio + math.sqrt(4 * ratio * ratio - 4 * coeff * coeff)) / (2 * coeff)
        est = fit_mom(_dataset([1.0, b]))
        assert est.feasible
        assert est.ratio == pytest.approx(ratio, rel=1e-14)
        assert est.params.beta == pytest.approx(4.0, abs=1e-8)

    def test_all_equal_infeasible(self):
        est = fit_mom(_dataset([2.0, 2.0, 2.0]))
        assert not est.feasible
        assert est.params is None
        assert est.ratio == pytest.approx(1.0, rel=1e-14)

    def test_recovers_from_exact_moments(self):
        # a two-point set {mu - sigma, mu + sigma} matches the first two
        # moments of (beta, theta) = (4, 2) exactly
        from dhillon import mean_variance
        mean, var = mean_variance(DhillonParams(4.0, 2.0))
        sd = math.sqrt(var)
        est = fit_mom(_dataset([mean - sd, mean + sd]))
        assert est.feasible
        assert est.params.beta == pytest.approx(4.0, abs=1e-6)
        assert est.params.theta == pytest.approx(2.0, abs=1e-6)

    def test_ratio_map_decreasing_and_bracket(self):
        grid = np.linspace(2.001, 50.0, 200)
        g = [math.tan(math.pi / b) / (math.pi / b) for b in grid]
        assert all(x > y for x, y in zip(g, g[1:]))
        data = sample(DhillonParams(4.0, 2.0), 100, rng_seed=12)
        est = fit_mom(data)
        assert est.feasible
        assert 2.0 < est.params.beta <= 1e6
