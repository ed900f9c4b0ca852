"""Objective-Bayesian engine for the Dhillon model.

Two priors are implemented: the Jeffreys prior, which coincides with the
ordered reference prior and is proportional to 1/(beta*theta), and the
maximal-data-information prior proportional to beta * theta**(1/beta).
The Jeffreys/reference posterior is proper whenever n >= 2 and the sample
is not all equal; the maximal-data-information posterior is improper for
every sample size, so sampling under it is refused.

Sampling alternates Metropolis-Hastings updates of theta and beta with
Gamma random-walk proposals centred at the current state; the acceptance
ratio carries the q(current|proposed)/q(proposed|current) correction.
Proposal shapes are auto-tuned during burn-in only, preserving the Markov
property of the retained draws.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .distribution import DhillonParams
from .errors import (DegenerateSeries, DomainError, EmptyChain,
                     ImproperPosterior)
from .mle import _initial_point, log_likelihood
from .numerics import normal_quantile


class Prior(enum.Enum):
    """Objective priors for (beta, theta)."""

    JEFFREYS_REFERENCE = "jeffreys"
    MDIP = "mdip"


def log_prior(prior: Prior, p: DhillonParams) -> float:
    """Unnormalized log prior density (up to an additive constant)."""
    if prior is Prior.JEFFREYS_REFERENCE:
        return -math.log(p.beta) - math.log(p.theta)
    return math.log(p.beta) + math.log(p.theta) / p.beta


def log_posterior(prior: Prior, p: DhillonParams, d: Dataset) -> float:
    """Unnormalized log posterior: log prior + log likelihood."""
    return log_prior(prior, p) + log_likelihood(p, d)


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the posterior-validity guards for a prior/dataset pair."""

    posterior_proper: bool
    beta_moments_finite: bool
    theta_mean_guaranteed: bool
    messages: list[str]

    def to_dict(self) -> dict:
        return {"posterior_proper": self.posterior_proper,
                "beta_moments_finite": self.beta_moments_finite,
                "theta_mean_guaranteed": self.theta_mean_guaranteed,
                "messages": list(self.messages)}


def check_validity(prior: Prior, d: Dataset) -> ValidityReport:
    """Evaluate propriety and posterior-moment guarantees.

    Under the maximal-data-information prior the posterior is improper for
    every sample, full stop.  Under Jeffreys/reference the posterior is
    proper iff n >= 2 with at least two distinct observations; all
    posterior moments of beta are then finite, while finiteness of the
    posterior mean of theta is guaranteed (sufficient, not necessary) by
    having at least one observation below 1 and at least two above 1.
    """
    t = d.times
    n = d.n
    all_equal = bool(t.max() - t.min() < 1e-12 * t.max())
    messages: list[str] = []
    if prior is Prior.MDIP:
        messages.append(
            "the maximal data information prior beta * theta**(1/beta) yields an "
            "improper posterior for every sample size (its theta tail dominates "
            "the likelihood decay); Bayesian inference under it is refused"
        )
        return ValidityReport(False, False, False, messages)

    proper = n >= 2 and not all_equal
    if n < 2:
        messages.append("posterior propriety needs at least two observations")
    if n >= 2 and all_equal:
        messages.append("all observations are equal, so the posterior does not normalize")
    n_below = int(np.sum(t < 1.0))
    n_above = int(np.sum(t > 1.0))
    theta_mean_ok = n_below >= 1 and n_above >= 2
    if proper and not theta_mean_ok:
        if n_below < 1:
            messages.append(
                "no observation lies below 1: the sufficient conditions for a "
                "finite posterior mean of theta are not met"
            )
        if n_above < 2:
            messages.append(
                "fewer than two observations lie above 1: the sufficient conditions "
                "for a finite posterior mean of theta are not met"
            )
        if n == 2 and float(t.max()) < 1.0:
            messages.append(
                "with n = 2 and both observations below 1 the posterior mean of "
                "theta is in fact infinite"
            )
    return ValidityReport(
        posterior_proper=proper,
        beta_moments_finite=proper,
        theta_mean_guaranteed=theta_mean_ok,
        messages=messages,
    )


@dataclass(frozen=True)
class McmcConfig:
    """Metropolis-Hastings run settings.

    The defaults (5500 iterations, 500 burn-in, thinning 5) retain
    M = 1000 draws.  ``a_beta`` and ``a_theta`` are the Gamma proposal
    shapes; during burn-in they are rescaled every 100 iterations (x1.5
    when the window acceptance is below 0.2, x0.66 above 0.4) and then
    frozen.
    """

    iterations: int = 5500
    burn_in: int = 500
    thin: int = 5
    a_beta: float = 50.0
    a_theta: float = 50.0
    seed: int = 0
    geweke_level: float = 0.95

    def __post_init__(self) -> None:
        if self.burn_in < 0 or self.burn_in >= self.iterations:
            raise DomainError("need 0 <= burn_in < iterations")
        if self.thin < 1:
            raise DomainError("thin must be >= 1")
        if self.a_beta <= 0 or self.a_theta <= 0:
            raise DomainError("proposal shapes must be positive")
        if not 0.0 < self.geweke_level < 1.0:
            raise DomainError("geweke_level must be in (0, 1)")

    @property
    def retained(self) -> int:
        return (self.iterations - self.burn_in) // self.thin

    def to_dict(self) -> dict:
        return {"iterations": self.iterations, "burn_in": self.burn_in,
                "thin": self.thin, "a_beta": self.a_beta, "a_theta": self.a_theta,
                "seed": self.seed, "geweke_level": self.geweke_level}


@dataclass(frozen=True)
class McmcChain:
    """Post-burn-in, thinned draws with acceptance and diagnostic metadata."""

    draws: np.ndarray  # shape (M, 2): columns beta, theta
    accept_rate_beta: float
    accept_rate_theta: float
    geweke_z_beta: float
    geweke_z_theta: float
    passed_geweke: bool
    seed: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.draws, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DomainError("draws must be an (M, 2) array")
        if np.any(arr <= 0):
            raise DomainError("all retained draws must be strictly positive")
        for rate in (self.accept_rate_beta, self.accept_rate_theta):
            if not 0.0 <= rate <= 1.0:
                raise DomainError("acceptance rates must lie in [0, 1]")
        object.__setattr__(self, "draws", arr)

    @property
    def beta(self) -> np.ndarray:
        return self.draws[:, 0]

    @property
    def theta(self) -> np.ndarray:
        return self.draws[:, 1]

    def to_dict(self, include_draws: bool = False) -> dict:
        out = {
            "retained": int(self.draws.shape[0]),
            "accept_rate_beta": self.accept_rate_beta,
            "accept_rate_theta": self.accept_rate_theta,
            "geweke_z_beta": self.geweke_z_beta,
            "geweke_z_theta": self.geweke_z_theta,
            "passed_geweke": self.passed_geweke,
            "seed": self.seed,
        }
        if include_draws:
            out["draws"] = self.draws.tolist()
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("iter,beta,theta\n")
            for i, (b, t) in enumerate(self.draws, start=1):
                fh.write(f"{i},{float(b)!r},{float(t)!r}\n")


class _JeffreysPosteriorTarget:
    """Caches t^beta and sum(log1p(theta t^beta)) so each conditional move
    costs one vector pass over the data."""

    def __init__(self, times: np.ndarray, beta: float, theta: float):
        self.logt = np.log(times)
        self.sum_logt = float(self.logt.sum())
        self.n = times.size
        self.beta = beta
        self.theta = theta
        self.tbeta = np.exp(beta * self.logt)
        self.s_log1p = float(np.log1p(theta * self.tbeta).sum())
        self._pend_s = 0.0
        self._pend_tbeta: np.ndarray | None = None

    def theta_logp_delta(self, theta_new: float) -> float:
        s_new = float(np.log1p(theta_new * self.tbeta).sum())
        self._pend_s = s_new
        return ((self.n - 1) * (math.log(theta_new) - math.log(self.theta))
                - 2.0 * (s_new - self.s_log1p))

    def commit_theta(self, theta_new: float) -> None:
        self.theta = theta_new
        self.s_log1p = self._pend_s

    def beta_logp_delta(self, beta_new: float) -> float:
        # Overflowing t^beta for an absurd proposal gives s_new = inf and a
        # -inf delta, i.e. a clean rejection.
        with np.errstate(over="ignore"):
            tbeta_new = np.exp(beta_new * self.logt)
            s_new = float(np.log1p(self.theta * tbeta_new).sum())
        self._pend_s = s_new
        self._pend_tbeta = tbeta_new
        return ((self.n - 1) * (math.log(beta_new) - math.log(self.beta))
                + (beta_new - self.beta) * self.sum_logt
                - 2.0 * (s_new - self.s_log1p))

    def commit_beta(self, beta_new: float) -> None:
        self.beta = beta_new
        self.tbeta = self._pend_tbeta
        self.s_log1p = self._pend_s


class _ProductGammaTarget:
    """Independent Gamma(k, rate) coordinates; a conjugate stand-in with
    known moments used to smoke-test the sampler."""

    def __init__(self, k_beta, rate_beta, k_theta, rate_theta, beta, theta):
        self.kb, self.rb = k_beta, rate_beta
        self.kt, self.rt = k_theta, rate_theta
        self.beta, self.theta = beta, theta

    def theta_logp_delta(self, theta_new: float) -> float:
        return ((self.kt - 1) * (math.log(theta_new) - math.log(self.theta))
                - self.rt * (theta_new - self.theta))

    def commit_theta(self, theta_new: float) -> None:
        self.theta = theta_new

    def beta_logp_delta(self, beta_new: float) -> float:
        return ((self.kb - 1) * (math.log(beta_new) - math.log(self.beta))
                - self.rb * (beta_new - self.beta))

    def commit_beta(self, beta_new: float) -> None:
        self.beta = beta_new


def gamma_walk_logq_ratio(a: float, x: float, y: float) -> float:
    """log q(x | y) - log q(y | x) for the proposal y ~ Gamma(a, a/x)."""
    return (2.0 * a - 1.0) * (math.log(x) - math.log(y)) + a * (y / x - x / y)


def _mh_loop(target, cfg: McmcConfig, rng: np.random.Generator):
    a_b, a_t = cfg.a_beta, cfg.a_theta
    m = cfg.retained
    draws = np.empty((m, 2))
    kept = 0
    acc_b = acc_t = 0
    win_b = win_t = win_len = 0
    post_moves = cfg.iterations - cfg.burn_in
    for j in range(1, cfg.iterations + 1):
        theta = target.theta
        theta_star = rng.gamma(a_t, theta / a_t)
        delta = (target.theta_logp_delta(theta_star)
                 + gamma_walk_logq_ratio(a_t, theta, theta_star))
        if math.log(rng.random()) < delta:
            target.commit_theta(theta_star)
            win_t += 1
            if j > cfg.burn_in:
                acc_t += 1

        beta = target.beta
        beta_star = rng.gamma(a_b, beta / a_b)
        delta = (target.beta_logp_delta(beta_star)
                 + gamma_walk_logq_ratio(a_b, beta, beta_star))
        if math.log(rng.random()) < delta:
            target.commit_beta(beta_star)
            win_b += 1
            if j > cfg.burn_in:
                acc_b += 1

        win_len += 1
        if j <= cfg.burn_in and win_len == 100:
            rate_b, rate_t = win_b / 100.0, win_t / 100.0
            if rate_b < 0.2:
                a_b *= 1.5
            elif rate_b > 0.4:
                a_b *= 0.66
            if rate_t < 0.2:
                a_t *= 1.5
            elif rate_t > 0.4:
                a_t *= 0.66
            win_b = win_t = win_len = 0
        if j == cfg.burn_in:
            win_b = win_t = win_len = 0

        if j > cfg.burn_in and (j - cfg.burn_in) % cfg.thin == 0 and kept < m:
            draws[kept, 0] = target.beta
            draws[kept, 1] = target.theta
            kept += 1
    return draws[:kept], acc_b / post_moves, acc_t / post_moves


def run_mh(prior: Prior, d: Dataset, cfg: McmcConfig | None = None) -> McmcChain:
    """Sample the posterior with the two-block Gamma random-walk sampler.

    Refuses to run (``ImproperPosterior``) unless the validity guard
    passes.  Initialization uses the method-of-moments estimate, falling
    back to (1, 1/median) when that is infeasible.  Deterministic for a
    fixed seed.  A failed Geweke diagnostic is reported on the chain, not
    raised.
    """
    cfg = cfg or McmcConfig()
    report = check_validity(prior, d)
    if not report.posterior_proper:
        raise ImproperPosterior("; ".join(report.messages))

    t = np.sort(d.times)
    log_b0, log_t0 = _initial_point(t)
    target = _JeffreysPosteriorTarget(t, math.exp(log_b0), math.exp(log_t0))
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    draws, rate_b, rate_t = _mh_loop(target, cfg, rng)

    crit = normal_quantile(1.0 - (1.0 - cfg.geweke_level) / 2.0)
    if draws.shape[0] < 100:
        # Too few retained draws for the stationarity windows; report the
        # diagnostic as vacuously passed rather than refusing tiny runs.
        z_b = z_t = 0.0
        passed = True
    else:
        try:
            z_b = geweke_z(draws[:, 0])
            z_t = geweke_z(draws[:, 1])
            passed = abs(z_b) < crit and abs(z_t) < crit
        except DegenerateSeries:
            z_b = z_t = math.inf
            passed = False
    seed_repr = cfg.seed if isinstance(cfg.seed, int) else -1
    return McmcChain(
        draws=draws,
        accept_rate_beta=rate_b,
        accept_rate_theta=rate_t,
        geweke_z_beta=z_b,
        geweke_z_theta=z_t,
        passed_geweke=passed,
        seed=seed_repr,
    )


def _spectral_density_zero(x: np.ndarray) -> float:
    """Spectral density at frequency zero via a Bartlett lag window with
    truncation at 4% of the segment length."""
    n = x.size
    xc = x - x.mean()
    gamma0 = float(xc @ xc) / n
    if gamma0 == 0.0:
        return 0.0
    lag_max = max(1, int(0.04 * n))
    s = gamma0
    for k in range(1, lag_max + 1):
        gamma_k = float(xc[:-k] @ xc[k:]) / n
        s += 2.0 * (1.0 - k / (lag_max + 1.0)) * gamma_k
    return s


def geweke_z(series, frac_first: float = 0.1, frac_last: float = 0.5) -> float:
    """Geweke stationarity z-score comparing the first and last chain
    segments, with spectral-density-at-zero variance estimates.

    |z| < 1.96 passes at the 95% level.  Raises ``DegenerateSeries`` when
    either window has zero variance and ``DomainError`` for series shorter
    than 100.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 100:
        raise DomainError("geweke_z needs a 1-d series of length >= 100")
    if not (0 < frac_first < 1 and 0 < frac_last < 1 and frac_first + frac_last <= 1):
        raise DomainError("window fractions must be in (0, 1) and not overlap")
    n1 = int(frac_first * x.size)
    n2 = int(frac_last * x.size)
    first = x[:n1]
    last = x[x.size - n2:]
    s1 = _spectral_density_zero(first)
    s2 = _spectral_density_zero(last)
    if s1 <= 0.0 or s2 <= 0.0:
        raise DegenerateSeries("zero variance inside a Geweke window")
    return float((first.mean() - last.mean()) / math.sqrt(s1 / n1 + s2 / n2))


@dataclass(frozen=True)
class PosteriorSummary:
    """Location/scale/interval summary of a chain, per coordinate."""

    median: tuple[float, float]
    mean: tuple[float, float]
    sd: tuple[float, float]
    ci_beta: tuple[float, float]
    ci_theta: tuple[float, float]
    level: float

    def to_dict(self) -> dict:
        return {"median": {"beta": self.median[0], "theta": self.median[1]},
                "mean": {"beta": self.mean[0], "theta": self.mean[1]},
                "sd": {"beta": self.sd[0], "theta": self.sd[1]},
                "ci_beta": list(self.ci_beta),
                "ci_theta": list(self.ci_theta),
                "level": self.level}


def summarize(chain: McmcChain, level: float = 0.95) -> PosteriorSummary:
    """Posterior medians, means, SDs and equal-tail credible intervals."""
    if chain.draws.shape[0] == 0:
        raise EmptyChain("cannot summarize an empty chain")
    if not 0.0 < level < 1.0:
        raise DomainError("level must be in (0, 1)")
    lo_q, hi_q = (1.0 - level) / 2.0, 1.0 - (1.0 - level) / 2.0
    b, t = chain.beta, chain.theta
    ddof = 1 if b.size > 1 else 0
    return PosteriorSummary(
        median=(float(np.median(b)), float(np.median(t))),
        mean=(float(b.mean()), float(t.mean())),
        sd=(float(b.std(ddof=ddof)), float(t.std(ddof=ddof))),
        ci_beta=(float(np.quantile(b, lo_q)), float(np.quantile(b, hi_q))),
        ci_theta=(float(np.quantile(t, lo_q)), float(np.quantile(t, hi_q))),
        level=level,
    )


def posterior_predictive(chain: McmcChain, seed) -> np.ndarray:
    """One future-lifetime draw per retained posterior draw.

    Each retained (beta, theta) generates one observation by the inverse
    transform, so the output is an empirical sample from the posterior
    predictive distribution.
    """
    m = chain.draws.shape[0]
    if m == 0:
        raise EmptyChain("cannot predict from an empty chain")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(m)
    return np.exp((np.log(u) - np.log1p(-u) - np.log(chain.theta)) / chain.beta)
