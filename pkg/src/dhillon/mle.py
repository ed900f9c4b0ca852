"""Classical inference: log-likelihood, score, expected Fisher information,
maximum likelihood with Wald intervals, and method-of-moments estimation.

The optimizer maximizes in (log beta, log theta) coordinates with Newton
steps built from the analytic score and a finite-difference Hessian,
falling back to backtracked gradient ascent whenever the Hessian is not
negative definite.  Fits sort the observations internally, so estimates
are invariant to dataset permutation bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .distribution import DhillonParams
from .errors import (DegenerateData, DomainError, MaxIterExceeded, NoBracket,
                     NotConverged)
from .numerics import RootConfig, find_root, normal_quantile

_PI2 = math.pi * math.pi

# Convergence policy for fit_mle.
_SCORE_TOL = 1e-6
_STEP_TOL = 1e-9
_MAX_ITER = 200


@dataclass(frozen=True)
class FisherInfo:
    """Per-observation expected Fisher information entries.

    The total information for a sample of size n is n times each entry.
    """

    i_bb: float
    i_bt: float
    i_tt: float

    def __post_init__(self) -> None:
        if not (self.i_bb > 0 and self.i_tt > 0):
            raise DegenerateData("Fisher diagonal must be positive")
        if not self.determinant > 0:
            raise DegenerateData("Fisher information must be positive definite")

    @property
    def determinant(self) -> float:
        return self.i_bb * self.i_tt - self.i_bt * self.i_bt


@dataclass(frozen=True)
class MleFit:
    """Maximum-likelihood result with asymptotic (Wald) uncertainty."""

    params: DhillonParams
    loglik: float
    fisher: FisherInfo
    se_beta: float
    se_theta: float
    ci_beta: tuple[float, float]
    ci_theta: tuple[float, float]
    level: float
    converged: bool
    iterations: int
    # Full inverse-Fisher covariance of (beta_hat, theta_hat), stored for
    # reporting although the intervals above are marginal.
    cov: tuple[tuple[float, float], tuple[float, float]]

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "loglik": self.loglik,
            "fisher": {"i_bb": self.fisher.i_bb, "i_bt": self.fisher.i_bt,
                       "i_tt": self.fisher.i_tt},
            "se_beta": self.se_beta,
            "se_theta": self.se_theta,
            "ci_beta": list(self.ci_beta),
            "ci_theta": list(self.ci_theta),
            "level": self.level,
            "converged": self.converged,
            "iterations": self.iterations,
            "cov": [list(row) for row in self.cov],
        }


@dataclass(frozen=True)
class MomEstimate:
    """Method-of-moments result; ``feasible`` is False when the moment
    ratio m2 / tbar^2 does not exceed 1 or the shape equation has no
    solution in (2, 1e6)."""

    params: DhillonParams | None
    ratio: float
    feasible: bool

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict() if self.params else None,
                "ratio": self.ratio, "feasible": self.feasible}


def _sigmoid(w: np.ndarray) -> np.ndarray:
    out = np.empty_like(w)
    pos = w >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-w[pos]))
    ew = np.exp(w[~pos])
    out[~pos] = ew / (1.0 + ew)
    return out


def log_likelihood(p: DhillonParams, d: Dataset) -> float:
    """n log b + n log th + (b-1) sum(log t) - 2 sum(log(1 + th t^b))."""
    logt = np.log(d.times)
    w = math.log(p.theta) + p.beta * logt
    return float(d.n * math.log(p.beta) + d.n * math.log(p.theta)
                 + (p.beta - 1.0) * logt.sum() - 2.0 * np.logaddexp(0.0, w).sum())


def score(p: DhillonParams, d: Dataset) -> tuple[float, float]:
    """Gradient of the log-likelihood with respect to (beta, theta)."""
    logt = np.log(d.times)
    w = math.log(p.theta) + p.beta * logt
    sig = _sigmoid(w)  # theta t^b / (1 + theta t^b)
    s_beta = d.n / p.beta + logt.sum() - 2.0 * float(sig @ logt)
    s_theta = (d.n - 2.0 * float(sig.sum())) / p.theta
    return s_beta, s_theta


def fisher_info(p: DhillonParams) -> FisherInfo:
    """Closed-form per-observation expected information."""
    logth = math.log(p.theta)
    i_bb = (_PI2 + 3.0 + 3.0 * logth * logth) / (9.0 * p.beta * p.beta)
    i_bt = -logth / (3.0 * p.theta * p.beta)
    i_tt = 1.0 / (3.0 * p.theta * p.theta)
    return FisherInfo(i_bb=i_bb, i_bt=i_bt, i_tt=i_tt)


def asymptotic_se(p: DhillonParams, n: int) -> tuple[float, float]:
    """Marginal asymptotic standard errors of the MLEs at sample size n."""
    logth = math.log(p.theta)
    var_b = 9.0 * p.beta * p.beta / (n * (_PI2 + 3.0))
    var_t = 3.0 * p.theta * p.theta * (_PI2 + 3.0 + 3.0 * logth * logth) / (n * (_PI2 + 3.0))
    return math.sqrt(var_b), math.sqrt(var_t)


def _check_degenerate(t: np.ndarray) -> None:
    if t.size < 2:
        raise DegenerateData("need at least two observations")
    if t[-1] - t[0] < 1e-12 * t[-1]:
        raise DegenerateData("all observations are (numerically) equal")


def _moment_ratio_gap(b: float, ratio: float) -> float:
    x = math.pi / b
    return math.tan(x) / x - ratio


def fit_mom(d: Dataset, cfg: RootConfig | None = None) -> MomEstimate:
    """Method-of-moments estimate.

    Solves m2 / tbar^2 = tan(pi/b)/(pi/b) for the shape on (2, 1e6), then
    theta = (tbar * b * sin(pi/b) / pi) ** (-b).  Any sample with two
    distinct values has ratio > 1; equality holds only for degenerate
    data, which is reported as infeasible rather than raised.
    """
    t = np.sort(d.times)
    tbar = float(t.mean())
    m2 = float((t * t).mean())
    ratio = m2 / (tbar * tbar)
    if not ratio > 1.0 + 1e-14:
        return MomEstimate(params=None, ratio=ratio, feasible=False)
    if cfg is None:
        cfg = RootConfig(abs_tol=1e-10, max_iter=300, bracket=(2.0 + 1e-9, 1e6))
    elif cfg.bracket is None:
        # the ratio map is only monotone on shapes above 2; never scan blind
        cfg = RootConfig(abs_tol=cfg.abs_tol, max_iter=cfg.max_iter,
                         bracket=(2.0 + 1e-9, 1e6))
    try:
        b = find_root(lambda x: _moment_ratio_gap(x, ratio), cfg)
    except (NoBracket, MaxIterExceeded):
        return MomEstimate(params=None, ratio=ratio, feasible=False)
    log_theta = -b * math.log(tbar * b * math.sin(math.pi / b) / math.pi)
    if abs(log_theta) > 700.0:
        return MomEstimate(params=None, ratio=ratio, feasible=False)
    return MomEstimate(params=DhillonParams(beta=b, theta=math.exp(log_theta)),
                       ratio=ratio, feasible=True)


def _initial_point(t: np.ndarray) -> tuple[float, float]:
    """(log beta, log theta) start: method of moments when feasible,
    else beta = 1 with theta = 1/median."""
    mom = fit_mom(Dataset(t))
    if mom.feasible:
        return math.log(mom.params.beta), math.log(mom.params.theta)
    return 0.0, -math.log(float(np.median(t)))


def fit_mle(d: Dataset, level: float = 0.95, cfg: RootConfig | None = None) -> MleFit:
    """Maximum-likelihood fit with marginal Wald confidence intervals.

    Raises ``DegenerateData`` for n < 2 or an all-equal sample and
    ``NotConverged`` when the score norm cannot be driven below 1e-6
    within the iteration cap.  ``cfg`` is forwarded to the
    method-of-moments initializer's root solve.
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must be in (0, 1), got {level}")
    t = np.sort(d.times)
    _check_degenerate(t)
    n = t.size
    logt = np.log(t)
    sum_logt = float(logt.sum())

    def loglik_uv(x: np.ndarray) -> float:
        b = math.exp(x[0])
        w = x[1] + b * logt
        val = n * x[0] + n * x[1] + (b - 1.0) * sum_logt - 2.0 * float(np.logaddexp(0.0, w).sum())
        return val if math.isfinite(val) else -math.inf

    def grad_uv(x: np.ndarray) -> np.ndarray:
        b = math.exp(x[0])
        w = x[1] + b * logt
        sig = _sigmoid(w)
        g_u = n + b * (sum_logt - 2.0 * float(sig @ logt))  # beta * dL/dbeta
        g_v = n - 2.0 * float(sig.sum())                    # theta * dL/dtheta
        return np.array([g_u, g_v])

    if cfg is not None:
        mom = fit_mom(d, cfg)
        x = (np.array([math.log(mom.params.beta), math.log(mom.params.theta)])
             if mom.feasible else np.array(_initial_point(t)))
    else:
        x = np.array(_initial_point(t))
    fx = loglik_uv(x)
    iterations = 0
    converged = False
    for iterations in range(1, _MAX_ITER + 1):
        g = grad_uv(x)
        # Finite-difference Hessian of the log-coordinate gradient.
        hess = np.empty((2, 2))
        for j in range(2):
            h = 1e-6 * max(1.0, abs(x[j]))
            e = np.zeros(2)
            e[j] = h
            hess[:, j] = (grad_uv(x + e) - grad_uv(x - e)) / (2.0 * h)
        hess = 0.5 * (hess + hess.T)
        neg_def = hess[0, 0] < 0 and hess[0, 0] * hess[1, 1] - hess[0, 1] ** 2 > 0
        if neg_def:
            step = -np.linalg.solve(hess, g)
        else:
            step = g / max(1.0, float(np.abs(g).max()))
        # Keep exp() in range regardless of how wild the step is.
        step = np.clip(step, -5.0, 5.0)
        slope = float(g @ step)
        if slope <= 0:
            step = g / max(1.0, float(np.abs(g).max()))
            slope = float(g @ step)
        alpha = 1.0
        x_new, f_new = x, fx
        while alpha > 1e-14:
            cand = x + alpha * step
            f_cand = loglik_uv(cand)
            if f_cand >= fx + 1e-4 * alpha * slope:
                x_new, f_new = cand, f_cand
                break
            alpha *= 0.5
        moved = float(np.abs(x_new - x).max())
        x, fx = x_new, f_new
        beta_hat, theta_hat = math.exp(x[0]), math.exp(x[1])
        g_now = grad_uv(x)
        score_inf = max(abs(g_now[0] / beta_hat), abs(g_now[1] / theta_hat))
        if score_inf < _SCORE_TOL and moved < _STEP_TOL:
            converged = True
            break
    if not converged:
        raise NotConverged(
            f"score norm still {score_inf:.3g} after {iterations} iterations"
        )

    params = DhillonParams(beta=beta_hat, theta=theta_hat)
    info = fisher_info(params)
    se_b, se_t = asymptotic_se(params, n)
    z = normal_quantile(1.0 - (1.0 - level) / 2.0)
    det_n = n * n * info.determinant
    cov_bt = -n * info.i_bt / det_n
    cov = ((se_b * se_b, cov_bt), (cov_bt, se_t * se_t))
    return MleFit(
        params=params,
        loglik=log_likelihood(params, d),
        fisher=info,
        se_beta=se_b,
        se_theta=se_t,
        ci_beta=(beta_hat - z * se_b, beta_hat + z * se_b),
        ci_theta=(theta_hat - z * se_t, theta_hat + z * se_t),
        level=level,
        converged=True,
        iterations=iterations,
        cov=cov,
    )
