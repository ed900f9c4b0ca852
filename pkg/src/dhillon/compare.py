"""Competing-model fits (Weibull, Gamma) and information-criterion
comparison, plus survival series for overlay plots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .datasets import Dataset
from .errors import DegenerateData, DhillonError, DomainError
from .mle import fit_mle
from .numerics import RootConfig, find_root
from . import distribution


@dataclass(frozen=True)
class CriteriaRow:
    """One model's information criteria.  ``error`` marks a failed fit
    (the numeric fields are then NaN)."""

    model: str
    k: int
    loglik: float
    aic: float
    bic: float
    aicc: float
    error: str | None = None

    def to_dict(self) -> dict:
        return {"model": self.model, "k": self.k, "loglik": self.loglik,
                "aic": self.aic, "bic": self.bic, "aicc": self.aicc,
                "error": self.error}


@dataclass(frozen=True)
class SurvivalSeries:
    """A survival curve as (t, s) points, either the empirical step
    function or a parametric curve."""

    points: list[tuple[float, float]]
    kind: Literal["empirical", "parametric"]
    label: str = ""


@dataclass(frozen=True)
class WeibullParams:
    shape: float
    scale: float


@dataclass(frozen=True)
class GammaParams:
    shape: float
    rate: float


def criteria(loglik: float, k: int, n: int, model: str = "") -> CriteriaRow:
    """AIC/BIC/AICc from a maximized log-likelihood.

    aic = -2 loglik + 2k, bic = -2 loglik + k log n,
    aicc = aic + 2k(k+1)/(n-k-1); requires n > k + 1.
    """
    if n <= k + 1:
        raise DomainError(f"AICc needs n > k + 1 (n={n}, k={k})")
    aic = -2.0 * loglik + 2.0 * k
    bic = -2.0 * loglik + k * math.log(n)
    aicc = aic + 2.0 * k * (k + 1) / (n - k - 1)
    return CriteriaRow(model=model, k=k, loglik=loglik, aic=aic, bic=bic, aicc=aicc)


def digamma(x: float) -> float:
    """Digamma by upward recurrence into the asymptotic region."""
    if x <= 0:
        raise DomainError("digamma implemented for x > 0 only")
    value = 0.0
    while x < 12.0:
        value -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    return value + math.log(x) - 0.5 * inv - inv2 * (
        1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0))
    )


def _check_fit_data(t: np.ndarray) -> None:
    if t.size < 2:
        raise DegenerateData("need at least two observations")
    if t.max() - t.min() < 1e-12 * t.max():
        raise DegenerateData("all observations are (numerically) equal")


def weibull_loglik(p: WeibullParams, d: Dataset) -> float:
    t = d.times
    z = np.exp(p.shape * (np.log(t) - math.log(p.scale)))
    return float(d.n * (math.log(p.shape) - math.log(p.scale))
                 + (p.shape - 1.0) * (np.log(t) - math.log(p.scale)).sum()
                 - z.sum())


def fit_weibull(d: Dataset) -> tuple[WeibullParams, float]:
    """Weibull MLE with survival exp(-(t/scale)**shape).

    The scale is profiled out analytically; the shape solves the usual
    one-dimensional profile equation.
    """
    t = np.sort(d.times)
    _check_fit_data(t)
    logt = np.log(t)
    mean_logt = float(logt.mean())

    def profile_eq(k: float) -> float:
        tk = np.exp(k * logt)
        return float((tk @ logt) / tk.sum() - 1.0 / k - mean_logt)

    shape = find_root(profile_eq, RootConfig(abs_tol=1e-12, max_iter=300,
                                             bracket=_expand_bracket(profile_eq)))
    scale = math.exp(math.log(float(np.exp(shape * logt).mean())) / shape)
    params = WeibullParams(shape=shape, scale=scale)
    return params, weibull_loglik(params, d)


def gamma_loglik(p: GammaParams, d: Dataset) -> float:
    t = d.times
    return float(d.n * (p.shape * math.log(p.rate) - math.lgamma(p.shape))
                 + (p.shape - 1.0) * np.log(t).sum() - p.rate * t.sum())


def fit_gamma(d: Dataset) -> tuple[GammaParams, float]:
    """Gamma(shape, rate) MLE: the rate is shape/mean, the shape solves
    log(shape) - digamma(shape) = log(mean) - mean(log t)."""
    t = np.sort(d.times)
    _check_fit_data(t)
    s = math.log(float(t.mean())) - float(np.log(t).mean())

    def shape_eq(a: float) -> float:
        return math.log(a) - digamma(a) - s

    shape = find_root(shape_eq, RootConfig(abs_tol=1e-12, max_iter=300,
                                           bracket=_expand_bracket(shape_eq)))
    params = GammaParams(shape=shape, rate=shape / float(t.mean()))
    return params, gamma_loglik(params, d)


def _expand_bracket(f, lo: float = 1e-6, hi: float = 1.0) -> tuple[float, float]:
    """Grow (lo, hi) geometrically until f changes sign."""
    flo, fhi = f(lo), f(hi)
    for _ in range(200):
        if (flo < 0) != (fhi < 0):
            return lo, hi
        if abs(flo) < abs(fhi):
            lo /= 8.0
            flo = f(lo)
        else:
            hi *= 8.0
            fhi = f(hi)
    return lo, hi


def empirical_survival(d: Dataset) -> SurvivalSeries:
    """Step-function survival s(t) = #{times > t} / n at the sorted unique
    times, with (0, 1) prepended by convention (no censoring, so the
    product-limit estimate reduces to one minus the empirical CDF)."""
    t = np.sort(d.times)
    uniq = np.unique(t)
    n = t.size
    points = [(0.0, 1.0)]
    points += [(float(u), float(np.sum(t > u)) / n) for u in uniq]
    return SurvivalSeries(points=points, kind="empirical", label="empirical")


def parametric_survival_series(
    survival_fn, t_max: float, label: str, n_points: int = 200
) -> SurvivalSeries:
    """Sample a parametric survival function on [0, t_max] for overlays."""
    grid = np.linspace(0.0, t_max, n_points)
    points = [(float(t), float(survival_fn(t))) for t in grid]
    return SurvivalSeries(points=points, kind="parametric", label=label)


def weibull_survival(p: WeibullParams, t) -> float | np.ndarray:
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        z = np.where(t > 0, np.exp(p.shape * (np.log(np.maximum(t, 1e-300)) - math.log(p.scale))), 0.0)
    out = np.exp(-z)
    return float(out) if out.ndim == 0 else out


def gamma_survival(p: GammaParams, t) -> float | np.ndarray:
    """Upper regularized incomplete gamma Q(shape, rate*t) via the series
    and continued-fraction split."""
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([1.0 - _reg_lower_gamma(p.shape, p.rate * float(x)) for x in arr])
    return float(out[0]) if scalar else out


def _reg_lower_gamma(a: float, x: float, max_iter: int = 500) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if x <= 0:
        return 0.0
    if x < a + 1.0:
        # series
        term = 1.0 / a
        total = term
        k = a
        for _ in range(max_iter):
            k += 1.0
            term *= x / k
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    # continued fraction for Q(a, x), Lentz form
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    q = h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    return 1.0 - q


def compare(d: Dataset) -> list[CriteriaRow]:
    """Fit Dhillon, Weibull and Gamma and rank them by AIC (ascending).

    A model whose fit fails contributes a row flagged with the error
    message instead of being dropped.
    """
    if d.n < 3:
        raise DegenerateData("model comparison needs at least three observations")
    rows: list[CriteriaRow] = []
    fitters = (
        ("Dhillon", lambda: fit_mle(d).loglik),
        ("Weibull", lambda: fit_weibull(d)[1]),
        ("Gamma", lambda: fit_gamma(d)[1]),
    )
    for name, fitter in fitters:
        try:
            loglik = fitter()
            rows.append(criteria(loglik, k=2, n=d.n, model=name))
        except DhillonError as exc:
            rows.append(CriteriaRow(model=name, k=2, loglik=math.nan, aic=math.nan,
                                    bic=math.nan, aicc=math.nan, error=str(exc)))
    ok = sorted((r for r in rows if r.error is None), key=lambda r: r.aic)
    failed = [r for r in rows if r.error is not None]
    return ok + failed


def survival_overlays(d: Dataset) -> list[SurvivalSeries]:
    """Empirical steps plus the three fitted parametric survival curves."""
    t_max = float(d.times.max()) * 1.05
    series = [empirical_survival(d)]
    try:
        fit = fit_mle(d)
        series.append(parametric_survival_series(
            lambda t: distribution.survival(fit.params, t), t_max, "Dhillon"))
    except DhillonError:
        pass
    try:
        wp, _ = fit_weibull(d)
        series.append(parametric_survival_series(
            lambda t: weibull_survival(wp, t), t_max, "Weibull"))
    except DhillonError:
        pass
    try:
        gp, _ = fit_gamma(d)
        series.append(parametric_survival_series(
            lambda t: gamma_survival(gp, t), t_max, "Gamma"))
    except DhillonError:
        pass
    return series
