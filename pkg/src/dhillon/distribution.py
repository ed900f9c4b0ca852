"""The Dhillon(beta, theta) lifetime distribution.

Survival is 1 / (1 + theta * t**beta); the hazard is decreasing for
beta <= 1 and unimodal for beta > 1, which is what makes the family
useful for burn-in plus wear-out failure data.  All functions accept a
scalar or a numpy array for ``t`` (or ``u``) and are pure; ``sample``
takes an explicit seed and owns a private generator.

Internally theta * t**beta is always handled as exp(log(theta) +
beta*log(t)) and 1 + theta*t**beta through log1p/logaddexp, so large
shapes and extreme times do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .datasets import Dataset
from .errors import DomainError, MomentDoesNotExist, MrlUndefined
from .numerics import incomplete_beta, log_beta


@dataclass(frozen=True)
class DhillonParams:
    """Parameter pair: shape ``beta`` > 0 and scale ``theta`` > 0."""

    beta: float
    theta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise DomainError(f"beta must be finite and positive, got {self.beta}")
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise DomainError(f"theta must be finite and positive, got {self.theta}")

    def to_dict(self) -> dict:
        return {"beta": self.beta, "theta": self.theta}


@dataclass(frozen=True)
class HazardShape:
    """Qualitative hazard shape: decreasing, or unimodal with its mode."""

    kind: Literal["decreasing", "unimodal"]
    mode: float | None = None


def _as_array(t, name: str, minimum_exclusive: bool):
    arr = np.asarray(t, dtype=float)
    if minimum_exclusive:
        if np.any(arr <= 0):
            raise DomainError(f"{name} must be positive")
    else:
        if np.any(arr < 0):
            raise DomainError(f"{name} must be nonnegative")
    return arr


def _ret(value, t):
    return float(value) if np.isscalar(t) or np.ndim(t) == 0 else value


def _log_scale(p: DhillonParams, t_arr: np.ndarray) -> np.ndarray:
    """log(theta * t**beta), with t = 0 mapping to -inf."""
    with np.errstate(divide="ignore"):
        return math.log(p.theta) + p.beta * np.log(t_arr)


def log_pdf(p: DhillonParams, t) -> float | np.ndarray:
    """log density: log(beta) + log(theta) + (beta-1) log t - 2 log(1 + theta t^beta)."""
    arr = _as_array(t, "t", minimum_exclusive=True)
    w = _log_scale(p, arr)
    out = (math.log(p.beta) + math.log(p.theta) + (p.beta - 1.0) * np.log(arr)
           - 2.0 * np.logaddexp(0.0, w))
    return _ret(out, t)


def pdf(p: DhillonParams, t) -> float | np.ndarray:
    """Density beta*theta*t^(beta-1) / (1 + theta*t^beta)^2 for t > 0."""
    return _ret(np.exp(log_pdf(p, np.asarray(t, dtype=float))), t)


def survival(p: DhillonParams, t) -> float | np.ndarray:
    """Survival 1 / (1 + theta*t^beta); defined for t >= 0 with survival(0) = 1."""
    arr = _as_array(t, "t", minimum_exclusive=False)
    w = _log_scale(p, arr)
    return _ret(np.exp(-np.logaddexp(0.0, w)), t)


def cdf(p: DhillonParams, t) -> float | np.ndarray:
    """Distribution function 1 - survival(t), for t >= 0."""
    arr = _as_array(t, "t", minimum_exclusive=False)
    w = _log_scale(p, arr)
    # 1 - 1/(1+e^w) = sigmoid(w), computed stably on both sides.
    out = np.where(w >= 0, 1.0 / (1.0 + np.exp(-w)), np.exp(w - np.logaddexp(0.0, w)))
    return _ret(out, t)


def hazard(p: DhillonParams, t) -> float | np.ndarray:
    """Hazard rate pdf/survival = beta*theta*t^(beta-1) / (1 + theta*t^beta)."""
    arr = _as_array(t, "t", minimum_exclusive=True)
    w = _log_scale(p, arr)
    out = np.exp(math.log(p.beta) + math.log(p.theta) + (p.beta - 1.0) * np.log(arr)
                 - np.logaddexp(0.0, w))
    return _ret(out, t)


def hazard_shape(p: DhillonParams) -> HazardShape:
    """Decreasing hazard iff beta <= 1, otherwise unimodal with mode
    ((beta - 1) / theta) ** (1 / beta)."""
    if p.beta <= 1.0:
        return HazardShape(kind="decreasing")
    mode = ((p.beta - 1.0) / p.theta) ** (1.0 / p.beta)
    return HazardShape(kind="unimodal", mode=mode)


def quantile(p: DhillonParams, u) -> float | np.ndarray:
    """Inverse CDF (u / (theta (1 - u))) ** (1/beta) for u in (0, 1)."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0) or np.any(arr >= 1):
        raise DomainError("quantile requires u in (0, 1)")
    out = np.exp((np.log(arr) - np.log1p(-arr) - math.log(p.theta)) / p.beta)
    return _ret(out, u)


def sample(p: DhillonParams, n: int, rng_seed) -> Dataset:
    """Draw ``n`` lifetimes by inverse transform of seeded uniforms.

    ``rng_seed`` may be an int or a ``numpy.random.SeedSequence``; a fixed
    seed reproduces the draws bit for bit on a given platform.
    """
    if n < 1:
        raise DomainError("sample needs n >= 1")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    u = rng.random(n)
    times = np.asarray(quantile(p, u), dtype=float).reshape(-1)
    return Dataset(times, label=f"dhillon(beta={p.beta:g}, theta={p.theta:g})")


def raw_moment(p: DhillonParams, r: float) -> float:
    """E[T^r] = (r*pi / (beta*sin(pi*r/beta))) * theta^(-r/beta).

    Exists only for 0 < r < beta; otherwise ``MomentDoesNotExist``.
    """
    if not 0 < r < p.beta:
        raise MomentDoesNotExist(
            f"moment of order {r} is infinite for beta = {p.beta} (need 0 < r < beta)"
        )
    x = math.pi * r / p.beta
    return (r * math.pi / (p.beta * math.sin(x))) * p.theta ** (-r / p.beta)


def mean_variance(p: DhillonParams) -> tuple[float | None, float | None]:
    """(mean, variance); each is None when it does not exist
    (mean needs beta > 1, variance beta > 2)."""
    mean = raw_moment(p, 1.0) if p.beta > 1.0 else None
    variance = None
    if p.beta > 2.0:
        variance = raw_moment(p, 2.0) - mean * mean
    return mean, variance


def mean_residual_life(p: DhillonParams, t) -> float | np.ndarray:
    """Expected remaining lifetime given survival to t (requires beta > 1).

    Closed form: theta^(-1/beta) * (1 + theta t^beta) / beta *
    B(1 / (1 + theta t^beta); 1 - 1/beta, 1/beta), with B the incomplete
    beta function.  At t = 0 this reduces to the mean.
    """
    if p.beta <= 1.0:
        raise MrlUndefined(f"mean residual life needs beta > 1, got beta = {p.beta}")
    arr = _as_array(t, "t", minimum_exclusive=False)
    a = 1.0 - 1.0 / p.beta
    b = 1.0 / p.beta
    scale = p.theta ** (-1.0 / p.beta) / p.beta
    complete = math.exp(log_beta(a, b))
    w = np.atleast_1d(_log_scale(p, arr))
    out = np.empty_like(w)
    for i, wi in enumerate(w):
        log_one_plus = float(np.logaddexp(0.0, wi))
        # cdf value 1 - z, exact even when z = 1/(1 + theta t^beta)
        # would round to 1; the small-t behavior of the MRL lives there.
        y = -math.expm1(-log_one_plus)
        if y < 0.1:
            incbeta = complete - incomplete_beta(y, b, a)
        else:
            incbeta = incomplete_beta(math.exp(-log_one_plus), a, b)
        out[i] = scale * math.exp(log_one_plus) * incbeta
    return _ret(out.reshape(np.shape(arr)), t)
