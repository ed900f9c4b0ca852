"""Self-contained numeric kernels: root finding, adaptive quadrature,
the incomplete beta function and a closed-form tail integral.

Everything here is a pure function of its inputs and deterministic, so the
routines can be called concurrently without shared state.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, MaxIterExceeded, NoBracket

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class RootConfig:
    """Settings for :func:`find_root`.

    Attributes:
        abs_tol: stop once the bisection bracket is narrower than this.
        max_iter: iteration cap before raising ``MaxIterExceeded``.
        bracket: optional ``(lo, hi)`` interval with a sign change of f.
            When omitted a geometric scan over ``±10^k`` is attempted.
    """

    abs_tol: float = 1e-12
    max_iter: int = 200
    bracket: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")
        if self.bracket is not None and not self.bracket[0] < self.bracket[1]:
            raise DomainError("bracket must satisfy lo < hi")


@dataclass(frozen=True)
class QuadResult:
    """Adaptive-quadrature outcome: value, error bound, convergence flag."""

    value: float
    abs_error_estimate: float
    converged: bool

    def __post_init__(self) -> None:
        if self.abs_error_estimate < 0:
            raise DomainError("abs_error_estimate must be nonnegative")


def _scan_bracket(f: Callable[[float], float]) -> tuple[float, float]:
    """Look for a sign change of f over a fixed geometric ladder."""
    candidates = [-(10.0 ** k) for k in range(12, -13, -1)]
    candidates += [10.0 ** k for k in range(-12, 13)]
    prev_x = None
    prev_f = None
    for x in candidates:
        try:
            fx = f(x)
        except (ArithmeticError, ValueError):
            prev_x = None
            continue
        if not math.isfinite(fx):
            prev_x = None
            continue
        if fx == 0.0:
            return (x, x)
        if prev_x is not None and (fx < 0) != (prev_f < 0):
            return (prev_x, x)
        prev_x, prev_f = x, fx
    raise NoBracket("no sign change found on the default search ladder")


def find_root(f: Callable[[float], float], cfg: RootConfig | None = None) -> float:
    """Find a root of ``f`` with Newton steps guarded by a bisection bracket.

    The derivative is taken by central finite differences; whenever the
    Newton step leaves the current bracket (or is not finite) the step
    falls back to bisection, so convergence is guaranteed for a continuous
    f with a sign change over the bracket.  Deterministic: the same inputs
    produce bit-identical output.

    Raises:
        NoBracket: f has the same sign at both bracket ends.
        MaxIterExceeded: the bracket did not shrink below ``abs_tol``.
    """
    cfg = cfg or RootConfig()
    if cfg.bracket is not None:
        lo, hi = float(cfg.bracket[0]), float(cfg.bracket[1])
    else:
        lo, hi = _scan_bracket(f)
        if lo == hi:
            return lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0) == (fhi < 0):
        raise NoBracket(f"f({lo}) = {flo} and f({hi}) = {fhi} have the same sign")

    x = 0.5 * (lo + hi)
    for _ in range(cfg.max_iter):
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx < 0) == (flo < 0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        width_tol = cfg.abs_tol + 4.0 * _EPS * max(abs(lo), abs(hi))
        if hi - lo < width_tol:
            return 0.5 * (lo + hi)
        # Newton step from a central finite-difference derivative.
        delta = math.sqrt(_EPS) * max(abs(x), 1.0)
        try:
            deriv = (f(x + delta) - f(x - delta)) / (2.0 * delta)
        except (ArithmeticError, ValueError):
            deriv = 0.0
        x_new = x - fx / deriv if deriv != 0.0 and math.isfinite(deriv) else math.nan
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        x = x_new
    raise MaxIterExceeded(f"bracket ({lo}, {hi}) still wider than {cfg.abs_tol}")


# 15-point Kronrod rule with the embedded 7-point Gauss rule (abscissae on
# the positive half of [-1, 1]; the last node is the midpoint).
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _gk15(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    """One Gauss-Kronrod 15 panel: returns (value, error estimate)."""
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fc = f(center)
    resk = _WGK[7] * fc
    resg = _WG[3] * fc
    for j in range(7):
        dx = half * _XGK[j]
        f1 = f(center - dx)
        f2 = f(center + dx)
        fsum = f1 + f2
        resk += _WGK[j] * fsum
        if j % 2 == 1:
            resg += _WG[(j - 1) // 2] * fsum
    value = resk * half
    if not math.isfinite(value):
        return 0.0, math.inf
    return value, abs((resk - resg) * half)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_segments: int = 4000,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod integration of f over (a, b).

    ``b`` may be ``math.inf``; the tail beyond a+1 is folded onto (0, 1]
    with x = m + (1-v)/v, which keeps all node coordinates well
    conditioned for very large x.  The Kronrod nodes never touch the
    interval ends, so integrable endpoint singularities are resolved by
    subdivision rather than evaluated.

    Returns a :class:`QuadResult`; ``converged`` is False when the segment
    budget ran out before the summed error estimate dropped below ``tol``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not a < b:
        raise DomainError("integration interval requires a < b")

    pieces: list[tuple[Callable[[float], float], float, float]] = []
    if math.isinf(b):
        m = a + 1.0

        def tail(v: float, _f=f, _m=m) -> float:
            x = _m + (1.0 - v) / v
            return _f(x) / (v * v)

        pieces.append((f, a, m))
        pieces.append((tail, 0.0, 1.0))
    else:
        pieces.append((f, a, b))

    # Max-heap of segments keyed by error estimate; the tie-breaking counter
    # keeps the subdivision order (and therefore the result) deterministic.
    heap: list[tuple[float, int, Callable[[float], float], float, float, float]] = []
    counter = 0
    total_value = 0.0
    total_error = 0.0
    for fn, lo, hi in pieces:
        val, err = _gk15(fn, lo, hi)
        heapq.heappush(heap, (-err, counter, fn, lo, hi, val))
        counter += 1
        total_value += val
        total_error += err

    n_segments = len(pieces)
    while total_error > tol and n_segments < max_segments and heap:
        neg_err, _, fn, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            # Cannot split further in floating point; retire the segment.
            continue
        v1, e1 = _gk15(fn, lo, mid)
        v2, e2 = _gk15(fn, mid, hi)
        total_value += v1 + v2 - val
        total_error += e1 + e2 - (-neg_err)
        heapq.heappush(heap, (-e1, counter, fn, lo, mid, v1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, fn, mid, hi, v2))
        counter += 1
        n_segments += 1

    total_error = max(total_error, 0.0)
    return QuadResult(
        value=total_value,
        abs_error_estimate=total_error,
        converged=bool(total_error <= tol),
    )


def _beta_cf(a: float, b: float, x: float, max_iter: int = 500) -> float:
    """Continued fraction for the regularized incomplete beta (modified
    Lentz iteration, the classic Numerical-Recipes form)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise MaxIterExceeded("incomplete beta continued fraction did not converge")


def log_beta(a: float, b: float) -> float:
    """log of the complete beta function B(a, b)."""
    if a <= 0 or b <= 0:
        raise DomainError("log_beta requires a > 0 and b > 0")
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def regularized_incomplete_beta(z: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_z(a, b) in [0, 1]."""
    if a <= 0 or b <= 0:
        raise DomainError("incomplete beta requires a > 0 and b > 0")
    if z < 0 or z > 1:
        raise DomainError(f"incomplete beta requires z in [0, 1], got {z}")
    if z == 0.0:
        return 0.0
    if z == 1.0:
        return 1.0
    log_front = a * math.log(z) + b * math.log1p(-z) - log_beta(a, b)
    # Symmetry switch keeps the continued fraction in its fast region.
    if z < a / (a + b):
        return math.exp(log_front) * _beta_cf(a, b, z) / a
    return 1.0 - math.exp(log_front) * _beta_cf(b, a, 1.0 - z) / b


def incomplete_beta(z: float, a: float, b: float) -> float:
    """Non-regularized incomplete beta B(z; a, b) = ∫_0^z u^(a-1)(1-u)^(b-1) du.

    Monotone nondecreasing in z; at z = 1 it equals the complete beta
    function B(a, b).
    """
    return regularized_incomplete_beta(z, a, b) * math.exp(log_beta(a, b))


def tail_product_integral(beta: float, r: float) -> float:
    """Closed form of ∫_0^∞ x / ((1 + r^beta x)^2 (1 + x)^2) dx for 0 < r < 1.

    Writing s = r^beta - 1 the value is ((s + 2) log1p(s) - 2 s) / s^3,
    which suffers cubic cancellation as s -> 0; below |s| = 1e-3 a fourth
    order expansion 1/6 - s/6 + 3 s^2/20 - 2 s^3/15 is used instead, so the
    function stays finite and accurate through the r^beta -> 1 limit (where
    the integral equals 1/6).  Always strictly positive.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"requires 0 < r < 1, got {r}")
    if beta <= 0:
        raise DomainError(f"requires beta > 0, got {beta}")
    s = math.expm1(beta * math.log(r))
    if abs(s) < 1e-3:
        return 1.0 / 6.0 - s / 6.0 + 3.0 * s * s / 20.0 - 2.0 * s ** 3 / 15.0
    return ((s + 2.0) * math.log1p(s) - 2.0 * s) / s ** 3


# Coefficients of Acklam's rational approximation to the standard normal
# quantile; one Halley step against math.erfc then gives full precision.
_NQ_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
         1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_NQ_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
         6.680131188771972e+01, -1.328068155288572e+01)
_NQ_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
         -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_NQ_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
         3.754408661907416e+00)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal_quantile requires p in (0, 1), got {p}")
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((_NQ_C[0] * q + _NQ_C[1]) * q + _NQ_C[2]) * q + _NQ_C[3]) * q
             + _NQ_C[4]) * q + _NQ_C[5]
        x /= (((_NQ_D[0] * q + _NQ_D[1]) * q + _NQ_D[2]) * q + _NQ_D[3]) * q + 1.0
        x = -x
    elif p <= 1.0 - p_low:
        q = p - 0.5
        r = q * q
        x = (((((_NQ_A[0] * r + _NQ_A[1]) * r + _NQ_A[2]) * r + _NQ_A[3]) * r
              + _NQ_A[4]) * r + _NQ_A[5]) * q
        x /= ((((_NQ_B[0] * r + _NQ_B[1]) * r + _NQ_B[2]) * r + _NQ_B[3]) * r
              + _NQ_B[4]) * r + 1.0
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        x = ((((_NQ_C[0] * q + _NQ_C[1]) * q + _NQ_C[2]) * q + _NQ_C[3]) * q
             + _NQ_C[4]) * q + _NQ_C[5]
        x /= (((_NQ_D[0] * q + _NQ_D[1]) * q + _NQ_D[2]) * q + _NQ_D[3]) * q + 1.0
    # Halley refinement.
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)
