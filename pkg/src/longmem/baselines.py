"""Reference estimators: log-periodogram (GPH), local Whittle Fourier, wavelet log-scale regression."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .estimator import ScaleRange
from .wavelets import Pyramid

GPH_VAR = math.pi**2 / 24.0
LWF_VAR = 0.25
LWF_BRACKET = (-1.0, 1.0)


@dataclass(frozen=True)
class BaselineResult:
    """A point estimate with its nominal asymptotic variance.

    ``nominal_var`` is the variance of ``sqrt(m) (d_hat - d)`` for the Fourier
    methods (``m`` frequencies) and of ``sqrt(n 2^-L) (d_hat - d)`` for the
    log-scale regression, so ``std_error`` is directly comparable across methods.
    """

    method: str
    d_hat: float
    m: int
    nominal_var: float
    std_error: float
    at_boundary: bool = False


def default_bandwidth(n: int) -> int:
    return int(math.floor(n**0.65))


def periodogram(x, full: bool = False) -> np.ndarray:
    """``|sum_t x_t e^{-i t lam_k}|^2 / (2 pi n)`` at ``lam_k = 2 pi k / n``.

    Returns ``k = 1 .. n // 2`` by default, ``k = 1 .. n - 1`` with ``full``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("periodogram needs at least 2 samples")
    ordinates = np.abs(np.fft.fft(x)) ** 2 / (2.0 * np.pi * n)
    return ordinates[1:] if full else ordinates[1 : n // 2 + 1]


def _fourier_inputs(x, m):
    x = np.asarray(x, dtype=float)
    n = x.size
    m = default_bandwidth(n) if m is None else int(m)
    if not 2 <= m <= n // 2:
        raise ValueError(f"bandwidth m={m} must lie in [2, {n // 2}]")
    lam = 2.0 * np.pi * np.arange(1, m + 1) / n
    return lam, periodogram(x)[:m], m


def gph(x, m: int | None = None) -> BaselineResult:
    """Least-squares slope of ``log I(lam_k)`` on ``-2 log|1 - e^{-i lam_k}|``, ``k = 1..m``."""
    lam, I, m = _fourier_inputs(x, m)
    reg = -2.0 * np.log(np.abs(2.0 * np.sin(lam / 2.0)))
    centered = reg - reg.mean()
    denom = float(centered @ centered)
    if denom <= 0:
        raise ValueError("degenerate GPH regressor")
    with np.errstate(divide="ignore"):
        y = np.log(I)
    if not np.all(np.isfinite(y)):
        raise ValueError("zero periodogram ordinate; GPH needs strictly positive ordinates")
    d_hat = float(centered @ y / denom)
    return BaselineResult("gph", d_hat, m, GPH_VAR, math.sqrt(GPH_VAR / m))


def _lwf_objective(d, log_lam, I):
    t = 2.0 * d * log_lam + np.log(I)
    top = t.max()
    return top + math.log(np.mean(np.exp(t - top))) - 2.0 * d * log_lam.mean()


def lwf(x, m: int | None = None) -> BaselineResult:
    """Local Whittle Fourier estimator.

    Minimizes ``log(m^-1 sum lam_k^(2d) I_k) - 2d m^-1 sum log lam_k`` over
    ``[-1, 1]`` with a bounded scalar search, then polishes with Newton
    steps. A minimizer on the bracket edge is flagged in ``at_boundary``.
    """
    lam, I, m = _fourier_inputs(x, m)
    if np.any(I <= 0):
        raise ValueError("zero periodogram ordinate; LWF needs strictly positive ordinates")
    log_lam = np.log(lam)
    lo, hi = LWF_BRACKET
    res = minimize_scalar(_lwf_objective, bounds=LWF_BRACKET, args=(log_lam, I), method="bounded",
                          options={"xatol": 1e-8})
    d = float(res.x)
    for _ in range(20):
        t = 2.0 * d * log_lam + np.log(I)
        w = np.exp(t - t.max())
        w /= w.sum()
        mean = w @ log_lam
        first = 2.0 * (mean - log_lam.mean())
        second = 4.0 * (w @ (log_lam - mean) ** 2)
        step = -first / second
        if not lo <= d + step <= hi:
            break
        d += step
        if abs(step) < 1e-12:
            break
    at_boundary = bool(min(d - lo, hi - d) < 1e-6)
    return BaselineResult("lwf", float(d), m, LWF_VAR, math.sqrt(LWF_VAR / m), at_boundary)


def logscale_regression(pyramid: Pyramid, rng: ScaleRange) -> BaselineResult:
    """Weighted regression of ``log2(mean_k W_{j,k}^2)`` on ``j``; ``d_hat`` is half the slope.

    Weights are the inverse of the large-sample variance ``2 / (n_j log(2)^2)``
    of each ordinate, i.e. proportional to ``n_j``.
    """
    if rng.U > pyramid.J:
        raise ValueError(f"U={rng.U} exceeds the largest available scale J={pyramid.J}")
    j, y, w = [], [], []
    for s in range(rng.L, rng.U + 1):
        coeffs = pyramid.coeffs[s]
        if coeffs.size == 0:
            continue
        ms = float(np.mean(coeffs * coeffs))
        if ms <= 0:
            raise ValueError(f"scale {s} has identically zero coefficients")
        j.append(s)
        y.append(math.log2(ms))
        w.append(coeffs.size * math.log(2.0) ** 2 / 2.0)
    if len(j) < 2:
        raise ValueError("log-scale regression needs at least 2 non-empty scales")
    j, y, w = map(np.asarray, (j, y, w))
    jbar = (w @ j) / w.sum()
    sxx = w @ (j - jbar) ** 2
    slope = float(w @ ((j - jbar) * y) / sxx)
    var = 0.25 / sxx
    bandwidth = pyramid.n * 2.0**-rng.L
    return BaselineResult("logscale", slope / 2.0, len(j), float(var * bandwidth), math.sqrt(var))
