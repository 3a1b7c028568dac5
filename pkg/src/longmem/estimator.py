"""Local Whittle wavelet estimator of the memory parameter.

Everything is computed from the per-scale sums ``Q_j = sum_k W_{j,k}^2`` and
counts ``n_j``; the contrast is

    L(d) = log sum_j 2^(2d(<I> - j)) Q_j,

a log-sum-exp of terms affine in ``d``, hence convex. Its derivatives are the
mean and variance of ``j`` under the softmax weights of those terms, which
makes Newton's method cheap and stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from .asymptotics import V
from .wavelets import Pyramid, WaveletSpec, max_scale

LOG2 = math.log(2.0)
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100


class ConvergenceError(RuntimeError):
    """Newton iteration did not reach tolerance within the iteration cap."""


@dataclass(frozen=True)
class ScaleRange:
    """Scale indices ``L <= j <= U`` entering the estimator."""

    L: int
    U: int

    def __post_init__(self):
        if not (0 <= self.L < self.U):
            raise ValueError(f"need 0 <= L < U, got L={self.L}, U={self.U}")

    @property
    def ell(self) -> int:
        return self.U - self.L

    def scales(self) -> np.ndarray:
        return np.arange(self.L, self.U + 1)


@dataclass(frozen=True)
class EstimateResult:
    """Outcome of :func:`estimate`.

    ``asymp_var`` and ``ci`` are filled in by :func:`confidence_interval`.
    """

    d_hat: float
    sigma2_hat: float
    range: ScaleRange
    mean_scale: float
    n_eff: int
    ell: int
    n: int
    iterations: int = 0
    asymp_var: float | None = None
    ci: tuple | None = None
    level: float | None = None


def mean_scale(counts, L: int = 0) -> float:
    """Average scale ``sum_j j n_j / sum_j n_j`` for counts indexed from ``L``."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total < 1:
        raise ValueError("empty index set: no coefficients in the scale range")
    j = L + np.arange(counts.size)
    return float(np.dot(j, counts) / total)


def _scale_sums(pyramid: Pyramid, rng: ScaleRange, min_scales: int = 2):
    """Scales, counts and sums of squares over ``rng``, empty scales dropped."""
    if rng.U > pyramid.J:
        raise ValueError(f"U={rng.U} exceeds the largest available scale J={pyramid.J}")
    if rng.L == 0 and pyramid.counts[0] and not np.any(pyramid.coeffs[0]):
        raise ValueError(
            "scale 0 of a dwt pyramid is identically zero (details start at level 1); use L >= 1"
        )
    j = rng.scales()
    counts = np.array([pyramid.counts[s] for s in j])
    sums = np.array([float(np.dot(pyramid.coeffs[s], pyramid.coeffs[s])) for s in j])
    keep = counts > 0
    j, counts, sums = j[keep], counts[keep], sums[keep]
    if j.size < min_scales:
        raise ValueError(f"scale range [{rng.L}, {rng.U}] contains fewer than {min_scales} non-empty scales")
    if not np.any(sums > 0):
        raise ValueError("degenerate input: all wavelet coefficients in the range are zero")
    return j.astype(float), counts, sums


def _log_terms(d: float, j, counts, sums) -> np.ndarray:
    m = np.dot(j, counts) / counts.sum()
    with np.errstate(divide="ignore"):
        return 2.0 * LOG2 * (m - j) * d + np.log(sums)


def _derivatives(d: float, j, counts, sums):
    """Contrast and its first two derivatives in ``d``."""
    t = _log_terms(d, j, counts, sums)
    value = logsumexp(t)
    p = np.exp(t - value)
    m = np.dot(j, counts) / counts.sum()
    mean_j = np.dot(p, j)
    first = -2.0 * LOG2 * (mean_j - m)
    second = (2.0 * LOG2) ** 2 * np.dot(p, (j - mean_j) ** 2)
    return float(value), float(first), float(second)


def contrast(pyramid: Pyramid, rng: ScaleRange, d: float) -> float:
    """``log sum_{(j,k) in I} 2^(2d(<I> - j)) W_{j,k}^2``."""
    return _derivatives(d, *_scale_sums(pyramid, rng, min_scales=1))[0]


def score(pyramid: Pyramid, rng: ScaleRange, d: float) -> float:
    """``sum_{(j,k) in I} (j - <I>) 2^(-2jd) W_{j,k}^2``."""
    j, counts, sums = _scale_sums(pyramid, rng, min_scales=1)
    m = np.dot(j, counts) / counts.sum()
    return float(np.sum((j - m) * 2.0 ** (-2.0 * j * d) * sums))


def _newton(j, counts, sums, d0: float = 0.0):
    d = d0
    value, first, second = _derivatives(d, j, counts, sums)
    for it in range(1, NEWTON_MAX_ITER + 1):
        if second <= 0:
            raise ConvergenceError("contrast is not strictly convex on this range")
        step = -first / second
        while True:
            new_value, new_first, new_second = _derivatives(d + step, j, counts, sums)
            if new_value <= value + 1e-14 * abs(value) or abs(step) < NEWTON_TOL:
                break
            step /= 2.0
        d += step
        value, first, second = new_value, new_first, new_second
        if abs(step) < NEWTON_TOL:
            return d, it
    raise ConvergenceError(f"Newton iteration did not converge in {NEWTON_MAX_ITER} steps (last d={d:g})")


def estimate(pyramid: Pyramid, rng: ScaleRange) -> EstimateResult:
    """Minimize the contrast over the real line.

    Parameters
    ----------
    pyramid : Pyramid
        Wavelet coefficients of the series.
    rng : ScaleRange
        Scales used; empty scales are dropped.

    Returns
    -------
    EstimateResult
        ``d_hat``, the profile scale ``sigma2_hat = |I|^-1 sum 2^(-2 d_hat j) W^2``
        and bookkeeping for confidence intervals.

    Raises
    ------
    ValueError
        Fewer than two non-empty scales, or all coefficients zero.
    ConvergenceError
        Newton's method did not converge within 100 iterations.
    """
    j, counts, sums = _scale_sums(pyramid, rng)
    d_hat, iterations = _newton(j, counts, sums)
    n_eff = int(counts.sum())
    sigma2 = float(np.sum(2.0 ** (-2.0 * d_hat * j) * sums) / n_eff)
    return EstimateResult(
        d_hat=float(d_hat),
        sigma2_hat=sigma2,
        range=rng,
        mean_scale=float(np.dot(j, counts) / n_eff),
        n_eff=n_eff,
        ell=rng.ell,
        n=pyramid.n,
        iterations=iterations,
    )


def select_scales(n: int, T: int, beta: float = 1.0) -> ScaleRange:
    """Default scale range: ``L = round(log2(n) / (1 + 2 beta))`` clamped to ``[1, J - 2]``, ``U = J``."""
    if not 0 < beta <= 2:
        raise ValueError(f"beta must lie in (0, 2], got {beta}")
    J = max_scale(n, T)
    if J < 3:
        raise ValueError(f"series of length {n} leaves only {max(J, 0)} scales; need at least 3")
    L = int(round(math.log2(n) / (1.0 + 2.0 * beta)))
    L = min(max(L, 1), J - 2)
    return ScaleRange(L, J)


def confidence_interval(result: EstimateResult, spec: WaveletSpec, level: float = 0.95, ell=None):
    """Gaussian interval ``d_hat +/- z sqrt(V(d_hat, ell) / (n 2^-L))``.

    ``ell`` defaults to ``U - L``; pass ``asymptotics.INF`` for the
    infinite-range variance. Returns ``(interval, updated_result)``.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    ell = result.ell if ell is None else ell
    var = V(result.d_hat, ell, spec)
    half = float(norm.ppf(0.5 + level / 2.0)) * math.sqrt(var / (result.n * 2.0 ** -result.range.L))
    ci = (result.d_hat - half, result.d_hat + half)
    return ci, replace(result, asymp_var=var, ci=ci, level=level)
