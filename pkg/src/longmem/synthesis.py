"""Exact Gaussian simulation of (possibly nonstationary) long-memory series.

A model with memory parameter ``d0`` is realized as a stationary process with
spectral density ``|1 - e^{-i lam}|^(-2 delta) f*(lam)``, ``delta = d0 - k``
in ``[-1/2, 1/2)``, integrated ``k`` times (or differenced ``-k`` times).

Autocovariances use ``gamma(h) = (2 pi)^-1 int e^{i h lam} f(lam) dlam``, so
``f = 1`` is unit-variance white noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, zeta

from .wavelets import Pyramid

QUAD_GRID = 2**20
MAX_DOUBLINGS = 4
SHORT_MEMORY_MODELS = ("constant", "ar1", "grid")


@dataclass(frozen=True)
class ProcessModel:
    """Memory parameter and short-memory spectral factor ``f*``.

    Parameters
    ----------
    d0 : float
        Memory parameter; any real value.
    short_memory : {"constant", "ar1", "grid"}
        ``constant``: ``f* = params[0]`` (default 1).
        ``ar1``: ``f* = s2 / |1 - rho e^{-i lam}|^2`` with ``params = (rho, s2)``.
        ``grid``: piecewise-linear interpolation of ``params = ((lam_0, f_0), ...)``
        on ``[0, pi]``, extended evenly; ``lam_0`` must be 0.
    beta : float
        Declared smoothness exponent of ``f*`` at 0, in ``(0, 2]``.
    gamma : float
        Smoothness constant of the class; documentation only.
    """

    d0: float = 0.0
    short_memory: str = "constant"
    params: tuple = ()
    beta: float = 2.0
    gamma: float = 1.0

    def __post_init__(self):
        # keep the model hashable (it keys the embedding cache)
        object.__setattr__(self, "params", tuple(tuple(p) if np.ndim(p) else p for p in self.params))
        if self.short_memory not in SHORT_MEMORY_MODELS:
            raise ValueError(f"short_memory must be one of {SHORT_MEMORY_MODELS}, got {self.short_memory!r}")
        if not 0 < self.beta <= 2:
            raise ValueError("beta must lie in (0, 2]")
        if self.short_memory == "ar1":
            rho = self.params[0] if self.params else 0.0
            if not abs(rho) < 1:
                raise ValueError("ar1 short memory needs |rho| < 1")
        if self.short_memory == "grid":
            pts = np.asarray(self.params, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
                raise ValueError("grid short memory needs params=((lam, f), ...) with at least two points")
            if pts[0, 0] != 0.0 or pts[-1, 0] < np.pi or np.any(np.diff(pts[:, 0]) <= 0):
                raise ValueError("grid abscissae must increase from 0 to at least pi")
        lam = np.linspace(0.0, np.pi, 513)
        vals = self.f_star(lam)
        if not (np.all(np.isfinite(vals)) and np.all(vals > 0)):
            raise ValueError("f* must be positive and finite on [0, pi]")

    @property
    def k(self) -> int:
        """Integration order: the smallest integer ``> d0 - 1/2``."""
        return math.floor(self.d0 - 0.5) + 1

    @property
    def delta(self) -> float:
        """Memory parameter of the stationary component, in ``[-1/2, 1/2)``."""
        return self.d0 - self.k

    def f_star(self, lam) -> np.ndarray:
        lam = np.abs(np.asarray(lam, dtype=float))
        if self.short_memory == "constant":
            c = float(self.params[0]) if self.params else 1.0
            return np.full(lam.shape, c)
        if self.short_memory == "ar1":
            rho = float(self.params[0]) if self.params else 0.0
            s2 = float(self.params[1]) if len(self.params) > 1 else 1.0
            return s2 / np.abs(1.0 - rho * np.exp(-1j * lam)) ** 2
        pts = np.asarray(self.params, dtype=float)
        return np.interp(lam, pts[:, 0], pts[:, 1])

    def smoothness_constant(self, eps: float = 0.1) -> float:
        """Empirical ``sup |f*(lam) - f*(0)| / (f*(0) lam^beta)`` over ``(0, eps]``."""
        lam = np.geomspace(1e-6, eps, 400)
        f0 = float(self.f_star(0.0))
        return float(np.max(np.abs(self.f_star(lam) - f0) / (f0 * lam**self.beta)))


def spectral_density(model: ProcessModel, lam) -> np.ndarray:
    """``|1 - e^{-i lam}|^(-2 delta) f*(lam)`` of the stationary component."""
    lam = np.asarray(lam, dtype=float)
    delta = model.delta
    if delta > 0 and np.any(lam == 0):
        raise ValueError("spectral density is infinite at lam = 0 for positive memory")
    with np.errstate(divide="ignore"):
        base = np.abs(2.0 * np.sin(lam / 2.0)) ** (-2.0 * delta)
    return base * model.f_star(lam)


def arfima_autocovariance(d: float, max_lag: int) -> np.ndarray:
    """Closed form for ``f = |1 - e^{-i lam}|^(-2d)``: ``gamma(0) = Gamma(1-2d)/Gamma(1-d)^2``."""
    if not -0.5 <= d < 0.5:
        raise ValueError(f"stationary autocovariance needs -1/2 <= d < 1/2, got {d}")
    g = np.empty(max_lag + 1)
    g[0] = math.exp(gammaln(1.0 - 2.0 * d) - 2.0 * gammaln(1.0 - d))
    h = np.arange(1, max_lag + 1)
    g[1:] = g[0] * np.cumprod((h - 1.0 + d) / (h - d))
    return g


def _quadrature_autocovariance(model: ProcessModel, max_lag: int, grid: int = QUAD_GRID) -> np.ndarray:
    """Trapezoid rule by FFT with Navot corrections for the ``|lam|^(-2 delta)`` point.

    Writing ``f = |lam|^s phi(lam)``, ``s = -2 delta``, the rule that drops the
    singular node is corrected by ``-2 sum_m zeta(-s-2m) psi^(2m)(0) h^(s+2m+1) / (2m)!``
    with ``psi = phi e^{i h lam}``; terms ``m = 0, 1`` are kept.
    """
    if max_lag >= grid // 2:
        raise ValueError(f"max_lag must be below {grid // 2} for the quadrature route")
    delta = model.delta
    step = 2.0 * np.pi / grid
    lam = np.arange(grid) * step
    f = np.zeros(grid)
    f[1:] = spectral_density(model, lam[1:])
    sums = np.fft.ifft(f).real[: max_lag + 1] * grid * step
    s = -2.0 * delta
    f0 = float(model.f_star(0.0))
    if s == 0.0:
        return (sums + step * f0) / (2.0 * np.pi)
    # phi'' at 0: the sinc factor contributes f*(0) delta / 6
    eps = 1e-3
    fstar2 = 2.0 * (float(model.f_star(eps)) - f0) / eps**2
    phi2 = f0 * delta / 6.0 + fstar2
    lags = np.arange(max_lag + 1)
    corr = 2.0 * zeta(-s) * f0 * step ** (1.0 + s)
    corr = corr + 2.0 * zeta(-s - 2.0) * (phi2 - lags**2 * f0) * step ** (3.0 + s) / 2.0
    return (sums - corr) / (2.0 * np.pi)


def autocovariance(model: ProcessModel, max_lag: int, method: str = "auto") -> np.ndarray:
    """Autocovariances ``gamma(0..max_lag)`` of the stationary component.

    ``method="closed"`` uses the ARFIMA recursion (constant ``f*`` only),
    ``"quadrature"`` the corrected FFT rule on a ``2^20`` grid, and
    ``"auto"`` picks the former when it applies.
    """
    delta = model.delta
    if not -0.5 < delta < 0.5:
        raise ValueError(f"stationary memory must satisfy |d| < 1/2, got {delta}")
    if method == "auto":
        method = "closed" if model.short_memory == "constant" else "quadrature"
    if method == "closed":
        if model.short_memory != "constant":
            raise ValueError("closed-form autocovariance only for constant f*")
        return float(model.f_star(0.0)) * arfima_autocovariance(delta, max_lag)
    if method == "quadrature":
        return _cached_quadrature(model, max_lag)
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=16)
def _cached_quadrature(model: ProcessModel, max_lag: int) -> np.ndarray:
    out = _quadrature_autocovariance(model, max_lag)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def _embedding(model: ProcessModel, n: int):
    """Square-root eigenvalues of the smallest admissible circulant embedding."""
    size = 2 ** max(1, math.ceil(math.log2(max(2 * (n - 1), 2))))
    for _ in range(MAX_DOUBLINGS + 1):
        g = autocovariance(model, size // 2)
        row = np.concatenate([g, g[-2:0:-1]])
        eig = np.fft.fft(row).real
        if eig.min() >= -1e-10 * eig.max():
            root = np.sqrt(np.clip(eig, 0.0, None) / size)
            root.setflags(write=False)
            return root
        size *= 2
    raise RuntimeError(f"circulant embedding not nonnegative after {MAX_DOUBLINGS} doublings")


def rng_for(seed: int) -> np.random.Generator:
    """Counter-based generator, so replication ``r`` can use ``seed + r`` independently."""
    return np.random.Generator(np.random.Philox(int(seed)))


def simulate(model: ProcessModel, n: int, seed: int) -> np.ndarray:
    """Exact Gaussian sample path of length ``n``.

    The stationary component is drawn by circulant embedding; it is then
    integrated ``k`` times with zero initial value, or differenced ``-k``
    times, to reach memory ``d0``.
    """
    if int(n) != n or n < 2:
        raise ValueError("n must be an integer >= 2")
    n = int(n)
    extra = max(0, -model.k)
    m = n + extra
    if model.delta <= -0.5:
        raise ValueError(f"d0={model.d0} is a half-integer, where no stationary component exists; perturb d0 slightly")
    root = _embedding(model, m)
    gen = rng_for(seed)
    size = root.size
    z = gen.standard_normal(size) + 1j * gen.standard_normal(size)
    y = np.fft.fft(root * z).real[:m]
    if model.k > 0:
        for _ in range(model.k):
            y = np.cumsum(y)
    elif extra:
        y = np.diff(y, n=extra)
    return y


def scaling_diagnostic(pyramid: Pyramid) -> np.ndarray:
    """Rows ``(j, log2 mean W_{j,k}^2, n_j)`` for the non-empty scales ``j >= 1``."""
    rows = []
    for j in range(1, pyramid.J + 1):
        w = pyramid.coeffs[j]
        if w.size:
            rows.append((j, math.log2(float(np.mean(w * w))), w.size))
    if len(rows) < 3:
        raise ValueError("scaling diagnostic needs at least 3 non-empty scales")
    return np.array(rows)
