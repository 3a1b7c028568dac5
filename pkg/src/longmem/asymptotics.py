"""Asymptotic variance of the local Whittle wavelet estimator.

The limiting within- and between-scale spectral densities of the wavelet
coefficients of a generalized fractional Brownian motion are periodizations
of products of ``psi_hat``::

    D_u(lam; d) = sum_l |xi_l|^(-2d) e_u(xi_l) conj(psi_hat(xi_l)) psi_hat(xi_l / 2^u),
    xi_l = lam + 2 pi l.

Everything else (``K``, ``I_u``, ``V``) is a quadrature of these sums.

Numerical scheme
----------------
* The ``l``-sum is truncated to ``-L <= l < L`` with ``2L`` a multiple of
  ``2^u``. For orthonormal wavelets the exact identities
  ``sum_l |psi_hat(xi_l)|^2 = 1`` and ``D_u(lam; 0) = 0`` (``u >= 1``) are used
  to subtract ``c^(-2d)`` from the weights, ``c = 2 pi L``, which makes every
  quantity exact at ``d = 0`` and shrinks the truncation error nearby.
* ``|D_u|^2`` is the squared norm of a ``2^u`` vector; by Parseval on the
  phases ``exp(-2 i pi v l / 2^u)`` it equals the sum over residues
  ``r = l mod 2^u`` of ``|sum_{l = r} w_l|^2``, so the vector is never formed.
* Integrals over ``lam`` use Gauss-Legendre panels on ``[0, pi]`` (the
  integrands are even), uniform away from 0 and geometrically graded toward
  the integrable singularity at ``lam = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .wavelets import (
    ShannonReference,
    WaveletSpec,
    make_wavelet,
    psi_hat,
    psi_hat_dyadic,
    psi_hat_periodized,
)

INF = math.inf
LOG2 = math.log(2.0)

TAIL_TOL = 1e-8
# hard cap on the truncation index of the l-sum at u = 0
L_CAP = 4096
# I_u is computed by quadrature up to this lag and extrapolated geometrically beyond
U_CAP = 10
SERIES_TOL = 1e-10


def eta_kappa(ell):
    """Mean and variance of the scale weights ``2^-j / (2 - 2^-ell)``, ``j = 0..ell``.

    Returns ``(1, 2)`` for ``ell = inf``.
    """
    if ell == INF:
        return 1.0, 2.0
    ell = int(ell)
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    j = np.arange(ell + 1, dtype=float)
    w = 2.0**-j / (2.0 - 2.0**-ell)
    eta = float(np.sum(j * w))
    kappa = float(np.sum((j - eta) ** 2 * w))
    return eta, kappa


def eta_closed_form(ell: int) -> float:
    return (1.0 - 2.0**-ell * (1.0 + ell / 2.0)) / (1.0 - 2.0 ** -(ell + 1))


def _cross_weight(ell: int, u: int, eta: float) -> float:
    i = np.arange(ell - u + 1, dtype=float)
    return float(np.sum(2.0**-i / (2.0 - 2.0**-ell) * (i - eta) * (i + u - eta)))


@lru_cache(maxsize=None)
def _lambda_rule(order: int = 12, uniform: int = 8, graded: int = 16):
    """Gauss-Legendre nodes and weights on ``[0, pi]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = list(np.linspace(np.pi / uniform, np.pi, uniform))
    low = np.pi / uniform * 2.0 ** -np.arange(1, graded + 1)
    edges = np.concatenate([[0.0], low[::-1], edges])
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append((b - a) / 2 * x + (a + b) / 2)
        weights.append((b - a) / 2 * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _check_domain(d, spec, upper_shift=0.0):
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if isinstance(spec, ShannonReference):
        return d
    lo, hi = 0.5 - spec.alpha, spec.M + upper_shift
    bad = (d <= lo) | (d > hi)
    if np.any(bad):
        raise ValueError(
            f"d={d[bad][0]:g} outside the admissible range ({lo:.4f}, {hi:g}] for {spec.name}; "
            "use a wavelet with more vanishing moments (larger M and alpha)"
        )
    return d


@lru_cache(maxsize=None)
def _decay_constant(spec: WaveletSpec) -> float:
    """Empirical ``sup |psi_hat(xi)| (1 + |xi|)^alpha`` over ``0 <= xi <= 2^10``."""
    xi = np.linspace(0.0, 2.0**10, 2**15)
    return float(np.max(np.abs(psi_hat(spec, xi)) * (1.0 + xi) ** spec.alpha))


def truncation_index(spec, d: float, u: int = 0, tol: float = TAIL_TOL) -> int:
    """Smallest ``L`` whose omitted terms are ``< tol`` under the decay bound.

    The bound ``|psi_hat(xi)| <= C (1 + |xi|)^-alpha`` gives a tail of order
    ``C^2 2^(u alpha) (2 pi L)^(1 - 2d - 2alpha)``. The result is capped at
    ``L_CAP``, so for small ``alpha`` and negative ``d`` the requested
    tolerance is not reached.
    """
    if isinstance(spec, ShannonReference):
        return 2
    p = 2.0 * d + 2.0 * spec.alpha
    if p <= 1.0:
        return L_CAP
    C = _decay_constant(spec)
    scale = 2.0 * C**2 * 2.0 ** (u * spec.alpha) * (2.0 * np.pi) ** -p / ((p - 1.0) * tol)
    L = 0.5 + scale ** (1.0 / (p - 1.0))
    return int(min(L_CAP, math.ceil(L)))


def _l_range(spec, d_min: float) -> int:
    """Shared truncation ``L`` (a power of two, ``2L >= 2^U_CAP``) for one pass."""
    if isinstance(spec, ShannonReference):
        return 2 ** (U_CAP + 1)
    base = max(truncation_index(spec, d_min), 16)
    return max(2 ** math.ceil(math.log2(base)), 2 ** (U_CAP - 1))


def _subtracts(spec) -> bool:
    return isinstance(spec, WaveletSpec) and spec.orthonormal


def _weights(log_abs_xi, d: float, c: float, subtract: bool) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        w = np.exp(-2.0 * d * log_abs_xi)
    if subtract:
        w = w - c ** (-2.0 * d)
    # the l = 0 term at lam = 0 carries psi_hat(0) = 0; its limit is 0 for d < M + 1/2
    w[~np.isfinite(w)] = 0.0
    return w


def _pass(spec, ds, L: int, chunk: int = 24):
    """One sweep of the periodization: ``K(d)`` and ``I_u(d)`` for ``u = 0..U_CAP``.

    Returns arrays of shape ``(len(ds),)`` and ``(U_CAP + 1, len(ds))``.
    """
    lam, wts = _lambda_rule()
    us = list(range(U_CAP + 1))
    l = np.arange(-L, L)
    c = 2.0 * np.pi * L
    subtract = _subtracts(spec)
    k_acc = np.zeros(len(ds))
    i_acc = np.zeros((len(us), len(ds)))
    for start in range(0, lam.size, chunk):
        lam_c, w_c = lam[start : start + chunk], wts[start : start + chunk]
        n = lam_c.size
        log_abs_xi = np.log(np.abs(lam_c[:, None] + 2.0 * np.pi * l[None, :]))
        hats = psi_hat_periodized(spec, lam_c, L, us)
        base = np.conj(hats[0])
        prods = [base * hats[u] for u in us]
        del hats
        for i, d in enumerate(ds):
            w = _weights(log_abs_xi, d, c, subtract)
            offset = c ** (-2.0 * d) if subtract else 0.0
            for u in us:
                A = (w * prods[u]).reshape(n, -1, 2**u).sum(axis=1)
                if u == 0:
                    A = A + offset
                    k_acc[i] += 2.0 * np.dot(w_c, A[:, 0].real)
                i_acc[u, i] += 2.0 * np.dot(w_c, np.sum(np.abs(A) ** 2, axis=1))
    return k_acc, i_acc


_memo: dict = {}


def _ensure(spec, d_arr) -> None:
    """Fill the memo of ``K`` and ``I_u`` for every ``d`` in ``d_arr``."""
    missing = sorted({float(x) for x in d_arr if (spec, float(x)) not in _memo})
    if not missing:
        return
    k_vals, i_vals = _pass(spec, missing, _l_range(spec, min(missing)))
    for i, d in enumerate(missing):
        _memo[(spec, d)] = (float(k_vals[i]), i_vals[:, i].copy())


def clear_cache() -> None:
    _memo.clear()


class _Periodization:
    """Direct evaluation of the ``2^u`` vector ``D_u`` at arbitrary ``lam``."""

    def __init__(self, spec, u: int, lam: np.ndarray, L: int):
        self.spec, self.u, self.L = spec, u, L
        self.lam = np.asarray(lam, dtype=float)
        l = np.arange(-L, L)
        self.xi = self.lam[:, None] + 2.0 * np.pi * l[None, :]
        hats = psi_hat_periodized(spec, self.lam, L, [0, u])
        self.prod = np.conj(hats[0]) * hats[u]
        with np.errstate(divide="ignore"):
            self.log_abs_xi = np.log(np.abs(self.xi))
        # lam = 0: the l = 0 term tends to 0 since |psi_hat(xi)| = O(|xi|^M)
        self.prod[self.xi == 0] = 0.0
        self.log_abs_xi[self.xi == 0] = 0.0
        self.subtract = _subtracts(spec)
        self.c = 2.0 * np.pi * L

    def vector(self, d: float) -> np.ndarray:
        terms = _weights(self.log_abs_xi, d, self.c, self.subtract) * self.prod
        v = np.arange(2**self.u)
        phase = np.exp(-1j * self.xi[:, :, None] * v[None, None, :] / 2**self.u)
        D = 2.0 ** (-self.u / 2) * np.einsum("ij,ijv->iv", terms, phase)
        if self.u == 0 and self.subtract:
            D = D + self.c ** (-2.0 * d)
        return D


def dinf(u: int, lam, d: float, spec, l_max: int | None = None) -> np.ndarray:
    """Limiting cross-scale spectral density ``D_u(lam; d)`` as a ``2^u`` vector.

    ``lam`` may be a scalar (returns shape ``(2^u,)``) or an array in
    ``(-pi, pi)`` (returns shape ``(len(lam), 2^u)``).
    """
    if u < 0:
        raise ValueError("u must be >= 0")
    _check_domain(d, spec)
    scalar = np.ndim(lam) == 0
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if isinstance(spec, ShannonReference):
        # only l = -sign(lam) puts both factors in the band, and only for u = 0
        D = np.zeros((lam.size, 2**u), dtype=complex)
        if u == 0:
            D[:, 0] = (2.0 * np.pi - np.abs(lam)) ** (-2.0 * d)
        return D[0] if scalar else D
    if l_max is None:
        l_max = _l_range(spec, d)
    L = 2**u * max(1, math.ceil(l_max / 2**u))
    D = _Periodization(spec, u, lam, L).vector(d)
    return D[0] if scalar else D


def I_u(u: int, d, spec):
    """``int_{-pi}^{pi} |D_u(lam; d)|^2 dlam``; vectorized over ``d``.

    Lags above ``U_CAP`` are extrapolated geometrically from the last two
    computed lags.
    """
    if u < 0:
        raise ValueError("u must be >= 0")
    d_arr = _check_domain(d, spec)
    _ensure(spec, d_arr)
    vals = np.array([_series(spec, float(x), u)[u] for x in d_arr])
    return float(vals[0]) if np.ndim(d) == 0 else vals


def K(d, spec):
    """Scaling constant ``int |xi|^(-2d) |psi_hat(xi)|^2 dxi``; vectorized over ``d``.

    Computed as ``int_{-pi}^{pi} D_0(lam; d) dlam``, the periodized form of
    the same integral.
    """
    d_arr = _check_domain(d, spec, upper_shift=0.5)
    _ensure(spec, d_arr)
    vals = np.array([_memo[(spec, float(x))][0] for x in d_arr])
    return float(vals[0]) if np.ndim(d) == 0 else vals


def _g(x: float) -> float:
    """``int_pi^{2pi} lam^x dlam`` in closed form."""
    if x == -1.0:
        return math.log(2.0)
    return ((2.0 * np.pi) ** (x + 1.0) - np.pi ** (x + 1.0)) / (x + 1.0)


def shannon_V(d: float, ell) -> float:
    """Closed-form asymptotic variance for the Shannon wavelet."""
    _, kappa = eta_kappa(ell)
    width = 2.0 if ell == INF else 2.0 - 2.0**-ell
    return math.pi * _g(-4.0 * d) / (2.0 * width * kappa * LOG2**2 * _g(-2.0 * d) ** 2)


def _series(spec, d: float, u_max: int) -> np.ndarray:
    """``I_0 .. I_{u_max}``, extrapolating geometrically past ``U_CAP``."""
    vals = list(_memo[(spec, d)][1][: u_max + 1])
    if u_max > U_CAP:
        last, prev = vals[-1], vals[-2]
        ratio = last / prev if prev > 0 and 0 <= last < prev else 0.0
        for _ in range(U_CAP + 1, u_max + 1):
            vals.append(vals[-1] * ratio)
    return np.array(vals)


def V(d: float, ell, spec) -> float:
    """Asymptotic variance of ``sqrt(n 2^-L) (d_hat - d)`` for ``ell = U - L`` scales.

    ``ell = INF`` selects the infinite-range limit, whose series over the
    scale lag ``u`` is summed until terms fall below ``1e-10`` of the
    partial sum (geometric extrapolation of the remainder past ``U_CAP``).
    """
    d = float(_check_domain(d, spec)[0])
    k = K(d, spec)
    if ell == INF:
        I = _series(spec, d, U_CAP)
        I0 = I[0]
        total, terms = 0.0, []
        for u in range(1, U_CAP + 1):
            t = I[u] * 2.0 ** ((2.0 * d - 1.0) * u)
            terms.append(t)
            total += t
            if abs(t) < SERIES_TOL * (I0 + 2.0 * total):
                break
        else:
            if len(terms) >= 2 and 0 < terms[-1] < terms[-2]:
                rho = terms[-1] / terms[-2]
                total += terms[-1] * rho / (1.0 - rho)
        return math.pi / (2.0 * LOG2 * k) ** 2 * (I0 + 2.0 * total)
    ell = int(ell)
    eta, kappa = eta_kappa(ell)
    width = 2.0 - 2.0**-ell
    I = _series(spec, d, ell)
    cross = sum(I[u] * 2.0 ** ((2.0 * d - 1.0) * u) * _cross_weight(ell, u, eta) for u in range(1, ell + 1))
    return math.pi / (width * kappa * (LOG2 * k) ** 2) * (I[0] + 2.0 / kappa * cross)


@dataclass(frozen=True)
class VarianceTable:
    """Asymptotic variances on a grid, one row per ``(d, ell)`` and family."""

    family: str
    d_grid: tuple
    ells: tuple
    values: np.ndarray = field(repr=False)
    shannon: np.ndarray | None = field(default=None, repr=False)

    def rows(self):
        """Yield ``(d, ell, variance, family)`` tuples, Shannon rows last."""
        for i, d in enumerate(self.d_grid):
            for k, ell in enumerate(self.ells):
                yield d, ell, float(self.values[i, k]), self.family
        if self.shannon is not None:
            for i, d in enumerate(self.d_grid):
                for k, ell in enumerate(self.ells):
                    yield d, ell, float(self.shannon[i, k]), "shannon"

    def to_csv(self, path_or_buf=None) -> str:
        lines = ["d,ell,variance,family"]
        for d, ell, v, fam in self.rows():
            ell_txt = "inf" if ell == INF else str(int(ell))
            lines.append(f"{d!r},{ell_txt},{v!r},{fam}")
        text = "\n".join(lines) + "\n"
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w") as fh:
                    fh.write(text)
        return text


def variance_table(spec, d_grid, ells, with_shannon: bool = True) -> VarianceTable:
    """Tabulate ``V(d, ell)`` for a wavelet family, with Shannon reference columns."""
    if isinstance(spec, str):
        spec = make_wavelet(spec)
    d_grid = tuple(float(x) for x in d_grid)
    ells = tuple(ells)
    _check_domain(d_grid, spec)
    # one sweep fills the memo for the whole d grid
    _ensure(spec, d_grid)
    values = np.array([[V(d, e, spec) for e in ells] for d in d_grid])
    shannon = np.array([[shannon_V(d, e) for e in ells] for d in d_grid]) if with_shannon else None
    return VarianceTable(family=spec.name, d_grid=d_grid, ells=ells, values=values, shannon=shannon)


def variance_interpolator(spec, ell, d_values, step: float = 0.01):
    """Tabulate ``V(., ell)`` over the span of ``d_values`` and interpolate linearly.

    Plug-in intervals for many estimates then cost one quadrature sweep.
    """
    lo = math.floor(min(d_values) / step) * step
    hi = math.ceil(max(d_values) / step) * step
    grid = np.round(np.arange(lo, hi + step / 2, step), 10)
    if grid.size == 1:
        grid = np.array([lo, lo + step])
    table = variance_table(spec, grid, [ell], with_shannon=False)
    values = table.values[:, 0]
    return lambda d: np.interp(d, grid, values)


def gfbm_covariance(spec, d: float, u: int, taus, xi_max: float | None = None) -> np.ndarray:
    """``Cov(W_{0,0}, W_{-u,tau})`` for the generalized fBm, by direct quadrature on the real line.

    Independent of the periodization used by :func:`I_u`; used to check the
    covariance-sum form ``I_u = (2 pi)^-1 sum_tau Cov^2``. Gauss-Legendre
    panels are sized so that ``exp(i tau xi / 2^u)`` is resolved for the
    largest ``|tau|`` requested.
    """
    taus = np.asarray(taus, dtype=float)
    if xi_max is None:
        xi_max = 2.0 * np.pi * 2**u * 64
    x, w = np.polynomial.legendre.leggauss(16)
    width = min(2.0, 2.0**u / max(1.0, float(np.max(np.abs(taus)))))
    edges = np.arange(0.0, xi_max + width, width)
    mid, half = (edges[:-1] + edges[1:]) / 2, (edges[1:] - edges[:-1]) / 2
    xi = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    hats = psi_hat_dyadic(spec, xi, [0, u])
    with np.errstate(divide="ignore", invalid="ignore"):
        base = wt * xi ** (-2.0 * d) * hats[0] * np.conj(hats[u]) * 2.0 ** (-u / 2)
    base[~np.isfinite(base)] = 0.0
    out = np.zeros(taus.size)
    step = 1 << 16
    for start in range(0, xi.size, step):
        sl = slice(start, start + step)
        phase = np.exp(1j * np.outer(taus, xi[sl]) / 2**u)
        out += 2.0 * np.real(phase @ base[sl])
    return out
