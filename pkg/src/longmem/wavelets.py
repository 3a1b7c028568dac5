"""Compactly supported wavelets and the boundary-aware pyramidal transform.

Scale indices follow the engineering convention: ``j`` grows toward coarse
scales, and the detail coefficients at scale ``j >= 1`` are the outputs of the
usual Mallat filter bank applied ``j`` times to the samples, which play the
role of the approximation coefficients at scale 0. Only coefficients whose
filter support lies inside the observed sample are kept, and their number at
scale ``j`` is ``num_coeffs(n, T, j)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

SQRT2 = math.sqrt(2.0)

# Levels of the infinite product for psi_hat kept beyond the largest |xi|.
# levels of the m0 product kept beyond log2(max|xi| / pi); the rest is
# summed through the Taylor series of log m0 truncated at TAIL_ORDER
TAIL_LEVELS = 10
TAIL_ORDER = 10
MAX_DB_ORDER = 10


@dataclass(frozen=True)
class WaveletSpec:
    """A member of a compactly supported orthonormal wavelet family.

    Parameters
    ----------
    name : str
        Family identifier, e.g. ``"db2"``.
    M : int
        Number of vanishing moments of the wavelet.
    alpha : float
        Decay exponent of ``|psi_hat(xi)|``. Values ``<= 1`` are accepted
        (the Haar wavelet has ``alpha = 1``) but flagged by ``is_regular``.
    T : int
        Support length in samples; filters have ``T + 1`` taps.
    lowpass, highpass : tuple of float
        Scaling filter (sums to sqrt 2) and its quadrature mirror.
    highpass_cofactor : tuple of float, optional
        Coefficients of ``S`` in ``sum_k highpass[k] z^k = (z - 1)^M S(z)``.
        Supplying it keeps ``psi_hat`` accurate relative to its ``xi^M``
        behaviour near 0; otherwise it is obtained by polynomial division.
    """

    name: str
    M: int
    alpha: float
    T: int
    lowpass: tuple
    highpass: tuple
    orthonormal: bool = field(default=True, compare=False)
    highpass_cofactor: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        lo = np.asarray(self.lowpass, dtype=float)
        hi = np.asarray(self.highpass, dtype=float)
        if self.M < 1 or self.T < 1:
            raise ValueError("M and T must be positive integers")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if len(lo) > 2 * self.T or len(hi) > 2 * self.T:
            raise ValueError("filters longer than 2T")
        if abs(lo.sum() - SQRT2) > 1e-10:
            raise ValueError(f"{self.name}: lowpass must sum to sqrt(2)")
        if abs(hi.sum()) > 1e-10:
            raise ValueError(f"{self.name}: highpass must sum to 0")
        if abs(hi @ hi - 1.0) > 1e-10:
            raise ValueError(f"{self.name}: highpass must have unit norm")
        k = np.arange(len(hi), dtype=float)
        for m in range(self.M):
            terms = k**m * hi
            if abs(terms.sum()) > 1e-10 * max(1.0, np.abs(terms).sum()):
                raise ValueError(f"{self.name}: moment {m} of highpass does not vanish")

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.lowpass, dtype=float)

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.highpass, dtype=float)

    @property
    def is_regular(self) -> bool:
        """True when ``alpha > 1``, the decay required by the variance calculus."""
        return self.alpha > 1

    @property
    def phi_mean(self) -> float:
        """First moment of the scaling function, ``int t phi(t) dt``."""
        return float(np.arange(len(self.lowpass)) @ self.lo / SQRT2)


@dataclass(frozen=True)
class ShannonReference:
    """Analytic Shannon wavelet, ``|psi_hat| = 1`` on ``pi <= |xi| <= 2 pi``.

    Not compactly supported, so it has no filters and cannot be fed to
    :func:`dwt`; it only serves as a closed-form reference for the
    asymptotic variance calculus.
    """

    name: str = "shannon"
    M: float = math.inf
    alpha: float = math.inf
    orthonormal: bool = True


def _daubechies_lowpass(M: int):
    """Minimum-phase Daubechies scaling filter with ``M`` vanishing moments.

    Spectral factorization of the half-band polynomial
    ``P(y) = sum_k C(M-1+k, k) y^k`` with ``y = sin^2(omega/2)``.
    Returns the filter and the cofactor ``A`` with ``lo(z) = (1 + z)^M A(z)``.
    """
    if M == 1:
        return np.array([1.0, 1.0]) / SQRT2, np.array([1.0]) / SQRT2
    p = [math.comb(M - 1 + k, k) for k in range(M)]
    zeros = []
    for y in np.roots(p[::-1]):
        # y = (2 - z - 1/z) / 4  <=>  z^2 - (2 - 4y) z + 1 = 0
        pair = np.roots([1.0, -(2.0 - 4.0 * y), 1.0])
        zeros.append(pair[np.argmin(np.abs(pair))])
    a = np.real(np.poly(zeros))
    h = a
    for _ in range(M):
        h = np.convolve(h, [1.0, 1.0])
    scale = SQRT2 / h.sum()
    return h * scale, a * scale


def daubechies_alpha(M: int) -> float:
    """Decay exponent of ``psi_hat`` for DB-M from the ``P_M(3/4)`` bound."""
    p34 = sum(math.comb(M - 1 + k, k) * 0.75**k for k in range(M))
    return M - math.log2(p34) / 2


@lru_cache(maxsize=None)
def make_wavelet(name: str, alpha: float | None = None) -> WaveletSpec:
    """Build a Daubechies family member by name (``haar``, ``db1`` ... ``db10``).

    ``alpha`` overrides the tabulated decay exponent, e.g. to plug in a
    published lower bound for a family whose exact exponent is unknown.
    """
    key = name.strip().lower()
    if key == "haar":
        M = 1
    else:
        match = re.fullmatch(r"db(\d+)", key)
        if match is None:
            raise ValueError(f"unknown wavelet family {name!r}; use 'haar' or 'db1'..'db{MAX_DB_ORDER}'")
        M = int(match.group(1))
        if not 1 <= M <= MAX_DB_ORDER:
            raise ValueError(f"Daubechies order must be in 1..{MAX_DB_ORDER}, got {M}")
    lo, a = _daubechies_lowpass(M)
    T = len(lo) - 1
    hi = ((-1.0) ** np.arange(len(lo))) * lo[::-1]
    # hi(z) = (-z)^T lo(-1/z), so S(z) = (-1)^T z^(T-M) A(-1/z)
    m = np.arange(a.size)
    cof = np.zeros(a.size)
    cof[T - M - m] = (-1.0) ** (T + m) * a
    return WaveletSpec(
        name=key,
        M=M,
        alpha=daubechies_alpha(M) if alpha is None else float(alpha),
        T=T,
        lowpass=tuple(lo),
        highpass=tuple(hi),
        highpass_cofactor=tuple(cof),
    )


def num_coeffs(n: int, T: int, j: int) -> int:
    """Number of scale-``j`` coefficients computable from ``n`` samples."""
    return max(math.floor((n - T + 1) / 2**j - T + 1), 0)


def max_scale(n: int, T: int) -> int:
    """Largest scale index with at least one available coefficient."""
    if num_coeffs(n, T, 0) < 1:
        raise ValueError(f"sample of length {n} is too short for support T={T}")
    j = 0
    while num_coeffs(n, T, j + 1) >= 1:
        j += 1
    return j


@dataclass(frozen=True)
class Pyramid:
    """Detail coefficients ``coeffs[j]`` for scales ``j = 0 .. J``.

    Scale 0 is stored for index alignment only: with an orthonormal
    multiresolution analysis the wavelet at scale 0 is orthogonal to the
    span of the sampled scaling functions, so those coefficients are zero.
    """

    spec: WaveletSpec
    n: int
    coeffs: tuple
    counts: tuple

    @property
    def J(self) -> int:
        return len(self.coeffs) - 1

    def energy(self) -> np.ndarray:
        """Per-scale sums of squared coefficients."""
        return np.array([float(np.dot(w, w)) for w in self.coeffs])

    @classmethod
    def from_arrays(cls, spec, n, coeffs):
        coeffs = tuple(np.asarray(w, dtype=float) for w in coeffs)
        return cls(spec=spec, n=n, coeffs=coeffs, counts=tuple(len(w) for w in coeffs))


def dwt(x, spec: WaveletSpec, j_max: int | None = None) -> Pyramid:
    """Pyramidal wavelet decomposition keeping only fully supported coefficients.

    Each level is one valid-mode convolution with the lowpass and highpass
    filters followed by decimation, so the total work is linear in ``n``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("dwt expects a non-empty 1-D series")
    if not np.all(np.isfinite(x)):
        raise ValueError("dwt input contains non-finite values")
    if not isinstance(spec, WaveletSpec):
        raise TypeError("dwt needs a compactly supported WaveletSpec")
    n = x.size
    J = max_scale(n, spec.T)
    if j_max is None:
        j_max = J
    elif j_max > J or j_max < 0:
        raise ValueError(f"j_max={j_max} outside 0..{J} for n={n}")
    lo, hi = spec.lo, spec.hi
    coeffs = [np.zeros(num_coeffs(n, spec.T, 0))]
    approx = x
    for j in range(1, j_max + 1):
        detail = np.convolve(approx, hi, mode="valid")[::2]
        approx = np.convolve(approx, lo, mode="valid")[::2]
        coeffs.append(np.ascontiguousarray(detail[: num_coeffs(n, spec.T, j)]))
    return Pyramid.from_arrays(spec, n, coeffs)


def composite_filter(spec: WaveletSpec, j: int) -> np.ndarray:
    """Equivalent single filter mapping samples to scale-``j`` details.

    For ``j >= 1`` this is the highpass upsampled by ``2^(j-1)`` convolved
    with the lowpass upsampled by ``2^(j-2), ..., 2, 1``. For ``j = 0`` it is
    the sequence ``sum_m g_m c_{m+2l}`` of inner products between sampled
    scaling functions and the unit-scale wavelet.
    """
    lo, hi = spec.lo, spec.hi
    if j == 0:
        T = spec.T
        half = T // 2
        h0 = [sum(hi[m] * lo[m + 2 * l] for m in range(T + 1) if 0 <= m + 2 * l <= T) for l in range(-half, half + 1)]
        return np.array(h0)

    def upsample(f, factor):
        out = np.zeros((len(f) - 1) * factor + 1)
        out[::factor] = f
        return out

    h = upsample(hi, 2 ** (j - 1))
    for r in range(j - 1):
        h = np.convolve(h, upsample(lo, 2**r))
    return h


def direct_coeff(x, spec: WaveletSpec, j: int, k: int) -> float:
    """Coefficient ``W_{j,k}`` by one explicit dot product with the composite filter."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if j < 0 or not 0 <= k < num_coeffs(n, spec.T, j):
        raise ValueError(f"(j={j}, k={k}) is not an available coefficient for n={n}")
    h = composite_filter(spec, j)
    start = 2**j * k
    window = x[start : start + len(h)]
    return float(np.dot(h[::-1], window))


def _transfer(taps: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """``2^(-1/2) sum_k taps[k] exp(-i k omega)`` by Horner's rule."""
    z = np.exp(-1j * omega)
    acc = np.full(omega.shape, taps[-1], dtype=complex)
    for c in taps[-2::-1]:
        acc = acc * z + c
    return acc / SQRT2


def _shannon_hat(xi):
    a = np.abs(xi)
    return ((a >= np.pi) & (a <= 2 * np.pi)).astype(complex)


@lru_cache(maxsize=None)
def _log_m0_series(lo: tuple, order: int = TAIL_ORDER) -> np.ndarray:
    """Taylor coefficients of ``log m0(omega)`` about 0, indices ``0..order``."""
    taps = np.asarray(lo) / SQRT2
    k = np.arange(len(taps), dtype=float)
    b = np.array([np.sum(taps * (-1j * k) ** n) / math.factorial(n) for n in range(order + 1)])
    f = np.zeros(order + 1, dtype=complex)
    for n in range(1, order + 1):
        f[n] = b[n] - sum(m * f[m] * b[n - m] for m in range(1, n)) / n
    return f


def _phi_hat_small(lo: tuple, omega: np.ndarray) -> np.ndarray:
    """``phi_hat(omega) = prod_{r>=1} m0(omega/2^r)`` for small ``|omega|``.

    Summing the Taylor series of ``log m0`` over the dyadic levels gives
    ``sum_n f_n omega^n / (2^n - 1)``.
    """
    f = _log_m0_series(lo)
    n = np.arange(f.size)
    coef = np.zeros(f.size, dtype=complex)
    coef[1:] = f[1:] / (2.0 ** n[1:] - 1.0)
    acc = np.zeros(omega.shape, dtype=complex)
    for c in coef[:0:-1]:
        acc = (acc + c) * omega
    return np.exp(acc)


@lru_cache(maxsize=None)
def _highpass_cofactor(hi: tuple, M: int) -> np.ndarray:
    """Coefficients of ``S`` with ``sum_k hi[k] z^k = (z - 1)^M S(z)``."""
    s = np.asarray(hi, dtype=float)
    for _ in range(M):
        q = np.zeros(s.size - 1)
        acc = 0.0
        for k in range(s.size - 1, 0, -1):
            acc += s[k]
            q[k - 1] = acc
        s = q
    return s


def _m1(spec, omega: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Highpass transfer function, with its order-``M`` zero at 0 factored out.

    Horner's rule alone only has absolute accuracy near ``omega = 0``, which
    matters once ``psi_hat`` is multiplied by ``|xi|^(-2d)``.
    """
    zm1 = -2j * np.sin(omega / 2.0) * np.exp(-0.5j * omega)
    cof = spec.highpass_cofactor
    if cof is None:
        cof = _highpass_cofactor(spec.highpass, spec.M)
    return zm1**spec.M * _horner(np.asarray(cof), z)


def _psi_core(spec, xi_at, z_at, depth: int, us) -> dict:
    """Shared recursion; ``xi_at(k)`` is ``xi/2^k`` and ``z_at(k)`` is ``exp(-i xi/2^k)``."""
    lo = spec.lo
    omega = xi_at(depth)
    if omega.size:
        dev = float(np.max(np.abs(omega)))
        if dev > 2.0**-TAIL_LEVELS * 2.0 * np.pi:
            raise FloatingPointError(f"psi_hat tail argument too large ({dev:.2e})")
    phi = _phi_hat_small(spec.lowpass, omega)
    out = {}
    for k in range(depth, us[0], -1):
        z = z_at(k)
        if k - 1 in us:
            out[k - 1] = _m1(spec, xi_at(k), z) * phi
        if k - 1 > us[0]:
            phi = _horner(lo, z) * phi
    return out


def _horner(taps: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.full(z.shape, taps[-1], dtype=complex)
    for c in taps[-2::-1]:
        acc = acc * z + c
    return acc / SQRT2


def _depth(top: float) -> int:
    return TAIL_LEVELS + max(0, math.ceil(math.log2(max(top, 1.0) / np.pi)))


def psi_hat_dyadic(spec, xi, us) -> dict:
    """Return ``{u: psi_hat(xi / 2**u)}`` from a single pass of the product.

    ``phi_hat(xi/2^k)`` is accumulated from the deepest level up, and every
    requested dilation is read off on the way.
    """
    xi = np.asarray(xi, dtype=float)
    us = sorted(set(int(u) for u in us))
    if isinstance(spec, ShannonReference):
        return {u: _shannon_hat(xi / 2**u) for u in us}
    top = float(np.max(np.abs(xi))) if xi.size else 1.0
    return _psi_core(spec, lambda k: xi / 2**k, lambda k: np.exp(-1j * xi / 2**k), _depth(top), us)


def psi_hat_periodized(spec, lam, L: int, us) -> dict:
    """``{u: psi_hat((lam + 2 pi l) / 2^u)}`` on the grid ``lam x [-L, L)``.

    Same values as :func:`psi_hat_dyadic` on ``lam[:, None] + 2 pi l``; the
    phases factor into a ``lam`` part and an ``l`` part, so each level costs
    one outer product instead of a complex exponential per point.
    """
    lam = np.asarray(lam, dtype=float)
    l = np.arange(-L, L, dtype=float)
    us = sorted(set(int(u) for u in us))
    xi = lam[:, None] + 2.0 * np.pi * l[None, :]
    if isinstance(spec, ShannonReference):
        return {u: _shannon_hat(xi / 2**u) for u in us}
    top = float(np.max(np.abs(lam))) + 2.0 * np.pi * L

    def z_at(k):
        return np.outer(np.exp(-1j * lam / 2**k), np.exp(-2j * np.pi * np.mod(l, 2**k) / 2**k))

    return _psi_core(spec, lambda k: xi / 2**k, z_at, _depth(top), us)


def psi_hat(spec, xi) -> np.ndarray:
    """Fourier transform of the mother wavelet on a frequency grid.

    Uses ``psi_hat(xi) = m1(xi/2) prod_{r>=2} m0(xi/2^r)``. The first
    ``10 + log2(max|xi| / pi)`` levels are multiplied out and the remaining
    infinite product is evaluated from the Taylor series of ``log m0``.
    """
    xi = np.asarray(xi, dtype=float)
    return psi_hat_dyadic(spec, xi, [0])[0]
