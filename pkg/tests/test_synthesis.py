import math

import numpy as np
import pytest

import longmem as lm
from longmem.synthesis import arfima_autocovariance, rng_for

import oracles
from conftest import deterministic_pyramid


# ---------------------------------------------------------------- ProcessModel


def test_model_integration_order():
    cases = {0.0: (0, 0.0), 0.4: (0, 0.4), 0.5: (1, -0.5), 1.2: (1, 0.2), -0.7: (-1, 0.3), 2.45: (2, 0.45)}
    for d0, (k, delta) in cases.items():
        m = lm.ProcessModel(d0)
        assert m.k == k
        assert m.delta == pytest.approx(delta, abs=1e-12)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(short_memory="arma"),
        dict(beta=0.0),
        dict(beta=2.5),
        dict(short_memory="ar1", params=(1.0,)),
        dict(short_memory="grid", params=((0.1, 1.0), (np.pi, 1.0))),
        dict(short_memory="grid", params=((0.0, 1.0),)),
        dict(short_memory="grid", params=((0.0, 1.0), (np.pi, -1.0))),
        dict(short_memory="constant", params=(0.0,)),
    ],
)
def test_model_validation(kwargs):
    with pytest.raises(ValueError):
        lm.ProcessModel(0.2, **kwargs)


def test_model_hashable_and_grid():
    m = lm.ProcessModel(0.1, "grid", params=[[0.0, 2.0], [1.0, 1.0], [np.pi, 1.0]], beta=1.0)
    assert hash(m) == hash(lm.ProcessModel(0.1, "grid", params=((0.0, 2.0), (1.0, 1.0), (np.pi, 1.0)), beta=1.0))
    np.testing.assert_allclose(m.f_star([0.5, -0.5]), [1.5, 1.5])


def test_smoothness_constant():
    m = lm.ProcessModel(0.0, "ar1", params=(0.5, 1.0), beta=2.0)
    # f*(lam) = 1 / (1 - 2 rho cos lam + rho^2): (f* - f*(0)) / f*(0) ~ -rho lam^2 / (1 - rho)^2
    assert m.smoothness_constant(eps=1e-3) == pytest.approx(0.5 / 0.25, rel=1e-3)


# ---------------------------------------------------------------- spectral_density


def test_spectral_density_white():
    lam = np.linspace(-3, 3, 13)
    np.testing.assert_array_equal(lm.spectral_density(lm.ProcessModel(0.0), lam), 1.0)


def test_spectral_density_pole():
    m = lm.ProcessModel(0.4, "ar1", params=(0.3, 2.0))
    f0 = float(m.f_star(0.0))
    lam = np.array([1e-2, 1e-3, 1e-4])
    ratio = lm.spectral_density(m, lam) / lam**-0.8
    assert np.all(np.diff(np.abs(ratio - f0)) < 0)
    assert ratio[-1] == pytest.approx(f0, rel=1e-6)


def test_spectral_density_symmetry():
    m = lm.ProcessModel(0.3, "ar1", params=(-0.4,))
    lam = np.random.default_rng(0).uniform(-np.pi, np.pi, 50)
    np.testing.assert_allclose(lm.spectral_density(m, lam), lm.spectral_density(m, -lam), rtol=1e-14)


def test_spectral_density_zero_frequency():
    with pytest.raises(ValueError):
        lm.spectral_density(lm.ProcessModel(0.3), np.array([0.0, 1.0]))
    assert lm.spectral_density(lm.ProcessModel(-0.3), np.array([0.0]))[0] == 0.0


def test_spectral_density_nonstationary_uses_fractional_part():
    lam = np.array([0.2, 1.0])
    np.testing.assert_allclose(
        lm.spectral_density(lm.ProcessModel(1.3), lam), lm.spectral_density(lm.ProcessModel(0.3), lam), rtol=1e-14
    )


# ---------------------------------------------------------------- autocovariance


def test_autocovariance_white():
    np.testing.assert_array_equal(lm.autocovariance(lm.ProcessModel(0.0), 5), [1, 0, 0, 0, 0, 0])


def test_autocovariance_lag_one_ratio():
    g = lm.autocovariance(lm.ProcessModel(0.3), 3)
    assert g[1] / g[0] == pytest.approx(3 / 7, rel=1e-14)


@pytest.mark.parametrize("d", [-0.45, -0.2, 0.1, 0.3, 0.45])
def test_closed_form_vs_gamma_functions(d):
    lags = np.arange(0, 2001)
    np.testing.assert_allclose(arfima_autocovariance(d, 2000), oracles.arfima_acvf_gamma(d, lags), rtol=1e-10)


@pytest.mark.parametrize("d", [0.45, 0.2, -0.3])
def test_quadrature_vs_closed_form(d):
    m = lm.ProcessModel(d)
    closed = lm.autocovariance(m, 1024, method="closed")
    quad = lm.autocovariance(m, 1024, method="quadrature")
    assert np.max(np.abs(quad - closed)) <= 1e-8


def test_quadrature_ar1():
    rho, s2 = 0.6, 1.7
    m = lm.ProcessModel(0.0, "ar1", params=(rho, s2))
    np.testing.assert_allclose(lm.autocovariance(m, 60), oracles.ar1_acvf(rho, s2, np.arange(61)), atol=1e-9)


def test_autocovariance_errors():
    with pytest.raises(ValueError):
        lm.autocovariance(lm.ProcessModel(0.5), 10)
    with pytest.raises(ValueError):
        lm.autocovariance(lm.ProcessModel(0.2, "ar1", params=(0.5,)), 10, method="closed")
    with pytest.raises(ValueError):
        lm.autocovariance(lm.ProcessModel(0.2), 10, method="spline")


# ---------------------------------------------------------------- simulate


def test_seed_determinism():
    m = lm.ProcessModel(0.35, "ar1", params=(0.4,))
    a, b = lm.simulate(m, 1000, 11), lm.simulate(m, 1000, 11)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, lm.simulate(m, 1000, 12))


def test_rng_counter_based():
    assert rng_for(5).standard_normal() == rng_for(5).standard_normal()
    assert isinstance(rng_for(0).bit_generator, np.random.Philox)


def test_simulate_lengths_and_errors():
    for d0 in (-1.2, -0.3, 0.0, 0.4, 1.2, 2.3):
        assert lm.simulate(lm.ProcessModel(d0), 37, 0).shape == (37,)
    with pytest.raises(ValueError):
        lm.simulate(lm.ProcessModel(0.0), 1, 0)
    with pytest.raises(ValueError):
        lm.simulate(lm.ProcessModel(0.0), 10.5, 0)
    with pytest.raises(ValueError, match="half-integer"):
        lm.simulate(lm.ProcessModel(0.5), 100, 0)


def test_white_noise_acf():
    n = 2**13
    x = lm.simulate(lm.ProcessModel(0.0), n, 3)
    x = x - x.mean()
    r1 = float(x[1:] @ x[:-1] / (x @ x))
    assert abs(r1) <= 3 / math.sqrt(n)
    assert x.var() == pytest.approx(1.0, abs=0.05)


def test_integration_round_trip():
    stat = lm.simulate(lm.ProcessModel(0.2), 500, 9)
    integrated = lm.simulate(lm.ProcessModel(1.2), 500, 9)
    np.testing.assert_allclose(np.diff(integrated), stat[1:], atol=1e-12)
    assert integrated[0] == pytest.approx(stat[0], abs=1e-15)
    np.testing.assert_allclose(np.diff(np.cumsum(stat)), stat[1:], atol=1e-12)


def test_differencing_branch():
    stat = lm.simulate(lm.ProcessModel(0.3), 101, 4)
    diffed = lm.simulate(lm.ProcessModel(-0.7), 100, 4)
    np.testing.assert_allclose(diffed, np.diff(stat), atol=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("model", [lm.ProcessModel(0.4), lm.ProcessModel(-0.3, "ar1", params=(0.5,))])
def test_exact_in_law(model):
    """Empirical ``Cov(X_0, X_h)`` over 10^5 paths of length 16 against the target, 3 standard errors."""
    n, reps = 16, 100_000
    paths = np.array([lm.simulate(model, n, s) for s in range(reps)])
    g = lm.autocovariance(model, n - 1)
    prods = paths[:, :1] * paths  # X_0 X_h for h = 0..n-1
    est = prods.mean(axis=0)
    se = prods.std(axis=0, ddof=1) / math.sqrt(reps)
    assert np.all(np.abs(est - g) <= 3 * se), (est - g) / se


def test_scalogram_slope():
    db4 = lm.make_wavelet("db4")
    x = lm.simulate(lm.ProcessModel(0.4), 2**13, 21)
    rows = lm.scaling_diagnostic(lm.dwt(x, db4))
    mid = (rows[:, 0] >= 3) & (rows[:, 0] <= 8)
    slope = np.polyfit(rows[mid, 0], rows[mid, 1], 1)[0]
    assert abs(slope - 0.8) <= 0.1


@pytest.mark.slow
def test_nonstationary_difference_memory():
    db2 = lm.make_wavelet("db2")
    n, L = 2**13, 3
    est = []
    for seed in range(40):
        dx = np.diff(lm.simulate(lm.ProcessModel(1.2), n, 300 + seed))
        est.append(lm.estimate(lm.dwt(dx, db2), lm.ScaleRange(L, lm.max_scale(n - 1, db2.T))).d_hat)
    band = 3 * math.sqrt(lm.V(0.2, lm.max_scale(n - 1, db2.T) - L, db2) / (n * 2.0**-L) / len(est))
    assert abs(np.mean(est) - 0.2) <= band + 0.01


@pytest.mark.slow
@pytest.mark.parametrize("d0", [0.4, -0.3])
def test_periodogram_slope(d0):
    n, m = 2**14, 128
    lam = 2 * np.pi * np.arange(1, m + 1) / n
    slopes = [
        np.polyfit(np.log(lam), np.log(lm.periodogram(lm.simulate(lm.ProcessModel(d0), n, s))[:m]), 1)[0]
        for s in range(30)
    ]
    assert abs(np.mean(slopes) + 2 * d0) <= 0.15


# ---------------------------------------------------------------- scaling_diagnostic


def test_scalogram_white_flat():
    db2 = lm.make_wavelet("db2")
    rows = lm.scaling_diagnostic(lm.dwt(lm.simulate(lm.ProcessModel(0.0), 2**13, 5), db2))
    # log2 of a mean of n_j chi2_1/n_j has sd ~ sqrt(2/n_j)/log 2
    sd = np.sqrt(2 / rows[:, 2]) / math.log(2)
    assert np.all(np.abs(rows[:, 1]) <= 4 * sd)


def test_scalogram_deterministic():
    db2 = lm.make_wavelet("db2")
    rows = lm.scaling_diagnostic(deterministic_pyramid(db2, 2**12, 0.35, sigma2=3.0))
    np.testing.assert_allclose(np.diff(rows[:, 1]), 0.7, atol=1e-12)
    np.testing.assert_array_equal(rows[:, 0], np.arange(1, rows.shape[0] + 1))


def test_scalogram_too_few_scales():
    db2 = lm.make_wavelet("db2")
    with pytest.raises(ValueError):
        lm.scaling_diagnostic(lm.dwt(np.random.default_rng(0).standard_normal(16), db2))
