import math

import numpy as np
import pytest

import longmem as lm
from longmem.asymptotics import INF, I_u, K, V, dinf, eta_kappa, gfbm_covariance, shannon_V, variance_table

import oracles

SHANNON = lm.ShannonReference()
BOUND = 1 / (8 * math.log(2) ** 2)


# ---------------------------------------------------------------- eta_kappa


def test_eta_kappa_examples():
    eta, kappa = eta_kappa(1)
    assert eta == pytest.approx(1 / 3, abs=1e-15)
    assert kappa == pytest.approx(2 / 9, abs=1e-15)
    assert eta_kappa(INF) == (1.0, 2.0)


@pytest.mark.parametrize("ell", range(1, 31))
def test_eta_kappa_closed_forms(ell):
    eta, kappa = eta_kappa(ell)
    assert abs(eta - oracles.eta_closed(ell)) <= 1e-12
    assert abs(kappa - oracles.kappa_direct(ell)) <= 1e-12


def test_eta_kappa_limits_and_errors():
    eta, kappa = eta_kappa(60)
    assert abs(eta - 1) < 1e-12 and abs(kappa - 2) < 1e-12
    for bad in (0, -3):
        with pytest.raises(ValueError):
            eta_kappa(bad)


# ---------------------------------------------------------------- dinf


@pytest.mark.parametrize("u", [1, 2, 3])
def test_dinf_shannon_vanishes_across_scales(u):
    lam = np.linspace(-3.1, 3.1, 17)
    assert np.all(dinf(u, lam, 0.3, SHANNON) == 0)


@pytest.mark.parametrize("d", [-1.0, 0.0, 0.4, 1.5])
def test_dinf_shannon_within_scale(d):
    lam = np.linspace(-3.1, 3.1, 17)
    np.testing.assert_allclose(dinf(0, lam, d, SHANNON)[:, 0], (2 * np.pi - np.abs(lam)) ** (-2 * d), rtol=1e-13)


def test_dinf_white_noise_integral(db2):
    x, w = np.polynomial.legendre.leggauss(64)
    lam = np.pi * x
    total = np.pi * float(np.real(dinf(0, lam, 0.0, db2)[:, 0]) @ w)
    assert total == pytest.approx(2 * np.pi, abs=1e-4)


@pytest.mark.parametrize("name,tol", [("db2", 1e-5), ("db4", 1e-10)])
@pytest.mark.parametrize("u", [0, 1, 2])
@pytest.mark.parametrize("lam,d", [(0.3, 0.3), (-2.0, -0.2), (1.0, 1.0)])
def test_dinf_vs_plain_sum(name, tol, u, lam, d):
    # db2 at d < 0 decays slowly enough that the capped l-range leaves ~2e-6 relative error
    s = lm.make_wavelet(name)
    terms = 2**17 if (name == "db2" and d < 0) else 2**13
    ref = oracles.dinf_bruteforce(lambda xi: oracles.psi_hat_bruteforce(s.lowpass, s.highpass, xi), u, lam, d, terms)
    got = dinf(u, lam, d, s)
    assert np.max(np.abs(got - ref)) <= tol * np.max(np.abs(ref))


def test_dinf_at_zero_frequency(db4):
    near = dinf(1, 1e-9, 0.3, db4)
    np.testing.assert_allclose(dinf(1, 0.0, 0.3, db4), near, atol=1e-7)
    assert np.all(np.isfinite(dinf(0, np.array([0.0, 0.5]), 0.4, db4)))


def test_dinf_domain(db2):
    with pytest.raises(ValueError, match="admissible"):
        dinf(0, 0.5, 0.5 - db2.alpha, db2)
    with pytest.raises(ValueError, match="admissible"):
        dinf(0, 0.5, db2.M + 0.01, db2)


# ---------------------------------------------------------------- K


@pytest.mark.parametrize("name", ["haar", "db2", "db4", "db10"])
def test_K_at_zero(name):
    assert K(0.0, lm.make_wavelet(name)) == pytest.approx(2 * np.pi, abs=1e-6)


@pytest.mark.parametrize("name", ["db2", "db4", "db10"])
def test_K_at_half(name):
    # sum_j |psi_hat(2^j xi)|^2 = 1 for orthonormal wavelets gives int |xi|^-1 |psi_hat|^2 = 2 log 2
    assert K(0.5, lm.make_wavelet(name)) == pytest.approx(2 * math.log(2), rel=1e-8)


@pytest.mark.parametrize("d", [-1.0, 0.0, 0.25, 1.5])
def test_K_shannon(d):
    assert K(d, SHANNON) == pytest.approx(2 * oracles.g_closed(-2 * d), rel=1e-12)


def test_K_real_line_quadrature(db4):
    ref = oracles.k_real_line(lambda xi: oracles.psi_hat_bruteforce(db4.lowpass, db4.highpass, xi), 1.0, xi_max=600.0)
    assert K(1.0, db4) == pytest.approx(ref, rel=1e-8)


def test_K_decreasing_on_unit_interval(db4):
    # |psi_hat|^2 lives at |xi| > 1, where |xi|^-2d shrinks as d grows
    ds = np.linspace(0, 1, 41)
    assert np.all(np.diff(K(ds, db4)) < 0)


def test_K_vectorized(db4):
    ds = np.array([-0.3, 0.2, 0.9])
    np.testing.assert_allclose(K(ds, db4), [K(d, db4) for d in ds], rtol=1e-12)


def test_K_domain(db2):
    with pytest.raises(ValueError):
        K(-1.0, db2)


# ---------------------------------------------------------------- I_u


@pytest.mark.parametrize("name", ["db2", "db4"])
def test_I_u_white_noise(name):
    s = lm.make_wavelet(name)
    assert I_u(0, 0.0, s) == pytest.approx(2 * np.pi, abs=1e-4)
    for u in (1, 2, 5):
        assert abs(I_u(u, 0.0, s)) <= 1e-6


def test_I_u_decay_db2():
    s = lm.make_wavelet("db2")
    scaled = [I_u(u, 0.4, s) * 2 ** ((2 * 0.4 - 0.5) * u) for u in range(9)]
    assert max(scaled) <= 2 * scaled[0]
    assert all(v >= 0 for v in scaled)


def test_I_u_shannon(db2):
    assert I_u(0, 0.25, SHANNON) == pytest.approx(2 * oracles.g_closed(-1.0), rel=1e-10)
    assert I_u(2, 0.25, SHANNON) == 0.0


@pytest.mark.parametrize("u", [0, 1, 2])
@pytest.mark.parametrize("d", [-0.2, 0.3])
def test_I_u_covariance_sum(db4, u, d):
    """``I_u = (2 pi)^-1 sum_tau Cov^2(W_{0,0}, W_{-u,tau})`` with the covariance by real-line quadrature."""
    cov = gfbm_covariance(db4, d, u, np.arange(-60, 61))
    assert float(cov @ cov) / (2 * np.pi) == pytest.approx(I_u(u, d, db4), rel=1e-4)


# ---------------------------------------------------------------- V and shannon_V


@pytest.mark.parametrize("ell", [1, 4, 6, 8, 10])
@pytest.mark.parametrize("name", ["db2", "db4"])
def test_V_zero_finite(name, ell):
    assert V(0.0, ell, lm.make_wavelet(name)) == pytest.approx(oracles.v_at_zero(ell), abs=1e-4)


@pytest.mark.parametrize("name", ["haar", "db2", "db4"])
def test_V_zero_infinite(name):
    assert V(0.0, INF, lm.make_wavelet(name)) == pytest.approx(BOUND, abs=1e-4)


def test_V_figure_range_db2(db2):
    for ell in (4, 6, 8, 10):
        vals = [V(d, ell, db2) for d in (-0.5, 0.0, 0.5, 1.0)]
        assert all(0.25 <= v <= 1.5 for v in vals), (ell, vals)


@pytest.mark.parametrize("ell", [4, 10])
def test_V_families_coincide_at_zero(ell):
    vals = [V(0.0, ell, lm.make_wavelet(n)) for n in ("db2", "db3", "db4", "db6")]
    assert max(vals) - min(vals) < 1e-6


@pytest.mark.parametrize("ell", [1, 4, 10, INF])
def test_shannon_V_at_zero(ell):
    ref = oracles.v_at_zero(None if ell == INF else ell)
    assert shannon_V(0.0, ell) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("d", [-1.0, 0.25, 1.5])
@pytest.mark.parametrize("ell", [4, 10, INF])
def test_shannon_V_closed_vs_quadrature(d, ell):
    closed = shannon_V(d, ell)
    assert closed == pytest.approx(oracles.shannon_v_closed(d, None if ell == INF else ell), rel=1e-12)
    assert abs(V(d, ell, SHANNON) - closed) <= 1e-6


def test_V_lower_bound(db2, db4):
    for s in (db2, db4):
        for d in np.arange(-0.25, 1.01, 0.25):
            assert V(d, INF, s) >= BOUND - 1e-6


def test_V_converges_in_ell(db2):
    assert abs(V(0.4, 20, db2) - V(0.4, INF, db2)) <= 1e-3


def test_V_smooth_in_d(db2):
    grid = np.round(np.arange(-0.3, 1.01, 0.01), 10)
    table = variance_table(db2, grid, [8], with_shannon=False)
    v = table.values[:, 0]
    assert np.max(np.abs(np.diff(v)) / v[:-1]) < 0.01


def test_V_domain(db2):
    with pytest.raises(ValueError, match="wavelet"):
        V(2.5, 8, db2)
    with pytest.raises(ValueError):
        V(0.0, 0, db2)


# ---------------------------------------------------------------- variance_table


def test_variance_table(db4):
    grid = [-0.5, 0.0, 0.5]
    table = variance_table(db4, grid, [4, 10, INF])
    assert table.values.shape == (3, 3)
    assert table.values[1, 1] == pytest.approx(oracles.v_at_zero(10), abs=1e-4)
    row0 = table.values[1]
    assert row0[0] > row0[1] > row0[2]
    assert np.all(np.isfinite(table.values))
    assert np.all(table.values[:, 2] >= BOUND - 1e-6)
    np.testing.assert_allclose(table.shannon[1], [shannon_V(0.0, e) for e in (4, 10, INF)], rtol=1e-12)
    lines = table.to_csv().strip().splitlines()
    assert lines[0] == "d,ell,variance,family"
    families = {line.split(",")[3] for line in lines[1:]}
    assert families == {"db4", "shannon"}
    assert len(lines) == 1 + 2 * 9
    assert any(line.startswith("0,inf,") or line.startswith("0.0,inf,") for line in lines)
