"""
Wavelet and Fourier estimators side by side
===========================================

A small Monte Carlo with an AR(1) short-memory component, which biases
any estimator that reaches too far into high frequencies.
"""

import numpy as np

import longmem as lm

n, reps, d0 = 2**13, 200, 0.3
db2 = lm.make_wavelet("db2")
model = lm.ProcessModel(d0, "ar1", params=(0.5,))

rows = {"lwwe": [], "logscale": [], "gph": [], "lwf": []}
for seed in range(reps):
    x = lm.simulate(model, n, seed)
    pyr = lm.dwt(x, db2)
    rng = lm.select_scales(n, db2.T)
    rows["lwwe"].append(lm.estimate(pyr, rng).d_hat)
    rows["logscale"].append(lm.logscale_regression(pyr, rng).d_hat)
    rows["gph"].append(lm.gph(x).d_hat)
    rows["lwf"].append(lm.lwf(x).d_hat)

print(f"d0 = {d0}, AR(1) rho = 0.5, n = {n}, {reps} runs")
print("method      bias      sd     rmse")
for name, est in rows.items():
    est = np.asarray(est)
    bias, sd = est.mean() - d0, est.std(ddof=1)
    print(f"{name:9s} {bias:+.4f}  {sd:.4f}  {np.hypot(bias, sd):.4f}")

# Raising L trades bias for variance in the wavelet estimator.
print("\n L   bias     sd")
for L in (2, 3, 4, 5, 6):
    rng = lm.ScaleRange(L, lm.max_scale(n, db2.T))
    est = np.array([lm.estimate(lm.dwt(lm.simulate(model, n, s), db2), rng).d_hat for s in range(reps)])
    print(f"{L:2d}  {est.mean() - d0:+.4f}  {est.std(ddof=1):.4f}")
