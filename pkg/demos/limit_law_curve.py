#!/usr/bin/env python3
"""Evaluate the stationary one-point limit CDF and its two-point extension.

The one-point law (tau = 0) is the stationary-KPZ distribution: mean 0,
variance ~ 1.15, mildly right-skewed.  The determinant factor alone at
tau = 0 is the GUE Tracy-Widom CDF, which this script prints alongside as
a familiar reference.
"""

import numpy as np

from stasep import MultiPointSpec, QuadratureConfig, limit_cdf

quad = QuadratureConfig()

print("one-point stationary law F0(s)  (det factor = GUE Tracy-Widom CDF)")
print(f"{'s':>6} {'F0(s)':>12} {'det':>12} {'g':>12}")
grid = np.arange(-4.0, 4.01, 0.5)
vals = []
for s in grid:
    res = limit_cdf(MultiPointSpec((0.0,), (float(s),)), quad)
    vals.append(res.f_value)
    print(f"{s:6.2f} {res.f_value:12.8f} {res.det_value:12.8f} {res.g_value:12.6f}")

# moments by integrating the tails of the CDF
fine = np.arange(-6.0, 6.001, 0.25)
fv = np.array([limit_cdf(MultiPointSpec((0.0,), (float(s),)), quad).f_value for s in fine])
pos, neg = fine >= 0, fine <= 0
mean = np.trapezoid(1.0 - fv[pos], fine[pos]) - np.trapezoid(fv[neg], fine[neg])
var = (
    np.trapezoid(2 * fine[pos] * (1.0 - fv[pos]), fine[pos])
    - np.trapezoid(2 * fine[neg] * fv[neg], fine[neg])
    - mean**2
)
print(f"\nintegrated moments: mean = {mean:+.6f} (exact value 0), variance = {var:.4f}")

print("\ntwo-point joint CDF at taus = (-1, 1) on the diagonal s1 = s2 = u")
print(f"{'u':>6} {'F(u,u)':>12} {'F1(u)^2':>12}   (positive dependence)")
for u in (-1.0, 0.0, 1.0):
    f2 = limit_cdf(MultiPointSpec((-1.0, 1.0), (u, u)), quad).f_value
    f1 = limit_cdf(MultiPointSpec((1.0,), (u,)), quad).f_value
    print(f"{u:6.2f} {f2:12.8f} {f1 * f1:12.8f}")
