"""Divergence of int |det X|^-2 near the singular locus.

Run with ``python demos/06_singular_integral.py``.
"""

import numpy as np

from grassalpha.alpha import shell_integral, truncated_singular_integral
from grassalpha.montecarlo import MCConfig
from grassalpha.suites import slope_windows

Ts = [1e2, 1e3, 1e4, 1e5]
cfg = MCConfig(seed=0, samples=400_000)
print("n = 1, truncated at T, against pi (1 + log T):")
for T in Ts:
    est = truncated_singular_integral(1, T, 1.0, cfg)
    print(f"  T = {T:8.0e}: {est.mean:9.4f}   exact {np.pi * (1 + np.log(T)):9.4f}")

print("n = 1 dyadic shells, each 2 pi log 2 =", round(2 * np.pi * np.log(2), 5))
for k in range(4):
    print(f"  shell {k}: {shell_integral(1, k, 1.0, cfg.derive('shell', k)).mean:.5f}")

vals = [truncated_singular_integral(2, T, 1.0, cfg.derive("n2", k)).mean for k, T in enumerate(Ts)]
s1, s2 = slope_windows(vals, Ts)
print(f"n = 2 truncated values {np.round(vals, 2)}; slope against log T {s1:.1f} and {s2:.1f}")
