"""The Kaehler metric ``i dd-bar log det(I + Z^t conj Z)`` and its Einstein constant.

Run with ``python demos/02_kaehler_metric.py``.
"""

import numpy as np

from grassalpha.complex_core import sample_ginibre
from grassalpha.metric import det_metric, einstein_residual, hermitian_hessian, metric_closed_form, potential, ricci, volume_density

p, q = 2, 2
Z = 0.6 * sample_ginibre(q, p, 1)

closed = metric_closed_form(Z)
numeric = hermitian_hessian(potential, Z)
print(f"G({p},{q}) at a random point")
print(f"closed form vs finite-difference Hessian: {np.max(np.abs(closed - numeric)):.2e}")
print(f"det g = {det_metric(Z):.12f}, F^-(p+q) = {volume_density(Z):.12f}")
print(f"smallest eigenvalue of g: {np.linalg.eigvalsh(closed).min():.4f}")

# Ricci = (p+q) g, so the metric is Kaehler-Einstein
Ric = ricci(Z)
print(f"Ric / g along the diagonal: {np.round((np.diag(Ric) / np.diag(closed)).real, 4)}")
print(f"relative Einstein residual: {einstein_residual(Z):.2e}")

rng = np.random.default_rng(2)
worst = 0.0
for _ in range(20):
    W = sample_ginibre(q, p, rng)
    W *= 2 * rng.random() / np.linalg.norm(W)
    worst = max(worst, einstein_residual(W))
print(f"worst residual over 20 points with ||Z|| <= 2: {worst:.2e}")
