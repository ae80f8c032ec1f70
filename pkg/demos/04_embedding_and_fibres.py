"""Embedding a product of projective lines into G(p, q) and the fibre estimates.

Run with ``python demos/04_embedding_and_fibres.py``.
"""

import numpy as np

from grassalpha.complex_core import sample_ginibre
from grassalpha.embedding import WParam, fiber_inequality_slacks, gram_det, pullback_residual, rho_tilde, w_tail_integral

p, q = 2, 3
rng = np.random.default_rng(3)
w = WParam.from_vector(p, q, 0.5 * sample_ginibre(p * (q - 1), 1, rng).ravel())
mu = sample_ginibre(p, 1, rng).ravel()

print("representative for (lambda, mu) = (1, mu):")
print(np.round(rho_tilde(w, np.ones(p), mu), 3))
print(f"Gram determinant: {gram_det(w, mu):.6f}")
print(f"pullback decomposition residual: {pullback_residual(w, mu):.2e}")

s = fiber_inequality_slacks(w, mu, alpha=0.8, kappa=p * (q - 1) + 1)
print(f"slacks: per factor {np.round(s['per_factor'], 4)}, w bound {s['w_bound']:.4f}, combined {s['combined']:.3e}")

d = p * (q - 1)
for kappa in (d + 1.0, d + 0.5, float(d)):
    est = w_tail_integral(kappa, d)
    print(f"int (1+|w|^2)^-{kappa} over C^{d}: {'diverges' if est.divergent else f'{est.mean:.8f}'}")
