"""Determinants, Plucker minors and the chart atlas of a Grassmannian.

Run with ``python demos/01_determinants_and_charts.py``.
"""

import numpy as np

from grassalpha.atlas import (
    GrassmannPoint,
    best_chart,
    dual,
    to_chart,
    transition,
    transition_jacobian_det_sq,
    transition_map,
    numerical_jacobian_det_sq,
)
from grassalpha.complex_core import all_minor_dets, cauchy_binet_residual, enumerate_index_sets, gram_det, sample_ginibre

p, q = 2, 3
rng = np.random.default_rng(0)
M = sample_ginibre(p + q, p, rng)

# Gram determinant against the sum of squared maximal minors
minors = all_minor_dets(M)
print(f"G({p},{q}) has {len(enumerate_index_sets(p, q))} charts")
print(f"det(M^t conj M)        = {gram_det(M):.12f}")
print(f"sum |det m_I(M)|^2     = {np.sum(np.abs(minors) ** 2):.12f}")
print(f"relative residual      = {cauchy_binet_residual(M):.2e}")

# the same point seen from two charts
pt = GrassmannPoint(p, q, M)
c = to_chart(pt, best_chart(pt))
J = enumerate_index_sets(p, q)[-1]
d = transition(c, J)
print(f"\nchart {c.I} -> chart {J}")
print("Z_I =\n", np.round(c.Z, 4))
print("Z_J =\n", np.round(d.Z, 4))

closed = transition_jacobian_det_sq(c, J)
numeric = numerical_jacobian_det_sq(transition_map(c.I, J), c.Z)
print(f"|Jac|^2 closed form {closed:.10f}, finite differences {numeric:.10f}")

# orthogonal complement lands in G(q, p) and is an involution
back = dual(dual(pt))
print(f"\ndual(dual(x)) == x: {back.same_point(pt)}")
