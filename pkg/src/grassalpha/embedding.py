"""The embedding of a product of projective lines into G(p, q), p <= q.

For ``w`` in ``C^{p(q-1)}`` and pairs ``(lam_k, mu_k)`` the matrix
``rho_tilde`` has ``diag(lam)`` on top and, below, ``mu_j`` on the
diagonal slot of column ``j`` and ``w[a, j] * lam_j`` elsewhere.  In the
affine chart ``lam = 1`` the image is the chart point of ``{0..p-1}``
with coordinate ``W + diag(mu)``, so :func:`gram_det` is ``F`` of that
coordinate.

Product coordinates are flat complex vectors; a field on a product takes
arrays of shape ``(..., n1 + n2)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .atlas import GrassmannPoint, best_chart, chart_coords
from .complex_core import gram_det as _gram_det
from .metric import hermitian_hessian, metric_closed_form, potential
from .montecarlo import DIVERGENT, IntegralEstimate


@dataclass(frozen=True, eq=False)
class WParam:
    """Off-diagonal parameters ``w[a, j]``, ``a != j``, stored as a ``q x p`` array with zero diagonal."""

    p: int
    q: int
    W: np.ndarray

    def __post_init__(self):
        if self.p > self.q:
            raise ValueError("the embedding needs p <= q; pass through dual() first")
        W = np.asarray(self.W, dtype=complex)
        if W.shape != (self.q, self.p):
            raise ValueError(f"W must have shape {(self.q, self.p)}")
        if np.any(np.diagonal(W) != 0):
            raise ValueError("diagonal slots of W are not parameters and must be zero")
        object.__setattr__(self, "W", W)

    @classmethod
    def from_vector(cls, p, q, w):
        w = np.asarray(w, dtype=complex).ravel()
        if w.size != p * (q - 1):
            raise ValueError(f"need {p * (q - 1)} entries, got {w.size}")
        W = np.zeros((q, p), dtype=complex)
        W[_offdiag_mask(p, q)] = w
        return cls(p, q, W)

    @classmethod
    def zeros(cls, p, q):
        return cls(p, q, np.zeros((q, p), dtype=complex))

    @property
    def vector(self):
        return self.W[_offdiag_mask(self.p, self.q)]

    @property
    def norm_sq(self):
        return float(np.sum(np.abs(self.W) ** 2))


def _offdiag_mask(p, q):
    mask = np.ones((q, p), dtype=bool)
    mask[np.arange(p), np.arange(p)] = False
    return mask


def _check_pairs(lam, mu):
    if np.any((lam == 0) & (mu == 0)):
        raise ValueError("a pair (lambda_k, mu_k) is (0, 0)")


def rho_tilde(w, lam, mu):
    """The ``(p+q) x p`` matrix of the embedding (stack friendly in ``lam``, ``mu``)."""
    lam = np.asarray(lam, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    lam, mu = np.broadcast_arrays(lam, mu)
    _check_pairs(lam, mu)
    p, q = w.p, w.q
    out = np.zeros(lam.shape[:-1] + (p + q, p), dtype=complex)
    out[..., np.arange(p), np.arange(p)] = lam
    out[..., p:, :] = w.W * lam[..., None, :]
    out[..., p + np.arange(p), np.arange(p)] = mu
    return out


def affine_coordinates(w, mu):
    """Chart coordinate (chart ``{0..p-1}``) of the affine image: ``W + diag(mu)``."""
    mu = np.asarray(mu, dtype=complex)
    Z = np.broadcast_to(w.W, mu.shape[:-1] + w.W.shape).copy()
    Z[..., np.arange(w.p), np.arange(w.p)] = mu
    return Z


def gram_det(w, mu):
    """Gram determinant of the embedding in the affine chart ``lam = 1``."""
    mu = np.asarray(mu, dtype=complex)
    return _gram_det(rho_tilde(w, np.ones_like(mu), mu))


def phi_factor(w, lam, mu):
    """``det gram(rho_tilde) / prod_k (|lam_k|^2 + |mu_k|^2)``; invariant under per-factor rescaling."""
    lam = np.asarray(lam, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    num = _gram_det(rho_tilde(w, lam, mu))
    den = np.prod(np.abs(lam) ** 2 + np.abs(mu) ** 2, axis=-1)
    return num / den


def log_phi_affine(w):
    """Chart field ``mu -> log Phi(1, mu)``."""
    return lambda mu: np.log(phi_factor(w, np.ones_like(np.asarray(mu, dtype=complex)), mu))


def fubini_study_product(mu):
    """Product of Fubini-Study metrics on ``(P^1)^p`` at affine coordinates ``mu``."""
    mu = np.asarray(mu, dtype=complex)
    return np.diag(1.0 / (1.0 + np.abs(mu) ** 2) ** 2).astype(complex)


def pullback_metric(w, mu, h=1e-3):
    """Both sides of the pullback decomposition as ``p x p`` Hermitian forms in ``mu``.

    Left: Hessian of the potential of G(p, q), read in the best chart of the
    image point, composed with the embedding.  Right: Hessian of
    ``log Phi`` plus the product Fubini-Study metric.
    """
    mu = np.asarray(mu, dtype=complex)
    base = rho_tilde(w, np.ones_like(mu), mu)
    J = best_chart(GrassmannPoint(w.p, w.q, base))

    def pulled(m):
        return potential(chart_coords(rho_tilde(w, np.ones_like(m), m), J))

    left = hermitian_hessian(pulled, mu, h)
    right = hermitian_hessian(log_phi_affine(w), mu, h) + fubini_study_product(mu)
    return left, right


def pullback_residual(w, mu, h=1e-3):
    left, right = pullback_metric(w, mu, h)
    return float(np.max(np.abs(left - right)))


def fiber_inequality_slacks(w, mu, alpha, kappa):
    """Slacks (should all be ``>= 0``) of the fibre inequalities at ``(w, mu)``.

    Returns a dict with keys ``per_factor`` (array over ``k`` of
    ``G - (1 + |mu_k|^2)``), ``w_bound`` (``G - (1 + ||w||^2)``) and
    ``combined`` (``(1+||w||^2)^{-kappa}`` minus the left side of the
    combined bound), where ``G`` is :func:`gram_det`.
    """
    mu = np.asarray(mu, dtype=complex)
    G = gram_det(w, mu)
    p, q = w.p, w.q
    one_mu = 1.0 + np.abs(mu) ** 2
    lhs = np.prod(one_mu ** (2 - alpha)) / G ** (kappa + p + q - alpha)
    return {
        "per_factor": G - one_mu,
        "w_bound": G - (1.0 + w.norm_sq),
        "combined": (1.0 + w.norm_sq) ** (-kappa) - lhs,
    }


def product_extension(phi, n1):
    """Field ``(z1, z2) -> phi(z1)`` on a product whose first factor has ``n1`` coordinates."""
    return lambda z: phi(np.asarray(z)[..., :n1])


def product_metric(*factors):
    """Block-diagonal metric ``g_1 + ... + g_k`` on flat product coordinates.

    ``factors`` are pairs ``(metric_fn, n_i)`` where ``metric_fn`` maps an
    ``n_i``-vector to an ``n_i x n_i`` Hermitian matrix.
    """

    def g(z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros((z.size, z.size), dtype=complex)
        start = 0
        for fn, n in factors:
            out[start:start + n, start:start + n] = fn(z[start:start + n])
            start += n
        return out

    return g


def grassmann_factor_metric(p, q):
    """Metric of G(p, q) as a function of the flattened chart coordinate."""
    return lambda z: metric_closed_form(np.asarray(z).reshape(q, p))


def product_admissibility_eigenvalue(g, phi, z, h=1e-3):
    """Smallest eigenvalue of ``g(z) + i d d-bar phi`` on a product chart."""
    z = np.asarray(z, dtype=complex)
    return float(np.linalg.eigvalsh(g(z) + hermitian_hessian(phi, z, h))[0])


def w_tail_integral(kappa, d):
    """``int_{C^d} (1 + ||w||^2)^{-kappa}`` by radial quadrature; divergent for ``kappa <= d``."""
    if d < 0:
        raise ValueError("d must be >= 0")
    if d == 0:
        return IntegralEstimate(1.0, 0.0, 0)
    if kappa <= d:
        return DIVERGENT
    sphere = 2 * np.pi**d / special.gamma(d)

    def radial(r):
        return r ** (2 * d - 1) * (1 + r * r) ** (-kappa)

    a, ea = integrate.quad(radial, 0, 1, epsabs=0, epsrel=1e-13, limit=200)
    b, eb = integrate.quad(radial, 1, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    return IntegralEstimate(float(sphere * (a + b)), float(sphere * (ea + eb)), 0)

