"""Kähler potential, metric tensor, volume density and Ricci form on G(p, q).

Scalar fields are plain callables.  A *chart field* takes coordinate
matrices of shape ``(..., q, p)`` (or any fixed-shape complex array) and
returns an array of shape ``(...)``; broadcasting over the leading axes is
what lets the finite-difference Hessian evaluate all its stencil points in
one call.  A *point field* takes representatives of shape
``(..., p+q, p)`` and must be invariant under right ``GL_p``
multiplication; :func:`field_in_chart` turns one into the other.

Metric components ``g[s, t]`` stand for ``d^2 f / dz_s d conj(z_t)`` with
the row-major flattening of :mod:`grassalpha.atlas`.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .atlas import CHART_RTOL, best_chart, chart_coords, chart_rep
from .complex_core import all_minor_dets, gram, hermitian_part

log = logging.getLogger(__name__)

HESSIAN_STEP = 1e-3
CANCELLATION_RTOL = 1e-3


class CancellationError(ArithmeticError):
    """Finite-difference Hessians at steps h and h/2 disagree too much."""


def F(Z):
    """``det(I_p + Z^t conj(Z))``; equals 1 at ``Z = 0`` and grows with ``Z``."""
    Z = np.asarray(Z, dtype=complex)
    p = Z.shape[-1]
    return np.linalg.det(np.eye(p) + gram(Z)).real


def potential(Z):
    """Kähler potential ``log F(Z)`` of the canonical metric in any chart."""
    return np.log(F(Z))


def volume_density(Z):
    """Density ``F^{-(p+q)}`` of the invariant volume form in chart coordinates."""
    Z = np.asarray(Z, dtype=complex)
    q, p = Z.shape[-2:]
    return F(Z) ** (-(p + q))


def field_in_chart(point_field, I):
    """Chart field ``Z -> point_field(rep(I, Z))``."""
    return lambda Z: point_field(chart_rep(I, Z))


def _real_hessian(f, z, h, vectorized):
    n = z.size
    x0 = np.concatenate([z.real.ravel(), z.imag.ravel()])
    d = 2 * n
    idx_i, idx_j = np.triu_indices(d, k=1)
    eye = np.eye(d) * h
    # stencil: center, +-h e_i, and the four corners of every (i, j) pair
    pts = [x0[None, :], x0 + eye, x0 - eye]
    for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        pts.append(x0 + si * eye[idx_i] + sj * eye[idx_j])
    X = np.concatenate(pts)
    Zs = (X[:, :n] + 1j * X[:, n:]).reshape((-1,) + z.shape)
    if vectorized:
        vals = np.asarray(f(Zs), dtype=float).reshape(-1)
    else:
        vals = np.array([float(f(zz)) for zz in Zs])
    c = vals[0]
    plus = vals[1:1 + d]
    minus = vals[1 + d:1 + 2 * d]
    m = len(idx_i)
    pp, pm, mp, mm = (vals[1 + 2 * d + k * m:1 + 2 * d + (k + 1) * m] for k in range(4))
    H = np.empty((d, d))
    H[np.arange(d), np.arange(d)] = (plus - 2 * c + minus) / h**2
    off = (pp - pm - mp + mm) / (4 * h**2)
    H[idx_i, idx_j] = off
    H[idx_j, idx_i] = off
    return H


def _complex_from_real(H, n):
    xx = H[:n, :n]
    yy = H[n:, n:]
    xy = H[:n, n:]
    yx = H[n:, :n]
    return hermitian_part(0.25 * ((xx + yy) + 1j * (xy - yx)))


def hermitian_hessian(f, Z, h=HESSIAN_STEP, vectorized=True, richardson=True):
    """Mixed complex Hessian ``d^2 f / dz_s d conj(z_t)`` by central differences.

    With ``z = x + i y`` the entries are
    ``(f_xx + f_yy + i (f_{x_s y_t} - f_{y_s x_t})) / 4``.  One Richardson
    pass combines steps ``h`` and ``h/2``; a large disagreement between the
    two raises :class:`CancellationError`.

    Parameters
    ----------
    f : callable
        Real scalar field on complex arrays shaped like ``Z``.  With
        ``vectorized=True`` it must broadcast over a leading batch axis.
    Z : array_like
        Evaluation point (any shape); flattened row-major.
    """
    Z = np.asarray(Z, dtype=complex)
    n = Z.size
    coarse = _complex_from_real(_real_hessian(f, Z, h, vectorized), n)
    if not richardson:
        return coarse
    fine = _complex_from_real(_real_hessian(f, Z, h / 2, vectorized), n)
    scale = max(float(np.max(np.abs(fine))), 1.0)
    if np.max(np.abs(coarse - fine)) > CANCELLATION_RTOL * scale:
        raise CancellationError(f"step {h} unreliable: h and h/2 Hessians disagree")
    return hermitian_part((4 * fine - coarse) / 3)


def metric_closed_form(Z):
    """Metric components ``g = conj(B) (x) C`` at chart coordinate ``Z``.

    ``B = (I_q + Z Z^*)^{-1}`` and ``C = (I_p + Z^* Z)^{-1}``; component
    ``((a, j), (b, l))`` is ``conj(B)[a, b] * C[j, l]``.  The placement of
    transposes and conjugates was fixed against :func:`hermitian_hessian`
    of :func:`potential`.  Stack friendly.
    """
    Z = np.asarray(Z, dtype=complex)
    q, p = Z.shape[-2:]
    ZH = np.swapaxes(Z, -1, -2).conj()
    B = np.linalg.inv(np.eye(q) + Z @ ZH)
    C = np.linalg.inv(np.eye(p) + ZH @ Z)
    g = np.einsum("...ab,...jl->...ajbl", B.conj(), C)
    return g.reshape(Z.shape[:-2] + (p * q, p * q))


def det_metric(Z):
    """``det g`` from the closed-form components (stack friendly)."""
    return np.linalg.det(metric_closed_form(Z)).real


def log_det_metric(Z):
    return np.log(det_metric(Z))


def ricci(Z, h=HESSIAN_STEP):
    """Ricci components ``-d d-bar log det g`` by finite differences."""
    return -hermitian_hessian(log_det_metric, Z, h)


def ricci_via_potential(Z, h=HESSIAN_STEP):
    """``(p+q)`` times the Hessian of the potential, using ``det g = F^{-(p+q)}``."""
    Z = np.asarray(Z, dtype=complex)
    q, p = Z.shape
    return (p + q) * hermitian_hessian(potential, Z, h)


def einstein_residual(Z, h=HESSIAN_STEP, sign=1.0):
    """``||Ric - (p+q) g||_F / ||g||_F`` at ``Z``.

    ``sign=-1`` flips the metric; used only for negative controls.
    """
    Z = np.asarray(Z, dtype=complex)
    q, p = Z.shape
    g = sign * metric_closed_form(Z)
    R = ricci(Z, h)
    return float(np.linalg.norm(R - (p + q) * g) / np.linalg.norm(g))


@dataclass
class AdmissibilityReport:
    min_eigenvalues: np.ndarray
    charts: list
    skipped: int = 0
    tol: float = 1e-10
    admissible: bool = field(init=False)

    def __post_init__(self):
        self.admissible = bool(np.all(self.min_eigenvalues > -self.tol))

    @property
    def margin(self):
        return float(np.min(self.min_eigenvalues)) if len(self.min_eigenvalues) else float("nan")


def admissibility_eigenvalue(metric, hess):
    return float(np.linalg.eigvalsh(hermitian_part(metric + hess))[0])


def _adaptive_hessian(f, Z, h, refinements=2):
    for k in range(refinements + 1):
        try:
            return hermitian_hessian(f, Z, h / 4**k)
        except CancellationError:
            if k == refinements:
                raise
            log.info("refining Hessian step to %g", h / 4 ** (k + 1))


def is_admissible(phi, points, tol=1e-10, h=HESSIAN_STEP, metric_scale=1.0):
    """Check ``c g + i d d-bar phi > 0`` at sample points.

    ``phi`` is a point field.  At each point the chart with the largest
    minor is used.  Points whose largest minor is numerically zero are
    skipped with a warning.  Where ``phi`` varies too steeply for step
    ``h`` the Hessian is retried at ``h/4`` and ``h/16`` before
    :class:`CancellationError` propagates.
    """
    eigs, charts, skipped = [], [], 0
    for pt in points:
        if np.max(np.abs(all_minor_dets(pt.rep))) <= CHART_RTOL * np.linalg.norm(pt.rep) ** pt.p:
            log.warning("skipping point without a usable chart")
            skipped += 1
            continue
        I = best_chart(pt)
        Z = chart_coords(pt.rep, I)
        hess = _adaptive_hessian(field_in_chart(phi, I), Z, h)
        eigs.append(admissibility_eigenvalue(metric_scale * metric_closed_form(Z), hess))
        charts.append(I)
    return AdmissibilityReport(np.array(eigs), charts, skipped, tol)

