"""Chart atlas of the complex Grassmannian G(p, q).

A point is a full-rank ``(p+q) x p`` matrix modulo right multiplication by
``GL_p``.  For an index set ``I`` the chart ``U_I`` contains the planes
whose rows ``I`` form an invertible block; its coordinate is the
``q x p`` matrix ``Z`` such that the representative normalised to the
identity on rows ``I`` equals ``Z`` on the complementary rows.

Chart coordinates are flattened row-major: entry ``Z[a, j]`` is
coordinate number ``a * p + j``.
"""

from dataclasses import dataclass

import numpy as np

from .complex_core import (
    all_minor_dets,
    as_cmatrix,
    complement,
    enumerate_index_sets,
    gram,
    is_unitary,
    minor,
    validate_index_set,
)

RANK_RTOL = 1e-10
CHART_RTOL = 1e-10
POINT_ATOL = 1e-8


class NotInChart(ValueError):
    """The point is outside (or numerically on the boundary of) the requested chart."""


@dataclass(frozen=True, eq=False)
class GrassmannPoint:
    p: int
    q: int
    rep: np.ndarray

    def __post_init__(self):
        rep = as_cmatrix(self.rep)
        if rep.shape != (self.p + self.q, self.p):
            raise ValueError(f"representative must be {(self.p + self.q, self.p)}, got {rep.shape}")
        s = np.linalg.svd(rep, compute_uv=False)
        if s[-1] <= RANK_RTOL * s[0]:
            raise ValueError("representative is rank deficient")
        object.__setattr__(self, "rep", rep)

    def projector(self):
        """Orthogonal projector onto the column space (basis independent)."""
        Q, _ = np.linalg.qr(self.rep)
        return Q @ Q.conj().T

    def same_point(self, other, atol=POINT_ATOL):
        if (self.p, self.q) != (other.p, other.q):
            return False
        return projector_distance(self, other) <= atol


def projector_distance(a, b):
    return float(np.linalg.norm(a.projector() - b.projector()))


@dataclass(frozen=True, eq=False)
class ChartCoordinates:
    I: tuple
    Z: np.ndarray

    def __post_init__(self):
        Z = np.asarray(self.Z, dtype=complex)
        if Z.ndim != 2:
            raise ValueError("chart coordinate must be a q x p matrix")
        if not np.all(np.isfinite(Z)):
            raise ValueError("chart coordinate has non-finite entries")
        q, p = Z.shape
        object.__setattr__(self, "I", validate_index_set(self.I, p, q))
        object.__setattr__(self, "Z", Z)

    @property
    def p(self):
        return self.Z.shape[1]

    @property
    def q(self):
        return self.Z.shape[0]


def chart_rep(I, Z):
    """Representative equal to the identity on rows ``I`` and to ``Z`` elsewhere.

    Stack friendly: ``Z`` may have shape ``(..., q, p)``.
    """
    Z = np.asarray(Z, dtype=complex)
    q, p = Z.shape[-2:]
    Ic = complement(I, p + q)
    rep = np.zeros(Z.shape[:-2] + (p + q, p), dtype=complex)
    rep[..., list(I), :] = np.eye(p)
    rep[..., list(Ic), :] = Z
    return rep


def chart_coords(rep, I):
    """Chart coordinate of a representative (stack friendly, no checks)."""
    rep = np.asarray(rep, dtype=complex)
    n, p = rep.shape[-2:]
    Ic = complement(I, n)
    A = minor(rep, I)
    B = minor(rep, Ic)
    # Z = B A^{-1}, via a solve on the transposed system
    return np.swapaxes(np.linalg.solve(np.swapaxes(A, -1, -2), np.swapaxes(B, -1, -2)), -1, -2)


def canonical_point(I, p, q):
    """The plane spanned by the coordinate axes listed in ``I``."""
    I = validate_index_set(I, p, q)
    return GrassmannPoint(p, q, chart_rep(I, np.zeros((q, p))))


def max_minor(pt):
    return float(np.max(np.abs(all_minor_dets(pt.rep))))


def in_chart(pt, I, rtol=CHART_RTOL):
    d = abs(np.linalg.det(minor(pt.rep, I)))
    return d > rtol * max_minor(pt)


def to_chart(pt, I):
    """Coordinates of ``pt`` in the chart ``U_I``.

    Raises
    ------
    NotInChart
        If the ``I`` minor is singular relative to the largest maximal minor.
    """
    I = validate_index_set(I, pt.p, pt.q)
    if not in_chart(pt, I):
        raise NotInChart(f"point is not in chart {I}")
    return ChartCoordinates(I, chart_coords(pt.rep, I))


def from_chart(c):
    return GrassmannPoint(c.p, c.q, chart_rep(c.I, c.Z))


def best_chart(pt):
    """Index set maximising ``|det m_I(rep)|``; always a usable chart."""
    sets = enumerate_index_sets(pt.p, pt.q)
    k = int(np.argmax(np.abs(all_minor_dets(pt.rep))))
    return sets[k]


def transition(c, J):
    """Re-express chart coordinates ``c`` in the chart ``U_J``."""
    J = validate_index_set(J, c.p, c.q)
    return to_chart(from_chart(c), J)


def transition_alpha(c, J):
    """The block ``m_J`` of the ``I``-normalised representative."""
    return minor(chart_rep(c.I, c.Z), J)


def transition_jacobian_det_sq(c, J):
    """Closed form ``|det alpha|^{-2(p+q)}`` of the squared Jacobian of ``Z_I -> Z_J``."""
    J = validate_index_set(J, c.p, c.q)
    transition(c, J)  # raises NotInChart where the map is undefined
    a = abs(np.linalg.det(transition_alpha(c, J)))
    return float(a ** (-2 * (c.p + c.q)))


def transition_map(I, J):
    """The chart-to-chart map ``Z_I -> Z_J`` as a function of matrices."""
    return lambda Z: chart_coords(chart_rep(I, Z), J)


def numerical_jacobian_det_sq(f, Z, h=1e-5):
    """``|det Df|^2`` of a holomorphic map between coordinate matrices.

    The real ``2n x 2n`` Jacobian is assembled by central differences over
    real and imaginary parts of every entry; its determinant equals the
    squared modulus of the complex Jacobian determinant for holomorphic ``f``.
    """
    Z = np.asarray(Z, dtype=complex)
    if h <= 0 or h < 1e-12 * max(1.0, float(np.max(np.abs(Z)))):
        raise ValueError(f"step {h} too small for coordinates of this size")
    n = Z.size
    x = np.concatenate([Z.real.ravel(), Z.imag.ravel()])

    def unpack(v):
        return (v[:n] + 1j * v[n:]).reshape(Z.shape)

    J = None
    for k in range(2 * n):
        e = np.zeros(2 * n)
        e[k] = h
        d = (np.asarray(f(unpack(x + e))) - np.asarray(f(unpack(x - e)))).ravel() / (2 * h)
        col = np.concatenate([d.real, d.imag])
        if J is None:
            J = np.empty((col.size, 2 * n))
        J[:, k] = col
    if J.shape[0] != J.shape[1]:
        raise ValueError("map must preserve dimension")
    return float(abs(np.linalg.det(J)))


def apply_unitary(U, pt, tol=1e-10):
    U = np.asarray(U, dtype=complex)
    if U.shape != (pt.p + pt.q,) * 2 or not is_unitary(U, tol):
        raise ValueError("U must be a unitary matrix of size p+q")
    return GrassmannPoint(pt.p, pt.q, U @ pt.rep)


def unitary_chart_map(U, I, J=None):
    """Induced map ``Z_I -> Z_J`` of the action of ``U`` (``J`` defaults to ``I``)."""
    J = I if J is None else J
    return lambda Z: chart_coords(U @ chart_rep(I, Z), J)


def dual(pt):
    """Orthogonal complement of the plane, as a point of G(q, p)."""
    Q, _ = np.linalg.qr(pt.rep, mode="complete")
    return GrassmannPoint(pt.q, pt.p, Q[:, pt.p:])


def disjoint_chart_identity(Z_J, J, I):
    """Both sides of ``F_I(Z_I) = det gram(P_J) |det m_I(Z_J)|^{-2}`` for disjoint ``I, J``.

    ``Z_J`` is a coordinate in chart ``J``; rows ``I`` of the ``J``-normalised
    representative are rows of ``Z_J`` because ``I`` and ``J`` are disjoint.
    Returns ``(lhs, rhs)``.
    """
    Z_J = np.asarray(Z_J, dtype=complex)
    q, p = Z_J.shape
    if set(I) & set(J):
        raise ValueError("index sets must be disjoint")
    P_J = chart_rep(J, Z_J)
    Jc = complement(J, p + q)
    rows = [Jc.index(i) for i in I]
    X = Z_J[rows, :]
    Z_I = chart_coords(P_J, I)
    lhs = np.linalg.det(np.eye(p) + gram(Z_I)).real
    rhs = np.linalg.det(gram(P_J)).real / abs(np.linalg.det(X)) ** 2
    return float(lhs), float(rhs)
