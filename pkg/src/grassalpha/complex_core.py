"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` complex arrays.  Index sets are tuples of
0-based, strictly increasing row indices.  Every sampler takes an explicit
seed (or a ``numpy.random.Generator``); there is no hidden global state.
"""

import warnings
from itertools import combinations
from math import comb

import numpy as np
import scipy.linalg

SINGULAR_PIVOT_RTOL = 1e-12


class DimensionError(ValueError):
    """Raised when matrix shapes do not fit an operation."""


class IndexSetError(ValueError, IndexError):
    """An index set is malformed or out of range."""


def as_cmatrix(m):
    """Return ``m`` as a finite 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _require_square(m):
    if m.shape[-1] != m.shape[-2]:
        raise DimensionError(f"square matrix required, got shape {m.shape}")


def det(m):
    """Determinant of a square complex matrix (LAPACK pivoted LU).

    Works on stacks of matrices of shape ``(..., n, n)`` as well.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2:
        raise DimensionError(f"expected at least 2 dimensions, got {a.ndim}")
    _require_square(a)
    return np.linalg.det(a)


def lu_det(m):
    """Determinant together with a singularity flag.

    The flag is raised when some pivot of the partially pivoted LU
    factorisation is smaller than ``1e-12 * max|entry|``.

    Returns
    -------
    value : complex
    singular : bool
    """
    a = as_cmatrix(m)
    _require_square(a)
    with warnings.catch_warnings():
        # exactly singular input is reported through the flag instead
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.diag(lu)
    sign = (-1) ** np.count_nonzero(piv != np.arange(len(piv)))
    scale = np.max(np.abs(a))
    singular = bool(scale == 0 or np.min(np.abs(diag)) < SINGULAR_PIVOT_RTOL * scale)
    return complex(sign * np.prod(diag)), singular


def gram(P):
    """Hermitian Gram form with entries ``sum_a P[a, j] * conj(P[a, k])``.

    This is the transpose-times-conjugate product ``P^t conj(P)``; it is
    Hermitian positive semidefinite, and positive definite for full column
    rank.  Accepts stacks ``(..., n, p)``.
    """
    P = np.asarray(P, dtype=complex)
    return np.swapaxes(P, -1, -2) @ P.conj()


def gram_det(P):
    """Real determinant of :func:`gram` (stack friendly)."""
    return np.linalg.det(gram(P)).real


def validate_index_set(I, p, q):
    """Check that ``I`` is a strictly increasing tuple of ``p`` indices in ``range(p + q)``."""
    I = tuple(int(i) for i in I)
    if len(I) != p:
        raise IndexSetError(f"index set {I} must have exactly p={p} members")
    if any(b <= a for a, b in zip(I, I[1:])):
        raise IndexSetError(f"index set {I} is not strictly increasing")
    if I and (I[0] < 0 or I[-1] >= p + q):
        raise IndexSetError(f"index set {I} out of range for p+q={p + q}")
    return I


def complement(I, n):
    """Increasing complement of ``I`` in ``range(n)``."""
    members = set(I)
    return tuple(i for i in range(n) if i not in members)


def enumerate_index_sets(p, q):
    """All ``C(p+q, p)`` index sets in lexicographic order."""
    if p < 1 or q < 1:
        raise ValueError("p and q must be at least 1")
    sets = list(combinations(range(p + q), p))
    assert len(sets) == comb(p + q, p)
    return sets


def minor(P, I):
    """Rows of ``P`` selected by ``I`` (order preserved), all columns.

    Works on stacks ``(..., n, p)``.
    """
    P = np.asarray(P, dtype=complex)
    I = tuple(I)
    n = P.shape[-2]
    if any(i < 0 or i >= n for i in I):
        raise IndexSetError(f"index set {I} out of range for {n} rows")
    return P[..., list(I), :]


def all_minor_dets(P):
    """Array of ``det m_I(P)`` over :func:`enumerate_index_sets`, lexicographic order."""
    P = np.asarray(P, dtype=complex)
    n, p = P.shape[-2:]
    sets = enumerate_index_sets(p, n - p)
    return np.stack([np.linalg.det(minor(P, I)) for I in sets], axis=-1)


def cauchy_binet_residual(P):
    """Normalised gap between ``det(P^t conj(P))`` and the sum of squared maximal minors."""
    P = as_cmatrix(P)
    n, p = P.shape
    if n < p:
        raise DimensionError("need at least as many rows as columns")
    lhs = np.linalg.det(gram(P))
    if n == p:
        rhs = abs(np.linalg.det(P)) ** 2
    else:
        rhs = np.sum(np.abs(all_minor_dets(P)) ** 2)
    return float(abs(lhs - rhs) / (1 + abs(lhs)))


def hermitian_part(H):
    H = np.asarray(H, dtype=complex)
    return 0.5 * (H + np.swapaxes(H, -1, -2).conj())


def is_positive_definite(H, tol=1e-10):
    """Test a Hermitian matrix for positive definiteness.

    The input is symmetrised first.  Returns ``(ok, min_eigenvalue)``
    where ``ok`` is true iff the smallest eigenvalue exceeds ``-tol``.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {H.shape}")
    _require_square(H)
    lam = float(np.linalg.eigvalsh(hermitian_part(H))[0])
    return lam > -tol, lam


def rng_from(seed):
    """``numpy.random.Generator`` from an int seed, a SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def standard_complex_normal(rng, shape):
    """i.i.d. complex Gaussians with ``E|z|^2 = 1``."""
    rng = rng_from(rng)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def sample_ginibre(rows, cols, seed):
    """Ginibre matrix: i.i.d. standard complex Gaussian entries."""
    if rows < 1 or cols < 1:
        raise DimensionError("dimensions must be at least 1")
    return standard_complex_normal(seed, (rows, cols))


def haar_from_ginibre(G):
    """Haar-distributed unitary from a square Ginibre matrix (stack friendly).

    QR alone is not Haar: the phases of ``R``'s diagonal are absorbed into
    ``Q`` so that ``R`` has a positive real diagonal.
    """
    Q, R = np.linalg.qr(G)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    phase = d / np.abs(d)
    return Q * phase[..., None, :]


def sample_haar_unitary(n, seed):
    """Haar-distributed ``n x n`` unitary matrix."""
    return haar_from_ginibre(sample_ginibre(n, n, seed))


def is_unitary(U, tol=1e-10):
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])) <= tol)
