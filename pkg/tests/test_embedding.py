import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassalpha.atlas import GrassmannPoint, canonical_point, numerical_jacobian_det_sq
from grassalpha.complex_core import sample_ginibre
from grassalpha.embedding import (
    WParam,
    affine_coordinates,
    fiber_inequality_slacks,
    gram_det,
    grassmann_factor_metric,
    phi_factor,
    product_admissibility_eigenvalue,
    product_extension,
    product_metric,
    pullback_residual,
    rho_tilde,
    w_tail_integral,
)
from grassalpha.metric import F

# mpmath radial quadratures, 30 digits, frozen
W_TAIL_D1_K2 = 3.14159265358979323846
W_TAIL_D2_K3 = 4.93480220054467930942
W_TAIL_D3_K45 = 2.36238298516570058480


def random_w(p, q, rng, scale=0.7):
    return WParam.from_vector(p, q, scale * sample_ginibre(p * (q - 1), 1, rng).ravel())


def test_wparam_validation():
    with pytest.raises(ValueError):
        WParam.zeros(3, 2)
    with pytest.raises(ValueError):
        WParam(2, 2, np.ones((2, 2)))
    with pytest.raises(ValueError):
        WParam.from_vector(2, 3, np.ones(3))
    w = WParam.from_vector(2, 3, np.arange(1, 5))
    assert w.vector.size == 4
    assert w.norm_sq == pytest.approx(1 + 4 + 9 + 16)
    assert w.W[0, 0] == 0 and w.W[1, 1] == 0


def test_rho_tilde_at_infinity_is_canonical():
    p, q = 2, 3
    w = random_w(p, q, np.random.default_rng(0))
    rep = rho_tilde(w, np.zeros(p), np.ones(p))
    assert GrassmannPoint(p, q, rep).same_point(canonical_point((2, 3), p, q))


def test_rho_tilde_structure():
    w = WParam.zeros(2, 2)
    mu = np.array([0.5, 2j])
    rep = rho_tilde(w, np.ones(2), mu)
    assert np.allclose(rep, [[1, 0], [0, 1], [0.5, 0], [0, 2j]])
    assert np.allclose(np.diag(rep.T @ rep.conj()).real, 1 + np.abs(mu) ** 2)
    with pytest.raises(ValueError):
        rho_tilde(w, np.array([0.0, 1.0]), np.array([0.0, 1.0]))


def test_rho_tilde_p1_q2():
    w = WParam.from_vector(1, 2, [0.3 - 0.4j])
    mu = np.array([1.5j])
    rep = rho_tilde(w, np.ones(1), mu)
    assert np.allclose(rep[:, 0], [1, 1.5j, 0.3 - 0.4j])
    assert gram_det(w, mu) == pytest.approx(1 + 2.25 + 0.25)


def test_gram_det_examples():
    assert gram_det(WParam.zeros(1, 1), np.array([2.0])) == pytest.approx(5.0)
    mu = np.array([1.0, 2.0, 0.5j])
    assert gram_det(WParam.zeros(3, 3), mu) == pytest.approx(np.prod(1 + np.abs(mu) ** 2))


@pytest.mark.parametrize("p,q", [(1, 2), (2, 2), (2, 3)])
def test_gram_det_is_F_of_affine_coordinates(p, q):
    rng = np.random.default_rng(1)
    w = random_w(p, q, rng)
    mu = sample_ginibre(p, 1, rng).ravel()
    assert gram_det(w, mu) == pytest.approx(F(affine_coordinates(w, mu)))


def test_phi_factor_examples():
    rng = np.random.default_rng(2)
    w = random_w(2, 3, rng)
    assert phi_factor(w, np.zeros(2), np.ones(2)) == pytest.approx(1.0)
    lam, mu = sample_ginibre(2, 1, rng).ravel(), sample_ginibre(2, 1, rng).ravel()
    assert phi_factor(WParam.zeros(2, 3), lam, mu) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_phi_factor_scaling_invariance(seed):
    rng = np.random.default_rng(seed)
    w = random_w(2, 3, rng)
    lam, mu, t = (sample_ginibre(2, 1, rng).ravel() for _ in range(3))
    assert abs(phi_factor(w, t * lam, t * mu) - phi_factor(w, lam, mu)) <= 1e-10 * phi_factor(w, lam, mu)


def test_pullback_projective_line():
    w = WParam.zeros(1, 1)
    for mu in (0.0, 0.7 - 0.2j, 2.0):
        assert pullback_residual(w, np.array([mu])) <= 1e-8


@pytest.mark.parametrize("p,q", [(1, 2), (2, 2), (2, 3), (3, 3)])
def test_pullback_with_zero_w(p, q):
    mu = 0.9 * sample_ginibre(p, 1, 3).ravel()
    assert pullback_residual(WParam.zeros(p, q), mu) <= 1e-6


@pytest.mark.parametrize("p,q", [(2, 2), (2, 3)])
def test_pullback_random(p, q):
    rng = np.random.default_rng(4)
    for _ in range(5):
        assert pullback_residual(random_w(p, q, rng), 0.8 * sample_ginibre(p, 1, rng).ravel()) <= 1e-5


@pytest.mark.parametrize("p,q", [(1, 1), (1, 3), (2, 2), (2, 3)])
def test_fibre_inequalities(p, q):
    rng = np.random.default_rng(5)
    d = p * (q - 1)
    for _ in range(500):
        w = WParam.from_vector(p, q, 2 * rng.standard_normal() * sample_ginibre(max(d, 1), 1, rng).ravel()[:d])
        mu = 2 * rng.standard_normal() * sample_ginibre(p, 1, rng).ravel()
        s = fiber_inequality_slacks(w, mu, rng.uniform(0, 1), rng.uniform(0.01, 5))
        assert np.all(s["per_factor"] >= -1e-12)
        assert s["w_bound"] >= -1e-12
        assert s["combined"] >= -1e-12


def test_fibre_inequalities_equality_cases():
    w = WParam.from_vector(1, 2, [0.5])
    s = fiber_inequality_slacks(w, np.array([0.0]), 0.5, 1.0)
    assert s["w_bound"] == pytest.approx(0.0, abs=1e-15)
    s = fiber_inequality_slacks(WParam.zeros(1, 2), np.array([1.3]), 0.5, 1.0)
    assert s["per_factor"][0] == pytest.approx(0.0, abs=1e-15)


def test_affine_relabelling_has_unit_jacobian():
    p, q = 2, 3
    mask = np.ones((q, p), dtype=bool)
    mask[np.arange(p), np.arange(p)] = False

    def relabel(x):
        # x packs (w, mu) as a q x p array: mu on the diagonal slots, w elsewhere
        w = WParam.from_vector(p, q, x[mask])
        return affine_coordinates(w, np.diagonal(x).copy())

    x = sample_ginibre(q, p, 6)
    assert np.allclose(relabel(x), x)
    assert numerical_jacobian_det_sq(relabel, x) == pytest.approx(1.0, abs=1e-8)


def test_w_tail_integral_values():
    assert w_tail_integral(2.0, 1).mean == pytest.approx(W_TAIL_D1_K2, rel=1e-6)
    assert w_tail_integral(3.0, 2).mean == pytest.approx(W_TAIL_D2_K3, rel=1e-6)
    assert w_tail_integral(4.5, 3).mean == pytest.approx(W_TAIL_D3_K45, rel=1e-6)
    assert w_tail_integral(1.0, 1).divergent
    assert w_tail_integral(0.5, 2).divergent
    assert w_tail_integral(3.0, 0).mean == 1.0
    with pytest.raises(ValueError):
        w_tail_integral(1.0, -1)


def test_product_extension_admissible():
    g = product_metric((grassmann_factor_metric(1, 1), 1), (grassmann_factor_metric(1, 2), 2))
    assert np.allclose(g(np.zeros(3)), np.eye(3))
    zero = product_extension(lambda z: np.zeros(np.shape(z)[:-1]), 1)
    assert product_admissibility_eigenvalue(g, zero, np.array([0.3, 1.0, -1j])) > 0

    def phi(z):
        # a strictly admissible function on the first factor: 0.5 log(1 + |z|^2)
        return 0.5 * np.log1p(np.abs(np.asarray(z)[..., 0]) ** 2)

    rng = np.random.default_rng(7)
    psi = product_extension(phi, 1)
    for _ in range(20):
        z = sample_ginibre(3, 1, rng).ravel()
        assert product_admissibility_eigenvalue(g, psi, z) > 0
        # restriction to the first factor at a fixed second factor
        z2 = z[1:]
        slice_fn = lambda z1: psi(np.concatenate([np.atleast_1d(z1), np.broadcast_to(z2, np.shape(z1)[:-1] + (2,))], axis=-1))  # noqa: E731
        g1 = grassmann_factor_metric(1, 1)
        assert product_admissibility_eigenvalue(g1, slice_fn, z[:1]) > 0
