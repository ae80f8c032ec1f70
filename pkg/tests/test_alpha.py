import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassalpha.alpha import (
    BOUNDED,
    GROWING,
    INCONCLUSIVE,
    ExtremalFamily,
    alpha_scan,
    chart_expectation,
    f_n,
    f_n_derivative,
    log_chart_mass,
    log_growth_slope,
    mc_integral,
    phi_n,
    psi,
    sample_grassmann,
    sample_grassmann_reps,
    sample_tilted_coordinates,
    sample_tilted_reps,
    shell_integral,
    tilt_ratio,
    total_volume,
    truncated_singular_integral,
    upper_bound_witness,
    verdict,
)
from grassalpha.atlas import GrassmannPoint, canonical_point, in_chart
from grassalpha.complex_core import enumerate_index_sets, sample_ginibre, sample_haar_unitary
from grassalpha.metric import F
from grassalpha.montecarlo import MCConfig

# frozen mpmath quadratures
P1_AREA = 3.14159265358979323846
VOLUME_1_2 = 4.93480220054467930942
LIMIT_P1_ALPHA_08 = 15.7079632679486709021  # int (1 + r^2)^(0.8 - 2) over C
TRUNC_T1E2 = 17.6091614784207228634
TRUNC_T1E4 = 32.0767303032516524884
SHELL = 4.35517218060720426100
TRUNC_F_R10 = 14.4988287111400303337  # pi log(1 + 100)


def test_psi_examples():
    assert psi(canonical_point((0, 1), 2, 2), (0, 1)) == pytest.approx(0.0, abs=1e-15)
    z = 0.3 - 1.2j
    assert psi(np.array([[1.0], [z]]), (0,)) == pytest.approx(np.log(1 + abs(z) ** 2))
    assert psi(canonical_point((1,), 1, 1), (0,)) == np.inf


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(1, 1), (2, 2), (2, 3)]), st.integers(0, 2**32 - 1))
def test_psi_representative_invariance(shape, seed):
    p, q = shape
    rng = np.random.default_rng(seed)
    M = sample_ginibre(p + q, p, rng)
    G = sample_ginibre(p, p, rng)
    I = enumerate_index_sets(p, q)[0]
    assert abs(psi(M @ G, I) - psi(M, I)) <= 1e-10 * max(1.0, abs(psi(M, I)))


def test_f_n_examples():
    assert f_n(2, 1.0) == pytest.approx(-0.5)
    assert f_n(2, 5.0) == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        f_n(1, 0.0)
    with pytest.raises(ValueError):
        f_n(2, 0.0, form="cubic")


def test_f_n_grid_properties():
    x = np.linspace(0, 10, 1001)
    prev = None
    for n in range(2, 40):
        cur = f_n(n, x)
        assert np.all(cur >= -x)
        if prev is not None:
            assert np.all(cur <= prev)
        second = cur[:-2] - 2 * cur[1:-1] + cur[2:]
        assert np.all(second >= -1e-12)
        assert np.all(1 + f_n_derivative(n, x) >= 1 / n - 1e-12)
        prev = cur
    assert np.max(np.abs(f_n(10**7, x) + x)) <= 1e-5


def test_f_n_kink_location():
    for n in (2, 3, 10):
        k = n * n / (n - 1)
        assert n < k <= 2 * n
        assert f_n(n, k) == pytest.approx(-n)
        assert f_n(n, 2 * n) == -n


def test_smoothed_profile_stays_close():
    x = np.linspace(0, 30, 3001)
    for n in (2, 4, 16):
        gap = f_n(n, x, "smooth") - f_n(n, x)
        assert np.all(gap >= 0) and np.all(gap <= np.log(2) / n + 1e-12)
        second = np.diff(f_n(n, x, "smooth"), 2)
        assert np.all(second >= -1e-12)
    assert f_n(4, np.inf, "smooth") == -4


def test_phi_n_examples():
    fam = ExtremalFamily((0, 1), 3)
    assert phi_n(fam, canonical_point((0, 1), 2, 2)) == 0.0
    off = canonical_point((2, 3), 2, 2)
    assert not in_chart(off, (0, 1))
    assert phi_n(fam, off) == -3.0
    with pytest.raises(ValueError):
        ExtremalFamily((0,), 1)


def test_sample_grassmann_deterministic():
    assert sample_grassmann(2, 2, 5).same_point(sample_grassmann(2, 2, 5))
    assert not sample_grassmann(2, 2, 5).same_point(sample_grassmann(2, 2, 6))


def test_chart_membership_frequencies_match():
    # all charts are equally likely to be the best chart (permutation invariance)
    from grassalpha.atlas import best_chart

    rng = np.random.default_rng(0)
    sets = enumerate_index_sets(2, 2)
    counts = np.zeros(len(sets))
    n = 6000
    for _ in range(n):
        counts[sets.index(best_chart(GrassmannPoint(2, 2, sample_ginibre(4, 2, rng))))] += 1
    expected = n / len(sets)
    sigma = np.sqrt(n * (1 / 6) * (5 / 6))
    assert np.all(np.abs(counts - expected) <= 4 * sigma)


def test_haar_push_leaves_statistic_unchanged():
    rng = np.random.default_rng(1)
    U = sample_haar_unitary(3, rng)
    reps = sample_grassmann_reps(1, 2, 20000, rng)
    a = np.tanh(psi(reps, (0,)))
    b = np.tanh(psi(U @ reps, (0,)))
    se = np.hypot(a.std(), b.std()) / np.sqrt(len(a))
    assert abs(a.mean() - b.mean()) <= 3 * se


def test_chart_mass_closed_form():
    assert np.exp(log_chart_mass(1, 1, 2)) == pytest.approx(np.pi)
    assert np.exp(log_chart_mass(1, 2, 3)) == pytest.approx(VOLUME_1_2)
    assert np.exp(log_chart_mass(2, 2, 4)) == pytest.approx(np.pi**4 / 12)
    # the tilted mass for p = q = 1 is int (1 + |z|^2)^{-1.1} = pi / 0.1
    assert tilt_ratio(1, 1, 0.9) == pytest.approx(10.0)


def test_tilted_sampler_tail():
    # p = q = 1, tau = 0.9: P(|z|^2 > t) = (1 + t)^{-0.1}
    rng = np.random.default_rng(3)
    z = sample_tilted_coordinates(1, 1, 0.9, 200_000, rng).ravel()
    for t in (0.5, 10.0, 1e4):
        prob = (1 + t) ** -0.1
        emp = np.mean(np.abs(z) ** 2 > t)
        assert abs(emp - prob) <= 4 * np.sqrt(prob * (1 - prob) / len(z))
    with pytest.raises(ValueError):
        sample_tilted_reps(1, 1, 1.0, 10, rng)


@pytest.mark.parametrize("p,q", [(1, 2), (2, 2)])
def test_tilted_reweighting_is_normalised(p, q):
    # tilt_ratio * E_tilted[F^-tau] is the total invariant probability
    mean, se, _ = chart_expectation(lambda rep: np.ones(len(rep)), p, q, MCConfig(seed=4, samples=200_000), tilt=0.5)
    assert mean * tilt_ratio(p, q, 0.5) == pytest.approx(1.0, rel=0.03)


def test_total_volume_p1():
    est = total_volume(1, 1, MCConfig(seed=0, samples=10_000))
    # the proposal matches the density exactly, so the estimator has no variance
    assert est.mean == pytest.approx(P1_AREA, rel=1e-12)


def test_total_volume_chart_independent():
    a = total_volume(1, 2, MCConfig(seed=1, samples=200_000), chart=(0,))
    b = total_volume(1, 2, MCConfig(seed=1, samples=200_000), chart=(2,))
    assert abs(a.mean - b.mean) <= 3 * np.hypot(a.stderr, b.stderr)
    assert a.mean == pytest.approx(VOLUME_1_2, rel=0.02)


def test_mc_integral_trivial_cases():
    cfg = MCConfig(seed=2, samples=20_000)
    vol = total_volume(1, 2, cfg)
    zero = lambda rep: np.zeros(len(rep))  # noqa: E731
    assert mc_integral(0.0, ExtremalFamily((0,), 4), 1, 2, cfg, volume=vol).mean == pytest.approx(vol.mean)
    assert mc_integral(1.3, zero, 1, 2, cfg, volume=vol).mean == pytest.approx(vol.mean)
    with pytest.raises(ValueError):
        mc_integral(-1.0, zero, 1, 2, cfg)


def test_mc_integral_saturation_flag():
    huge = lambda rep: -1e4 * np.ones(len(rep))  # noqa: E731
    est = mc_integral(1.0, huge, 1, 1, MCConfig(samples=100))
    assert est.saturated and np.isfinite(est.mean)
    assert not mc_integral(1.0, lambda rep: np.zeros(len(rep)), 1, 1, MCConfig(samples=100)).saturated


def test_mc_integral_tilted_matches_uniform():
    fam = ExtremalFamily((0,), 4)
    cfg = MCConfig(seed=5, samples=200_000)
    a = mc_integral(0.8, fam, 1, 1, cfg)
    b = mc_integral(0.8, fam, 1, 1, cfg, tilt=0.9)
    assert abs(a.mean - b.mean) <= 4 * np.hypot(a.stderr, b.stderr)


def test_verdict_rules():
    assert verdict([1, 2, 5, 11]) == GROWING
    assert verdict([1, 1.5, 1.7, 1.9]) == BOUNDED
    assert verdict([1, 2, 3, 7]) == INCONCLUSIVE


def test_alpha_scan_p1():
    res = alpha_scan(1, 1, [0.8, 1.2], [4, 8, 16, 32], MCConfig(seed=0, samples=50_000))
    assert res.verdicts == {0.8: BOUNDED, 1.2: GROWING}
    assert np.all(np.diff(res.means, axis=1) >= 0)
    # approaches the convergent limit integral from below
    assert res.means[0, -1] < LIMIT_P1_ALPHA_08
    assert res.means[0, -1] > 0.85 * LIMIT_P1_ALPHA_08
    assert res.threshold_bracket == (0.8, 1.2)
    with pytest.raises(ValueError):
        alpha_scan(1, 1, [0.8], [8, 4], MCConfig())


def test_alpha_scan_scaled_metric():
    cfg = MCConfig(seed=1, samples=50_000)
    base = alpha_scan(1, 2, [0.8, 1.2], [4, 8, 16, 32], cfg)
    scaled = alpha_scan(1, 2, [0.8 / 3, 1.2 / 3], [4, 8, 16, 32], cfg, metric_scale=3.0)
    # the integrand is unchanged; only the volume picks up c^{pq}
    assert np.allclose(scaled.means, 9.0 * base.means)
    assert list(scaled.verdicts.values()) == list(base.verdicts.values())
    lo, hi = scaled.threshold_bracket
    assert lo < 1 / 3 < hi


def test_truncated_singular_integral_p1():
    cfg = MCConfig(seed=0, samples=400_000)
    assert truncated_singular_integral(1, 1e2, 1.0, cfg).mean == pytest.approx(TRUNC_T1E2, rel=0.02)
    assert truncated_singular_integral(1, 1e4, 1.0, cfg).mean == pytest.approx(TRUNC_T1E4, rel=0.02)
    with pytest.raises(ValueError):
        truncated_singular_integral(1, 0.5, 1.0, cfg)


def test_shell_integrals_p1():
    for k in range(4):
        assert shell_integral(1, k, 1.0, MCConfig(seed=k, samples=50_000)).mean == pytest.approx(SHELL, rel=0.01)


def test_log_growth_slope():
    Ts = [1e2, 1e3, 1e4]
    assert log_growth_slope([2 + 3 * np.log(T) for T in Ts], Ts) == pytest.approx(3.0)


def test_upper_bound_witness_p1():
    wit = upper_bound_witness(1, 1, MCConfig(seed=0, samples=100_000), radii=(10.0, 100.0))
    assert wit["monotone"]
    assert wit["truncated_F_integrals"][0] == pytest.approx(TRUNC_F_R10, rel=0.05)
    assert wit["truncated_F_integrals"][1] > 1.7 * wit["truncated_F_integrals"][0]
    assert wit["disjoint_chart_residual_max"] <= 1e-8
    with pytest.raises(ValueError):
        upper_bound_witness(2, 1, MCConfig())


def test_F_of_tilted_samples_stays_finite():
    reps = sample_tilted_reps(2, 2, 0.9, 50_000, np.random.default_rng(0))
    x = psi(reps, (0, 1))
    assert np.all(np.isfinite(x)) and np.all(x >= -1e-12)
    # where the coordinates are moderate, psi is log F of them
    from grassalpha.atlas import chart_coords

    Z = chart_coords(reps[:100], (0, 1))
    small = np.linalg.norm(Z.reshape(100, -1), axis=1) < 10
    assert np.allclose(x[:100][small], np.log(F(Z[small])))
