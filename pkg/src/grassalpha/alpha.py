"""Integrals of ``exp(-alpha phi)`` over G(p, q) and the extremal family.

The extremal family is ``phi_n = f_n(psi)``, where ``psi`` is the chart
potential ``log(det gram(M) / |det m_I(M)|^2)``.  Its integrals blow up as
``n`` grows exactly when ``alpha`` exceeds 1 (for the metric ``g`` whose
Ricci form is ``(p+q) g``), which :func:`alpha_scan` exhibits numerically.

Sampling
--------
Uniform points are spans of Ginibre matrices.  For integrands that
concentrate where ``psi`` is large, chart coordinates can instead be drawn
from the *tilted* law with density proportional to ``F^tau * F^{-(p+q)}``
(``0 <= tau < 1``): ``Z = B L^{-1}`` with ``B`` Ginibre and ``L L^*`` a
complex Wishart matrix with ``p - tau`` degrees of freedom (Bartlett
construction).  Its normalising constant is a ratio of complex
multivariate gamma functions, so importance weights are exact.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .atlas import GrassmannPoint, chart_coords, chart_rep, disjoint_chart_identity
from .complex_core import complement, enumerate_index_sets, gram, minor, standard_complex_normal
from .montecarlo import IntegralEstimate, estimate_mean, mean_and_stderr, run_sharded

EXP_CLIP = 700.0
BOUNDED, GROWING, INCONCLUSIVE = "BOUNDED", "GROWING", "INCONCLUSIVE"


def psi(rep, I):
    """``log(det gram(M) / |det m_I(M)|^2)``; ``+inf`` where the ``I`` minor vanishes.

    Representative independent and stack friendly over ``(..., p+q, p)``.
    Accepts a :class:`GrassmannPoint` as well.
    """
    if isinstance(rep, GrassmannPoint):
        rep = rep.rep
    rep = np.asarray(rep, dtype=complex)
    num = np.linalg.det(gram(rep)).real
    den = np.abs(np.linalg.det(minor(rep, I))) ** 2
    with np.errstate(divide="ignore"):
        out = np.log(num) - np.log(den)
    return out if out.ndim else float(out)


def f_n(n, x, form="max"):
    """Convex, nonincreasing profile: ``-(1 - 1/n) x`` near 0, ``-n`` far out.

    ``form="max"`` is ``max(-(1 - 1/n) x, -n)`` with its kink at
    ``n^2 / (n - 1)``.  ``form="smooth"`` replaces the max by a log-sum-exp
    at inverse temperature ``n``; it stays within ``log(2)/n`` above the
    max form.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    x = np.asarray(x, dtype=float)
    slope = 1.0 - 1.0 / n
    if form == "max":
        out = np.maximum(-slope * x, -float(n))
    elif form == "smooth":
        with np.errstate(invalid="ignore"):
            out = np.logaddexp(-n * slope * x, -float(n) * n) / n
        out = np.where(np.isinf(x), -float(n), out)
    else:
        raise ValueError(f"unknown form {form!r}")
    return out if out.ndim else float(out)


def f_n_derivative(n, x, form="max"):
    x = np.asarray(x, dtype=float)
    slope = 1.0 - 1.0 / n
    if form == "max":
        return np.where(-slope * x >= -n, -slope, 0.0)
    # weight of the sloped branch in the log-sum-exp
    wt = special.expit(-n * slope * x + n * n)
    return -slope * wt


@dataclass(frozen=True)
class ExtremalFamily:
    """``phi_n = f_n(psi_I)`` as a point field on representatives."""

    I: tuple
    n: int
    form: str = "max"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.form not in ("max", "smooth"):
            raise ValueError(f"unknown form {self.form!r}")

    def __call__(self, rep):
        return f_n(self.n, psi(rep, self.I), self.form)


def phi_n(family, pt):
    return family(pt.rep if isinstance(pt, GrassmannPoint) else pt)


# -- sampling -------------------------------------------------------------


def sample_grassmann_reps(p, q, size, rng):
    """``size`` Ginibre representatives; their spans are uniform on G(p, q)."""
    return standard_complex_normal(rng, (size, p + q, p))


def sample_grassmann(p, q, seed):
    """One uniformly distributed point."""
    return GrassmannPoint(p, q, standard_complex_normal(seed, (p + q, p)))


def sample_tilted_reps(p, q, tau, size, rng, chart=None):
    """Representatives whose chart-``chart`` coordinates have density ``F^{tau - (p+q)} / c(p+q-tau)``.

    Rows ``chart`` hold the Bartlett factor ``L`` and the other rows a
    Ginibre block ``B``, so the coordinate is ``Z = B L^{-1}``.  ``Z`` itself
    can be astronomically large; keeping ``[L; B]`` keeps every entry O(1).
    """
    if not 0 <= tau < 1:
        raise ValueError("tilt must lie in [0, 1)")
    I = tuple(chart) if chart is not None else tuple(range(p))
    m = p - tau
    L = np.zeros((size, p, p), dtype=complex)
    for i in range(p):
        L[:, i, i] = np.sqrt(rng.gamma(m - i, 1.0, size))
        if i:
            L[:, i, :i] = standard_complex_normal(rng, (size, i))
    B = standard_complex_normal(rng, (size, q, p))
    rep = np.empty((size, p + q, p), dtype=complex)
    rep[:, list(I), :] = L
    rep[:, list(complement(I, p + q)), :] = B
    return rep


def sample_tilted_coordinates(p, q, tau, size, rng):
    """Chart coordinates (chart ``{0..p-1}``) drawn from the tilted law."""
    return chart_coords(sample_tilted_reps(p, q, tau, size, rng), tuple(range(p)))


def log_multigamma(a, p):
    """Complex multivariate gamma ``log Gamma_p(a)``."""
    return 0.5 * p * (p - 1) * np.log(np.pi) + sum(special.gammaln(a - j) for j in range(p))


def log_chart_mass(p, q, nu):
    """``log int_{C^{q x p}} F(Z)^{-nu} dZ`` for ``nu > p + q - 1``."""
    return p * q * np.log(np.pi) + log_multigamma(nu - q, p) - log_multigamma(nu, p)


def tilt_ratio(p, q, tau):
    """Mass of the tilted density relative to the invariant one."""
    return float(np.exp(log_chart_mass(p, q, p + q - tau) - log_chart_mass(p, q, p + q)))


# -- integrals --------------------------------------------------------------


def heavy_tailed_coordinates(rng, shape):
    """i.i.d. complex entries with density ``(1 + |z|^2)^{-2} / pi``; also returns ``log(1 + |z|^2)``."""
    u = rng.random(shape)
    s = u / (1.0 - u)
    theta = rng.random(shape) * 2 * np.pi
    z = np.sqrt(s) * np.exp(1j * theta)
    return z, np.log1p(s)


def total_volume(p, q, config, chart=None):
    """``int_{C^{pq}} F^{-(p+q)} dZ`` by importance sampling.

    The proposal is a product over coordinates of ``(1 + |z|^2)^{-2} / pi``.
    The density is evaluated through the representative in chart ``chart``
    (default: the first index set); every chart gives the same value.
    """
    I = tuple(chart) if chart is not None else enumerate_index_sets(p, q)[0]
    config = config.derive("volume", *I)

    def draw(rng, n):
        Z, log1p_s = heavy_tailed_coordinates(rng, (n, q, p))
        rep = chart_rep(I, Z)
        log_density = -(p + q) * (np.log(np.linalg.det(gram(rep)).real) - np.log(np.abs(np.linalg.det(minor(rep, I))) ** 2))
        log_proposal = -2.0 * log1p_s.reshape(n, -1).sum(axis=1) - p * q * np.log(np.pi)
        return np.exp(log_density - log_proposal)

    est = estimate_mean(draw, config)
    return IntegralEstimate(est.mean, est.stderr, est.samples, config.seed)


def chart_expectation(fn, p, q, config, tilt=0.0, chart=None):
    """Sharded mean of ``fn(rep) * F_I^{-tilt}`` under the (tilted) sampler.

    With ``tilt == 0`` the points are uniform Ginibre spans.  ``fn`` gets
    batches of representatives and returns per-sample values of shape
    ``(n, ...)``.  Returns ``(mean, stderr, count)`` shaped like the
    trailing axes.
    """
    I = tuple(chart) if chart is not None else enumerate_index_sets(p, q)[0]

    def draw(rng, n):
        if tilt == 0:
            rep = sample_grassmann_reps(p, q, n, rng)
            weight = 1.0
        else:
            rep = sample_tilted_reps(p, q, tilt, n, rng, I)
            weight = np.exp(-tilt * psi(rep, I))
        v = np.asarray(fn(rep), dtype=float)
        w = np.reshape(weight, (-1,) + (1,) * (v.ndim - 1))
        return v * w

    s, s2, count = run_sharded(draw, config)
    mean, se = mean_and_stderr(s, s2, count)
    return mean, se, count


def _combine(volume, ratio, mean, se):
    m = volume.mean * ratio * mean
    with np.errstate(over="ignore", invalid="ignore"):
        err = ratio * np.hypot(volume.mean * se, mean * volume.stderr)
    return m, err


def _exp_clipped(x):
    sat = np.any(x > EXP_CLIP)
    return np.exp(np.minimum(x, EXP_CLIP)), bool(sat)


def mc_integral(alpha, phi, p, q, config, tilt=0.0, chart=None, volume=None):
    """``int_G exp(-alpha phi) dV`` as ``V * mean`` over sampled points.

    Parameters
    ----------
    phi : callable
        Point field on batches of representatives.
    tilt : float
        ``0`` samples uniformly.  ``0 < tilt < 1`` samples chart ``chart``
        from the tilted law and reweights exactly.
    volume : IntegralEstimate, optional
        Total volume; computed by :func:`total_volume` when omitted.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    volume = volume if volume is not None else total_volume(p, q, config)
    saturated = []

    def fn(rep):
        vals, sat = _exp_clipped(-alpha * np.asarray(phi(rep), dtype=float))
        saturated.append(sat)
        return vals

    mean, se, count = chart_expectation(fn, p, q, config, tilt, chart)
    m, err = _combine(volume, tilt_ratio(p, q, tilt), mean, se)
    return IntegralEstimate(float(m), float(err), count, config.seed, saturated=any(saturated))


def threshold_for_scaled_metric(threshold, c):
    """Admissible functions for ``c g`` are ``c phi``, so the threshold divides by ``c``."""
    return threshold / c


@dataclass
class ScanResult:
    p: int
    q: int
    alphas: list
    ns: list
    means: np.ndarray
    stderrs: np.ndarray
    verdicts: dict
    metric_scale: float = 1.0
    tilt: float = 0.0
    volume: IntegralEstimate | None = None
    threshold_bracket: tuple | None = field(default=None)


def verdict(estimates):
    """``GROWING`` if last/first >= 10, else ``BOUNDED`` if the top half varies by < 2x."""
    est = np.asarray(estimates, dtype=float)
    if est[-1] >= 10 * est[0]:
        return GROWING
    top = est[len(est) // 2:]
    if np.max(top) < 2 * np.min(top):
        return BOUNDED
    return INCONCLUSIVE


def alpha_scan(p, q, alphas, ns, config, tilt=0.9, chart=None, metric_scale=1.0, form="max"):
    """Matrix of ``int exp(-alpha phi_n)`` over ``alphas x ns`` with per-alpha verdicts.

    All cells share the same samples, so each row is exactly nondecreasing
    in ``n``.  With ``metric_scale = c`` the metric is ``c g``, the
    functions are ``c phi_n`` and the volume carries ``c^{pq}``.
    """
    alphas = [float(a) for a in alphas]
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n-list must be increasing")
    I = tuple(chart) if chart is not None else enumerate_index_sets(p, q)[0]
    c = float(metric_scale)
    volume = total_volume(p, q, config)
    a = np.array(alphas)[None, :, None]

    def fn(rep):
        x = psi(rep, I)
        phis = np.stack([f_n(n, x, form) for n in ns], axis=-1)  # (N, len(ns))
        vals, _ = _exp_clipped(-a * c * phis[:, None, :])
        return vals  # (N, len(alphas), len(ns))

    mean, se, _ = chart_expectation(fn, p, q, config, tilt, I)
    m, err = _combine(volume, tilt_ratio(p, q, tilt), mean, se)
    m *= c ** (p * q)
    err *= c ** (p * q)
    verdicts = {al: verdict(m[i]) for i, al in enumerate(alphas)}
    bounded = [al for al in alphas if verdicts[al] == BOUNDED]
    growing = [al for al in alphas if verdicts[al] == GROWING]
    bracket = (max(bounded), min(growing)) if bounded and growing else None
    return ScanResult(p, q, alphas, ns, m, err, verdicts, c, tilt, volume, bracket)


# -- singular integrals ---------------------------------------------------


def _ball_volume(d, r):
    return float(np.exp(0.5 * d * np.log(np.pi) + d * np.log(r) - special.gammaln(0.5 * d + 1)))


def _uniform_shell(rng, n_dim, size, a, b):
    d = 2 * n_dim * n_dim
    g = rng.standard_normal((size, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    u = rng.random(size)
    rho = (a**d + u * (b**d - a**d)) ** (1.0 / d)
    x = g * rho[:, None]
    return (x[:, : d // 2] + 1j * x[:, d // 2:]).reshape(size, n_dim, n_dim)


def _inv_det_sq(X, T):
    with np.errstate(divide="ignore"):
        v = 1.0 / np.abs(np.linalg.det(X)) ** 2
    return v if T is None else np.minimum(v, T)


def _shell_mixture(n_dim, T, r):
    """Dyadic shells ``[a_k, b_k]`` between ``r0`` and ``r`` with proposal weights, and ``r0``.

    Inside ``r0 = sqrt(n) T^{-1/(2n)}`` the cap is active everywhere, because
    ``|det X| <= (||X||^2 / n)^{n/2}``.  Uncapped shell integrals scale by
    ``2^{-2n(n-1)}`` per halving, which sets the proposal weights.
    """
    r0 = min(r, np.sqrt(n_dim) * T ** (-0.5 / n_dim))
    K = int(np.ceil(np.log2(r / r0))) if r0 < r else 0
    edges = np.maximum(r * 0.5 ** np.arange(K + 1), r0)
    w = 2.0 ** (-2.0 * n_dim * (n_dim - 1) * np.arange(K))
    return edges, w / w.sum(), r0


def truncated_singular_integral(n_dim, T, r, config):
    """``int_{||X|| <= r} min(|det X|^{-2}, T)`` over complex ``n x n`` matrices.

    The ball where the cap is active everywhere is integrated exactly.  The
    rest is sampled from a mixture of uniform laws on dyadic Frobenius
    shells, with importance weights ``vol_k / prob_k``.  Grows without bound
    in ``T``.
    """
    if T < 1 or r <= 0:
        raise ValueError("need T >= 1 and r > 0")
    d = 2 * n_dim * n_dim
    edges, prob, r0 = _shell_mixture(n_dim, T, r)
    inner = T * _ball_volume(d, r0)
    if len(prob) == 0:
        return IntegralEstimate(inner, 0.0, config.samples, config.seed)
    vols = np.array([_ball_volume(d, b) - _ball_volume(d, a) for a, b in zip(edges[1:], edges[:-1])])

    def draw(rng, n):
        k = rng.choice(len(prob), size=n, p=prob)
        out = np.empty(n)
        for j in range(len(prob)):
            sel = np.flatnonzero(k == j)
            X = _uniform_shell(rng, n_dim, sel.size, edges[j + 1], edges[j])
            out[sel] = _inv_det_sq(X, T) * (vols[j] / prob[j])
        return out

    est = estimate_mean(draw, config)
    return IntegralEstimate(est.mean + inner, est.stderr, est.samples, est.seed)


def shell_integral(n_dim, k, r, config, T=None):
    """Integral of ``|det X|^{-2}`` (optionally capped at ``T``) over the shell ``r/2^{k+1} <= ||X|| <= r/2^k``."""
    a, b = r / 2 ** (k + 1), r / 2**k
    d = 2 * n_dim * n_dim
    vol = _ball_volume(d, b) - _ball_volume(d, a)
    return estimate_mean(lambda rng, n: _inv_det_sq(_uniform_shell(rng, n_dim, n, a, b), T), config, scale=vol)


def log_growth_slope(values, Ts):
    """Least-squares slope of ``values`` against ``log T``."""
    x = np.log(np.asarray(Ts, dtype=float))
    return float(np.polyfit(x, np.asarray(values, dtype=float), 1)[0])


# -- upper bound ----------------------------------------------------------


def upper_bound_witness(p, q, config, ns=(2, 4, 8, 16, 32), radii=(1.0, 10.0, 100.0, 1000.0), tilt=0.9, n_identity=50):
    """Numerical evidence that ``int exp(-phi_n)`` cannot stay bounded.

    Returns a dict with the estimates of ``int exp(-phi_n)`` (nondecreasing
    in ``n`` at fixed seed), truncated integrals of ``F`` over chart balls
    ``||Z|| <= R`` (growing without bound), and residuals of the
    disjoint-chart identity at random points.
    """
    if p > q:
        raise ValueError("needs p <= q; pass through dual() first")
    sets = enumerate_index_sets(p, q)
    I = sets[0]
    scan = alpha_scan(p, q, [1.0], ns, config, tilt=tilt, chart=I)
    radii = [float(R) for R in radii]
    R = np.array(radii)

    def trunc(rep):
        Z = chart_coords(rep, I)
        norm = np.linalg.norm(Z.reshape(len(Z), -1), axis=1)
        return np.exp(psi(rep, I))[:, None] * (norm[:, None] <= R[None, :])

    mean, se, _ = chart_expectation(trunc, p, q, config.derive("truncated-F"), tilt, I)
    volume = scan.volume
    tm, terr = _combine(volume, tilt_ratio(p, q, tilt), mean, se)

    J = tuple(complement(I, p + q)[:p])
    rng = np.random.default_rng(config.derive("identity").seed)
    residuals = []
    for _ in range(n_identity):
        Z_J = standard_complex_normal(rng, (q, p))
        lhs, rhs = disjoint_chart_identity(Z_J, J, I)
        residuals.append(abs(lhs - rhs) / abs(lhs))
    return {
        "ns": list(ns),
        "extremal_integrals": scan.means[0].tolist(),
        "extremal_stderrs": scan.stderrs[0].tolist(),
        "monotone": bool(np.all(np.diff(scan.means[0]) >= 0)),
        "radii": radii,
        "truncated_F_integrals": tm.tolist(),
        "truncated_F_stderrs": terr.tolist(),
        "disjoint_chart_residual_max": float(max(residuals)),
        "charts": (I, J),
    }
