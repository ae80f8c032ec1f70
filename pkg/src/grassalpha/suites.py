"""The check suites run by the command-line tool.

Every suite takes a :class:`RunConfig` and returns a filled
:class:`~grassalpha.reports.Report`.  Randomness flows from
``config.seed`` only, so a suite is a pure function of its config.
"""

import time
from dataclasses import asdict, dataclass, field
from math import factorial

import numpy as np
from scipy import special

from ._version import __version__
from .alpha import (
    BOUNDED,
    GROWING,
    ExtremalFamily,
    alpha_scan,
    f_n,
    f_n_derivative,
    heavy_tailed_coordinates,
    log_growth_slope,
    mc_integral,
    sample_grassmann,
    shell_integral,
    total_volume,
    truncated_singular_integral,
    upper_bound_witness,
)
from .atlas import (
    ChartCoordinates,
    GrassmannPoint,
    canonical_point,
    chart_rep,
    disjoint_chart_identity,
    dual,
    numerical_jacobian_det_sq,
    projector_distance,
    transition,
    transition_alpha,
    transition_jacobian_det_sq,
    transition_map,
    unitary_chart_map,
)
from .complex_core import (
    cauchy_binet_residual,
    complement,
    enumerate_index_sets,
    minor,
    sample_haar_unitary,
    standard_complex_normal,
)
from .embedding import (
    WParam,
    fiber_inequality_slacks,
    grassmann_factor_metric,
    product_admissibility_eigenvalue,
    product_extension,
    product_metric,
    pullback_residual,
    w_tail_integral,
)
from .metric import (
    det_metric,
    einstein_residual,
    hermitian_hessian,
    is_admissible,
    metric_closed_form,
    potential,
    ricci,
    ricci_via_potential,
    volume_density,
)
from .montecarlo import MCConfig, estimate_mean
from .reports import Report

COMMANDS = ("verify", "einstein", "volume", "alpha-scan", "divergence", "pullback")


@dataclass
class RunConfig:
    """Everything a command needs; see ``docs/cli.md`` for the key names."""

    p: int = 1
    q: int = 1
    seed: int = 0
    samples: int = 100_000
    shards: int = 1
    out: str | None = None
    points: int = 50
    alphas: tuple = (0.8, 1.2)
    ns: tuple = (4, 8, 16, 32)
    Ts: tuple = (1e2, 1e3, 1e4, 1e5)
    kappa: float | None = None
    n_dim: int = 1
    radius: float = 1.0
    tilt: float = 0.9
    fault_injection: bool = False
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError("p and q must be >= 1")
        if self.samples < 1 or self.shards < 1 or self.points < 1:
            raise ValueError("samples, shards and points must be >= 1")
        if self.n_dim < 1:
            raise ValueError("n_dim must be >= 1")
        if not 0 <= self.tilt < 1:
            raise ValueError("tilt must lie in [0, 1)")
        self.alphas = tuple(float(a) for a in self.alphas)
        self.ns = tuple(int(n) for n in self.ns)
        self.Ts = tuple(float(t) for t in self.Ts)
        if any(not 0 < a < 2 for a in self.alphas):
            raise ValueError("alphas must lie in (0, 2)")
        if any(n < 2 for n in self.ns) or any(b <= a for a, b in zip(self.ns, self.ns[1:])):
            raise ValueError("ns must be increasing integers >= 2")
        if any(t < 1 for t in self.Ts):
            raise ValueError("truncation levels must be >= 1")

    @property
    def mc(self):
        return MCConfig(self.seed, self.samples, self.shards)

    def echo(self):
        d = asdict(self)
        d.pop("out")
        return d

    def rng(self, *tags):
        """Generator derived from the seed and ``tags`` (stable across runs)."""
        return np.random.default_rng(self.mc.derive(*tags).seed)


def new_report(command, config):
    return Report(command, config.echo(), __version__, overrides=dict(config.overrides))


def hua_volume(p, q):
    """Closed-form chart volume ``pi^{pq} prod_{j<p} j! / (q+j)!``."""
    return float(np.pi ** (p * q) * np.prod([factorial(j) / factorial(q + j) for j in range(p)]))


def _random_points(p, q, rng, count, scale=0.7):
    return [scale * standard_complex_normal(rng, (q, p)) for _ in range(count)]


# -- identity checks --------------------------------------------------------


def random_chart_pairs(p, q, rng, count, min_minor=0.2):
    """Coordinates in a random chart ``I`` with a second chart ``J`` holding the point comfortably.

    Pairs whose transition block has ``|det alpha| < min_minor`` are
    redrawn so that finite differences stay accurate.
    """
    sets = enumerate_index_sets(p, q)
    out = []
    while len(out) < count:
        I = sets[rng.integers(len(sets))]
        J = sets[rng.integers(len(sets))]
        c = ChartCoordinates(I, 0.7 * standard_complex_normal(rng, (q, p)))
        if abs(np.linalg.det(transition_alpha(c, J))) >= min_minor:
            out.append((c, J))
    return out


def check_cauchy_binet(report, config, count=100):
    rng = config.rng("cauchy-binet")
    res = [cauchy_binet_residual(standard_complex_normal(rng, (config.p + config.q, config.p))) for _ in range(count)]
    report.check("Cauchy-Binet residual (max)", "cauchy-binet", max(res), 1e-10)


def check_transitions(report, config):
    rng = config.rng("transition")
    jac_err, rule_err = [], []
    for c, J in random_chart_pairs(config.p, config.q, rng, config.points):
        closed = transition_jacobian_det_sq(c, J)
        numeric = numerical_jacobian_det_sq(transition_map(c.I, J), c.Z)
        jac_err.append(abs(closed - numeric) / closed)
        lam = volume_density(c.Z)
        rule_err.append(abs(lam - volume_density(transition(c, J).Z) * closed) / lam)
    report.check("transition Jacobian, closed form vs finite differences (max rel err)", "chart-transition", max(jac_err), 1e-6)
    report.check("density transformation rule (max rel err)", "density-transform", max(rule_err), 1e-8)


def check_unitary_invariance(report, config):
    p, q = config.p, config.q
    rng = config.rng("unitary")
    I = enumerate_index_sets(p, q)[0]
    errs = []
    while len(errs) < config.points:
        U = sample_haar_unitary(p + q, rng)
        Z = 0.5 * standard_complex_normal(rng, (q, p))
        image_rep = U @ chart_rep(I, Z)
        if abs(np.linalg.det(minor(image_rep, I))) < 0.2:
            continue
        image = unitary_chart_map(U, I)(Z)
        jac = numerical_jacobian_det_sq(unitary_chart_map(U, I), Z)
        src = volume_density(Z)
        errs.append(abs(volume_density(image) * jac - src) / src)
    report.check("unitary invariance of the volume form (max rel err)", "unitary-invariance", max(errs), 1e-6)


def check_disjoint_identity(report, config):
    p, q = config.p, config.q
    if p > q:
        return
    rng = config.rng("disjoint")
    I = tuple(range(p))
    J = tuple(range(p, 2 * p))
    res = []
    for Z in _random_points(p, q, rng, config.points, scale=1.0):
        lhs, rhs = disjoint_chart_identity(Z, J, I)
        res.append(abs(lhs - rhs) / abs(lhs))
    report.check("disjoint-chart determinant identity (max rel err)", "disjoint-chart-identity", max(res), 1e-8)


def check_duality(report, config):
    p, q = config.p, config.q
    rng = config.rng("duality")
    worst = 0.0
    for _ in range(config.points):
        pt = GrassmannPoint(p, q, standard_complex_normal(rng, (p + q, p)))
        worst = max(worst, projector_distance(dual(dual(pt)), pt))
    I = enumerate_index_sets(p, q)[-1]
    canon = projector_distance(dual(canonical_point(I, p, q)), canonical_point(complement(I, p + q), q, p))
    report.check("dual is an involution (max projector distance)", "duality", max(worst, canon), 1e-10)


def check_metric(report, config, count=1000):
    p, q = config.p, config.q
    n = p * q
    Z0 = np.zeros((q, p))
    report.check("metric at origin, closed form", "metric-origin", float(np.max(np.abs(metric_closed_form(Z0) - np.eye(n)))), 1e-10)
    report.check("metric at origin, finite differences", "metric-origin", float(np.max(np.abs(hermitian_hessian(potential, Z0) - np.eye(n)))), 1e-6)
    rng = config.rng("metric")
    fd = max(
        float(np.max(np.abs(metric_closed_form(Z) - hermitian_hessian(potential, Z))))
        for Z in _random_points(p, q, rng, min(config.points, 50))
    )
    report.check("closed-form metric vs Hessian of potential (max abs err)", "metric-closed-form", fd, 1e-6)
    Zs = standard_complex_normal(rng, (count, q, p))
    dens = volume_density(Zs)
    rel = float(np.max(np.abs(det_metric(Zs) - dens) / dens))
    report.check("det g vs F^-(p+q) (max rel err)", "metric-determinant", rel, 1e-5)
    eig = float(np.min(np.linalg.eigvalsh(metric_closed_form(Zs))))
    report.check("metric positive definite (min eigenvalue)", "metric-closed-form", eig, 0.0, "gt")


def check_einstein(report, config, count=None, radius=2.0):
    p, q = config.p, config.q
    rng = config.rng("einstein")
    count = config.points if count is None else count
    sign = -1.0 if config.fault_injection else 1.0
    res, paths = [], []
    while len(res) < count:
        Z = standard_complex_normal(rng, (q, p))
        nrm = np.linalg.norm(Z)
        if nrm > radius:
            Z *= radius * rng.random() / nrm
        res.append(einstein_residual(Z, sign=sign))
        if len(paths) < 5:
            R1, R2 = ricci(Z), ricci_via_potential(Z)
            paths.append(float(np.linalg.norm(R1 - R2) / np.linalg.norm(R1)))
    origin = float(np.max(np.abs(ricci(np.zeros((q, p))) - (p + q) * np.eye(p * q))))
    report.check("Ricci at origin equals (p+q) I (max abs err)", "einstein", origin, 1e-6)
    report.check("Einstein residual ||Ric - (p+q) g|| / ||g|| (max)", "einstein", max(res), 1e-3)
    report.check("Ricci from log det g vs (p+q) Hessian of potential (max rel err)", "einstein", max(paths), 1e-3)
    return res


# -- commands ---------------------------------------------------------------


def cmd_verify(config):
    report = new_report("verify", config)
    check_cauchy_binet(report, config)
    check_transitions(report, config)
    check_unitary_invariance(report, config)
    check_disjoint_identity(report, config)
    check_duality(report, config)
    check_metric(report, config)
    check_einstein(report, config, count=min(config.points, 20))
    report.rows(
        ["check", "tag", "value", "tolerance", "passed"],
        [(c.name, c.tag, c.value, c.tolerance, c.passed) for c in report.checks],
    )
    return report


def cmd_einstein(config):
    report = new_report("einstein", config)
    res = check_einstein(report, config)
    report.rows(["point", "residual"], list(enumerate(res)))
    return report


def cmd_volume(config):
    p, q = config.p, config.q
    report = new_report("volume", config)
    ref = hua_volume(p, q)
    tol = 0.005 if p * q == 1 else 0.01 if p * q == 2 else 0.05
    rows = []
    sets = enumerate_index_sets(p, q)
    for I in (sets[0], sets[-1]):
        est = total_volume(p, q, config.mc, chart=I)
        rows.append(("-".join(str(i) for i in I), est.mean, est.stderr, ref, est.samples))
        report.check(f"chart volume in chart {I} (rel err vs closed form)", "total-volume", abs(est.mean - ref) / ref, tol)
    report.rows(["chart", "estimate", "stderr", "reference", "samples"], rows)
    return report


def check_extremal_family(report, ns=(2, 3, 4, 6, 8, 16, 32, 64)):
    x = np.linspace(0.0, 10.0, 2001)
    vals = np.array([f_n(n, x) for n in ns])
    monotone = bool(np.all(np.diff(vals, axis=0) <= 0) and np.all(vals[-1] >= -x))
    second = vals[:, :-2] - 2 * vals[:, 1:-1] + vals[:, 2:]
    convex = bool(np.all(second >= -1e-12))
    slope = bool(all(np.all(1 + f_n_derivative(n, x) >= 1.0 / n - 1e-12) for n in ns))
    big = np.array([1e-3, 0.5, 1.0, 5.0, 10.0])
    limit = float(np.max(np.abs(f_n(10**6, big) + big)))
    report.check("f_n nonincreasing in n and above -x", "extremal-family", monotone, None)
    report.check("f_n convex on grid", "extremal-family", convex, None)
    report.check("slope bound 1 + f_n' >= 1/n", "extremal-family", slope, None)
    report.check("f_n -> -x pointwise (error at n = 1e6)", "extremal-family", limit, 1e-4)


def check_admissibility(report, config, n=4, count=None):
    p, q = config.p, config.q
    count = config.points if count is None else count
    I = enumerate_index_sets(p, q)[0]
    fam = ExtremalFamily(I, n, "smooth")
    rng = config.rng("admissibility")
    pts = [sample_grassmann(p, q, rng) for _ in range(count)]
    rep = is_admissible(fam, pts)
    report.check(f"smoothed phi_{n} admissibility margin (min eigenvalue)", "admissibility", rep.margin, 0.0, "gt")


def cmd_alpha_scan(config):
    p, q = config.p, config.q
    report = new_report("alpha-scan", config)
    scan = alpha_scan(p, q, config.alphas, config.ns, config.mc, tilt=config.tilt)
    rows = []
    for i, a in enumerate(scan.alphas):
        for j, n in enumerate(scan.ns):
            rows.append((1.0, a, n, scan.means[i, j], scan.stderrs[i, j], scan.verdicts[a]))
        if a < 1:
            report.check(f"alpha = {a}: integrals bounded in n", "alpha-threshold", scan.verdicts[a], BOUNDED, "eq")
        elif a > 1:
            report.check(f"alpha = {a}: integrals grow with n", "alpha-threshold", scan.verdicts[a], GROWING, "eq")

    c = float(p + q)
    scaled = alpha_scan(p, q, [a / c for a in config.alphas], config.ns, config.mc, tilt=config.tilt, metric_scale=c)
    for i, a in enumerate(scaled.alphas):
        for j, n in enumerate(scaled.ns):
            rows.append((c, a, n, scaled.means[i, j], scaled.stderrs[i, j], scaled.verdicts[a]))
    same = [scan.verdicts[a] for a in scan.alphas] == [scaled.verdicts[a] for a in scaled.alphas]
    report.check("verdicts for (c g, alpha / c) match those for (g, alpha)", "normalized-threshold", same, None)
    if scaled.threshold_bracket is not None:
        lo, hi = scaled.threshold_bracket
        report.check("1/(p+q) lies in the bracket for c = p+q (lower end)", "normalized-threshold", lo, 1.0 / c, "lt")
        report.check("1/(p+q) lies in the bracket for c = p+q (upper end)", "normalized-threshold", hi, 1.0 / c, "gt")

    check_extremal_family(report)
    check_admissibility(report, config)
    if p <= q:
        wit = upper_bound_witness(p, q, config.mc, tilt=config.tilt)
        report.check("integral of exp(-phi_n) nondecreasing in n", "upper-bound", wit["monotone"], None)
        tf = wit["truncated_F_integrals"]
        report.check("truncated integrals of F grow (last / first)", "upper-bound", tf[-1] / tf[0], 10.0, "ge")
        report.check("disjoint-chart identity residual (max rel err)", "upper-bound", wit["disjoint_chart_residual_max"], 1e-8)
    report.rows(["metric_scale", "alpha", "n", "estimate", "stderr", "verdict"], rows)
    return report


def slope_windows(values, Ts):
    """Slopes in ``log T`` over ``Ts[:-1]`` and ``Ts[1:]`` (for decades 1e2..1e5: two windows of two decades)."""
    return log_growth_slope(values[:-1], Ts[:-1]), log_growth_slope(values[1:], Ts[1:])


def cmd_divergence(config):
    report = new_report("divergence", config)
    d, r = config.n_dim, config.radius
    rows = []
    ests = []
    for k, T in enumerate(config.Ts):
        est = truncated_singular_integral(d, T, r, config.mc.derive("truncated", k))
        ests.append(est.mean)
        ref = np.pi * (1 + np.log(r * r * T)) if d == 1 else float("nan")
        rows.append(("truncated", T, est.mean, est.stderr, ref))
        if d == 1:
            report.check(f"truncated integral at T = {T:g} vs pi (1 + log T)", "singular-integral", abs(est.mean - ref) / ref, 0.02)
    if len(config.Ts) >= 2:
        slope = log_growth_slope(ests, config.Ts)
        report.check("slope of the truncated integral in log T", "singular-integral", slope, 0.0, "gt")
    if len(config.Ts) >= 3:
        s1, s2 = slope_windows(ests, config.Ts)
        report.check("slope stability across shifted windows (rel diff)", "singular-integral", abs(s1 - s2) / max(abs(s1), abs(s2)), 0.3)
    if d == 1:
        ref = 2 * np.pi * np.log(2)
        for k in range(4):
            est = shell_integral(1, k, r, config.mc.derive("shell", k))
            rows.append((f"shell-{k}", "", est.mean, est.stderr, ref))
            report.check(f"dyadic shell {k} vs 2 pi log 2 (rel err)", "dyadic-shells", abs(est.mean - ref) / ref, 0.02)
    report.rows(["kind", "T", "estimate", "stderr", "reference"], rows)
    return report


def cmd_pullback(config):
    p, q = config.p, config.q
    if p > q:
        raise ValueError("the embedding needs p <= q; run with p and q swapped")
    report = new_report("pullback", config)
    rng = config.rng("pullback")
    rows, res = [], []
    for k in range(config.points):
        w = WParam.zeros(p, q) if p == q == 1 else WParam.from_vector(p, q, 0.7 * standard_complex_normal(rng, p * (q - 1)))
        mu = 0.8 * standard_complex_normal(rng, p)
        r = pullback_residual(w, mu)
        res.append(r)
        rows.append(("pullback", k, r))
    tol = 1e-8 if p == q == 1 else 1e-5
    report.check("pullback decomposition residual (max)", "pullback-decomposition", max(res), tol)

    d = p * (q - 1)
    worst = np.inf
    for k in range(10_000):
        w = WParam.from_vector(p, q, 2.0 * rng.standard_normal() * standard_complex_normal(rng, d))
        mu = 2.0 * rng.standard_normal() * standard_complex_normal(rng, p)
        alpha = rng.uniform(0.0, 1.0)
        kappa = rng.uniform(0.01, 5.0)
        s = fiber_inequality_slacks(w, mu, alpha, kappa)
        worst = min(worst, float(np.min(s["per_factor"])), s["w_bound"], s["combined"])
    report.check("fibre inequalities (min slack)", "fibre-inequalities", worst, -1e-12, "ge")

    kappa = config.kappa if config.kappa is not None else d + 1.0
    est = w_tail_integral(kappa, d)
    if kappa > d:
        ref = float(np.pi**d * np.exp(special.gammaln(kappa - d) - special.gammaln(kappa))) if d else 1.0
        report.check(f"w-tail integral at kappa = {kappa:g}, d = {d} (rel err)", "w-tail-convergence", abs(est.mean - ref) / ref, 1e-6)
    else:
        ref = float("inf")
        report.check(f"w-tail integral flagged divergent at kappa = {kappa:g}, d = {d}", "w-tail-convergence", est.divergent, None)
    rows.append(("w-tail", kappa, est.mean))
    report.check("w-tail integral flagged divergent at kappa = d", "w-tail-convergence", w_tail_integral(float(d), d).divergent or d == 0, None)

    check_product_extension(report, config, rows)
    report.rows(["kind", "index", "value"], rows)
    return report


def check_product_extension(report, config, rows):
    """Product P1 x P1: slice admissibility and the integral factorisation."""
    rng = config.rng("product")
    fam = ExtremalFamily((0,), 4, "smooth")

    def phi(z):
        z = np.asarray(z, dtype=complex)
        return fam(chart_rep((0,), z.reshape(z.shape[:-1] + (1, 1))))

    g = product_metric((grassmann_factor_metric(1, 1), 1), (grassmann_factor_metric(1, 1), 1))
    psi_ext = product_extension(phi, 1)
    margin = min(product_admissibility_eigenvalue(g, psi_ext, 0.8 * standard_complex_normal(rng, 2)) for _ in range(50))
    report.check("product extension admissible (min eigenvalue)", "product-extension", margin, 0.0, "gt")

    mc = config.mc.derive("product")
    one = mc_integral(1.0, ExtremalFamily((0,), 4), 1, 1, mc)
    vol2 = total_volume(1, 1, mc.derive("second"))
    prod = _product_integral(mc, ExtremalFamily((0,), 4))
    expected = vol2.mean * one.mean
    err = np.hypot(prod.stderr, np.hypot(vol2.mean * one.stderr, one.mean * vol2.stderr))
    report.check("product integral factorises (|diff| / 3 stderr)", "product-extension", abs(prod.mean - expected) / (3 * err), 1.0)
    rows.append(("product-integral", 0, prod.mean))
    rows.append(("factor-product", 0, expected))


def _product_integral(config, fam):
    """``int_{P1 x P1} exp(-phi(m1))`` with independent proposals on both factors."""
    def draw(rng, n):
        z, l1 = heavy_tailed_coordinates(rng, (n, 2))
        dens = np.exp(-2 * np.log1p(np.abs(z) ** 2).sum(axis=1))
        prop = np.exp(-2 * l1.sum(axis=1)) / np.pi**2
        vals = np.exp(-fam(chart_rep((0,), z[:, :1].reshape(n, 1, 1))))
        return vals * dens / prop

    return estimate_mean(draw, config.derive("product-integral"))


SUITES = {
    "verify": cmd_verify,
    "einstein": cmd_einstein,
    "volume": cmd_volume,
    "alpha-scan": cmd_alpha_scan,
    "divergence": cmd_divergence,
    "pullback": cmd_pullback,
}


def run(command, config):
    """Run one command; the report's ``timing`` field holds the wall-clock seconds."""
    t0 = time.perf_counter()
    report = SUITES[command](config)
    report.timing = {"seconds": round(time.perf_counter() - t0, 3)}
    return report
