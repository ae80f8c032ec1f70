"""Numerical experiments on the complex Grassmannian G(p, q).

Modules
-------
complex_core
    Determinants, minors, index sets, Gaussian and Haar samplers.
atlas
    Points, charts, transitions, the unitary action and duality.
metric
    Kähler potential, metric, volume density, Ricci form, admissibility.
embedding
    The embedding of a product of projective lines and its inequalities.
alpha
    The extremal family, Monte Carlo integrals and threshold scans.
montecarlo
    Seeded, sharded estimators.
reports, suites, cli
    Check records, command suites and the ``grassalpha`` command.
"""

from ._version import __version__
from .alpha import (
    BOUNDED,
    GROWING,
    INCONCLUSIVE,
    ExtremalFamily,
    ScanResult,
    alpha_scan,
    f_n,
    mc_integral,
    phi_n,
    psi,
    sample_grassmann,
    shell_integral,
    total_volume,
    truncated_singular_integral,
    upper_bound_witness,
    verdict,
)
from .atlas import (
    ChartCoordinates,
    GrassmannPoint,
    NotInChart,
    apply_unitary,
    best_chart,
    canonical_point,
    dual,
    from_chart,
    numerical_jacobian_det_sq,
    to_chart,
    transition,
    transition_jacobian_det_sq,
)
from .complex_core import (
    DimensionError,
    cauchy_binet_residual,
    det,
    enumerate_index_sets,
    is_positive_definite,
    minor,
    sample_ginibre,
    sample_haar_unitary,
)
from .embedding import WParam, phi_factor, pullback_residual, rho_tilde, w_tail_integral
from .metric import (
    CancellationError,
    F,
    det_metric,
    einstein_residual,
    hermitian_hessian,
    is_admissible,
    metric_closed_form,
    potential,
    ricci,
    volume_density,
)
from .montecarlo import DIVERGENT, IntegralEstimate, MCConfig

__all__ = [
    "__version__",
    "BOUNDED",
    "GROWING",
    "INCONCLUSIVE",
    "ExtremalFamily",
    "ScanResult",
    "alpha_scan",
    "f_n",
    "mc_integral",
    "phi_n",
    "psi",
    "sample_grassmann",
    "shell_integral",
    "total_volume",
    "truncated_singular_integral",
    "upper_bound_witness",
    "verdict",
    "ChartCoordinates",
    "GrassmannPoint",
    "NotInChart",
    "apply_unitary",
    "best_chart",
    "canonical_point",
    "dual",
    "from_chart",
    "numerical_jacobian_det_sq",
    "to_chart",
    "transition",
    "transition_jacobian_det_sq",
    "DimensionError",
    "cauchy_binet_residual",
    "det",
    "enumerate_index_sets",
    "is_positive_definite",
    "minor",
    "sample_ginibre",
    "sample_haar_unitary",
    "WParam",
    "phi_factor",
    "pullback_residual",
    "rho_tilde",
    "w_tail_integral",
    "CancellationError",
    "F",
    "det_metric",
    "einstein_residual",
    "hermitian_hessian",
    "is_admissible",
    "metric_closed_form",
    "potential",
    "ricci",
    "volume_density",
    "DIVERGENT",
    "IntegralEstimate",
    "MCConfig",
]
