"""Machine-readable reports: check records, JSON and CSV serialisation.

A report is a list of check records plus a config echo.  Each record names
the identity it exercises through a tag from :data:`CHECK_TAGS`; the
document ``docs/checks.md`` describes every tag.  Wall-clock timing lives in
a separate top-level ``timing`` field so that two runs of the same config
can be compared byte for byte once it is dropped.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

SCHEMA_VERSION = 1

CHECK_TAGS = {
    "cauchy-binet": "Gram determinant equals the sum of squared maximal minors",
    "chart-transition": "Jacobian of a chart transition equals |det alpha|^(-2(p+q))",
    "density-transform": "volume density transforms with the squared transition Jacobian",
    "unitary-invariance": "unitary maps preserve the invariant volume form",
    "disjoint-chart-identity": "F in one chart via the Gram determinant and a minor of a disjoint chart",
    "duality": "orthogonal complement is an involution G(p,q) -> G(q,p)",
    "metric-origin": "metric at the chart origin is the identity",
    "metric-closed-form": "closed-form metric agrees with the Hessian of the potential",
    "metric-determinant": "det g equals F^(-(p+q))",
    "einstein": "Ricci form equals (p+q) times the metric",
    "total-volume": "integral of the invariant density over one chart",
    "pullback-decomposition": "pullback of g along the embedding is i dd-bar log Phi plus Fubini-Study",
    "fibre-inequalities": "lower bounds on the Gram determinant of the embedding",
    "w-tail-convergence": "integral of (1+|w|^2)^(-kappa) converges iff kappa > d",
    "product-extension": "pullback of an admissible function to a product stays admissible",
    "extremal-family": "monotonicity, convexity and slope bounds of f_n",
    "admissibility": "g + i dd-bar phi_n is positive definite at sampled points",
    "alpha-threshold": "integrals of exp(-alpha phi_n) stay bounded below the threshold and blow up above it",
    "normalized-threshold": "rescaling the metric by c divides the threshold by c",
    "upper-bound": "integral of exp(-phi_n) increases towards the divergent integral of F",
    "singular-integral": "truncated integrals of |det X|^(-2) grow without bound",
    "dyadic-shells": "each dyadic shell of |z|^(-2) in one complex dimension contributes 2 pi log 2",
}

COMPARATORS = {
    "le": lambda v, t: v <= t,
    "ge": lambda v, t: v >= t,
    "lt": lambda v, t: v < t,
    "gt": lambda v, t: v > t,
    "eq": lambda v, t: v == t,
}


class UnknownTag(KeyError):
    pass


@dataclass
class Check:
    name: str
    tag: str
    value: object
    tolerance: object
    passed: bool
    comparison: str = "le"

    def as_dict(self):
        return {
            "name": self.name,
            "tag": self.tag,
            "value": _clean(self.value),
            "tolerance": _clean(self.tolerance),
            "comparison": self.comparison,
            "passed": bool(self.passed),
        }


@dataclass
class Report:
    command: str
    config: dict
    version: str
    overrides: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    table: list = field(default_factory=list)
    columns: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    def check(self, name, tag, value, tolerance, comparison="le"):
        """Record a check.  ``tolerance`` is replaced by an override for ``name`` if one was given."""
        if tag not in CHECK_TAGS:
            raise UnknownTag(tag)
        tol = self.overrides.get(name, tolerance)
        passed = bool(COMPARATORS[comparison](value, tol)) if tol is not None else bool(value)
        self.checks.append(Check(name, tag, value, tol, passed, comparison))
        return passed

    def rows(self, columns, rows):
        self.columns = list(columns)
        self.table.extend(list(r) for r in rows)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self, timing=True):
        d = {
            "schema_version": SCHEMA_VERSION,
            "artifact_version": self.version,
            "command": self.command,
            "config": _clean(self.config),
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }
        if timing:
            d["timing"] = _clean(self.timing)
        return d

    def to_json(self, timing=True):
        return json.dumps(self.as_dict(timing), indent=2, sort_keys=False) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.table:
            w.writerow([format_number(x) for x in row])
        return buf.getvalue()


def format_number(x):
    """17 significant digits for floats, plain text for everything else."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.17g}"
    return str(x)


def _clean(obj):
    """JSON-safe copy: tuples become lists, numpy scalars become Python, non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return format_number(obj)
    return str(obj)


def strip_timing(report_dict):
    return {k: v for k, v in report_dict.items() if k != "timing"}


def same_report(a, b):
    """Compare two report dicts (or JSON texts) with the timing field ignored."""
    if isinstance(a, str):
        a = json.loads(a)
    if isinstance(b, str):
        b = json.loads(b)
    return strip_timing(a) == strip_timing(b)
