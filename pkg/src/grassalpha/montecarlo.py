"""Seeded, sharded Monte Carlo plumbing.

Shard ``k`` of a run with seed ``s`` draws from ``SeedSequence([s, k])``;
partial sums are combined in shard order, so the result is the same
whether shards run serially or on a thread pool.  The pool size comes from
the ``GRASSALPHA_WORKERS`` environment variable (default 1).
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class MCConfig:
    seed: int = 0
    samples: int = 100_000
    shards: int = 1
    truncation: float | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.shards < 1:
            raise ValueError("shards must be >= 1")
        if self.truncation is not None and self.truncation <= 0:
            raise ValueError("truncation must be positive")

    def derive(self, *tags):
        """Config with a seed derived deterministically from this one and ``tags``."""
        ss = np.random.SeedSequence([self.seed, *[_tag_int(t) for t in tags]])
        return MCConfig(int(ss.generate_state(1, np.uint64)[0]), self.samples, self.shards, self.truncation)

    def with_samples(self, samples):
        return MCConfig(self.seed, samples, self.shards, self.truncation)


def _tag_int(tag):
    if isinstance(tag, (int, np.integer)):
        return int(tag)
    # stable across processes, unlike hash()
    return int.from_bytes(str(tag).encode(), "little") % (2**63)


@dataclass(frozen=True)
class IntegralEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int | None = None
    divergent: bool = False
    saturated: bool = False

    def as_dict(self):
        return asdict(self)

    def within(self, value, nsigma=3.0):
        return abs(self.mean - value) <= nsigma * self.stderr


DIVERGENT = IntegralEstimate(float("inf"), float("inf"), 0, divergent=True)


def shard_sizes(samples, shards):
    base, extra = divmod(samples, shards)
    return [base + (1 if k < extra else 0) for k in range(shards)]


def shard_rngs(config):
    return [np.random.default_rng(np.random.SeedSequence([config.seed, k])) for k in range(config.shards)]


def workers():
    try:
        return max(1, int(os.environ.get("GRASSALPHA_WORKERS", "1")))
    except ValueError:
        return 1


def run_sharded(draw, config):
    """Evaluate ``draw(rng, n)`` on every shard and pool the values.

    ``draw`` returns an array of per-sample values with shape ``(n, ...)``.
    Returns ``(sum, sum_of_squares, count)`` accumulated in shard order,
    reduced over the sample axis.
    """
    jobs = list(zip(shard_rngs(config), shard_sizes(config.samples, config.shards)))

    def one(job):
        rng, n = job
        if n == 0:
            return None
        v = np.asarray(draw(rng, n), dtype=float)
        with np.errstate(over="ignore"):
            return v.sum(axis=0), (v * v).sum(axis=0), v.shape[0]

    if workers() > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers()) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(j) for j in jobs]
    s = s2 = 0.0
    count = 0
    for part in parts:
        if part is None:
            continue
        s = s + part[0]
        s2 = s2 + part[1]
        count += part[2]
    return s, s2, count


def mean_and_stderr(s, s2, n):
    mean = s / n
    with np.errstate(over="ignore", invalid="ignore"):
        # saturated integrands overflow here; the stderr is then inf or nan
        var = np.maximum(s2 / n - mean**2, 0.0)
    return mean, np.sqrt(var / max(n - 1, 1))


def estimate_mean(draw, config, scale=1.0):
    """:class:`IntegralEstimate` of ``scale * E[draw]`` (scalar draws)."""
    s, s2, n = run_sharded(draw, config)
    m, se = mean_and_stderr(s, s2, n)
    return IntegralEstimate(float(scale * m), float(abs(scale) * se), n, config.seed)
