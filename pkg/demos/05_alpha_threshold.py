"""Bounded below alpha = 1 and growing above it, for the extremal family phi_n.

Run with ``python demos/05_alpha_threshold.py``.
"""

from grassalpha.alpha import alpha_scan
from grassalpha.montecarlo import MCConfig

ns = [4, 8, 16, 32]
cfg = MCConfig(seed=0, samples=100_000, shards=4)
for p, q in [(1, 1), (1, 2), (2, 2)]:
    scan = alpha_scan(p, q, [0.6, 0.8, 0.95, 1.05, 1.2], ns, cfg)
    print(f"\nG({p},{q})   n = {ns}")
    for i, a in enumerate(scan.alphas):
        row = "  ".join(f"{v:10.4g}" for v in scan.means[i])
        print(f"  alpha {a:4.2f}: {row}   {scan.verdicts[a]}")
    print(f"  threshold bracket: {scan.threshold_bracket}")

    c = p + q
    scaled = alpha_scan(p, q, [0.8 / c, 1.2 / c], ns, cfg, metric_scale=c)
    lo, hi = scaled.threshold_bracket
    print(f"  metric scaled by {c}: bracket ({lo:.3f}, {hi:.3f}) around 1/{c}")
