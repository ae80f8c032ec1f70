"""Monte Carlo volume of a Grassmannian in one chart, against the closed form.

Run with ``python demos/03_volume.py``.
"""

from grassalpha.alpha import total_volume
from grassalpha.montecarlo import MCConfig
from grassalpha.suites import hua_volume

for p, q in [(1, 1), (1, 2), (2, 2)]:
    est = total_volume(p, q, MCConfig(seed=0, samples=400_000, shards=4))
    ref = hua_volume(p, q)
    print(f"G({p},{q}): {est.mean:.5f} +- {est.stderr:.5f}   closed form {ref:.5f}   rel err {abs(est.mean - ref) / ref:.2%}")
