"""Driving the command line from Python and comparing two reports.

Run with ``python demos/07_cli_reports.py``.  The same commands work from a
shell, e.g. ``grassalpha verify --p 2 --q 2 --out out``.
"""

import json
import tempfile
from pathlib import Path

from grassalpha.cli import main

with tempfile.TemporaryDirectory() as tmp:
    a, b = Path(tmp, "a"), Path(tmp, "b")
    for out in (a, b):
        code = main(["verify", "--p", "2", "--q", "2", "--seed", "7", "--out", str(out)])
        print("exit status", code)
    report = json.loads((a / "verify.json").read_text())
    for rec in report["checks"][:5]:
        print(f"  {rec['tag']:>20}  {rec['name']}: {rec['value']}")
    print("first rows of verify.csv:")
    print("".join((a / "verify.csv").read_text().splitlines(keepends=True)[:3]))
    print("compare exit status", main(["compare", str(a / "verify.json"), str(b / "verify.json")]))
