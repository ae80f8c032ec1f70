"""The ``grassalpha`` command.

Usage::

    grassalpha COMMAND [--p P] [--q Q] [--seed S] [--samples N] [--shards K]
                       [--out DIR] [--config FILE] [command options]

``--config`` names a flat ``key = value`` file (``#`` starts a comment);
flags given on the command line win over the file.  Keys of the form
``tolerance.<check name>`` override a check's tolerance.  Exit status is 0
when every check passes, 1 when some check fails and 2 for usage or
configuration errors.  ``grassalpha compare A.json B.json`` exits 0 iff the
two reports agree once their timing fields are dropped.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from .reports import same_report
from .suites import COMMANDS, RunConfig, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_INT_KEYS = {"p", "q", "seed", "samples", "shards", "points", "n_dim"}
_FLOAT_KEYS = {"kappa", "radius", "tilt"}
_LIST_KEYS = {"alphas": float, "ns": int, "Ts": float}
_BOOL_KEYS = {"fault_injection"}


class ConfigError(ValueError):
    pass


def _parse_list(text, kind):
    return tuple(kind(float(x)) if kind is int else kind(x) for x in text.replace(",", " ").split())


def _coerce(key, value):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _LIST_KEYS:
            return _parse_list(value, _LIST_KEYS[key])
        if key in _BOOL_KEYS:
            v = str(value).strip().lower()
            if v not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return v in ("true", "1", "yes")
        if key == "out":
            return str(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    raise ConfigError(f"unknown config key {key!r}")


def read_config_file(path):
    """Parse a flat ``key = value`` file into ``(settings, tolerance overrides)``."""
    settings, overrides = {}, {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("tolerance."):
            try:
                overrides[key[len("tolerance."):]] = float(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: tolerance must be a number") from exc
            continue
        key = key.replace("-", "_")
        settings[key] = _coerce(key, value)
    return settings, overrides


def build_parser():
    parser = argparse.ArgumentParser(prog="grassalpha", description="Numerical checks on complex Grassmannians.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--p", type=int)
        sp.add_argument("--q", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--shards", type=int)
        sp.add_argument("--out", help="directory for <command>.json and <command>.csv; JSON goes to stdout when omitted")
        sp.add_argument("--config", help="flat key = value file; flags win")
        sp.add_argument("--points", type=int, help="random points per identity check")
        sp.add_argument("--alphas", help="comma separated, e.g. 0.8,1.2")
        sp.add_argument("--ns", help="increasing n values, e.g. 4,8,16,32")
        sp.add_argument("--Ts", help="truncation levels, e.g. 1e2,1e3,1e4,1e5")
        sp.add_argument("--kappa", type=float)
        sp.add_argument("--n-dim", dest="n_dim", type=int, help="matrix size for the singular integral")
        sp.add_argument("--radius", type=float)
        sp.add_argument("--tilt", type=float)
        sp.add_argument("--fault-injection", dest="fault_injection", action="store_true", default=None,
                        help="flip the sign of the metric in the Einstein check")
        sp.add_argument("--no-timing", action="store_true", help="omit the timing field from the JSON report")
    cmp = sub.add_parser("compare", help="compare two reports, ignoring timing")
    cmp.add_argument("a")
    cmp.add_argument("b")
    return parser


def resolve_config(args):
    settings, overrides = ({}, {}) if not args.config else read_config_file(args.config)
    for key in ("p", "q", "seed", "samples", "shards", "out", "points", "kappa", "n_dim", "radius", "tilt", "fault_injection"):
        v = getattr(args, key)
        if v is not None:
            settings[key] = v
    for key in _LIST_KEYS:
        v = getattr(args, key)
        if v is not None:
            settings[key] = _coerce(key, v)
    try:
        return RunConfig(**settings, overrides=overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def write_report(report, out, timing=True):
    if out is None:
        sys.stdout.write(report.to_json(timing))
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{report.command}.json").write_text(report.to_json(timing))
    (d / f"{report.command}.csv").write_text(report.to_csv())


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "compare":
        try:
            a, b = Path(args.a).read_text(), Path(args.b).read_text()
            same = same_report(a, b)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print("identical" if same else "different")
        return EXIT_OK if same else EXIT_FAIL
    try:
        config = resolve_config(args)
        report = run(args.command, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_report(report, config.out, timing=not args.no_timing)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  [{c.tag}] {c.name}: {c.value}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
