"""Command-line entry point.

    randtrig run CONFIG [key=value ...]
    randtrig list-experiments

``run`` writes, into the configured output directory,

* ``<section>.csv`` per enabled experiment (``:`` in section names becomes ``_``),
* ``summary.json``: pass/fail per check plus headline numbers,
* ``manifest.json``: config echo, code version, seed, output paths, flags,
* ``timings.tsv``: wall-clock seconds per experiment.

Every CSV and JSON file is byte-identical between runs with the
same config, seed and code version.  Exit status: 0 if every enabled check
passes, 2 if a check fails or an experiment raises, 1 on configuration or
I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import OUTPUT_ENV, format_value, load_config
from .errors import ConfigurationError
from .registry import REGISTRY, list_experiments

log = logging.getLogger("randtrig")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def write_table(path: Path, columns, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])
    path.write_text(buf.getvalue())


def run(config_path, overrides=()) -> int:
    try:
        cfg = load_config(config_path, overrides)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"cannot create output directory {out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    summary, sections, timings = {}, {}, {}
    all_ok = True
    for sec in cfg.sections:
        echo = {k: format_value(v) for k, v in sorted(sec.params.items())}
        entry = {"kind": sec.kind, "enabled": sec.enabled, "seed": sec.seed, "params": echo}
        sections[sec.name] = entry
        if not sec.enabled:
            continue
        fname = sec.name.replace(":", "_") + ".csv"
        t0 = time.perf_counter()
        log.info("running %s", sec.name)
        try:
            res = REGISTRY[sec.kind].run(sec.params, sec.seed)
        except Exception as exc:  # numerical failure: recorded, run continues
            timings[sec.name] = time.perf_counter() - t0
            msg = f"{type(exc).__name__}: {exc}"
            log.error("%s failed: %s", sec.name, msg)
            entry.update(error=msg, passed=False, output=None)
            summary[sec.name] = {"passed": False, "error": msg, "checks": {}}
            all_ok = False
            continue
        timings[sec.name] = time.perf_counter() - t0
        try:
            write_table(out / fname, res.columns, res.rows)
        except OSError as exc:
            print(f"cannot write {out / fname}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        entry.update(passed=res.passed, output=fname, checks=dict(res.checks))
        summary[sec.name] = {"passed": res.passed, "checks": dict(res.checks), "summary": res.summary}
        all_ok &= res.passed
        log.info("%s: %s", sec.name, "pass" if res.passed else "FAIL")

    try:
        _dump_json(out / "summary.json", {"schema_version": SCHEMA_VERSION, "passed": all_ok, "experiments": summary})
        _dump_json(out / "manifest.json", {
            "schema_version": SCHEMA_VERSION,
            "code_version": __version__,
            "master_seed": cfg.seed,
            "config_file": Path(cfg.path).name,
            "config_text": Path(cfg.path).read_text(),
            # where outputs land does not affect them; keep the manifest location-free
            "overrides": [o for o in overrides if o.split("=", 1)[0].strip() != "output_dir"],
            "experiments": sections,
            "timings_file": "timings.tsv",
            "passed": all_ok,
        })
        (out / "timings.tsv").write_text("".join(f"{k}\t{v:.3f}\n" for k, v in timings.items()))
    except OSError as exc:
        print(f"cannot write outputs to {out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for name, s in summary.items():
        print(f"{'PASS' if s['passed'] else 'FAIL'}  {name}")
    return EXIT_OK if all_ok else EXIT_FAIL


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="randtrig", description=__doc__.split("\n\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    pr = sub.add_parser("run", help="run the experiments of a config file",
                        epilog=f"default output directory: ${OUTPUT_ENV}, else ./randtrig-out")
    pr.add_argument("config")
    pr.add_argument("overrides", nargs="*", metavar="key=value")
    sub.add_parser("list-experiments", help="list experiment kinds and default tolerances")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if args.command == "list-experiments":
        print(list_experiments())
        return EXIT_OK
    return run(args.config, args.overrides)


if __name__ == "__main__":
    sys.exit(main())
