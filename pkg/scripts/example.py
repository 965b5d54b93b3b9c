#!/usr/bin/env python3
"""End-to-end usage example for pyras.

Evaluates the three baseline policies on a region, prints their median
total utility and writes the metric files of each under an output
directory.

Usage:
    python example.py

Optional environment variables:
    PYRAS_CONFIG      Configuration file.  Defaults to the bundled region.
    PYRAS_EPISODES    Episodes per policy.  Defaults to 10.
    PYRAS_OUT_DIR     Output directory.     Defaults to ./example_out.
    PYRAS_LOG_LEVEL   DEBUG | INFO | WARNING | ERROR.  Defaults to INFO.
"""

import logging
import os
import sys
from pathlib import Path

from pyras import PyRas, RasError, emit_metrics

_POLICIES = ("random", "uniform", "proportional")


def main() -> int:
    level = os.environ.get("PYRAS_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    config = os.environ.get("PYRAS_CONFIG", "").strip()
    episodes = int(os.environ.get("PYRAS_EPISODES", "10"))
    out_dir = Path(os.environ.get("PYRAS_OUT_DIR", "example_out"))

    try:
        ras = PyRas.from_file(config) if config else PyRas()
        ras.set_log_level(level)
        print(
            f"Region: {ras.topology.num_servers} servers, "
            f"{ras.topology.num_msbs} MSBs, {ras.topology.num_racks} racks"
        )
        for name in _POLICIES:
            result = ras.evaluate(ras.build_policy(name), episodes=episodes)
            emit_metrics(result, out_dir / name)
            moved = sum(r.total("servers_moved") for r in result.episodes)
            print(
                f"{name:>12}: median {result.median:12.1f}  "
                f"servers moved {moved:6d}"
            )
    except RasError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    print(f"Metrics written to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
