#!/usr/bin/env python3
"""Regenerate the bundled .mtx fixtures (deterministic stand-ins).

Run from the repo root:  python tools/make_fixtures.py [names...]

With no arguments, writes the fixtures bundled with the package (bcsstk02,
add32).  Pass registry names (or "all-default") to synthesize more, e.g. the
rest of the desk-scale strong-scaling subset into a custom fixtures dir via
--out.
"""

import argparse
from pathlib import Path

from xbarsim.io import REGISTRY, default_fixtures_dir, synthesize_registry_matrix, write_matrix_market

BUNDLED = ("bcsstk02", "add32")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(BUNDLED))
    ap.add_argument("--out", default=None, help="output directory (default: package data)")
    args = ap.parse_args()

    names = args.names
    if names == ["all-default"]:
        names = [e.name for e in REGISTRY.values() if e.default]
    out = Path(args.out) if args.out else default_fixtures_dir()
    out.mkdir(parents=True, exist_ok=True)
    for name in names:
        rec = synthesize_registry_matrix(name)
        dest = out / f"{name}.mtx"
        write_matrix_market(rec, dest)
        print(f"{name}: {rec.m} x {rec.n}, {rec.nnz_stored} stored entries -> {dest}")


if __name__ == "__main__":
    main()
