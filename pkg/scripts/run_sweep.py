"""Sweep the source/target loss-weight grid and print the mean-accuracy pivot.

Usage: python scripts/run_sweep.py [--config FILE] [--out-dir DIR]
"""

import argparse

from edapt import default_config, emit_sweep, load_config, run_sweep

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--config", default=None, help="key = value config file")
parser.add_argument("--out-dir", default="reports", help="report directory")
args = parser.parse_args()

config = load_config(args.config) if args.config else default_config()
rows = run_sweep(config)
path = emit_sweep(rows, config, args.out_dir)

cs_values = sorted({cs for cs, _, _, _ in rows})
ct_values = sorted({ct for _, ct, _, _ in rows})
mean = {(cs, ct): m for cs, ct, m, _ in rows}
print("mean accuracy (rows: source weight, cols: target weight)")
print("cs\\ct " + " ".join(f"{ct:>8g}" for ct in ct_values))
for cs in cs_values:
    cells = " ".join(f"{mean[(cs, ct)]:8.4f}" for ct in ct_values)
    print(f"{cs:>5g} {cells}")
print(path)
