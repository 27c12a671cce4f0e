"""Condition numbers of the original and the deformed contour for x in [-30, -10].

    python3 demos/condition_sweep.py [out_dir]
"""

import csv
import sys
from pathlib import Path

import numpy as np

from rhdeform.pipeline import sweep


def main(out: Path) -> None:
    rows = sweep(np.arange(-30.0, -9.0, 2.0))
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["x", "kappa_original", "original_overflow", "kappa_deformed"])
        w.writeheader()
        w.writerows(rows)
    print(f"{'x':>6} {'kappa original':>16} {'kappa deformed':>16}")
    for r in rows:
        flag = " (overflow)" if r["original_overflow"] else ""
        print(f"{r['x']:6.1f} {r['kappa_original']:16.3e} {r['kappa_deformed']:16.3e}{flag}")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out"))
