"""Preconditioning sequence for Painleve II at x = -10 with (s1, s2) = (1, 2).

Writes a four-panel SVG (original, deformed, two lensing steps) and prints
the weight and condition number of every stage.

    python3 demos/painleve2_figure.py [out_dir]
"""

import sys
from pathlib import Path

from rhdeform.graph import Rectangle
from rhdeform.pipeline import painleve2_pipeline, stationary_points
from rhdeform.render import figure_svg, stage_title


def main(out: Path) -> None:
    x = -10.0
    res = painleve2_pipeline(x, 1, 2)
    for s in res.stages:
        print(f"{s.name:>10}  weight {s.weight:10.4g}  kappa {s.kappa:10.4g}  "
              f"breakpoints {s.rhp.breakpoint_count():4d}  u = {s.u:.12g}")
    rect = Rectangle(*res.stage("deformed").rhp.meta["rect"])
    panels = [{"rhp": s.rhp, "title": stage_title(s.name, s.kappa)} for s in res.stages[:4]]
    out.mkdir(parents=True, exist_ok=True)
    (out / "painleve2_x-10.svg").write_text(figure_svg(panels, rect, (17, 17), stationary_points(x)))
    print(f"figure written to {out / 'painleve2_x-10.svg'}")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out"))
