"""Command-line interface: ``rhdeform <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .deform import simple_deformation
from .errors import ConditionTwoViolated, InvalidParameter, RHDeformError, SolverError
from .graph import Rectangle
from .lensing import lensing_deformation
from .pipeline import PipelineConfig, run_pipeline, solve_contour, stationary_points, sweep
from .render import figure_svg, stage_title
from .rhp import RHProblem, painleve2_rhp, relative_strength
from .simplify import simplify_contour

EXIT_INVALID = 2
EXIT_CONDITION_II = 3
EXIT_SOLVER = 4


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (complex, np.complexfloating)):
        return [float(o.real), float(o.imag)]
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=1, default=_jsonable) + "\n")


def _config(args) -> PipelineConfig:
    return PipelineConfig(nx=args.nx, ny=args.ny, threshold=args.threshold, lensing_steps=args.lensing_steps,
                          simplify=not args.no_simplify, tau=args.tau, n_per_arc=args.n_per_arc,
                          improve=not args.no_improve)


def _load(path: str) -> RHProblem:
    try:
        return RHProblem.from_json(Path(path).read_text())
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InvalidParameter(f"cannot read problem {path}: {exc}") from exc


def _problem(args) -> RHProblem:
    if getattr(args, "problem", None):
        return _load(args.problem)
    return painleve2_rhp(args.x, complex(args.s1), complex(args.s2))


def _marks(rhp: RHProblem) -> list[complex]:
    if rhp.meta.get("problem") == "painleve2":
        return stationary_points(float(rhp.meta["x"]))
    return []


def _rect(rhp: RHProblem) -> Rectangle:
    if "rect" not in rhp.meta:
        raise InvalidParameter("contour has no rectangle; run deform first")
    return Rectangle(*rhp.meta["rect"])


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_figure(out: Path, panels: list[dict], rect: Rectangle, grid, marks) -> None:
    (out / "figure.svg").write_text(figure_svg(panels, rect, grid, marks))


# subcommands ---------------------------------------------------------------


def cmd_painleve2(args) -> int:
    out = _out(args)
    rhp = painleve2_rhp(args.x, complex(args.s1), complex(args.s2))
    (out / "problem.json").write_text(rhp.to_json() + "\n")
    if args.problem_only:
        return 0
    res = run_pipeline(rhp, _config(args))
    final = res.final.rhp
    (out / "contour.json").write_text(final.to_json() + "\n")
    dump_json(res.trace, out / "trace.json")
    rect = _rect(res.stages[1].rhp)
    panels = [{"rhp": s.rhp, "title": stage_title(s.name, s.kappa)} for s in res.stages[:4]]
    _write_figure(out, panels, rect, None, _marks(rhp))
    print(json.dumps(res.trace["stages"], sort_keys=True, default=_jsonable))
    return 0


def cmd_deform(args) -> int:
    out = _out(args)
    cfg = _config(args)
    rhp = _problem(args)
    (out / "problem.json").write_text(rhp.to_json() + "\n")
    res = simple_deformation(rhp, cfg.deform_config())
    (out / "contour.json").write_text(res.rhp.to_json() + "\n")
    report = {"weight_before": relative_strength(rhp, threshold=cfg.threshold),
              "weight_after": relative_strength(res.rhp, threshold=cfg.threshold)}
    if not args.no_solve:
        report["kappa_before"] = solve_contour(rhp, cfg.n_per_arc, cfg.threshold, None).kappa
        report["kappa_after"] = solve_contour(res.rhp, cfg.n_per_arc, cfg.threshold, None).kappa
    dump_json({"deform": res.trace, "report": report}, out / "trace.json")
    _write_figure(out, [{"rhp": rhp, "title": "original"}, {"rhp": res.rhp, "title": "deformed"}],
                  res.rect, (cfg.nx, cfg.ny), _marks(rhp))
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_lense(args) -> int:
    out = _out(args)
    cfg = _config(args)
    cur = _load(args.contour)
    rect = _rect(cur)
    trace = []
    panels = [{"rhp": cur, "title": "input"}]
    for k in range(args.steps):
        lens = lensing_deformation(cur, cfg.deform_config(), rect)
        trace.append({"chosen": lens.chosen, "variants": lens.variants})
        cur = lens.rhp
        panels.append({"rhp": cur, "title": f"lensing step {k + 1}: {lens.chosen}"})
    (out / "contour.json").write_text(cur.to_json() + "\n")
    dump_json({"lensing": trace}, out / "trace.json")
    _write_figure(out, panels, rect, None, _marks(cur))
    print(json.dumps({"weight": relative_strength(cur, threshold=cfg.threshold)}, sort_keys=True))
    return 0


def cmd_simplify(args) -> int:
    out = _out(args)
    cur = _load(args.contour)
    simp, records = simplify_contour(cur, args.tau)
    (out / "contour.json").write_text(simp.to_json() + "\n")
    dump_json({"simplify": [{"arc": r.source, "breakpoints": len(r.breakpoints), "weight_before": r.weight_before,
                             "weight_after": r.weight_after} for r in records],
               "breakpoints": simp.meta["breakpoints"]}, out / "trace.json")
    if "rect" in cur.meta:
        _write_figure(out, [{"rhp": cur, "title": "input"}, {"rhp": simp, "title": "simplified"}],
                      _rect(cur), None, _marks(cur))
    print(json.dumps(simp.meta["breakpoints"], sort_keys=True))
    return 0


def cmd_solve(args) -> int:
    rhp = _load(args.contour)
    rep = solve_contour(rhp, args.n_per_arc, args.threshold, args.cond_limit)
    text = json.dumps(rep.to_dict(), sort_keys=True, indent=1)
    if args.out:
        out = _out(args)
        (out / "solve.json").write_text(text + "\n")
    print(text)
    return 0


def cmd_sweep(args) -> int:
    out = _out(args)
    if args.step <= 0:
        raise InvalidParameter("step must be positive")
    n = int(np.floor((args.x_max - args.x_min) / args.step + 1e-9)) + 1 if args.x_max >= args.x_min else 0
    xs = [args.x_min + k * args.step for k in range(n)]
    rows = sweep(xs, complex(args.s1), complex(args.s2), _config(args), jobs=args.jobs)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "kappa_original", "original_overflow", "kappa_deformed"])
        for r in rows:
            w.writerow([repr(r["x"]), repr(r["kappa_original"]), r["original_overflow"], repr(r["kappa_deformed"])])
    print(f"{len(rows)} rows written to {out / 'sweep.csv'}")
    return 0


def cmd_render(args) -> int:
    problems = [_load(p) for p in args.contours]
    rect = None
    for p in problems:
        if "rect" in p.meta:
            rect = Rectangle(*p.meta["rect"])
            break
    if rect is None:
        rect = Rectangle(-args.extent, args.extent, -args.extent, args.extent)
    panels = [{"rhp": p, "title": Path(name).stem} for p, name in zip(problems, args.contours)]
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    Path(args.output).write_text(figure_svg(panels, rect, None, _marks(problems[0])))
    return 0


# parser --------------------------------------------------------------------


def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nx", type=int, default=17)
    p.add_argument("--ny", type=int, default=17)
    p.add_argument("--threshold", type=float, default=1e-16)
    p.add_argument("--lensing-steps", type=int, default=2)
    p.add_argument("--no-simplify", action="store_true")
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--n-per-arc", type=int, default=20)
    p.add_argument("--no-improve", action="store_true", help="skip shared-subpath improvement")


def _add_stokes(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--x", type=float, required=required, default=None if required else -10.0)
    p.add_argument("--s1", default="1", help="complex, e.g. 1 or 0.5+1j")
    p.add_argument("--s2", default="2")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rhdeform", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("painleve2", help="build the Painleve II problem and run the full pipeline")
    _add_stokes(p, True)
    _add_config(p)
    p.add_argument("--problem-only", action="store_true", help="only write problem.json")
    p.add_argument("-o", "--out", default="out")
    p.set_defaults(func=cmd_painleve2)

    p = sub.add_parser("deform", help="shortest-path deformation of a problem")
    p.add_argument("--problem", help="problem JSON; default is the built-in Painleve II problem")
    _add_stokes(p, False)
    _add_config(p)
    p.add_argument("--no-solve", action="store_true", help="skip the condition numbers")
    p.add_argument("-o", "--out", default="out")
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("lense", help="lensing steps on a deformed contour")
    p.add_argument("contour")
    p.add_argument("--steps", type=int, default=1)
    _add_config(p)
    p.add_argument("-o", "--out", default="out")
    p.set_defaults(func=cmd_lense)

    p = sub.add_parser("simplify", help="coarse re-approximation of a contour")
    p.add_argument("contour")
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("-o", "--out", default="out")
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("solve", help="collocation solve on a contour")
    p.add_argument("contour")
    p.add_argument("--n-per-arc", type=int, default=20)
    p.add_argument("--threshold", type=float, default=1e-16)
    p.add_argument("--cond-limit", type=float, default=1e15)
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="condition numbers over a range of x")
    p.add_argument("--x-min", type=float, default=-30.0)
    p.add_argument("--x-max", type=float, default=-10.0)
    p.add_argument("--step", type=float, default=2.0)
    p.add_argument("--s1", default="1")
    p.add_argument("--s2", default="2")
    p.add_argument("--jobs", type=int, default=1)
    _add_config(p)
    p.add_argument("-o", "--out", default="out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("render", help="draw contours as an SVG figure")
    p.add_argument("contours", nargs="+")
    p.add_argument("--extent", type=float, default=4.0, help="half-width of the view without a stored rectangle")
    p.add_argument("-o", "--output", default="figure.svg")
    p.set_defaults(func=cmd_render)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args) or 0)
    except ConditionTwoViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITION_II
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InvalidParameter, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RHDeformError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
