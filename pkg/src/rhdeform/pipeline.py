"""End-to-end preconditioning: deform, lense, simplify, solve."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import collocation
from .deform import DeformConfig, simple_deformation
from .errors import InvalidParameter, NoDecay, SolverError
from .lensing import lensing_deformation
from .rhp import Arc, RHProblem, decay_radius, frobenius_weight, painleve2_rhp, relative_strength
from .simplify import simplify_contour

KAPPA_SENTINEL = 1e16


@dataclass
class PipelineConfig:
    nx: int = 17
    ny: int = 17
    threshold: float = 1e-16
    lensing_steps: int = 2
    simplify: bool = True
    tau: float = 0.5
    eps_abs: float = 1e-12
    n_per_arc: int = 20
    improve: bool = True

    def __post_init__(self):
        for name in ("nx", "ny", "n_per_arc"):
            if int(getattr(self, name)) < 2:
                raise InvalidParameter(f"{name} must be at least 2")
        if not self.threshold > 0 or not self.tau > 0:
            raise InvalidParameter("threshold and tau must be positive")
        if self.lensing_steps < 0:
            raise InvalidParameter("lensing_steps must be nonnegative")

    def deform_config(self) -> DeformConfig:
        return DeformConfig(nx=self.nx, ny=self.ny, threshold=self.threshold, improve=self.improve)


@dataclass
class SolveReport:
    u: complex
    kappa: float
    residual: float
    residue: np.ndarray
    n_per_arc: int
    n_unknowns: int

    def to_dict(self) -> dict:
        return {
            "u": [self.u.real, self.u.imag],
            "kappa": self.kappa,
            "residual": self.residual,
            "residue": [[[z.real, z.imag] for z in row] for row in self.residue],
            "n_per_arc": self.n_per_arc,
            "n_unknowns": self.n_unknowns,
        }


@dataclass
class Stage:
    name: str
    rhp: RHProblem
    weight: float
    kappa: float | None = None
    u: complex | None = None
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        out = {"name": self.name, "weight": self.weight, "breakpoints": self.rhp.breakpoint_count(),
               "arcs": len(self.rhp.arcs)}
        if self.kappa is not None:
            out["kappa"] = self.kappa
        if self.u is not None:
            out["u"] = [self.u.real, self.u.imag]
        out.update(self.extra)
        return out


@dataclass
class PipelineResult:
    stages: list[Stage]
    trace: dict

    @property
    def final(self) -> Stage:
        return self.stages[-1]

    def stage(self, name: str) -> Stage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)


def finite_contour(rhp: RHProblem, threshold: float = 1e-16) -> RHProblem:
    """Cut rays where their jumps become negligible and drop negligible pieces."""
    arcs = []
    for arc in rhp.arcs:
        if arc.ray_angle is None:
            arcs.append(arc)
            continue
        R = max(decay_radius(arc, frobenius_weight, threshold), 1e-3)
        arcs.append(Arc(arc.clipped(R), arc.jump, None, arc.label))
    return collocation.truncate_negligible(RHProblem(arcs, dict(rhp.meta)), threshold)


def solve_contour(rhp: RHProblem, n_per_arc: int = 20, threshold: float = 1e-16,
                  cond_limit: float | None = 1e15) -> SolveReport:
    """Assemble, measure and solve on a contour (rays are cut first)."""
    contour = finite_contour(rhp, threshold)
    if not contour.arcs:
        # no jump left: Phi = I exactly
        return SolveReport(0j, 1.0, 0.0, np.zeros((rhp.m, rhp.m), dtype=complex), n_per_arc, 0)
    system = collocation.assemble(contour, n_per_arc)
    kappa = collocation.condition_number(system)
    if cond_limit is not None and kappa > cond_limit:
        raise collocation.IllConditioned(f"condition number {kappa:.3e} exceeds {cond_limit:.3e}")
    sol = collocation.solve(system, cond_limit=None)
    return SolveReport(sol.u_painleve2(), kappa, collocation.residual_norm(sol), sol.residue, n_per_arc,
                       system.A.shape[0])


def kappa_of(rhp: RHProblem, n_per_arc: int = 20, threshold: float = 1e-16) -> float:
    contour = finite_contour(rhp, threshold)
    if not contour.arcs:
        return 1.0
    return collocation.condition_number(collocation.assemble(contour, n_per_arc))


def run_pipeline(rhp: RHProblem, cfg: PipelineConfig | None = None, measure: bool = True) -> PipelineResult:
    """Original, deformed, lensed and simplified contours with their weights and conditioning."""
    cfg = cfg or PipelineConfig()
    dcfg = cfg.deform_config()
    trace: dict = {"config": asdict(cfg)}

    def stage(name, problem, **extra):
        st = Stage(name, problem, relative_strength(problem, threshold=cfg.threshold), extra=extra)
        if measure:
            try:
                rep = solve_contour(problem, cfg.n_per_arc, cfg.threshold, cond_limit=None)
                st.kappa, st.u = rep.kappa, rep.u
            except (SolverError, NoDecay) as exc:
                st.extra["solve_error"] = str(exc)
        return st

    stages = [stage("original", rhp)]
    res = simple_deformation(rhp, dcfg)
    trace["deform"] = res.trace
    stages.append(stage("deformed", res.rhp))
    rect = res.rect
    cur = res.rhp
    trace["lensing"] = []
    for k in range(cfg.lensing_steps):
        lens = lensing_deformation(cur, dcfg, rect)
        trace["lensing"].append({"chosen": lens.chosen, "variants": lens.variants})
        cur = lens.rhp
        stages.append(stage(f"lensed{k + 1}", cur, factorization=lens.chosen))
    if cfg.simplify:
        simp, records = simplify_contour(cur, cfg.tau, cfg.eps_abs)
        trace["simplify"] = [
            {"arc": r.source, "breakpoints": len(r.breakpoints), "weight_before": r.weight_before,
             "weight_after": r.weight_after}
            for r in records
        ]
        stages.append(stage("simplified", simp))
    trace["stages"] = [s.summary() for s in stages]
    return PipelineResult(stages, trace)


def painleve2_pipeline(x: float, s1: complex, s2: complex, cfg: PipelineConfig | None = None,
                       measure: bool = True) -> PipelineResult:
    return run_pipeline(painleve2_rhp(x, s1, s2), cfg, measure)


def painleve2_value(x: float, s1: complex, s2: complex, cfg: PipelineConfig | None = None) -> tuple[complex, float]:
    """``u(x; s1, s2)`` on the preconditioned contour with an n-refinement error estimate."""
    cfg = cfg or PipelineConfig()
    res = painleve2_pipeline(x, s1, s2, cfg, measure=False)
    contour = res.final.rhp
    a = solve_contour(contour, cfg.n_per_arc, cfg.threshold).u
    b = solve_contour(contour, 2 * cfg.n_per_arc, cfg.threshold).u
    return b, abs(b - a)


def _sweep_point(args) -> dict:
    x, s1, s2, cfg = args
    row = {"x": float(x)}
    try:
        k0 = kappa_of(painleve2_rhp(x, s1, s2), cfg.n_per_arc, cfg.threshold)
    except SolverError:
        k0 = float("inf")
    over = not np.isfinite(k0) or k0 >= KAPPA_SENTINEL
    row["kappa_original"] = KAPPA_SENTINEL if over else k0
    row["original_overflow"] = int(over)
    res = painleve2_pipeline(x, s1, s2, PipelineConfig(**{**asdict(cfg), "simplify": False}), measure=False)
    row["kappa_deformed"] = kappa_of(res.final.rhp, cfg.n_per_arc, cfg.threshold)
    return row


def sweep(xs, s1: complex = 1.0, s2: complex = 2.0, cfg: PipelineConfig | None = None, jobs: int = 1) -> list[dict]:
    """Condition numbers of the original and the deformed contour over a range of ``x``."""
    cfg = cfg or PipelineConfig()
    xs = [float(x) for x in xs]
    for x in xs:
        if not -40 <= x <= 10:
            raise InvalidParameter(f"x = {x} outside [-40, 10]")
    tasks = [(x, s1, s2, cfg) for x in xs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


def stationary_points(x: float) -> list[complex]:
    """Stationary points of the Painleve II phase, ``theta'(z) = 0``."""
    r = np.sqrt(complex(-x)) / 2
    return [complex(r), complex(-r)]


__all__ = [
    "KAPPA_SENTINEL",
    "PipelineConfig",
    "PipelineResult",
    "SolveReport",
    "Stage",
    "finite_contour",
    "kappa_of",
    "painleve2_pipeline",
    "painleve2_value",
    "run_pipeline",
    "solve_contour",
    "stationary_points",
    "sweep",
]
