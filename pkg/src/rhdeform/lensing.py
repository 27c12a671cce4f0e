"""Lensing: splitting a jump into factors and deforming the factors apart.

A contour part with jump ``G = F0 F1 ... Fk`` can be replaced by ``k + 1``
coincident parts carrying the factors, the rightmost carrying ``F0``.  The
copies are then deformed like any other parts, with the extra constraint
that their left-to-right order never changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .deform import DeformConfig, DeformationResult, contour_weight, simple_deformation
from .errors import NoEnclosingWalk, Unreachable
from .graph import (
    DualRay,
    GraphPath,
    PlanarGraph,
    Rectangle,
    WeightedPlanarGraph,
    build_grid_graph,
    dijkstra,
    homological_interior,
    path_in,
    tree_path,
)
from .rhp import Arc, FactorJump, Jump, RHProblem, factor_matrices, factorization_pivot

PIVOT_TOL = 1e-8
IDENTITY_TOL = 1e-14


@dataclass
class Factorization:
    """An ordered factorization ``G = factors[0] @ factors[1] @ ...``.

    ``factors[0]`` is placed rightmost on the contour, ``factors[-1]``
    leftmost.  Identity factors are dropped.
    """

    kind: str
    factors: list[Jump]
    pivot_min: float = float("inf")

    def product(self, z: np.ndarray) -> np.ndarray:
        out = None
        for F in self.factors:
            out = F(z) if out is None else out @ F(z)
        return out


def factorizations_2x2(G: Jump, points: np.ndarray, pivot_tol: float = PIVOT_TOL) -> list[Factorization]:
    """LDU (pivot ``G11``) and UDL (pivot ``G22``) factorizations that stay evaluable at ``points``."""
    points = np.asarray(points, dtype=complex)
    vals = G(points)
    out = []
    for kind in ("LDU", "UDL"):
        piv = np.abs(factorization_pivot(vals, kind))
        if not np.all(np.isfinite(piv)) or piv.min() < pivot_tol:
            continue
        mats = factor_matrices(vals, kind)
        factors = []
        for k, M in enumerate(mats):
            if np.max(np.abs(M - np.eye(2))) <= IDENTITY_TOL:
                continue
            factors.append(FactorJump(kind, k, G))
        out.append(Factorization(kind, factors, float(piv.min())))
    return out


# ---------------------------------------------------------------------------
# shortest walk enclosing a point of the split


def _base_weights(wg: WeightedPlanarGraph) -> np.ndarray:
    g = wg.graph
    w = np.zeros(len(g.embedding.edges))
    w[g.edge_base] = wg.weight
    return w


def _tree_crossings(pred: np.ndarray, pred_e: np.ndarray, ray: DualRay, reverse: bool) -> np.ndarray:
    """Signed ray crossings of every tree path (towards the root when ``reverse``)."""
    n = len(pred)
    k = np.zeros(n, dtype=int)
    known = pred < 0
    for v0 in range(n):
        chain = []
        v = v0
        while not known[v]:
            chain.append(v)
            v = int(pred[v])
        for v in reversed(chain):
            p = int(pred[v])
            step = ray.step(int(pred_e[v]), p)
            k[v] = k[p] + (-step if reverse else step)
            known[v] = True
    return k


def enclosing_walk_in(wg: WeightedPlanarGraph, sources, targets, ray: DualRay, k_target: int,
                      allowed: np.ndarray | None = None) -> GraphPath:
    """Minimal walk of the form ``tree(s, u) + uv + tree(v, t)`` crossing ``ray`` ``k_target`` times.

    Crossings are counted with sign; the walk with the right count closes with
    the fixed return curve to a loop of the requested winding number.  Ties are
    broken by the number of edges, then by ``(u, v)``.
    """
    g = wg.graph
    sources, targets = list(sources), list(targets)
    ds, ps, es = dijkstra(g, wg.weight, sources, allowed)
    dt, pt, et = dijkstra(g, wg.weight, targets, allowed)
    ks = _tree_crossings(ps, es, ray, reverse=False)
    kt = _tree_crossings(pt, et, ray, reverse=True)
    best = None
    U, V = [], []
    for l in range(g.n_edges):
        a, b = int(g.edges[l][0]), int(g.edges[l][1])
        U.extend((a, b))
        V.extend((b, a))
    U, V = np.array(U), np.array(V)
    L = np.repeat(np.arange(g.n_edges), 2)
    w = wg.weight[L]
    tot = ds[U] + w + dt[V]
    step = np.array([ray.step(int(l), int(u)) for l, u in zip(L, U)])
    k = ks[U] + step + kt[V]
    ok = np.isfinite(tot) & (k == k_target)
    if allowed is not None:
        ok &= allowed[U] & allowed[V]
    if not ok.any():
        raise NoEnclosingWalk("no walk achieves the required winding number")
    lo = float(tot[ok].min())
    for idx in np.flatnonzero(ok & (tot <= lo * (1 + 1e-9) + 1e-300)):
        u, v, l = int(U[idx]), int(V[idx]), int(L[idx])
        vs_a, es_a = tree_path(ps, es, u)
        vs_b, es_b = tree_path(pt, et, v)
        verts = tuple(vs_a + vs_b[::-1])
        edges = tuple(es_a + [l] + es_b[::-1])
        walk = GraphPath(verts, edges)
        weight = wg.path_weight(walk)
        key = (weight, len(edges), u, v)
        if best is None or key < best[0]:
            best = (key, GraphPath(verts, edges, weight))
    if best is None:
        raise NoEnclosingWalk("no walk achieves the required winding number")
    return best[1]


def enclosing_shortest_walk(wg: WeightedPlanarGraph, q: GraphPath, c: complex | None = None,
                            sign: int = 1, return_graph: bool = False):
    """Shortest walk ``p`` from ``q``'s start to its end in the graph split along ``q``
    such that ``p`` followed by the reverse of a bank of ``q`` winds ``sign`` times
    around a point of the split.

    With ``sign = +1`` the loop closes along the left bank, so ``p`` passes to the
    right of ``q``; with ``sign = -1`` it closes along the right bank.  Without
    ``c`` the point sits in the split itself, between the two banks; otherwise
    the winding is measured around the face containing ``c``.  Returns a walk in
    the split graph, together with that graph when ``return_graph`` is set.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g0 = wg.graph
    if q.vertices[0] == q.vertices[-1]:
        raise ValueError("q must have distinct endpoints")
    cid = "__q"
    gq = g0.with_crack(cid, q)
    base_w = _base_weights(wg)
    wq = WeightedPlanarGraph(gq, base_w[gq.edge_base])
    ray = DualRay.from_crack(gq, cid) if c is None else DualRay.from_point(gq, complex(c))
    left, right = gq.banks(cid)
    bank = left if sign == 1 else right
    k_target = sign + ray.walk(bank)
    walk = enclosing_walk_in(wq, [bank.vertices[0]], [bank.vertices[-1]], ray, k_target)
    return (walk, gq) if return_graph else walk


# ---------------------------------------------------------------------------
# Order-preserving paths for lensing families


def constrained_shortest_path(state, g: PlanarGraph, wg: WeightedPlanarGraph, i: int, src, dst,
                              allowed: np.ndarray) -> GraphPath:
    """Shortest path for family member ``i`` that keeps the family order.

    With no fixed sibling this is the plain shortest path.  With a fixed
    sibling only on one side, the path must pass on the correct side of it,
    which is expressed as a winding condition around the sibling's split.
    With fixed siblings on both sides, the search is restricted to the
    region between them.
    """
    parts = state.parts
    me = parts[i]
    fixed = [k for k in state.fixed if parts[k].family == me.family and k in g.cracks.paths]
    left = [k for k in fixed if parts[k].rank > me.rank]
    right = [k for k in fixed if parts[k].rank < me.rank]
    nl = min(left, key=lambda k: parts[k].rank) if left else None
    nr = max(right, key=lambda k: parts[k].rank) if right else None
    if nl is None and nr is None:
        return path_in(wg, src, dst, allowed)
    if nl is not None and nr is not None:
        _, lr = g.banks(nl)
        rl, _ = g.banks(nr)
        loop = GraphPath(lr.vertices[:-1] + rl.vertices[::-1], lr.edges + rl.edges[::-1])
        inside = homological_interior(loop, g) | set(lr.vertices) | set(rl.vertices)
        mask = np.zeros(g.n_vertices, dtype=bool)
        mask[list(inside)] = True
        return path_in(wg, src, dst, allowed & mask)
    q = nl if nl is not None else nr
    sign = 1 if nl is not None else -1
    ray = DualRay.from_crack(g, q)
    lb, rb = g.banks(q)
    bank = lb if sign == 1 else rb
    k_target = sign + ray.walk(bank)
    return enclosing_walk_in(wg, src, dst, ray, k_target, allowed)


# ---------------------------------------------------------------------------
# lensing driver


@dataclass
class LensingResult:
    rhp: RHProblem
    chosen: str
    variants: list[dict] = field(default_factory=list)
    deformation: DeformationResult | None = None


def _arc_weight(arc: Arc, cfg: DeformConfig) -> float:
    return contour_weight(RHProblem([arc]), cfg.weight)


def lensing_deformation(rhp: RHProblem, cfg: DeformConfig | None = None, rect: Rectangle | None = None,
                        kappa=None) -> LensingResult:
    """One lensing step: factor the heaviest arc and keep the lightest variant.

    ``rhp`` must consist of finite polylines, typically the output of
    :func:`simple_deformation`.  ``kappa`` is an optional callable used to add
    a conditioning estimate to each variant's trace entry.
    """
    cfg = cfg or DeformConfig()
    if rect is None and "rect" in rhp.meta:
        rect = Rectangle(*rhp.meta["rect"])
    if rect is None:
        raise ValueError("lensing needs the rectangle of the deformation")
    base = RHProblem(list(rhp.arcs), dict(rhp.meta))
    w_in = contour_weight(base, cfg.weight)
    if not rhp.arcs:
        return LensingResult(base, "baseline", [{"kind": "baseline", "weight": 0.0, "status": "ok", "chosen": True}])
    weights = [_arc_weight(a, cfg) for a in rhp.arcs]
    j = int(min(range(len(weights)), key=lambda k: (-weights[k], k)))
    grid = build_grid_graph(rect, cfg.nx, cfg.ny)
    variants = [{"kind": "baseline", "arc": j, "weight": w_in, "status": "ok"}]
    if kappa is not None:
        variants[0]["kappa"] = float(kappa(base))
    best = (w_in, "baseline", base, None)
    for fac in factorizations_2x2(rhp.arcs[j].jump, grid.positions):
        entry = {"kind": fac.kind, "arc": j, "factors": len(fac.factors), "pivot_min": fac.pivot_min}
        variants.append(entry)
        if len(fac.factors) < 2:
            entry["status"] = "skipped: trivial factorization"
            continue
        arcs = list(rhp.arcs[:j])
        members = []
        for k, F in enumerate(fac.factors):
            members.append(len(arcs))
            arcs.append(Arc(rhp.arcs[j].points.copy(), F, None, f"{rhp.arcs[j].label}/{fac.kind}{k}"))
        arcs.extend(rhp.arcs[j + 1:])
        # family members appear in order; indices of later arcs shift
        try:
            res = simple_deformation(RHProblem(arcs, dict(rhp.meta)), cfg, [members], rect)
        except (Unreachable, NoEnclosingWalk) as exc:
            entry["status"] = f"failed: {exc}"
            continue
        w = contour_weight(res.rhp, cfg.weight)
        entry.update(status="ok", weight=w)
        if kappa is not None:
            entry["kappa"] = float(kappa(res.rhp))
        if w < best[0]:
            best = (w, fac.kind, res.rhp, res)
    for v in variants:
        v["chosen"] = v["kind"] == best[1]
    out = best[2]
    out.meta = dict(rhp.meta)
    return LensingResult(out, best[1], variants, best[3])


__all__ = [
    "Factorization",
    "LensingResult",
    "constrained_shortest_path",
    "enclosing_shortest_walk",
    "enclosing_walk_in",
    "factorizations_2x2",
    "lensing_deformation",
]
