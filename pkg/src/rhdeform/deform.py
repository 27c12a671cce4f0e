"""Greedy contour deformation along shortest paths in a split grid graph.

Every arc of the problem is replaced by a path in a grid graph covering the
region where the jumps differ from the identity.  Paths are fixed one at a
time, heaviest first; once fixed, a path splits the graph so later paths can
run alongside it but never across it.  Paths that end up sharing edges are
merged into one arc whose jump is the ordered product of their jumps, and
the shared stretch is re-optimised for that product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionTwoViolated, InvalidParameter, NotSplittable, OnWalk, RecursionLimit, Unreachable
from .graph import (
    CrackSet,
    Embedding,
    GraphPath,
    PlanarGraph,
    Rectangle,
    WeightedPlanarGraph,
    base_edge_weights,
    bounding_rectangle,
    build_grid_graph,
    insert_crack,
    nearest_vertex,
    path_in,
    winding_number,
)
from .rhp import (
    Arc,
    IdentityJump,
    Jump,
    LocalWeight,
    RHProblem,
    frobenius_weight,
    simplify_product,
)


@dataclass
class DeformConfig:
    nx: int = 17
    ny: int = 17
    threshold: float = 1e-16
    weight: LocalWeight = frobenius_weight
    recursion_limit: int = 32
    improve: bool = True
    check_condition_ii: bool = True
    rect: Rectangle | None = None
    search_radius: float = 50.0


@dataclass
class Part:
    """One contour part being deformed."""

    jump: Jump
    points: np.ndarray  # original geometry, truncated to the rectangle
    start: int  # base vertex
    end: int
    key_start: tuple
    key_end: tuple
    label: str = ""
    family: int | None = None
    rank: int = 0  # position in the family, 0 = rightmost


@dataclass
class DeformationResult:
    rhp: RHProblem
    paths: dict
    parts: list
    embedding: Embedding
    rect: Rectangle
    trace: dict
    snapped: RHProblem
    cracks: CrackSet = field(repr=False, default=None)


def select_dominant(weights: dict) -> int:
    """Index with the largest weight; ties go to the lowest index."""
    if not weights:
        raise InvalidParameter("no candidates")
    return min(weights, key=lambda i: (-weights[i], i))


def contour_weight(rhp: RHProblem, w: LocalWeight = frobenius_weight) -> float:
    """Two-point trapezoidal weight summed over every polyline segment."""
    total = 0.0
    for arc in rhp.arcs:
        if arc.ray_angle is not None:
            raise InvalidParameter("contour_weight needs finite arcs")
        pts = arc.points
        if len(pts) < 2:
            continue
        vw = w(arc.jump(pts))
        total += float(np.sum(0.5 * np.abs(np.diff(pts)) * (vw[:-1] + vw[1:])))
    return total


def _angle_key(d: complex) -> float:
    return float(np.angle(d)) % (2 * np.pi)


def truncate_to_rectangle(arc: Arc, rect: Rectangle) -> np.ndarray:
    if arc.ray_angle is None:
        return arc.points.copy()
    tip = rect.ray_exit(complex(arc.points[-1]), arc.ray_angle)
    if abs(tip - arc.points[-1]) == 0:
        return arc.points.copy()
    return np.append(arc.points, tip)


def _segment_distance(z: np.ndarray, pts: np.ndarray) -> np.ndarray:
    best = np.full(z.shape, np.inf)
    for a, b in zip(pts[:-1], pts[1:]):
        d = b - a
        L2 = abs(d) ** 2
        s = np.clip(((z - a) * np.conj(d)).real / L2, 0, 1) if L2 > 0 else np.zeros(z.shape)
        best = np.minimum(best, np.abs(z - (a + s * d)))
    if len(pts) == 1:
        best = np.abs(z - pts[0])
    return best


def snap_polyline(g: PlanarGraph, pts: np.ndarray, start: int, end: int) -> GraphPath:
    """Graph path hugging a polyline between two snapped endpoints."""
    emb = g.embedding
    a, b = emb.edges[:, 0], emb.edges[:, 1]
    L = np.abs(emb.pos[b] - emb.pos[a])
    h = float(np.median(L))
    dist = _segment_distance(0.5 * (emb.pos[a] + emb.pos[b]), pts)
    w = L * (1.0 + 100.0 * (dist / h) ** 2)
    return path_in(WeightedPlanarGraph(g, w[g.edge_base]), [start], [end])


def check_condition_ii(original: np.ndarray, deformed: np.ndarray, others: list[complex]) -> None:
    """Raise if the loop ``original + reversed(deformed)`` winds around another endpoint."""
    loop = np.concatenate([original, deformed[::-1]])
    for c in others:
        try:
            k = winding_number(loop, c)
        except OnWalk:
            continue
        if k != 0:
            raise ConditionTwoViolated(f"deformation sweeps across endpoint {c}")


def drop_circles(seq: list) -> tuple[list, list[tuple[int, int]]]:
    """Remove repeated-vertex loops, first repeat first.  Returns kept items and dropped index ranges."""
    seq = list(seq)
    idx = list(range(len(seq)))
    dropped = []
    while True:
        seen = {}
        cut = None
        for k, v in enumerate(seq):
            if v in seen:
                cut = (seen[v], k)
                break
            seen[v] = k
        if cut is None:
            return seq, dropped
        i, j = cut
        dropped.append((idx[i], idx[j]))
        seq = seq[:i + 1] + seq[j + 1:]
        idx = idx[:i + 1] + idx[j + 1:]


class Deformer:
    """State of the greedy deformation: parts, fixed cracks and weight tables."""

    def __init__(self, parts: list[Part], graph: PlanarGraph, cfg: DeformConfig):
        self.parts = parts
        self.cfg = cfg
        self.base = graph
        self.emb = graph.embedding
        self.cracks = CrackSet()
        self.fixed: list[int] = []
        self._vw: dict[str, np.ndarray] = {}
        self.trace: dict = {"iterations": [], "improvements": [], "notes": []}
        ends = {}
        for i, p in enumerate(parts):
            ends.setdefault(p.start, set()).add(i)
            ends.setdefault(p.end, set()).add(i)
        self.endpoint_parts = ends

    # weights -----------------------------------------------------------------

    def vertex_weights(self, J: Jump) -> np.ndarray:
        k = J.key
        if k not in self._vw:
            self._vw[k] = self.cfg.weight(J(self.emb.pos))
        return self._vw[k]

    def base_weights(self, J: Jump) -> np.ndarray:
        return base_edge_weights(self.emb, self.vertex_weights(J))

    def weighted(self, g: PlanarGraph, J: Jump) -> WeightedPlanarGraph:
        return WeightedPlanarGraph(g, self.base_weights(J)[g.edge_base])

    def graph(self) -> PlanarGraph:
        return PlanarGraph(self.emb, self.cracks)

    # terminals -------------------------------------------------------------------

    def terminal_sectors(self, g: PlanarGraph, i: int, at_start: bool, exclude=()) -> list[int]:
        part = self.parts[i]
        v = part.start if at_start else part.end
        key = part.key_start if at_start else part.key_end
        occ = []
        for slot, cid in g.crack_slots(v):
            if cid in exclude or not isinstance(cid, int) or cid == i:
                continue
            other = self.parts[cid]
            path = g.cracks.paths[cid]
            if path[0] == v and other.start == v:
                occ.append((other.key_start, slot))
            elif path[-1] == v and other.end == v:
                occ.append((other.key_end, slot))
        if not occ:
            return g.sectors_between(v, None, None)
        occ.sort()
        below = [o for o in occ if o[0] < key]
        above = [o for o in occ if o[0] > key]
        pred = below[-1] if below else occ[-1]
        succ = above[0] if above else occ[0]
        return g.sectors_between(v, pred[1], succ[1])

    def allowed_mask(self, g: PlanarGraph, keep: set[int], own: set[int]) -> np.ndarray:
        """Vertices usable by a path: endpoints of other parts are excluded."""
        mask = np.ones(g.n_vertices, dtype=bool)
        for v in self.endpoint_parts:
            if v in own:
                continue
            mask[g.base_vertex == v] = False
        for v in own:
            mask[g.base_vertex == v] = False
        for v in keep:
            mask[v] = True
        return mask

    # candidates ------------------------------------------------------------------

    def candidate(self, g: PlanarGraph, i: int, exclude=()) -> GraphPath:
        part = self.parts[i]
        wg = self.weighted(g, part.jump)
        src = self.terminal_sectors(g, i, True, exclude)
        dst = self.terminal_sectors(g, i, False, exclude)
        allowed = self.allowed_mask(g, set(src) | set(dst), {part.start, part.end})
        if part.family is not None:
            from .lensing import constrained_shortest_path

            return constrained_shortest_path(self, g, wg, i, src, dst, allowed)
        return path_in(wg, src, dst, allowed)

    # main loop -------------------------------------------------------------------

    def run(self) -> None:
        n = len(self.parts)
        Q = list(range(n))
        while Q:
            g = self.graph()
            cands = {}
            for i in Q:
                if self.parts[i].start == self.parts[i].end:
                    cands[i] = GraphPath((int(self.parts[i].start),), (), 0.0)
                    continue
                cands[i] = self.candidate(g, i)
            weights = {i: cands[i].weight for i in Q}
            star = select_dominant(weights)
            self.trace["iterations"].append(
                {"candidates": {str(i): weights[i] for i in Q}, "chosen": star}
            )
            Q.remove(star)
            self.fix(g, star, cands[star])
            self.fixed.append(star)
            if self.cfg.improve:
                for i in list(self.fixed[:-1]):
                    self.improve(i, star)
        self.validate()

    def fix(self, g: PlanarGraph, i: int, walk: GraphPath) -> None:
        if len(walk.vertices) < 2:
            self.trace["notes"].append(f"part {i} collapsed to a single vertex")
            return
        base, pos = g.crack_insertion(walk)
        insert_crack(self.cracks, self.emb, i, base, pos)

    # shared subpaths -------------------------------------------------------------

    def shared_components(self, i1: int, i2: int) -> list[list[int]]:
        """Maximal runs of base edges carried by both cracks, on adjacent positions.

        Each run is returned as a base vertex sequence in the direction of ``i1``.
        """
        cr = self.cracks
        if i1 not in cr.paths or i2 not in cr.paths:
            return []
        p1 = cr.paths[i1]
        runs, cur = [], []
        for a, b in zip(p1[:-1], p1[1:]):
            e = self.emb.edge(a, b)
            lst = cr.lists[e]
            ok = i2 in lst and abs(lst.index(i1) - lst.index(i2)) == 1
            if ok:
                if not cur:
                    cur = [a]
                cur.append(b)
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        return runs

    def pair_weight(self, i1: int, i2: int) -> float:
        """Weight of two cracks, counting shared edges once with the product jump."""
        total = 0.0
        cr = self.cracks
        shared = {self.emb.edge(a, b) for run in self.shared_components(i1, i2) for a, b in zip(run[:-1], run[1:])}
        for i in (i1, i2):
            if i not in cr.paths:
                continue
            w = self.base_weights(self.parts[i].jump)
            for e in cr.edges_of(self.emb, i):
                if e not in shared:
                    total += w[e]
        for run in self.shared_components(i1, i2):
            J = self.combined_jump(i1, i2, run)
            w = self.base_weights(J)
            for a, b in zip(run[:-1], run[1:]):
                total += w[self.emb.edge(a, b)]
        return total

    def _sides(self, i1: int, i2: int, run: list[int]) -> tuple[bool, bool]:
        """(``i1`` is left of ``i2``, ``i2`` runs the same way) along ``run``."""
        e = self.emb.edge(run[0], run[1])
        lst = self.cracks.lists[e]
        fwd = self.emb.edges[e][0] == run[0]
        left = (lst.index(i1) < lst.index(i2)) == fwd
        p2 = self.cracks.paths[i2]
        k = p2.index(run[0])
        same = k + 1 < len(p2) and p2[k + 1] == run[1]
        return left, same

    def combined_jump(self, i1: int, i2: int, run: list[int]) -> Jump:
        left, same = self._sides(i1, i2, run)
        G1 = self.parts[i1].jump
        G2 = self.parts[i2].jump if same else self.parts[i2].jump.inverse()
        return simplify_product([G2, G1] if left else [G1, G2])

    def improve(self, i1: int, i2: int, depth: int = 0) -> None:
        runs = self.shared_components(i1, i2)
        if not runs:
            return
        if depth > self.cfg.recursion_limit:
            raise RecursionLimit(
                f"shared-subpath improvement of parts {i1}, {i2} did not settle",
                {"paths": {str(k): list(v) for k, v in self.cracks.paths.items()}, "depth": depth},
            )
        for run in runs:
            if run not in self.shared_components(i1, i2):
                continue
            snapshot = self.cracks.copy()
            before = self.pair_weight(i1, i2)
            record = {"parts": [i1, i2], "shared": list(run), "depth": depth}
            try:
                changed = self._improve_once(i1, i2, run)
                self.validate()
            except (Unreachable, NotSplittable) as exc:
                self.cracks = snapshot
                record["status"] = f"reverted: {exc}"
                self.trace["improvements"].append(record)
                continue
            after = self.pair_weight(i1, i2)
            if after > before * (1 + 1e-12) + 1e-300:
                self.cracks = snapshot
                record["status"] = "reverted: weight increased"
                record.update(before=before, after=after)
                self.trace["improvements"].append(record)
                continue
            record.update(status="applied", before=before, after=after, recomputed=changed)
            self.trace["improvements"].append(record)
            if changed is not None:
                new_runs = self.shared_components(i1, i2)
                if new_runs and new_runs != [run]:
                    self.improve(i1, i2, depth + 1)
                    return

    def _improve_once(self, i1: int, i2: int, run: list[int]):
        emb = self.emb
        cr = self.cracks
        J = self.combined_jump(i1, i2, run)
        left, same = self._sides(i1, i2, run)
        p1 = list(cr.paths[i1])
        p2 = list(cr.paths[i2])
        a = p1.index(run[0])
        b = a + len(run) - 1
        A, B = p1[:a + 1], p1[b:]
        if same:
            c = p2.index(run[0])
            C, D = p2[:c + 1], p2[c + len(run) - 1:]
        else:
            c = p2.index(run[-1])
            C, D = p2[:c + 1], p2[c + len(run) - 1:]
        e_first = emb.edge(run[0], run[1])
        e_last = emb.edge(run[-2], run[-1])
        j_first = min(cr.lists[e_first].index(i1), cr.lists[e_first].index(i2))
        j_last = min(cr.lists[e_last].index(i1), cr.lists[e_last].index(i2))

        # temporary graph: both cracks removed along the run, flanks kept in place
        tmp = cr.copy()
        run_edges = [emb.edge(x, y) for x, y in zip(run[:-1], run[1:])]
        for e in run_edges:
            tmp.lists[e].remove(i1)
            tmp.lists[e].remove(i2)
            if not tmp.lists[e]:
                del tmp.lists[e]
        flank_ids = {}
        for cid, pieces in ((i1, (A, B)), (i2, (C, D))):
            for k, piece in enumerate(pieces):
                fid = ("flank", cid, k)
                flank_ids[(cid, k)] = fid
                if len(piece) > 1:
                    for x, y in zip(piece[:-1], piece[1:]):
                        lst = tmp.lists[emb.edge(x, y)]
                        lst[lst.index(cid)] = fid
                    tmp.paths[fid] = tuple(piece)
            del tmp.paths[cid]
        g = PlanarGraph(emb, tmp)
        src = g.sector_of_lane(g.lane(e_first, j_first), run[0])
        dst = g.sector_of_lane(g.lane(e_last, j_last), run[-1])
        allowed = self.allowed_mask(g, {src, dst}, {run[0], run[-1]})
        star = path_in(self.weighted(g, J), [src], [dst], allowed)
        sbase, spos = g.crack_insertion(star)

        new1 = A[:-1] + sbase + B[1:]
        sb2 = sbase if same else sbase[::-1]
        new2 = C[:-1] + sb2 + D[1:]
        kept1, drop1 = drop_circles(new1)
        kept2, drop2 = drop_circles(new2)

        # rebuild the crack lists: flanks in place, the new shared stretch inserted
        out = tmp
        for cid, pieces in ((i1, (A, B)), (i2, (C, D))):
            for k in (0, 1):
                fid = flank_ids[(cid, k)]
                if fid in out.paths:
                    for x, y in zip(out.paths[fid][:-1], out.paths[fid][1:]):
                        lst = out.lists[emb.edge(x, y)]
                        lst[lst.index(fid)] = cid
                    del out.paths[fid]
        for x, y, j in zip(sbase[:-1], sbase[1:], spos):
            e = emb.edge(x, y)
            fwd = emb.edges[e][0] == x
            order = [i1, i2] if left == fwd else [i2, i1]
            lst = out.lists.setdefault(e, [])
            lst[j:j] = order
        out.paths[i1] = tuple(new1)
        out.paths[i2] = tuple(new2)
        for cid, new, kept, drops in ((i1, new1, kept1, drop1), (i2, new2, kept2, drop2)):
            if not drops:
                continue
            # remove one list entry per dropped step, walking the loops
            seq = list(new)
            for lo, hi in self._drop_ranges(seq):
                for x, y in zip(seq[lo:hi], seq[lo + 1:hi + 1]):
                    lst = out.lists[emb.edge(x, y)]
                    lst.remove(cid)
                    if not lst:
                        del out.lists[emb.edge(x, y)]
                seq = seq[:lo + 1] + seq[hi + 1:]
            out.paths[cid] = tuple(seq)
        self.cracks = out
        for cid in (i1, i2):
            p = out.paths[cid]
            es = [emb.edge(x, y) for x, y in zip(p[:-1], p[1:])]
            if len(set(es)) != len(es) or any(es.count(e) != out.lists.get(e, []).count(cid) for e in es):
                raise NotSplittable("inconsistent crack after improvement")
        changed = None
        if drop1:
            changed = i2
        elif drop2:
            changed = i1
        if changed is not None:
            self.recompute(changed)
        return changed

    @staticmethod
    def _drop_ranges(seq: list) -> list[tuple[int, int]]:
        out = []
        seq = list(seq)
        while True:
            seen = {}
            cut = None
            for k, v in enumerate(seq):
                if v in seen:
                    cut = (seen[v], k)
                    break
                seen[v] = k
            if cut is None:
                return out
            out.append(cut)
            seq = seq[:cut[0] + 1] + seq[cut[1] + 1:]

    def recompute(self, i: int) -> None:
        """Replace the fixed path of part ``i`` by its shortest path given all others."""
        self.cracks.remove(self.emb, i)
        g = self.graph()
        walk = self.candidate(g, i)
        self.fix(g, i, walk)

    # consistency -----------------------------------------------------------------

    def validate(self) -> None:
        """Check that no two cracks cross at any vertex."""
        g = self.graph()
        for v in range(self.emb.n):
            slots = g.crack_slots(v)
            if len(slots) < 3:
                continue
            where: dict = {}
            for k, (s, cid) in enumerate(slots):
                where.setdefault(cid, []).append(k)
            pairs = [tuple(x) for x in where.values() if len(x) == 2]
            for p in pairs:
                for q in pairs:
                    if p < q and (p[0] < q[0] < p[1]) != (p[0] < q[1] < p[1]):
                        raise NotSplittable(f"cracks cross at base vertex {v}")


# ---------------------------------------------------------------------------
# Assembly of the deformed problem


def map_to_rhp(emb: Embedding, cracks: CrackSet, parts: list[Part]) -> RHProblem:
    """Decompose the union of fixed paths into maximal runs with product jumps.

    A run covered by several paths gets the product of their jumps ordered
    from the rightmost path to the leftmost, each inverted when it runs
    against the run's orientation.
    """
    lists = {e: lst for e, lst in cracks.lists.items() if lst}
    endpoints = {p.start for p in parts} | {p.end for p in parts}
    # direction of every crack on every edge
    direction = {}
    for cid, path in cracks.paths.items():
        for a, b in zip(path[:-1], path[1:]):
            e = emb.edge(a, b)
            direction[(e, cid)] = emb.edges[e][0] == a
    covered_at: dict[int, list[int]] = {}
    for e in lists:
        for v in emb.edges[e]:
            covered_at.setdefault(int(v), []).append(e)

    def signature(e):
        return frozenset(lists[e])

    used = set()
    arcs = []
    for e0 in sorted(lists):
        if e0 in used:
            continue
        sig = signature(e0)
        chain = [e0]
        used.add(e0)
        ends = [int(emb.edges[e0][0]), int(emb.edges[e0][1])]
        for side in (0, 1):
            v = ends[side]
            e = e0
            while True:
                if v in endpoints or len(covered_at[v]) != 2:
                    break
                nxt = [f for f in covered_at[v] if f != e][0]
                if nxt in used or signature(nxt) != sig:
                    break
                used.add(nxt)
                if side == 0:
                    chain.insert(0, nxt)
                else:
                    chain.append(nxt)
                v = emb.other(nxt, v)
                e = nxt
            ends[side] = v
        # vertex sequence of the chain from ends[0] to ends[1]
        verts = [ends[0]]
        for e in chain:
            verts.append(emb.other(e, verts[-1]))
        # orientation: that of the lowest-numbered path on the run
        ref = min(sig, key=lambda c: (not isinstance(c, int), str(c) if not isinstance(c, int) else c))
        e1 = chain[0]
        ref_fwd = direction[(e1, ref)]
        run_fwd = emb.edges[e1][0] == verts[0]
        if ref_fwd != run_fwd:
            verts.reverse()
            chain.reverse()
        e1 = chain[0]
        fwd = emb.edges[e1][0] == verts[0]
        order = list(lists[e1]) if fwd else list(lists[e1])[::-1]  # left to right along the run
        factors = []
        for cid in reversed(order):
            J = parts[cid].jump
            same = direction[(e1, cid)] == fwd
            factors.append(J if same else J.inverse())
        jump = simplify_product(factors)
        if isinstance(jump, IdentityJump):
            continue
        labels = "+".join(parts[c].label or str(c) for c in order)
        arcs.append(Arc(emb.pos[verts], jump, None, labels))
    return RHProblem(arcs)


# ---------------------------------------------------------------------------
# Driver


def prepare_parts(rhp: RHProblem, cfg: DeformConfig, families: list[list[int]] | None = None,
                  rect: Rectangle | None = None):
    """Rectangle, grid and snapped parts for a problem."""
    rect = rect or cfg.rect or bounding_rectangle(rhp, cfg.weight, cfg.threshold, cfg.search_radius)
    g = build_grid_graph(rect, cfg.nx, cfg.ny)
    fam_of = {}
    for f, members in enumerate(families or []):
        for r, i in enumerate(members):
            fam_of[i] = (f, r)
    parts = []
    for i, arc in enumerate(rhp.arcs):
        pts = truncate_to_rectangle(arc, rect)
        if len(pts) < 2:
            raise InvalidParameter(f"arc {i} has no extent")
        s = nearest_vertex(g, complex(pts[0]))
        t = nearest_vertex(g, complex(pts[-1]))
        fam, rank = fam_of.get(i, (None, 0))
        ks = (_angle_key(pts[1] - pts[0]), rank)
        ke = (_angle_key(pts[-2] - pts[-1]), -rank)
        parts.append(Part(arc.jump, pts, s, t, ks, ke, arc.label, fam, rank))
    return rect, g, parts


def drop_identity_arcs(rhp: RHProblem, families: list[list[int]] | None = None, samples: int = 9):
    """Remove arcs whose jump is exactly the identity; families are re-indexed."""
    keep = []
    for i, arc in enumerate(rhp.arcs):
        z = np.asarray(arc.points, dtype=complex)
        if arc.ray_angle is not None:
            z = np.append(z, z[-1] + np.exp(1j * arc.ray_angle) * np.linspace(0.5, 4.0, samples))
        else:
            z = np.append(z, z[0] + (z[-1] - z[0]) * np.linspace(0, 1, samples))
        if np.any(arc.jump(z) != np.eye(2)):
            keep.append(i)
    new_index = {old: new for new, old in enumerate(keep)}
    fams = [[new_index[i] for i in f if i in new_index] for f in families or []]
    return RHProblem([rhp.arcs[i] for i in keep], dict(rhp.meta)), [f for f in fams if f]


def simple_deformation(rhp: RHProblem, cfg: DeformConfig | None = None,
                       families: list[list[int]] | None = None, rect: Rectangle | None = None) -> DeformationResult:
    """Deform every arc onto a shortest path of the grid graph.

    ``families`` lists groups of coincident arcs produced by a factorization,
    each ordered from the rightmost factor to the leftmost; their left-to-right
    order is preserved.
    """
    cfg = cfg or DeformConfig()
    kept, families = drop_identity_arcs(rhp, families)
    if not kept.arcs:
        # nothing to deform: the empty contour is equivalent and has zero strength
        rect = rect or cfg.rect or bounding_rectangle(rhp, cfg.weight, cfg.threshold, cfg.search_radius)
        g = build_grid_graph(rect, cfg.nx, cfg.ny)
        out = RHProblem([], dict(rhp.meta))
        out.meta.update(rect=rect.to_list(), grid=[cfg.nx, cfg.ny])
        trace = {"iterations": [], "improvements": [], "notes": ["every jump is the identity"],
                 "weights": {"snapped": 0.0, "deformed": 0.0}, "order": []}
        return DeformationResult(out, {}, [], g.embedding, rect, trace, RHProblem([]), CrackSet())
    rhp = kept
    rect, g, parts = prepare_parts(rhp, cfg, families, rect)
    D = Deformer(parts, g, cfg)
    snapped_arcs = []
    for i, p in enumerate(parts):
        if p.start == p.end:
            continue
        sp = snap_polyline(g, p.points, p.start, p.end)
        snapped_arcs.append(Arc(g.positions[list(sp.vertices)], p.jump, None, p.label))
    snapped = RHProblem(snapped_arcs)
    D.run()
    out = map_to_rhp(g.embedding, D.cracks, parts)
    out.meta = dict(rhp.meta)
    out.meta["rect"] = rect.to_list()
    out.meta["grid"] = [cfg.nx, cfg.ny]
    paths = {i: list(D.cracks.paths.get(i, (parts[i].start,))) for i in range(len(parts))}
    if cfg.check_condition_ii:
        ends = [(i, g.positions[p.start]) for i, p in enumerate(parts)] + [(i, g.positions[p.end]) for i, p in enumerate(parts)]
        for i, p in enumerate(parts):
            orig = p.points.copy()
            orig[0], orig[-1] = g.positions[p.start], g.positions[p.end]
            deformed = g.positions[paths[i]]
            others = [c for k, c in ends if k != i]
            check_condition_ii(orig, deformed, others)
    D.trace["weights"] = {
        "snapped": contour_weight(snapped, cfg.weight),
        "deformed": contour_weight(out, cfg.weight),
    }
    D.trace["order"] = list(D.fixed)
    return DeformationResult(out, paths, parts, g.embedding, rect, D.trace, snapped, D.cracks)


__all__ = [
    "DeformConfig",
    "Deformer",
    "DeformationResult",
    "Part",
    "check_condition_ii",
    "contour_weight",
    "drop_circles",
    "drop_identity_arcs",
    "map_to_rhp",
    "prepare_parts",
    "select_dominant",
    "simple_deformation",
    "snap_polyline",
]
