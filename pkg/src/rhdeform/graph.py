"""Weighted planar grid graphs, shortest paths, splitting and winding numbers.

A graph is a straight-line embedded *base* graph plus a set of *cracks*.
A crack is a path of base vertices along which the graph has been split:
every base edge carries an ordered list of the cracks running along it,
and the strands of that edge alternate between parallel copies of the edge
("lanes") and cracks.  Around a base vertex the strands of all incident
edges are arranged in rotation order; the cracks cut this cyclic list into
sectors, and each sector becomes one vertex of the split graph.  Splitting
along a path inserts one more crack, so repeated splits and paths that run
alongside each other are handled uniformly.

Orientation conventions: each base edge ``(u, v)`` is stored with ``u < v``
and its lanes and cracks are listed from left to right as seen travelling
from ``u`` to ``v``.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NotSplittable, OnWalk, Unreachable
from .rhp import Jump, LocalWeight, RHProblem, WEIGHT_CLAMP, decay_radius, frobenius_weight

# ---------------------------------------------------------------------------
# Rectangle


@dataclass(frozen=True)
class Rectangle:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        return (self.xmin - tol <= z.real <= self.xmax + tol) and (self.ymin - tol <= z.imag <= self.ymax + tol)

    def contains_rect(self, other: "Rectangle", tol: float = 0.0) -> bool:
        return (self.xmin - tol <= other.xmin and other.xmax <= self.xmax + tol
                and self.ymin - tol <= other.ymin and other.ymax <= self.ymax + tol)

    def ray_exit(self, start: complex, angle: float) -> complex:
        """First point where the ray from ``start`` leaves the rectangle."""
        d = np.exp(1j * angle)
        ts = []
        for lo, hi, p, q in ((self.xmin, self.xmax, start.real, d.real), (self.ymin, self.ymax, start.imag, d.imag)):
            if q > 1e-15:
                ts.append((hi - p) / q)
            elif q < -1e-15:
                ts.append((lo - p) / q)
        return complex(start + min(ts) * d)

    def to_list(self) -> list[float]:
        return [self.xmin, self.xmax, self.ymin, self.ymax]


def bounding_rectangle(rhp: RHProblem, w: LocalWeight = frobenius_weight, threshold: float = 1e-16,
                       search_radius: float = 50.0, cell: float = 1.0) -> Rectangle:
    """Smallest axis-parallel rectangle outside of which every ray's jump is negligible.

    The rectangle contains all finite breakpoints and, on every ray, the point
    beyond which ``w(G) < threshold``.  A degenerate extent is padded by
    ``cell`` on both sides.
    """
    pts = [p for a in rhp.arcs for p in a.points]
    for arc in rhp.arcs:
        if arc.ray_angle is not None:
            R = decay_radius(arc, w, threshold, search_radius)
            pts.append(arc.points[-1] + R * np.exp(1j * arc.ray_angle))
    pts = np.array(pts)
    xmin, xmax = float(pts.real.min()), float(pts.real.max())
    ymin, ymax = float(pts.imag.min()), float(pts.imag.max())
    if xmax - xmin <= 0:
        xmin, xmax = xmin - cell, xmax + cell
    if ymax - ymin <= 0:
        ymin, ymax = ymin - cell, ymax + cell
    return Rectangle(xmin, xmax, ymin, ymax)


# ---------------------------------------------------------------------------
# Base embedding


class Embedding:
    """Straight-line embedding of the unsplit graph with its faces."""

    def __init__(self, positions: np.ndarray, edges: Sequence[tuple[int, int]], boundary: Iterable[int] = ()):
        self.pos = np.asarray(positions, dtype=complex)
        E = np.array(sorted((min(a, b), max(a, b)) for a, b in edges), dtype=int).reshape(-1, 2)
        self.edges = E
        self.n = len(self.pos)
        self.edge_index = {(int(a), int(b)): k for k, (a, b) in enumerate(E)}
        inc: list[list[tuple[float, int, int]]] = [[] for _ in range(self.n)]
        for k, (a, b) in enumerate(E):
            ang_a = float(np.angle(self.pos[b] - self.pos[a])) % (2 * np.pi)
            ang_b = float(np.angle(self.pos[a] - self.pos[b])) % (2 * np.pi)
            inc[a].append((ang_a, int(b), k))
            inc[b].append((ang_b, int(a), k))
        self.inc = [[k for _, _, k in sorted(lst)] for lst in inc]
        self.inc_pos = [{k: r for r, k in enumerate(lst)} for lst in self.inc]
        self.boundary = frozenset(int(b) for b in boundary)
        self._faces = None

    def other(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        return int(b) if a == v else int(a)

    def edge(self, a: int, b: int) -> int:
        return self.edge_index[(min(a, b), max(a, b))]

    # faces -----------------------------------------------------------------

    def _trace_faces(self):
        E = len(self.edges)
        left = -np.ones((E, 2), dtype=int)  # left[e, d]: face left of e traversed forward (d=0) or backward
        faces: list[list[tuple[int, int]]] = []
        for e0 in range(E):
            for d0 in (0, 1):
                if left[e0, d0] >= 0:
                    continue
                fid = len(faces)
                cyc = []
                e, d = e0, d0
                while left[e, d] < 0:
                    left[e, d] = fid
                    cyc.append((e, d))
                    a, b = self.edges[e] if d == 0 else self.edges[e][::-1]
                    r = self.inc_pos[b][e]
                    e2 = self.inc[b][r - 1]
                    d2 = 0 if self.edges[e2][0] == b else 1
                    e, d = e2, d2
                faces.append(cyc)
        area = []
        for cyc in faces:
            pts = np.array([self.pos[self.edges[e][d]] for e, d in cyc])
            area.append(0.5 * float(np.sum((np.conj(pts) * np.roll(pts, -1)).imag)))
        outer = int(np.argmin(area))
        # breadth-first tree over faces, rooted at the outer face
        parent = {outer: None}
        order = [outer]
        i = 0
        while i < len(order):
            f = order[i]
            i += 1
            for e, d in faces[f]:
                g = left[e, 1 - d]
                if g not in parent:
                    # crossing from g to f crosses e; g lies left of e when d' = 0 for g
                    parent[g] = (f, e, 1 - d)
                    order.append(g)
        self._faces = dict(left=left, faces=faces, area=np.array(area), outer=outer, parent=parent, order=order)

    @property
    def faces(self) -> dict:
        if self._faces is None:
            self._trace_faces()
        return self._faces

    def locate_face(self, z: complex) -> int:
        """Bounded face containing ``z`` (the outer face if none)."""
        info = self.faces
        for f, cyc in enumerate(info["faces"]):
            if f == info["outer"]:
                continue
            poly = np.array([self.pos[self.edges[e][d]] for e, d in cyc])
            if _polygon_winding(poly, z) != 0:
                return f
        return info["outer"]


def _polygon_winding(poly: np.ndarray, z: complex) -> int:
    d = poly - z
    ang = np.angle(np.roll(d, -1) / d)
    return int(round(float(np.sum(ang)) / (2 * np.pi)))


# ---------------------------------------------------------------------------
# Cracks


class CrackSet:
    """Paths along which the base graph is split.

    ``paths[cid]`` is the base-vertex sequence of crack ``cid``; ``lists[e]``
    the cracks along base edge ``e``, left to right.
    """

    def __init__(self, paths: dict | None = None, lists: dict | None = None):
        self.paths: dict = dict(paths or {})
        self.lists: dict[int, list] = {e: list(v) for e, v in (lists or {}).items()}

    def copy(self) -> "CrackSet":
        return CrackSet(self.paths, self.lists)

    def __contains__(self, cid) -> bool:
        return cid in self.paths

    def edges_of(self, emb: Embedding, cid) -> list[int]:
        p = self.paths[cid]
        return [emb.edge(p[i], p[i + 1]) for i in range(len(p) - 1)]

    def remove(self, emb: Embedding, cid) -> None:
        for e in self.edges_of(emb, cid):
            self.lists[e].remove(cid)
            if not self.lists[e]:
                del self.lists[e]
        del self.paths[cid]

    def rename(self, old, new) -> None:
        self.paths[new] = self.paths.pop(old)
        for e, lst in self.lists.items():
            self.lists[e] = [new if c == old else c for c in lst]

    def position(self, e: int, cid) -> int:
        return self.lists[e].index(cid)


# ---------------------------------------------------------------------------
# Graph


@dataclass(frozen=True)
class GraphPath:
    """Walk in a graph given by vertices and the edges between them."""

    vertices: tuple
    edges: tuple
    weight: float = 0.0

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_simple(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices)

    def reversed(self) -> "GraphPath":
        return GraphPath(tuple(reversed(self.vertices)), tuple(reversed(self.edges)), self.weight)


@dataclass(frozen=True)
class ClosedWalk(GraphPath):
    def __post_init__(self):
        if self.vertices and self.vertices[0] != self.vertices[-1]:
            raise ValueError("closed walk must end where it starts")


class PlanarGraph:
    """A base embedding split along a set of cracks.

    Vertex ids: the first sector of every base vertex keeps the base id;
    additional sectors get ids from ``n_base`` upwards.  Edge ids are dense
    and ordered by (base edge, lane).
    """

    def __init__(self, embedding: Embedding, cracks: CrackSet | None = None):
        self.embedding = emb = embedding
        self.cracks = cracks.copy() if cracks is not None else CrackSet()
        lists = self.cracks.lists
        Eb = len(emb.edges)
        counts = np.array([len(lists.get(e, ())) + 1 for e in range(Eb)], dtype=int)
        self.lane_offset = np.concatenate([[0], np.cumsum(counts)])
        n_lanes = int(self.lane_offset[-1])
        self.edge_base = np.repeat(np.arange(Eb), counts)
        self.edge_lane = np.arange(n_lanes) - self.lane_offset[self.edge_base]
        ends = -np.ones((n_lanes, 2), dtype=int)

        base_of = list(range(emb.n))
        self.slots: list[list[tuple]] = []
        self.slot_sector: list[list[int]] = []
        self.sector_vertices: list[list[int]] = []
        vertex_lanes: dict[int, list[int]] = {}
        next_id = emb.n
        for v in range(emb.n):
            slots = []
            for e in emb.inc[v]:
                L = lists.get(e, ())
                items = []
                for j in range(len(L) + 1):
                    items.append(("lane", e, j))
                    if j < len(L):
                        items.append(("crack", e, j))
                if emb.edges[e][0] == v:
                    items.reverse()
                slots.extend(items)
            sec = []
            s = 0
            n_sec = max(1, sum(1 for it in slots if it[0] == "crack"))
            for it in slots:
                if it[0] == "crack":
                    s += 1
                    sec.append(-1)
                else:
                    sec.append(s % n_sec)
            ids = [v] + list(range(next_id, next_id + n_sec - 1))
            base_of.extend([v] * (n_sec - 1))
            next_id += n_sec - 1
            self.slots.append(slots)
            self.slot_sector.append(sec)
            self.sector_vertices.append(ids)
            for it, sc in zip(slots, sec):
                if it[0] == "lane":
                    e, j = it[1], it[2]
                    lane = int(self.lane_offset[e]) + j
                    vid = ids[sc]
                    ends[lane, 0 if emb.edges[e][0] == v else 1] = vid
                    vertex_lanes.setdefault(vid, []).append(lane)
        self.n_vertices = next_id
        self.base_vertex = np.array(base_of, dtype=int)
        self.positions = emb.pos[self.base_vertex]
        self.edges = ends
        # rotation at every vertex: lanes in slot order
        self.rotation = [vertex_lanes.get(v, []) for v in range(self.n_vertices)]
        self.adj: list[list[tuple[int, int]]] = [
            [(int(ends[l, 1] if ends[l, 0] == v else ends[l, 0]), l) for l in self.rotation[v]]
            for v in range(self.n_vertices)
        ]

    # basic queries -----------------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_base(self) -> int:
        return self.embedding.n

    @property
    def boundary(self) -> set[int]:
        return {v for v in range(self.n_vertices) if int(self.base_vertex[v]) in self.embedding.boundary}

    def pristine(self) -> "PlanarGraph":
        return PlanarGraph(self.embedding)

    def lane(self, e: int, j: int) -> int:
        return int(self.lane_offset[e]) + j

    def other_end(self, lane: int, v: int) -> int:
        a, b = self.edges[lane]
        return int(b) if a == v else int(a)

    def edges_between(self, a: int, b: int) -> list[int]:
        return [l for w, l in self.adj[a] if w == b]

    def sector_of_lane(self, lane: int, base_v: int) -> int:
        a, b = self.edges[lane]
        return int(a) if self.base_vertex[a] == base_v else int(b)

    def lane_direction(self, lane: int, frm: int) -> int:
        """+1 when leaving ``frm`` along ``lane`` follows the base edge orientation."""
        return 1 if self.edges[lane][0] == frm else -1

    def walk_from_vertices(self, vertices: Sequence[int]) -> GraphPath:
        """Walk through ``vertices``; every step must be a unique edge."""
        edges = []
        for a, b in zip(vertices[:-1], vertices[1:]):
            cand = self.edges_between(a, b)
            if len(cand) != 1:
                raise NotSplittable(f"step {a}->{b} is {'ambiguous' if cand else 'not an edge'}")
            edges.append(cand[0])
        return GraphPath(tuple(int(v) for v in vertices), tuple(edges))

    # sectors at terminals ----------------------------------------------------

    def crack_slots(self, base_v: int) -> list[tuple[int, object]]:
        """Slot indices and crack ids of all cracks touching a base vertex."""
        out = []
        for i, it in enumerate(self.slots[base_v]):
            if it[0] == "crack":
                out.append((i, self.cracks.lists[it[1]][it[2]]))
        return out

    def sectors_between(self, base_v: int, after_slot: int | None, before_slot: int | None) -> list[int]:
        """Sector vertices met going anticlockwise strictly between two slots.

        ``after_slot=None`` returns every sector; equal bounds give the full
        cycle apart from that slot.
        """
        ids = self.sector_vertices[base_v]
        if after_slot is None:
            return list(ids)
        sec = self.slot_sector[base_v]
        n = len(sec)
        stop = after_slot if before_slot is None else before_slot
        out: list[int] = []
        i = (after_slot + 1) % n
        while i != stop:
            if sec[i] >= 0 and ids[sec[i]] not in out:
                out.append(ids[sec[i]])
            i = (i + 1) % n
        return out

    def banks(self, cid) -> tuple[GraphPath, GraphPath]:
        """Left and right copies of a crack as walks in this graph."""
        emb = self.embedding
        path = self.cracks.paths[cid]
        left_l, right_l = [], []
        for a, b in zip(path[:-1], path[1:]):
            e = emb.edge(a, b)
            pos = self.cracks.position(e, cid)
            fwd = emb.edges[e][0] == a
            lo, hi = self.lane(e, pos), self.lane(e, pos + 1)
            left_l.append(lo if fwd else hi)
            right_l.append(hi if fwd else lo)

        def as_walk(lanes):
            verts = [self.sector_of_lane(lanes[0], path[0])]
            for k, l in enumerate(lanes):
                verts.append(self.sector_of_lane(l, path[k + 1]))
            return GraphPath(tuple(verts), tuple(lanes))

        return as_walk(left_l), as_walk(right_l)

    def crack_insertion(self, walk: GraphPath) -> tuple[list[int], list[int]]:
        """Base vertices and per-step list positions for a crack along ``walk``."""
        base = [int(self.base_vertex[v]) for v in walk.vertices]
        pos = [int(self.edge_lane[l]) for l in walk.edges]
        return base, pos

    def with_crack(self, cid, walk: GraphPath) -> "PlanarGraph":
        cracks = self.cracks.copy()
        insert_crack(cracks, self.embedding, cid, *self.crack_insertion(walk))
        return PlanarGraph(self.embedding, cracks)

    def without_crack(self, cid) -> "PlanarGraph":
        cracks = self.cracks.copy()
        cracks.remove(self.embedding, cid)
        return PlanarGraph(self.embedding, cracks)

    # drawing -----------------------------------------------------------------

    def drawing(self, spread: float = 0.08, shift: float = 0.02):
        """Perturbed straight-line drawing separating coincident copies.

        Returns vertex positions and, per edge, a bend point so that each
        edge is drawn as the two segments ``(pos[a], bend, pos[b])``; crack
        bend points are returned too.  Used for rendering and as a
        geometric cross-check of the combinatorial winding numbers.
        """
        emb = self.embedding
        lists = self.cracks.lists
        L = np.abs(emb.pos[emb.edges[:, 1]] - emb.pos[emb.edges[:, 0]])
        unit = (emb.pos[emb.edges[:, 1]] - emb.pos[emb.edges[:, 0]]) / L
        mid = 0.5 * (emb.pos[emb.edges[:, 1]] + emb.pos[emb.edges[:, 0]])
        scale = float(L.min()) if len(L) else 1.0

        def item_point(e, s, k):
            # strand s of 2k+1 on edge e; left of orientation is +i*unit
            off = (k - s) * spread * scale / (k + 1)
            return mid[e] + 1j * unit[e] * off

        bends = np.empty(self.n_edges, dtype=complex)
        crack_bends = {}
        for e in range(len(emb.edges)):
            k = len(lists.get(e, ()))
            for j in range(k + 1):
                bends[self.lane(e, j)] = item_point(e, 2 * j, k)
            for i, cid in enumerate(lists.get(e, ())):
                crack_bends[(e, cid)] = item_point(e, 2 * i + 1, k)
        pos = self.positions.copy()
        for v in range(emb.n):
            ids = self.sector_vertices[v]
            if len(ids) == 1:
                continue
            slots, sec = self.slots[v], self.slot_sector[v]
            cut = [i for i, s in enumerate(sec) if s < 0]
            for i, i2 in zip(cut, cut[1:] + cut[:1]):
                j = (i + 1) % len(slots)
                if sec[j] < 0:
                    continue
                # bisect the anticlockwise wedge between the two bounding cracks
                a = np.angle(crack_bends[(slots[i][1], lists[slots[i][1]][slots[i][2]])] - emb.pos[v])
                b = np.angle(crack_bends[(slots[i2][1], lists[slots[i2][1]][slots[i2][2]])] - emb.pos[v])
                span = (b - a) % (2 * np.pi)
                pos[ids[sec[j]]] = emb.pos[v] + shift * scale * np.exp(1j * (a + 0.5 * span))
        return pos, bends, crack_bends

    def edge_polyline(self, lane: int, drawing=None) -> np.ndarray:
        pos, bends, _ = drawing if drawing is not None else self.drawing()
        a, b = self.edges[lane]
        return np.array([pos[a], bends[lane], pos[b]])

    # serialization -------------------------------------------------------------

    def to_dict(self, weights: np.ndarray | None = None) -> dict:
        d = {
            "vertices": [[float(p.real), float(p.imag)] for p in self.positions],
            "base_vertex": [int(b) for b in self.base_vertex],
            "edges": [[int(a), int(b)] for a, b in self.edges],
        }
        if weights is not None:
            d["weights"] = [float(w) for w in weights]
        return d


def insert_crack(cracks: CrackSet, emb: Embedding, cid, base: Sequence[int], positions: Sequence[int]) -> None:
    """Insert crack ``cid`` along base vertices ``base`` at the given lane positions."""
    if cid in cracks.paths:
        raise NotSplittable(f"crack {cid!r} already present")
    steps = []
    for a, b, j in zip(base[:-1], base[1:], positions):
        e = emb.edge(a, b)
        steps.append((e, j))
    seen = [e for e, _ in steps]
    if len(set(seen)) != len(seen):
        raise NotSplittable("path uses a base edge twice")
    for e, j in steps:
        lst = cracks.lists.setdefault(e, [])
        if not 0 <= j <= len(lst):
            raise NotSplittable("lane position out of range")
        lst.insert(j, cid)
    cracks.paths[cid] = tuple(int(v) for v in base)


# ---------------------------------------------------------------------------
# Construction


def build_grid_graph(rect: Rectangle, nx: int, ny: int, centers: bool = True,
                     forbidden: Callable[[complex], bool] | None = None) -> PlanarGraph:
    """Grid of ``nx * ny`` vertices on ``rect``, with a center vertex in every box.

    Grid vertex ``(i, k)`` (column ``i``, row ``k``) has id ``k * nx + i``;
    box centers follow, row by row.  Vertices where ``forbidden`` is true are
    removed together with their edges.
    """
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2x2 grid vertices")
    xs = np.linspace(rect.xmin, rect.xmax, nx)
    ys = np.linspace(rect.ymin, rect.ymax, ny)
    pos = [complex(x, y) for y in ys for x in xs]
    edges = []
    gid = lambda i, k: k * nx + i  # noqa: E731
    for k in range(ny):
        for i in range(nx - 1):
            edges.append((gid(i, k), gid(i + 1, k)))
    for k in range(ny - 1):
        for i in range(nx):
            edges.append((gid(i, k), gid(i, k + 1)))
    if centers:
        for k in range(ny - 1):
            for i in range(nx - 1):
                c = len(pos)
                pos.append(complex(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[k] + ys[k + 1])))
                for a in (gid(i, k), gid(i + 1, k), gid(i + 1, k + 1), gid(i, k + 1)):
                    edges.append((a, c))
    boundary = [gid(i, k) for k in range(ny) for i in range(nx) if i in (0, nx - 1) or k in (0, ny - 1)]
    return planar_graph(np.array(pos), edges, boundary, forbidden)


def planar_graph(positions: np.ndarray, edges: Sequence[tuple[int, int]], boundary: Iterable[int] = (),
                 forbidden: Callable[[complex], bool] | None = None) -> PlanarGraph:
    """Graph from explicit straight-line data (the caller guarantees planarity)."""
    positions = np.asarray(positions, dtype=complex)
    boundary = set(boundary)
    if forbidden is not None:
        keep = [v for v in range(len(positions)) if not forbidden(complex(positions[v]))]
        remap = {v: i for i, v in enumerate(keep)}
        positions = positions[keep]
        edges = [(remap[a], remap[b]) for a, b in edges if a in remap and b in remap]
        boundary = {remap[b] for b in boundary if b in remap}
    return PlanarGraph(Embedding(positions, edges, boundary))


# ---------------------------------------------------------------------------
# Weights


def edge_weight(G: Jump, w: LocalWeight, a: complex, b: complex) -> float:
    """Two-point trapezoidal integral of the local weight over the segment ``[a, b]``."""
    vals = w(G(np.array([a, b], dtype=complex)))
    return float(min(0.5 * abs(b - a) * (vals[0] + vals[1]), WEIGHT_CLAMP))


@dataclass
class WeightedPlanarGraph:
    """A graph with one nonnegative weight per edge."""

    graph: PlanarGraph
    weight: np.ndarray

    def path_weight(self, path: GraphPath) -> float:
        total = 0.0
        for l in path.edges:
            total += float(self.weight[l])
        return total

    def to_json(self) -> str:
        return json.dumps(self.graph.to_dict(self.weight), sort_keys=True)


def vertex_weights(emb: Embedding, G: Jump, w: LocalWeight = frobenius_weight) -> np.ndarray:
    return w(G(emb.pos))


def base_edge_weights(emb: Embedding, vw: np.ndarray) -> np.ndarray:
    a, b = emb.edges[:, 0], emb.edges[:, 1]
    d = 0.5 * np.abs(emb.pos[b] - emb.pos[a]) * (vw[a] + vw[b])
    return np.minimum(d, WEIGHT_CLAMP)


def weight_graph(g: PlanarGraph, G: Jump, w: LocalWeight = frobenius_weight) -> WeightedPlanarGraph:
    """Attach ``d_e = |e| (w(G(a)) + w(G(b))) / 2`` to every edge of ``g``."""
    base = base_edge_weights(g.embedding, vertex_weights(g.embedding, G, w))
    return WeightedPlanarGraph(g, base[g.edge_base])


# ---------------------------------------------------------------------------
# Shortest paths


def nearest_vertex(g: PlanarGraph, p: complex) -> int:
    """Euclidean nearest vertex; ties go to the lowest id."""
    d = np.abs(g.positions - p)
    return int(np.argmin(d))


def dijkstra(g: PlanarGraph, weight: np.ndarray, sources: Iterable[int],
             allowed: np.ndarray | None = None):
    """Single- or multi-source Dijkstra.

    Returns ``(dist, pred_vertex, pred_edge)``; ties between equal distances
    are resolved by the heap order on ``(distance, vertex id)`` so results
    are reproducible.
    """
    n = g.n_vertices
    dist = np.full(n, np.inf)
    pred = -np.ones(n, dtype=int)
    pred_e = -np.ones(n, dtype=int)
    done = np.zeros(n, dtype=bool)
    heap = []
    for s in sources:
        if allowed is not None and not allowed[s]:
            continue
        dist[s] = 0.0
        heap.append((0.0, int(s)))
    heapq.heapify(heap)
    adj = g.adj
    wt = weight.tolist() if isinstance(weight, np.ndarray) else list(weight)
    dl = dist.tolist()
    while heap:
        d, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        for u, l in adj[v]:
            if done[u] or (allowed is not None and not allowed[u]):
                continue
            nd = d + wt[l]
            if nd < dl[u]:
                dl[u] = nd
                pred[u] = v
                pred_e[u] = l
                heapq.heappush(heap, (nd, u))
    return np.array(dl), pred, pred_e


def tree_path(pred: np.ndarray, pred_e: np.ndarray, v: int) -> tuple[list[int], list[int]]:
    verts, edges = [int(v)], []
    while pred[v] >= 0:
        edges.append(int(pred_e[v]))
        v = int(pred[v])
        verts.append(v)
    return verts[::-1], edges[::-1]


def path_in(wg: WeightedPlanarGraph, sources: Iterable[int], targets: Iterable[int],
            allowed: np.ndarray | None = None) -> GraphPath:
    targets = list(targets)
    dist, pred, pred_e = dijkstra(wg.graph, wg.weight, sources, allowed)
    best = min(targets, key=lambda t: (dist[t], t)) if targets else None
    if best is None or not np.isfinite(dist[best]):
        raise Unreachable("no path between the requested vertices")
    verts, edges = tree_path(pred, pred_e, best)
    p = GraphPath(tuple(verts), tuple(edges))
    return GraphPath(p.vertices, p.edges, wg.path_weight(p))


def shortest_path(wg: WeightedPlanarGraph, u: int, v: int) -> GraphPath:
    """Minimal-weight path from ``u`` to ``v``."""
    return path_in(wg, [u], [v])


# ---------------------------------------------------------------------------
# Splitting


@dataclass
class SplitRecord:
    """Result of splitting along a path."""

    original: GraphPath
    left: GraphPath
    right: GraphPath
    correspondence: dict = field(default_factory=dict)  # old vertex -> new vertices
    crack: object = None


def split_graph(g: PlanarGraph | WeightedPlanarGraph, p: GraphPath | Sequence[int], cid=None):
    """Split ``g`` along the simple path ``p``.

    Interior vertices of ``p`` are duplicated; edges on the right of ``p``
    move to the duplicates.  Returns the new graph (weighted if the input was)
    and a :class:`SplitRecord`.
    """
    weighted = isinstance(g, WeightedPlanarGraph)
    graph = g.graph if weighted else g
    if not isinstance(p, GraphPath):
        p = graph.walk_from_vertices(list(p))
    if len(p.vertices) < 2:
        raise NotSplittable("a path of a single vertex cannot split a graph")
    if not p.is_simple:
        raise NotSplittable("path is not simple")
    if cid is None:
        cid = ("split", len(graph.cracks.paths))
    new = graph.with_crack(cid, p)
    left, right = new.banks(cid)
    corr: dict[int, list[int]] = {}
    for v in range(new.n_vertices):
        corr.setdefault(_old_vertex(graph, new, v), []).append(v)
    rec = SplitRecord(p, left, right, corr, cid)
    if weighted:
        base_w = np.zeros(len(graph.embedding.edges))
        base_w[graph.edge_base] = g.weight
        return WeightedPlanarGraph(new, base_w[new.edge_base]), rec
    return new, rec


def _old_vertex(old: PlanarGraph, new: PlanarGraph, v: int) -> int:
    """Vertex of ``old`` whose sector contains sector ``v`` of ``new``."""
    lane = new.rotation[v][0] if new.rotation[v] else None
    base = int(new.base_vertex[v])
    if lane is None:
        return base
    e = int(new.edge_base[lane])
    j = int(new.edge_lane[lane])
    # lanes of e in ``new`` refine those of ``old``: map by counting old cracks to the left
    new_list = new.cracks.lists.get(e, [])
    old_set = set(old.cracks.lists.get(e, []))
    j_old = sum(1 for c in new_list[:j] if c in old_set)
    return old.sector_of_lane(old.lane(e, j_old), base)


# ---------------------------------------------------------------------------
# Winding numbers


def winding_number(wlk, c: complex, positions: np.ndarray | None = None) -> int:
    """Winding number of a closed polyline around ``c`` by angle summation.

    ``wlk`` is either a sequence of complex points (closed or not; it is
    closed implicitly) or a walk whose vertices are looked up in ``positions``.
    """
    if isinstance(wlk, GraphPath):
        pts = np.asarray(positions)[list(wlk.vertices)]
    else:
        pts = np.asarray(wlk, dtype=complex)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(pts) == 0:
        return 0
    a, b = pts, np.roll(pts, -1)
    diam = float(np.max(np.abs(pts - pts[0]))) or 1.0
    d = b - a
    L2 = np.abs(d) ** 2
    s = np.clip(np.where(L2 > 0, ((c - a) * np.conj(d)).real / np.where(L2 > 0, L2, 1), 0.0), 0, 1)
    if np.min(np.abs(c - (a + s * d))) < 1e-12 * diam:
        raise OnWalk(f"point {c} lies on the walk")
    ang = np.angle((b - c) / (a - c))
    return int(round(float(np.sum(ang)) / (2 * np.pi)))


def lane_traversals(g: PlanarGraph, wlk: GraphPath) -> np.ndarray:
    """Net number of traversals of each edge in its base orientation."""
    T = np.zeros(g.n_edges, dtype=int)
    for a, l in zip(wlk.vertices[:-1], wlk.edges):
        T[l] += g.lane_direction(l, a)
    return T


class WindingField:
    """Winding numbers of a closed walk at faces, vertices and crack interiors.

    Computed combinatorially from net lane traversals: crossing base edge
    ``e`` from its left face to its right face changes the winding number by
    minus the net traversal count of its lanes.
    """

    def __init__(self, g: PlanarGraph, wlk: GraphPath):
        self.g = g
        emb = g.embedding
        self.T = T = lane_traversals(g, wlk)
        sums = np.zeros(len(emb.edges), dtype=int)
        np.add.at(sums, g.edge_base, T)
        info = emb.faces
        left = info["left"]
        wf = np.zeros(len(info["faces"]), dtype=int)
        for f in info["order"][1:]:
            parent, e, d = info["parent"][f]
            # f is left of e when d == 0
            wf[f] = wf[parent] + (sums[e] if d == 0 else -sums[e])
        self.face = wf
        self.left = left
        self.on_walk = set(int(v) for v in wlk.vertices)

    def right_face(self, e: int) -> int:
        return int(self.left[e, 1])

    def at_strand(self, e: int, k_right: int) -> int:
        """Point between strands of base edge ``e`` with lanes ``>= k_right`` on its right."""
        g = self.g
        lanes = np.arange(g.lane(e, k_right), int(g.lane_offset[e + 1]))
        return int(self.face[self.right_face(e)] + self.T[lanes].sum())

    def at_crack(self, cid) -> int:
        g = self.g
        p = g.cracks.paths[cid]
        e = g.embedding.edge(p[0], p[1])
        pos = g.cracks.position(e, cid)
        return self.at_strand(e, pos + 1)

    def at_vertex(self, v: int) -> int | None:
        """Winding number at a vertex, ``None`` if the walk passes through it."""
        if v in self.on_walk:
            return None
        g = self.g
        emb = g.embedding
        base = int(g.base_vertex[v])
        if not g.rotation[v]:
            return None
        slots = g.slots[base]
        sec = g.slot_sector[base]
        ids = g.sector_vertices[base]
        n = len(slots)
        for i in range(n):
            j = (i + 1) % n
            if sec[i] < 0 or sec[j] < 0 or ids[sec[i]] != v or ids[sec[j]] != v:
                continue
            block_end = slots[j][1] != slots[i][1] or (j == 0 and len(emb.inc[base]) == 1)
            if block_end:
                # wedge just anticlockwise of edge slots[i][1]
                e = slots[i][1]
                d = 0 if emb.edges[e][0] == base else 1
                return int(self.face[self.left[e, d]])
        lane = g.rotation[v][0]
        return self.at_strand(int(g.edge_base[lane]), int(g.edge_lane[lane]) + 1)


def homological_interior(wlk: GraphPath, g: PlanarGraph) -> set[int]:
    """Vertices off the walk with winding number +1 or -1."""
    field_ = WindingField(g, wlk)
    out = set()
    for v in range(g.n_vertices):
        w = field_.at_vertex(v)
        if w is not None and abs(w) == 1:
            out.add(v)
    return out


class DualRay:
    """Signed lane crossings of a fixed curve from a point to the outer face.

    For a closed walk, the sum of ``sign[lane] * direction`` over its steps
    is its winding number around the start point of the ray.
    """

    def __init__(self, g: PlanarGraph, face: int, strand: tuple[int, int] | None = None):
        self.g = g
        emb = g.embedding
        info = emb.faces
        sign = np.zeros(g.n_edges, dtype=int)
        if strand is not None:
            e, k_right = strand
            sign[g.lane(e, k_right):int(g.lane_offset[e + 1])] += 1
            face = int(info["left"][e, 1])
        f = face
        while info["parent"][f] is not None:
            parent, e, d = info["parent"][f]
            lanes = slice(int(g.lane_offset[e]), int(g.lane_offset[e + 1]))
            sign[lanes] += 1 if d == 0 else -1
            f = parent
        self.sign = sign

    @classmethod
    def from_crack(cls, g: PlanarGraph, cid) -> "DualRay":
        p = g.cracks.paths[cid]
        k = len(p) // 2 - 1 if len(p) > 2 else 0
        e = g.embedding.edge(p[k], p[k + 1])
        return cls(g, -1, (e, g.cracks.position(e, cid) + 1))

    @classmethod
    def from_point(cls, g: PlanarGraph, c: complex) -> "DualRay":
        return cls(g, g.embedding.locate_face(c))

    def step(self, lane: int, frm: int) -> int:
        return int(self.sign[lane]) * self.g.lane_direction(lane, frm)

    def walk(self, wlk: GraphPath) -> int:
        return sum(self.step(l, a) for a, l in zip(wlk.vertices[:-1], wlk.edges))
