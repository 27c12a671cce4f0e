"""Independent reference computations used by the tests."""

from __future__ import annotations

import numpy as np

from rhdeform.graph import (
    GraphPath,
    PlanarGraph,
    Rectangle,
    WeightedPlanarGraph,
    build_grid_graph,
    dijkstra,
    path_in,
    winding_number,
)


def random_weighted_grid(rng, nx, ny, lo=0.1, hi=1.0, centers=True):
    g = build_grid_graph(Rectangle(0.0, float(nx - 1), 0.0, float(ny - 1)), nx, ny, centers=centers)
    base = rng.uniform(lo, hi, size=len(g.embedding.edges))
    return g, base


def weighted(g: PlanarGraph, base: np.ndarray) -> WeightedPlanarGraph:
    return WeightedPlanarGraph(g, base[g.edge_base])


def bellman_ford(g: PlanarGraph, weight: np.ndarray, source: int) -> np.ndarray:
    d = np.full(g.n_vertices, np.inf)
    d[source] = 0.0
    for _ in range(g.n_vertices):
        changed = False
        for l, (a, b) in enumerate(g.edges):
            for u, v in ((a, b), (b, a)):
                if d[u] + weight[l] < d[v]:
                    d[v] = d[u] + weight[l]
                    changed = True
        if not changed:
            break
    return d


def brute_force_shortest(g: PlanarGraph, weight: np.ndarray, s: int, t: int) -> float:
    """Minimum over all simple paths by depth-first enumeration."""
    best = np.inf
    stack = [(s, 0.0, {s})]
    while stack:
        v, w, seen = stack.pop()
        if v == t:
            best = min(best, w)
            continue
        for u, l in g.adj[v]:
            if u not in seen:
                stack.append((u, w + float(weight[l]), seen | {u}))
    return best


def walk_polyline(g: PlanarGraph, walk: GraphPath, drawing) -> np.ndarray:
    """Drawn polyline of a walk, every lane passing through its bend point."""
    pos, bends, _ = drawing
    pts = [pos[walk.vertices[0]]]
    for v, l in zip(walk.vertices[1:], walk.edges):
        pts += [bends[l], pos[v]]
    return np.array(pts)


def crack_point(g: PlanarGraph, cid, drawing) -> complex:
    """A point inside the split: the drawn bend of the crack on its middle edge."""
    _, _, cbends = drawing
    p = g.cracks.paths[cid]
    k = len(p) // 2 - 1 if len(p) > 2 else 0
    e = g.embedding.edge(p[k], p[k + 1])
    return complex(cbends[(e, cid)])


def concat(a: GraphPath, b: GraphPath) -> GraphPath:
    assert a.vertices[-1] == b.vertices[0]
    return GraphPath(a.vertices + b.vertices[1:], a.edges + b.edges)


def min_enclosing_walk(wg: WeightedPlanarGraph, s: int, t: int, closing: GraphPath, c: complex,
                       target: int, max_edges: int, bound: float, drawing) -> float:
    """Lightest walk ``s -> t`` with at most ``max_edges`` edges such that the
    walk followed by ``closing`` winds ``target`` times around ``c``.

    Depth-first enumeration of all walks, pruned only by a lower bound on the
    remaining distance against ``bound`` (which need not be attained).
    """
    g = wg.graph
    dt, _, _ = dijkstra(g, wg.weight, [t])
    slack = 1e-9 * max(1.0, bound)
    best = np.inf
    stack = [((s,), (), 0.0)]
    while stack:
        verts, edges, w = stack.pop()
        v = verts[-1]
        if v == t and edges:
            walk = GraphPath(verts, edges)
            exact = wg.path_weight(walk)
            if exact < best or exact == best:
                loop = concat(walk, closing)
                if winding_number(walk_polyline(g, loop, drawing), c) == target:
                    best = min(best, exact)
        if len(edges) == max_edges:
            continue
        for u, l in g.adj[v]:
            nw = w + float(wg.weight[l])
            if nw + dt[u] > min(bound, best) + slack:
                continue
            stack.append((verts + (u,), edges + (l,), nw))
    return best


def random_closed_walk(rng, g: PlanarGraph, length: int) -> GraphPath:
    """A random closed walk: a random walk closed by a shortest path home."""
    v0 = int(rng.integers(g.n_vertices))
    verts, edges = [v0], []
    v = v0
    for _ in range(length):
        u, l = g.adj[v][int(rng.integers(len(g.adj[v])))]
        verts.append(u)
        edges.append(l)
        v = u
    home = path_in(WeightedPlanarGraph(g, np.ones(g.n_edges)), [v], [v0])
    return GraphPath(tuple(verts) + home.vertices[1:], tuple(edges) + home.edges)


def side_labels(g_split: PlanarGraph, cid, g_base: PlanarGraph) -> np.ndarray:
    """Side of every vertex of a split graph relative to a boundary-to-boundary crack.

    Vertices off the crack get the label of their component in the base graph
    with the crack removed; crack sectors get the side of the bank they lie on;
    crack endpoints are neutral (0).  Labels are +1 (left) and -1 (right).
    """
    path = list(g_split.cracks.paths[cid])
    on = set(path)
    left, right = g_split.banks(cid)
    lab = np.zeros(g_split.n_vertices, dtype=int)
    # components of the base graph without the crack vertices
    comp = -np.ones(g_base.n_vertices, dtype=int)
    k = 0
    for v in range(g_base.n_vertices):
        if v in on or comp[v] >= 0:
            continue
        stack = [v]
        comp[v] = k
        while stack:
            a = stack.pop()
            for b, _ in g_base.adj[a]:
                if b not in on and comp[b] < 0:
                    comp[b] = k
                    stack.append(b)
        k += 1
    # which component touches the left bank
    left_comp, right_comp = set(), set()
    for v in left.vertices[1:-1]:
        for u, _ in g_split.adj[v]:
            if int(g_split.base_vertex[u]) not in on:
                left_comp.add(int(comp[g_split.base_vertex[u]]))
    for v in right.vertices[1:-1]:
        for u, _ in g_split.adj[v]:
            if int(g_split.base_vertex[u]) not in on:
                right_comp.add(int(comp[g_split.base_vertex[u]]))
    for v in range(g_split.n_vertices):
        b = int(g_split.base_vertex[v])
        if b in on:
            continue
        c = int(comp[b])
        lab[v] = 1 if c in left_comp else (-1 if c in right_comp else 0)
    for v in left.vertices[1:-1]:
        lab[v] = 1
    for v in right.vertices[1:-1]:
        lab[v] = -1
    return lab


def boundary_path(rng, g: PlanarGraph, base: np.ndarray) -> GraphPath:
    """Shortest path under random weights between two boundary vertices, through the interior."""
    bd = sorted(g.boundary)
    interior = np.ones(g.n_vertices, dtype=bool)
    interior[bd] = False
    while True:
        s, t = rng.choice(bd, size=2, replace=False)
        allowed = interior.copy()
        allowed[[s, t]] = True
        try:
            p = path_in(weighted(g, base), [int(s)], [int(t)], allowed)
        except Exception:
            continue
        if len(p.vertices) >= 3:
            return p


def segments_properly_intersect(p1, p2, q1, q2) -> bool:
    """Closed segments meet somewhere other than a common endpoint (plain orientation test)."""

    def orient(a, b, c):
        v = (b - a).real * (c - a).imag - (b - a).imag * (c - a).real
        return 0 if abs(v) < 1e-12 else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return min(a.real, b.real) - 1e-12 <= c.real <= max(a.real, b.real) + 1e-12 and \
            min(a.imag, b.imag) - 1e-12 <= c.imag <= max(a.imag, b.imag) + 1e-12

    shared = {p for p in (p1, p2)} & {q for q in (q1, q2)}
    o1, o2, o3, o4 = orient(p1, p2, q1), orient(p1, p2, q2), orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    touching = [(o1, p1, p2, q1), (o2, p1, p2, q2), (o3, q1, q2, p1), (o4, q1, q2, p2)]
    for o, a, b, c in touching:
        if o == 0 and on_seg(a, b, c) and c not in shared:
            return True
    if shared and o1 == 0 and o2 == 0:
        # collinear with a shared endpoint: overlapping unless pointing apart
        s = shared.pop()
        a = p1 if p2 == s else p2
        b = q1 if q2 == s else q2
        return ((a - s) * np.conj(b - s)).real > 0
    return False


def enclosing_instance(rng, nx: int, ny: int, max_edges: int = 12):
    """One random enclosing-walk instance: ``(walk weight, exhaustive minimum, sign)``."""
    from rhdeform.lensing import enclosing_shortest_walk

    g, base = random_weighted_grid(rng, nx, ny)
    wg = weighted(g, base)
    other = weighted(g, rng.uniform(0.1, 1.0, size=len(base)))
    s, t = (int(v) for v in rng.choice(g.n_vertices, 2, replace=False))
    q = path_in(other, [s], [t])
    sign = int(rng.choice([-1, 1]))
    walk, gq = enclosing_shortest_walk(wg, q, sign=sign, return_graph=True)
    wq = weighted(gq, base)
    drawing = gq.drawing()
    left, right = gq.banks("__q")
    bank = left if sign == 1 else right
    c = crack_point(gq, "__q", drawing)
    best = min_enclosing_walk(wq, bank.vertices[0], bank.vertices[-1], bank.reversed(), c, sign,
                              max(max_edges, len(walk.edges)), walk.weight, drawing)
    return walk.weight, best, sign


def airy_ai(x: float) -> float:
    """``Ai(x)`` for ``x > 0`` from its contour integral through the saddle ``t = sqrt(x)``.

    With ``t = sqrt(x) + i s`` the integrand decays like a Gaussian:
    ``Ai(x) = exp(-2 x^1.5 / 3) / pi * int_0^inf exp(-sqrt(x) s^2) cos(s^3 / 3) ds``.
    """
    from scipy.integrate import quad

    a = np.sqrt(x)
    val, _ = quad(lambda s: np.exp(-a * s * s) * np.cos(s**3 / 3), 0, np.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
    return float(np.exp(-2 * a**3 / 3) * val / np.pi)
