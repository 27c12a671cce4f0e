from types import SimpleNamespace

import numpy as np
import pytest

from rhdeform.deform import DeformConfig, contour_weight, simple_deformation
from rhdeform.errors import NoEnclosingWalk
from rhdeform.graph import (
    DualRay,
    GraphPath,
    PlanarGraph,
    Rectangle,
    WeightedPlanarGraph,
    WindingField,
    build_grid_graph,
    homological_interior,
    path_in,
    shortest_path,
)
from rhdeform.lensing import (
    constrained_shortest_path,
    enclosing_shortest_walk,
    enclosing_walk_in,
    factorizations_2x2,
    lensing_deformation,
)
from rhdeform.rhp import (
    Arc,
    ConstantJump,
    Painleve2RayJump,
    ProductJump,
    RHProblem,
    painleve2_rhp,
)

from oracles import enclosing_instance, random_weighted_grid, weighted


def unit_grid():
    g = build_grid_graph(Rectangle(0, 2, 0, 2), 3, 3, centers=False)
    return WeightedPlanarGraph(g, np.ones(g.n_edges))


def base_walk(g, walk):
    return [int(g.base_vertex[v]) for v in walk.vertices]


class TestEnclosingWalk:
    def test_point_in_split(self):
        # the sliver between the banks is enclosed by the opposite bank itself
        wg = unit_grid()
        q = wg.graph.walk_from_vertices([4, 5])
        for sign in (1, -1):
            walk, gq = enclosing_shortest_walk(wg, q, sign=sign, return_graph=True)
            left, right = gq.banks("__q")
            bank = right if sign == 1 else left
            assert (walk.vertices, walk.edges) == (bank.vertices, bank.edges)
            assert walk.weight == 1

    def test_box_sides(self):
        wg = unit_grid()
        q = wg.graph.walk_from_vertices([4, 5])
        below, gq = enclosing_shortest_walk(wg, q, c=1.5 + 0.5j, sign=1, return_graph=True)
        assert base_walk(gq, below) == [4, 1, 2, 5] and below.weight == 3
        above, gq = enclosing_shortest_walk(wg, q, c=1.5 + 1.5j, sign=-1, return_graph=True)
        assert base_walk(gq, above) == [4, 7, 8, 5] and above.weight == 3

    def test_box_full_turn(self):
        # winding +1 around the upper box needs a full turn after following q
        wg = unit_grid()
        q = wg.graph.walk_from_vertices([4, 5])
        assert enclosing_shortest_walk(wg, q, c=1.5 + 1.5j, sign=1).weight == 5

    def test_exhaustive_oracle(self):
        rng = np.random.default_rng(21)
        for k in range(60):
            walk_w, best, _ = enclosing_instance(rng, *((3, 3) if k % 2 else (4, 3)))
            assert walk_w == best

    def test_sign_symmetry(self):
        rng = np.random.default_rng(22)
        for _ in range(30):
            g, base = random_weighted_grid(rng, 4, 4)
            wg = weighted(g, base)
            s, t = (int(v) for v in rng.choice(g.n_vertices, 2, replace=False))
            q = path_in(weighted(g, rng.uniform(0.1, 1, len(base))), [s], [t])
            a = enclosing_shortest_walk(wg, q, sign=-1)
            b = enclosing_shortest_walk(wg, q.reversed(), sign=1)
            assert a.weight == pytest.approx(b.weight, rel=1e-12)

    def test_endpoints(self):
        rng = np.random.default_rng(23)
        g, base = random_weighted_grid(rng, 4, 4)
        q = g.walk_from_vertices([0, 1, 2])
        walk, gq = enclosing_shortest_walk(weighted(g, base), q, return_graph=True)
        assert base_walk(gq, walk)[0] == 0 and base_walk(gq, walk)[-1] == 2

    def test_bad_input(self):
        wg = unit_grid()
        with pytest.raises(ValueError):
            enclosing_shortest_walk(wg, wg.graph.walk_from_vertices([4, 5]), sign=2)
        with pytest.raises(ValueError):
            enclosing_shortest_walk(wg, wg.graph.walk_from_vertices([4, 5, 8, 7, 4]))

    def test_no_enclosing_walk(self):
        # restricted to one bank, no walk can wind five times
        g = build_grid_graph(Rectangle(0, 2, 0, 1), 3, 2, centers=False)
        q = g.walk_from_vertices([0, 1, 2])
        gq = g.with_crack("x", q)
        ray = DualRay.from_crack(gq, "x")
        mask = np.zeros(gq.n_vertices, dtype=bool)
        mask[[int(v) for v in gq.banks("x")[0].vertices]] = True
        with pytest.raises(NoEnclosingWalk):
            enclosing_walk_in(WeightedPlanarGraph(gq, np.ones(gq.n_edges)), [0], [2], ray, 5, mask)


class TestFactorizations:
    def test_upper_unit(self):
        G = ConstantJump(((1, 2 + 1j), (0, 1)))
        facs = {f.kind: f for f in factorizations_2x2(G, np.array([0j, 1]))}
        ldu = facs["LDU"]
        assert len(ldu.factors) == 1 and ldu.factors[0].index == 2
        assert np.allclose(ldu.product(np.array([0.3j])), G(np.array([0.3j])))

    def test_lower_unit(self):
        G = Painleve2RayJump(1, 1.0, -2.0)
        z = np.array([0.1 + 0.2j, -0.3j])
        for f in factorizations_2x2(G, z):
            assert len(f.factors) == 1
            assert np.allclose(f.product(z), G(z))

    def test_pivot_vanishing_omitted(self):
        G = ConstantJump(((0, 1), (-1, 0)))
        assert factorizations_2x2(G, np.array([0j])) == []
        G = ConstantJump(((1, 1), (-1, 0)))
        assert [f.kind for f in factorizations_2x2(G, np.array([0j]))] == ["LDU"]

    def test_reconstruction(self):
        rng = np.random.default_rng(24)
        z = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-2, 2, 50)
        rhp = painleve2_rhp(-3, 1, 2)
        G = ProductJump((rhp.arcs[0].jump, rhp.arcs[1].jump))
        facs = factorizations_2x2(G, z)
        assert {f.kind for f in facs} == {"LDU", "UDL"}
        # G11 = 1 for a lower-times-upper product, so the LDU middle factor is dropped
        assert {f.kind: len(f.factors) for f in facs} == {"LDU": 2, "UDL": 3}
        for f in facs:
            ref = G(z)
            err = np.linalg.norm(f.product(z) - ref, axis=(1, 2)) / np.linalg.norm(ref, axis=(1, 2))
            assert err.max() < 1e-12


def family_state(parts_ranks, fixed):
    parts = [SimpleNamespace(family=0, rank=r) for r in parts_ranks]
    return SimpleNamespace(parts=parts, fixed=fixed)


def sector_toward(g, base, neighbour):
    for v in range(g.n_vertices):
        if int(g.base_vertex[v]) == base and any(int(g.base_vertex[u]) == neighbour for u, _ in g.adj[v]):
            return v
    raise AssertionError


class TestConstrainedPath:
    def setup_method(self):
        self.g0 = build_grid_graph(Rectangle(0, 4, 0, 4), 5, 5, centers=False)

    def weights(self, g, north):
        y = g.positions.imag
        a, b = g.edges[:, 0], g.edges[:, 1]
        mid = 0.5 * (y[a] + y[b])
        return WeightedPlanarGraph(g, np.where(mid > 2, north, 1.0))

    def test_case1(self):
        g = self.g0
        wg = self.weights(g, 0.1)
        state = family_state([0, 1], [])
        p = constrained_shortest_path(state, g, wg, 0, [10], [14], np.ones(g.n_vertices, dtype=bool))
        assert p == shortest_path(wg, 10, 14)

    @pytest.mark.parametrize("sibling_rank,below", [(2, True), (0, False)])
    def test_case2_side(self, sibling_rank, below):
        # sibling along the middle row; the cheap half is the forbidden one
        g = self.g0.with_crack(0, self.g0.walk_from_vertices([10, 11, 12, 13, 14]))
        wg = self.weights(g, 0.1 if below else 10.0)
        state = family_state([sibling_rank, 1], [0])
        src, dst = [10], [14]
        p = constrained_shortest_path(state, g, wg, 1, src, dst, np.ones(g.n_vertices, dtype=bool))
        ys = g.positions[list(p.vertices)].imag
        assert (ys <= 2).all() if below else (ys >= 2).all()

    def test_case3_containment(self):
        g0 = self.g0
        right = g0.walk_from_vertices([10, 5, 6, 7, 8, 9, 14])
        left = g0.walk_from_vertices([10, 15, 16, 17, 18, 19, 14])
        g = g0.with_crack(0, right).with_crack(2, left)
        wg = WeightedPlanarGraph(g, np.where(np.abs(g.positions[g.edges[:, 0]].imag - 2) < 0.5, 5.0, 1.0))
        state = family_state([0, 1, 2], [0, 2])
        src = [sector_toward(g, 10, 11)]
        dst = [sector_toward(g, 14, 13)]
        p = constrained_shortest_path(state, g, wg, 1, src, dst, np.ones(g.n_vertices, dtype=bool))
        _, lr = g.banks(2)
        rl, _ = g.banks(0)
        loop = GraphPath(lr.vertices[:-1] + rl.vertices[::-1], lr.edges + rl.edges[::-1])
        inside = homological_interior(loop, g) | set(lr.vertices) | set(rl.vertices)
        assert set(p.vertices) <= inside
        ys = g.positions[list(p.vertices)].imag
        assert (ys >= 1).all() and (ys <= 3).all()


def toy_problem(rng):
    x = float(rng.uniform(-3, -1))
    s1, s2 = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
    J = ProductJump((Painleve2RayJump(1, s1, x), Painleve2RayJump(2, s2, x)))
    y = float(rng.uniform(-0.3, 0.3))
    pts = np.array([-1.2 + y * 1j, 0.1 + (y + 0.2) * 1j, 1.2 + y * 1j])
    rhp = RHProblem([Arc(pts, J, None, "toy")])
    rhp.meta["rect"] = [-2.0, 2.0, -2.0, 2.0]
    return rhp


def family_order_ok(res) -> bool:
    """Consecutive family members never cross: each loop right ∘ reverse(left) winds 0 or +1 everywhere."""
    g = PlanarGraph(res.embedding)
    fam = sorted((p.rank, i) for i, p in enumerate(res.parts) if p.family is not None)
    for (_, a), (_, b) in zip(fam, fam[1:]):
        pa, pb = res.paths[a], res.paths[b]
        if len(pa) < 2 or len(pb) < 2:
            continue
        loop = g.walk_from_vertices(list(pa) + list(pb[::-1])[1:])
        if not set(WindingField(g, loop).face.tolist()) <= {0, 1}:
            return False
    return True


class TestLensingDeformation:
    def test_monotone_weight(self):
        rng = np.random.default_rng(25)
        cfg = DeformConfig(nx=9, ny=9, check_condition_ii=False)
        for _ in range(20):
            rhp = toy_problem(rng)
            res = lensing_deformation(rhp, cfg)
            assert contour_weight(res.rhp) <= contour_weight(rhp) * (1 + 1e-12)
            chosen = [v for v in res.variants if v["chosen"]]
            assert len(chosen) == 1 and chosen[0]["kind"] == res.chosen

    def test_family_order_preserved(self):
        rng = np.random.default_rng(26)
        cfg = DeformConfig(nx=9, ny=9, check_condition_ii=False)
        seen = 0
        for _ in range(10):
            res = lensing_deformation(toy_problem(rng), cfg)
            if res.deformation is not None:
                assert family_order_ok(res.deformation)
                seen += 1
        assert seen > 0

    def test_product_reconstructs(self):
        rng = np.random.default_rng(27)
        rhp = toy_problem(rng)
        J = rhp.arcs[0].jump
        z = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-2, 2, 50)
        for fac in factorizations_2x2(J, z):
            M = fac.product(z)
            assert np.max(np.linalg.norm(M - J(z), axis=(1, 2)) / np.linalg.norm(J(z), axis=(1, 2))) < 1e-12

    def test_trivial_factorization_keeps_baseline(self):
        rhp = RHProblem([Arc(np.array([-1 + 0j, 1]), Painleve2RayJump(2, 1.0, -1.0), None, "u")])
        rhp.meta["rect"] = [-2.0, 2.0, -2.0, 2.0]
        res = lensing_deformation(rhp, DeformConfig(nx=9, ny=9))
        assert res.chosen == "baseline"
        assert all(v["status"].startswith("skipped") for v in res.variants[1:])

    def test_needs_rectangle(self):
        rhp = RHProblem([Arc(np.array([-1 + 0j, 1]), Painleve2RayJump(2, 1.0, -1.0))])
        with pytest.raises(ValueError):
            lensing_deformation(rhp)

    def test_after_deformation(self):
        res = simple_deformation(painleve2_rhp(-2, 1, 2), DeformConfig(nx=9, ny=9))
        out = lensing_deformation(res.rhp, DeformConfig(nx=9, ny=9))
        assert contour_weight(out.rhp) <= contour_weight(res.rhp) * (1 + 1e-12)
