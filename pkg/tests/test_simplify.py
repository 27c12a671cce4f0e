import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rhdeform.deform import DeformConfig, simple_deformation
from rhdeform.graph import winding_number
from rhdeform.rhp import Arc, ConstantJump, IdentityJump, Painleve2RayJump, RHProblem, painleve2_rhp, polyline_strength
from rhdeform.simplify import segments_cross, simplify_arc, simplify_contour

coord = st.integers(-3, 3).map(float)
point = st.builds(complex, coord, coord)


@pytest.fixture(scope="module")
def deformed():
    return simple_deformation(painleve2_rhp(-4, 1, 2), DeformConfig(nx=9, ny=9)).rhp


class TestSegmentsCross:
    def test_proper_crossing(self):
        assert segments_cross(0, 2 + 2j, 2j, 2)

    def test_disjoint(self):
        assert not segments_cross(0, 1, 1j, 1 + 1j)

    def test_shared_endpoint(self):
        assert not segments_cross(0, 1, 0, 1j)

    def test_touching_interior(self):
        assert segments_cross(0, 2, 1, 1 + 1j)

    def test_collinear_overlap(self):
        assert segments_cross(0, 2, 1, 3)
        assert segments_cross(0, 2, 0, 1)

    def test_collinear_apart(self):
        assert not segments_cross(0, 1, 1, 2)
        assert not segments_cross(0, 1, 2, 3)

    @given(point, point, point, point)
    def test_symmetric(self, a, b, c, d):
        if a == b or c == d:
            return
        r = segments_cross(a, b, c, d)
        assert r == segments_cross(c, d, a, b) == segments_cross(b, a, d, c)


class TestSimplifyArc:
    def test_collinear(self):
        pts = np.linspace(0, 3 + 3j, 7)
        J = ConstantJump(((1, 1), (0, 1)))
        assert simplify_arc(pts, J, [], []) == [0, 6]

    def test_zero_weight_chord(self):
        pts = np.array([0, 1, 1 + 1j, 2 + 1j, 2 + 3j, 3j])
        assert simplify_arc(pts, IdentityJump(), [], []) == [0, 5]

    def test_obstacle_blocks_chord(self):
        pts = np.array([0, 1j, 2 + 1j, 2 + 0j])
        obstacle = np.array([1 - 1j, 1 + 0.5j])
        keep = simplify_arc(pts, IdentityJump(), [obstacle], [])
        assert keep != [0, 3]
        new = pts[keep]
        for u, v in zip(new[:-1], new[1:]):
            assert not segments_cross(u, v, obstacle[0], obstacle[1])

    def test_point_not_swept(self):
        pts = np.array([0, 1j, 2 + 1j, 2 + 0j])
        c = 1 + 0.7j
        keep = simplify_arc(pts, IdentityJump(), [], [c])
        assert keep != [0, 3]
        for i, j in zip(keep[:-1], keep[1:]):
            if j > i + 1:
                assert winding_number(pts[i:j + 1], c) == 0

    def test_weight_rejection(self):
        # the detour avoids a region where the jump is large
        J = Painleve2RayJump(1, 1.0, 4.0)  # lower, grows to the south
        pts = np.array([-1 + 0j, -1 + 1j, 1 + 1j, 1 + 0j])
        keep = simplify_arc(pts, J, [], [], tau=0.5)
        new = pts[keep]
        assert polyline_strength(new, J) <= 1.5 * polyline_strength(pts, J) + 1e-12


class TestSimplifyContour:
    def test_counts_and_endpoints(self, deformed):
        simp, records = simplify_contour(deformed)
        assert simp.meta["breakpoints"]["after"] <= simp.meta["breakpoints"]["before"]
        for a, b in zip(deformed.arcs, simp.arcs):
            assert len(b.points) <= len(a.points)
            assert b.points[0] == a.points[0] and b.points[-1] == a.points[-1]
            assert b.jump == a.jump and b.label == a.label
        assert len(records) == len(deformed.arcs)

    def test_weight_bound(self, deformed):
        tau = 0.5
        _, records = simplify_contour(deformed, tau=tau)
        for r in records:
            assert r.weight_after <= (1 + tau) * r.weight_before + 1e-12

    def test_breakpoints_subset(self, deformed):
        simp, _ = simplify_contour(deformed)
        for a, b in zip(deformed.arcs, simp.arcs):
            orig = set(np.round(a.points, 12).tolist())
            assert set(np.round(b.points, 12).tolist()) <= orig

    def test_no_crossings(self, deformed):
        simp, _ = simplify_contour(deformed)
        segs = [(k, complex(u), complex(v)) for k, a in enumerate(simp.arcs) for u, v in zip(a.points[:-1], a.points[1:])]
        for (k1, a, b), (k2, c, d) in itertools.combinations(segs, 2):
            if k1 != k2:
                assert not segments_cross(a, b, c, d)

    def test_tau_zero_keeps_weight(self, deformed):
        _, records = simplify_contour(deformed, tau=0.0)
        for r in records:
            assert r.weight_after <= r.weight_before + 1e-12

    def test_rejects_rays(self):
        with pytest.raises(ValueError):
            simplify_contour(painleve2_rhp(-1, 1, 2))

    def test_single_segment_untouched(self):
        rhp = RHProblem([Arc(np.array([0, 1 + 0j]), IdentityJump())])
        simp, _ = simplify_contour(rhp)
        assert np.array_equal(simp.arcs[0].points, rhp.arcs[0].points)
