"""Coarse piecewise-linear re-approximation of deformed contours.

Graph paths follow the grid and carry many breakpoints.  Each arc is
replaced by as few chords as possible, accepting a chord when its weight
stays within a factor ``1 + tau`` of the stretch of path it replaces and it
neither crosses other arcs nor sweeps over their points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OnWalk
from .graph import winding_number
from .rhp import Arc, LocalWeight, RHProblem, frobenius_weight, polyline_strength


@dataclass
class SimplifiedArc:
    breakpoints: np.ndarray
    source: int
    weight_before: float
    weight_after: float


def _orient(a: complex, b: complex, c: complex) -> float:
    return (np.conj(b - a) * (c - a)).imag


def _on_segment(a: complex, b: complex, c: complex, tol: float) -> bool:
    return (min(a.real, b.real) - tol <= c.real <= max(a.real, b.real) + tol
            and min(a.imag, b.imag) - tol <= c.imag <= max(a.imag, b.imag) + tol)


def segments_cross(p1: complex, p2: complex, q1: complex, q2: complex, tol: float = 1e-12) -> bool:
    """Whether two closed segments meet anywhere other than a shared endpoint.

    Collinear overlaps count as crossings even when an endpoint is shared.
    """
    scale = max(abs(p1 - p2), abs(q1 - q2), 1e-300)
    t = tol * scale
    d1 = _orient(q1, q2, p1) / scale
    d2 = _orient(q1, q2, p2) / scale
    d3 = _orient(p1, p2, q1) / scale
    d4 = _orient(p1, p2, q2) / scale
    shared = [(a, b) for a in (p1, p2) for b in (q1, q2) if abs(a - b) <= t]
    if abs(d1) <= t and abs(d2) <= t:
        # collinear: overlap of positive length?
        u = (p2 - p1) / abs(p2 - p1) if abs(p2 - p1) > 0 else 1.0
        s = sorted(((z - p1) / u).real for z in (p1, p2))
        r = sorted(((z - p1) / u).real for z in (q1, q2))
        return min(s[1], r[1]) - max(s[0], r[0]) > t
    if shared:
        return False
    if ((d1 > t and d2 < -t) or (d1 < -t and d2 > t)) and ((d3 > t and d4 < -t) or (d3 < -t and d4 > t)):
        return True
    for d, a, b, c in ((d1, q1, q2, p1), (d2, q1, q2, p2), (d3, p1, p2, q1), (d4, p1, p2, q2)):
        if abs(d) <= t and _on_segment(a, b, c, t):
            return True
    return False


def _crosses_polyline(a: complex, b: complex, pts: np.ndarray) -> bool:
    for u, v in zip(pts[:-1], pts[1:]):
        if segments_cross(a, b, complex(u), complex(v)):
            return True
    return False


def simplify_arc(pts: np.ndarray, jump, obstacles: list[np.ndarray], points: list[complex],
                 tau: float = 0.5, eps_abs: float = 1e-12, quad_pts: int = 16,
                 w: LocalWeight = frobenius_weight) -> list[int]:
    """Indices of the breakpoints kept, first and last included."""
    n = len(pts)
    if n <= 2:
        return list(range(n))
    keep = [0]
    stack = [(0, n - 1)]
    accepted: list[tuple[complex, complex]] = []
    while stack:
        i, j = stack.pop()
        if j - i <= 1:
            keep.append(j)
            accepted.append((complex(pts[i]), complex(pts[j])))
            continue
        if _chord_ok(pts, i, j, jump, obstacles, points, accepted, tau, eps_abs, quad_pts, w):
            keep.append(j)
            accepted.append((complex(pts[i]), complex(pts[j])))
            continue
        a, b = pts[i], pts[j]
        d = b - a
        inner = pts[i + 1:j]
        if abs(d) > 0:
            dist = np.abs(((inner - a) * np.conj(d)).imag) / abs(d)
        else:
            dist = np.abs(inner - a)
        k = i + 1 + int(np.argmax(dist))
        stack.append((k, j))
        stack.append((i, k))
    return keep


def _chord_ok(pts, i, j, jump, obstacles, points, accepted, tau, eps_abs, quad_pts, w) -> bool:
    a, b = complex(pts[i]), complex(pts[j])
    before = polyline_strength(pts[i:j + 1], jump, w, quad_pts)
    after = polyline_strength(np.array([a, b]), jump, w, quad_pts)
    if not after <= (1 + tau) * before + eps_abs:
        return False
    for obs in obstacles:
        if _crosses_polyline(a, b, obs):
            return False
    if _crosses_polyline(a, b, pts[j:]):
        return False
    for u, v in accepted:
        if segments_cross(a, b, u, v):
            return False
    loop = np.concatenate([pts[i:j + 1], [a]])
    for c in points:
        try:
            if winding_number(loop, c) != 0:
                return False
        except OnWalk:
            continue
    return True


def simplify_contour(rhp: RHProblem, tau: float = 0.5, eps_abs: float = 1e-12, quad_pts: int = 16,
                     w: LocalWeight = frobenius_weight) -> tuple[RHProblem, list[SimplifiedArc]]:
    """Replace every polyline by a coarse chord sequence of about the same weight.

    Arcs are processed in order; each chord is tested against the current
    geometry of all other arcs.
    """
    current = [np.asarray(a.points, dtype=complex).copy() for a in rhp.arcs]
    for a in rhp.arcs:
        if a.ray_angle is not None:
            raise ValueError("simplify_contour needs finite arcs")
    records = []
    for idx, arc in enumerate(rhp.arcs):
        pts = current[idx]
        others = [current[k] for k in range(len(current)) if k != idx]
        points = [complex(z) for o in others for z in o]
        keep = simplify_arc(pts, arc.jump, others, points, tau, eps_abs, quad_pts, w)
        new = pts[keep]
        records.append(SimplifiedArc(new, idx, polyline_strength(pts, arc.jump, w, quad_pts),
                                     polyline_strength(new, arc.jump, w, quad_pts)))
        current[idx] = new
    arcs = [Arc(current[k], a.jump, None, a.label) for k, a in enumerate(rhp.arcs)]
    meta = dict(rhp.meta)
    meta["breakpoints"] = {"before": int(sum(len(a.points) for a in rhp.arcs)),
                           "after": int(sum(len(c) for c in current))}
    return RHProblem(arcs, meta), records


__all__ = ["SimplifiedArc", "segments_cross", "simplify_arc", "simplify_contour"]
