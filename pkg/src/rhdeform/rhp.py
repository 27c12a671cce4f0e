"""Riemann-Hilbert problem data: jumps, arcs, the Painleve II problem.

A problem is a list of oriented arcs, each carrying a matrix-valued jump
``G`` with ``Phi_+ = Phi_- G`` (the ``+`` side lies to the left of the
orientation) and ``Phi -> I`` at infinity.  Jumps are described by small
JSON-friendly descriptors so that problems can be written to disk and
rebuilt exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidParameter, NoDecay, SingularStokesData

WEIGHT_CLAMP = 1e300
SINGULAR_TOL = 1e-12

LocalWeight = Callable[[np.ndarray], np.ndarray]


def frobenius_weight(G: np.ndarray) -> np.ndarray:
    """Local relative strength ``||G - I||_F`` of a stack of square matrices.

    Overflowed or undefined entries are mapped to a large finite sentinel so
    that shortest-path computations stay well defined.
    """
    G = np.asarray(G)
    m = G.shape[-1]
    with np.errstate(over="ignore", invalid="ignore"):
        D = G - np.eye(m)
        w = np.sqrt(np.sum(np.abs(D) ** 2, axis=(-2, -1)))
    w = np.where(np.isfinite(w), w, WEIGHT_CLAMP)
    return np.minimum(w, WEIGHT_CLAMP)


# ---------------------------------------------------------------------------
# Jumps


class Jump:
    """A matrix-valued function of the spectral variable.

    Subclasses implement :meth:`__call__` on arrays of points, returning an
    array of shape ``z.shape + (m, m)``, and :meth:`descriptor`.
    """

    m = 2

    def __call__(self, z):
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    @property
    def key(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)

    def inverse(self) -> "Jump":
        return InverseJump(self)

    def __eq__(self, other):
        return isinstance(other, Jump) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}({self.key})"


def _c2(v: complex) -> list:
    v = complex(v)
    return [v.real, v.imag]


def theta(z, x: float):
    """Phase ``(8i/3) z^3 + 2 i x z`` of the Painleve II jumps."""
    z = np.asarray(z, dtype=complex)
    return 1j * (8.0 / 3.0) * z**3 + 2j * x * z


@dataclass(frozen=True, eq=False)
class Painleve2RayJump(Jump):
    """Jump on the ``j``-th Painleve II ray.

    Even ``j`` gives ``[[1, s e^{-theta}], [0, 1]]``, odd ``j`` gives
    ``[[1, 0], [s e^{theta}, 1]]``.
    """

    j: int
    s: complex
    x: float

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        G = np.zeros(z.shape + (2, 2), dtype=complex)
        G[..., 0, 0] = 1.0
        G[..., 1, 1] = 1.0
        if self.s == 0:
            return G
        with np.errstate(over="ignore", invalid="ignore"):
            if self.j % 2 == 0:
                G[..., 0, 1] = self.s * np.exp(-theta(z, self.x))
            else:
                G[..., 1, 0] = self.s * np.exp(theta(z, self.x))
        return G

    def descriptor(self) -> dict:
        return {"type": "painleve2_ray", "j": self.j, "s": _c2(self.s), "x": float(self.x)}


@dataclass(frozen=True, eq=False)
class IdentityJump(Jump):
    m: int = 2

    def __call__(self, z):
        z = np.asarray(z)
        return np.broadcast_to(np.eye(self.m, dtype=complex), z.shape + (self.m, self.m)).copy()

    def descriptor(self) -> dict:
        return {"type": "identity", "m": self.m}

    def inverse(self) -> Jump:
        return self


@dataclass(frozen=True, eq=False)
class ConstantJump(Jump):
    """A constant matrix jump, mostly useful in tests."""

    matrix: tuple

    def __call__(self, z):
        z = np.asarray(z)
        M = np.array(self.matrix, dtype=complex)
        return np.broadcast_to(M, z.shape + M.shape).copy()

    @property
    def m(self):
        return len(self.matrix)

    def descriptor(self) -> dict:
        return {"type": "constant", "matrix": [[_c2(v) for v in row] for row in self.matrix]}


@dataclass(frozen=True, eq=False)
class ProductJump(Jump):
    """Matrix product ``factors[0] @ factors[1] @ ...`` evaluated pointwise."""

    factors: tuple

    def __call__(self, z):
        out = None
        with np.errstate(over="ignore", invalid="ignore"):
            for f in self.factors:
                F = f(z)
                out = F if out is None else out @ F
        return out

    @property
    def m(self):
        return self.factors[0].m

    def descriptor(self) -> dict:
        return {"type": "product", "factors": [f.descriptor() for f in self.factors]}

    def inverse(self) -> Jump:
        return ProductJump(tuple(f.inverse() for f in reversed(self.factors)))


@dataclass(frozen=True, eq=False)
class InverseJump(Jump):
    of: Jump

    def __call__(self, z):
        G = self.of(z)
        if G.shape[-1] == 2:
            # Closed form keeps unit-determinant jumps exact.
            with np.errstate(over="ignore", invalid="ignore"):
                det = G[..., 0, 0] * G[..., 1, 1] - G[..., 0, 1] * G[..., 1, 0]
                out = np.empty_like(G)
                out[..., 0, 0] = G[..., 1, 1] / det
                out[..., 1, 1] = G[..., 0, 0] / det
                out[..., 0, 1] = -G[..., 0, 1] / det
                out[..., 1, 0] = -G[..., 1, 0] / det
            return out
        return np.linalg.inv(G)

    @property
    def m(self):
        return self.of.m

    def descriptor(self) -> dict:
        return {"type": "inverse", "of": self.of.descriptor()}

    def inverse(self) -> Jump:
        return self.of


FACTORIZATIONS = ("LDU", "UDL")


def factor_matrices(G: np.ndarray, kind: str) -> list[np.ndarray]:
    """Pointwise three-term factorization of a stack of 2x2 matrices.

    ``LDU`` pivots on ``G11`` and returns ``[L, D, U]``; ``UDL`` pivots on
    ``G22`` and returns ``[U, D, L]``.  In both cases the product of the
    list in order reproduces ``G``.
    """
    a, b, c, d = G[..., 0, 0], G[..., 0, 1], G[..., 1, 0], G[..., 1, 1]
    det = a * d - b * c
    shape = G.shape[:-2]
    one = np.ones(shape, dtype=complex)
    zero = np.zeros(shape, dtype=complex)

    def mat(p, q, r, s):
        return np.stack([np.stack([p, q], -1), np.stack([r, s], -1)], -2)

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if kind == "LDU":
            L = mat(one, zero, c / a, one)
            D = mat(a, zero, zero, det / a)
            U = mat(one, b / a, zero, one)
            return [L, D, U]
        if kind == "UDL":
            U = mat(one, b / d, zero, one)
            D = mat(det / d, zero, zero, d)
            L = mat(one, zero, c / d, one)
            return [U, D, L]
    raise InvalidParameter(f"unknown factorization {kind!r}")


def factorization_pivot(G: np.ndarray, kind: str) -> np.ndarray:
    return G[..., 0, 0] if kind == "LDU" else G[..., 1, 1]


@dataclass(frozen=True, eq=False)
class FactorJump(Jump):
    """One factor of a pointwise factorization of another jump."""

    kind: str
    index: int
    of: Jump

    def __call__(self, z):
        return factor_matrices(self.of(z), self.kind)[self.index]

    def descriptor(self) -> dict:
        return {"type": "factor", "kind": self.kind, "index": self.index, "of": self.of.descriptor()}


def jump_from_descriptor(d: dict) -> Jump:
    t = d["type"]
    if t == "painleve2_ray":
        return Painleve2RayJump(int(d["j"]), complex(*d["s"]), float(d["x"]))
    if t == "identity":
        return IdentityJump(int(d.get("m", 2)))
    if t == "constant":
        return ConstantJump(tuple(tuple(complex(*v) for v in row) for row in d["matrix"]))
    if t == "product":
        return ProductJump(tuple(jump_from_descriptor(f) for f in d["factors"]))
    if t == "inverse":
        return InverseJump(jump_from_descriptor(d["of"]))
    if t == "factor":
        return FactorJump(d["kind"], int(d["index"]), jump_from_descriptor(d["of"]))
    raise InvalidParameter(f"unknown jump type {t!r}")


def simplify_product(factors: Sequence[Jump]) -> Jump:
    """Build a product jump, dropping identities and flattening nests."""
    flat: list[Jump] = []
    for f in factors:
        if isinstance(f, ProductJump):
            flat.extend(f.factors)
        elif not isinstance(f, IdentityJump):
            flat.append(f)
    if not flat:
        return IdentityJump()
    if len(flat) == 1:
        return flat[0]
    return ProductJump(tuple(flat))


# ---------------------------------------------------------------------------
# Arcs and problems


@dataclass
class Arc:
    """An oriented polyline, optionally continued to infinity by a ray.

    ``points`` are the breakpoints in orientation order.  When
    ``ray_angle`` is set, the arc leaves ``points[-1]`` in direction
    ``exp(1j * ray_angle)`` and never returns.
    """

    points: np.ndarray
    jump: Jump
    ray_angle: float | None = None
    label: str = ""

    def __post_init__(self):
        self.points = np.atleast_1d(np.asarray(self.points, dtype=complex))

    @property
    def start(self) -> complex:
        return complex(self.points[0])

    @property
    def end(self) -> complex | None:
        return None if self.ray_angle is not None else complex(self.points[-1])

    @property
    def finite(self) -> bool:
        return self.ray_angle is None

    def endpoints(self) -> list[complex]:
        return [p for p in (self.start, self.end) if p is not None]

    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.points))))

    def clipped(self, radius: float) -> np.ndarray:
        """Breakpoints with the ray (if any) cut at distance ``radius``."""
        if self.ray_angle is None:
            return self.points.copy()
        tip = self.points[-1] + radius * np.exp(1j * self.ray_angle)
        return np.append(self.points, tip)


@dataclass
class RHProblem:
    arcs: list[Arc]
    meta: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.arcs[0].jump.m if self.arcs else 2

    def endpoints(self) -> list[complex]:
        return [p for a in self.arcs for p in a.endpoints()]

    def breakpoint_count(self) -> int:
        return sum(len(a.points) for a in self.arcs)

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        arcs = []
        for a in self.arcs:
            item = {
                "points": [[p.real, p.imag] for p in a.points],
                "jump": a.jump.descriptor(),
            }
            if a.ray_angle is not None:
                item["ray_angle"] = float(a.ray_angle)
            if a.label:
                item["label"] = a.label
            arcs.append(item)
        return {"arcs": arcs, "meta": self.meta}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "RHProblem":
        arcs = []
        for item in d["arcs"]:
            pts = np.array([complex(re, im) for re, im in item["points"]])
            arcs.append(
                Arc(pts, jump_from_descriptor(item["jump"]), item.get("ray_angle"), item.get("label", ""))
            )
        return cls(arcs, dict(d.get("meta", {})))

    @classmethod
    def from_json(cls, text: str) -> "RHProblem":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Painleve II


@dataclass(frozen=True)
class Painleve2Params:
    x: float
    s1: complex
    s2: complex

    def __post_init__(self):
        if isinstance(self.x, complex) or np.iscomplexobj(self.x):
            raise InvalidParameter("x must be real")
        if not np.isfinite(self.x):
            raise InvalidParameter("x must be finite")


def stokes_complete(s1: complex, s2: complex) -> tuple[complex, ...]:
    """All six Stokes constants from the two free ones."""
    s1, s2 = complex(s1), complex(s2)
    den = 1 + s1 * s2
    if abs(den) < SINGULAR_TOL:
        raise SingularStokesData(f"1 + s1*s2 = {den} is singular")
    s3 = (s2 - s1) / den
    return (s1, s2, s3, -s1, -s2, -s3)


def ray_angles() -> np.ndarray:
    return np.pi * (2 * np.arange(1, 7) - 1) / 6


def painleve2_rhp(x: float, s1: complex, s2: complex) -> RHProblem:
    """Six outward rays from the origin carrying the Painleve II jumps."""
    params = Painleve2Params(x, s1, s2)
    s = stokes_complete(params.s1, params.s2)
    arcs = []
    for j, (ang, sj) in enumerate(zip(ray_angles(), s), start=1):
        arcs.append(Arc(np.array([0j]), Painleve2RayJump(j, sj, float(x)), float(ang), f"ray{j}"))
    meta = {"problem": "painleve2", "x": float(x), "s1": _c2(s1), "s2": _c2(s2)}
    return RHProblem(arcs, meta)


# ---------------------------------------------------------------------------
# Relative strength


def decay_radius(arc: Arc, w: LocalWeight = frobenius_weight, threshold: float = 1e-16,
                 search_radius: float = 50.0, samples: int = 4000) -> float:
    """Distance along a ray beyond which the local weight stays below ``threshold``."""
    if arc.ray_angle is None:
        raise InvalidParameter("arc is not a ray")
    r = np.linspace(0.0, search_radius, samples)
    z = arc.points[-1] + r * np.exp(1j * arc.ray_angle)
    d = w(arc.jump(z))
    above = np.nonzero(d >= threshold)[0]
    if len(above) == 0:
        return 0.0
    if above[-1] == samples - 1:
        raise NoDecay(f"jump on {arc.label or 'ray'} does not decay within radius {search_radius}")
    return float(r[above[-1] + 1])


def polyline_strength(points: np.ndarray, jump: Jump, w: LocalWeight = frobenius_weight,
                      quadrature_points_per_segment: int = 16) -> float:
    """Composite Gauss-Legendre integral of the local weight along a polyline."""
    t, wt = np.polynomial.legendre.leggauss(quadrature_points_per_segment)
    a, b = points[:-1], points[1:]
    if len(a) == 0:
        return 0.0
    z = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * t[None, :]
    vals = w(jump(z))
    return float(np.sum(0.5 * np.abs(b - a) * (vals @ wt)))


def relative_strength(rhp: RHProblem, w: LocalWeight = frobenius_weight,
                      quadrature_points_per_segment: int = 16, threshold: float = 1e-16) -> float:
    """Sum over arcs of the line integral of the local weight.

    Rays are integrated out to their decay radius, split into unit pieces.
    """
    total = 0.0
    for arc in rhp.arcs:
        pts = arc.points
        if arc.ray_angle is not None:
            R = decay_radius(arc, w, threshold)
            n = max(1, int(np.ceil(8 * R)))
            tail = arc.points[-1] + np.linspace(0, R, n + 1)[1:] * np.exp(1j * arc.ray_angle)
            pts = np.append(arc.points, tail)
        total += polyline_strength(pts, arc.jump, w, quadrature_points_per_segment)
    return total
