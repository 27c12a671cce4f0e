"""Spectral collocation for the singular integral equation of an RHP.

Every straight piece of every arc carries ``n`` Chebyshev points of the
second kind, endpoints included.  The unknown ``U = Phi_+ - Phi_-`` is
represented on each piece by its Chebyshev interpolant, and the equation

    U - C^-[U] (G - I) = G - I

is imposed at all nodes.  At an endpoint the logarithmic part of the Cauchy
transform is dropped (finite part) and the value is taken in the sector just
to the right of the piece; the logarithms cancel between the pieces meeting
at a junction once ``U`` satisfies the zero-sum condition there.  Cauchy
transforms of Chebyshev polynomials are computed by a three-term recurrence
close to a piece and by Gauss-Legendre quadrature further away.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import AssemblyFailure, IllConditioned, SingularMatrix, SolverError
from .rhp import Jump, RHProblem, frobenius_weight, painleve2_rhp

COLLINEAR_TOL = 1e-12
COINCIDENCE_TOL = 1e-13


@dataclass
class Piece:
    a: complex
    b: complex
    jump: Jump
    arc: int

    @property
    def half(self) -> complex:
        return 0.5 * (self.b - self.a)

    @property
    def mid(self) -> complex:
        return 0.5 * (self.a + self.b)


@dataclass
class CollocationSystem:
    A: np.ndarray
    b: np.ndarray
    nodes: np.ndarray
    pieces: list[Piece]
    n_per_piece: int
    G: np.ndarray = field(repr=False, default=None)
    cauchy_minus: np.ndarray = field(repr=False, default=None)

    @property
    def n_points(self) -> int:
        return len(self.nodes)


@dataclass
class Solution:
    U: np.ndarray
    residue: np.ndarray
    system: CollocationSystem

    def u_painleve2(self) -> complex:
        return complex(-2.0 * self.residue[0, 1])

    def phi(self, z) -> np.ndarray:
        """Evaluate ``Phi`` at points off the contour."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        sys_ = self.system
        n = sys_.n_per_piece
        m = self.U.shape[-1]
        out = np.broadcast_to(np.eye(m, dtype=complex), z.shape + (m, m)).copy()
        Vi = _values_to_coeffs(n)
        for k, pc in enumerate(sys_.pieces):
            tau = (z - pc.mid) / pc.half
            mu = _cauchy_moments(tau, n)
            coef = np.einsum("kj,jab->kab", Vi, self.U[k * n:(k + 1) * n])
            out += np.einsum("zk,kab->zab", mu, coef) / (2j * np.pi)
        return out


# ---------------------------------------------------------------------------
# Chebyshev machinery


def chebyshev_nodes(n: int) -> np.ndarray:
    """Chebyshev points of the second kind on [-1, 1], increasing."""
    t = -np.cos(np.pi * np.arange(n) / (n - 1))
    t[0], t[-1] = -1.0, 1.0
    if n % 2:
        t[n // 2] = 0.0
    return t


_VI_CACHE: dict[int, np.ndarray] = {}


def _values_to_coeffs(n: int) -> np.ndarray:
    """Matrix taking node values to Chebyshev coefficients."""
    if n not in _VI_CACHE:
        t = chebyshev_nodes(n)
        V = np.cos(np.outer(np.arccos(np.clip(t, -1, 1)), np.arange(n)))  # V[j, k] = T_k(t_j)
        _VI_CACHE[n] = np.linalg.inv(V)
    return _VI_CACHE[n]


def _cheb_integrals(n: int) -> np.ndarray:
    k = np.arange(n)
    out = np.zeros(n)
    even = k % 2 == 0
    out[even] = 2.0 / (1.0 - k[even] ** 2)
    return out


def _bernstein_rho(tau: np.ndarray) -> np.ndarray:
    s = np.sqrt(tau - 1) * np.sqrt(tau + 1)
    return np.maximum(np.abs(tau + s), np.abs(tau - s))


def _moments_recurrence(mu0: np.ndarray, tau: np.ndarray, n: int) -> np.ndarray:
    I = _cheb_integrals(n)
    mu = np.empty(tau.shape + (n,), dtype=complex)
    mu[..., 0] = mu0
    if n > 1:
        mu[..., 1] = 2.0 + tau * mu0
    for k in range(1, n - 1):
        mu[..., k + 1] = 2 * tau * mu[..., k] - mu[..., k - 1] + 2 * I[k]
    return mu


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(M: int):
    if M not in _GL_CACHE:
        _GL_CACHE[M] = np.polynomial.legendre.leggauss(M)
    return _GL_CACHE[M]


def _cauchy_moments(tau: np.ndarray, n: int) -> np.ndarray:
    """``mu_k(tau) = int_{-1}^{1} T_k(t) / (t - tau) dt`` for tau off [-1, 1]."""
    tau = np.asarray(tau, dtype=complex)
    rho = _bernstein_rho(tau)
    rho0 = 10.0 ** (1.0 / max(n, 1))
    near = rho < rho0
    mu = np.empty(tau.shape + (n,), dtype=complex)
    if np.any(near):
        tn = tau[near]
        # one logarithm keeps the cut on [-1, 1]; two would disagree on signed zeros beyond the ends
        mu0 = np.log((tn - 1) / (tn + 1))
        mu[near] = _moments_recurrence(mu0, tn, n)
    far = ~near
    if np.any(far):
        M = int(np.ceil(18.5 / np.log(rho0))) + 1
        t, w = _gauss_legendre(M)
        T = np.cos(np.outer(np.arange(n), np.arccos(t)))  # (n, M)
        K = w[None, :] / (t[None, :] - tau[far][:, None])  # (F, M)
        mu[far] = K @ T.T
    return mu


def _cauchy_moments_minus(t: np.ndarray, n: int) -> np.ndarray:
    """Boundary values from the right of the oriented segment, |t| < 1."""
    mu0 = np.log((1 - t) / (1 + t)) - 1j * np.pi
    return _moments_recurrence(mu0.astype(complex), t.astype(complex), n)


def _cauchy_moments_endpoint(end: int, u: complex, n: int) -> np.ndarray:
    """Finite parts of ``mu_k`` at ``tau = end`` (``+1`` or ``-1``).

    The point approaches the endpoint along ``tau - end = r u`` and the
    ``log r`` term is discarded.
    """
    if end > 0:
        mu0 = np.log(u) - np.log(2.0)
    else:
        sgn = 1.0 if u.imag >= 0 else -1.0
        mu0 = np.log(2.0) - np.log(u) + 1j * np.pi * sgn
    return _moments_recurrence(np.array(complex(mu0)), np.array(complex(end)), n)


# ---------------------------------------------------------------------------
# Contour preparation


def contour_pieces(rhp: RHProblem) -> list[Piece]:
    """Split every arc into maximal straight pieces."""
    pieces = []
    for k, arc in enumerate(rhp.arcs):
        if arc.ray_angle is not None:
            raise AssemblyFailure("unbounded arcs must be truncated before assembly")
        pts = arc.points
        if len(pts) < 2:
            continue
        start = 0
        for i in range(1, len(pts)):
            last = i == len(pts) - 1
            if not last:
                d1 = pts[i] - pts[start]
                d2 = pts[i + 1] - pts[i]
                cross = abs((np.conj(d1) * d2).imag)
                if cross <= COLLINEAR_TOL * abs(d1) * abs(d2) and (np.conj(d1) * d2).real > 0:
                    continue
            if abs(pts[i] - pts[start]) == 0:
                raise AssemblyFailure(f"arc {k} has a zero-length piece")
            pieces.append(Piece(complex(pts[start]), complex(pts[i]), arc.jump, k))
            start = i
    if not pieces:
        raise AssemblyFailure("problem has no finite pieces")
    return pieces


def truncate_negligible(rhp: RHProblem, threshold: float = 1e-16, samples: int = 9) -> RHProblem:
    """Drop polyline segments on which ``||G - I||_F`` stays below ``threshold``.

    Arcs are broken where segments are dropped; the unknown is taken to vanish
    there.  Unbounded arcs are rejected.
    """
    from .rhp import Arc

    s = np.linspace(0.0, 1.0, samples)
    arcs = []
    for arc in rhp.arcs:
        if arc.ray_angle is not None:
            raise AssemblyFailure("unbounded arcs must be truncated before assembly")
        pts = arc.points
        if len(pts) < 2:
            continue
        a, b = pts[:-1], pts[1:]
        z = a[:, None] + (b - a)[:, None] * s[None, :]
        keep = np.max(frobenius_weight(arc.jump(z)), axis=1) >= threshold
        run: list[int] = []
        for i, kp in enumerate(keep):
            if kp:
                run.append(i)
            if (not kp or i == len(keep) - 1) and run:
                idx = run + [run[-1] + 1]
                arcs.append(Arc(pts[idx], arc.jump, None, arc.label))
                run = []
    return RHProblem(arcs, dict(rhp.meta))


# ---------------------------------------------------------------------------
# Assembly and solution


def assemble(rhp: RHProblem, n_per_arc: int = 20) -> CollocationSystem:
    """Assemble the collocation matrix ``A`` and right-hand side ``b``.

    ``n_per_arc`` nodes are placed on every straight piece.  Unknowns are
    ordered node-major: index ``m * j + c`` is column ``c`` of the rows of
    ``U`` at node ``j``; both rows of ``U`` share the same matrix.
    """
    n = int(n_per_arc)
    if n < 2:
        raise AssemblyFailure("need at least two nodes per piece")
    pieces = contour_pieces(rhp)
    m = rhp.m
    t = chebyshev_nodes(n)
    nodes = np.concatenate([pc.mid + pc.half * t for pc in pieces])
    N = len(nodes)

    Vi = _values_to_coeffs(n)
    ends = np.zeros(N, dtype=bool)
    ends[0::n] = True
    ends[n - 1::n] = True
    end_rows = np.nonzero(ends)[0]
    C = np.empty((N, N), dtype=complex)
    mu_self = _cauchy_moments_minus(t[1:-1], n) @ Vi
    directions = np.array([_approach_direction(pieces, r // n, -1 if r % n == 0 else 1) for r in end_rows])
    for k, pc in enumerate(pieces):
        cols = slice(k * n, (k + 1) * n)
        tau = (nodes - pc.mid) / pc.half
        at_a = np.abs(nodes - pc.a) <= COINCIDENCE_TOL * np.maximum(1.0, np.abs(nodes))
        at_b = np.abs(nodes - pc.b) <= COINCIDENCE_TOL * np.maximum(1.0, np.abs(nodes))
        regular = ~(at_a | at_b)
        regular[k * n:(k + 1) * n] = False
        on = regular & (np.abs(tau.imag) < COINCIDENCE_TOL) & (np.abs(tau.real) <= 1)
        if np.any(on):
            raise AssemblyFailure(f"collocation node lies on piece {k} of another arc")
        C[regular, cols] = _cauchy_moments(tau[regular], n) @ Vi
        C[k * n + 1:(k + 1) * n - 1, cols] = mu_self
        for i, r in enumerate(end_rows):
            if at_a[r] or at_b[r]:
                e = -1 if at_a[r] else 1
                C[r, cols] = _cauchy_moments_endpoint(e, directions[i] / pc.half, n) @ Vi
    C /= 2j * np.pi

    G = np.concatenate([pc.jump(pc.mid + pc.half * t) for pc in pieces])
    if not np.all(np.isfinite(G)):
        raise AssemblyFailure("jump evaluates to a non-finite value at a node")
    GI = G - np.eye(m)
    # A[(j,c),(l,c')] = delta - C[j,l] * GI[j, c', c]
    A = -np.einsum("jl,jdc->jcld", C, GI).reshape(N * m, N * m)
    A[np.diag_indices(N * m)] += 1.0
    b = GI.transpose(0, 2, 1).reshape(N * m, m)  # column r holds row r of G - I
    return CollocationSystem(A, b, nodes, pieces, n, G, C)


def _close(p: complex, q: complex) -> bool:
    return abs(p - q) <= COINCIDENCE_TOL * max(1.0, abs(p))


def _approach_direction(pieces: list[Piece], q: int, end: int) -> complex:
    """Unit direction leaving an endpoint of piece ``q`` into the sector on its right."""
    pc = pieces[q]
    p = pc.a if end < 0 else pc.b
    unit = (pc.b - pc.a) / abs(pc.b - pc.a)
    d = unit if end < 0 else -unit
    # the right side lies clockwise from d at the start and anticlockwise at the end
    turn = -1.0 if end < 0 else 1.0
    gap = np.pi
    for k, other in enumerate(pieces):
        if k == q:
            continue
        for e, pt in ((-1, other.a), (1, other.b)):
            if _close(p, pt):
                ou = (other.b - other.a) / abs(other.b - other.a)
                od = ou if e < 0 else -ou
                ang = np.angle(od / d) * turn
                if ang <= 0:
                    ang += 2 * np.pi
                gap = min(gap, ang)
    return complex(d * np.exp(1j * turn * gap / 2))


def condition_number(system: CollocationSystem) -> float:
    """2-norm condition number from the extreme singular values."""
    s = scipy.linalg.svdvals(system.A)
    if s[-1] == 0:
        return float("inf")
    return float(s[0] / s[-1])


def solve(system: CollocationSystem, cond_limit: float | None = 1e15) -> Solution:
    """Solve for ``U`` and integrate it to get the residue at infinity."""
    if cond_limit is not None:
        kappa = condition_number(system)
        if kappa > cond_limit:
            raise IllConditioned(f"condition number {kappa:.3e} exceeds {cond_limit:.3e}")
    try:
        lu = scipy.linalg.lu_factor(system.A, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SolverError(str(exc)) from exc
    if np.any(np.abs(np.diag(lu[0])) == 0):
        raise SingularMatrix("collocation matrix is singular")
    X = scipy.linalg.lu_solve(lu, system.b)
    N, n = system.n_points, system.n_per_piece
    m = system.b.shape[1]
    # X[(j, c), r] = U_j[r, c]
    U = X.reshape(N, m, m).transpose(0, 2, 1)
    if not np.all(np.isfinite(U)):
        raise SingularMatrix("solution is not finite")
    Vi = _values_to_coeffs(n)
    Ik = _cheb_integrals(n)
    wts = Ik @ Vi  # Clenshaw-Curtis weights on the Lobatto nodes
    res = np.zeros((m, m), dtype=complex)
    for k, pc in enumerate(system.pieces):
        res += pc.half * np.einsum("j,jab->ab", wts, U[k * n:(k + 1) * n])
    return Solution(U, res / (2j * np.pi), system)


def residual_norm(solution: Solution) -> float:
    """Relative residual ``||A U - b|| / ||b||`` in the Frobenius norm."""
    sys_ = solution.system
    m = solution.U.shape[-1]
    X = solution.U.transpose(0, 2, 1).reshape(-1, m)
    nb = float(np.linalg.norm(sys_.b))
    r = float(np.linalg.norm(sys_.A @ X - sys_.b))
    return r / nb if nb > 0 else r


def painleve2_eval(x: float, s1: complex, s2: complex, contour: RHProblem | None = None,
                   n_per_arc: int = 20, radius: float | None = None) -> complex:
    """``u(x; s1, s2)`` from the RHP solved on ``contour``.

    Without a contour, the six rays are cut where their jumps are negligible
    (or at ``radius``) and used directly.
    """
    if contour is None:
        from .rhp import decay_radius

        rhp = painleve2_rhp(x, s1, s2)
        arcs = []
        for arc in rhp.arcs:
            R = radius if radius is not None else max(decay_radius(arc), 1e-3)
            arcs.append(type(arc)(arc.clipped(R), arc.jump, None, arc.label))
        contour = RHProblem(arcs, rhp.meta)
        contour = truncate_negligible(contour)
    sol = solve(assemble(contour, n_per_arc))
    return sol.u_painleve2()
