"""Choquet order on the dual ball and the induced order on representing measures.

The Choquet order between two finitely supported probabilities is decided by
the dilation linear program (a transport plan that spreads every atom of the
smaller measure into a probability with the same barycenter).  Sampled convex
functions are only used as an independent cross-check, never as the verdict.

On ``N(mu)`` the order ``<_D`` reduces to the reversed Choquet order of the
fiber probabilities, which is how :func:`prec_d` decides it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import config
from .geometry import (
    GeometryError,
    Space,
    affine_dim,
    ball_face_vertices,
    dual_norm,
    dual_norms,
    minimal_face,
)
from .lp import LinearProgram, feasible_point, solve
from .measures import (
    AtomicMeasure,
    ProbabilityAtoms,
    VectorMeasure,
    barycenter,
    disintegrate,
    recompose,
    total_variation,
)
from .transfer import hustad, is_in_N, transfer_K


class HypothesisError(ValueError):
    """Input falls outside the regime in which a verdict is proved."""


ConvexFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class ConvexPL:
    """Piecewise-linear convex function ``x -> max_j (<x, a_j> + c_j)``."""

    slopes: np.ndarray
    offsets: Optional[np.ndarray] = None

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.slopes, dtype=float))
        if a.shape[0] == 0:
            raise ValueError("a convex PL function needs at least one piece")
        c = np.zeros(a.shape[0]) if self.offsets is None else np.asarray(self.offsets, dtype=float).ravel()
        if c.shape != (a.shape[0],):
            raise ValueError("one offset per piece is required")
        object.__setattr__(self, "slopes", a)
        object.__setattr__(self, "offsets", c)

    @property
    def sublinear(self) -> bool:
        return bool(np.all(self.offsets == 0))

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        vals = X @ self.slopes.T + self.offsets
        return vals.max(axis=-1)

    @classmethod
    def abs_coordinate(cls, i: int, dim: int) -> "ConvexPL":
        e = np.zeros(dim)
        e[i] = 1.0
        return cls(np.vstack([e, -e]))

    def to_json(self) -> dict:
        return {"pieces": [{"a": a.tolist(), "c": float(c)} for a, c in zip(self.slopes, self.offsets)]}

    @classmethod
    def from_json(cls, data) -> "ConvexPL":
        try:
            pieces = data["pieces"]
            return cls([p["a"] for p in pieces], [float(p.get("c", 0.0)) for p in pieces])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed convex PL function ({exc})") from None


def squared_norm(X) -> np.ndarray:
    """Squared Euclidean norm; strictly convex, so it detects every non-extreme atom."""
    X = np.asarray(X, dtype=float)
    return np.sum(X * X, axis=-1)


def random_convex_pl(rng: np.random.Generator, dim: int, pieces: int = 4, sublinear: bool = False) -> ConvexPL:
    a = rng.normal(size=(pieces, dim))
    c = np.zeros(pieces) if sublinear else rng.normal(scale=0.5, size=pieces)
    return ConvexPL(a, c)


# ---------------------------------------------------------------------------
# dilation witnesses and the Choquet order
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DilationWitness:
    """Transport plan ``pi`` certifying ``source < target`` in the Choquet order."""

    source: ProbabilityAtoms
    target: ProbabilityAtoms
    matrix: np.ndarray

    def residual(self) -> float:
        """Largest violation of the row, column, barycenter and sign constraints."""
        pi = self.matrix
        p, q = self.source, self.target
        res = [
            np.max(np.abs(pi.sum(axis=1) - p.float_weights)),
            np.max(np.abs(pi.sum(axis=0) - q.float_weights)),
            np.max(np.abs(pi @ q.points - p.float_weights[:, None] * p.points)),
            max(0.0, -float(pi.min())),
        ]
        return float(max(res))

    def to_json(self) -> dict:
        return {
            "rows": self.source.to_json()["atoms"],
            "columns": self.target.to_json()["atoms"],
            "matrix": self.matrix.tolist(),
        }


def _check_in_ball(p: ProbabilityAtoms, space: Optional[Space]) -> None:
    if space is None:
        return
    if p.dim != space.dim:
        raise GeometryError(f"probability lives in dimension {p.dim}, space has dimension {space.dim}")
    if np.any(dual_norms(space, p.points) > 1.0 + config.eps_geo()):
        raise GeometryError("probability is not supported by the dual ball")


def barycenters_match(p: ProbabilityAtoms, q: ProbabilityAtoms, tol: float | None = None) -> bool:
    tol = config.eps_geo() if tol is None else tol
    return float(np.max(np.abs(barycenter(p) - barycenter(q)))) <= tol


def choquet_leq(
    p: ProbabilityAtoms, q: ProbabilityAtoms, space: Optional[Space] = None
) -> tuple[bool, Optional[DilationWitness]]:
    """Decide ``p < q`` in the Choquet order via the dilation LP.

    Returns the verdict and, when it holds, the transport plan witnessing it.
    """
    _check_in_ball(p, space)
    _check_in_ball(q, space)
    if not barycenters_match(p, q):
        return False, None
    m, n, d = len(p), len(q), p.dim
    pw, qw = p.float_weights, q.float_weights
    rows, rhs = [], []
    for i in range(m):
        r = np.zeros((m, n))
        r[i, :] = 1.0
        rows.append(r.ravel())
        rhs.append(pw[i])
    for j in range(n):
        r = np.zeros((m, n))
        r[:, j] = 1.0
        rows.append(r.ravel())
        rhs.append(qw[j])
    for i in range(m):
        for k in range(d):
            r = np.zeros((m, n))
            r[i, :] = q.points[:, k]
            rows.append(r.ravel())
            rhs.append(pw[i] * p.points[i, k])
    x = feasible_point(A_eq=np.array(rows), b_eq=np.array(rhs))
    if x is None:
        return False, None
    return True, DilationWitness(p, q, x.reshape(m, n))


def separating_function(p: ProbabilityAtoms, q: ProbabilityAtoms, bound: float = 1.0) -> Optional[ConvexPL]:
    """A convex PL function ``phi`` with ``int phi dp > int phi dq``, from the dual of the dilation LP.

    ``phi = max_i l_i`` with one affine piece ``l_i`` per atom of ``p`` and
    ``l_i(y_j) <= phi_j`` at the atoms of ``q``.  Returns ``None`` when the
    best gap is not positive (then ``p < q``).
    """
    m, n, d = len(p), len(q), p.dim
    pw, qw = p.float_weights, q.float_weights
    # variables: a (m*d), b (m), phi (n)
    nv = m * d + m + n
    c = np.zeros(nv)
    for i in range(m):
        c[i * d:(i + 1) * d] = pw[i] * p.points[i]
        c[m * d + i] = pw[i]
    c[m * d + m:] = -qw
    A_ub = np.zeros((m * n, nv))
    for i in range(m):
        for j in range(n):
            r = i * n + j
            A_ub[r, i * d:(i + 1) * d] = q.points[j]
            A_ub[r, m * d + i] = 1.0
            A_ub[r, m * d + m + j] = -1.0
    lp = LinearProgram(c, A_ub=A_ub, b_ub=np.zeros(m * n), lb=np.full(nv, -bound), ub=np.full(nv, bound), sense="max")
    out = solve(lp)
    if not out.optimal or out.value <= 1e-9:
        return None
    x = out.x
    return ConvexPL(x[: m * d].reshape(m, d), x[m * d: m * d + m])


# ---------------------------------------------------------------------------
# maximal measures, envelopes, Mokobodzki criterion
# ---------------------------------------------------------------------------


def is_extreme_point(space: Space, x, tol: float | None = None) -> bool:
    tol = config.eps_geo() if tol is None else tol
    x = space.check_vector(x)
    if space.is_euclidean:
        return abs(float(np.linalg.norm(x)) - 1.0) <= tol
    return bool(np.any(np.max(np.abs(space.dual_vertices - x), axis=1) <= tol))


def is_maximal(p: ProbabilityAtoms, space: Space) -> bool:
    """Maximal in the Choquet order iff every atom is an extreme point of the dual ball."""
    _check_in_ball(p, space)
    return all(is_extreme_point(space, x) for x in p.points)


def _chord_endpoints(x: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Both sphere intersections of the lines through interior ``x`` along ``directions``."""
    out = []
    for u in directions:
        a, b, c = u @ u, 2 * (x @ u), x @ x - 1.0
        disc = np.sqrt(max(b * b - 4 * a * c, 0.0))
        for s in ((-b + disc) / (2 * a), (-b - disc) / (2 * a)):
            y = x + s * u
            out.append(y / np.linalg.norm(y))
    return np.array(out)


def _envelope_lp(values: np.ndarray, points: np.ndarray, x: np.ndarray) -> Optional[float]:
    k = len(points)
    A_eq = np.vstack([points.T, np.ones((1, k))])
    b_eq = np.concatenate([x, [1.0]])
    out = solve(LinearProgram(values, A_eq=A_eq, b_eq=b_eq, sense="max"))
    return out.value if out.optimal else None


def upper_envelope_at(f: ConvexFunction, xstar, space: Space, n_directions: int = 24) -> float:
    """Upper envelope ``f*(x*)``: the best average of ``f`` over extreme-point decompositions of ``x*``.

    For the Euclidean ball, sphere points are returned unchanged and interior
    points use chords through ``x*`` along the coordinate axes plus
    ``n_directions`` fixed directions.  That gives a lower bound for ``f*``
    which is still at least ``f(x*)``.
    """
    x = space.check_vector(xstar)
    tol = config.eps_geo()
    nrm = dual_norm(space, x)
    if nrm > 1.0 + tol:
        raise GeometryError(f"point lies outside the dual ball (norm {nrm!r})")
    if space.is_polytope:
        W = space.dual_vertices
        val = _envelope_lp(np.asarray(f(W), dtype=float), W, x)
        if val is None:
            raise GeometryError("envelope LP is infeasible: point outside the dual ball")
        return float(val)
    if abs(nrm - 1.0) <= tol:
        return float(f(x[None, :])[0])
    rng = np.random.default_rng(12345)
    dirs = np.vstack([np.eye(space.dim), rng.normal(size=(n_directions, space.dim))])
    S = _chord_endpoints(x, dirs)
    val = _envelope_lp(np.asarray(f(S), dtype=float), S, x)
    if val is None:
        raise GeometryError("envelope LP is infeasible")
    return float(max(val, float(f(x[None, :])[0])))


def canonical_convex_family(dim: int) -> list[ConvexFunction]:
    """Coordinate absolute values and the squared Euclidean norm."""
    return [ConvexPL.abs_coordinate(i, dim) for i in range(dim)] + [squared_norm]


def mokobodzki_maximal(
    p: ProbabilityAtoms,
    space: Space,
    samples: int = 8,
    rng: Optional[np.random.Generator] = None,
    tol: float = 1e-7,
) -> bool:
    """Mokobodzki test: ``int f dp == int f* dp`` for the canonical family and ``samples`` random PL functions."""
    _check_in_ball(p, space)
    rng = np.random.default_rng(0) if rng is None else rng
    family = canonical_convex_family(space.dim)
    family += [random_convex_pl(rng, space.dim) for _ in range(samples)]
    w = p.float_weights
    for f in family:
        lhs = float(w @ np.asarray(f(p.points), dtype=float))
        rhs = float(sum(wi * upper_envelope_at(f, x, space) for x, wi in zip(p.points, w)))
        if rhs - lhs > tol:
            return False
    return True


def _face_ray_exit(space: Space, x: np.ndarray, u: np.ndarray, ref: np.ndarray) -> float:
    """Like :func:`ray_exit` but ignoring constraints active at ``ref`` (the ray stays in its face)."""
    V = space.ball.vertices
    tol = 10 * config.eps_geo()
    inactive = np.abs(V @ ref - 1.0) > tol
    du = V[inactive] @ u
    slack = 1.0 - V[inactive] @ x
    pos = du > 1e-13
    if not pos.any():
        return np.inf
    return float(max(np.min(slack[pos] / du[pos]), 0.0))


def decompose_point(space: Space, x, order: Optional[Sequence[int]] = None) -> list[tuple[np.ndarray, float]]:
    """Write a dual-ball point as a convex combination of extreme points.

    Polytope case: recursive Caratheodory by ray shooting.  Take the first
    vertex ``w0`` of the smallest face containing ``x`` (in ``order``, default
    canonical index order), move from ``w0`` through ``x`` to the boundary of
    that face, and recurse on the exit point, which lies in a smaller face.
    """
    x = space.check_vector(x).copy()
    tol = config.eps_geo()
    if space.is_euclidean:
        r = float(np.linalg.norm(x))
        if abs(r - 1.0) <= tol:
            return [(x / r, 1.0)]
        if r <= tol:
            u = np.zeros(space.dim)
            u[0] = 1.0
        else:
            u = x / r
        lam = (1.0 + r) / 2.0
        return [(u, lam), (-u, 1.0 - lam)]

    W = space.dual_vertices
    rank = {int(i): k for k, i in enumerate(order)} if order is not None else None

    def rec(y: np.ndarray, depth: int) -> list[tuple[int, float]]:
        hit = np.nonzero(np.max(np.abs(W - y), axis=1) <= 10 * tol)[0]
        if hit.size:
            return [(int(hit[0]), 1.0)]
        if depth > space.dim + 1:
            raise GeometryError("decomposition did not terminate; point may lie outside the ball")
        idx = ball_face_vertices(space, y, tol=10 * tol)
        if rank is not None:
            idx = sorted(idx, key=lambda i: rank[int(i)])
        w0 = W[int(idx[0])]
        s = _face_ray_exit(space, w0, y - w0, y)
        if not np.isfinite(s) or s <= 1.0 + 1e-12:
            raise GeometryError("degenerate ray in decomposition")
        exit_pt = w0 + s * (y - w0)
        lam = 1.0 / s
        sub = rec(exit_pt, depth + 1)
        return [(i, lam * c) for i, c in sub] + [(int(idx[0]), 1.0 - lam)]

    parts: dict[int, float] = {}
    for i, c in rec(x, 0):
        parts[i] = parts.get(i, 0.0) + c
    return [(W[i].copy(), c) for i, c in sorted(parts.items()) if c > 0]


def maximalize(
    p: ProbabilityAtoms, space: Space, return_witness: bool = False, order: Optional[Sequence[int]] = None
):
    """A maximal probability ``p'`` with ``p < p'``, by decomposing every non-extreme atom."""
    _check_in_ball(p, space)
    targets: dict[tuple, int] = {}
    tpoints: list[np.ndarray] = []
    entries: list[tuple[int, int, float]] = []
    for i, (x, w) in enumerate(zip(p.points, p.weights)):
        parts = [(x, 1.0)] if is_extreme_point(space, x) else decompose_point(space, x, order)
        for y, c in parts:
            key = tuple(np.round(y, 12) + 0.0)
            if key not in targets:
                targets[key] = len(tpoints)
                tpoints.append(y)
            entries.append((i, targets[key], w * c))
    pi = np.zeros((len(p), len(tpoints)), dtype=object if p.weights.dtype == object else float)
    for i, j, v in entries:
        pi[i, j] = pi[i, j] + v
    out = ProbabilityAtoms(np.array(tpoints), list(pi.sum(axis=0)))
    if return_witness:
        return out, DilationWitness(p, out, pi.astype(float))
    return out


# ---------------------------------------------------------------------------
# the order <_D on N(mu)
# ---------------------------------------------------------------------------


def _require_N(nu: AtomicMeasure, mu: VectorMeasure, name: str = "measure") -> None:
    if not is_in_N(nu, mu):
        raise HypothesisError(f"{name} is not in N(mu): it must be positive, represent mu and have norm ||mu||")


def prec_d_report(nu1: AtomicMeasure, nu2: AtomicMeasure) -> dict:
    """Decide ``nu1 <_D nu2`` for two members of the same ``N(mu)``, with diagnostics.

    Raises :class:`HypothesisError` when a measure is not positive or does not
    have the minimal norm; a Hustad mismatch yields ``holds=False``.
    """
    if not (nu1.is_positive and nu2.is_positive):
        raise HypothesisError("<_D is only decided for positive measures")
    mu = hustad(nu1)
    if not hustad(nu2).allclose(mu):
        return {"holds": False, "reason": "Hustad images differ", "fibers": {}}
    _require_N(nu1, mu, "first measure")
    _require_N(nu2, mu, "second measure")
    k1, k2 = disintegrate(nu1), disintegrate(nu2)
    fibers = {}
    for t in mu.support():
        ok, wit = choquet_leq(k2.kernels[t], k1.kernels[t], nu1.space)
        fibers[t] = wit
        if not ok:
            return {"holds": False, "reason": f"fiber at {t!r} is not dilated", "fibers": fibers}
    return {"holds": True, "reason": "every fiber of the second measure is dilated by the first", "fibers": fibers}


def prec_d(nu1: AtomicMeasure, nu2: AtomicMeasure) -> bool:
    """``nu1 <_D nu2`` on ``N(mu)``: every fiber of ``nu2`` precedes the matching fiber of ``nu1``."""
    return bool(prec_d_report(nu1, nu2)["holds"])


def is_minimal(nu: AtomicMeasure, mu: VectorMeasure) -> bool:
    """``<_D``-minimal in ``N(mu)`` iff every fiber probability is maximal."""
    _require_N(nu, mu)
    kern = disintegrate(nu)
    return all(is_maximal(p, nu.space) for p in kern.kernels.values())


def minimalize(nu: AtomicMeasure, mu: VectorMeasure) -> AtomicMeasure:
    """Maximalize every fiber, producing a ``<_D``-minimal measure below ``nu``."""
    _require_N(nu, mu)
    kern = disintegrate(nu)
    new = {t: maximalize(p, nu.space) for t, p in kern.kernels.items()}
    return recompose(type(kern)(kern.sigma, new), nu.space)


@dataclass(frozen=True, eq=False)
class MinimalEnumeration:
    measures: list = field(default_factory=list)
    truncated: bool = False


def fiber_decompositions(space: Space, x, cap: Optional[int] = None) -> tuple[list[ProbabilityAtoms], bool]:
    """Vertices of ``{lam >= 0, sum lam = 1, sum lam_j w_j = x}`` over the minimal face of ``x``.

    Each vertex is a maximal probability with barycenter ``x`` whose support is
    affinely independent.  Returns the list and a truncation flag.
    """
    cap = config.enumeration_cap() if cap is None else cap
    x = space.check_vector(x)
    if space.is_euclidean:
        return [ProbabilityAtoms.dirac(x / np.linalg.norm(x))], False
    face = minimal_face(space, x)
    F = face.vertices
    tol = config.eps_geo()
    out: list[ProbabilityAtoms] = []
    for r in range(1, face.dim + 2):
        for combo in itertools.combinations(range(len(F)), r):
            S = F[list(combo)]
            if affine_dim(S) != r - 1:
                continue
            A = np.vstack([S.T, np.ones((1, r))])
            b = np.concatenate([x, [1.0]])
            lam, *_ = np.linalg.lstsq(A, b, rcond=None)
            if np.max(np.abs(A @ lam - b)) > 1e3 * tol or np.any(lam <= tol):
                continue
            out.append(ProbabilityAtoms(S, list(lam / lam.sum())))
            if len(out) >= cap:
                return out, True
    return out, False


def enumerate_minimal(mu: VectorMeasure, space: Optional[Space] = None, cap: Optional[int] = None) -> MinimalEnumeration:
    """All ``<_D``-minimal measures in ``N(mu)`` (products of per-fiber decompositions), capped."""
    space = mu.space if space is None else space
    cap = config.enumeration_cap() if cap is None else cap
    kmu = transfer_K(mu)
    per_label = []
    truncated = False
    for a in kmu.atoms:
        decs, trunc = fiber_decompositions(space, a.xstar, cap)
        truncated |= trunc
        per_label.append([(a.t, a.w, d) for d in decs])
    measures = []
    for combo in itertools.product(*per_label):
        atoms = [(t, y, s * lam) for t, s, d in combo for y, lam in zip(d.points, d.weights)]
        measures.append(AtomicMeasure(space, atoms))
        if len(measures) >= cap:
            truncated = True
            break
    return MinimalEnumeration(measures, truncated)


# ---------------------------------------------------------------------------
# sublinear test functions, the trivial order on vector measures, splits
# ---------------------------------------------------------------------------


def _face_normal(space: Space, x: np.ndarray) -> Optional[np.ndarray]:
    """A primal vertex ``v`` with ``<x, v> = 1``, exposing the face of ``x``."""
    if space.is_euclidean:
        return x / np.linalg.norm(x)
    V = space.ball.vertices
    hits = np.nonzero(np.abs(V @ x - 1.0) <= config.eps_geo())[0]
    return V[hits[0]] if hits.size else None


def sublinear_family(
    p: ProbabilityAtoms, q: ProbabilityAtoms, space: Space, samples: int, rng: np.random.Generator
) -> list[ConvexPL]:
    """Sublinear PL test functions adapted to the common face of ``p`` and ``q``.

    A convex PL function ``max_j (<a_j, y> + c_j)`` agrees on the hyperplane
    ``<y, v> = 1`` with the sublinear ``max_j <a_j + c_j v, y>``; lifting
    random convex functions this way keeps the family sublinear.
    """
    d = space.dim
    x = barycenter(p)
    v = _face_normal(space, x)
    fam = [ConvexPL.abs_coordinate(i, d) for i in range(d)]
    fam.append(ConvexPL(np.vstack([np.eye(d), -np.eye(d)])))
    support = np.vstack([p.points, q.points])
    for k in range(samples):
        kind = k % 3
        if kind == 0 or v is None:
            fam.append(random_convex_pl(rng, d, pieces=int(rng.integers(2, 6)), sublinear=True))
            continue
        if kind == 1:
            g = random_convex_pl(rng, d, pieces=int(rng.integers(2, 6)))
            a, c = g.slopes, g.offsets
        else:
            # tangent planes of a random strictly convex quadratic at the support points
            L = rng.normal(size=(d, d))
            Q = L @ L.T + 0.1 * np.eye(d)
            center = rng.normal(scale=0.5, size=d)
            grads = 2 * (support - center) @ Q
            vals = np.einsum("ij,jk,ik->i", support - center, Q, support - center)
            a = grads
            c = vals - np.sum(grads * support, axis=1)
        fam.append(ConvexPL(a + c[:, None] * v[None, :]))
    return fam


def sublinear_separating_function(
    p: ProbabilityAtoms, q: ProbabilityAtoms, bound: float = 1.0
) -> Optional[ConvexPL]:
    """A sublinear PL function ``f`` with ``int f dp > int f dq``, or ``None``.

    ``f = max_i <a_i, .>`` with one slope per atom ``y_i`` of ``p``, chosen so
    that ``<a_i, y_i> = f(y_i)``; ``phi_j >= <a_i, z_j>`` bounds ``f`` at the atoms
    of ``q``.  Any sublinear function is matched on the support by such a
    choice (take ``a_i`` a subgradient at ``y_i``), so this LP is exact.
    """
    m, n, d = len(p), len(q), p.dim
    pw, qw = p.float_weights, q.float_weights
    # variables: a (m*d), phi (n)
    nv = m * d + n
    c = np.zeros(nv)
    for i in range(m):
        c[i * d:(i + 1) * d] = pw[i] * p.points[i]
    c[m * d:] = -qw
    A_ub = np.zeros((m * n + m * m, nv))
    r = 0
    for i in range(m):
        for j in range(n):
            A_ub[r, i * d:(i + 1) * d] = q.points[j]
            A_ub[r, m * d + j] = -1.0
            r += 1
    for i in range(m):
        for k in range(m):
            A_ub[r, i * d:(i + 1) * d] += p.points[k]
            A_ub[r, k * d:(k + 1) * d] -= p.points[k]
            r += 1
    lp = LinearProgram(c, A_ub=A_ub, b_ub=np.zeros(len(A_ub)), lb=np.full(nv, -bound), ub=np.full(nv, bound), sense="max")
    out = solve(lp)
    if not out.optimal or out.value <= 1e-9:
        return None
    return ConvexPL(out.x[: m * d].reshape(m, d))


def sublinear_order_test(
    p: ProbabilityAtoms,
    q: ProbabilityAtoms,
    space: Space,
    samples: int = 200,
    rng: Optional[np.random.Generator] = None,
    tol: float = 1e-9,
) -> bool:
    """Check that ``int f dp <= int f dq`` for sublinear ``f``.

    Tests a sampled family adapted to the common face together with the
    LP-optimal sublinear separator.  Requires a common barycenter on the dual
    sphere.
    """
    _check_in_ball(p, space)
    _check_in_ball(q, space)
    if not barycenters_match(p, q):
        raise HypothesisError("measures must share their barycenter")
    if not space.on_dual_sphere(barycenter(p)):
        raise HypothesisError("common barycenter must lie on the dual sphere")
    rng = np.random.default_rng(0) if rng is None else rng
    pw, qw = p.float_weights, q.float_weights
    fam = sublinear_family(p, q, space, samples, rng)
    # the LP-optimal separator makes the verdict exact when sampling misses
    best = sublinear_separating_function(p, q)
    if best is not None:
        fam.append(best)
    for f in fam:
        if float(pw @ f(p.points)) > float(qw @ f(q.points)) + tol:
            return False
    return True


def prec_b(mu1: VectorMeasure, mu2: VectorMeasure) -> bool:
    """The order induced by the cone of sublinear functionals collapses to equality."""
    if mu1.space != mu2.space:
        raise ValueError("measures live on different spaces")
    return mu1.allclose(mu2)


def fiber_split(
    space: Space, xstar, candidates: np.ndarray, min_distance: Optional[float] = None
) -> Optional[ProbabilityAtoms]:
    """Try to write ``xstar`` as a convex combination of ball points distinct from it.

    Candidates closer than ``min_distance`` to ``xstar`` or outside the ball
    are discarded.  The default ``10 * sqrt(eps_geo)`` is the smallest
    separation the tolerance resolves: a sphere chord of length ``d`` sags by
    about ``d**2 / 8``, which must exceed the LP feasibility tolerance.
    Returns the split, or ``None`` when the LP is infeasible.
    """
    if min_distance is None:
        min_distance = 10.0 * np.sqrt(config.eps_geo())
    x = space.check_vector(xstar)
    C = np.atleast_2d(np.asarray(candidates, dtype=float))
    keep = (np.linalg.norm(C - x, axis=1) > min_distance) & (dual_norms(space, C) <= 1.0 + config.eps_geo())
    C = C[keep]
    if len(C) == 0:
        return None
    A_eq = np.vstack([C.T, np.ones((1, len(C)))])
    lam = feasible_point(A_eq=A_eq, b_eq=np.concatenate([x, [1.0]]))
    if lam is None:
        return None
    nz = lam > 1e-12
    return ProbabilityAtoms(C[nz], list(lam[nz] / lam[nz].sum()))


def midpoint_split(space: Space, xstar) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Distinct sphere points ``x1, x2`` with ``xstar = (x1 + x2) / 2``, or ``None`` if ``xstar`` is extreme."""
    x = space.check_vector(xstar)
    if is_extreme_point(space, x):
        return None
    face = minimal_face(space, x)
    w0 = face.vertices[0]
    u = w0 - x
    s = min(1.0, _face_ray_exit(space, x, -u, x))
    return x + s * u, x - s * u
