"""Finite-dimensional normed spaces given by their unit ball.

A :class:`Space` is either a centrally symmetric polytope (vertex list) or the
Euclidean ball.  The dual ball of a polytope space is the polar polytope, whose
vertices are the facet normals of the primal ball normalised to offset 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from . import config
from .lp import feasible_point


class GeometryError(ValueError):
    """Invalid ball description or a point violating a geometric precondition."""


class DimensionError(GeometryError):
    pass


class _WholeSphere:
    """Marker for the extreme set of a strictly convex (Euclidean) dual ball."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "WHOLE_SPHERE"


WHOLE_SPHERE = _WholeSphere()


@dataclass(frozen=True, eq=False)
class PolytopeBall:
    vertices: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] == 0:
            raise GeometryError("polytope ball needs a nonempty (n, dim) vertex array")
        object.__setattr__(self, "vertices", V)
        V.setflags(write=False)

    def __eq__(self, other):
        return (
            isinstance(other, PolytopeBall)
            and self.vertices.shape == other.vertices.shape
            and bool(np.all(self.vertices == other.vertices))
        )

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def to_json(self) -> dict:
        return {"type": "polytope", "vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class EuclideanBall:
    def to_json(self) -> dict:
        return {"type": "euclidean"}


BallSpec = Union[PolytopeBall, EuclideanBall]


@dataclass(frozen=True)
class Face:
    """A face of the dual unit ball.

    ``vertex_indices`` index into :meth:`Space.dual_vertices` (polytope case);
    for the Euclidean ball ``point`` holds the single sphere point.
    """

    space: "Space" = field(repr=False)
    vertex_indices: tuple[int, ...] = ()
    point: Optional[np.ndarray] = None
    dim: int = 0

    @property
    def vertices(self) -> np.ndarray:
        if self.point is not None:
            return self.point.reshape(1, -1)
        return self.space.dual_vertices[list(self.vertex_indices)]

    @property
    def is_simplex(self) -> bool:
        return len(self.vertices) == self.dim + 1


def affine_dim(points: np.ndarray, tol: float | None = None) -> int:
    points = np.atleast_2d(points)
    if len(points) <= 1:
        return 0
    tol = config.eps_geo() if tol is None else tol
    return int(np.linalg.matrix_rank(points[1:] - points[0], tol=max(tol, 1e-12)))


def _in_hull_of_others(V: np.ndarray, i: int) -> bool:
    others = np.delete(V, i, axis=0)
    k = len(others)
    A_eq = np.vstack([others.T, np.ones((1, k))])
    b_eq = np.concatenate([V[i], [1.0]])
    return feasible_point(A_eq=A_eq, b_eq=b_eq) is not None


@dataclass(frozen=True)
class Space:
    """Real normed space ``(R^dim, ||.||)`` whose unit ball is ``ball``.

    Dual vectors are paired with primal vectors by the dot product.
    """

    dim: int
    ball: BallSpec

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise GeometryError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        if isinstance(self.ball, PolytopeBall):
            self._validate_polytope()
        elif not isinstance(self.ball, EuclideanBall):
            raise GeometryError(f"unknown ball type {type(self.ball).__name__}")

    def _validate_polytope(self):
        V = self.ball.vertices
        tol = config.eps_geo()
        if V.shape[1] != self.dim:
            raise DimensionError(f"vertices have length {V.shape[1]}, space dim is {self.dim}")
        if not np.all(np.isfinite(V)):
            raise GeometryError("vertex coordinates must be finite")
        for v in V:
            if not np.any(np.all(np.abs(V + v) <= tol, axis=1)):
                raise GeometryError(f"ball is not centrally symmetric: -{v.tolist()} missing")
        if np.linalg.matrix_rank(V, tol=tol) < self.dim:
            raise GeometryError("ball vertices do not span the space")
        for i in range(len(V)):
            if _in_hull_of_others(V, i):
                raise GeometryError(f"vertex {V[i].tolist()} is redundant (in hull of the others)")

    # constructors -----------------------------------------------------
    @classmethod
    def polytope(cls, vertices: Sequence[Sequence[float]]) -> "Space":
        V = np.asarray(vertices, dtype=float)
        if V.ndim == 1:
            V = V.reshape(-1, 1)
        return cls(V.shape[1], PolytopeBall(V))

    @classmethod
    def euclidean(cls, dim: int) -> "Space":
        return cls(dim, EuclideanBall())

    @classmethod
    def cube(cls, dim: int) -> "Space":
        """Primal ball ``[-1, 1]^dim`` (sup norm); its dual ball is the cross-polytope."""
        return cls.polytope(list(itertools.product([-1.0, 1.0], repeat=dim)))

    @classmethod
    def cross_polytope(cls, dim: int) -> "Space":
        """Primal ball ``conv{+-e_i}`` (l1 norm); its dual ball is the cube."""
        eye = np.eye(dim)
        return cls.polytope(np.vstack([eye, -eye]))

    @classmethod
    def from_json(cls, data: dict) -> "Space":
        try:
            dim = data["dim"]
            ball = data["ball"]
            kind = ball["type"]
        except (KeyError, TypeError) as exc:
            raise GeometryError(f"malformed space description: missing {exc}") from None
        if kind == "euclidean":
            return cls(dim, EuclideanBall())
        if kind == "polytope":
            V = np.asarray(ball["vertices"], dtype=float)
            if V.ndim != 2 or V.shape[1] != dim:
                raise DimensionError(f"vertices must be a list of {dim}-vectors")
            return cls(dim, PolytopeBall(V))
        raise GeometryError(f"unknown ball type {kind!r}")

    def to_json(self) -> dict:
        return {"dim": self.dim, "ball": self.ball.to_json()}

    # basic predicates -------------------------------------------------
    @property
    def is_polytope(self) -> bool:
        return isinstance(self.ball, PolytopeBall)

    @property
    def is_euclidean(self) -> bool:
        return isinstance(self.ball, EuclideanBall)

    def check_vector(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dim,):
            raise DimensionError(f"expected vectors of length {self.dim}, got shape {x.shape}")
        return x

    @cached_property
    def dual_vertices(self) -> np.ndarray:
        """Vertices of the dual ball in canonical (lexicographic) order."""
        if not self.is_polytope:
            raise GeometryError("Euclidean dual ball has no vertex list")
        normals = np.array([a for a, _ in facets(self.ball, self.dim)])
        order = np.lexsort(normals.T[::-1])
        out = normals[order] + 0.0  # no negative zeros
        out.setflags(write=False)
        return out

    def polar(self) -> "Space":
        """The space whose unit ball is this space's dual ball."""
        if self.is_euclidean:
            return self
        return Space.polytope(self.dual_vertices)

    def on_dual_sphere(self, xstar, tol: float | None = None) -> bool:
        tol = config.eps_geo() if tol is None else tol
        return abs(dual_norm(self, xstar) - 1.0) <= tol

    def in_dual_ball(self, xstar, tol: float | None = None) -> bool:
        tol = config.eps_geo() if tol is None else tol
        return dual_norm(self, xstar) <= 1.0 + tol


def primal_norm(space: Space, x) -> float:
    """Minkowski gauge of ``x`` with respect to the unit ball."""
    x = space.check_vector(x)
    if space.is_euclidean:
        return float(np.linalg.norm(x))
    return float(max(0.0, np.max(space.dual_vertices @ x)))


def dual_norm(space: Space, xstar) -> float:
    """Support function of the unit ball: ``max <xstar, v>`` over the ball."""
    xstar = space.check_vector(xstar)
    if space.is_euclidean:
        return float(np.linalg.norm(xstar))
    return float(np.max(space.ball.vertices @ xstar))


def dual_norms(space: Space, X) -> np.ndarray:
    """Row-wise :func:`dual_norm` for an ``(n, dim)`` array."""
    X = space.check_vector(np.atleast_2d(X))
    if space.is_euclidean:
        return np.linalg.norm(X, axis=1)
    return np.max(X @ space.ball.vertices.T, axis=1)


def dual_ball_extreme_points(space: Space):
    """Vertices of the dual ball, or :data:`WHOLE_SPHERE` for the Euclidean ball."""
    if space.is_euclidean:
        return WHOLE_SPHERE
    return space.dual_vertices


def facets(ball: PolytopeBall, dim: int, *, chunk: int = 50_000) -> list[tuple[np.ndarray, float]]:
    """Facets of a centrally symmetric polytope as ``(normal, offset)`` pairs.

    Offsets are normalised to 1, i.e. the facet is ``{x : normal @ x = 1}``.
    Brute force over ``dim``-subsets of vertices.
    """
    if not isinstance(ball, PolytopeBall):
        raise GeometryError("facets() needs a polytope ball")
    if dim > config.facet_dim_bound():
        raise GeometryError(f"dimension {dim} exceeds the facet enumeration bound {config.facet_dim_bound()}")
    V = ball.vertices
    if V.shape[1] != dim:
        raise DimensionError("vertex length does not match dim")
    if np.linalg.matrix_rank(V) < dim:
        raise GeometryError("degenerate polytope: vertices are not full-dimensional")
    tol = config.eps_geo()
    found: dict[tuple, np.ndarray] = {}
    ones = np.ones(dim)
    combos = itertools.combinations(range(len(V)), dim)
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=int)
        if block.size == 0:
            break
        mats = V[block]  # (k, dim, dim)
        dets = np.linalg.det(mats)
        ok = np.abs(dets) > 1e-12
        if not ok.any():
            continue
        normals = np.linalg.solve(mats[ok], np.broadcast_to(ones, (ok.sum(), dim))[..., None])[..., 0]
        support = normals @ V.T  # (k, n)
        valid = np.all(support <= 1.0 + tol, axis=1)
        for a in normals[valid]:
            key = tuple(np.round(a, 9) + 0.0)
            if key not in found:
                found[key] = a
    out = []
    for a in found.values():
        on = V[np.abs(V @ a - 1.0) <= tol]
        if affine_dim(on) == dim - 1:
            out.append((a, 1.0))
    if not out:
        raise GeometryError("degenerate polytope: no facets found")
    return out


def minimal_face(space: Space, xstar) -> Face:
    """Smallest face of the dual ball containing the dual-sphere point ``xstar``."""
    xstar = space.check_vector(xstar)
    tol = config.eps_geo()
    nrm = dual_norm(space, xstar)
    if abs(nrm - 1.0) > tol:
        raise GeometryError(f"point is not on the dual sphere (norm {nrm!r})")
    if space.is_euclidean:
        return Face(space, (), point=xstar.copy(), dim=0)
    V = space.ball.vertices
    contact = V[np.abs(V @ xstar - 1.0) <= tol]
    W = space.dual_vertices
    on = np.all(np.abs(W @ contact.T - 1.0) <= tol, axis=1)
    idx = tuple(int(i) for i in np.nonzero(on)[0])
    return Face(space, idx, dim=affine_dim(W[list(idx)]))


def face_constraints(space: Space, face: Face) -> tuple[np.ndarray, np.ndarray]:
    """Primal vertices active on ``face`` and the remaining ones (as rows)."""
    V = space.ball.vertices
    tol = config.eps_geo()
    on = np.all(np.abs(face.vertices @ V.T - 1.0) <= tol, axis=0)
    return V[on], V[~on]


def is_strictly_convex_dual(space: Space) -> bool:
    """Whether every point of the dual sphere is an extreme point of the dual ball."""
    return space.is_euclidean or space.dim == 1


def is_simplexoid_dual(space: Space) -> bool:
    """Whether every proper face of the dual ball is a simplex.

    Faces of simplices are simplices, so checking the facets of the dual ball
    suffices.  The facets of the dual ball are in bijection with the primal
    vertices: ``{w : <w, v> = 1}``.
    """
    if space.is_euclidean:
        return True
    tol = config.eps_geo()
    W = space.dual_vertices
    for v in space.ball.vertices:
        fv = W[np.abs(W @ v - 1.0) <= tol]
        if len(fv) != affine_dim(fv) + 1:
            return False
    return True


def ray_exit(space: Space, x, u) -> float:
    """Largest ``s >= 0`` with ``x + s u`` in the dual ball (``inf`` if unbounded)."""
    x, u = space.check_vector(x), space.check_vector(u)
    if space.is_euclidean:
        a, b, c = u @ u, 2 * (x @ u), x @ x - 1.0
        if a == 0:
            return np.inf
        disc = max(b * b - 4 * a * c, 0.0)
        return float(max((-b + np.sqrt(disc)) / (2 * a), 0.0))
    V = space.ball.vertices
    du = V @ u
    slack = 1.0 - V @ x
    pos = du > 1e-14
    if not pos.any():
        return np.inf
    return float(max(np.min(slack[pos] / du[pos]), 0.0))


def ball_face_vertices(space: Space, x, tol: float | None = None) -> np.ndarray:
    """Indices of the dual vertices spanning the smallest face containing the ball point ``x``."""
    tol = config.eps_geo() if tol is None else tol
    x = space.check_vector(x)
    V = space.ball.vertices
    active = V[np.abs(V @ x - 1.0) <= tol]
    W = space.dual_vertices
    if len(active) == 0:
        return np.arange(len(W))
    return np.nonzero(np.all(np.abs(W @ active.T - 1.0) <= tol, axis=1))[0]
