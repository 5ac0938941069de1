"""Random spaces, measures and members of ``N(mu)`` for property checks."""
from __future__ import annotations

import numpy as np

from .geometry import GeometryError, Space, dual_norm, minimal_face, ray_exit
from .measures import AtomicMeasure, ProbabilityAtoms, VectorMeasure
from .ordering import decompose_point
from .transfer import transfer_K


def random_polytope_space(rng: np.random.Generator, dim: int, n_pairs: int | None = None) -> Space:
    """Symmetric polytope with vertices ``+-u_i``, ``u_i`` random on a sphere of random radius."""
    if dim == 1:
        r = rng.uniform(0.5, 2.0)
        return Space.polytope([[-r], [r]])
    n_pairs = dim + int(rng.integers(0, 3)) if n_pairs is None else n_pairs
    for _ in range(100):
        U = rng.normal(size=(n_pairs, dim))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        U *= rng.uniform(0.8, 1.25)
        # reject near-duplicate directions, which make faces numerically fragile
        G = np.abs(U @ U.T) / np.outer(np.linalg.norm(U, axis=1), np.linalg.norm(U, axis=1))
        np.fill_diagonal(G, 0.0)
        if G.max() > 0.97:
            continue
        try:
            return Space.polytope(np.vstack([U, -U]))
        except GeometryError:
            continue
    raise RuntimeError("could not sample a well-conditioned polytope")


def random_polygon_space(rng: np.random.Generator, n_pairs: int | None = None) -> Space:
    """Centrally symmetric polygon with random, well-separated angles."""
    n_pairs = int(rng.integers(2, 7)) if n_pairs is None else n_pairs
    for _ in range(100):
        gaps = 0.3 + (np.pi - 0.3 * n_pairs) * rng.dirichlet(np.ones(n_pairs))
        ang = rng.uniform(0, np.pi) + np.concatenate([[0.0], np.cumsum(gaps)[:-1]])
        U = np.column_stack([np.cos(ang), np.sin(ang)]) * rng.uniform(0.98, 1.02, size=(n_pairs, 1))
        try:
            return Space.polytope(np.vstack([U, -U]))
        except GeometryError:
            continue
    raise RuntimeError("could not sample a polygon")


def random_space(rng: np.random.Generator, max_dim: int = 3) -> Space:
    kind = int(rng.integers(0, 4))
    dim = int(rng.integers(1, max_dim + 1))
    if kind == 0:
        return Space.euclidean(dim)
    if kind == 1:
        return random_polygon_space(rng)
    if kind == 2 and dim >= 2:
        return Space.cube(dim) if rng.random() < 0.5 else Space.cross_polytope(dim)
    return random_polytope_space(rng, dim)


def labels(n: int) -> list[str]:
    return [f"t{i}" for i in range(1, n + 1)]


def random_vector_measure(
    rng: np.random.Generator, space: Space, n_labels: int | None = None, zero_prob: float = 0.15
) -> VectorMeasure:
    n_labels = int(rng.integers(1, 8)) if n_labels is None else n_labels
    entries = {}
    for t in labels(n_labels):
        if rng.random() < zero_prob:
            entries[t] = np.zeros(space.dim)
        else:
            entries[t] = rng.normal(scale=rng.uniform(0.2, 3.0), size=space.dim)
    return VectorMeasure(space, entries)


def random_sphere_point(rng: np.random.Generator, space: Space, low_dim_face: bool = False) -> np.ndarray:
    """Random point of the dual sphere; optionally on a random lower-dimensional face."""
    y = rng.normal(size=space.dim)
    x = y / dual_norm(space, y)
    if not low_dim_face or space.is_euclidean:
        return x
    F = minimal_face(space, x).vertices
    k = int(rng.integers(1, len(F) + 1))
    S = F[rng.choice(len(F), size=k, replace=False)]
    lam = rng.dirichlet(np.ones(k))
    return lam @ S


def random_ball_point(rng: np.random.Generator, space: Space, radius: float | None = None) -> np.ndarray:
    y = rng.normal(size=space.dim)
    r = rng.uniform(0.05, 0.95) if radius is None else radius
    return r * y / dual_norm(space, y)


def random_face_decomposition(rng: np.random.Generator, space: Space, x: np.ndarray) -> ProbabilityAtoms:
    """Random probability with barycenter ``x`` inside the minimal face of ``x``.

    Mixes a Dirac at ``x`` with two randomly ordered extreme-point decompositions.
    """
    if space.is_euclidean:
        return ProbabilityAtoms.dirac(x)
    n = len(space.dual_vertices)
    pairs: list[tuple[np.ndarray, float]] = []
    parts = rng.dirichlet(np.ones(3))
    if rng.random() < 0.3:
        parts[0] = 0.0
        parts /= parts.sum()
    pairs.append((x, parts[0]))
    for k in (1, 2):
        for y, c in decompose_point(space, x, order=rng.permutation(n)):
            pairs.append((y, parts[k] * c))
    pairs = [(y, w) for y, w in pairs if w > 1e-12]
    s = sum(w for _, w in pairs)
    return ProbabilityAtoms.from_pairs((y, w / s) for y, w in pairs).merged()


def random_N_element(rng: np.random.Generator, mu: VectorMeasure) -> AtomicMeasure:
    """A member of ``N(mu)`` obtained by splitting each atom of ``K mu`` along its face."""
    atoms = []
    for a in transfer_K(mu).atoms:
        p = random_face_decomposition(rng, mu.space, a.xstar)
        atoms.extend((a.t, y, a.w * w) for y, w in zip(p.points, p.float_weights))
    return AtomicMeasure(mu.space, atoms)


def random_probability(rng: np.random.Generator, space: Space, n_atoms: int | None = None) -> ProbabilityAtoms:
    n_atoms = int(rng.integers(1, 5)) if n_atoms is None else n_atoms
    pts = np.array([random_ball_point(rng, space) for _ in range(n_atoms)])
    return ProbabilityAtoms(pts, list(rng.dirichlet(np.ones(n_atoms))))


def random_fiber(rng: np.random.Generator, space: Space) -> ProbabilityAtoms:
    """Probability mixing extreme atoms with clearly non-extreme ones (weights >= 0.05)."""
    n = int(rng.integers(1, 5))
    pts = []
    for _ in range(n):
        u = rng.random()
        if space.is_euclidean:
            pts.append(random_sphere_point(rng, space) if u < 0.5 else random_ball_point(rng, space, rng.uniform(0.1, 0.9)))
        elif u < 0.5:
            W = space.dual_vertices
            pts.append(W[int(rng.integers(len(W)))])
        elif u < 0.75:
            pts.append(random_ball_point(rng, space, rng.uniform(0.1, 0.9)))
        else:
            # midpoint-ish point of an edge or facet: on the sphere but not extreme
            x = random_sphere_point(rng, space)
            F = minimal_face(space, x).vertices
            if len(F) < 2:
                pts.append(0.5 * x)
                continue
            i, j = rng.choice(len(F), size=2, replace=False)
            lam = rng.uniform(0.2, 0.8)
            pts.append(lam * F[i] + (1 - lam) * F[j])
    w = 0.05 + (1 - 0.05 * n) * rng.dirichlet(np.ones(n))
    return ProbabilityAtoms(np.array(pts), list(w)).merged()


def random_dilation(rng: np.random.Generator, space: Space, p: ProbabilityAtoms, splits: int = 2) -> ProbabilityAtoms:
    """Spread random atoms of ``p`` along random chords, giving some ``q`` with ``p < q``."""
    pts = [x for x in p.points]
    ws = list(p.float_weights)
    for _ in range(splits):
        i = int(rng.integers(len(pts)))
        x = pts[i]
        u = rng.normal(size=space.dim)
        up, down = ray_exit(space, x, u), ray_exit(space, x, -u)
        if up <= 1e-9 or down <= 1e-9:
            continue
        s1, s2 = up * rng.uniform(0.2, 1.0), down * rng.uniform(0.2, 1.0)
        a, b = x + s1 * u, x - s2 * u
        alpha = s2 / (s1 + s2)
        w = ws.pop(i)
        pts.pop(i)
        pts += [a, b]
        ws += [alpha * w, (1 - alpha) * w]
    return ProbabilityAtoms(np.array(pts), ws).merged()
