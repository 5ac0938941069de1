"""Brute-force LP oracle by vertex enumeration, independent of the simplex code.

Only programs with nonnegative variables and no upper bounds are handled:
``max/min c @ x`` with ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.
"""
from __future__ import annotations

import itertools

import numpy as np

from .lp import LinearProgram, LpOutcome, Status


def polyhedron_vertices(G: np.ndarray, h: np.ndarray, E: np.ndarray, e: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """All vertices of ``{x : G x <= h, E x = e}`` by solving every square active subsystem."""
    n = G.shape[1] if G.size else E.shape[1]
    E_full, e_full = E, e
    keep: list[int] = []
    for i in range(E.shape[0]):
        if np.linalg.matrix_rank(E[keep + [i]]) > len(keep):
            keep.append(i)
    E, e = E[keep], e[keep]
    k = E.shape[0]
    need = n - k
    found = []
    combos = list(itertools.combinations(range(G.shape[0]), need))
    subsets = np.array(combos, dtype=int).reshape(len(combos), need)
    if subsets.shape[0] == 0:
        return np.zeros((0, n))
    mats = np.concatenate([np.broadcast_to(E, (subsets.shape[0], k, n)), G[subsets]], axis=1)
    rhs = np.concatenate([np.broadcast_to(e, (subsets.shape[0], k)), h[subsets]], axis=1)
    dets = np.linalg.det(mats)
    good = np.abs(dets) > 1e-9
    if not good.any():
        return np.zeros((0, n))
    X = np.linalg.solve(mats[good], rhs[good][..., None])[..., 0]
    feas = np.all(X @ G.T <= h + tol, axis=1)
    if E_full.shape[0]:
        feas &= np.all(np.abs(X @ E_full.T - e_full) <= tol, axis=1)
    for x in X[feas]:
        if not any(np.max(np.abs(x - y)) <= 1e-7 for y in found):
            found.append(x)
    return np.array(found).reshape(-1, n)


def brute_force_solve(lp: LinearProgram) -> LpOutcome:
    if np.any(lp.lb != 0) or np.any(np.isfinite(lp.ub)):
        raise ValueError("brute-force oracle only handles x >= 0 without upper bounds")
    n = lp.n_vars
    sign = 1.0 if lp.sense == "max" else -1.0
    G = np.vstack([lp.A_ub, -np.eye(n)])
    h = np.concatenate([lp.b_ub, np.zeros(n)])
    verts = polyhedron_vertices(G, h, lp.A_eq, lp.b_eq)
    if len(verts) == 0:
        return LpOutcome(Status.INFEASIBLE)
    # recession cone {r >= 0, A_ub r <= 0, A_eq r = 0}, normalised by sum r = 1
    Gr = np.vstack([lp.A_ub, -np.eye(n)])
    hr = np.zeros(Gr.shape[0])
    Er = np.vstack([lp.A_eq, np.ones((1, n))])
    er = np.concatenate([np.zeros(lp.A_eq.shape[0]), [1.0]])
    rays = polyhedron_vertices(Gr, hr, Er, er)
    if len(rays) and np.max(sign * rays @ lp.c) > 1e-9:
        return LpOutcome(Status.UNBOUNDED)
    vals = sign * verts @ lp.c
    best = int(np.argmax(vals))
    return LpOutcome(Status.OPTIMAL, x=verts[best], value=float(lp.c @ verts[best]))


def random_lp(rng: np.random.Generator, max_vars: int = 6, max_constraints: int = 10) -> LinearProgram:
    """Small integer LP with ``x >= 0``; a mix of optimal, infeasible and unbounded instances."""
    n = int(rng.integers(1, max_vars + 1))
    m_eq = int(rng.integers(0, min(2, n) + 1))
    m_ub = int(rng.integers(0, max_constraints - m_eq + 1))
    A_ub = rng.integers(-5, 6, size=(m_ub, n)).astype(float)
    b_ub = rng.integers(-3, 11, size=m_ub).astype(float)
    A_eq = rng.integers(-5, 6, size=(m_eq, n)).astype(float)
    b_eq = rng.integers(-2, 8, size=m_eq).astype(float)
    c = rng.integers(-5, 6, size=n).astype(float)
    sense = "max" if rng.random() < 0.5 else "min"
    return LinearProgram(c, A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub, sense=sense)
