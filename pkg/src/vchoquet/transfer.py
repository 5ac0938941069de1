"""The Hustad map, weak* densities, and the canonical transfer operator.

For a measure ``nu`` on ``K x B_{E*}`` the Hustad map returns the vector
measure ``t -> sum_{atoms at t} w * x*``.  Going back, :func:`transfer_K`
assigns to every vector measure ``mu`` the canonical positive measure ``K mu``
with one sphere-normalised atom per support point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import config
from .geometry import DimensionError, Space, dual_norm
from .measures import (
    AtomicMeasure,
    MeasureError,
    VectorMeasure,
    barycenter,
    disintegrate,
    integrate,
    mass,
    total_variation,
)


@dataclass(frozen=True, eq=False)
class DensityFunction:
    """Weak* density ``h`` of the Hustad image with respect to ``sigma``."""

    values: Mapping[str, np.ndarray]
    sigma: Mapping[str, float]

    def __getitem__(self, t: str) -> np.ndarray:
        return self.values[t]


def hustad(nu: AtomicMeasure) -> VectorMeasure:
    """Vector measure ``mu(t) = sum_{atoms (t, x*, w)} w * x*`` (signed weights allowed)."""
    out: dict[str, np.ndarray] = {}
    for a in nu.atoms:
        contrib = float(a.signed_weight) * a.xstar
        out[a.t] = out[a.t] + contrib if a.t in out else contrib
    return VectorMeasure(nu.space, out)


def density_h(nu: AtomicMeasure) -> DensityFunction:
    """``h(t)`` = barycenter of the fiber probability at ``t``."""
    kern = disintegrate(nu)
    return DensityFunction(
        {t: barycenter(p) for t, p in kern.kernels.items()},
        {t: float(s) for t, s in kern.sigma.items()},
    )


def variation_density(nu: AtomicMeasure) -> dict[str, float]:
    """``t -> ||h(t)||``, the density of ``|hustad(nu)|`` with respect to ``sigma``."""
    h = density_h(nu)
    return {t: dual_norm(nu.space, v) for t, v in h.values.items()}


def tilde(nu: AtomicMeasure) -> AtomicMeasure:
    """Push every fiber onto the sphere point ``h(t)/||h(t)||`` with mass ``||h(t)|| sigma(t)``.

    Labels where ``h`` vanishes (up to the geometric tolerance) are dropped.
    """
    h = density_h(nu)
    tol = config.eps_geo()
    atoms = []
    for t, v in h.values.items():
        n = dual_norm(nu.space, v)
        if n > tol:
            atoms.append((t, v / n, n * h.sigma[t]))
    return AtomicMeasure(nu.space, atoms)


def transfer_K(mu: VectorMeasure) -> AtomicMeasure:
    """Canonical representing measure ``K mu = sum_t ||mu(t)|| delta_{(t, mu(t)/||mu(t)||)}``."""
    tol = config.eps_geo()
    atoms = []
    for t, v in mu.entries.items():
        n = dual_norm(mu.space, v)
        if n > tol:
            atoms.append((t, v / n, n))
    return AtomicMeasure(mu.space, atoms)


def is_in_N(nu: AtomicMeasure, mu: VectorMeasure, tol: float | None = None) -> bool:
    """Whether ``nu`` is positive, represents ``mu`` and has the minimal norm ``||mu||``."""
    tol = config.eps_geo() if tol is None else tol
    if nu.space != mu.space or not nu.is_positive:
        return False
    if not hustad(nu).allclose(mu, tol):
        return False
    return abs(float(mass(nu)) - total_variation(mu)) <= tol * max(1.0, total_variation(mu))


@dataclass(frozen=True, eq=False)
class DFunction:
    """Fiberwise superlinear test function ``f(t, x*) = min_j <x*, g_j(t)>``.

    ``pieces[t]`` is an ``(n_t, dim)`` array of primal vectors.  Labels without
    pieces are only allowed off the support of the measures integrated.
    """

    pieces: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for t, g in dict(self.pieces).items():
            g = np.atleast_2d(np.asarray(g, dtype=float))
            if g.shape[0] == 0 and g.size == 0:
                g = g.reshape(0, 0)
            clean[t] = g
        object.__setattr__(self, "pieces", clean)

    def __call__(self, t: str, xstar) -> float:
        g = self.pieces.get(t)
        if g is None or g.shape[0] == 0:
            raise MeasureError(f"test function has no pieces at point {t!r}")
        if g.shape[1] != len(xstar):
            raise DimensionError(f"pieces at {t!r} have length {g.shape[1]}, expected {len(xstar)}")
        return float(np.min(g @ xstar))

    @classmethod
    def linear(cls, f: Mapping[str, Sequence[float]]) -> "DFunction":
        """``(t, x*) -> <x*, f(t)>`` for an ``E``-valued function ``f``."""
        return cls({t: np.atleast_2d(np.asarray(v, dtype=float)) for t, v in f.items()})

    @classmethod
    def neg_norm(cls, space: Space, labels: Sequence[str]) -> "DFunction":
        """``(t, x*) -> -||x*||`` on a polytope space (min over the primal vertices)."""
        if not space.is_polytope:
            raise MeasureError("-||x*|| is a finite minimum of linear pieces only for polytope balls")
        V = np.array(space.ball.vertices)
        return cls({t: V for t in labels})

    def to_json(self) -> dict:
        return {"pieces": {t: g.tolist() for t, g in self.pieces.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> "DFunction":
        if not isinstance(data, Mapping) or not isinstance(data.get("pieces"), Mapping):
            raise MeasureError("D-function must be an object with a 'pieces' object")
        return cls(data["pieces"])


def eval_pf(f: DFunction, mu: VectorMeasure) -> float:
    """``p_f(mu)``, computed as the integral of ``f`` against ``K mu``."""
    kmu = transfer_K(mu)
    for t in kmu.labels:
        g = f.pieces.get(t)
        if g is None or g.shape[0] == 0:
            raise MeasureError(f"test function has no pieces at support point {t!r}")
    return float(integrate(kmu, f))
