"""Discrete measures over a finite set of point labels ``K``.

* :class:`VectorMeasure` -- an ``E*``-valued measure on ``K``: one dual vector per label.
* :class:`AtomicMeasure` -- a finitely supported scalar measure on ``K x B_{E*}``.
* :class:`ProbabilityAtoms` -- a finitely supported probability on the dual ball.
* :class:`DisintegrationKernel` -- base masses plus one fiber probability per label.

Atom weights are kept in whatever numeric type they were given in, so measures
built from :class:`fractions.Fraction` weights are disintegrated and
recomposed without rounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Real
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import config
from .geometry import DimensionError, Space, dual_norm, dual_norms

# decimals used to decide whether two dual vectors coincide when merging atoms
MERGE_DECIMALS = 12


class MeasureError(ValueError):
    pass


class PositivityError(MeasureError):
    """A signed measure was passed where a positive one is required."""


def _vec_key(x: np.ndarray) -> tuple:
    return tuple(np.round(x, MERGE_DECIMALS) + 0.0)


def point_set(labels: Iterable[str]) -> tuple[str, ...]:
    """Validate a finite compact ``K`` given as distinct string labels."""
    labels = tuple(labels)
    if not labels:
        raise MeasureError("point set must be nonempty")
    if len(set(labels)) != len(labels):
        raise MeasureError("point labels must be unique")
    for t in labels:
        if not isinstance(t, str):
            raise MeasureError(f"point labels must be strings, got {t!r}")
    return labels


# ---------------------------------------------------------------------------
# vector measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VectorMeasure:
    """An element of ``M(K, E*)`` for finite ``K``; absent labels carry zero."""

    space: Space
    entries: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for t, v in dict(self.entries).items():
            if not isinstance(t, str):
                raise MeasureError(f"point labels must be strings, got {t!r}")
            v = np.array(v, dtype=float)
            if v.shape != (self.space.dim,):
                raise DimensionError(f"entry {t!r} has shape {v.shape}, expected ({self.space.dim},)")
            if not np.all(np.isfinite(v)):
                raise MeasureError(f"entry {t!r} is not finite")
            v.setflags(write=False)
            clean[t] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def dirac(cls, space: Space, t: str, xstar) -> "VectorMeasure":
        """The measure ``eps_t (x) x*``."""
        return cls(space, {t: xstar})

    def __getitem__(self, t: str) -> np.ndarray:
        v = self.entries.get(t)
        return np.zeros(self.space.dim) if v is None else v

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.entries)

    def support(self, tol: float | None = None) -> list[str]:
        tol = config.eps_geo() if tol is None else tol
        return [t for t, v in self.entries.items() if dual_norm(self.space, v) > tol]

    def _combine(self, other: "VectorMeasure", sign: float) -> "VectorMeasure":
        if other.space != self.space:
            raise MeasureError("measures live on different spaces")
        out = {t: v.copy() for t, v in self.entries.items()}
        for t, v in other.entries.items():
            out[t] = out.get(t, np.zeros(self.space.dim)) + sign * v
        return VectorMeasure(self.space, out)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, c: float):
        return VectorMeasure(self.space, {t: c * v for t, v in self.entries.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def max_abs_diff(self, other: "VectorMeasure") -> float:
        labels = set(self.entries) | set(other.entries)
        if not labels:
            return 0.0
        return float(max(np.max(np.abs(self[t] - other[t])) for t in labels))

    def allclose(self, other: "VectorMeasure", tol: float | None = None) -> bool:
        tol = config.eps_geo() if tol is None else tol
        return self.max_abs_diff(other) <= tol

    def to_json(self) -> dict:
        return {"entries": {t: v.tolist() for t, v in self.entries.items()}}

    @classmethod
    def from_json(cls, space: Space, data: Mapping) -> "VectorMeasure":
        if not isinstance(data, Mapping) or not isinstance(data.get("entries"), Mapping):
            raise MeasureError("vector measure must be an object with an 'entries' object")
        return cls(space, data["entries"])


def total_variation(mu: VectorMeasure) -> float:
    """``sum_t ||mu({t})||_{E*}``."""
    if not mu.entries:
        return 0.0
    return float(np.sum(dual_norms(mu.space, np.array(list(mu.entries.values())))))


def pair(mu: VectorMeasure, f: Mapping[str, Sequence[float]]) -> float:
    """Integral of the ``E``-valued function ``f`` against ``mu``: ``sum_t <mu(t), f(t)>``."""
    total = 0.0
    for t, v in mu.entries.items():
        if t not in f:
            raise MeasureError(f"function is not defined at point {t!r}")
        x = mu.space.check_vector(f[t])
        total += float(v @ x)
    return total


# ---------------------------------------------------------------------------
# atomic measures on K x B_{E*}
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Atom:
    t: str
    xstar: np.ndarray
    w: Real
    sign: int = 1

    @property
    def signed_weight(self):
        return self.w if self.sign > 0 else -self.w


def _merge_atoms(space: Space, atoms: Iterable) -> tuple[Atom, ...]:
    tol = config.eps_geo()
    merged: dict[tuple, list] = {}
    for a in atoms:
        if isinstance(a, Atom):
            t, x, w, s = a.t, a.xstar, a.w, a.sign
        else:
            t, x, w, *rest = a
            s = rest[0] if rest else 1
        if not isinstance(t, str):
            raise MeasureError(f"point labels must be strings, got {t!r}")
        x = np.array(x, dtype=float)
        if x.shape != (space.dim,):
            raise DimensionError(f"atom vector has shape {x.shape}, expected ({space.dim},)")
        if s not in (1, -1):
            raise MeasureError(f"atom sign must be +1 or -1, got {s!r}")
        if not (w > 0):
            raise MeasureError(f"atom weights must be positive, got {w!r}")
        if dual_norm(space, x) > 1.0 + tol:
            raise MeasureError(f"atom {x.tolist()} lies outside the dual ball")
        key = (t, _vec_key(x))
        sw = w if s > 0 else -w
        if key in merged:
            merged[key][1] = merged[key][1] + sw
        else:
            merged[key] = [x, sw]
    out = []
    for (t, _), (x, sw) in merged.items():
        if sw == 0:
            continue
        x.setflags(write=False)
        out.append(Atom(t, x, sw if sw > 0 else -sw, 1 if sw > 0 else -1))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """A finitely supported measure on ``K x B_{E*}``.

    ``atoms`` accepts :class:`Atom` instances or ``(t, xstar, w[, sign])``
    tuples; atoms sharing ``(t, xstar)`` are merged.
    """

    space: Space
    atoms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", _merge_atoms(self.space, self.atoms))

    @classmethod
    def dirac(cls, space: Space, t: str, xstar, w=1.0) -> "AtomicMeasure":
        return cls(space, [(t, xstar, w)])

    @property
    def is_positive(self) -> bool:
        return all(a.sign > 0 for a in self.atoms)

    @property
    def labels(self) -> list[str]:
        seen = {}
        for a in self.atoms:
            seen.setdefault(a.t, None)
        return list(seen)

    def require_positive(self) -> None:
        if not self.is_positive:
            raise PositivityError("operation requires a positive measure")

    def __len__(self):
        return len(self.atoms)

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        if other.space != self.space:
            raise MeasureError("measures live on different spaces")
        return AtomicMeasure(self.space, self.atoms + other.atoms)

    def scaled(self, c) -> "AtomicMeasure":
        if not c > 0:
            raise MeasureError("scale factor must be positive")
        return AtomicMeasure(self.space, [Atom(a.t, a.xstar, a.w * c, a.sign) for a in self.atoms])

    def max_abs_diff(self, other: "AtomicMeasure", match_tol: float | None = None) -> float:
        """Largest discrepancy after pairing atoms with equal ``t`` and ``xstar`` within ``match_tol``.

        A matched pair contributes its weight and position gaps, an unmatched
        atom its full weight.  Pairing by tolerance rather than by rounded keys
        keeps nearly equal dual vectors from straddling a rounding boundary.
        """
        match_tol = config.eps_geo() if match_tol is None else match_tol
        theirs = list(other.atoms)
        used = [False] * len(theirs)
        worst = 0.0
        for a in self.atoms:
            best, gap = None, np.inf
            for k, b in enumerate(theirs):
                if not used[k] and a.t == b.t:
                    d = float(np.max(np.abs(a.xstar - b.xstar))) if a.xstar.size else 0.0
                    if d <= match_tol and d < gap:
                        best, gap = k, d
            if best is None:
                worst = max(worst, abs(float(a.signed_weight)))
            else:
                used[best] = True
                worst = max(worst, gap, abs(float(a.signed_weight - theirs[best].signed_weight)))
        for k, b in enumerate(theirs):
            if not used[k]:
                worst = max(worst, abs(float(b.signed_weight)))
        return worst

    def same_atoms(self, other: "AtomicMeasure") -> bool:
        """Exact equality of the atom lists up to ordering."""
        mine = {(a.t, _vec_key(a.xstar)): a.signed_weight for a in self.atoms}
        theirs = {(a.t, _vec_key(a.xstar)): a.signed_weight for a in other.atoms}
        return mine == theirs

    def allclose(self, other: "AtomicMeasure", tol: float | None = None) -> bool:
        """Atom-wise equality within ``tol``, matching dual vectors up to ``tol`` too."""
        tol = config.eps_geo() if tol is None else tol
        return self.max_abs_diff(other, match_tol=tol) <= tol

    def to_json(self) -> dict:
        out = []
        for a in self.atoms:
            d = {"t": a.t, "xstar": a.xstar.tolist(), "w": float(a.w)}
            if a.sign < 0:
                d["sign"] = -1
            out.append(d)
        return {"atoms": out}

    @classmethod
    def from_json(cls, space: Space, data: Mapping) -> "AtomicMeasure":
        if not isinstance(data, Mapping) or not isinstance(data.get("atoms"), list):
            raise MeasureError("atomic measure must be an object with an 'atoms' list")
        atoms = []
        for i, a in enumerate(data["atoms"]):
            try:
                atoms.append((a["t"], a["xstar"], float(a["w"]), int(a.get("sign", 1))))
            except (KeyError, TypeError, ValueError) as exc:
                raise MeasureError(f"atoms[{i}]: malformed atom ({exc})") from None
        return cls(space, atoms)


def mass(nu: AtomicMeasure):
    """Total mass of a positive measure."""
    nu.require_positive()
    return sum((a.w for a in nu.atoms), 0)


def integrate(nu: AtomicMeasure, g: Callable[[str, np.ndarray], float]):
    """``sum w * g(t, x*)`` over the atoms (signed weights for signed measures)."""
    return sum((a.signed_weight * g(a.t, a.xstar) for a in nu.atoms), 0)


# ---------------------------------------------------------------------------
# probabilities on the dual ball, barycenters, disintegration
# ---------------------------------------------------------------------------


def _weights_array(weights) -> np.ndarray:
    w = list(weights)
    if any(not isinstance(x, (float, int, np.floating, np.integer)) for x in w):
        return np.array(w, dtype=object)
    return np.array(w, dtype=float)


@dataclass(frozen=True, eq=False)
class ProbabilityAtoms:
    """A finitely supported probability ``sum w_i delta_{x_i}`` on the dual ball."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        P = np.array(self.points, dtype=float)
        if P.ndim == 1:
            P = P.reshape(1, -1) if P.size else P.reshape(0, 0)
        w = _weights_array(np.asarray(self.weights, dtype=object).ravel())
        if P.shape[0] != w.size or w.size == 0:
            raise MeasureError("probability needs one weight per point and at least one atom")
        if not all(x > 0 for x in w):
            raise MeasureError("probability weights must be positive")
        if abs(sum(w) - 1) > config.eps_geo():
            raise MeasureError(f"weights sum to {float(sum(w))!r}, not 1")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Sequence[float], Real]]) -> "ProbabilityAtoms":
        pairs = list(pairs)
        return cls(np.array([p for p, _ in pairs], dtype=float), [w for _, w in pairs])

    @classmethod
    def dirac(cls, x) -> "ProbabilityAtoms":
        return cls(np.atleast_2d(np.asarray(x, dtype=float)), [1.0])

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def float_weights(self) -> np.ndarray:
        return self.weights.astype(float)

    def __len__(self):
        return self.weights.size

    def merged(self) -> "ProbabilityAtoms":
        """Merge coinciding points (same rounding rule as atomic measures)."""
        acc: dict[tuple, list] = {}
        for x, w in zip(self.points, self.weights):
            k = _vec_key(x)
            if k in acc:
                acc[k][1] = acc[k][1] + w
            else:
                acc[k] = [x, w]
        return ProbabilityAtoms(np.array([v[0] for v in acc.values()]), [v[1] for v in acc.values()])

    def expect(self, f: Callable[[np.ndarray], float]) -> float:
        return float(sum(w * f(x) for x, w in zip(self.points, self.weights)))

    def allclose(self, other: "ProbabilityAtoms", tol: float | None = None) -> bool:
        tol = config.eps_geo() if tol is None else tol
        a, b = self.merged(), other.merged()
        if len(a) != len(b):
            return False
        used = [False] * len(b)
        for x, w in zip(a.points, a.weights):
            for k, (y, v) in enumerate(zip(b.points, b.weights)):
                if not used[k] and np.max(np.abs(x - y)) <= tol and abs(w - v) <= tol:
                    used[k] = True
                    break
            else:
                return False
        return True

    def to_json(self) -> dict:
        return {"atoms": [{"xstar": x.tolist(), "w": float(w)} for x, w in zip(self.points, self.weights)]}

    @classmethod
    def from_json(cls, data: Mapping) -> "ProbabilityAtoms":
        if not isinstance(data, Mapping) or not isinstance(data.get("atoms"), list):
            raise MeasureError("probability must be an object with an 'atoms' list")
        try:
            return cls.from_pairs((a["xstar"], float(a["w"])) for a in data["atoms"])
        except (KeyError, TypeError) as exc:
            raise MeasureError(f"malformed probability atom ({exc})") from None


def barycenter(p: ProbabilityAtoms) -> np.ndarray:
    """``sum w_i x_i``."""
    return np.asarray(p.weights @ p.points, dtype=float)


@dataclass(frozen=True, eq=False)
class DisintegrationKernel:
    """Base masses ``sigma`` and fiber probabilities ``kernels`` indexed by label."""

    sigma: Mapping[str, Real]
    kernels: Mapping[str, ProbabilityAtoms]

    def __post_init__(self):
        if set(self.sigma) != set(self.kernels):
            raise MeasureError("sigma and kernels must have the same support")
        for t, s in self.sigma.items():
            if not s > 0:
                raise MeasureError(f"sigma({t!r}) must be positive")

    @property
    def labels(self) -> list[str]:
        return list(self.sigma)


def disintegrate(nu: AtomicMeasure) -> DisintegrationKernel:
    """Group the atoms of a positive measure by label and normalise each group.

    ``integrate(nu, g) == sum_t sigma(t) * E_{kernel(t)} g(t, .)``.
    """
    nu.require_positive()
    groups: dict[str, list[Atom]] = {}
    for a in nu.atoms:
        groups.setdefault(a.t, []).append(a)
    sigma, kernels = {}, {}
    for t, atoms in groups.items():
        s = sum((a.w for a in atoms), 0)
        sigma[t] = s
        kernels[t] = ProbabilityAtoms(np.array([a.xstar for a in atoms]), [a.w / s for a in atoms])
    return DisintegrationKernel(sigma, kernels)


def recompose(kernel: DisintegrationKernel, space: Space) -> AtomicMeasure:
    """Inverse of :func:`disintegrate`: ``nu(t, x) = sigma(t) * kernel(t)(x)``."""
    atoms = []
    for t, s in kernel.sigma.items():
        p = kernel.kernels[t]
        atoms.extend((t, x, s * w) for x, w in zip(p.points, p.weights))
    return AtomicMeasure(space, atoms)
