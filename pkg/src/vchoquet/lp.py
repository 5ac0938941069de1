"""Dense two-phase simplex with Bland's anti-cycling rule.

Every norm, envelope, dilation and decomposition computation in the package
goes through :func:`solve`.  Instances are tiny (a few hundred variables at
most), so a dense tableau is used throughout.

Passing ``exact=True`` runs the same tableau code over :class:`fractions.Fraction`
entries with zero tolerances; this is slow but useful for cross-checks.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import config


class LPFormatError(ValueError):
    """Raised for malformed programs (shape mismatch, NaN entries...)."""


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``min``/``max`` ``c @ x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``lb <= x <= ub``.

    ``lb`` defaults to zero; ``-inf`` makes a variable free from below.
    ``ub`` defaults to ``+inf``.
    """

    c: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    lb: Optional[np.ndarray] = None
    ub: Optional[np.ndarray] = None
    sense: str = "min"

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.size
        object.__setattr__(self, "c", c)
        if self.sense not in ("min", "max"):
            raise LPFormatError(f"sense must be 'min' or 'max', got {self.sense!r}")
        for a_name, b_name in (("A_eq", "b_eq"), ("A_ub", "b_ub")):
            A, b = getattr(self, a_name), getattr(self, b_name)
            if A is None and b is None:
                A, b = np.zeros((0, n)), np.zeros(0)
            elif A is None or b is None:
                raise LPFormatError(f"{a_name} and {b_name} must be given together")
            A = np.asarray(A, dtype=float)
            b = np.asarray(b, dtype=float).ravel()
            if A.size == 0:
                A = A.reshape(b.size, n)
            if A.ndim != 2 or A.shape != (b.size, n):
                raise LPFormatError(
                    f"{a_name} has shape {A.shape}, expected ({b.size}, {n})"
                )
            if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
                raise LPFormatError(f"{a_name}/{b_name} contain non-finite entries")
            object.__setattr__(self, a_name, A)
            object.__setattr__(self, b_name, b)
        lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float).ravel()
        ub = np.full(n, np.inf) if self.ub is None else np.asarray(self.ub, dtype=float).ravel()
        if lb.shape != (n,) or ub.shape != (n,):
            raise LPFormatError("bounds must have one entry per variable")
        if np.any(np.isnan(lb)) or np.any(np.isnan(ub)) or np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise LPFormatError("invalid variable bounds")
        if not np.all(np.isfinite(c)):
            raise LPFormatError("objective contains non-finite entries")
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)

    @property
    def n_vars(self) -> int:
        return self.c.size

    def residual(self, x: np.ndarray) -> float:
        """Largest constraint violation of ``x`` (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        viol = [0.0]
        if self.b_eq.size:
            viol.append(np.max(np.abs(self.A_eq @ x - self.b_eq)))
        if self.b_ub.size:
            viol.append(np.max(self.A_ub @ x - self.b_ub))
        viol.append(np.max(self.lb - x, initial=0.0))
        viol.append(np.max(x - self.ub, initial=0.0))
        return float(max(viol))


@dataclass(frozen=True)
class LpOutcome:
    status: Status
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    iterations: int = field(default=0, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _standard_form(lp: LinearProgram):
    """Rewrite as ``min chat @ z, Ahat z = bhat, z >= 0`` with ``x = x0 + M z[:k]``.

    Returns (Ahat, bhat, chat, x0, M, slack_rows) where slack_rows[i] is the
    column index of a +1 slack for row i, or -1.
    """
    n = lp.n_vars
    cols = []  # (var index, coefficient)
    x0 = np.zeros(n)
    bound_rows = []  # (column index of y, width)
    for j in range(n):
        lo, hi = lp.lb[j], lp.ub[j]
        if np.isfinite(lo):
            x0[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                bound_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            x0[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    k = len(cols)
    M = np.zeros((n, k))
    for col, (j, s) in enumerate(cols):
        M[j, col] = s

    A_eq = lp.A_eq @ M
    b_eq = lp.b_eq - lp.A_eq @ x0
    A_ub = lp.A_ub @ M
    b_ub = lp.b_ub - lp.A_ub @ x0
    if bound_rows:
        extra = np.zeros((len(bound_rows), k))
        for r, (col, width) in enumerate(bound_rows):
            extra[r, col] = 1.0
        A_ub = np.vstack([A_ub, extra])
        b_ub = np.concatenate([b_ub, [w for _, w in bound_rows]])

    m_ub, m_eq = b_ub.size, b_eq.size
    Ahat = np.zeros((m_ub + m_eq, k + m_ub))
    Ahat[:m_ub, :k] = A_ub
    Ahat[:m_ub, k:] = np.eye(m_ub)
    Ahat[m_ub:, :k] = A_eq
    bhat = np.concatenate([b_ub, b_eq])
    chat = np.zeros(k + m_ub)
    sign = 1.0 if lp.sense == "min" else -1.0
    chat[:k] = sign * (lp.c @ M)
    slack_rows = np.full(m_ub + m_eq, -1)
    slack_rows[:m_ub] = k + np.arange(m_ub)
    return Ahat, bhat, chat, x0, M, slack_rows


def _pivot(T, i, j):
    T[i] = T[i] / T[i, j]
    col = T[:, j].copy()
    col[i] = 0
    T -= np.outer(col, T[i])


def _simplex(T, basis, n_cols, tol, piv_tol, max_iter):
    """Bland-rule primal simplex on a tableau whose last row holds reduced costs.

    Only the first ``n_cols`` columns may enter.  Returns (status, iterations).
    """
    it = 0
    while True:
        red = T[-1, :n_cols]
        entering = np.nonzero(red < -tol)[0]
        if entering.size == 0:
            return Status.OPTIMAL, it
        j = int(entering[0])
        col = T[:-1, j]
        rows = np.nonzero(col > piv_tol)[0]
        if rows.size == 0:
            return Status.UNBOUNDED, it
        ratios = T[rows, -1] / col[rows]
        best = min(ratios)
        ties = [r for r, q in zip(rows, ratios) if q - best <= tol]
        i = min(ties, key=lambda r: basis[r])
        _pivot(T, i, j)
        basis[i] = j
        it += 1
        if it > max_iter:
            raise RuntimeError(f"simplex exceeded {max_iter} iterations")


def solve(lp: LinearProgram, *, exact: bool = False, max_iter: int = 50_000) -> LpOutcome:
    """Solve ``lp`` by the two-phase simplex method.

    Redundant equality rows are tolerated (dropped after phase 1); inconsistent
    rows make the program infeasible.
    """
    Ahat, bhat, chat, x0, M, slack_rows = _standard_form(lp)
    neg = bhat < 0
    Ahat[neg] *= -1
    bhat[neg] *= -1
    slack_rows[neg] = -1
    m, N = Ahat.shape

    if exact:
        conv = np.vectorize(Fraction, otypes=[object])
        Ahat, bhat, chat = conv(Ahat), conv(bhat), conv(chat)
        tol = piv_tol = Fraction(0)
        zero = Fraction(0)
    else:
        scale = max(1.0, float(np.max(np.abs(bhat), initial=0.0)))
        tol = 1e-11 * scale
        piv_tol = 1e-10
        zero = 0.0

    art_rows = [i for i in range(m) if slack_rows[i] < 0]
    n_art = len(art_rows)
    dtype = object if exact else float
    T = np.empty((m + 1, N + n_art + 1), dtype=dtype)
    T[...] = zero
    T[:m, :N] = Ahat
    T[:m, -1] = bhat
    basis = np.empty(m, dtype=int)
    for i in range(m):
        if slack_rows[i] >= 0:
            basis[i] = slack_rows[i]
    for a, i in enumerate(art_rows):
        T[i, N + a] = 1
        basis[i] = N + a

    iterations = 0
    if n_art:
        # phase 1: minimise the sum of artificial variables
        T[-1, :] = zero
        for i in art_rows:
            T[-1, :] -= T[i, :]
        for a in range(n_art):
            T[-1, N + a] = zero
        status, it = _simplex(T, basis, N + n_art, tol, piv_tol, max_iter)
        iterations += it
        infeas = -T[-1, -1]
        feas_tol = 0 if exact else max(config.eps_lp(), 1e-9 * scale)
        if infeas > feas_tol:
            return LpOutcome(Status.INFEASIBLE, iterations=iterations)
        # drive remaining artificials out of the basis, or drop their rows
        keep = np.ones(m + 1, dtype=bool)
        for i in range(m):
            if basis[i] >= N:
                cand = np.nonzero(np.abs(T[i, :N].astype(float)) > 1e-9)[0] if not exact else [
                    c for c in range(N) if T[i, c] != 0
                ]
                if len(cand):
                    _pivot(T, i, int(cand[0]))
                    basis[i] = int(cand[0])
                    iterations += 1
                else:
                    keep[i] = False
        T = np.concatenate([T[keep][:, :N], T[keep][:, -1:]], axis=1)
        basis = basis[keep[:-1]]
        m = basis.size

    # phase 2 objective row: reduced costs chat - c_B B^-1 A
    T[-1, :] = zero
    T[-1, :N] = chat
    for i in range(m):
        cb = chat[basis[i]]
        if cb != 0:
            T[-1, :] -= cb * T[i, :]
    status, it = _simplex(T, basis, N, tol, piv_tol, max_iter)
    iterations += it
    if status is Status.UNBOUNDED:
        return LpOutcome(Status.UNBOUNDED, iterations=iterations)

    z = np.zeros(N)
    for i in range(m):
        z[basis[i]] = float(T[i, -1])
    z = np.maximum(z, 0.0)
    x = x0 + M @ z[: M.shape[1]]
    return LpOutcome(Status.OPTIMAL, x=x, value=float(lp.c @ x), iterations=iterations)


def feasible_point(
    A_eq=None, b_eq=None, A_ub=None, b_ub=None, lb=None, ub=None, *, n_vars: int | None = None
) -> Optional[np.ndarray]:
    """Return some point satisfying the constraints, or ``None`` if none exists."""
    if n_vars is None:
        for A in (A_eq, A_ub):
            if A is not None:
                n_vars = np.asarray(A).shape[1]
                break
        else:
            if lb is None and ub is None:
                raise LPFormatError("cannot infer the number of variables")
            n_vars = np.asarray(lb if lb is not None else ub).size
    lp = LinearProgram(np.zeros(n_vars), A_eq, b_eq, A_ub, b_ub, lb, ub)
    out = solve(lp)
    return out.x if out.optimal else None
