"""Global numerical tolerances.

One geometric tolerance governs on-sphere, on-hyperplane and rank decisions;
the LP engine has its own feasibility tolerance.  Both can be overridden
temporarily with :func:`tolerance`.
"""
from __future__ import annotations

import contextlib
from typing import Iterator

DEFAULT_EPS_GEO = 1e-9
DEFAULT_EPS_LP = 1e-9
DEFAULT_FACET_DIM_BOUND = 6
DEFAULT_ENUMERATION_CAP = 10_000

_state = {
    "eps_geo": DEFAULT_EPS_GEO,
    "eps_lp": DEFAULT_EPS_LP,
    "facet_dim_bound": DEFAULT_FACET_DIM_BOUND,
    "enumeration_cap": DEFAULT_ENUMERATION_CAP,
}


def eps_geo() -> float:
    return _state["eps_geo"]


def eps_lp() -> float:
    return _state["eps_lp"]


def facet_dim_bound() -> int:
    return _state["facet_dim_bound"]


def enumeration_cap() -> int:
    return _state["enumeration_cap"]


def set_eps_geo(value: float) -> None:
    if not value > 0:
        raise ValueError(f"tolerance must be positive, got {value!r}")
    _state["eps_geo"] = float(value)


def set_enumeration_cap(value: int) -> None:
    if value < 1:
        raise ValueError(f"enumeration cap must be >= 1, got {value!r}")
    _state["enumeration_cap"] = int(value)


@contextlib.contextmanager
def tolerance(eps: float | None = None, cap: int | None = None) -> Iterator[None]:
    """Temporarily override the geometric tolerance and/or enumeration cap."""
    saved = dict(_state)
    try:
        if eps is not None:
            set_eps_geo(eps)
        if cap is not None:
            set_enumeration_cap(cap)
        yield
    finally:
        _state.clear()
        _state.update(saved)
