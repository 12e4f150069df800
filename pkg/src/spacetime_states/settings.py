"""Global numerical tolerances.

``tol`` is the comparison threshold for density operators (Hermiticity,
positivity, trace, distances). ``norm_tol`` bounds deviations of state
vector norms. Both can be changed process-wide with :func:`set_tolerances`
or temporarily with the :func:`tolerances` context manager.
"""

from __future__ import annotations

import contextlib
import os
from dataclasses import dataclass

DEFAULT_TOL = 1e-10
DEFAULT_NORM_TOL = 1e-12
ENV_TOL = "SPACETIME_STATES_TOL"


@dataclass
class Tolerances:
    tol: float = DEFAULT_TOL
    norm_tol: float = DEFAULT_NORM_TOL


_current = Tolerances()


def tol() -> float:
    return _current.tol


def norm_tol() -> float:
    return _current.norm_tol


def set_tolerances(tol: float | None = None, norm_tol: float | None = None) -> None:
    if tol is not None:
        if not tol > 0:
            raise ValueError("tolerance must be positive")
        _current.tol = float(tol)
    if norm_tol is not None:
        if not norm_tol > 0:
            raise ValueError("norm tolerance must be positive")
        _current.norm_tol = float(norm_tol)


@contextlib.contextmanager
def tolerances(tol: float | None = None, norm_tol: float | None = None):
    saved = (_current.tol, _current.norm_tol)
    try:
        set_tolerances(tol, norm_tol)
        yield _current
    finally:
        _current.tol, _current.norm_tol = saved


def tol_from_env(default: float = DEFAULT_TOL) -> float:
    """Read the default tolerance override from the environment, if set."""
    raw = os.environ.get(ENV_TOL)
    if raw is None or raw.strip() == "":
        return default
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{ENV_TOL} must be positive, got {raw!r}")
    return value
