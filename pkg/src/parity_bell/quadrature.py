"""Gauss-Legendre rules on finite intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

DEFAULT_QUAD_TOL = 1e-8


@dataclass(frozen=True)
class QuadratureSpec:
    """Declared quadrature resolution.

    ``nodes`` and ``upper`` default to values scaled with the problem size
    by each consumer; ``tol`` is the a posteriori acceptance threshold.
    """

    nodes: int | None = None
    upper: float | None = None
    tol: float = DEFAULT_QUAD_TOL


@lru_cache(maxsize=32)
def _legendre(n: int):
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n``-point rule on [a, b]."""
    if n < 1:
        raise ValueError("need at least one node")
    x, w = _legendre(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def turning_point(level: int) -> float:
    """Classical turning point sqrt(2 n + 1) of oscillator level ``n``."""
    return math.sqrt(2 * level + 1)
