"""Gauss-Legendre panel quadrature.

Integrands here are smooth inside each panel but may lose regularity at
known locations (segment junctions of a piecewise-affine path, kernel
support endpoints), so every caller passes the split points explicitly
as panel edges.  Each panel is evaluated at two quadrature orders and
bisected recursively while the two estimates disagree.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

DEFAULT_ORDER = 20
DEFAULT_TOL = 1e-12
_MAX_DEPTH = 24


@lru_cache(maxsize=64)
def gauss_legendre_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], cached per order."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _panel_estimate(
    f: Callable[[np.ndarray], np.ndarray], a: float, b: float, order: int
) -> np.ndarray:
    nodes, weights = gauss_legendre_nodes(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    values = np.asarray(f(mid + half * nodes), dtype=float)
    # handles scalar-valued (m,) and vector-valued (m, n) integrands alike
    return half * np.tensordot(weights, values, axes=(0, 0))


def _adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    order: int,
    tol: float,
    depth: int,
) -> np.ndarray:
    coarse = _panel_estimate(f, a, b, order)
    fine = _panel_estimate(f, a, b, 2 * order)
    if depth <= 0 or np.max(np.abs(fine - coarse)) <= tol:
        return fine
    mid = 0.5 * (a + b)
    left = _adaptive(f, a, mid, order, tol, depth - 1)
    right = _adaptive(f, mid, b, order, tol, depth - 1)
    return left + right


def integrate_panels(
    f: Callable[[np.ndarray], np.ndarray],
    edges,
    order: int = DEFAULT_ORDER,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Integrate a vectorized integrand over [edges[0], edges[-1]].

    ``edges`` must be ascending; interior entries split the interval at
    points where the integrand is not smooth.  ``f`` maps an array of
    abscissae (m,) to values (m,) or (m, n).
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise ValueError("edges must be a 1-d array with at least two entries")
    if np.any(np.diff(edges) < 0):
        raise ValueError("edges must be ascending")
    total = None
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        part = _adaptive(f, float(a), float(b), order, tol, _MAX_DEPTH)
        total = part if total is None else total + part
    if total is None:
        # zero-width interval
        zero_probe = np.asarray(f(np.array([edges[0]])), dtype=float)
        shape = zero_probe.shape[1:]
        return np.zeros(shape) if shape else 0.0
    return total
