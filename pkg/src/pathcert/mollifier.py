"""Bump kernel and windowed mollification of the skeleton.

The kernel is the classical bump

    rho(u) = c * exp(-1 / (1 - u^2))   for |u| < 1,   0 otherwise,

normalized so its integral over (-1, 1) equals one.  The smooth path
agrees with the skeleton outside a family of disjoint windows, one per
pair of consecutive anchors; inside window k the path is the local
average

    s(t) = integral rho(u) * skeleton(t - u * h_k) du over (-1, 1)

with half-width h_k equal to a quarter of the anchor spacing d_k.  The
window interval [lo_k, hi_k] has

    lo_k = (t_{k+1,0} + t_{k,2}) / 2,    hi_k = (t_{k,1} + t_{k,0}) / 2,

so both slope changes of pair k fall strictly inside while all anchor
times stay outside even after widening by h_k.  Because the kernel is
even with unit mass, the average reproduces affine stretches exactly;
the smooth path is therefore still affine near the window edges and
interpolates the anchors exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, InputError
from .parallel import map_ordered
from .quadrature import gauss_legendre_nodes, integrate_panels
from .skeleton import (
    AnchorSequence,
    PiecewiseAffinePath,
    build_skeleton,
    eval_affine_derivative_many,
    eval_affine_many,
    kink_times,
)

KERNEL_MASS_TOL = 1e-12


def _bare_bump(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
    return out


@dataclass(frozen=True, eq=False)
class BumpKernel:
    """Normalized bump kernel with compact support (-1, 1)."""

    c: float

    def __call__(self, u):
        arr = np.asarray(u, dtype=float)
        scalar = arr.ndim == 0
        values = self.c * _bare_bump(np.atleast_1d(arr))
        return float(values[0]) if scalar else values


@lru_cache(maxsize=1)
def make_kernel() -> BumpKernel:
    """Construct the normalized kernel and verify unit mass to 1e-12."""
    edges = (-1.0, -0.5, 0.0, 0.5, 1.0)
    base = float(integrate_panels(_bare_bump, edges, order=20, tol=1e-15))
    kernel = BumpKernel(c=1.0 / base)
    mass = float(integrate_panels(kernel, edges, order=20, tol=1e-15))
    if abs(mass - 1.0) > KERNEL_MASS_TOL:
        raise RuntimeError(f"kernel normalization drifted: mass {mass!r}")
    return kernel


# ---- windows ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MollificationWindow:
    """Closed interval [lo, hi] mollified with half-width h."""

    k: int
    lo: float
    hi: float
    h: float

    def __post_init__(self) -> None:
        if not (self.lo < self.hi):
            raise InputError(f"window {self.k}: lo must stay below hi")
        if not (self.h > 0.0):
            raise InputError(f"window {self.k}: half-width must be positive")


def windows_for_anchors(anchors: AnchorSequence) -> tuple[MollificationWindow, ...]:
    """One window per consecutive anchor pair, ascending in t."""
    entries = anchors.entries
    windows = []
    for k in range(len(entries) - 1, 0, -1):
        upper = entries[k - 1]
        lower = entries[k]
        lo = 0.5 * (lower.t0 + upper.t2)
        hi = 0.5 * (upper.t1 + upper.t0)
        h = 0.25 * (upper.t0 - upper.t1)
        windows.append(MollificationWindow(k=k, lo=lo, hi=hi, h=h))
    return tuple(windows)


# ---- smooth path --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SmoothPath:
    """Windowed mollification of a piecewise-affine skeleton.

    Valid parameters are domain_inf < t <= domain_sup.  Outside every
    window the path coincides with the skeleton.
    """

    skeleton: PiecewiseAffinePath
    kernel: BumpKernel
    windows: tuple[MollificationWindow, ...]
    domain_inf: float
    domain_sup: float
    _lo: np.ndarray = field(init=False, repr=False)
    _hi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (self.domain_inf < self.domain_sup):
            raise InputError("empty parameter domain")
        skel_lo, skel_hi = self.skeleton.domain
        if self.domain_inf < skel_lo or self.domain_sup > skel_hi:
            raise InputError("domain exceeds the skeleton's parameter range")
        lo = np.array([w.lo for w in self.windows], dtype=float)
        hi = np.array([w.hi for w in self.windows], dtype=float)
        if np.any(np.diff(lo) <= 0.0) or np.any(lo[1:] <= hi[:-1]):
            raise InputError("windows must be ascending and disjoint")
        for w in self.windows:
            if w.lo - w.h <= skel_lo or w.hi + w.h > skel_hi + 1e-12:
                raise InputError(
                    f"window {w.k} widened by h leaves the skeleton range"
                )
            inner = self.skeleton.breakpoints
            covered = (inner > w.lo - w.h) & (inner < w.hi + w.h)
            kinks = inner[covered]
            if np.any((kinks < w.lo + w.h) | (kinks > w.hi - w.h)):
                raise InputError(
                    f"window {w.k} has a slope change too close to its edge"
                )
        for arr in (lo, hi):
            arr.setflags(write=False)
        object.__setattr__(self, "_lo", lo)
        object.__setattr__(self, "_hi", hi)

    @property
    def dimension(self) -> int:
        return self.skeleton.dimension

    @property
    def domain(self) -> tuple[float, float]:
        return self.domain_inf, self.domain_sup

    def window_index(self, t: float) -> int:
        """Index into windows if t lies in one, else -1."""
        i = int(np.searchsorted(self._lo, t, side="right")) - 1
        if i >= 0 and t <= float(self._hi[i]):
            return i
        return -1


def build_smooth_path(
    anchors: AnchorSequence,
    skeleton: PiecewiseAffinePath | None = None,
    kernel: BumpKernel | None = None,
) -> SmoothPath:
    """Mollify the skeleton of an anchor sequence on its window family."""
    if skeleton is None:
        skeleton = build_skeleton(anchors)
    if kernel is None:
        kernel = make_kernel()
    windows = windows_for_anchors(anchors)
    lo, hi = skeleton.domain
    return SmoothPath(
        skeleton=skeleton,
        kernel=kernel,
        windows=windows,
        domain_inf=lo,
        domain_sup=hi,
    )


# ---- evaluation ---------------------------------------------------------

# standard panel split of the kernel support; every averaging range holds
# at most one slope change, inserted as a sixth edge where present
_STD_EDGES = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
_BASE_ORDER = 32
_CHUNK_ROWS = 1024


def _quadrature_tol(magnitude: float) -> float:
    return 1e-12 * max(1.0, magnitude)


def mollified_value(
    skeleton: PiecewiseAffinePath,
    kernel: BumpKernel,
    t: float,
    h: float,
    derivative: bool = False,
) -> np.ndarray:
    """Kernel average of the skeleton (or its slope field) around t.

    Computes integral rho(u) * p(t - u h) du over (-1, 1).  Thin wrapper
    over the batched rule so scalar and batched evaluation agree exactly.
    """
    rows = _mollified_rows(
        skeleton, kernel, np.array([float(t)]), np.array([float(h)]), derivative
    )
    return rows[0]


def _adaptive_row(
    skeleton: PiecewiseAffinePath,
    kernel: BumpKernel,
    t: float,
    h: float,
    edges: np.ndarray,
    derivative: bool,
    tol: float,
) -> np.ndarray:
    lo, hi = skeleton.domain
    floor = np.nextafter(lo, hi)
    evaluate = eval_affine_derivative_many if derivative else eval_affine_many

    def integrand(u: np.ndarray) -> np.ndarray:
        pts = np.clip(t - u * h, floor, hi)
        return kernel(u)[:, None] * evaluate(skeleton, pts)

    return np.asarray(integrate_panels(integrand, edges, order=_BASE_ORDER, tol=tol))


def _mollified_rows(
    skeleton: PiecewiseAffinePath,
    kernel: BumpKernel,
    ts: np.ndarray,
    hs: np.ndarray,
    derivative: bool,
) -> np.ndarray:
    """Batched kernel averages; one row per parameter.

    Each row integrates over the standard panel split with the row's
    slope-change preimage inserted as an extra edge.  A base-order rule
    is checked against the doubled order; rows that disagree fall back
    to adaptive panel quadrature.
    """
    lo, hi = skeleton.domain
    if ts.size == 0:
        return np.empty((0, skeleton.dimension))
    span_lo = ts - hs
    span_hi = ts + hs
    if float(span_lo.min()) < lo - 1e-12 or float(span_hi.max()) > hi + 1e-12:
        raise DomainError("an averaging range leaves the skeleton domain")
    kinks = kink_times(skeleton)

    def chunk_rows(bounds: tuple[int, int]) -> np.ndarray:
        a, b = bounds
        return _rows_chunk(
            skeleton, kernel, kinks, ts[a:b], hs[a:b], derivative
        )

    spans = [(a, min(a + _CHUNK_ROWS, ts.size)) for a in range(0, ts.size, _CHUNK_ROWS)]
    return np.concatenate(map_ordered(chunk_rows, spans), axis=0)


def _rows_chunk(
    skeleton: PiecewiseAffinePath,
    kernel: BumpKernel,
    kinks: np.ndarray,
    ts: np.ndarray,
    hs: np.ndarray,
    derivative: bool,
) -> np.ndarray:
    m = ts.size
    n = skeleton.dimension
    lo, hi = skeleton.domain
    floor = np.nextafter(lo, hi)
    evaluate = eval_affine_derivative_many if derivative else eval_affine_many

    # locate the (at most one) slope change inside each averaging range
    first = np.searchsorted(kinks, ts - hs, side="right")
    last = np.searchsorted(kinks, ts + hs, side="left")
    count = last - first
    tau = np.ones(m)
    pos = np.full(m, _STD_EDGES.size, dtype=int)
    single = count == 1
    if np.any(single):
        tau[single] = (ts[single] - kinks[first[single]]) / hs[single]
        pos[single] = np.searchsorted(_STD_EDGES, tau[single])
    crowded = np.nonzero(count > 1)[0]

    edges = np.empty((m, _STD_EDGES.size + 1))
    for j in range(_STD_EDGES.size + 1):
        below = _STD_EDGES[j] if j < _STD_EDGES.size else 1.0
        above = _STD_EDGES[j - 1] if j >= 1 else -1.0
        edges[:, j] = np.where(j < pos, below, np.where(j == pos, tau, above))

    def rule(order: int) -> np.ndarray:
        nodes, weights = gauss_legendre_nodes(order)
        a = edges[:, :-1]
        b = edges[:, 1:]
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        u = mid[:, :, None] + half[:, :, None] * nodes[None, None, :]
        pts = np.clip(ts[:, None, None] - u * hs[:, None, None], floor, hi)
        values = evaluate(skeleton, pts.ravel()).reshape(u.shape + (n,))
        density = kernel(u.ravel()).reshape(u.shape)
        return np.einsum("q,mpq,mpqn,mp->mn", weights, density, values, half)

    coarse = rule(_BASE_ORDER)
    fine = rule(2 * _BASE_ORDER)
    out = fine
    gap = np.max(np.abs(fine - coarse), axis=1)
    scale = np.maximum(1.0, np.max(np.abs(fine), axis=1))
    retry = np.nonzero(gap > 1e-12 * scale)[0]
    for i in np.unique(np.concatenate([retry, crowded])):
        bp = skeleton.breakpoints
        f = int(np.searchsorted(bp, ts[i] - hs[i], side="right"))
        l = int(np.searchsorted(bp, ts[i] + hs[i], side="left"))
        inner = np.sort((ts[i] - bp[f:l]) / hs[i])
        row_edges = np.unique(np.concatenate([_STD_EDGES, inner]))
        row_edges = row_edges[(row_edges >= -1.0) & (row_edges <= 1.0)]
        out[i] = _adaptive_row(
            skeleton,
            kernel,
            float(ts[i]),
            float(hs[i]),
            row_edges,
            derivative,
            tol=1e-13 * float(scale[i]),
        )
    return out


def _eval_batch(path: SmoothPath, ts, derivative: bool) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(ts, dtype=float))
    if arr.size == 0:
        raise InputError("at least one parameter value is required")
    lo, hi = path.domain
    if float(arr.min()) <= lo or float(arr.max()) > hi:
        bad = float(arr.min()) if float(arr.min()) <= lo else float(arr.max())
        raise DomainError(f"t = {bad!r} outside the path domain ({lo!r}, {hi!r}]")
    if path._lo.size:
        idx = np.searchsorted(path._lo, arr, side="right") - 1
        in_window = (idx >= 0) & (arr <= path._hi[np.clip(idx, 0, None)])
    else:
        idx = np.full(arr.size, -1)
        in_window = np.zeros(arr.size, dtype=bool)
    out = np.empty((arr.size, path.dimension))
    plain = ~in_window
    if np.any(plain):
        evaluate = eval_affine_derivative_many if derivative else eval_affine_many
        out[plain] = evaluate(path.skeleton, arr[plain])
    windowed = np.nonzero(in_window)[0]
    if windowed.size:
        hs = np.array([path.windows[i].h for i in idx[windowed]])
        out[windowed] = _mollified_rows(
            path.skeleton, path.kernel, arr[windowed], hs, derivative
        )
    return out


def eval_smooth_many(path: SmoothPath, ts) -> np.ndarray:
    """Path values at an array of parameters, shape (m, dimension)."""
    return _eval_batch(path, ts, derivative=False)


def eval_smooth_derivative_many(path: SmoothPath, ts) -> np.ndarray:
    """Path derivatives at an array of parameters, shape (m, dimension)."""
    return _eval_batch(path, ts, derivative=True)


def eval_smooth(path: SmoothPath, t: float) -> np.ndarray:
    return eval_smooth_many(path, [float(t)])[0]


def eval_smooth_derivative(path: SmoothPath, t: float) -> np.ndarray:
    return eval_smooth_derivative_many(path, [float(t)])[0]


# ---- sampling -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SampleRow:
    """One sampled parameter with values, derivatives, and norms."""

    t: float
    s: np.ndarray
    ds: np.ndarray
    norm_s: float
    norm_ds: float
    product: float


def sample_path(path: SmoothPath, ts) -> list[SampleRow]:
    """Evaluate the path and its derivative on a parameter grid."""
    arr = np.atleast_1d(np.asarray(ts, dtype=float))
    if arr.size == 0:
        raise InputError("sampling grid is empty")
    values = eval_smooth_many(path, arr)
    derivs = eval_smooth_derivative_many(path, arr)
    norm_s = np.linalg.norm(values, axis=1)
    norm_ds = np.linalg.norm(derivs, axis=1)
    product = norm_s * norm_ds
    return [
        SampleRow(
            t=float(arr[i]),
            s=values[i],
            ds=derivs[i],
            norm_s=float(norm_s[i]),
            norm_ds=float(norm_ds[i]),
            product=float(product[i]),
        )
        for i in range(arr.size)
    ]


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """Logarithmically spaced grid on [lo, hi]; endpoints included."""
    if not (0.0 < lo < hi):
        raise InputError("log grid needs 0 < lo < hi")
    if count < 2:
        raise InputError("grid needs at least two points")
    return np.geomspace(lo, hi, count)


def dense_grid(
    path: SmoothPath, per_decade: int = 2048, per_window: int = 64
) -> np.ndarray:
    """Logarithmic grid over the domain, refined inside every window."""
    lo, hi = path.domain
    start = np.nextafter(lo, hi)
    decades = math.log10(hi / start)
    count = max(int(math.ceil(per_decade * decades)), 2)
    parts = [np.geomspace(start, hi, count)]
    for w in path.windows:
        parts.append(np.linspace(w.lo, w.hi, per_window))
    grid = np.unique(np.concatenate(parts))
    return grid[(grid > lo) & (grid <= hi)]
