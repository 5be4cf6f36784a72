"""Cones, sphere covers, and dyadic shells.

The central object is the solid cone about a unit axis z,

    C(z) = { x : there is r >= 0 with ||x - r z|| <= r / sqrt(3) },

whose membership test reduces to the closed form

    x in C(z)  <=>  x = 0, or ( x.z >= 0 and (x.z)^2 >= (2/3) ||x||^2 ),

obtained by minimizing ||x - r z||^2 - r^2/3 over r (the minimum sits at
r = (3/2) x.z).  The angular radius is arccos(sqrt(2/3)).

Sphere covers supply candidate axes: a finite set of unit directions such
that every unit vector lies within a prescribed angle of some direction.
Dyadic shells partition the punctured unit ball by 1/(k+1) < ||x|| <= 1/k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError

TWO_THIRDS = 2.0 / 3.0
# half-opening angle of C(z): arccos(sqrt(2/3)), about 35.26 degrees
CONE_HALF_ANGLE = math.acos(math.sqrt(TWO_THIRDS))
# default cover resolution: half the cone angle, so that recentring any
# covered direction onto its nearest cover direction keeps it inside the cone
DEFAULT_COVER_HALF_ANGLE = 0.5 * CONE_HALF_ANGLE
COVER_SAMPLE_COUNT = 100_000
_COVER_CHUNK = 4096
_MAX_COVER_SIZE = 1 << 21


def _as_unit_vector(coords, tol: float = 1e-12) -> np.ndarray:
    arr = np.array(coords, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise InputError("a direction must be a 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise InputError("direction has non-finite entries")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tol:
        raise InputError(f"direction norm {norm!r} deviates from 1 by more than {tol}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class UnitDirection:
    """A unit vector; norm is validated to within 1e-12 on construction."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", _as_unit_vector(self.coords))

    @property
    def dimension(self) -> int:
        return int(self.coords.size)


@dataclass(frozen=True, eq=False)
class ConeSpec:
    """Solid cone C(axis); the aperture ratio 1/sqrt(3) is fixed."""

    axis: UnitDirection

    @property
    def dimension(self) -> int:
        return self.axis.dimension


@dataclass(frozen=True, eq=False)
class SphereCover:
    """Finite set of unit directions covering the sphere to half_angle.

    ``directions`` has shape (m, n); rows are unit vectors.  ``seed`` and
    ``samples`` record how the covering property was verified.
    """

    dimension: int
    half_angle: float
    directions: np.ndarray
    seed: int
    samples: int

    def __post_init__(self) -> None:
        dirs = np.array(self.directions, dtype=float)
        if dirs.ndim != 2 or dirs.shape[1] != self.dimension:
            raise InputError("directions must have shape (m, dimension)")
        norms = np.linalg.norm(dirs, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise InputError("cover directions must be unit vectors")
        dirs.setflags(write=False)
        object.__setattr__(self, "directions", dirs)

    @property
    def size(self) -> int:
        return int(self.directions.shape[0])


def cone_contains(cone: ConeSpec, x) -> bool:
    """Exact closed-form membership test for the solid cone."""
    vec = np.asarray(x, dtype=float)
    if vec.ndim != 1 or vec.size != cone.dimension:
        raise InputError(
            f"point of dimension {vec.size} tested against cone of dimension {cone.dimension}"
        )
    norm_sq = float(vec @ vec)
    if norm_sq == 0.0:
        return True
    dot = float(vec @ cone.axis.coords)
    return dot >= 0.0 and dot * dot >= TWO_THIRDS * norm_sq


# ---- direction families -------------------------------------------------


def _circle_directions(count: int) -> np.ndarray:
    angles = 2.0 * math.pi * np.arange(count) / count
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def _fibonacci_sphere(count: int) -> np.ndarray:
    golden = math.pi * (3.0 - math.sqrt(5.0))
    idx = np.arange(count)
    z = 1.0 - (2.0 * idx + 1.0) / count
    radial = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    theta = golden * idx
    return np.stack([radial * np.cos(theta), radial * np.sin(theta), z], axis=1)


def _halton_sphere(count: int, dimension: int) -> np.ndarray:
    from scipy.special import ndtri
    from scipy.stats import qmc

    sampler = qmc.Halton(d=dimension, scramble=False)
    u = sampler.random(count)
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    g = ndtri(u)
    norms = np.linalg.norm(g, axis=1)
    keep = norms > 1e-12
    g = g[keep]
    return g / np.linalg.norm(g, axis=1)[:, None]


def _verify_cover(directions: np.ndarray, half_angle: float, seed: int, samples: int) -> bool:
    """Randomized covering check: every sampled unit vector must be within
    half_angle of some direction.  Deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    cos_threshold = math.cos(half_angle)
    dimension = directions.shape[1]
    remaining = samples
    while remaining > 0:
        chunk = min(_COVER_CHUNK, remaining)
        remaining -= chunk
        g = rng.standard_normal((chunk, dimension))
        norms = np.linalg.norm(g, axis=1)
        g = g[norms > 1e-12]
        g /= np.linalg.norm(g, axis=1)[:, None]
        best = (g @ directions.T).max(axis=1)
        if np.any(best < cos_threshold):
            return False
    return True


@lru_cache(maxsize=32)
def _cached_cover(dimension: int, half_angle: float, seed: int, samples: int) -> SphereCover:
    if dimension == 1:
        directions = np.array([[1.0], [-1.0]])
    elif dimension == 2:
        count = max(int(math.ceil(2.0 * math.pi / half_angle)), 4)
        directions = _circle_directions(count)
    else:
        count = 32 if dimension == 3 else 256
        while True:
            if dimension == 3:
                directions = _fibonacci_sphere(count)
            else:
                directions = _halton_sphere(count, dimension)
            if _verify_cover(directions, half_angle, seed, samples):
                break
            count *= 2
            if count > _MAX_COVER_SIZE:
                raise InputError(
                    f"could not cover the sphere in dimension {dimension} "
                    f"at half angle {half_angle}"
                )
    if dimension <= 2 and not _verify_cover(directions, half_angle, seed, samples):
        raise InputError(f"cover construction failed in dimension {dimension}")
    return SphereCover(
        dimension=dimension,
        half_angle=half_angle,
        directions=directions,
        seed=seed,
        samples=samples,
    )


def build_sphere_cover(
    dimension: int,
    half_angle: float = DEFAULT_COVER_HALF_ANGLE,
    *,
    seed: int = 0,
    samples: int = COVER_SAMPLE_COUNT,
) -> SphereCover:
    """Deterministic sphere cover at the requested angular resolution.

    Dimension 1 uses {+1, -1}; dimension 2 equally spaced circle points;
    dimension 3 a Fibonacci lattice; higher dimensions a low-discrepancy
    Gaussian construction.  The candidate set is doubled until the
    randomized covering check passes.
    """
    if not isinstance(dimension, int) or dimension < 1:
        raise InputError(f"dimension must be a positive integer, got {dimension!r}")
    if not (0.0 < half_angle < math.pi / 2.0):
        raise InputError(f"half_angle must lie in (0, pi/2), got {half_angle!r}")
    if samples < 1:
        raise InputError("samples must be positive")
    return _cached_cover(dimension, float(half_angle), int(seed), int(samples))


# ---- dominant cone selection -------------------------------------------


def select_dominant_cone(points, cover: SphereCover) -> tuple[ConeSpec, list[int]]:
    """Pick the cover direction whose cone captures the most points.

    Ties break to the lowest direction index.  Returns the winning cone
    and the indices of the captured points, in input order.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    if not pts:
        raise InputError("at least one point is required")
    for i, p in enumerate(pts):
        if p.ndim != 1 or p.size != cover.dimension:
            raise InputError(f"point {i} does not have dimension {cover.dimension}")
        if not np.all(np.isfinite(p)):
            raise InputError(f"point {i} has non-finite entries")
        if float(p @ p) == 0.0:
            raise InputError(f"point {i} is the origin")
    # count captures per direction through the scalar predicate itself, so
    # the winner and the returned indices agree bit for bit with cone_contains
    cones = [ConeSpec(UnitDirection(d)) for d in cover.directions]
    counts = [sum(1 for p in pts if cone_contains(c, p)) for c in cones]
    winner = int(np.argmax(counts))
    cone = cones[winner]
    indices = [i for i, p in enumerate(pts) if cone_contains(cone, p)]
    return cone, indices


# ---- dyadic shells ------------------------------------------------------


def shell_index(x) -> int:
    """Index k of the shell 1/(k+1) < ||x|| <= 1/k containing x.

    Requires 0 < ||x|| <= 1.
    """
    vec = np.asarray(x, dtype=float)
    radius = float(np.linalg.norm(vec))
    if not (0.0 < radius <= 1.0):
        raise InputError(f"shell index needs 0 < ||x|| <= 1, got norm {radius!r}")
    k = int(math.floor(1.0 / radius))
    # guard the floor against rounding at shell boundaries
    while k >= 1 and radius > 1.0 / k:
        k -= 1
    while radius <= 1.0 / (k + 1):
        k += 1
    if k < 1:
        raise InputError(f"norm {radius!r} lies outside every shell")
    return k


def select_parity(points) -> tuple[str, dict[int, list[int]]]:
    """Choose the parity ('even' or 'odd') with more occupied shells.

    The count is over distinct shell indices, not points.  Ties break to
    'even'.  Also returns the shell -> point indices map.
    """
    shells: dict[int, list[int]] = {}
    for i, p in enumerate(points):
        k = shell_index(p)
        shells.setdefault(k, []).append(i)
    if not shells:
        raise InputError("at least one point is required")
    even = sum(1 for k in shells if k % 2 == 0)
    odd = len(shells) - even
    parity = "even" if even >= odd else "odd"
    return parity, shells
