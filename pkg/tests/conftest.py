"""Shared fixtures: witness data and the paths built from it.

Building a path is cheap next to evaluating one, but the suite leans on
the same handful of builds over and over, so they are built once per
session and shared.
"""

import math

import numpy as np
import pytest

from pathcert.generators import GeneratorSpec, cone_confined_points, generate_points
from pathcert.pipeline import build_path
from pathcert.skeleton import WitnessSequence

FIXTURE_KINDS = ("diagonal", "spiral", "cone")
FIXTURE_DIMENSIONS = (2, 3)
FIXTURE_K_MAX = (20, 40)
FIXTURE_CASES = tuple(
    (kind, dimension, k_max)
    for kind in FIXTURE_KINDS
    for dimension in FIXTURE_DIMENSIONS
    for k_max in FIXTURE_K_MAX
)

# witness kinds whose points stay within pi/6 of a single axis; the
# sharp product bound applies to these
RESTRICTED_KINDS = ("diagonal", "cone")


def witness_fixture(kind: str, dimension: int) -> WitnessSequence:
    """Deterministic witness sequence for one fixture kind."""
    if kind == "diagonal":
        spec = GeneratorSpec(kind="diagonal", dimension=dimension, count=160, stop=0.012)
        return WitnessSequence.ingest(generate_points(spec))
    if kind == "spiral":
        spec = GeneratorSpec(kind="spiral", dimension=dimension, count=200, stop=0.012)
        return WitnessSequence.ingest(generate_points(spec))
    if kind == "cone":
        rng = np.random.default_rng(2026 + dimension)
        axis = np.zeros(dimension)
        axis[0] = 1.0
        axis[-1] = 0.5
        points = cone_confined_points(
            rng, dimension, axis, 0.95 * math.pi / 6.0, count=240, stop=0.012
        )
        return WitnessSequence.ingest(points)
    raise ValueError(f"unknown fixture kind {kind!r}")


@pytest.fixture(scope="session")
def builds():
    """(kind, dimension, k_max) -> PathBuild for every fixture case."""
    return {
        case: build_path(witness_fixture(case[0], case[1]), k_max=case[2])
        for case in FIXTURE_CASES
    }


@pytest.fixture(scope="session")
def diagonal_build(builds):
    """The smallest fixture, convenient for single-path tests."""
    return builds[("diagonal", 2, 20)]
