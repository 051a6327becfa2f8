"""Shared fixtures: random model generators and session-scoped
reproduction runs reused across test modules."""

import time

import numpy as np
import pytest

from sg2c import PartitionedMatrix, PolytopicModel, repro_example


def random_partitioned(rng, n: int, n1: int) -> PartitionedMatrix:
    return PartitionedMatrix(rng.standard_normal((n, n)), n1, n - n1)


def stable_block(rng, m: int, shift: float | None = None) -> np.ndarray:
    """Random matrix shifted until every eigenvalue pair sum is well
    negative."""
    A = rng.standard_normal((m, m))
    if shift is None:
        # two eigenvalues at a time must sum below -1
        shift = max(np.linalg.eigvals(A).real.max(), 0.0) + 1.0
    return A - shift * np.eye(m)


def random_stable_polytope(rng, coupling: float = 0.05,
                           n_vertices: int = 2) -> PolytopicModel:
    """Weakly coupled interconnection of two very stable blocks; all
    certification routes should succeed with margin."""
    n1 = int(rng.integers(2, 4))
    n2 = int(rng.integers(2, 4))
    n = n1 + n2
    base = np.zeros((n, n))
    base[:n1, :n1] = stable_block(rng, n1)
    base[n1:, n1:] = stable_block(rng, n2)
    vertices = []
    for _ in range(n_vertices):
        V = base.copy()
        V[:n1, n1:] = coupling * rng.standard_normal((n1, n2))
        V[n1:, :n1] = coupling * rng.standard_normal((n2, n1))
        vertices.append(PartitionedMatrix(V, n1, n2))
    return PolytopicModel(tuple(vertices))


def random_cascade(rng, upper: bool) -> PolytopicModel:
    """Block-triangular model with Hurwitz diagonal compound blocks.

    ``upper`` True zeroes the A21 block, False zeroes A12.
    """
    n1 = int(rng.integers(2, 4))
    n2 = int(rng.integers(2, 4))
    n = n1 + n2
    V = np.zeros((n, n))
    V[:n1, :n1] = stable_block(rng, n1)
    V[n1:, n1:] = stable_block(rng, n2)
    if upper:
        V[:n1, n1:] = rng.standard_normal((n1, n2))
    else:
        V[n1:, :n1] = rng.standard_normal((n2, n1))
    return PolytopicModel((PartitionedMatrix(V, n1, n2),))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def _timed_repro(name):
    t0 = time.perf_counter()
    report = repro_example(name)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def ms4_repro():
    return _timed_repro("multistable4")


@pytest.fixture(scope="session")
def t4_repro():
    return _timed_repro("thomas4")


@pytest.fixture(scope="session")
def t3_repro():
    return _timed_repro("thomas3")
