"""Shared fixtures for the beamforming test suite."""

import math

import numpy as np
import pytest

from model import ChannelVector, RobustInstance, max_feasible_rate


def random_channel(rng: np.random.Generator, n: int, norm2: float = None) -> ChannelVector:
    entries = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    if norm2 is not None:
        entries *= math.sqrt(norm2) / np.linalg.norm(entries)
    return ChannelVector(entries)


def random_feasible_instance(rng: np.random.Generator, n: int = None) -> RobustInstance:
    """Protocol-style instance with r drawn inside the robust feasible range"""
    if n is None:
        n = int(rng.choice([2, 3, 4, 8]))
    h_hat = random_channel(rng, n, float(n))
    g_hat = random_channel(rng, n, float(n))
    epsilon = float(rng.uniform(0.0, 0.5))
    base = RobustInstance(h_hat, g_hat, 10.0, 1.0, 0.0, epsilon)
    rate = float(rng.uniform(0.0, 0.98)) * max_feasible_rate(base)
    return RobustInstance(h_hat, g_hat, 10.0, 1.0, rate, epsilon)


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.SeedSequence(12345))


@pytest.fixture
def make_instance():
    return random_feasible_instance


@pytest.fixture(scope="session")
def random_instances():
    rng = np.random.default_rng(np.random.SeedSequence(2016))
    return [random_feasible_instance(rng) for _ in range(120)]


@pytest.fixture
def orthogonal_perfect():
    """h = [2, 0], g = [0, 2], P = 10, exact CSI, r = log2(21)"""
    return RobustInstance(ChannelVector([2, 0]), ChannelVector([0, 2]), 10.0, 1.0,
                          math.log2(21.0), 0.0)


@pytest.fixture
def orthogonal_robust():
    """h = [2, 0], g = [0, 2], P = 10, eps = 1/sqrt(10), r = log2(10)"""
    return RobustInstance(ChannelVector([2, 0]), ChannelVector([0, 2]), 10.0, 1.0,
                          math.log2(10.0), 1.0 / math.sqrt(10.0))


@pytest.fixture
def infeasible_instance():
    return RobustInstance(ChannelVector([2, 0]), ChannelVector([0, 2]), 10.0, 1.0, 5.0, 3.0)
