"""
Predefined Instances for Robust Beamforming Toolkit
Small problems with known optima, plus a seeded channel pair drawn the
way the Monte Carlo campaign draws them
"""

import math

import numpy as np

from model import ChannelVector, RobustInstance
from montecarlo import gen_rayleigh_channel

POWER = 10.0
SIGMA2 = 1.0


def get_orthogonal_perfect_csi() -> RobustInstance:
    """
    Orthogonal channels, exact estimates

    The optimum splits the power equally: |h^H w|^2 = 20, energy 20.
    """
    return RobustInstance(
        h_hat=ChannelVector([2, 0]),
        g_hat=ChannelVector([0, 2]),
        power=POWER,
        sigma2=SIGMA2,
        rate_target=math.log2(21.0),
        epsilon=0.0,
    )


def get_orthogonal_robust() -> RobustInstance:
    """
    Orthogonal channels, epsilon = 1/sqrt(10)

    beta = 16 and the rate constraint is active at x = 2, leaving y = sqrt(6);
    guaranteed energy (2*sqrt(6) - 1)^2.
    """
    return RobustInstance(
        h_hat=ChannelVector([2, 0]),
        g_hat=ChannelVector([0, 2]),
        power=POWER,
        sigma2=SIGMA2,
        rate_target=math.log2(10.0),
        epsilon=1.0 / math.sqrt(10.0),
    )


def get_collinear() -> RobustInstance:
    """Identical channels; the matched filter serves both receivers"""
    return RobustInstance(
        h_hat=ChannelVector([2, 0]),
        g_hat=ChannelVector([2, 0]),
        power=POWER,
        sigma2=SIGMA2,
        rate_target=2.0,
        epsilon=0.2,
    )


def get_boundary() -> RobustInstance:
    """Rate target on the feasibility boundary; all power goes to h_hat"""
    return RobustInstance(
        h_hat=ChannelVector([2, 0]),
        g_hat=ChannelVector([math.sqrt(2.0), math.sqrt(2.0)]),
        power=POWER,
        sigma2=SIGMA2,
        rate_target=math.log2(41.0),
        epsilon=0.0,
    )


def get_rayleigh_pair(seed: int = 2024) -> RobustInstance:
    """Four-antenna normalized Rayleigh pair with ||h||^2 = ||g||^2 = 4"""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return RobustInstance(
        h_hat=gen_rayleigh_channel(4, 4.0, rng),
        g_hat=gen_rayleigh_channel(4, 4.0, rng),
        power=POWER,
        sigma2=SIGMA2,
        rate_target=3.0,
        epsilon=0.1,
    )


# Instance registry
INSTANCE_REGISTRY = {
    "Orthogonal - Perfect CSI": get_orthogonal_perfect_csi,
    "Orthogonal - Robust (eps = 1/sqrt(10))": get_orthogonal_robust,
    "Collinear Channels": get_collinear,
    "Feasibility Boundary (margin 0)": get_boundary,
    "Rayleigh Pair (seed 2024)": get_rayleigh_pair,
}


def get_instance_names() -> list:
    """Get list of available instance names"""
    return list(INSTANCE_REGISTRY.keys())


def load_instance(name: str) -> RobustInstance:
    """
    Load a predefined instance by name

    Args:
        name: Instance name

    Returns:
        RobustInstance
    """
    if name in INSTANCE_REGISTRY:
        return INSTANCE_REGISTRY[name]()
    raise ValueError(f"Unknown instance: {name}")
