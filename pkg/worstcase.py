"""
Worst-Case Analysis for Robust Beamforming Toolkit
Closed-form worst-case bounds over the channel-error ball, the error vectors
that attain them, and a sampling adversary that checks a beamformer
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from model import (Beamformer, ChannelVector, DimensionMismatch, RobustInstance,
                   ZeroBeamformer)

logger = logging.getLogger(__name__)

AMPLITUDE_TOL = 1e-10
POWER_TOL = 1e-9

SAMPLING_MODES = ("interior", "boundary", "mixed")


@dataclass(frozen=True, eq=False)
class ErrorVector:
    """Channel-estimate error (delta h or delta g) inside a ball of radius epsilon"""

    delta: np.ndarray
    radius_bound: float

    def __post_init__(self):
        delta = np.array(self.delta, dtype=np.complex128).reshape(-1)
        if delta.size < 1:
            raise ValueError("delta must have at least one entry")
        if self.radius_bound < 0:
            raise ValueError("radius_bound must be >= 0")
        norm = float(np.linalg.norm(delta))
        if norm > self.radius_bound + 1e-12 * max(1.0, self.radius_bound):
            raise ValueError(f"||delta|| = {norm} exceeds radius {self.radius_bound}")
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "radius_bound", float(self.radius_bound))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.delta))


@dataclass(frozen=True)
class AdversaryReport:
    """Outcome of sampling the uncertainty ball against one beamformer"""

    n_samples: int
    min_energy: float
    min_rate: float
    closed_form_energy: float
    closed_form_rate_power: float
    rate_outage: bool
    energy_bound_violated: bool
    rate_target: float = 0.0
    outage_fraction: float = 0.0
    mode: str = "mixed"

    def to_dict(self) -> dict:
        return asdict(self)


def _require_nonzero(w: Beamformer) -> float:
    norm = w.norm
    if norm == 0.0:
        raise ZeroBeamformer("worst-case quantities need a nonzero beamformer")
    return norm


def worst_case_amplitude(v_hat: ChannelVector, epsilon: float, w: Beamformer) -> float:
    """
    Exact minimum of |(v_hat + dv)^H w| over ||dv|| <= epsilon

    Triangle plus Cauchy-Schwarz give |v_hat^H w| - epsilon*||w||; once that
    goes negative an in-ball error nulls the inner product, hence the clamp.
    """
    norm = _require_nonzero(w)
    return max(abs(v_hat.inner(w)) - epsilon * norm, 0.0)


def worst_case_energy(g_hat: ChannelVector, epsilon: float, w: Beamformer) -> float:
    """Guaranteed harvested energy over the error ball"""
    return worst_case_amplitude(g_hat, epsilon, w) ** 2


def worst_case_rate(h_hat: ChannelVector, epsilon: float, w: Beamformer, sigma2: float) -> float:
    """Guaranteed information rate over the error ball"""
    return math.log2(1.0 + worst_case_amplitude(h_hat, epsilon, w) ** 2 / sigma2)


def worst_error_vector(v_hat: ChannelVector, epsilon: float, w: Beamformer) -> ErrorVector:
    """
    Error vector attaining worst_case_amplitude

    The step is -rho * (w/||w||) * e^{-j*theta} with theta the phase of
    v_hat^H w, so it shrinks the inner product along its own phase. rho is
    epsilon, or |v_hat^H w|/||w|| when that already nulls it.
    """
    norm = _require_nonzero(w)
    inner = v_hat.inner(w)
    theta = np.angle(inner) if inner != 0 else 0.0
    rho = min(epsilon, abs(inner) / norm)
    delta = -(w.w / norm) * rho * np.exp(-1j * theta)
    return ErrorVector(delta, epsilon)


def sample_ball_batch(epsilon: float, n: int, count: int, mode: str,
                      rng: np.random.Generator) -> np.ndarray:
    """
    Draw count error vectors of dimension n as rows of a (count, n) array

    Directions are normalized standard complex Gaussians (uniform on the
    complex sphere). Boundary mode fixes the radius at epsilon; interior
    mode uses epsilon * u^(1/(2n)), which is uniform over the solid ball in
    2n real dimensions.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode not in ("interior", "boundary"):
        raise ValueError(f"unknown sampling mode '{mode}'")
    if count <= 0 or epsilon == 0.0:
        return np.zeros((max(count, 0), n), dtype=np.complex128)

    directions = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    if mode == "boundary":
        return epsilon * directions
    radii = epsilon * rng.random(count) ** (1.0 / (2 * n))
    return radii[:, None] * directions


def sample_ball(epsilon: float, n: int, mode: str, rng: np.random.Generator) -> ErrorVector:
    """Draw one error vector from the ball of radius epsilon"""
    delta = sample_ball_batch(epsilon, n, 1, mode, rng)[0]
    if mode == "boundary" and epsilon > 0:
        # pin the norm exactly; normalization leaves an ulp of drift
        delta = delta * (epsilon / np.linalg.norm(delta))
    return ErrorVector(delta, epsilon)


def draw_errors(epsilon: float, n: int, count: int, mode: str,
                rng: np.random.Generator) -> np.ndarray:
    """Sampler behind the adversary; 'mixed' puts the first half on the boundary"""
    if mode not in SAMPLING_MODES:
        raise ValueError(f"unknown sampling mode '{mode}'")
    if mode != "mixed":
        return sample_ball_batch(epsilon, n, count, mode, rng)
    n_boundary = count // 2
    return np.vstack([
        sample_ball_batch(epsilon, n, n_boundary, "boundary", rng),
        sample_ball_batch(epsilon, n, count - n_boundary, "interior", rng),
    ])


def perturbed_inner(v_hat: ChannelVector, deltas: np.ndarray, w: Beamformer) -> np.ndarray:
    """(v_hat + delta_k)^H w for every row delta_k"""
    return v_hat.inner(w) + deltas.conj() @ w.w


def evaluate_errors(instance: RobustInstance, w: Beamformer, dh: np.ndarray, dg: np.ndarray,
                    mode: str = "mixed") -> AdversaryReport:
    """
    Evaluate a beamformer against given error draws

    The closed-form worst vectors for w are appended to dh and dg, so the
    reported minima are never optimistic. outage_fraction only counts the
    supplied draws.
    """
    if w.n != instance.n:
        raise DimensionMismatch(f"beamformer has {w.n} entries, instance has {instance.n}", "w")
    eps = instance.epsilon
    n_draws = dh.shape[0]
    dh = np.vstack([dh, worst_error_vector(instance.h_hat, eps, w).delta[None, :]])
    dg = np.vstack([dg, worst_error_vector(instance.g_hat, eps, w).delta[None, :]])

    energies = np.abs(perturbed_inner(instance.g_hat, dg, w)) ** 2
    rates = np.log2(1.0 + np.abs(perturbed_inner(instance.h_hat, dh, w)) ** 2 / instance.sigma2)

    closed_energy = worst_case_energy(instance.g_hat, eps, w)
    closed_rate_power = worst_case_amplitude(instance.h_hat, eps, w) ** 2
    min_energy = float(energies.min())
    min_rate = float(rates.min())
    threshold = instance.rate_target - POWER_TOL

    return AdversaryReport(
        n_samples=n_draws,
        min_energy=min_energy,
        min_rate=min_rate,
        closed_form_energy=closed_energy,
        closed_form_rate_power=closed_rate_power,
        rate_outage=bool(min_rate < threshold),
        energy_bound_violated=bool(min_energy < closed_energy - POWER_TOL),
        rate_target=instance.rate_target,
        outage_fraction=float(np.mean(rates[:n_draws] < threshold)) if n_draws else 0.0,
        mode=mode,
    )


def adversarial_check(instance: RobustInstance, w: Beamformer, n_samples: int,
                      rng: np.random.Generator, mode: str = "mixed") -> AdversaryReport:
    """
    Attack a beamformer with sampled channel errors

    Args:
        instance: Problem datum giving h_hat, g_hat, sigma2, r and epsilon
        w: Beamformer under test
        n_samples: Number of random draws for each of delta h and delta g
        rng: Random stream
        mode: 'mixed' (half boundary, half interior), 'interior' or 'boundary'

    Returns:
        AdversaryReport over the draws plus the two closed-form worst vectors
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if w.n != instance.n:
        raise DimensionMismatch(f"beamformer has {w.n} entries, instance has {instance.n}", "w")
    dh = draw_errors(instance.epsilon, instance.n, n_samples, mode, rng)
    dg = draw_errors(instance.epsilon, instance.n, n_samples, mode, rng)
    report = evaluate_errors(instance, w, dh, dg, mode)
    logger.debug("adversary: min energy %.6g (bound %.6g), min rate %.6g vs r=%g",
                 report.min_energy, report.closed_form_energy, report.min_rate,
                 instance.rate_target)
    return report
