"""
Problem Model for Robust Beamforming Toolkit
Channel vectors, beamformers, robust problem instances, feasibility screening
and instance/beamformer serialization
"""

import json
import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

# Energy conversion efficiency at the energy receiver
ETA = 1.0

# Absolute tolerance on the feasibility margin; equality counts as feasible
FEASIBILITY_TOL = 1e-12


class BeamformingError(Exception):
    """Base class for every error raised by the toolkit"""


class InstanceParseError(BeamformingError, ValueError):
    """Malformed instance, beamformer or solution document"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class DimensionMismatch(BeamformingError, ValueError):
    """Vectors that must share a dimension do not"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class InfeasibleInstance(BeamformingError):
    """No beamformer meets the worst-case rate target within the power budget"""

    def __init__(self, message: str, margin: float):
        super().__init__(message)
        self.margin = margin


class ZeroBeamformer(BeamformingError, ValueError):
    """Worst-case quantities are undefined for w = 0"""


class DegenerateRecovery(BeamformingError):
    """The recovery matrix mu*I - lambda*H is numerically singular"""


class ToleranceNotReached(BeamformingError):
    """A solver could not meet its numerical tolerance"""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class ConfigError(BeamformingError, ValueError):
    """Invalid campaign configuration"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class TrialError(BeamformingError):
    """A solver error raised inside one Monte Carlo trial"""

    def __init__(self, message: str, trial_index: int, channel_index: int,
                 rate: float, epsilon: float):
        super().__init__(message)
        self.trial_index = trial_index
        self.channel_index = channel_index
        self.rate = rate
        self.epsilon = epsilon


def _as_complex_vector(values, name: str) -> np.ndarray:
    """Copy values into a read-only 1-D complex128 array"""
    arr = np.array(values, dtype=np.complex128).reshape(-1) if np.ndim(values) else None
    if arr is None or arr.size < 1:
        raise ValueError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} entries must be finite")
    arr.setflags(write=False)
    return arr


def _pairs_to_complex(pairs, name: str) -> List[complex]:
    """Decode [[re, im], ...] into complex numbers"""
    if not isinstance(pairs, list) or not pairs:
        raise InstanceParseError(f"{name} must be a non-empty list of [re, im] pairs", name)
    values = []
    for i, pair in enumerate(pairs):
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
            raise InstanceParseError(f"{name}[{i}] must be a [re, im] pair of numbers", name)
        re, im = float(pair[0]), float(pair[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise InstanceParseError(f"{name}[{i}] must be finite", name)
        values.append(complex(re, im))
    return values


def _complex_to_pairs(values: Iterable[complex]) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in values]


@dataclass(frozen=True, eq=False)
class ChannelVector:
    """Estimated or true channel from the transmitter to one receiver"""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_complex_vector(self.entries, "ChannelVector"))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "ChannelVector":
        return cls(_pairs_to_complex(list(pairs), "entries"))

    def to_pairs(self) -> List[List[float]]:
        return _complex_to_pairs(self.entries)

    @property
    def n(self) -> int:
        return int(self.entries.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.entries, self.entries).real)

    def inner(self, w: "Beamformer") -> complex:
        """Return v^H w"""
        _check_dims(self.n, w.n)
        return complex(np.vdot(self.entries, w.w))

    def perturbed(self, delta: np.ndarray) -> "ChannelVector":
        """Return the true channel v_hat + delta"""
        return ChannelVector(self.entries + np.asarray(delta, dtype=np.complex128))

    def __eq__(self, other):
        if not isinstance(other, ChannelVector):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.entries, other.entries))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Beamformer:
    """Transmit weight vector; ||w||^2 is the radiated power"""

    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _as_complex_vector(self.w, "Beamformer"))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "Beamformer":
        return cls(_pairs_to_complex(list(pairs), "w"))

    def to_pairs(self) -> List[List[float]]:
        return _complex_to_pairs(self.w)

    @property
    def n(self) -> int:
        return int(self.w.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.w))

    @property
    def power(self) -> float:
        return float(np.vdot(self.w, self.w).real)

    def scaled(self, c: complex) -> "Beamformer":
        return Beamformer(self.w * c)

    def __eq__(self, other):
        if not isinstance(other, Beamformer):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.w, other.w))

    __hash__ = None


@dataclass(frozen=True)
class RobustInstance:
    """
    One datum of the worst-case robust problem

    Args:
        h_hat: Estimated channel to the information receiver
        g_hat: Estimated channel to the energy receiver
        power: Transmit power budget P (linear units)
        sigma2: Noise variance at the information receiver
        rate_target: Rate target r in bits per channel use
        epsilon: Radius of the channel-error ball
    """

    h_hat: ChannelVector
    g_hat: ChannelVector
    power: float
    sigma2: float
    rate_target: float
    epsilon: float

    def __post_init__(self):
        if self.h_hat.n != self.g_hat.n:
            raise DimensionMismatch(
                f"h_hat has {self.h_hat.n} entries but g_hat has {self.g_hat.n}", "g_hat")
        for name in ("power", "sigma2", "rate_target", "epsilon"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InstanceParseError(f"{name} must be finite", name)
            object.__setattr__(self, name, value)
        if self.power < 0:
            raise InstanceParseError("power must be >= 0", "power")
        if self.sigma2 <= 0:
            raise InstanceParseError("sigma2 must be > 0", "sigma2")
        if self.rate_target < 0:
            raise InstanceParseError("rate_target must be >= 0", "rate_target")
        if self.epsilon < 0:
            raise InstanceParseError("epsilon must be >= 0", "epsilon")

    @property
    def n(self) -> int:
        return self.h_hat.n

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the worst-case feasibility screen"""

    feasible: bool
    margin: float
    max_rate: float

    def to_dict(self) -> dict:
        return {"feasible": self.feasible, "margin": self.margin, "max_rate": self.max_rate}


def _check_dims(a: int, b: int):
    if a != b:
        raise DimensionMismatch(f"dimension mismatch: {a} != {b}")


def rate_threshold(rate_target: float, sigma2: float) -> float:
    """Minimum received signal power sigma2 * (2^r - 1) that supports rate r"""
    return sigma2 * math.expm1(rate_target * math.log(2.0))


def harvested_energy(g: ChannelVector, w: Beamformer) -> float:
    """Harvested RF power eta * |g^H w|^2"""
    return ETA * abs(g.inner(w)) ** 2


def achieved_rate(h: ChannelVector, w: Beamformer, sigma2: float) -> float:
    """Information rate log2(1 + |h^H w|^2 / sigma2)"""
    return math.log2(1.0 + abs(h.inner(w)) ** 2 / sigma2)


def feasibility_margin(instance: RobustInstance) -> float:
    """sqrt(P)*||h_hat|| - eps*sqrt(P) - sigma*sqrt(2^r - 1)"""
    sqrt_p = math.sqrt(instance.power)
    required = math.sqrt(rate_threshold(instance.rate_target, instance.sigma2))
    return sqrt_p * instance.h_hat.norm - instance.epsilon * sqrt_p - required


def max_feasible_rate(instance: RobustInstance) -> float:
    """Largest rate target that keeps the instance feasible"""
    sqrt_p = math.sqrt(instance.power)
    amplitude = max(sqrt_p * instance.h_hat.norm - instance.epsilon * sqrt_p, 0.0)
    return math.log2(1.0 + amplitude ** 2 / instance.sigma2)


def check_feasibility(instance: RobustInstance) -> FeasibilityReport:
    """
    Screen an instance for worst-case feasibility

    Full-power matched filtering to h_hat maximizes |h_hat^H w|, so the
    instance is feasible iff that beamformer clears the robust threshold.
    """
    margin = feasibility_margin(instance)
    logger.debug("feasibility margin %.6g at r=%g, eps=%g", margin,
                 instance.rate_target, instance.epsilon)
    return FeasibilityReport(
        feasible=margin >= -FEASIBILITY_TOL,
        margin=margin,
        max_rate=max_feasible_rate(instance),
    )


def canonical_phase(w: Beamformer, g: ChannelVector) -> Beamformer:
    """Rotate w so that g^H w is real and non-negative"""
    inner = g.inner(w)
    if abs(inner) == 0.0:
        return w
    return Beamformer(w.w * (abs(inner) / inner))


def with_epsilon(instance: RobustInstance, epsilon: float) -> RobustInstance:
    return replace(instance, epsilon=epsilon)


def with_rate(instance: RobustInstance, rate_target: float) -> RobustInstance:
    return replace(instance, rate_target=rate_target)


def _load_json(text: Union[bytes, str]) -> dict:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise InstanceParseError(f"document is not UTF-8: {e}", "json") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"malformed JSON: {e}", "json") from e
    if not isinstance(doc, dict):
        raise InstanceParseError("top-level JSON value must be an object", "json")
    return doc


def _number(doc: dict, name: str) -> float:
    if name not in doc:
        raise InstanceParseError(f"missing field '{name}'", name)
    value = doc[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceParseError(f"field '{name}' must be a number", name)
    return float(value)


def instance_from_dict(doc: dict) -> RobustInstance:
    """Build an instance from its JSON object form, validating every field"""
    h_values = _pairs_to_complex(doc.get("h_hat"), "h_hat")
    g_values = _pairs_to_complex(doc.get("g_hat"), "g_hat")
    if len(h_values) != len(g_values):
        raise DimensionMismatch(
            f"h_hat has {len(h_values)} entries but g_hat has {len(g_values)}", "g_hat")
    if "n" in doc:
        n = doc["n"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise InstanceParseError("field 'n' must be an integer", "n")
        if n != len(h_values):
            raise DimensionMismatch(f"n = {n} but channels have {len(h_values)} entries", "n")

    values = {name: _number(doc, name) for name in ("power", "sigma2", "rate_target", "epsilon")}
    return RobustInstance(
        h_hat=ChannelVector(h_values),
        g_hat=ChannelVector(g_values),
        **values,
    )


def instance_to_dict(instance: RobustInstance) -> dict:
    return {
        "n": instance.n,
        "h_hat": instance.h_hat.to_pairs(),
        "g_hat": instance.g_hat.to_pairs(),
        "power": instance.power,
        "sigma2": instance.sigma2,
        "rate_target": instance.rate_target,
        "epsilon": instance.epsilon,
    }


def parse_instance(text: Union[bytes, str]) -> RobustInstance:
    """Parse an instance JSON document"""
    return instance_from_dict(_load_json(text))


def serialize_instance(instance: RobustInstance) -> bytes:
    """Serialize an instance; parse_instance inverts this exactly"""
    return json.dumps(instance_to_dict(instance)).encode("utf-8")


def parse_beamformer(text: Union[bytes, str]) -> Beamformer:
    """
    Parse a beamformer document

    Accepts either {"n": N, "w": [[re, im], ...]} or a full solution
    document, from which only the "w" field is read.
    """
    doc = _load_json(text)
    values = _pairs_to_complex(doc.get("w"), "w")
    if "n" in doc and doc["n"] != len(values):
        raise DimensionMismatch(f"n = {doc['n']} but w has {len(values)} entries", "n")
    return Beamformer(values)


def serialize_beamformer(w: Beamformer) -> bytes:
    return json.dumps({"n": w.n, "w": w.to_pairs()}).encode("utf-8")


def complex_pairs(values: Iterable[complex]) -> List[List[float]]:
    """[re, im] encoding shared by every JSON artifact"""
    return _complex_to_pairs(values)
