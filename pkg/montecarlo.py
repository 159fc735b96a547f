"""
Monte Carlo Campaigns for Robust Beamforming Toolkit
Random normalized Rayleigh channels, uncertainty sampling, robust versus
nonrobust comparison and the aggregate energy/outage tables
"""

import csv
import io
import logging
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import spearmanr

from model import (BeamformingError, ChannelVector, ConfigError, RobustInstance,
                   TrialError, check_feasibility)
from solver import solve_dual_sdp, solve_nonrobust
from worstcase import SAMPLING_MODES, draw_errors, evaluate_errors

logger = logging.getLogger(__name__)

CSV_HEADER = ("r", "epsilon", "n_feasible", "avg_guaranteed_energy",
              "avg_empirical_min_energy", "avg_nominal_energy",
              "robust_outage_pct", "nonrobust_outage_pct")

DEFAULT_EPSILONS = (0.0, 0.1, 0.3, 0.5)
DEFAULT_RATE_POINTS = 12
DEFAULT_RATE_FRACTION = 0.95

# spawn-key namespaces of the counter-based stream scheme
_CHANNEL_STREAM = 0
_TRIAL_STREAM = 1


def rate_ceiling(power: float, channel_norm: float, sigma2: float) -> float:
    """Nominal feasibility limit log2(1 + P*||h||^2/sigma2) of the rate target"""
    return math.log2(1.0 + power * channel_norm / sigma2)


@dataclass(frozen=True)
class SimConfig:
    """
    Campaign configuration; the defaults reproduce the published protocol

    channel_norm defaults to n_antennas and rate_grid to default_rate_grid().
    """

    n_antennas: int = 4
    power: float = 10.0
    sigma2: float = 1.0
    epsilons: Tuple[float, ...] = DEFAULT_EPSILONS
    rate_grid: Optional[Tuple[float, ...]] = None
    n_channels: int = 100
    n_error_samples: int = 100
    seed: Optional[int] = None
    channel_norm: Optional[float] = None
    sampling_mode: str = "interior"
    workers: int = 1

    def __post_init__(self):
        self._validate_scalars()
        if self.channel_norm is None:
            object.__setattr__(self, "channel_norm", float(self.n_antennas))
        for name in ("epsilons", "rate_grid"):
            values = getattr(self, name)
            if values is None:
                continue
            try:
                object.__setattr__(self, name, tuple(float(v) for v in values))
            except (TypeError, ValueError) as e:
                raise ConfigError(f"{name} must be a list of numbers", name) from e
        if self.rate_grid is None:
            object.__setattr__(self, "rate_grid", tuple(default_rate_grid(self)))
        self.validate()

    def _validate_scalars(self):
        for name in ("n_antennas", "n_channels", "n_error_samples", "workers"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer", name)
        for name in ("power", "sigma2", "channel_norm"):
            value = getattr(self, name)
            if name == "channel_norm" and value is None:
                continue
            if (isinstance(value, bool) or not isinstance(value, (int, float))
                    or not math.isfinite(value) or value <= 0):
                raise ConfigError(f"{name} must be a positive number", name)
        if self.sampling_mode not in SAMPLING_MODES:
            raise ConfigError(f"sampling_mode must be one of {SAMPLING_MODES}", "sampling_mode")
        if self.seed is not None and (isinstance(self.seed, bool) or not isinstance(self.seed, int)
                                      or not 0 <= self.seed < 2 ** 64):
            raise ConfigError("seed must be an integer in [0, 2^64)", "seed")

    def validate(self):
        """Raise ConfigError naming the first invalid field"""
        self._validate_scalars()
        if not self.epsilons:
            raise ConfigError("epsilons must not be empty", "epsilons")
        if any(not math.isfinite(e) or e < 0 for e in self.epsilons):
            raise ConfigError("epsilons must be finite and >= 0", "epsilons")
        if not self.rate_grid:
            raise ConfigError("rate_grid must not be empty", "rate_grid")
        ceiling = rate_ceiling(self.power, self.channel_norm, self.sigma2)
        for r in self.rate_grid:
            if not (0.0 <= r < ceiling):
                raise ConfigError(
                    f"rate_grid value {r!r} outside the feasible range [0, {ceiling!r})",
                    "rate_grid")


def default_rate_grid(config: SimConfig) -> List[float]:
    """Evenly spaced rate targets inside the nominal feasible region"""
    channel_norm = config.channel_norm if config.channel_norm is not None else config.n_antennas
    top = DEFAULT_RATE_FRACTION * rate_ceiling(config.power, channel_norm, config.sigma2)
    return [float(r) for r in np.linspace(0.0, top, DEFAULT_RATE_POINTS)]


def config_from_dict(doc: dict, seed: Optional[int] = None) -> SimConfig:
    """
    Build a SimConfig from a TOML table

    Args:
        doc: Mapping of SimConfig field names to values
        seed: Overrides doc['seed'] when given

    Returns:
        Validated SimConfig
    """
    known = set(SimConfig.__dataclass_fields__)
    for key in doc:
        if key not in known:
            raise ConfigError(f"unknown configuration key '{key}'", key)
    values = dict(doc)
    for key in ("epsilons", "rate_grid"):
        if key in values:
            if not isinstance(values[key], list):
                raise ConfigError(f"{key} must be a list of numbers", key)
            values[key] = tuple(values[key])
    if seed is not None:
        values["seed"] = seed
    try:
        return SimConfig(**values)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def load_config(path: Union[str, Path], seed: Optional[int] = None) -> SimConfig:
    """Read a campaign TOML file"""
    try:
        with open(path, "rb") as f:
            doc = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"malformed TOML in {path}: {e}", "toml") from e
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}", "config") from e
    return config_from_dict(doc.get("campaign", doc), seed)


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent random stream for a spawn key under one root seed"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def gen_rayleigh_channel(n: int, norm2: float, rng: np.random.Generator) -> ChannelVector:
    """Circularly symmetric Gaussian channel rescaled so ||h||^2 = norm2"""
    if n < 1:
        raise ValueError("n must be >= 1")
    if norm2 <= 0:
        raise ValueError("norm2 must be > 0")
    entries = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    return ChannelVector(entries * math.sqrt(norm2) / np.linalg.norm(entries))


def gen_channel_pair(config: SimConfig, channel_index: int) -> Tuple[ChannelVector, ChannelVector]:
    """(h_hat, g_hat) for one channel realization, shared by every grid cell"""
    rng = stream(config.seed, _CHANNEL_STREAM, channel_index)
    h_hat = gen_rayleigh_channel(config.n_antennas, config.channel_norm, rng)
    g_hat = gen_rayleigh_channel(config.n_antennas, config.channel_norm, rng)
    return h_hat, g_hat


@dataclass(frozen=True)
class TrialResult:
    """One (channel pair, r, epsilon) trial; outages are fractions of the random draws"""

    trial_index: int
    channel_index: int
    rate: float
    epsilon: float
    feasible: bool
    guaranteed_energy: float = float("nan")
    empirical_min_energy: float = float("nan")
    nominal_energy: float = float("nan")
    robust_min_rate: float = float("nan")
    nonrobust_min_rate: float = float("nan")
    robust_outage: float = 0.0
    nonrobust_outage: float = 0.0
    error: Optional[str] = None


def run_trial(config: SimConfig, r: float, epsilon: float,
              channel_pair: Tuple[ChannelVector, ChannelVector], rng: np.random.Generator,
              trial_index: int = 0, channel_index: int = 0) -> TrialResult:
    """
    Solve one trial both ways and attack both designs with the same draws

    Raises:
        TrialError: A solver failed; carries the trial coordinates
    """
    h_hat, g_hat = channel_pair
    instance = RobustInstance(h_hat, g_hat, config.power, config.sigma2, r, epsilon)
    if not check_feasibility(instance).feasible:
        logger.debug("trial %d infeasible at r=%g, eps=%g", trial_index, r, epsilon)
        return TrialResult(trial_index, channel_index, r, epsilon, feasible=False)

    try:
        robust = solve_dual_sdp(instance)
        nonrobust = solve_nonrobust(instance)
    except BeamformingError as e:
        raise TrialError(f"trial {trial_index} (channel {channel_index}, r={r:g}, "
                         f"eps={epsilon:g}): {e}", trial_index, channel_index, r, epsilon) from e

    dh = draw_errors(epsilon, config.n_antennas, config.n_error_samples, config.sampling_mode, rng)
    dg = draw_errors(epsilon, config.n_antennas, config.n_error_samples, config.sampling_mode, rng)
    robust_report = evaluate_errors(instance, robust.w, dh, dg, config.sampling_mode)
    nonrobust_report = evaluate_errors(instance, nonrobust.w, dh, dg, config.sampling_mode)

    return TrialResult(
        trial_index=trial_index,
        channel_index=channel_index,
        rate=r,
        epsilon=epsilon,
        feasible=True,
        guaranteed_energy=robust.guaranteed_energy,
        empirical_min_energy=robust_report.min_energy,
        nominal_energy=robust.nominal_energy,
        robust_min_rate=robust_report.min_rate,
        nonrobust_min_rate=nonrobust_report.min_rate,
        robust_outage=robust_report.outage_fraction,
        nonrobust_outage=nonrobust_report.outage_fraction,
    )


@dataclass(frozen=True)
class SimRow:
    """Aggregate of one (r, epsilon) grid cell over feasible trials"""

    r: float
    epsilon: float
    n_feasible: int
    avg_guaranteed_energy: float
    avg_empirical_min_energy: float
    avg_nominal_energy: float
    robust_outage_pct: float
    nonrobust_outage_pct: float


@dataclass
class SimReport:
    """Campaign table plus the configuration and collected trial errors"""

    rows: List[SimRow]
    config: SimConfig
    kind: str = "campaign"
    errors: List[str] = field(default_factory=list)

    def row(self, r: float, epsilon: float) -> SimRow:
        for row in self.rows:
            if row.r == r and row.epsilon == epsilon:
                return row
        raise KeyError((r, epsilon))

    def column(self, epsilon: float, name: str) -> List[float]:
        """Values of one column for a fixed epsilon, in rate-grid order"""
        return [getattr(row, name) for row in self.rows if row.epsilon == epsilon]


def _run_task(config: SimConfig, channels, cells, cell_index: int,
              channel_index: int) -> TrialResult:
    r, epsilon = cells[cell_index]
    trial_index = cell_index * config.n_channels + channel_index
    rng = stream(config.seed, _TRIAL_STREAM, channel_index, cell_index)
    try:
        return run_trial(config, r, epsilon, channels[channel_index], rng,
                         trial_index=trial_index, channel_index=channel_index)
    except TrialError as e:
        logger.warning("%s", e)
        return TrialResult(trial_index, channel_index, r, epsilon, feasible=False, error=str(e))


def _mean(values: Sequence[float]) -> float:
    return float(np.mean(values)) if values else float("nan")


def _aggregate(r: float, epsilon: float, trials: Sequence[TrialResult]) -> SimRow:
    ok = [t for t in trials if t.feasible]
    return SimRow(
        r=r,
        epsilon=epsilon,
        n_feasible=len(ok),
        avg_guaranteed_energy=_mean([t.guaranteed_energy for t in ok]),
        avg_empirical_min_energy=_mean([t.empirical_min_energy for t in ok]),
        avg_nominal_energy=_mean([t.nominal_energy for t in ok]),
        robust_outage_pct=100.0 * _mean([t.robust_outage for t in ok]) if ok else 0.0,
        nonrobust_outage_pct=100.0 * _mean([t.nonrobust_outage for t in ok]) if ok else 0.0,
    )


def run_campaign(config: SimConfig, kind: str = "campaign") -> SimReport:
    """
    Run every (r, epsilon) cell over the same channel realizations

    Trials are mapped in parallel over config.workers threads; each trial
    owns a stream keyed on (channel index, cell index) and aggregation runs
    in trial order, so the report does not depend on the schedule.
    """
    if config.seed is None:
        raise ConfigError("a seed is required for reproducible campaigns", "seed")
    cells = [(r, e) for r in config.rate_grid for e in config.epsilons]
    channels = [gen_channel_pair(config, i) for i in range(config.n_channels)]
    tasks = [(c, i) for c in range(len(cells)) for i in range(config.n_channels)]

    def task(coords):
        return _run_task(config, channels, cells, *coords)

    logger.info("campaign: %d cells x %d channels, %d error samples, %d worker(s)",
                len(cells), config.n_channels, config.n_error_samples, config.workers)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(task, tasks))
    else:
        results = [task(t) for t in tasks]

    rows = []
    errors = []
    for c, (r, epsilon) in enumerate(cells):
        trials = results[c * config.n_channels:(c + 1) * config.n_channels]
        errors.extend(t.error for t in trials if t.error)
        rows.append(_aggregate(r, epsilon, trials))
    logger.info("campaign finished with %d trial error(s)", len(errors))
    return SimReport(rows=rows, config=config, kind=kind, errors=errors)


def fig2_sweep(config: SimConfig) -> SimReport:
    """Average harvested energy over the (r x epsilon) grid"""
    return run_campaign(config, kind="fig2")


def fig3_sweep(config: SimConfig) -> SimReport:
    """Outage table of the nonrobust design; epsilon = 0 cells are dropped when others exist"""
    epsilons = tuple(e for e in config.epsilons if e > 0.0) or config.epsilons
    return run_campaign(replace(config, epsilons=epsilons), kind="fig3")


def performance_gap(report: SimReport) -> Dict[Tuple[float, float], float]:
    """Loss of guaranteed energy against the perfect-CSI (epsilon = 0) row of each rate"""
    gaps = {}
    for row in report.rows:
        if row.epsilon == 0.0:
            continue
        try:
            baseline = report.row(row.r, 0.0)
        except KeyError:
            continue
        gaps[(row.r, row.epsilon)] = baseline.avg_guaranteed_energy - row.avg_guaranteed_energy
    return gaps


def outage_trend(report: SimReport, epsilon: float) -> float:
    """
    Spearman correlation between rate target and nonrobust outage for one epsilon

    Cells without a feasible trial carry no outage information and are skipped.
    """
    rows = [row for row in report.rows if row.epsilon == epsilon and row.n_feasible > 0]
    rates = [row.r for row in rows]
    outages = [row.nonrobust_outage_pct for row in rows]
    if len(rows) < 2 or len(set(outages)) < 2:
        return float("nan")
    rho, _ = spearmanr(rates, outages)
    return float(rho)


def _fmt(value: float) -> str:
    return format(value, ".17g")


def report_to_csv(report: SimReport) -> str:
    """CSV with the fixed header; floats carry 17 significant digits"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        writer.writerow([
            _fmt(row.r), _fmt(row.epsilon), row.n_feasible,
            _fmt(row.avg_guaranteed_energy), _fmt(row.avg_empirical_min_energy),
            _fmt(row.avg_nominal_energy), _fmt(row.robust_outage_pct),
            _fmt(row.nonrobust_outage_pct),
        ])
    return buffer.getvalue()


def report_from_csv(text: str, config: Optional[SimConfig] = None) -> SimReport:
    """Read back a campaign CSV"""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = [SimRow(
        r=float(d["r"]),
        epsilon=float(d["epsilon"]),
        n_feasible=int(d["n_feasible"]),
        avg_guaranteed_energy=float(d["avg_guaranteed_energy"]),
        avg_empirical_min_energy=float(d["avg_empirical_min_energy"]),
        avg_nominal_energy=float(d["avg_nominal_energy"]),
        robust_outage_pct=float(d["robust_outage_pct"]),
        nonrobust_outage_pct=float(d["nonrobust_outage_pct"]),
    ) for d in reader]
    return SimReport(rows=rows, config=config or SimConfig(seed=0))


def report_metadata(report: SimReport, version: str) -> dict:
    """Sidecar record: configuration, seed, version and sampling mode"""
    config = asdict(report.config)
    config["epsilons"] = list(config["epsilons"])
    config["rate_grid"] = list(config["rate_grid"])
    return {
        "kind": report.kind,
        "version": version,
        "seed": report.config.seed,
        "sampling_mode": report.config.sampling_mode,
        "worst_vectors_injected": True,
        "config": config,
        "n_errors": len(report.errors),
        "errors": list(report.errors),
    }
