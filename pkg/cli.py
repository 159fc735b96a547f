"""
Command Line Interface for Robust Beamforming Toolkit
solve, verify and simulate with machine-readable output and stable exit codes
"""

import argparse
import csv
import io
import json
import logging
import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from model import (BeamformingError, ConfigError, DimensionMismatch, InfeasibleInstance,
                   InstanceParseError, ToleranceNotReached, ZeroBeamformer, parse_beamformer,
                   parse_instance)
from montecarlo import (SimConfig, config_from_dict, fig2_sweep, fig3_sweep, load_config,
                        report_metadata, report_to_csv, run_campaign)
from solver import solution_to_json, solve_closed_form, solve_dual_sdp
from worstcase import SAMPLING_MODES, adversarial_check

logger = logging.getLogger(__name__)

VERSION = "1.0.0"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_TOLERANCE = 4
EXIT_OUTAGE = 5

SOLUTION_CSV_HEADER = ("guaranteed_energy", "nominal_energy", "lambda", "mu", "gap")

# relative dual/closed-form disagreement above this fails with EXIT_TOLERANCE
CROSS_CHECK_TOL = 1e-6

SWEEPS = {
    "campaign": run_campaign,
    "fig2": fig2_sweep,
    "fig3": fig3_sweep,
}


@dataclass(frozen=True)
class CliConfig:
    """Parsed command line"""

    command: str
    input_path: Optional[Path] = None
    config_path: Optional[Path] = None
    overrides: Dict[str, object] = field(default_factory=dict)
    out_path: Optional[Path] = None
    seed: Optional[int] = None
    format: str = "json"
    beamformer_path: Optional[Path] = None
    n_samples: int = 1000
    mode: str = "mixed"
    sweep: str = "campaign"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        def path(value):
            return Path(value) if value else None

        overrides = {}
        for name in ("n_channels", "n_error_samples", "workers", "sampling_mode"):
            value = getattr(args, name, None)
            if value is not None:
                overrides[name] = value
        return cls(
            command=args.command,
            input_path=path(getattr(args, "input", None)),
            config_path=path(getattr(args, "config", None)),
            overrides=overrides,
            out_path=path(getattr(args, "output", None)),
            seed=getattr(args, "seed", None),
            format=getattr(args, "format", "json"),
            beamformer_path=path(getattr(args, "beamformer", None)),
            n_samples=getattr(args, "n_samples", 1000),
            mode=getattr(args, "mode", "mixed"),
            sweep=getattr(args, "sweep", "campaign"),
        )


def git_version() -> str:
    """git describe of the working tree, or VERSION outside a checkout"""
    try:
        result = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True, text=True, timeout=5, check=True,
        )
    except (OSError, subprocess.SubprocessError):
        return VERSION
    return result.stdout.strip() or VERSION


def _emit_error(kind: str, message: str, **extra):
    doc = {"error": kind, "message": message}
    doc.update(extra)
    print(json.dumps(doc), file=sys.stderr)


def _write_output(data: bytes, out_path: Optional[Path]):
    if out_path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        out_path.write_bytes(data)
        logger.info("wrote %s", out_path)


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as e:
        raise InstanceParseError(f"cannot read {path}: {e.strerror}", "path") from e


def solution_csv(solution) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SOLUTION_CSV_HEADER)
    writer.writerow([format(v, ".17g") for v in (
        solution.guaranteed_energy, solution.nominal_energy, solution.lam, solution.mu,
        solution.duality_gap)])
    return buffer.getvalue().encode()


def cmd_solve(config: CliConfig) -> int:
    """Solve by the dual path and cross-check against the closed form"""
    instance = parse_instance(_read(config.input_path))
    solution = solve_dual_sdp(instance)
    reference = solve_closed_form(instance)
    delta = abs(solution.guaranteed_energy - reference.guaranteed_energy)
    relative = delta / max(abs(reference.guaranteed_energy), 1.0)
    logger.info("solved on path %s, cross-check delta %.3g", solution.path, delta)
    if config.format == "csv":
        _write_output(solution_csv(solution), config.out_path)
    else:
        cross_check = {
            "closed_form_guaranteed_energy": reference.guaranteed_energy,
            "delta": delta,
            "relative_delta": relative,
        }
        _write_output(solution_to_json(solution, cross_check=cross_check) + b"\n",
                      config.out_path)
    if relative > CROSS_CHECK_TOL:
        raise ToleranceNotReached(
            f"dual and closed-form energies disagree by {relative:.3g} (relative)",
            residual=relative)
    return EXIT_OK


def cmd_verify(config: CliConfig) -> int:
    """Attack a supplied beamformer; exit 5 on outage or a violated energy bound"""
    if config.beamformer_path is None:
        raise InstanceParseError("verify needs a beamformer file (-w)", "w")
    instance = parse_instance(_read(config.input_path))
    w = parse_beamformer(_read(config.beamformer_path))
    seed = 0 if config.seed is None else config.seed
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    report = adversarial_check(instance, w, config.n_samples, rng, config.mode)
    doc = report.to_dict()
    doc["seed"] = seed
    _write_output(json.dumps(doc, indent=2).encode() + b"\n", config.out_path)
    if report.rate_outage or report.energy_bound_violated:
        logger.warning("verification failed: rate_outage=%s energy_bound_violated=%s",
                       report.rate_outage, report.energy_bound_violated)
        return EXIT_OUTAGE
    return EXIT_OK


def _campaign_config(config: CliConfig) -> SimConfig:
    if config.config_path is not None:
        sim = load_config(config.config_path, seed=config.seed)
        if not config.overrides:
            return sim
        doc = {name: getattr(sim, name) for name in SimConfig.__dataclass_fields__}
    else:
        doc = {"seed": config.seed}
    doc.update(config.overrides)
    for key in ("epsilons", "rate_grid"):
        if isinstance(doc.get(key), tuple):
            doc[key] = list(doc[key])
    return config_from_dict(doc, seed=config.seed)


def cmd_simulate(config: CliConfig) -> int:
    """Run a campaign, write its CSV and the sidecar metadata JSON"""
    sim = _campaign_config(config)
    if sim.seed is None:
        raise ConfigError("simulate needs a seed (config 'seed' or --seed)", "seed")
    report = SWEEPS[config.sweep](sim)
    _write_output(report_to_csv(report).encode(), config.out_path)
    if config.out_path is not None:
        sidecar = config.out_path.with_suffix(".json")
        metadata = report_metadata(report, git_version())
        sidecar.write_text(json.dumps(metadata, indent=2) + "\n")
        logger.info("wrote %s", sidecar)
    if report.errors:
        logger.warning("%d trial(s) failed; see the sidecar metadata", len(report.errors))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamform",
        description="Worst-case robust beamforming for simultaneous information and power transfer",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for solver traces (stderr)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one instance")
    p_solve.add_argument("-i", "--input", required=True, help="instance JSON")
    p_solve.add_argument("-o", "--output", help="solution file (default stdout)")
    p_solve.add_argument("--format", choices=("json", "csv"), default="json")

    p_verify = sub.add_parser("verify", help="attack a beamformer with sampled channel errors")
    p_verify.add_argument("-i", "--input", required=True, help="instance JSON")
    p_verify.add_argument("-w", "--beamformer", required=True,
                          help="beamformer or solution JSON")
    p_verify.add_argument("-n", "--n-samples", type=int, default=1000)
    p_verify.add_argument("--seed", type=int)
    p_verify.add_argument("--mode", choices=SAMPLING_MODES, default="mixed")
    p_verify.add_argument("-o", "--output", help="report file (default stdout)")

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo campaign")
    p_sim.add_argument("-c", "--config", help="campaign TOML (default: published protocol)")
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("-o", "--output", help="report CSV (default stdout)")
    p_sim.add_argument("--sweep", choices=tuple(SWEEPS), default="campaign")
    p_sim.add_argument("--n-channels", type=int)
    p_sim.add_argument("--n-error-samples", type=int)
    p_sim.add_argument("--workers", type=int)
    p_sim.add_argument("--sampling-mode", choices=SAMPLING_MODES)
    return parser


def configure_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and map failures onto the exit-code contract"""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    config = CliConfig.from_args(args)
    try:
        return COMMANDS[config.command](config)
    except InfeasibleInstance as e:
        _emit_error("infeasible", str(e), margin=e.margin)
        return EXIT_INFEASIBLE
    except ToleranceNotReached as e:
        _emit_error("tolerance", str(e), residual=e.residual)
        return EXIT_TOLERANCE
    except ConfigError as e:
        _emit_error("config", str(e), field=e.field)
        return EXIT_INPUT
    except DimensionMismatch as e:
        _emit_error("dimension", str(e), field=e.field)
        return EXIT_INPUT
    except InstanceParseError as e:
        _emit_error("parse", str(e), field=e.field)
        return EXIT_INPUT
    except (ZeroBeamformer, ValueError) as e:
        _emit_error("parse", str(e))
        return EXIT_INPUT
    except BeamformingError as e:
        _emit_error("solver", str(e))
        return EXIT_TOLERANCE
    except OSError as e:
        _emit_error("io", f"cannot access {e.filename}: {e.strerror}",
                    field="output", path=str(e.filename))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
