"""
Robust Beamforming Solver for Robust Beamforming Toolkit
Solves the worst-case energy maximization by three independent routes:
the reduced Lagrangian dual of the semidefinite relaxation, a closed-form
reduction to the plane spanned by the two channels, and a brute-force grid
"""

import json
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from model import (Beamformer, ChannelVector, DegenerateRecovery, InfeasibleInstance,
                   RobustInstance, ToleranceNotReached, canonical_phase, check_feasibility,
                   complex_pairs, rate_threshold, with_epsilon, with_rate)

logger = logging.getLogger(__name__)

PATHS = ("dual_sdp", "closed_form", "grid")

KKT_TOL = 1e-7
GOLDEN_TOL = 1e-12
DEGENERATE_TOL = 1e-10
MAX_DOUBLINGS = 200
DEFAULT_GRID_RESOLUTION = 10_000

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQUARE = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class KktReport:
    """Optimality residuals of a candidate against the relaxed problem"""

    primal_feas: float
    dual_feas: float
    comp_slack_rate: float
    comp_slack_power: float
    stationarity: float

    def max_residual(self) -> float:
        return max(self.primal_feas, self.dual_feas, self.comp_slack_rate,
                   self.comp_slack_power, self.stationarity)

    def to_dict(self) -> dict:
        return {
            "primal_feas": self.primal_feas,
            "dual_feas": self.dual_feas,
            "comp_slack_rate": self.comp_slack_rate,
            "comp_slack_power": self.comp_slack_power,
            "stationarity": self.stationarity,
        }


@dataclass(frozen=True)
class BeamformerSolution:
    """
    Optimal robust beamformer with its certificate

    Args:
        w: Beamformer at full power, phase fixed so g_hat^H w >= 0
        guaranteed_energy: max(|g_hat^H w| - eps*sqrt(P), 0)^2
        nominal_energy: |g_hat^H w|^2
        lam: Multiplier of the rate constraint
        mu: Multiplier of the power constraint
        duality_gap: |dual value - primal value| relative to the primal value
        kkt_residuals: KktReport of (w, lam, mu)
        path: 'dual_sdp', 'closed_form' or 'grid'
    """

    w: Beamformer
    guaranteed_energy: float
    nominal_energy: float
    lam: float
    mu: float
    duality_gap: float
    kkt_residuals: KktReport
    path: str

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "n": self.w.n,
            "w": complex_pairs(self.w.w),
            "guaranteed_energy": self.guaranteed_energy,
            "nominal_energy": self.nominal_energy,
            "lambda": self.lam,
            "mu": self.mu,
            "duality_gap": self.duality_gap,
            "kkt_residuals": self.kkt_residuals.to_dict(),
        }


def beta(instance: RobustInstance) -> float:
    """Robust received-power threshold (eps*sqrt(P) + sigma*sqrt(2^r - 1))^2"""
    amplitude = (instance.epsilon * math.sqrt(instance.power)
                 + math.sqrt(rate_threshold(instance.rate_target, instance.sigma2)))
    return amplitude ** 2


def _plane(first: np.ndarray, second: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Orthonormal basis of span{first, second}; u2 is None when they are collinear"""
    u1 = first / np.linalg.norm(first)
    residual = second - u1 * np.vdot(u1, second)
    residual_norm = np.linalg.norm(residual)
    if residual_norm <= 1e-13 * max(np.linalg.norm(second), 1e-300):
        return u1, None
    return u1, residual / residual_norm


def _principal_pair(g_hat: ChannelVector, h_hat: ChannelVector,
                    lam: float) -> Tuple[float, np.ndarray]:
    """
    Largest eigenvalue of G + lam*H and its unit eigenvector

    G + lam*H has rank at most two, so it is projected onto span{g, h} and
    the 2x2 Hermitian eigenproblem is solved in closed form.
    """
    g, h = g_hat.entries, h_hat.entries
    g_norm, h_norm = np.linalg.norm(g), np.linalg.norm(h)
    if g_norm == 0.0 and h_norm == 0.0:
        raise ValueError("both channels are zero")
    u1, u2 = _plane(g, h) if g_norm > 0.0 else _plane(h, g)

    gc = np.array([np.vdot(u1, g), np.vdot(u2, g) if u2 is not None else 0.0])
    hc = np.array([np.vdot(u1, h), np.vdot(u2, h) if u2 is not None else 0.0])
    a = abs(gc[0]) ** 2 + lam * abs(hc[0]) ** 2
    c = abs(gc[1]) ** 2 + lam * abs(hc[1]) ** 2
    b = gc[0] * np.conj(gc[1]) + lam * hc[0] * np.conj(hc[1])

    if u2 is None:
        return float(a), u1

    top = 0.5 * (a + c) + math.hypot(0.5 * (a - c), abs(b))
    if abs(b) == 0.0:
        x = np.array([1.0, 0.0]) if a >= c else np.array([0.0, 1.0])
    else:
        x1 = np.array([b, top - a])
        x2 = np.array([top - c, np.conj(b)])
        x = x1 if np.linalg.norm(x1) >= np.linalg.norm(x2) else x2
        x = x / np.linalg.norm(x)
    return float(top), x[0] * u1 + x[1] * u2


def lambda_max_2d(g_hat: ChannelVector, h_hat: ChannelVector, lam: float) -> float:
    """Largest eigenvalue of g g^H + lam h h^H, exact via the 2-D subspace"""
    return _principal_pair(g_hat, h_hat, lam)[0]


def reduced_dual(instance: RobustInstance, lam: float) -> float:
    """f(lam) = P*lambda_max(G + lam*H) - lam*beta; convex in lam"""
    return instance.power * lambda_max_2d(instance.g_hat, instance.h_hat, lam) - lam * beta(instance)


def dual_slope(instance: RobustInstance, lam: float) -> float:
    """Danskin slope P*|h^H v(lam)|^2 - beta of the reduced dual"""
    _, v = _principal_pair(instance.g_hat, instance.h_hat, lam)
    return instance.power * abs(np.vdot(instance.h_hat.entries, v)) ** 2 - beta(instance)


def golden_section(f: Callable[[float], float], a: float, b: float,
                   rel_tol: float = GOLDEN_TOL) -> Tuple[float, float]:
    """
    Golden-section search for the minimum of a unimodal f on [a, b]

    Returns the final bracket, narrower than rel_tol * (1 + midpoint).
    """
    h = b - a
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)
    while b - a >= rel_tol * (1.0 + 0.5 * (a + b)):
        if yc < yd:
            b, d, yd = d, c, yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)
        if h <= 0.0:
            break
    return a, b


def _bracket_dual(instance: RobustInstance) -> float:
    """Double lambda from 1 until the forward difference of f turns positive"""
    f = lambda lam: reduced_dual(instance, lam)
    hi = 1.0
    for _ in range(MAX_DOUBLINGS):
        step = 1e-6 * (1.0 + hi)
        if f(hi + step) - f(hi) > 0.0:
            return hi + step
        hi *= 2.0
    raise ToleranceNotReached(f"reduced dual not bracketed below lambda = {hi:g}")


def _polish_dual(instance: RobustInstance, lo: float, hi: float) -> float:
    """Root of the dual slope near the golden-section bracket"""
    slope = lambda lam: dual_slope(instance, lam)
    step = max(hi - lo, 1e-9 * (1.0 + hi))
    for _ in range(MAX_DOUBLINGS):
        if slope(lo) <= 0.0 or lo == 0.0:
            break
        lo = max(0.0, lo - step)
        step *= 2.0
    step = max(hi - lo, 1e-9 * (1.0 + hi))
    for _ in range(MAX_DOUBLINGS):
        if slope(hi) >= 0.0:
            break
        hi += step
        step *= 2.0
    s_lo, s_hi = slope(lo), slope(hi)
    if s_lo >= 0.0:
        return lo
    if s_hi == 0.0:
        return hi
    if s_hi < 0.0:
        raise ToleranceNotReached("dual slope did not change sign", residual=abs(s_hi))
    return brentq(slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def _guaranteed_energy(instance: RobustInstance, w: Beamformer) -> float:
    amplitude = abs(instance.g_hat.inner(w)) - instance.epsilon * math.sqrt(instance.power)
    return max(amplitude, 0.0) ** 2


def verify_kkt(instance: RobustInstance, solution: BeamformerSolution) -> KktReport:
    """
    Residuals of the Lagrangian optimality conditions of the relaxation

    W = w w^H, G = g g^H and H = h h^H; dual feasibility compares mu with
    lambda_max(G + lam*H).
    """
    w = solution.w.w
    g, h = instance.g_hat.entries, instance.h_hat.entries
    lam, mu = solution.lam, solution.mu
    b = beta(instance)
    g_w, h_w = np.vdot(g, w), np.vdot(h, w)
    tr_h = abs(h_w) ** 2
    tr_w = float(np.vdot(w, w).real)

    primal = max(0.0, b - tr_h) + max(0.0, tr_w - instance.power)
    dual = (max(0.0, lambda_max_2d(instance.g_hat, instance.h_hat, lam) - mu)
            + max(0.0, -lam) + max(0.0, -mu))
    gradient = g * g_w + lam * h * h_w - mu * w
    return KktReport(
        primal_feas=float(primal),
        dual_feas=float(dual),
        comp_slack_rate=float(abs(lam) * abs(tr_h - b)),
        comp_slack_power=float(abs(mu) * abs(tr_w - instance.power)),
        stationarity=float(np.linalg.norm(gradient)),
    )


def _finish(instance: RobustInstance, w: Beamformer, lam: float, mu: float,
            path: str) -> BeamformerSolution:
    """Canonicalize phase and attach energies, gap and KKT residuals"""
    w = canonical_phase(w, instance.g_hat)
    nominal = abs(instance.g_hat.inner(w)) ** 2
    dual_value = mu * instance.power - lam * beta(instance)
    gap = abs(dual_value - nominal) / nominal if nominal > 0.0 else abs(dual_value - nominal)
    draft = BeamformerSolution(
        w=w,
        guaranteed_energy=_guaranteed_energy(instance, w),
        nominal_energy=nominal,
        lam=lam,
        mu=mu,
        duality_gap=gap,
        kkt_residuals=KktReport(0.0, 0.0, 0.0, 0.0, 0.0),
        path=path,
    )
    kkt = verify_kkt(instance, draft)
    return replace(draft, kkt_residuals=kkt)


def _require_feasible(instance: RobustInstance):
    report = check_feasibility(instance)
    if not report.feasible:
        raise InfeasibleInstance(
            f"rate target {instance.rate_target:g} is infeasible at epsilon {instance.epsilon:g} "
            f"(margin {report.margin:.6g})", report.margin)
    if instance.power <= 0.0:
        raise InfeasibleInstance("power budget must be positive", report.margin)


def _matched_filter(v: np.ndarray, power: float) -> np.ndarray:
    norm = np.linalg.norm(v)
    if norm == 0.0:
        e = np.zeros(v.size, dtype=np.complex128)
        e[0] = 1.0
        return math.sqrt(power) * e
    return math.sqrt(power) * v / norm


def _rate_active(instance: RobustInstance, w: Beamformer) -> bool:
    b = beta(instance)
    return abs(instance.h_hat.inner(w)) ** 2 - b <= 1e-9 * (1.0 + b)


def _back_compute_duals(instance: RobustInstance, w: Beamformer) -> Tuple[float, float]:
    """
    Multipliers from the active set

    Inactive rate constraint: lam = 0 and mu = ||g||^2. Active: the
    stationarity condition g(g^H w) + lam h(h^H w) = mu w is solved for
    (lam, mu) in the least-squares sense over real and imaginary parts.
    """
    g, h, x = instance.g_hat.entries, instance.h_hat.entries, w.w
    if not _rate_active(instance, w) or beta(instance) == 0.0:
        return 0.0, float(np.vdot(g, g).real)
    columns = np.column_stack([h * np.vdot(h, x), -x])
    rhs = -g * np.vdot(g, x)
    system = np.vstack([columns.real, columns.imag])
    target = np.concatenate([rhs.real, rhs.imag])
    (lam, mu), *_ = np.linalg.lstsq(system, target, rcond=None)
    return max(float(lam), 0.0), max(float(mu), 0.0)


def _plane_coordinates(instance: RobustInstance):
    """h-aligned basis (u1, u2) and |g1|, |g2| with g = g1 u1 + g2 u2"""
    h, g = instance.h_hat.entries, instance.g_hat.entries
    u1, u2 = _plane(h, g)
    g1 = np.vdot(u1, g)
    g2 = float(np.vdot(u2, g).real) if u2 is not None else 0.0
    return u1, u2, g1, g2


def _assemble(u1: np.ndarray, u2: Optional[np.ndarray], g1: complex, x: float,
              y: float) -> Beamformer:
    """w = x e^{j arg g1} u1 + y u2, aligning both terms of g^H w"""
    phase = g1 / abs(g1) if abs(g1) > 0.0 else 1.0
    w = x * phase * u1
    if u2 is not None:
        w = w + y * u2
    return Beamformer(w)


def _x_min(instance: RobustInstance) -> float:
    return min(math.sqrt(beta(instance)) / instance.h_hat.norm, math.sqrt(instance.power))


def solve_closed_form(instance: RobustInstance) -> BeamformerSolution:
    """
    Exact solution in span{g_hat, h_hat}

    With u1 = h/||h|| and u2 the unit residual of g, the problem reduces to
    maximizing |g1| x + |g2| y on x^2 + y^2 = P subject to x >= x_min.
    """
    _require_feasible(instance)
    power = instance.power
    if instance.h_hat.norm == 0.0:
        w = Beamformer(_matched_filter(instance.g_hat.entries, power))
        lam, mu = 0.0, instance.g_hat.norm2
        return _finish(instance, w, lam, mu, "closed_form")

    u1, u2, g1, g2 = _plane_coordinates(instance)
    g_norm = instance.g_hat.norm
    if g_norm == 0.0 or u2 is None:
        x, y = math.sqrt(power), 0.0
    else:
        x = math.sqrt(power) * abs(g1) / g_norm
        y = math.sqrt(power) * g2 / g_norm
    x_min = _x_min(instance)
    if x < x_min:
        x = x_min
        y = math.sqrt(max(power - x * x, 0.0))
        logger.debug("closed form: rate constraint active at x = %.12g", x)

    w = _assemble(u1, u2, g1, x, y)
    lam, mu = _back_compute_duals(instance, w)
    return _finish(instance, w, lam, mu, "closed_form")


def solve_grid_oracle(instance: RobustInstance,
                      resolution: int = DEFAULT_GRID_RESOLUTION) -> BeamformerSolution:
    """Brute-force oracle over x in [x_min, sqrt(P)] with y = sqrt(P - x^2)"""
    if resolution < 100:
        raise ValueError("resolution must be >= 100")
    _require_feasible(instance)
    power = instance.power
    if instance.h_hat.norm == 0.0:
        w = Beamformer(_matched_filter(instance.g_hat.entries, power))
        return _finish(instance, w, 0.0, instance.g_hat.norm2, "grid")

    u1, u2, g1, g2 = _plane_coordinates(instance)
    xs = np.linspace(_x_min(instance), math.sqrt(power), resolution)
    ys = np.sqrt(np.maximum(power - xs ** 2, 0.0))
    objective = abs(g1) * xs + g2 * ys
    k = int(np.argmax(objective))

    w = _assemble(u1, u2, g1, float(xs[k]), float(ys[k]))
    lam, mu = _back_compute_duals(instance, w)
    return _finish(instance, w, lam, mu, "grid")


def _recover(instance: RobustInstance, lam: float, mu: float) -> Beamformer:
    """
    Rank-one recovery d = (mu I - lam H)^{-1} g on span{g, h}

    Raises DegenerateRecovery when the smallest eigenvalue of the recovery
    matrix on that plane, mu - lam*||h||^2, is below DEGENERATE_TOL * mu.
    """
    h_norm2 = instance.h_hat.norm2
    if mu <= 0.0 or mu - lam * h_norm2 < DEGENERATE_TOL * mu:
        raise DegenerateRecovery(
            f"recovery matrix singular (mu = {mu:.6g}, lam*||h||^2 = {lam * h_norm2:.6g})")
    g, h = instance.g_hat.entries, instance.h_hat.entries
    u1, u2 = _plane(g, h)
    basis = [u1] if u2 is None else [u1, u2]
    gc = np.array([np.vdot(u, g) for u in basis])
    hc = np.array([np.vdot(u, h) for u in basis])
    q = mu * np.eye(len(basis)) - lam * np.outer(hc, hc.conj())
    coords = np.linalg.solve(q, gc)
    d = sum(c * u for c, u in zip(coords, basis))
    return Beamformer(math.sqrt(instance.power) * d / np.linalg.norm(d))


def solve_dual_sdp(instance: RobustInstance) -> BeamformerSolution:
    """
    Solve the relaxation through its reduced Lagrangian dual

    The dual of the relaxed problem collapses to the univariate convex
    f(lam) = P*lambda_max(G + lam*H) - lam*beta with mu = lambda_max(G + lam*H).
    Golden-section search brackets its minimizer, brentq polishes it on the
    Danskin slope, and the rank-one optimum is recovered from
    (mu I - lam H)^{-1} g.

    Raises:
        InfeasibleInstance: The robust rate target cannot be met
        ToleranceNotReached: The dual search could not be bracketed
    """
    _require_feasible(instance)
    g_hat, h_hat = instance.g_hat, instance.h_hat
    b = beta(instance)

    w0 = Beamformer(_matched_filter(g_hat.entries, instance.power))
    if g_hat.norm == 0.0:
        logger.warning("energy channel is zero; using the closed-form path")
        return solve_closed_form(instance)
    if abs(h_hat.inner(w0)) ** 2 >= b:
        logger.debug("rate constraint inactive; matched filter to g_hat")
        return _finish(instance, w0, 0.0, g_hat.norm2, "dual_sdp")
    if _x_min(instance) >= math.sqrt(instance.power) * (1.0 - DEGENERATE_TOL):
        # dual infimum only approached as lambda -> infinity
        logger.warning("rate target takes the whole power budget; using the closed-form path")
        return solve_closed_form(instance)

    hi = _bracket_dual(instance)
    lo, hi = golden_section(lambda lam: reduced_dual(instance, lam), 0.0, hi)
    lam = float(_polish_dual(instance, lo, hi))
    mu = lambda_max_2d(g_hat, h_hat, lam)
    logger.debug("dual optimum lambda = %.15g, mu = %.15g", lam, mu)

    try:
        w = _recover(instance, lam, mu)
        solution = _finish(instance, w, lam, mu, "dual_sdp")
    except DegenerateRecovery as e:
        logger.warning("%s; falling back to the closed-form path", e)
        return solve_closed_form(instance)

    scale = max(1.0, mu * instance.power)
    residual = solution.kkt_residuals.max_residual()
    if residual > KKT_TOL * scale:
        logger.warning("dual recovery residual %.3g exceeds tolerance; "
                       "falling back to the closed-form path", residual)
        return solve_closed_form(instance)
    return solution


def solve_nonrobust(instance: RobustInstance) -> BeamformerSolution:
    """Design as if the estimates were exact (epsilon := 0)"""
    return solve_closed_form(with_epsilon(instance, 0.0))


def extract_beamformer(W: np.ndarray) -> Tuple[Beamformer, float]:
    """
    Principal-eigenpair beamformer of a Hermitian PSD matrix

    Returns:
        Tuple of (sqrt(l1) * v1, l2 / l1), the second value being 0 for an
        exactly rank-one input
    """
    W = np.asarray(W, dtype=np.complex128)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError("W must be a square matrix")
    if not np.allclose(W, W.conj().T, atol=1e-12 * max(1.0, float(np.abs(W).max(initial=0.0)))):
        raise ValueError("W must be Hermitian")
    values, vectors = np.linalg.eigh(W)
    top = float(values[-1])
    if top <= 0.0:
        raise ValueError("W has no positive eigenvalue")
    defect = max(float(values[-2]), 0.0) / top if W.shape[0] > 1 else 0.0
    return Beamformer(math.sqrt(top) * vectors[:, -1]), defect


SOLVERS: Dict[str, Callable[[RobustInstance], BeamformerSolution]] = {
    "dual_sdp": solve_dual_sdp,
    "closed_form": solve_closed_form,
    "grid": solve_grid_oracle,
}


def solve(instance: RobustInstance, path: str = "dual_sdp") -> BeamformerSolution:
    """Solve by the named path"""
    if path not in SOLVERS:
        raise ValueError(f"unknown solver path '{path}'")
    return SOLVERS[path](instance)


def energy_rate_tradeoff(instance: RobustInstance, rates: Sequence[float],
                         path: str = "dual_sdp") -> List[Tuple[float, Optional[BeamformerSolution]]]:
    """Robust solution at each rate target; None where the target is infeasible"""
    curve = []
    for r in rates:
        try:
            curve.append((float(r), solve(with_rate(instance, float(r)), path)))
        except InfeasibleInstance:
            curve.append((float(r), None))
    return curve


def solution_to_json(solution: BeamformerSolution, **extra) -> bytes:
    """Solution JSON document; extra keys are merged at top level"""
    doc = solution.to_dict()
    doc.update(extra)
    return json.dumps(doc, indent=2).encode()
