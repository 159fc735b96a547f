"""
Workbench for Robust Beamforming Toolkit
Interactive session state: the current instance, its solutions per path,
the last adversarial check and the rate-energy tradeoff curve
"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from model import (FeasibilityReport, RobustInstance, check_feasibility, max_feasible_rate)
from predefined_instances import load_instance as load_predefined_instance
from solver import (BeamformerSolution, PATHS, energy_rate_tradeoff, solve, solve_nonrobust)
from worstcase import AdversaryReport, adversarial_check

logger = logging.getLogger(__name__)

DESIGNS = ("robust", "nonrobust")


class Workbench:
    """Holds one instance and everything computed for it"""

    def __init__(self):
        self.instance: Optional[RobustInstance] = None
        self.instance_name: Optional[str] = None
        self.solutions: Dict[str, BeamformerSolution] = {}
        self.nonrobust: Optional[BeamformerSolution] = None
        self.last_report: Optional[AdversaryReport] = None
        self.last_design: Optional[str] = None
        self.curve: List[Tuple[float, Optional[BeamformerSolution]]] = []

    def load_instance(self, instance: RobustInstance, name: Optional[str] = None):
        """
        Make instance current and drop every result of the previous one

        Args:
            instance: Problem to work on
            name: Display name, if it came from the registry
        """
        self.instance = instance
        self.instance_name = name
        self.solutions = {}
        self.nonrobust = None
        self.last_report = None
        self.last_design = None
        self.curve = []

    def load_predefined(self, name: str) -> RobustInstance:
        """Load a registry instance by name"""
        instance = load_predefined_instance(name)
        self.load_instance(instance, name)
        return instance

    def _require_instance(self) -> RobustInstance:
        if self.instance is None:
            raise RuntimeError("no instance loaded")
        return self.instance

    def feasibility(self) -> FeasibilityReport:
        return check_feasibility(self._require_instance())

    def solve(self, path: str = "dual_sdp") -> BeamformerSolution:
        """Solve the current instance by path and remember the result"""
        solution = solve(self._require_instance(), path)
        self.solutions[path] = solution
        if solution.path != path:
            logger.info("%s request answered by the %s path", path, solution.path)
        return solution

    def solve_all(self) -> Dict[str, BeamformerSolution]:
        for path in PATHS:
            self.solve(path)
        return dict(self.solutions)

    def get_solution(self, path: str = "dual_sdp") -> Optional[BeamformerSolution]:
        return self.solutions.get(path)

    def cross_check(self) -> float:
        """Absolute difference of guaranteed energy between the dual and closed-form paths"""
        dual = self.solutions.get("dual_sdp") or self.solve("dual_sdp")
        closed = self.solutions.get("closed_form") or self.solve("closed_form")
        return abs(dual.guaranteed_energy - closed.guaranteed_energy)

    def design(self, design: str) -> BeamformerSolution:
        """Robust (dual path) or nonrobust solution of the current instance"""
        if design not in DESIGNS:
            raise ValueError(f"Unknown design: {design}")
        if design == "nonrobust":
            if self.nonrobust is None:
                self.nonrobust = solve_nonrobust(self._require_instance())
            return self.nonrobust
        return self.solutions.get("dual_sdp") or self.solve("dual_sdp")

    def verify(self, n_samples: int = 1000, seed: int = 0, design: str = "robust",
               mode: str = "mixed") -> AdversaryReport:
        """Run the sampling adversary against one design"""
        solution = self.design(design)
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        self.last_report = adversarial_check(self._require_instance(), solution.w,
                                             n_samples, rng, mode)
        self.last_design = design
        return self.last_report

    def tradeoff(self, points: int = 12) -> List[Tuple[float, Optional[BeamformerSolution]]]:
        """Robust solutions over evenly spaced rates up to the largest feasible one"""
        if points < 2:
            raise ValueError("points must be >= 2")
        instance = self._require_instance()
        top = max_feasible_rate(instance)
        rates = np.linspace(0.0, top, points)
        self.curve = energy_rate_tradeoff(instance, rates)
        return self.curve

    def summary(self) -> dict:
        """Plain-data view of the session for display"""
        if self.instance is None:
            return {"instance": None}
        report = self.feasibility()
        doc = {
            "instance": self.instance_name or "custom",
            "n": self.instance.n,
            "feasibility": report.to_dict(),
            "solutions": {path: s.to_dict() for path, s in self.solutions.items()},
        }
        if "dual_sdp" in self.solutions and "closed_form" in self.solutions:
            doc["cross_check_delta"] = self.cross_check()
        if self.last_report is not None:
            doc["adversary"] = dict(self.last_report.to_dict(), design=self.last_design)
        if self.curve:
            doc["tradeoff"] = [
                {"r": r, "guaranteed_energy": None if s is None else s.guaranteed_energy}
                for r, s in self.curve
            ]
        return doc
