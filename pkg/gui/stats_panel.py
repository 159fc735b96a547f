"""
Statistics Panel for Robust Beamforming Toolkit
Displays the energies, multipliers and optimality residuals of a solution
"""

from PyQt6.QtWidgets import QWidget, QVBoxLayout, QLabel, QGroupBox
from PyQt6.QtCore import Qt

from model import FeasibilityReport
from solver import BeamformerSolution


class StatsPanel(QWidget):
    """Panel for displaying solution diagnostics"""

    def __init__(self, parent=None):
        super().__init__(parent)
        self.init_ui()

    def _label(self, layout, text: str) -> QLabel:
        label = QLabel(text)
        label.setAlignment(Qt.AlignmentFlag.AlignLeft)
        layout.addWidget(label)
        return label

    def init_ui(self):
        """Initialize UI components"""
        layout = QVBoxLayout()
        layout.setSpacing(10)

        feasibility_group = QGroupBox("Feasibility")
        feasibility_layout = QVBoxLayout()
        self.feasible_label = self._label(feasibility_layout, "Feasible: -")
        self.margin_label = self._label(feasibility_layout, "Margin: -")
        self.max_rate_label = self._label(feasibility_layout, "Max rate: -")
        feasibility_group.setLayout(feasibility_layout)
        layout.addWidget(feasibility_group)

        stats_group = QGroupBox("Solution")
        stats_layout = QVBoxLayout()
        self.path_label = self._label(stats_layout, "Path: -")
        self.guaranteed_label = self._label(stats_layout, "Guaranteed energy: -")
        self.nominal_label = self._label(stats_layout, "Nominal energy: -")
        self.lambda_label = self._label(stats_layout, "lambda: -")
        self.mu_label = self._label(stats_layout, "mu: -")
        self.gap_label = self._label(stats_layout, "Duality gap: -")
        self.kkt_label = self._label(stats_layout, "Max KKT residual: -")
        self.cross_check_label = self._label(stats_layout, "Dual vs closed form: -")
        stats_group.setLayout(stats_layout)
        layout.addWidget(stats_group)

        layout.addStretch()
        self.setLayout(layout)

    def update_feasibility(self, report: FeasibilityReport):
        self.feasible_label.setText(f"Feasible: {'yes' if report.feasible else 'no'}")
        self.margin_label.setText(f"Margin: {report.margin:.6g}")
        self.max_rate_label.setText(f"Max rate: {report.max_rate:.6g} bit/s/Hz")

    def update_stats(self, solution: BeamformerSolution = None, cross_check: float = None):
        """Update solution display; None clears it"""
        if solution is None:
            for label, name in ((self.path_label, "Path"),
                                (self.guaranteed_label, "Guaranteed energy"),
                                (self.nominal_label, "Nominal energy"),
                                (self.lambda_label, "lambda"), (self.mu_label, "mu"),
                                (self.gap_label, "Duality gap"),
                                (self.kkt_label, "Max KKT residual")):
                label.setText(f"{name}: -")
            self.cross_check_label.setText("Dual vs closed form: -")
            return
        self.path_label.setText(f"Path: {solution.path}")
        self.guaranteed_label.setText(f"Guaranteed energy: {solution.guaranteed_energy:.9g}")
        self.nominal_label.setText(f"Nominal energy: {solution.nominal_energy:.9g}")
        self.lambda_label.setText(f"lambda: {solution.lam:.9g}")
        self.mu_label.setText(f"mu: {solution.mu:.9g}")
        self.gap_label.setText(f"Duality gap: {solution.duality_gap:.3e}")
        self.kkt_label.setText(f"Max KKT residual: {solution.kkt_residuals.max_residual():.3e}")
        if cross_check is None:
            self.cross_check_label.setText("Dual vs closed form: -")
        else:
            self.cross_check_label.setText(f"Dual vs closed form: {cross_check:.3e}")
