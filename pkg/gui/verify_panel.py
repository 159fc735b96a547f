"""
Verify Panel for Robust Beamforming Toolkit
Runs the sampling adversary against the robust or nonrobust design
"""

from PyQt6.QtWidgets import (QWidget, QVBoxLayout, QHBoxLayout, QLabel, QGroupBox,
                             QComboBox, QPushButton, QSpinBox, QTextEdit)
from PyQt6.QtCore import pyqtSignal

from workbench import DESIGNS
from worstcase import SAMPLING_MODES, AdversaryReport


class VerifyPanel(QWidget):
    """Panel for solving and attacking the current instance"""

    solve_requested = pyqtSignal(str)
    verify_requested = pyqtSignal(dict)
    tradeoff_requested = pyqtSignal()

    def __init__(self, parent=None):
        super().__init__(parent)
        self.init_ui()

    def init_ui(self):
        """Initialize UI components"""
        layout = QVBoxLayout()
        layout.setSpacing(10)

        # Solve
        solve_group = QGroupBox("Solve")
        solve_layout = QHBoxLayout()
        self.path_combo = QComboBox()
        self.path_combo.addItems(["dual_sdp", "closed_form", "grid"])
        solve_layout.addWidget(self.path_combo)
        self.solve_button = QPushButton("Solve")
        self.solve_button.clicked.connect(
            lambda: self.solve_requested.emit(self.path_combo.currentText()))
        solve_layout.addWidget(self.solve_button)
        solve_group.setLayout(solve_layout)
        layout.addWidget(solve_group)

        # Adversary settings
        verify_group = QGroupBox("Adversarial Check")
        verify_layout = QVBoxLayout()
        verify_layout.addWidget(QLabel("Design:"))
        self.design_combo = QComboBox()
        self.design_combo.addItems(list(DESIGNS))
        verify_layout.addWidget(self.design_combo)
        verify_layout.addWidget(QLabel("Sampling:"))
        self.mode_combo = QComboBox()
        self.mode_combo.addItems(list(SAMPLING_MODES))
        self.mode_combo.setCurrentText("mixed")
        verify_layout.addWidget(self.mode_combo)
        verify_layout.addWidget(QLabel("Samples:"))
        self.samples_spin = QSpinBox()
        self.samples_spin.setRange(1, 1_000_000)
        self.samples_spin.setValue(1000)
        verify_layout.addWidget(self.samples_spin)
        verify_layout.addWidget(QLabel("Seed:"))
        self.seed_spin = QSpinBox()
        self.seed_spin.setRange(0, 2 ** 31 - 1)
        verify_layout.addWidget(self.seed_spin)
        verify_group.setLayout(verify_layout)
        layout.addWidget(verify_group)

        # Result Area
        feedback_group = QGroupBox("Result")
        feedback_layout = QVBoxLayout()
        self.feedback_text = QTextEdit()
        self.feedback_text.setReadOnly(True)
        self.feedback_text.setMaximumHeight(140)
        feedback_layout.addWidget(self.feedback_text)
        feedback_group.setLayout(feedback_layout)
        layout.addWidget(feedback_group)

        button_layout = QHBoxLayout()
        self.verify_button = QPushButton("Verify")
        self.verify_button.clicked.connect(lambda: self.verify_requested.emit(self.get_settings()))
        self.tradeoff_button = QPushButton("Tradeoff")
        self.tradeoff_button.clicked.connect(self.tradeoff_requested.emit)
        button_layout.addWidget(self.verify_button)
        button_layout.addWidget(self.tradeoff_button)
        layout.addLayout(button_layout)

        layout.addStretch()
        self.setLayout(layout)

    def get_settings(self) -> dict:
        return {
            'design': self.design_combo.currentText(),
            'mode': self.mode_combo.currentText(),
            'n_samples': self.samples_spin.value(),
            'seed': self.seed_spin.value(),
        }

    def update_report(self, report: AdversaryReport, design: str):
        """Show an adversary report; green when nothing broke, red otherwise"""
        ok = not (report.rate_outage or report.energy_bound_violated)
        lines = [
            f"{design} design, {report.n_samples} draws ({report.mode})",
            f"min rate {report.min_rate:.6g} vs target {report.rate_target:.6g}",
            f"outage fraction {100 * report.outage_fraction:.2f}%",
            f"min energy {report.min_energy:.6g} (bound {report.closed_form_energy:.6g})",
        ]
        if report.energy_bound_violated:
            lines.append("energy bound violated")
        lines.append("no outage" if ok else "outage detected")
        self.set_feedback("\n".join(lines), ok)

    def set_feedback(self, message: str, is_correct: bool = None):
        """Set feedback message"""
        self.feedback_text.clear()
        if message:
            self.feedback_text.append(message)
            if is_correct is True:
                self.feedback_text.setStyleSheet("color: green;")
            elif is_correct is False:
                self.feedback_text.setStyleSheet("color: red;")
            else:
                self.feedback_text.setStyleSheet("")

    def clear_feedback(self):
        """Clear feedback"""
        self.feedback_text.clear()
        self.feedback_text.setStyleSheet("")
