"""
Configuration Panel for Robust Beamforming Toolkit
Edits the power budget, noise, rate target, uncertainty radius and the
channel source of the current instance
"""

import math

import numpy as np
from PyQt6.QtWidgets import (QWidget, QVBoxLayout, QHBoxLayout, QLabel, QComboBox,
                             QSpinBox, QDoubleSpinBox, QPushButton, QGroupBox)
from PyQt6.QtCore import pyqtSignal

from model import RobustInstance
from montecarlo import gen_rayleigh_channel
from predefined_instances import get_instance_names, load_instance

RANDOM_SOURCE = "Random Rayleigh"


class ConfigPanel(QWidget):
    """Panel for building a RobustInstance"""

    instance_changed = pyqtSignal(object)  # RobustInstance
    config_error = pyqtSignal(str)

    def __init__(self, parent=None):
        super().__init__(parent)
        self.init_ui()

    def init_ui(self):
        """Initialize UI components"""
        layout = QVBoxLayout()
        layout.setSpacing(10)

        # Channel source
        source_group = QGroupBox("Channels")
        source_layout = QVBoxLayout()
        self.source_combo = QComboBox()
        self.source_combo.addItems(get_instance_names() + [RANDOM_SOURCE])
        self.source_combo.currentTextChanged.connect(self.on_source_changed)
        source_layout.addWidget(self.source_combo)

        self.random_group = QWidget()
        random_layout = QVBoxLayout()
        random_layout.setContentsMargins(0, 0, 0, 0)
        random_layout.addWidget(QLabel("Antennas:"))
        self.antennas_spin = QSpinBox()
        self.antennas_spin.setRange(1, 64)
        self.antennas_spin.setValue(4)
        random_layout.addWidget(self.antennas_spin)
        random_layout.addWidget(QLabel("Seed:"))
        self.seed_spin = QSpinBox()
        self.seed_spin.setRange(0, 2 ** 31 - 1)
        random_layout.addWidget(self.seed_spin)
        self.random_group.setLayout(random_layout)
        self.random_group.setVisible(False)
        source_layout.addWidget(self.random_group)
        source_group.setLayout(source_layout)
        layout.addWidget(source_group)

        # Link budget
        budget_group = QGroupBox("Link Budget")
        budget_layout = QVBoxLayout()
        self.power_spin = self._double_spin(budget_layout, "Power P:", 0.001, 1e4, 10.0)
        self.sigma2_spin = self._double_spin(budget_layout, "Noise power:", 1e-6, 1e4, 1.0)
        budget_group.setLayout(budget_layout)
        layout.addWidget(budget_group)

        # Targets
        target_group = QGroupBox("Rate Target and Uncertainty")
        target_layout = QVBoxLayout()
        self.rate_spin = self._double_spin(target_layout, "Rate target r (bit/s/Hz):", 0.0, 64.0, 3.0)
        self.epsilon_spin = self._double_spin(target_layout, "Error radius epsilon:", 0.0, 100.0, 0.1)
        target_group.setLayout(target_layout)
        layout.addWidget(target_group)

        self.error_label = QLabel("")
        self.error_label.setStyleSheet("color: red;")
        self.error_label.setWordWrap(True)
        layout.addWidget(self.error_label)

        # Buttons
        button_layout = QHBoxLayout()
        self.apply_button = QPushButton("Apply")
        self.apply_button.clicked.connect(self.apply_config)
        self.reset_button = QPushButton("Reset")
        self.reset_button.clicked.connect(self.reset_config)
        button_layout.addWidget(self.apply_button)
        button_layout.addWidget(self.reset_button)
        layout.addLayout(button_layout)

        layout.addStretch()
        self.setLayout(layout)
        self.on_source_changed(self.source_combo.currentText())

    @staticmethod
    def _double_spin(layout, label: str, low: float, high: float, value: float) -> QDoubleSpinBox:
        layout.addWidget(QLabel(label))
        spin = QDoubleSpinBox()
        spin.setDecimals(6)
        spin.setRange(low, high)
        spin.setValue(value)
        layout.addWidget(spin)
        return spin

    def on_source_changed(self, text):
        """Show the random-channel controls, or copy a predefined instance's parameters"""
        self.random_group.setVisible(text == RANDOM_SOURCE)
        if text != RANDOM_SOURCE:
            self.set_instance(load_instance(text))

    def set_instance(self, instance: RobustInstance):
        """Copy an instance's scalars into the editors"""
        self.power_spin.setValue(instance.power)
        self.sigma2_spin.setValue(instance.sigma2)
        self.rate_spin.setValue(instance.rate_target)
        self.epsilon_spin.setValue(instance.epsilon)

    def get_config(self) -> dict:
        """Get current configuration"""
        return {
            'source': self.source_combo.currentText(),
            'n_antennas': self.antennas_spin.value(),
            'seed': self.seed_spin.value(),
            'power': self.power_spin.value(),
            'sigma2': self.sigma2_spin.value(),
            'rate_target': self.rate_spin.value(),
            'epsilon': self.epsilon_spin.value(),
        }

    def build_instance(self) -> RobustInstance:
        """RobustInstance described by the editors"""
        config = self.get_config()
        if config['source'] == RANDOM_SOURCE:
            n = config['n_antennas']
            rng = np.random.default_rng(np.random.SeedSequence(config['seed']))
            h_hat = gen_rayleigh_channel(n, float(n), rng)
            g_hat = gen_rayleigh_channel(n, float(n), rng)
        else:
            base = load_instance(config['source'])
            h_hat, g_hat = base.h_hat, base.g_hat
            # spin boxes round to 6 decimals; keep the exact value when untouched
            if math.isclose(config['rate_target'], base.rate_target, abs_tol=1e-6):
                config['rate_target'] = base.rate_target
            if math.isclose(config['epsilon'], base.epsilon, abs_tol=1e-6):
                config['epsilon'] = base.epsilon
        return RobustInstance(h_hat, g_hat, config['power'], config['sigma2'],
                              config['rate_target'], config['epsilon'])

    def apply_config(self):
        """Build the instance and emit it, or report why it is invalid"""
        try:
            instance = self.build_instance()
        except ValueError as e:
            self.error_label.setText(str(e))
            self.config_error.emit(str(e))
            return
        self.error_label.setText("")
        self.instance_changed.emit(instance)

    def reset_config(self):
        """Reset to the first predefined instance"""
        self.source_combo.setCurrentIndex(0)
        self.set_instance(load_instance(self.source_combo.currentText()))
        self.antennas_spin.setValue(4)
        self.seed_spin.setValue(0)
        self.apply_config()
