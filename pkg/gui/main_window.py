"""
Main Window for Robust Beamforming Toolkit
"""

import logging
from pathlib import Path

from PyQt6.QtWidgets import (QMainWindow, QWidget, QHBoxLayout, QVBoxLayout, QSplitter,
                             QMessageBox, QLabel, QFileDialog, QDialog, QListWidget,
                             QDialogButtonBox)
from PyQt6.QtCore import Qt

from gui.config_panel import ConfigPanel
from gui.beamformer_view import BeamformerView
from gui.report_view import ReportView
from gui.verify_panel import VerifyPanel
from gui.stats_panel import StatsPanel
from model import BeamformingError, RobustInstance, parse_instance, serialize_instance
from montecarlo import load_config, report_from_csv, run_campaign
from predefined_instances import get_instance_names
from solver import solution_to_json
from workbench import Workbench

logger = logging.getLogger(__name__)

OK_STYLE = "background-color: #90EE90; padding: 5px; font-weight: bold;"
WARN_STYLE = "background-color: #FE9900; padding: 5px; font-weight: bold;"
IDLE_STYLE = "background-color: #e0e0e0; padding: 5px; font-weight: bold;"


class MainWindow(QMainWindow):
    """Main application window"""

    def __init__(self):
        super().__init__()
        self.workbench = Workbench()
        self.init_ui()
        self.setup_default_config()

    def init_ui(self):
        """Initialize UI"""
        self.setWindowTitle("Robust Beamforming Toolkit")
        self.setGeometry(100, 100, 1400, 800)

        self.create_menu_bar()

        central_widget = QWidget()
        self.setCentralWidget(central_widget)
        main_layout = QVBoxLayout()
        central_widget.setLayout(main_layout)

        # Status message area
        self.status_label = QLabel("No instance loaded")
        self.status_label.setStyleSheet(IDLE_STYLE)
        self.status_label.setAlignment(Qt.AlignmentFlag.AlignCenter)
        main_layout.addWidget(self.status_label)

        content_layout = QHBoxLayout()

        self.config_panel = ConfigPanel()
        self.beamformer_view = BeamformerView()
        self.report_view = ReportView()
        self.verify_panel = VerifyPanel()
        self.stats_panel = StatsPanel()

        # Connect signals
        self.config_panel.instance_changed.connect(self.on_instance_changed)
        self.config_panel.config_error.connect(self.on_config_error)
        self.verify_panel.solve_requested.connect(self.on_solve)
        self.verify_panel.verify_requested.connect(self.on_verify)
        self.verify_panel.tradeoff_requested.connect(self.on_tradeoff)

        left_widget = QWidget()
        left_layout = QVBoxLayout()
        left_layout.addWidget(self.config_panel)
        left_widget.setLayout(left_layout)
        left_widget.setMaximumWidth(280)

        center_splitter = QSplitter(Qt.Orientation.Vertical)
        center_splitter.addWidget(self.beamformer_view)
        center_splitter.addWidget(self.report_view)
        center_splitter.setSizes([350, 350])

        right_widget = QWidget()
        right_layout = QVBoxLayout()
        right_layout.addWidget(self.verify_panel)
        right_layout.addWidget(self.stats_panel)
        right_widget.setLayout(right_layout)
        right_widget.setMaximumWidth(400)

        main_splitter = QSplitter(Qt.Orientation.Horizontal)
        main_splitter.addWidget(left_widget)
        main_splitter.addWidget(center_splitter)
        main_splitter.addWidget(right_widget)
        main_splitter.setSizes([280, 800, 400])

        content_layout.addWidget(main_splitter)
        main_layout.addLayout(content_layout)

    def create_menu_bar(self):
        """Create menu bar"""
        menubar = self.menuBar()

        file_menu = menubar.addMenu("File")
        load_instance_action = file_menu.addAction("Open Instance...")
        load_instance_action.triggered.connect(self.on_open_instance)
        save_instance_action = file_menu.addAction("Save Instance...")
        save_instance_action.triggered.connect(self.on_save_instance)
        save_solution_action = file_menu.addAction("Save Solution...")
        save_solution_action.triggered.connect(self.on_save_solution)
        file_menu.addSeparator()
        predefined_action = file_menu.addAction("Load Predefined Instance")
        predefined_action.triggered.connect(self.on_load_predefined)
        file_menu.addSeparator()
        report_action = file_menu.addAction("Open Report CSV...")
        report_action.triggered.connect(self.on_open_report)
        campaign_action = file_menu.addAction("Run Campaign...")
        campaign_action.triggered.connect(self.on_run_campaign)
        file_menu.addSeparator()
        exit_action = file_menu.addAction("Exit")
        exit_action.triggered.connect(self.close)

        help_menu = menubar.addMenu("Help")
        about_action = help_menu.addAction("About")
        about_action.triggered.connect(self.on_about)

    def setup_default_config(self):
        """Set up default configuration"""
        self.config_panel.apply_config()

    def on_instance_changed(self, instance: RobustInstance, name: str = None):
        """Make a new instance current and solve it on the dual path"""
        if name is None and self.config_panel.get_config()['source'] in get_instance_names():
            name = self.config_panel.get_config()['source']
        self.workbench.load_instance(instance, name)
        self.beamformer_view.clear()
        self.verify_panel.clear_feedback()
        self.update_status_message()
        self.stats_panel.update_feasibility(self.workbench.feasibility())
        if self.workbench.feasibility().feasible:
            self.on_solve("dual_sdp")
        else:
            self.stats_panel.update_stats(None)

    def on_config_error(self, message: str):
        self.status_label.setText(f"Invalid instance: {message}")
        self.status_label.setStyleSheet(WARN_STYLE)

    def update_status_message(self):
        """Update status message at top of window"""
        if self.workbench.instance is None:
            self.status_label.setText("No instance loaded")
            self.status_label.setStyleSheet(IDLE_STYLE)
            return
        name = self.workbench.instance_name or "Custom instance"
        report = self.workbench.feasibility()
        if report.feasible:
            self.status_label.setText(f"{name} (N = {self.workbench.instance.n}), feasible")
            self.status_label.setStyleSheet(OK_STYLE)
        else:
            self.status_label.setText(f"{name}: rate target infeasible (margin {report.margin:.4g})")
            self.status_label.setStyleSheet(WARN_STYLE)

    def on_solve(self, path: str):
        """Handle solve request"""
        if self.workbench.instance is None:
            return
        try:
            solution = self.workbench.solve(path)
            cross_check = self.workbench.cross_check()
        except BeamformingError as e:
            QMessageBox.warning(self, "Solver", str(e))
            return
        self.beamformer_view.update_solutions(self.workbench.solutions, path)
        self.stats_panel.update_stats(solution, cross_check)

    def on_verify(self, settings: dict):
        """Handle verify request"""
        if self.workbench.instance is None:
            self.verify_panel.set_feedback("Load an instance first.", False)
            return
        try:
            report = self.workbench.verify(settings['n_samples'], settings['seed'],
                                           settings['design'], settings['mode'])
        except BeamformingError as e:
            self.verify_panel.set_feedback(str(e), False)
            return
        self.verify_panel.update_report(report, settings['design'])

    def on_tradeoff(self):
        """Handle tradeoff request"""
        if self.workbench.instance is None:
            return
        self.report_view.update_tradeoff(self.workbench.tradeoff())

    def on_open_instance(self):
        path, _ = QFileDialog.getOpenFileName(self, "Open Instance", "", "JSON (*.json)")
        if not path:
            return
        try:
            instance = parse_instance(Path(path).read_bytes())
        except (OSError, BeamformingError) as e:
            QMessageBox.critical(self, "Error", f"Failed to load instance: {e}")
            return
        self.on_instance_changed(instance, Path(path).name)

    def on_save_instance(self):
        if self.workbench.instance is None:
            return
        path, _ = QFileDialog.getSaveFileName(self, "Save Instance", "instance.json",
                                              "JSON (*.json)")
        if path:
            Path(path).write_bytes(serialize_instance(self.workbench.instance))

    def on_save_solution(self):
        solution = self.workbench.get_solution("dual_sdp")
        if solution is None:
            QMessageBox.warning(self, "Warning", "Solve the instance first.")
            return
        path, _ = QFileDialog.getSaveFileName(self, "Save Solution", "solution.json",
                                              "JSON (*.json)")
        if path:
            Path(path).write_bytes(solution_to_json(solution))

    def on_load_predefined(self):
        """Handle load predefined menu action"""
        dialog = QDialog(self)
        dialog.setWindowTitle("Load Predefined Instance")
        layout = QVBoxLayout()

        instance_list = QListWidget()
        names = get_instance_names()
        instance_list.addItems(names)
        if names:
            instance_list.setCurrentRow(0)
        layout.addWidget(instance_list)

        buttons = QDialogButtonBox(QDialogButtonBox.StandardButton.Ok
                                   | QDialogButtonBox.StandardButton.Cancel)
        buttons.accepted.connect(dialog.accept)
        buttons.rejected.connect(dialog.reject)
        layout.addWidget(buttons)
        dialog.setLayout(layout)

        if dialog.exec() == QDialog.DialogCode.Accepted:
            selected_items = instance_list.selectedItems()
            if selected_items:
                # routes through instance_changed
                self.config_panel.source_combo.setCurrentText(selected_items[0].text())
                self.config_panel.apply_config()

    def on_open_report(self):
        path, _ = QFileDialog.getOpenFileName(self, "Open Report", "", "CSV (*.csv)")
        if not path:
            return
        try:
            report = report_from_csv(Path(path).read_text())
        except (OSError, ValueError, KeyError) as e:
            QMessageBox.critical(self, "Error", f"Failed to load report: {e}")
            return
        self.report_view.update_report(report)

    def on_run_campaign(self):
        path, _ = QFileDialog.getOpenFileName(self, "Campaign Configuration", "", "TOML (*.toml)")
        if not path:
            return
        try:
            config = load_config(path)
            report = run_campaign(config)
        except (OSError, BeamformingError) as e:
            QMessageBox.critical(self, "Error", f"Campaign failed: {e}")
            return
        self.report_view.update_report(report)
        if report.errors:
            QMessageBox.warning(self, "Campaign", f"{len(report.errors)} trial(s) failed.")

    def on_about(self):
        """Show about dialog"""
        QMessageBox.about(self, "About",
                          "Robust Beamforming Toolkit\n\n"
                          "Worst-case robust transmit beamforming for simultaneous "
                          "wireless information and power transfer.")
