"""Offscreen smoke tests for the Qt front end."""

import os

import pytest

os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")
QtWidgets = pytest.importorskip("PyQt6.QtWidgets")

from gui.main_window import MainWindow  # noqa: E402
from montecarlo import SimConfig, run_campaign  # noqa: E402


@pytest.fixture(scope="module")
def app():
    return QtWidgets.QApplication.instance() or QtWidgets.QApplication([])


@pytest.fixture
def window(app):
    window = MainWindow()
    yield window
    window.close()


def test_default_instance_is_solved(window):
    assert window.workbench.instance is not None
    assert "dual_sdp" in window.workbench.solutions
    assert window.stats_panel.guaranteed_label.text().startswith("Guaranteed energy: 20")
    assert window.beamformer_view.table.rowCount() == 2
    assert "feasible" in window.status_label.text()


def test_switching_source_rebuilds_instance(window):
    window.config_panel.source_combo.setCurrentText("Collinear Channels")
    window.config_panel.apply_config()
    assert window.workbench.instance_name == "Collinear Channels"
    assert window.workbench.instance.rate_target == 2.0


def test_infeasible_edit_clears_stats(window):
    window.config_panel.epsilon_spin.setValue(5.0)
    window.config_panel.apply_config()
    assert not window.workbench.feasibility().feasible
    assert window.stats_panel.path_label.text() == "Path: -"
    assert "infeasible" in window.status_label.text()


def test_solve_verify_and_tradeoff(window):
    window.on_solve("closed_form")
    assert window.beamformer_view.table.columnCount() == 6
    settings = dict(window.verify_panel.get_settings(), n_samples=50, design="robust")
    window.on_verify(settings)
    assert "no outage" in window.verify_panel.feedback_text.toPlainText()
    window.on_tradeoff()
    assert window.report_view.table.rowCount() == 12


def test_report_view_filter(window):
    config = SimConfig(n_antennas=2, epsilons=(0.0, 0.3), rate_grid=(0.0, 3.0),
                       n_channels=2, n_error_samples=20, seed=3)
    report = run_campaign(config)
    window.report_view.update_report(report)
    assert window.report_view.table.rowCount() == 4
    window.report_view.outage_only_checkbox.setChecked(True)
    expected = sum(row.nonrobust_outage_pct > 0.0 for row in report.rows)
    assert window.report_view.table.rowCount() == expected
