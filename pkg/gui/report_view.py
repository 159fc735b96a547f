"""
Report View for Robust Beamforming Toolkit
Displays a campaign table and the single-instance tradeoff curve
"""

from typing import List, Optional, Tuple

from PyQt6.QtWidgets import (QWidget, QVBoxLayout, QTableWidget, QTableWidgetItem, QLabel,
                             QCheckBox)
from PyQt6.QtCore import Qt

from montecarlo import CSV_HEADER, SimReport
from solver import BeamformerSolution


class ReportView(QWidget):
    """Widget for displaying campaign rows"""

    def __init__(self, parent=None):
        super().__init__(parent)
        self.init_ui()
        self.report: Optional[SimReport] = None

    def init_ui(self):
        """Initialize UI components"""
        layout = QVBoxLayout()

        self.title = QLabel("Report")
        self.title.setStyleSheet("font-weight: bold; font-size: 14pt;")
        layout.addWidget(self.title)

        self.outage_only_checkbox = QCheckBox("Only rows with nonrobust outage")
        self.outage_only_checkbox.toggled.connect(self.on_outage_only_toggled)
        layout.addWidget(self.outage_only_checkbox)

        self.table = QTableWidget()
        self.table.horizontalHeader().setStretchLastSection(True)
        self.table.setAlternatingRowColors(True)
        layout.addWidget(self.table)

        self.setLayout(layout)

    def update_report(self, report: SimReport):
        """Show a SimReport"""
        self.report = report
        self.title.setText(f"Report ({report.kind}, seed {report.config.seed})")
        self._refresh_display()

    def _refresh_display(self):
        """Refresh the table based on current filter settings"""
        if self.report is None:
            return
        rows = self.report.rows
        if self.outage_only_checkbox.isChecked():
            rows = [row for row in rows if row.nonrobust_outage_pct > 0.0]

        self.table.setColumnCount(len(CSV_HEADER))
        self.table.setHorizontalHeaderLabels(list(CSV_HEADER))
        self.table.setRowCount(len(rows))
        for r, row in enumerate(rows):
            values = [getattr(row, name) for name in CSV_HEADER]
            for c, value in enumerate(values):
                text = str(value) if isinstance(value, int) else f"{value:.6g}"
                item = QTableWidgetItem(text)
                item.setFlags(item.flags() & ~Qt.ItemFlag.ItemIsEditable)
                if row.nonrobust_outage_pct > 0.0:
                    item.setBackground(Qt.GlobalColor.yellow)
                self.table.setItem(r, c, item)

        self.table.resizeColumnsToContents()

    def update_tradeoff(self, curve: List[Tuple[float, Optional[BeamformerSolution]]]):
        """Show a rate-energy tradeoff curve"""
        self.report = None
        self.title.setText("Rate-energy tradeoff")
        self.table.setColumnCount(3)
        self.table.setHorizontalHeaderLabels(["r", "guaranteed_energy", "nominal_energy"])
        self.table.setRowCount(len(curve))
        for i, (rate, solution) in enumerate(curve):
            cells = [f"{rate:.6g}", "infeasible", "-"]
            if solution is not None:
                cells[1:] = [f"{solution.guaranteed_energy:.6g}", f"{solution.nominal_energy:.6g}"]
            for c, text in enumerate(cells):
                item = QTableWidgetItem(text)
                item.setFlags(item.flags() & ~Qt.ItemFlag.ItemIsEditable)
                self.table.setItem(i, c, item)
        self.table.resizeColumnsToContents()

    def on_outage_only_toggled(self, checked):
        """Handle filter checkbox toggle"""
        self._refresh_display()
