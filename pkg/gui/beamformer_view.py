"""
Beamformer View for Robust Beamforming Toolkit
Displays the per-antenna weights of each solver path
"""

import math
from typing import Dict, Optional

import numpy as np
from PyQt6.QtWidgets import QWidget, QVBoxLayout, QTableWidget, QTableWidgetItem, QLabel
from PyQt6.QtGui import QColor

from solver import BeamformerSolution

ACTIVE_COLOR = QColor(144, 238, 144)
FALLBACK_COLOR = QColor(255, 182, 193)


class BeamformerView(QWidget):
    """Widget for displaying beamforming weights"""

    def __init__(self, parent=None):
        super().__init__(parent)
        self.init_ui()
        self.active_path = None

    def init_ui(self):
        """Initialize UI components"""
        layout = QVBoxLayout()

        title = QLabel("Beamformer")
        title.setStyleSheet("font-weight: bold; font-size: 14pt;")
        layout.addWidget(title)

        self.table = QTableWidget()
        self.table.setAlternatingRowColors(True)
        self.table.horizontalHeader().setStretchLastSection(True)
        self.table.verticalHeader().setVisible(True)
        self.table.horizontalHeader().setStyleSheet(
            "QHeaderView::section {"
            "background-color: #4a4a4a;"
            "color: white;"
            "padding: 4px;"
            "border: 1px solid #6c6c6c;"
            "font-weight: bold;"
            "}"
        )
        layout.addWidget(self.table)

        self.setLayout(layout)

    def update_solutions(self, solutions: Dict[str, BeamformerSolution],
                         active_path: Optional[str] = None):
        """
        Update weight display

        Args:
            solutions: Requested path name -> solution
            active_path: Requested path to highlight; pink when another
                path answered it
        """
        self.active_path = active_path
        paths = list(solutions)
        n = max((s.w.n for s in solutions.values()), default=0)

        self.table.setRowCount(n)
        self.table.setColumnCount(3 * len(paths))
        headers = []
        for path in paths:
            headers.extend([f"|w| {path}", f"phase {path}", f"share {path}"])
        self.table.setHorizontalHeaderLabels(headers)
        self.table.setVerticalHeaderLabels([f"ant {i}" for i in range(n)])

        for p, path in enumerate(paths):
            solution = solutions[path]
            w = solution.w.w
            power = solution.w.power
            for i in range(solution.w.n):
                magnitude = abs(w[i])
                phase = math.degrees(float(np.angle(w[i]))) if magnitude > 0 else 0.0
                share = magnitude ** 2 / power if power > 0 else 0.0
                cells = (f"{magnitude:.6f}", f"{phase:+.2f} deg", f"{100 * share:.2f}%")
                for c, text in enumerate(cells):
                    item = QTableWidgetItem(text)
                    if path == active_path:
                        item.setBackground(ACTIVE_COLOR if solution.path == path
                                           else FALLBACK_COLOR)
                    self.table.setItem(i, 3 * p + c, item)

        self.table.resizeColumnsToContents()

    def clear(self):
        self.table.setRowCount(0)
        self.table.setColumnCount(0)
        self.active_path = None
