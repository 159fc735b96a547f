"""
Desktop entry point for Robust Beamforming Toolkit

    python main.py [instance.json]
"""

import argparse
import logging
import sys
from pathlib import Path

from PyQt6.QtWidgets import QApplication

from gui.main_window import MainWindow
from model import BeamformingError, parse_instance

logger = logging.getLogger(__name__)


def main():
    parser = argparse.ArgumentParser(prog="beamform-gui")
    parser.add_argument("instance", nargs="?", help="instance JSON to open on start")
    args, qt_args = parser.parse_known_args()

    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    app = QApplication(sys.argv[:1] + qt_args)

    window = MainWindow()
    if args.instance:
        path = Path(args.instance)
        try:
            window.on_instance_changed(parse_instance(path.read_bytes()), path.name)
        except (OSError, BeamformingError) as e:
            logger.error("cannot open %s: %s", path, e)
    window.show()

    sys.exit(app.exec())


if __name__ == "__main__":
    main()
