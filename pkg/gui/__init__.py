"""GUI components for Robust Beamforming Toolkit"""
