"""Simulation suite for synchronization and controlled de-synchronization of
networked oscillators: microgrid secondary control, thermostatic load fleets
and conformist-contrarian power-grid dynamics."""

__version__ = "0.1.0"
