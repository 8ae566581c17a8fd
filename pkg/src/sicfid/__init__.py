"""SIC-POVM fiducial vectors from Stark units in prime dimensions d = n^2 + 3."""

__version__ = "0.1.0"
