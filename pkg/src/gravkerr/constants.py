"""Physical constants (CODATA 2018, SI) shared by every module."""

G = 6.67430e-11
C = 299792458.0
HBAR = 1.054571817e-34

JULIAN_YEAR = 365.25 * 86400.0

DEFAULT_TOLERANCE = 1e-12
