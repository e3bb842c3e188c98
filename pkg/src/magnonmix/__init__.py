"""Nonlinear dynamics of a driven ferrimagnetic sphere resonator.

Sideband mixing under longitudinal modulation, anisotropy-induced Kerr
bistability, fixed-point classification and intermodulation gain, each with
a brute-force time-domain check.
"""
__version__ = "0.1.0"

from ._errors import InvalidParameterError, NumericalError, StiffnessError  # noqa: F401
from .kerr import KerrParams, KerrStabilityClassifier, find_bop, classify_point  # noqa: F401
from .lzs import LZSSpectrum  # noqa: F401
from .intermod import IntermodGain, PumpCalibration  # noqa: F401
from .units import MaterialParams, derive_quantities, load_preset  # noqa: F401
