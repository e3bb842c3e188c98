"""Landau-Zener-Stuckelberg sideband amplitudes and spectral maps.

For a transverse drive at ``omega`` and a longitudinal modulation
``omega_c + omega_b sin(omega_m t)``, the ``l``-th mixing process is
resonant at ``omega + l omega_m = omega_c`` and is driven with the Bessel
weight ``zeta = J_l(omega_b / omega_m)``.  The rotating-frame steady state of
that single resonance is

    P_+ = i (w1 z / G2) (G1 / G2) (1 + i wd / G2) P_zs
          / [(1 + wd^2 / G2^2) G1 / G2 + (w1 z / G2)^2]

with ``wd = omega + l omega_m - omega_c``.  Off-resonant Bessel components
are neglected, which is accurate when ``omega_m`` greatly exceeds ``Gamma_2``.
"""
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ._errors import InvalidParameterError
from .bessel import bessel_j_orders, bessel_jl
from .bloch import DampingParams, LzsDrive
from .grids import FieldMap, as_axis

L_MAX_DEFAULT = 8


@dataclass(frozen=True)
class SidebandQuery:
    l: int
    drive: LzsDrive
    damping: DampingParams


@dataclass(frozen=True)
class SidebandResult:
    P_plus: complex
    zeta: float
    omega_d: float


def modulation_index(drive):
    if drive.omega_b == 0.0:
        return 0.0
    if not drive.omega_m > 0:
        raise InvalidParameterError("omega_m must be positive when omega_b != 0")
    return drive.omega_b / drive.omega_m


def _amplitude(omega_1, zeta, omega_d, damping):
    g1, g2 = damping.gamma_1, damping.gamma_2
    x = omega_1 * zeta / g2
    u = omega_d / g2
    return 1j * x * (g1 / g2) * (1 + 1j * u) * damping.p_zs / ((1 + u**2) * g1 / g2 + x**2)


def sideband_amplitude(l, drive=None, damping=None):
    """Complex rotating-frame amplitude of the ``l``-th sideband.

    ``l`` may also be a :class:`SidebandQuery` carrying drive and damping.
    """
    if isinstance(l, SidebandQuery):
        l, drive, damping = l.l, l.drive, l.damping
    l = int(l)
    zeta = bessel_jl(l, modulation_index(drive))
    omega_d = drive.omega + l * drive.omega_m - drive.omega_c
    return SidebandResult(complex(_amplitude(drive.omega_1, zeta, omega_d, damping)),
                          zeta, omega_d)


def resonance_frequency(l, omega_m, omega_c):
    """Transverse drive frequency at which the ``l``-th process is resonant."""
    return omega_c - l * omega_m


def _bessel_weights(l_values, x):
    n = int(np.max(np.abs(l_values)))
    j = bessel_j_orders(n, x)
    out = j[np.abs(l_values)]
    odd_negative = (l_values < 0) & (np.abs(l_values) % 2 == 1)
    out[odd_negative] *= -1.0
    return out


def spectral_map(omega_mw, drive, damping, l_max=L_MAX_DEFAULT, l_values=None):
    """Sideband intensity ``|P_+|^2`` over pump frequency and sideband order.

    Rows are sideband orders ``l`` and columns are pump frequencies
    ``omega_mw``; cell ``(l, j)`` is the line emitted at the analyzer
    frequency ``omega_SA = omega_mw[j] + l * omega_m`` (stored in
    ``metadata["omega_sa"]``).  ``drive.omega`` is ignored.
    """
    omega_mw = as_axis(omega_mw, "omega_mw grid")
    if l_values is None:
        if int(l_max) < 0:
            raise InvalidParameterError("l_max must be non-negative")
        l_values = np.arange(-int(l_max), int(l_max) + 1)
    l_values = np.asarray(l_values, dtype=int)
    if l_values.size == 0:
        raise InvalidParameterError("sideband order range is empty")
    zeta = _bessel_weights(l_values, modulation_index(drive))
    omega_d = omega_mw[None, :] + l_values[:, None] * drive.omega_m - drive.omega_c
    amp = _amplitude(drive.omega_1, zeta[:, None], omega_d, damping)
    intensity = np.abs(amp) ** 2
    return FieldMap(
        values=intensity,
        rows=l_values.astype(float),
        cols=omega_mw,
        row_name="l",
        col_name="omega_mw",
        value_name="intensity",
        metadata={"omega_sa": omega_mw[None, :] + l_values[:, None] * drive.omega_m,
                  "zeta": zeta},
    )


def intensity_db(values, floor=1e-30):
    """``10 log10`` of an intensity with an arbitrary reference of 1."""
    return 10.0 * np.log10(np.maximum(values, floor))


class LZSSpectrum(BaseEstimator):
    """Estimator-style wrapper around the sideband model.

    ``fit`` validates the parameters and caches the Bessel weights; ``predict``
    maps rows ``(omega, l)`` to complex ``P_+``; ``transform`` maps a column of
    pump frequencies to the ``(n_freq, 2 l_max + 1)`` intensity matrix.

    Parameters
    ----------
    omega_1, omega_c, omega_b, omega_m, gamma_1, gamma_2 : float
        Angular frequencies and rates [rad/s].
    """

    def __init__(self, omega_1=2 * np.pi * 0.5e6, omega_c=2 * np.pi * 2.305e9,
                 omega_b=2 * np.pi * 0.5e6, omega_m=2 * np.pi * 0.5e6,
                 gamma_1=2 * np.pi * 1.0e6, gamma_2=2 * np.pi * 2.0e6, p_zs=1.0,
                 l_max=L_MAX_DEFAULT):
        self.omega_1 = omega_1
        self.omega_c = omega_c
        self.omega_b = omega_b
        self.omega_m = omega_m
        self.gamma_1 = gamma_1
        self.gamma_2 = gamma_2
        self.p_zs = p_zs
        self.l_max = l_max

    def fit(self, X=None, y=None):
        self.drive_ = LzsDrive(self.omega_1, self.omega_c, self.omega_c,
                               self.omega_b, self.omega_m)
        self.damping_ = DampingParams(self.gamma_1, self.gamma_2, self.p_zs)
        self.orders_ = np.arange(-int(self.l_max), int(self.l_max) + 1)
        self.zeta_ = _bessel_weights(self.orders_, modulation_index(self.drive_))
        return self

    def predict(self, X):
        check_is_fitted(self, "zeta_")
        X = check_array(X, ensure_min_features=2)
        omega, l = X[:, 0], np.rint(X[:, 1]).astype(int)
        zeta = _bessel_weights(l, modulation_index(self.drive_))
        omega_d = omega + l * self.omega_m - self.omega_c
        return _amplitude(self.omega_1, zeta, omega_d, self.damping_)

    def transform(self, X):
        check_is_fitted(self, "zeta_")
        X = check_array(X, ensure_2d=False).ravel()
        return spectral_map(X, self.drive_, self.damping_, l_values=self.orders_).values.T
