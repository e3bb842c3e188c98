"""Physical constants, unit conversions and material-derived quantities.

All quantities are SI internally and every frequency is angular [rad/s].
Conversions to conventional units (GHz, MHz, dBm, um) happen only at the
boundary (configuration parsing and emitted tables).
"""
from dataclasses import dataclass, asdict
from importlib import resources
import math

import yaml

from ._errors import InvalidParameterError

TWO_PI = 2.0 * math.pi

#: Gyromagnetic ratio [Hz/T].
GAMMA_E_HZ = 28e9
#: Gyromagnetic ratio in angular units [rad/s/T].
GAMMA_E = TWO_PI * GAMMA_E_HZ
#: Vacuum permeability [N/A^2].
MU_0 = 4e-7 * math.pi
#: Reduced Planck constant [J s].
HBAR = 1.054571817e-34


@dataclass(frozen=True)
class PhysicalConstants:
    gamma_e: float = GAMMA_E_HZ
    mu_0: float = MU_0
    hbar: float = HBAR


@dataclass(frozen=True)
class MaterialParams:
    """Single-crystal sphere material.

    Parameters
    ----------
    M_s : float
        Saturation magnetization [A/m].
    K_c1, K_c2 : float
        First- and second-order cubic anisotropy constants [J/m^3].
    rho_s : float
        Spin density [1/m^3].
    R_s : float
        Sphere radius [m].
    """

    M_s: float
    K_c1: float
    K_c2: float
    rho_s: float
    R_s: float
    name: str = ""

    def __post_init__(self):
        for field in ("M_s", "rho_s", "R_s"):
            value = getattr(self, field)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{field} must be positive and finite, got {value!r}")
        for field in ("K_c1", "K_c2"):
            if not math.isfinite(getattr(self, field)):
                raise InvalidParameterError(f"{field} must be finite")

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return MaterialParams(**values)


@dataclass(frozen=True)
class DerivedQuantities:
    V_s: float
    N_s: float
    omega_K1: float
    K_M: float
    Q_M: float


@dataclass(frozen=True)
class RegimeReport:
    hp_ratio: float
    quartic_ratio: float
    quartic_bound: float
    onset_magnons: float


def sphere_volume(radius):
    return 4.0 * math.pi * radius**3 / 3.0


def quartic_angle_factor(phi=0.0):
    """Angular factor ``cos(phi)**4`` of the quartic coefficient.

    ``phi`` is the tilt of the easy axis from the static field.  Only the
    leading ``(Sigma . u_A)**4`` term is kept, so ``phi = 0`` reproduces the
    bare estimate.
    """
    return math.cos(phi) ** 4


def derive_quantities(mat, phi=0.0):
    """Volume, spin count, anisotropy frequency, Kerr and quartic coefficients.

    The Kerr frequency is ``K_M = hbar * gamma_e**2 * K_c1 / (V_s * M_s**2)``
    with ``gamma_e`` in rad/s/T, and the quartic coefficient is the
    order-of-magnitude estimate ``(K_c2/K_c1) * K_M**2 / omega_K1``.
    """
    if not (mat.R_s > 0 and mat.rho_s > 0):
        raise InvalidParameterError("radius and spin density must be positive")
    V_s = sphere_volume(mat.R_s)
    N_s = V_s * mat.rho_s
    omega_K1 = V_s * mat.K_c1 / HBAR
    K_M = HBAR * GAMMA_E**2 * mat.K_c1 / (V_s * mat.M_s**2)
    if mat.K_c1 == 0.0:
        Q_M = 0.0
    else:
        Q_M = quartic_angle_factor(phi) * (mat.K_c2 / mat.K_c1) * K_M**2 / omega_K1
    return DerivedQuantities(V_s=V_s, N_s=N_s, omega_K1=omega_K1, K_M=K_M, Q_M=Q_M)


def kittel_frequency(H):
    """Kittel-mode angular frequency ``mu_0 * gamma_e * H`` for a field H [A/m]."""
    if not H >= 0:
        raise InvalidParameterError(f"applied field must be non-negative, got {H!r}")
    return MU_0 * GAMMA_E * H


def field_for_frequency(omega_c):
    """Inverse of :func:`kittel_frequency`; returns H [A/m]."""
    if not omega_c >= 0:
        raise InvalidParameterError("frequency must be non-negative")
    return omega_c / (MU_0 * GAMMA_E)


def regime_report(dq, mat, gamma_c):
    """Dimensionless validity ratios of the Duffing-Kerr reduction.

    ``hp_ratio`` checks the Holstein-Primakoff truncation, ``quartic_ratio``
    and ``quartic_bound`` check that the quartic term is negligible near the
    bistability onset, and ``onset_magnons`` is the magnon number there.
    """
    if dq.K_M == 0.0:
        raise ZeroDivisionError("Kerr frequency is zero; regime ratios are undefined")
    if gamma_c < 0:
        raise InvalidParameterError("gamma_c must be non-negative")
    K = abs(dq.K_M)
    ratio_c = abs(mat.K_c2 / mat.K_c1)
    return RegimeReport(
        hp_ratio=gamma_c / (K * dq.N_s),
        quartic_ratio=ratio_c * gamma_c**2 / (abs(dq.omega_K1) * K),
        quartic_bound=abs(dq.Q_M) * gamma_c**2 / K**3,
        onset_magnons=gamma_c / K,
    )


def estimate_magnon_number(P_p, omega_c, gamma_c):
    """Critically-coupled magnon number ``P_p / (hbar * omega_c * gamma_c)``."""
    if omega_c == 0 or gamma_c == 0:
        raise ZeroDivisionError("omega_c and gamma_c must be non-zero")
    if omega_c < 0 or gamma_c < 0 or P_p < 0:
        raise InvalidParameterError("power, omega_c and gamma_c must be non-negative")
    return P_p / (HBAR * omega_c * gamma_c)


def dbm_to_watt(p_dbm):
    """``P[W] = 10**((dBm - 30)/10)``; -inf maps to 0."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_watt):
    if p_watt <= 0:
        return -math.inf
    return 10.0 * math.log10(p_watt) + 30.0


def hz_to_rad(f):
    return TWO_PI * f


def rad_to_hz(omega):
    return omega / TWO_PI


PRESETS = {"YIG-297K": "yig-297k.yaml", "YIG-4.2K": "yig-4.2k.yaml"}


def available_presets():
    return sorted(PRESETS)


def load_preset(name):
    """Load a shipped material preset by name (e.g. ``"YIG-297K"``)."""
    try:
        filename = PRESETS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown material preset {name!r}; available: {', '.join(available_presets())}"
        ) from None
    text = resources.files(__package__).joinpath("presets", filename).read_text()
    return material_from_mapping(yaml.safe_load(text), name=name)


def material_from_mapping(data, name=""):
    """Build :class:`MaterialParams` from conventional-unit keys.

    Keys: ``M_s_kA_per_m``, ``K_c1_J_per_m3``, ``K_c2_over_K_c1`` (or
    ``K_c2_J_per_m3``), ``rho_s_per_cm3``, ``R_s_um``.
    """
    data = dict(data)
    K_c1 = float(data.pop("K_c1_J_per_m3"))
    if "K_c2_over_K_c1" in data:
        K_c2 = float(data.pop("K_c2_over_K_c1")) * K_c1
        data.pop("K_c2_J_per_m3", None)
    else:
        K_c2 = float(data.pop("K_c2_J_per_m3", 0.0))
    mat = MaterialParams(
        M_s=float(data.pop("M_s_kA_per_m")) * 1e3,
        K_c1=K_c1,
        K_c2=K_c2,
        rho_s=float(data.pop("rho_s_per_cm3")) * 1e6,
        R_s=float(data.pop("R_s_um")) * 1e-6,
        name=str(data.pop("name", name)),
    )
    data.pop("description", None)
    if data:
        raise InvalidParameterError(f"unknown material keys: {', '.join(sorted(data))}")
    return mat
