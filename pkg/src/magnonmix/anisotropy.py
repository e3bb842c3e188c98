"""Stoner-Wohlfarth energy and the anisotropy Hamiltonian coefficients."""
from dataclasses import dataclass

import numpy as np

from ._errors import InvalidParameterError
from .units import GAMMA_E, HBAR, MU_0, sphere_volume


@dataclass(frozen=True)
class EasyAxis:
    u_A: tuple

    def __post_init__(self):
        u = np.asarray(self.u_A, dtype=float)
        if u.shape != (3,) or not np.all(np.isfinite(u)):
            raise InvalidParameterError("easy axis must be a finite 3-vector")
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise InvalidParameterError("easy axis must be a unit vector")

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if n == 0:
            raise InvalidParameterError("easy axis vector is zero")
        return cls(tuple(v / n))

    @property
    def u_plus(self):
        return (self.u_A[0] - 1j * self.u_A[1]) / 2

    @property
    def u_minus(self):
        return (self.u_A[0] + 1j * self.u_A[1]) / 2

    @property
    def u_z(self):
        return float(self.u_A[2])


Z_AXIS = EasyAxis((0.0, 0.0, 1.0))


@dataclass(frozen=True)
class AnisotropyState:
    phi: float  # magnetization to easy-axis angle [rad]
    M: float  # [A/m]
    H: float  # [A/m]


@dataclass(frozen=True)
class KerrHamiltonianCoefficients:
    """``hbar^-1 H_M = linear * Sigma_z / 2 + quadratic * (Sigma.u_A)^2
    + quartic * (Sigma.u_A)^4``."""

    linear: float
    quadratic: float
    quartic: float

    def number_hamiltonian(self, axis=Z_AXIS):
        """Coefficients ``(omega, K, Q)`` of ``omega N + K N^2 + Q N^4``.

        Uses ``Sigma . u_A ~ 2 N u_Az`` (transverse terms dropped), so the
        quadratic term picks up a factor ``4 u_Az^2`` and the quartic one
        ``16 u_Az^4``.
        """
        uz = axis.u_z
        return self.linear, 4 * self.quadratic * uz**2, 16 * self.quartic * uz**4


def stoner_wohlfarth_energy(st, mat, theta_MH=0.0):
    """Stoner-Wohlfarth energy ``E_M`` [J] of a fully magnetized sphere.

    ``E_M / V_s = -mu_0 M H cos(theta_MH) + K_c1 sin^2(phi) + K_c2 sin^4(phi)``.
    """
    s2 = np.sin(st.phi) ** 2
    density = -MU_0 * st.M * st.H * np.cos(theta_MH) + mat.K_c1 * s2 + mat.K_c2 * s2**2
    return sphere_volume(mat.R_s) * density


def energy_density(phi, mat, H=0.0, theta_MH=0.0):
    """Vectorized ``E_M / V_s`` [J/m^3] at ``M = M_s``."""
    s2 = np.sin(np.asarray(phi, dtype=float)) ** 2
    return -MU_0 * mat.M_s * H * np.cos(theta_MH) + mat.K_c1 * s2 + mat.K_c2 * s2**2


def kerr_hamiltonian_coefficients(mat, dq, omega_c=0.0):
    """Coefficients of the anisotropy Hamiltonian in terms of ``Sigma``.

    ``quadratic = (1 + 2 K_c2/K_c1) K_M / 4`` and
    ``quartic = (K_c2/K_c1) K_M^2 / (16 omega_K1)``; ``linear`` passes
    ``omega_c`` through.
    """
    if mat.K_c1 == 0.0:
        raise InvalidParameterError("K_c1 must be non-zero")
    r = mat.K_c2 / mat.K_c1
    return KerrHamiltonianCoefficients(
        linear=float(omega_c),
        quadratic=(1 + 2 * r) * dq.K_M / 4,
        quartic=r * dq.K_M**2 / (16 * dq.omega_K1),
    )


def angular_momentum(M_vec, mat):
    """Dimensionless angular momentum ``Sigma = -2 M V_s / (hbar gamma_e)``."""
    return -2 * np.asarray(M_vec, dtype=float) * sphere_volume(mat.R_s) / (HBAR * GAMMA_E)


def energy_scan(mat, n=181, H=0.0, theta_MH=0.0):
    """Sample ``E_M / V_s`` on ``phi in [0, pi]``."""
    phi = np.linspace(0.0, np.pi, int(n))
    return phi, energy_density(phi, mat, H, theta_MH)
