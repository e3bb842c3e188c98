"""Bloch-Landau-Lifshitz dynamics under transverse + longitudinally modulated drive.

``dP/dt = P x Omega + Gamma`` with damping
``Gamma = (-Gamma_2 P_x, -Gamma_2 P_y, -Gamma_1 (P_z - P_zs))``.

The cross product ``P x Omega`` precesses ``P`` clockwise about ``Omega``
(``P_+ = P_x + i P_y`` evolves as ``exp(-i omega_0 t)``).  The transverse
drive therefore rotates in the same sense, ``Omega_x + i Omega_y =
omega_1 exp(-i omega t)``, so that the resonance sits at positive
``omega = omega_c - l omega_m``.  ``sense=+1`` selects the opposite rotation.
"""
from dataclasses import dataclass, asdict
import io

import numpy as np

from ._errors import InvalidParameterError
from .integrate import solve


@dataclass(frozen=True)
class DampingParams:
    gamma_1: float
    gamma_2: float
    p_zs: float = 1.0

    def __post_init__(self):
        if not (self.gamma_1 > 0 and self.gamma_2 > 0):
            raise InvalidParameterError("gamma_1 and gamma_2 must be positive")


@dataclass(frozen=True)
class LzsDrive:
    """Drive parameters, all angular frequencies [rad/s]."""

    omega_1: float
    omega: float
    omega_c: float
    omega_b: float = 0.0
    omega_m: float = 0.0
    sense: int = -1

    def __post_init__(self):
        values = (self.omega_1, self.omega, self.omega_c, self.omega_b, self.omega_m)
        if not all(np.isfinite(values)):
            raise InvalidParameterError("drive parameters must be finite")
        if self.omega_b != 0.0 and not self.omega_m > 0:
            raise InvalidParameterError("omega_m must be positive when omega_b != 0")
        if self.sense not in (-1, 1):
            raise InvalidParameterError("sense must be -1 or +1")

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return LzsDrive(**values)

    def omega_0(self, t):
        return self.omega_c + self.omega_b * np.sin(self.omega_m * t)


@dataclass
class BlochState:
    P: np.ndarray
    t: float = 0.0


@dataclass
class Trajectory:
    t: np.ndarray
    P: np.ndarray  # (n, 3)
    frame: str
    drive: LzsDrive
    damping: DampingParams

    def transverse_rotating(self):
        """Complex transverse polarization in the frame rotating with the drive."""
        p = self.P[:, 0] + 1j * self.P[:, 1]
        if self.frame == "lab":
            p = p * np.exp(-1j * self.drive.sense * self.drive.omega * self.t)
        return p

    def to_csv(self):
        return trajectory_csv(self)


def drive_vector(t, d):
    """Rotation vector ``Omega(t)`` in the lab frame [rad/s]."""
    wt = d.omega * t
    return np.array([d.omega_1 * np.cos(wt), d.sense * d.omega_1 * np.sin(wt),
                     d.omega_0(t)])


def rotating_drive_vector(t, d):
    """``Omega`` seen in the frame co-rotating with the transverse drive."""
    return np.array([d.omega_1, 0.0, d.omega_0(t) + d.sense * d.omega])


def bloch_rhs(P, Omega, dp):
    """``P x Omega + Gamma``; broadcasts over leading axes of ``P``."""
    P = np.asarray(P, dtype=float)
    Omega = np.asarray(Omega, dtype=float)
    px, py, pz = P[..., 0], P[..., 1], P[..., 2]
    ox, oy, oz = Omega[..., 0], Omega[..., 1], Omega[..., 2]
    return np.stack([py * oz - pz * oy - dp.gamma_2 * px,
                     pz * ox - px * oz - dp.gamma_2 * py,
                     px * oy - py * ox - dp.gamma_1 * (pz - dp.p_zs)], axis=-1)


def equilibrium(dp):
    return BlochState(np.array([0.0, 0.0, dp.p_zs]), 0.0)


def integrate(initial, d, dp, t_end, rel_tol=1e-9, t_eval=None, frame="rotating",
              abs_tol=None, fixed_step=None, t_start=None):
    """Integrate the Bloch equation from ``initial`` to ``t_end``.

    Parameters
    ----------
    frame : {"rotating", "lab"}
        ``"rotating"`` integrates in the frame co-rotating with the transverse
        drive, which removes the carrier; the initial state and the returned
        samples are then expressed in that frame.
    t_eval : array_like, optional
        Uniform output grid; defaults to 32 samples per shortest period.
    """
    if frame not in ("rotating", "lab"):
        raise InvalidParameterError(f"unknown frame {frame!r}")
    if not t_end > 0:
        raise InvalidParameterError("t_end must be positive")
    t0 = initial.t if t_start is None else t_start
    if t_eval is None:
        t_eval = uniform_grid(d, t0, t_end, frame)
    omega_fn = rotating_drive_vector if frame == "rotating" else drive_vector

    def rhs(t, P):
        return bloch_rhs(P, omega_fn(t, d), dp)

    size = max(abs(dp.p_zs), float(np.max(np.abs(initial.P))), 1e-300)
    atol = rel_tol * size * 1e-2 if abs_tol is None else abs_tol
    rates = [abs(d.omega_1), abs(d.omega_m), dp.gamma_2, dp.gamma_1]
    if frame == "lab":
        rates += [abs(d.omega), abs(d.omega_c) + abs(d.omega_b)]
    max_step = 0.5 / max(rates) if fixed_step is None else np.inf
    sol = solve(rhs, (t0, t_end), np.asarray(initial.P, dtype=float), t_eval=t_eval,
                rtol=rel_tol, atol=atol, max_step=max_step, fixed_step=fixed_step)
    return Trajectory(sol.t, sol.y, frame, d, dp)


def uniform_grid(d, t0, t_end, frame="rotating", samples_per_period=32):
    periods = [abs(d.omega_m)]
    if frame == "lab":
        periods += [abs(d.omega), abs(d.omega_c)]
    fastest = max(periods)
    if fastest == 0:
        n = 1025
    else:
        n = int(np.ceil((t_end - t0) * fastest / (2 * np.pi) * samples_per_period)) + 1
    return np.linspace(t0, t_end, max(n, 2))


def trajectory_csv(traj):
    """CSV text with ``#`` key=value header lines and columns t,P_x,P_y,P_z."""
    buf = io.StringIO()
    meta = {"frame": traj.frame}
    meta.update({f"drive.{k}": v for k, v in asdict(traj.drive).items()})
    meta.update({f"damping.{k}": v for k, v in asdict(traj.damping).items()})
    for key, value in meta.items():
        buf.write(f"# {key}={value!r}\n" if isinstance(value, float) else f"# {key}={value}\n")
    buf.write("t,P_x,P_y,P_z\n")
    for t, (px, py, pz) in zip(traj.t, traj.P):
        buf.write(f"{float(t)!r},{float(px)!r},{float(py)!r},{float(pz)!r}\n")
    return buf.getvalue()
