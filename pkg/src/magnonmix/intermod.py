"""Intermodulation conversion gain of the pumped Kerr resonator.

A weak signal at ``omega_p + omega`` is converted into an idler at
``omega_p - omega``.  In linear response around a stable fixed point the
conversion gain is

    G_I = |2 gamma_1 W2 / ((lambda_1 - i omega)(lambda_2 - i omega))|^2.

Pump powers in dBm are mapped onto model amplitudes through a single
calibration anchor: the measured power at the bistability onset.
"""
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._errors import InvalidParameterError
from .grids import FieldMap, as_axis
from .kerr import (NODE, SPIRAL, KerrParams, _energies_batch, eigenvalues, find_bop,
                   linearize, steady_amplitude)
from .lzs import intensity_db
from .units import TWO_PI

#: Pump frequencies of the three measured gain surfaces [rad/s].
FIG_PUMP_FREQUENCIES = tuple(TWO_PI * f for f in (3.8674e9, 3.8704e9, 3.8734e9))


@dataclass(frozen=True)
class GainQuery:
    omega: float
    W2: complex
    lambda_1: complex
    lambda_2: complex
    gamma_1: float


@dataclass(frozen=True)
class PumpCalibration:
    """Anchor of the dBm -> amplitude and frequency -> detuning maps.

    Parameters
    ----------
    p_bop_dbm : float
        Measured pump power at the bistability onset [dBm].
    delta_bop_measured : float
        Measured pump detuning ``omega_c - omega_p`` at the onset [rad/s].
    omega_c : float
        Resonance frequency the pump frequencies are referred to [rad/s].
    """

    p_bop_dbm: float = 0.4
    delta_bop_measured: float = TWO_PI * 1.3e6
    omega_c: float = TWO_PI * 3.8750e9

    def __post_init__(self):
        if not np.isfinite(self.p_bop_dbm):
            raise InvalidParameterError("p_bop_dbm must be finite")
        if not (np.isfinite(self.delta_bop_measured) and self.delta_bop_measured != 0):
            raise InvalidParameterError("delta_bop_measured must be finite and non-zero")
        if not self.omega_c > 0:
            raise InvalidParameterError("omega_c must be positive")


def intermod_gain(omega, W2, lambda_1, lambda_2, gamma_1):
    """Conversion gain ``G_I`` (vectorized over ``omega``)."""
    omega = np.asarray(omega, dtype=float)
    den = (lambda_1 - 1j * omega) * (lambda_2 - 1j * omega)
    return np.abs(2 * gamma_1 * W2 / den) ** 2


def gain_for_query(q):
    return intermod_gain(q.omega, q.W2, q.lambda_1, q.lambda_2, q.gamma_1)


def gain_at(omega, fp, verdict, gamma_1):
    """``G_I`` at a classified fixed point."""
    return intermod_gain(omega, fp.W2, verdict.lambda_1, verdict.lambda_2, gamma_1)


def power_to_amplitude(p_dbm, cal, p):
    """Pump amplitude ``b`` for a power in dBm.

    ``|b|^2 = b_BOP^2 10^((P - P_BOP)/10)``: the power is linear in ``|b|^2``
    and the calibration power lands on the model onset amplitude.
    """
    bop = find_bop(p)
    return bop.b * 10.0 ** ((np.asarray(p_dbm, dtype=float) - cal.p_bop_dbm) / 20.0)


def amplitude_to_power(b, cal, p):
    bop = find_bop(p)
    with np.errstate(divide="ignore"):
        return cal.p_bop_dbm + 20.0 * np.log10(np.abs(b) / bop.b)


def model_detuning(omega_p, cal, p):
    """Model detuning for a pump frequency.

    The measured detuning ``omega_c - omega_p`` is rescaled so that the
    measured onset detuning coincides with the model onset.
    """
    bop = find_bop(p)
    return (cal.omega_c - np.asarray(omega_p, dtype=float)) * bop.delta / cal.delta_bop_measured


def _lower_turning_energy(p):
    """Smallest positive root of ``d/dE [(D+KE)^2 + (g+g3 E)^2] E``, or NaN."""
    K, g3, g, D = p.kerr, p.gamma_3, p.gamma, p.delta
    a, b, c = 3 * (K**2 + g3**2), 4 * (K * D + g3 * g), D**2 + g**2
    if a == 0:
        return np.nan
    disc = b * b - 4 * a * c
    if disc <= 0:
        return np.nan
    r = (-b - np.sqrt(disc)) / (2 * a)
    return r if r > 0 else np.nan


def _drive_for_energy(E, p):
    """``|b|`` placing a fixed point at ``E``."""
    f = ((p.delta + p.kerr * E) ** 2 + (p.gamma + p.gamma_3 * E) ** 2) * E
    return np.sqrt(f / (2 * p.gamma_1))


def bifurcation_energy(p):
    """Energy of the spiral -> node transition on the lower branch, or NaN.

    ``upsilon^2 = (K^2 + g3^2) E^2 - (D + 2 K E)^2`` changes sign there.
    """
    K, g3, D = p.kerr, p.gamma_3, p.delta
    a, b, c = K**2 + g3**2 - 4 * K**2, -4 * K * D, -D**2
    roots = np.roots([a, b, c]) if a != 0 else np.array([-c / b]) if b != 0 else np.array([])
    roots = np.sort(roots[np.isreal(roots)].real)
    roots = roots[roots > 0]
    limit = _lower_turning_energy(p)
    if np.isfinite(limit):
        roots = roots[roots < limit]
    return float(roots[0]) if roots.size else float("nan")


@dataclass
class GainSurface:
    """Gain map ``G_I`` [dB] over (pump power, signal detuning)."""

    field: FieldMap
    powers: np.ndarray  # [dBm]
    omega: np.ndarray  # [rad/s]
    energy: np.ndarray  # followed branch
    kinds: np.ndarray
    im_lambda: np.ndarray  # +Im lambda_1 along the branch
    re_lambda: np.ndarray  # (n_p, 2)
    delta: float
    bifurcation_power: float  # spiral -> node on the followed branch [dBm]
    jump_power: float  # saddle-node at the end of the lower branch [dBm]
    jump_index: int  # first grid row on the post-jump branch, -1 if none
    diagnostics: list = field(default_factory=list)

    @property
    def overlay(self):
        """``(+Im lambda_1, Im lambda_2)`` while the followed point is a spiral.

        Zero once the spiral has turned into a node; NaN after the jump.
        """
        im = np.where(self.kinds == SPIRAL, self.im_lambda, 0.0)
        if self.jump_index >= 0:
            im = im.astype(float)
            im[self.jump_index:] = np.nan
        return im, -im


def follow_branch(delta, b, p):
    """Forward sweep in ``b``: the root closest in ``E`` to the previous one.

    The middle root of a bistable triple (the saddle) is never followed.
    Returns the energies, the first row after the followed lower branch
    vanished (-1 if it never did) and the root counts.
    """
    roots = _energies_batch(np.full(b.size, float(delta)), b, p)
    n_roots = np.sum(~np.isnan(roots), axis=1)
    E = np.empty(b.size)
    jump = -1
    on_low = True
    for k in range(b.size):
        row = roots[k][~np.isnan(roots[k])]
        if row.size == 3:
            row = row[[0, 2]]
        pick = 0 if k == 0 else int(np.argmin(np.abs(row - E[k - 1])))
        if k > 0 and on_low and n_roots[k - 1] == 3 and n_roots[k] == 1:
            jump, on_low = k, False
        elif row.size == 2:
            on_low = pick == 0
        E[k] = row[pick]
    return E, jump, n_roots


def gain_surface(omega, powers, omega_p, cal, p, mask_width=None):
    """``G_I`` [dB] over signal detuning ``omega`` and pump power (dBm).

    The operating point is followed upward in power from the lowest one,
    as in a forward power sweep.  ``mask_width`` blanks ``|omega| <
    mask_width`` with NaN (the pump region is not measurable).
    """
    omega = as_axis(omega, "omega")
    powers = as_axis(powers, "powers")
    if np.any(np.diff(powers) < 0):
        raise InvalidParameterError("powers must increase for a forward sweep")
    delta = float(model_detuning(omega_p, cal, p))
    q = p.replace(delta=delta)
    b = power_to_amplitude(powers, cal, p)
    E, jump, n_roots = follow_branch(delta, b, q)

    G = np.empty((powers.size, omega.size))
    kinds = np.empty(powers.size, dtype=object)
    im_lam = np.empty(powers.size)
    re_lam = np.empty((powers.size, 2))
    diagnostics = []
    for k in range(powers.size):
        qk = q.replace(b=float(b[k]))
        B = steady_amplitude(E[k], qk)
        W1, W2 = linearize(B, qk)
        v = eigenvalues(W1, W2, scale=q.gamma)
        kinds[k] = v.kind
        im_lam[k] = v.lambda_1.imag
        re_lam[k] = v.lambda_1.real, v.lambda_2.real
        if not v.is_stable:
            diagnostics.append(f"row {k} (P={powers[k]:g} dBm): followed point is {v.kind}")
        G[k] = intermod_gain(omega, W2, v.lambda_1, v.lambda_2, q.gamma_1)
    G_db = intensity_db(G)
    if mask_width:
        G_db[:, np.abs(omega) < mask_width] = np.nan

    E_bif = bifurcation_energy(q)
    P_bif = float(amplitude_to_power(_drive_for_energy(E_bif, q), cal, p)) if np.isfinite(E_bif) else float("nan")
    E_turn = _lower_turning_energy(q)
    P_jump = float(amplitude_to_power(_drive_for_energy(E_turn, q), cal, p)) if np.isfinite(E_turn) else float("nan")
    fm = FieldMap(G_db, powers, omega, "P_p_dBm", "omega_rad_per_s", "G_I_dB",
                  metadata={"omega_p": float(omega_p), "delta": delta})
    return GainSurface(
        field=fm, powers=powers, omega=omega, energy=E, kinds=kinds, im_lambda=im_lam,
        re_lambda=re_lam, delta=delta, bifurcation_power=P_bif, jump_power=P_jump,
        jump_index=int(jump), diagnostics=diagnostics,
    )


def ridge_positions(surface):
    """``|omega|`` of the gain maximum in each row (positive half-axis)."""
    pos = surface.omega >= 0
    w = surface.omega[pos]
    vals = np.nan_to_num(surface.field.values[:, pos], nan=-np.inf)
    return w[np.argmax(vals, axis=1)]


class IntermodGain(RegressorMixin, BaseEstimator):
    """Estimator wrapper: ``predict`` maps rows ``(omega, P_p[dBm])`` to ``G_I``.

    ``fit`` stores the model onset and the model detuning of ``omega_p``.
    Each prediction uses the fixed point of a forward sweep from low power,
    so rows are classified independently of their order.
    """

    def __init__(self, omega_p=FIG_PUMP_FREQUENCIES[1], gamma_1=TWO_PI * 0.5e6,
                 gamma_2=TWO_PI * 0.5e6, kerr=-TWO_PI * 2e-9, gamma_3=0.0,
                 p_bop_dbm=0.4, delta_bop_measured=TWO_PI * 1.3e6, omega_c=TWO_PI * 3.8750e9):
        self.omega_p = omega_p
        self.gamma_1 = gamma_1
        self.gamma_2 = gamma_2
        self.kerr = kerr
        self.gamma_3 = gamma_3
        self.p_bop_dbm = p_bop_dbm
        self.delta_bop_measured = delta_bop_measured
        self.omega_c = omega_c

    def fit(self, X=None, y=None):
        self.params_ = KerrParams(delta=0.0, gamma_1=self.gamma_1, gamma_2=self.gamma_2,
                                  kerr=self.kerr, gamma_3=self.gamma_3)
        self.calibration_ = PumpCalibration(self.p_bop_dbm, self.delta_bop_measured, self.omega_c)
        self.bop_ = find_bop(self.params_)
        self.delta_ = float(model_detuning(self.omega_p, self.calibration_, self.params_))
        return self

    def _operating_point(self, p_dbm):
        q = self.params_.replace(delta=self.delta_)
        b_target = float(power_to_amplitude(p_dbm, self.calibration_, self.params_))
        E_turn = _lower_turning_energy(q)
        roots = _energies_batch(np.array([self.delta_]), np.array([b_target]), q)[0]
        roots = roots[~np.isnan(roots)]
        if roots.size == 3 and np.isfinite(E_turn):
            # forward sweep: still on the lower branch below the turning point
            E = roots[0] if b_target < _drive_for_energy(E_turn, q) else roots[-1]
        else:
            E = roots[0]
        qk = q.replace(b=b_target)
        W1, W2 = linearize(steady_amplitude(E, qk), qk)
        return W2, eigenvalues(W1, W2, scale=q.gamma)

    def predict(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X, ensure_min_features=2)
        out = np.empty(X.shape[0])
        for k, (w, P) in enumerate(X[:, :2]):
            W2, v = self._operating_point(P)
            out[k] = intermod_gain(w, W2, v.lambda_1, v.lambda_2, self.gamma_1)
        return out
