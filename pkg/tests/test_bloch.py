import numpy as np
import pytest
from hypothesis import given, strategies as st

from magnonmix.bloch import (BlochState, DampingParams, LzsDrive, bloch_rhs, drive_vector,
                             equilibrium, integrate, trajectory_csv)
from magnonmix._errors import InvalidParameterError

TWO_PI = 2 * np.pi
vec = st.lists(st.floats(-10, 10), min_size=3, max_size=3).map(np.array)


def test_drive_vector():
    d = LzsDrive(omega_1=2.0, omega=5.0, omega_c=30.0, omega_b=3.0, omega_m=1.5)
    assert np.allclose(drive_vector(0.0, d), [2.0, 0.0, 30.0])
    assert drive_vector(np.pi / (2 * 1.5), d)[2] == pytest.approx(33.0)
    flat = d.replace(omega_b=0.0)
    assert all(drive_vector(t, flat)[2] == 30.0 for t in (0.1, 1.7, 9.0))


def test_rhs_examples():
    dp = DampingParams(1.0, 2.0, 0.7)
    assert np.allclose(bloch_rhs([0, 0, 0.7], [0, 0, 5.0], dp), 0.0)
    free = DampingParams(1.0, 1e-300, 1.0)
    assert np.allclose(bloch_rhs([1.0, 0, 1.0], [0, 0, 5.0], free), [0.0, -5.0, 0.0])
    assert np.allclose(bloch_rhs([0.3, 0, 0.7], [0, 0, 0], dp), [-0.6, 0.0, 0.0])


@given(vec, vec, vec, st.floats(-3, 3), st.floats(-3, 3))
def test_rhs_affine(P1, P2, Om, a, b):
    dp = DampingParams(0.4, 1.3, 0.8)
    offset = bloch_rhs(np.zeros(3), Om, dp)
    lhs = bloch_rhs(a * P1 + b * P2, Om, dp) - offset
    rhs = a * (bloch_rhs(P1, Om, dp) - offset) + b * (bloch_rhs(P2, Om, dp) - offset)
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_rhs_matches_cross_product():
    rng = np.random.default_rng(1)
    dp = DampingParams(0.4, 1.3, 0.8)
    P, Om = rng.normal(size=(2, 50, 3))
    expected = np.cross(P, Om) + np.stack([-1.3 * P[:, 0], -1.3 * P[:, 1], -0.4 * (P[:, 2] - 0.8)], -1)
    assert np.allclose(bloch_rhs(P, Om, dp), expected, atol=1e-14)


def test_longitudinal_relaxation():
    dp = DampingParams(TWO_PI * 1e6, TWO_PI * 2e6)
    d = LzsDrive(0.0, 0.0, TWO_PI * 20e6)
    t = np.linspace(0, 2e-6, 201)
    tr = integrate(BlochState(np.zeros(3)), d, dp, 2e-6, rel_tol=1e-10, t_eval=t, frame="lab")
    assert np.allclose(tr.P[:, 2], 1 - np.exp(-dp.gamma_1 * t), rtol=1e-8, atol=1e-10)


def test_precession_decay():
    dp = DampingParams(TWO_PI * 1e6, TWO_PI * 2e6)
    wc = TWO_PI * 20e6
    d = LzsDrive(0.0, 0.0, wc)
    t = np.linspace(0, 1e-6, 401)
    tr = integrate(BlochState(np.array([1.0, 0.0, 1.0])), d, dp, 1e-6, rel_tol=1e-10, t_eval=t,
                   frame="lab")
    p = tr.P[:, 0] + 1j * tr.P[:, 1]
    assert np.allclose(p, np.exp(-dp.gamma_2 * t - 1j * wc * t), atol=1e-8)


def test_norm_conserved_without_damping():
    dp = DampingParams(1e-300, 1e-300, 0.0)
    d = LzsDrive(omega_1=3.0, omega=7.0, omega_c=10.0, omega_b=2.0, omega_m=1.0)
    P0 = np.array([0.6, 0.0, 0.8])
    tr = integrate(BlochState(P0), d, dp, 20.0, rel_tol=1e-11, frame="lab")
    assert np.max(np.abs(np.linalg.norm(tr.P, axis=1) - 1.0)) < 1e-8


def test_fixed_step_convergence():
    # closed-form relaxation; the propagated order is 5, so the ratio is at least 16
    dp = DampingParams(1.0, 2.0)
    d = LzsDrive(0.0, 0.0, 0.0)

    def err(h):
        tr = integrate(BlochState(np.zeros(3)), d, dp, 3.0, t_eval=[3.0], fixed_step=h)
        return abs(tr.P[-1, 2] - (1 - np.exp(-3.0)))

    assert err(0.2) / err(0.1) > 16


def test_steady_state_periodic():
    dp = DampingParams(TWO_PI * 1e6, TWO_PI * 2e6)
    wm = TWO_PI * 0.5e6
    d = LzsDrive(TWO_PI * 0.5e6, TWO_PI * 2.305e9, TWO_PI * 2.305e9, TWO_PI * 0.5e6, wm)
    T = TWO_PI / wm
    m = 64
    t = 30 * T + np.arange(2 * m + 1) * T / m
    tr = integrate(equilibrium(dp), d, dp, t[-1], rel_tol=1e-10, t_eval=t)
    scale = np.max(np.abs(tr.P))
    assert np.max(np.abs(tr.P[m:] - tr.P[:m + 1])) < 1e-6 * scale


def test_frames_agree():
    dp = DampingParams(TWO_PI * 1e6, TWO_PI * 2e6)
    d = LzsDrive(TWO_PI * 0.5e6, TWO_PI * 19.5e6, TWO_PI * 20e6, TWO_PI * 0.5e6, TWO_PI * 0.5e6)
    t = np.linspace(0, 2e-6, 401)
    rot = integrate(equilibrium(dp), d, dp, 2e-6, rel_tol=1e-10, t_eval=t)
    lab = integrate(equilibrium(dp), d, dp, 2e-6, rel_tol=1e-10, t_eval=t, frame="lab")
    assert np.max(np.abs(rot.transverse_rotating() - lab.transverse_rotating())) < 1e-6
    assert np.allclose(rot.P[:, 2], lab.P[:, 2], atol=1e-6)


def test_validation():
    with pytest.raises(InvalidParameterError):
        DampingParams(0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        LzsDrive(1.0, 1.0, 1.0, omega_b=1.0, omega_m=0.0)
    with pytest.raises(InvalidParameterError):
        integrate(equilibrium(DampingParams(1, 1)), LzsDrive(0, 0, 0), DampingParams(1, 1), -1.0)


def test_csv_header():
    dp = DampingParams(1.0, 2.0)
    tr = integrate(equilibrium(dp), LzsDrive(0.5, 0.0, 0.0), dp, 1.0, t_eval=[0.0, 0.5, 1.0])
    text = trajectory_csv(tr)
    lines = text.splitlines()
    assert "# damping.gamma_2=2.0" in lines
    assert lines[[i for i, l in enumerate(lines) if not l.startswith("#")][0]] == "t,P_x,P_y,P_z"
    assert len([l for l in lines if not l.startswith("#")]) == 4
