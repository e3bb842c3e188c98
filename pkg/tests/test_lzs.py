import numpy as np
import pytest
from hypothesis import given, strategies as st

from magnonmix._errors import InvalidParameterError
from magnonmix.bessel import bessel_jl
from magnonmix.bloch import DampingParams, LzsDrive
from magnonmix.lzs import (LZSSpectrum, SidebandQuery, intensity_db, resonance_frequency,
                           sideband_amplitude, spectral_map)

MHZ = 2 * np.pi * 1e6
WC = 2305 * MHZ
FIG2 = LzsDrive(0.5 * MHZ, WC, WC, 0.5 * MHZ, 0.5 * MHZ)
DAMP = DampingParams(1.0 * MHZ, 2.0 * MHZ)


def test_unmodulated_has_no_sidebands():
    d = FIG2.replace(omega_b=0.0)
    for l in (-2, 1, 3):
        r = sideband_amplitude(l, d.replace(omega=WC - l * d.omega_m), DAMP)
        assert r.zeta == 0.0 and r.P_plus == 0.0


def test_weak_drive_limit():
    d = FIG2.replace(omega_b=0.0, omega_1=1e-6 * MHZ)
    r = sideband_amplitude(0, d, DAMP)
    # linear response of the transverse polarization: i omega_1 P_zs / Gamma_2
    expected = 1j * d.omega_1 / DAMP.gamma_2
    assert r.P_plus == pytest.approx(expected, rel=1e-12)


def test_query_form():
    a = sideband_amplitude(SidebandQuery(1, FIG2, DAMP))
    b = sideband_amplitude(1, FIG2, DAMP)
    assert a == b
    assert b.omega_d == pytest.approx(FIG2.omega_m)
    assert b.zeta == pytest.approx(bessel_jl(1, 1.0))


def test_modulation_without_frequency():
    class D:
        omega_1, omega, omega_c, omega_b, omega_m = 1.0, 1.0, 1.0, 1.0, 0.0
    with pytest.raises(InvalidParameterError):
        sideband_amplitude(0, D, DAMP)


def test_resonance_frequency():
    assert resonance_frequency(0, 0.5 * MHZ, WC) == WC
    assert resonance_frequency(1, 0.5 * MHZ, WC) / MHZ == pytest.approx(2304.5)
    assert resonance_frequency(-2, 0.5 * MHZ, WC) / MHZ == pytest.approx(2306.0)


@given(st.integers(-4, 4), st.floats(0, 20))
def test_peak_on_resonance(l, u):
    d = FIG2.replace(omega=WC - l * FIG2.omega_m)
    peak = abs(sideband_amplitude(l, d, DAMP).P_plus)
    off = abs(sideband_amplitude(l, d.replace(omega=d.omega + u * MHZ), DAMP).P_plus)
    assert off <= peak * (1 + 1e-12)


def test_weak_drive_lorentzian_even():
    w1 = 1e-3 * DAMP.gamma_2 / bessel_jl(1, 1.0)
    d = FIG2.replace(omega_1=w1)
    for u in (0.3, 1.0, 4.0):
        plus = abs(sideband_amplitude(1, d.replace(omega=WC - d.omega_m + u * MHZ), DAMP).P_plus) ** 2
        minus = abs(sideband_amplitude(1, d.replace(omega=WC - d.omega_m - u * MHZ), DAMP).P_plus) ** 2
        assert abs(plus - minus) / plus < 1e-6


def test_saturation_maximum():
    # |P_+| on resonance peaks where omega_1 zeta / Gamma_2 = sqrt(Gamma_1 / Gamma_2)
    zeta = bessel_jl(0, 1.0)
    x = np.linspace(0.05, 3, 20001)
    amp = [abs(sideband_amplitude(0, FIG2.replace(omega_1=v * DAMP.gamma_2 / zeta), DAMP).P_plus) for v in x]
    x_star = x[int(np.argmax(amp))]
    assert x_star == pytest.approx(np.sqrt(DAMP.gamma_1 / DAMP.gamma_2), abs=2e-4)
    slope = np.diff(amp)
    assert slope[0] > 0 and slope[-1] < 0


def test_map_unmodulated_single_ridge():
    grid = np.linspace(2302, 2308, 121) * MHZ
    fm = spectral_map(grid, FIG2.replace(omega_b=0.0), DAMP)
    assert np.all(fm.values[fm.rows != 0] == 0)
    assert np.all(fm.values[fm.rows == 0] > 0)
    assert np.allclose(fm.metadata["omega_sa"][fm.rows == 0], grid)


def test_map_ridges_at_resonance():
    grid = np.linspace(2302, 2308, 601) * MHZ
    fm = spectral_map(grid, FIG2, DAMP)
    step = grid[1] - grid[0]
    for i, l in enumerate(fm.rows.astype(int)):
        if abs(l) <= 3:
            assert abs(grid[np.argmax(fm.values[i])] - resonance_frequency(l, FIG2.omega_m, WC)) <= step


def test_map_ridge_ordering_weak_drive():
    d = FIG2.replace(omega_1=1e-4 * MHZ)
    grid = np.array([resonance_frequency(l, d.omega_m, WC) for l in range(-3, 4)])[::-1]
    fm = spectral_map(grid, d, DAMP, l_values=range(-3, 4))
    peaks = fm.values.max(axis=1)
    weights = np.array([bessel_jl(l, 1.0) ** 2 for l in range(-3, 4)])
    assert np.array_equal(np.argsort(peaks), np.argsort(weights))


def test_map_matches_direct():
    grid = np.linspace(2303, 2307, 41) * MHZ
    fm = spectral_map(grid, FIG2, DAMP, l_max=3)
    for i, l in enumerate(fm.rows.astype(int)):
        for j in (0, 17, 40):
            direct = abs(sideband_amplitude(l, FIG2.replace(omega=grid[j]), DAMP).P_plus) ** 2
            assert fm.values[i, j] == pytest.approx(direct, rel=1e-12)


def test_map_errors():
    with pytest.raises(InvalidParameterError):
        spectral_map([], FIG2, DAMP)
    with pytest.raises(InvalidParameterError):
        spectral_map([3.0, 1.0, 2.0], FIG2, DAMP)


def test_intensity_db():
    assert intensity_db(np.array([1.0, 10.0]))[1] == pytest.approx(10.0)
    assert np.isfinite(intensity_db(np.array([0.0]))).all()


def test_estimator(yig=None):
    est = LZSSpectrum().fit()
    assert est.get_params()["l_max"] == 8
    X = np.array([[WC - FIG2.omega_m, 1], [WC, 0]])
    pred = est.predict(X)
    assert pred[0] == pytest.approx(sideband_amplitude(1, FIG2.replace(omega=WC - FIG2.omega_m), DAMP).P_plus)
    assert est.transform(np.linspace(2304, 2306, 5) * MHZ).shape == (5, 17)
