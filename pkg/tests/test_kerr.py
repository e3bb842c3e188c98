import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magnonmix._errors import InvalidParameterError
from magnonmix.integrate import solve
from magnonmix.kerr import (BOUNDARY, LINEAR_REGIME, NODE, REGION_LABELS, SADDLE, SPIRAL,
                            KerrParams, KerrStabilityClassifier, classify_point, cubic_residual,
                            eigenvalues, find_bop, fixed_point_energies, fixed_points, linearize,
                            principal_axes, real_jacobian, spiral_node_boundaries, stability_map,
                            theta_c)

from conftest import bistable, random_kerr


def test_theta_examples(kerr_unit):
    assert theta_c(0.0, kerr_unit) == 0
    p = kerr_unit.replace(b=0.3, phi_1=0.4)
    assert theta_c(0.0, p) == pytest.approx(1j * np.sqrt(2 * p.gamma_1) * np.exp(0.4j) * 0.3)


def test_linear_steady_state():
    p = KerrParams(delta=0.7, gamma_1=0.3, gamma_2=0.5, kerr=0.0, b=0.9, phi_1=0.2)
    C = -1j * np.sqrt(2 * p.gamma_1) * np.exp(1j * p.phi_1) * p.b / (1j * p.delta + p.gamma)
    assert abs(theta_c(C, p)) < 1e-12
    (fp,) = fixed_points(p)
    assert fp.E == pytest.approx(2 * p.gamma_1 * p.b**2 / (p.delta**2 + p.gamma**2), rel=1e-13)
    assert fp.B == pytest.approx(C, rel=1e-13)
    assert fp.W2 == 0 and fp.W1 == pytest.approx(1j * p.delta + p.gamma)


def test_undriven(kerr_unit):
    fps = fixed_points(kerr_unit)
    assert len(fps) == 1 and fps[0].E == 0.0
    assert fps[0].W1 == 1j * kerr_unit.delta + kerr_unit.gamma and fps[0].W2 == 0


def test_bistable_three_roots(kerr_unit):
    p = bistable(kerr_unit, -2.0, 1.8)
    E = fixed_point_energies(p)
    assert np.sum(np.isfinite(E)) == 3 and np.all(np.diff(E) > 0)
    assert np.all(cubic_residual(E, p) < 1e-10)
    # independent oracle: numpy's polynomial roots
    a3, a2, a1, a0 = ((p.kerr**2), 2 * p.kerr * p.delta, p.delta**2 + p.gamma**2, -2 * p.gamma_1 * p.b**2)
    ref = np.sort(np.roots([a3, a2, a1, a0]).real)
    assert np.allclose(E, ref, rtol=1e-9)


def _fd_jacobian(B, p, h=1e-6):
    s = h * max(abs(B), 1.0)
    dx = (theta_c(B + s, p) - theta_c(B - s, p)) / (2 * s)
    dy = (theta_c(B + 1j * s, p) - theta_c(B - 1j * s, p)) / (2 * s)
    return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy)


def test_linearize_finite_difference(kerr_unit):
    for fp in fixed_points(bistable(kerr_unit.replace(gamma_3=3e-3), -2.5, 1.3)):
        p = bistable(kerr_unit.replace(gamma_3=3e-3), -2.5, 1.3)
        W1, W2 = _fd_jacobian(fp.B, p)
        assert abs(W1 - fp.W1) <= 1e-6 * abs(fp.W1)
        assert abs(W2 - fp.W2) <= 1e-6 * abs(fp.W1)


def test_eigen_linear_regime():
    v = eigenvalues(0.5 + 2j, 0.0)
    assert v.lambda_1 == pytest.approx(0.5 + 2j) and v.lambda_2 == pytest.approx(0.5 - 2j)
    assert v.kind == SPIRAL


def test_eigen_orthogonal_and_parallel():
    v = eigenvalues(1.0, 0.4j)
    assert v.upsilon == pytest.approx(0.4) and v.alpha_W == pytest.approx(np.pi / 2)
    # upsilon = 0: |Im W1| = |W2|
    v = eigenvalues(1.0 + 0.6j, 0.6)
    assert abs(v.upsilon) < 1e-12 and v.alpha_W == pytest.approx(0.0, abs=1e-6)
    assert v.degenerate


@given(st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_eigen_identities(W1, W2):
    v = eigenvalues(W1, W2)
    scale = 1 + abs(W1) ** 2 + abs(W2) ** 2
    assert abs(v.lambda_1 + v.lambda_2 - v.T_W) <= 1e-12 * (1 + abs(v.T_W))
    assert abs(v.lambda_1 * v.lambda_2 - v.D_W) <= 1e-12 * scale
    lam = np.linalg.eigvals(real_jacobian(W1, W2))
    assert np.allclose(np.sort_complex(lam), np.sort_complex([v.lambda_1, v.lambda_2]),
                       atol=1e-9 * np.sqrt(scale))


def test_principal_axes():
    assert principal_axes(1.0, 0.0) is LINEAR_REGIME
    pa = principal_axes(2.0, 0.5)
    assert np.allclose(pa.W_prime, np.diag([2.5, 1.5]))
    W1, W2 = 1.2 + 0.7j, 0.9 * np.exp(0.3j)
    pa = principal_axes(W1, W2)
    assert np.linalg.det(pa.W_prime) == pytest.approx(abs(W1) ** 2 - abs(W2) ** 2, rel=1e-12)
    v = eigenvalues(W1, W2)
    lam = np.sort_complex(np.linalg.eigvals(pa.W_prime))
    assert np.allclose(lam, np.sort_complex([v.lambda_1, v.lambda_2]), atol=1e-10)


def test_bop_kerr_only(kerr_unit):
    bop = find_bop(kerr_unit)
    assert abs(bop.delta) / kerr_unit.gamma == pytest.approx(np.sqrt(3), abs=1e-6)
    assert np.sign(bop.delta) == -np.sign(kerr_unit.kerr)
    assert 0.5 < bop.E / (kerr_unit.gamma / abs(kerr_unit.kerr)) < 2


@pytest.mark.parametrize("g3", [0.0, 1e-3, 4e-3])
def test_bop_root_counts(kerr_unit, g3):
    p = kerr_unit.replace(gamma_3=g3)
    bop = find_bop(p)
    scan = np.linspace(0.8, 1.3, 2001) * bop.b

    def n_three(delta):
        return sum(np.sum(np.isfinite(fixed_point_energies(p.replace(delta=delta, b=b)))) == 3 for b in scan)

    assert n_three(bop.delta * 1.05) > 0
    assert n_three(bop.delta * 0.95) == 0
    assert np.sum(np.isfinite(fixed_point_energies(p.replace(delta=bop.delta * 1.05, b=0.9 * bop.b)))) == 1
    # the cubic has a triple root at the onset
    assert cubic_residual(bop.E, p.replace(delta=bop.delta, b=bop.b)) < 1e-8
    q = p.replace(delta=bop.delta, b=bop.b)
    # second derivative of f(E) vanishes at the onset energy as well
    k2 = q.kerr**2 + g3**2
    assert 6 * k2 * bop.E + 4 * (q.kerr * q.delta + g3 * q.gamma) == pytest.approx(0, abs=1e-9 * k2 * bop.E)


def test_bop_errors(kerr_unit):
    with pytest.raises(InvalidParameterError):
        find_bop(kerr_unit.replace(kerr=0.0))


def test_middle_root_is_saddle():
    rng = np.random.default_rng(7)
    n = 0
    for p in random_kerr(rng, 400):
        pts = classify_point(p)
        if len(pts) == 3:
            n += 1
            assert pts[1][1].kind == SADDLE and pts[1][1].D_W < 0
            assert pts[0][1].is_stable and pts[2][1].is_stable
    assert n > 20


def test_decay_rate_matches_eigenvalue(kerr_unit):
    for p in (kerr_unit.replace(delta=0.4, b=3.0), bistable(kerr_unit, -2.0, 1.8),
              bistable(kerr_unit, -2.0, 1.49)):
        for fp, v in classify_point(p):
            if not v.is_stable:
                continue
            rate = min(v.lambda_1.real, v.lambda_2.real)
            if v.kind == SPIRAL:
                # log-distance ripples with period pi / Im(lambda); fit whole periods
                ripple = np.pi / abs(v.lambda_1.imag)
                t = np.linspace(0, ripple * np.ceil(10 / rate / ripple), 2001)[:-1]
            else:
                t = np.linspace(5 / rate, 15 / rate, 2001)
            C0 = np.array([fp.B + 1e-4 * abs(fp.B) * (1 + 1j)])
            sol = solve(lambda t, C: -theta_c(C, p), (0, t[-1]), C0, t_eval=np.concatenate([[0.0], t]),
                        rtol=1e-12, atol=1e-16)
            d = np.log(np.abs(sol.y[1:, 0] - fp.B))
            slope = -np.polyfit(t, d, 1)[0]
            assert slope == pytest.approx(rate, rel=0.05), v.kind


def test_spiral_node_continuity(kerr_unit):
    # along a b ray, Im lambda goes to zero continuously at the transition
    bop = find_bop(kerr_unit)
    p = kerr_unit.replace(delta=0.5 * bop.delta)
    bs = np.linspace(0.01, 1.0, 2000) * bop.b
    im = np.array([classify_point(p.replace(b=b))[0][1].lambda_1.imag for b in bs])
    jump = np.max(np.abs(np.diff(im)))
    assert jump < 0.05 * np.max(np.abs(im))
    assert np.any(im == 0) and np.any(im != 0)


def test_stability_map_structure(kerr_unit):
    sm = stability_map(kerr_unit, n_delta=101, n_b=101)
    labels = set(sm.labels.ravel())
    assert labels - {BOUNDARY} == set(REGION_LABELS)
    assert sm.label_at(0.2, 1e-3) == "C"
    # onset cell
    i = int(np.argmin(np.abs(sm.b_ratio - 1))); j = int(np.argmin(np.abs(sm.delta_ratio + 1)))
    assert sm.b_ratio[i] == pytest.approx(1) and sm.delta_ratio[j] == pytest.approx(-1)
    assert np.all(sm.n_roots[:, sm.delta_ratio > -1] == 1)


def test_boundaries_sign_change(kerr_unit):
    p = kerr_unit.replace(gamma_3=2e-3)
    E = 50.0
    dm, dp = spiral_node_boundaries(E, p)
    s = lambda d: (np.hypot(p.kerr, p.gamma_3) * E) ** 2 - (d + 2 * p.kerr * E) ** 2
    for edge in (dm, -dp):
        assert abs(s(edge)) < 1e-9
    # upsilon^2 = (Delta_- - Delta)(Delta_+ + Delta)
    for d in np.linspace(-3, 3, 7):
        assert s(d) == pytest.approx((dm - d) * (dp + d), rel=1e-10, abs=1e-10)


def test_b_zero_single_spiral(kerr_unit):
    sm = stability_map(kerr_unit, delta_ratio=np.linspace(-4, 1, 11)[np.linspace(-4, 1, 11) != 0],
                       b_ratio=[0.0])
    assert set(sm.labels.ravel()) == {"C"}


def test_classifier(kerr_physical):
    clf = KerrStabilityClassifier().fit()
    assert set(clf.predict([[-1.0, 0.5], [-2.0, 1.8]])) <= {"C", "R", "CC", "CR", "RR"}
    assert clf.predict([[-2.0, 1.8]])[0] in ("CR", "CC", "RR")
    assert clf.transform([[-2.0, 1.8], [0.5, 0.5]]).tolist() == [[3, 2], [1, 1]]
    assert clf.get_params()["normalized"] is True
