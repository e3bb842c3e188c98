import numpy as np
import pytest

from magnonmix._errors import InvalidParameterError
from magnonmix.flow import (bistable_fixed_points, dimensionless, flow_map, settle_time,
                            terminal_labels)
from magnonmix.kerr import NODE, SADDLE, SPIRAL, fixed_points

from conftest import bistable


@pytest.fixture(scope="module")
def point():
    from magnonmix.kerr import KerrParams
    return bistable(KerrParams(delta=0.0, gamma_1=0.5, gamma_2=0.5, kerr=-1e-2), -2.0, 1.49)


@pytest.fixture(scope="module")
def fmap(point):
    return flow_map(point, n_re=9, n_im=9)


def test_fixed_point_roles(point):
    fps = bistable_fixed_points(point)
    assert fps["C1"][1].kind == NODE
    assert fps["C2"][1].kind == SADDLE
    assert fps["C3"][1].kind == SPIRAL
    lam = fps["C2"][1]
    assert lam.lambda_1.imag == 0 and lam.lambda_1.real * lam.lambda_2.real < 0


def test_fixed_points_stay_put(point):
    fps = bistable_fixed_points(point)
    t_end = settle_time(point)
    labels = terminal_labels(point, [fps["C1"][0].B, fps["C3"][0].B], t_end)
    assert labels.tolist() == [1, 3]


def test_basins(fmap):
    assert set(np.unique(fmap.labels)) == {1, 3}
    assert fmap.paths.shape == (fmap.t.size, fmap.labels.size)
    assert np.allclose(fmap.paths[0], fmap.initial.ravel())


def test_saddle_on_separatrix(fmap):
    assert fmap.separatrix.size > 0
    assert fmap.saddle_offset <= fmap.tolerance


def test_dimensionless_round_trip(point):
    q, a, tau = dimensionless(point)
    assert q.gamma == pytest.approx(1.0) and abs(q.kerr) == pytest.approx(1.0)
    E = np.array([fp.E for fp in fixed_points(point)])
    Eq = np.array([fp.E for fp in fixed_points(q)])
    assert np.allclose(Eq * a**2, E, rtol=1e-10)


def test_tolerance_refinement(point):
    # labels are stable under integrator refinement away from the separatrix
    fps = bistable_fixed_points(point)
    c1, c3 = fps["C1"][0].B, fps["C3"][0].B
    grid = c1 + (c3 - c1) * np.linspace(-0.3, 1.3, 33) + 0.2j * abs(c3 - c1)
    t_end = settle_time(point)
    loose = terminal_labels(point, grid, t_end, rtol=1e-6)
    tight = terminal_labels(point, grid, t_end, rtol=1e-9)
    diff = np.flatnonzero(loose != tight)
    changes = np.flatnonzero(np.diff(tight) != 0)
    for k in diff:
        assert np.min(np.abs(changes - k)) <= 1


def test_requires_bistability(point):
    with pytest.raises(InvalidParameterError):
        flow_map(point.replace(b=point.b * 0.1))
