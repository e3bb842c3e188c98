import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from magnonmix._errors import InvalidParameterError
from magnonmix.bessel import bessel_j_orders, bessel_jl


def _integral(l, x):
    # J_l(x) = (1/pi) int_0^pi cos(l t - x sin t) dt
    return integrate.quad(lambda t: np.cos(l * t - x * np.sin(t)), 0, np.pi, epsabs=1e-13, limit=200)[0] / np.pi


def test_small_values():
    assert bessel_jl(0, 0.0) == 1.0
    for l in (1, 2, -3, 7):
        assert bessel_jl(l, 0.0) == 0.0
    assert bessel_jl(1, 1.0) == pytest.approx(0.4400505857, abs=1e-10)
    assert bessel_jl(1, 1.0) == pytest.approx(_integral(1, 1.0), abs=1e-12)


@pytest.mark.parametrize("l", [-5, -1, 0, 2, 9])
@pytest.mark.parametrize("x", [0.3, 1.0, 4.7, 25.0])
def test_integral_representation(l, x):
    assert bessel_jl(l, x) == pytest.approx(_integral(l, x), abs=1e-12)


@given(st.integers(-60, 60), st.floats(-9.9e3, 9.9e3))
def test_against_scipy(l, x):
    assert bessel_jl(l, x) == pytest.approx(special.jv(l, x), abs=1e-12)


@given(st.floats(0, 5))
def test_sum_rule(x):
    j = bessel_j_orders(40, x)
    assert j[0] ** 2 + 2 * np.sum(j[1:] ** 2) == pytest.approx(1.0, abs=1e-10)


def test_negative_order_and_argument():
    assert bessel_jl(-3, 2.0) == pytest.approx(-bessel_jl(3, 2.0), abs=0)
    assert bessel_jl(3, -2.0) == pytest.approx(-bessel_jl(3, 2.0), abs=0)
    assert bessel_jl(2, -2.0) == pytest.approx(bessel_jl(2, 2.0), abs=0)


def test_range():
    with pytest.raises(InvalidParameterError):
        bessel_jl(0, 2e4)
    with pytest.raises(InvalidParameterError):
        bessel_j_orders(-1, 1.0)
