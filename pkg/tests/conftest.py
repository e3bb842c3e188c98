import numpy as np
import pytest

from magnonmix.kerr import KerrParams, find_bop
from magnonmix.units import TWO_PI, MaterialParams

MHZ = TWO_PI * 1e6


@pytest.fixture
def yig():
    """YIG sphere of 125 um radius at room temperature."""
    return MaterialParams(M_s=140e3, K_c1=-610.0, K_c2=-610.0 * 4.3e-2, rho_s=4.2e27, R_s=125e-6)


@pytest.fixture
def kerr_unit():
    """Critically coupled, softening resonator in units of gamma = 1."""
    return KerrParams(delta=0.0, gamma_1=0.5, gamma_2=0.5, kerr=-1e-2)


@pytest.fixture
def kerr_physical():
    return KerrParams(delta=0.0, gamma_1=0.5 * MHZ, gamma_2=0.5 * MHZ, kerr=-TWO_PI * 2e-9)


def bistable(p, delta_ratio=-2.0, b_ratio=1.8):
    bop = find_bop(p)
    return p.replace(delta=delta_ratio * bop.delta_norm, b=b_ratio * bop.b)


def random_kerr(rng, n):
    """Parameter sets spanning mono- and bistable regimes around the onset."""
    out = []
    for _ in range(n):
        g1, g2 = rng.uniform(0.1, 1.0, 2)
        K = rng.choice([-1, 1]) * 10 ** rng.uniform(-4, 0)
        g3 = abs(K) * rng.uniform(0, 0.3) if rng.random() < 0.5 else 0.0
        p = KerrParams(delta=0.0, gamma_1=g1, gamma_2=g2, kerr=K, gamma_3=g3,
                       phi_1=rng.uniform(-np.pi, np.pi))
        if rng.random() < 0.5:
            point = rng.uniform(-4, 1), rng.uniform(0.05, 2.0)
        else:  # skew towards the bistable wedge
            point = rng.uniform(-3, -1.05), rng.uniform(1.0, 2.2)
        out.append(bistable(p, *point))
    return out


# acceptance verdicts, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
