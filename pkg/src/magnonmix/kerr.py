"""Driven Kerr resonator: fixed points, linearization and stability.

In the frame rotating at the pump frequency the mode amplitude obeys
``dC/dt = -Theta(C, C*)`` with

    Theta = [i Delta + gamma + (i K + gamma_3) |C|^2] C + i sqrt(2 gamma_1) e^{i phi_1} b.

Eigenvalues ``lambda`` of the linearization are decay rates: a fixed point
is locally stable when both have positive real part.
"""
from dataclasses import dataclass, asdict, replace

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._errors import InvalidParameterError

SPIRAL = "StableSpiral"
NODE = "StableNode"
SADDLE = "Saddle"
UNSTABLE = "Unstable"
LETTERS = {SPIRAL: "C", NODE: "R", SADDLE: "S", UNSTABLE: "U"}
BOUNDARY = "boundary"
REGION_LABELS = ("C", "R", "CC", "CR", "RR")
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class KerrParams:
    """Parameters of the driven Kerr mode; rates in rad/s.

    ``delta`` is the pump detuning ``omega_c - omega_p`` and ``b`` the pump
    amplitude in sqrt(1/s) (``|b|^2`` is a flux).
    """

    delta: float
    gamma_1: float
    gamma_2: float
    kerr: float
    b: complex = 0.0
    gamma_3: float = 0.0
    phi_1: float = 0.0

    def __post_init__(self):
        if min(self.gamma_1, self.gamma_2, self.gamma_3) < 0:
            raise InvalidParameterError("damping rates must be non-negative")
        if not self.gamma_1 + self.gamma_2 > 0:
            raise InvalidParameterError("total linear damping gamma_1 + gamma_2 must be positive")
        if not np.all(np.isfinite([self.delta, self.kerr, abs(self.b), self.phi_1])):
            raise InvalidParameterError("Kerr parameters must be finite")

    @property
    def gamma(self):
        return self.gamma_1 + self.gamma_2

    @property
    def drive(self):
        """Constant drive term ``i sqrt(2 gamma_1) e^{i phi_1} b`` of Theta."""
        return 1j * np.sqrt(2 * self.gamma_1) * np.exp(1j * self.phi_1) * self.b

    def replace(self, **changes):
        return replace(self, **changes)

    def asdict(self):
        d = asdict(self)
        d["b"] = complex(d["b"]) if isinstance(d["b"], complex) else float(d["b"])
        return d


@dataclass(frozen=True)
class FixedPoint:
    E: float
    B: complex
    W1: complex
    W2: complex


@dataclass(frozen=True)
class StabilityVerdict:
    lambda_1: complex
    lambda_2: complex
    T_W: float
    D_W: float
    upsilon: complex
    kind: str
    theta_1: float
    W_plus: float
    W_minus: float
    alpha_W: float
    degenerate: bool = False

    @property
    def letter(self):
        return LETTERS[self.kind]

    @property
    def is_stable(self):
        return self.kind in (SPIRAL, NODE)


@dataclass(frozen=True)
class PrincipalAxes:
    phi: float
    W_prime: np.ndarray


LINEAR_REGIME = PrincipalAxes(phi=float("nan"), W_prime=None)


@dataclass(frozen=True)
class BistabilityOnset:
    """Bistability onset point (BOP).

    ``delta`` is the physical onset detuning (sign opposite to ``K``);
    normalized maps divide by ``delta_norm = -delta`` so the onset sits at
    ``(-1, 1)``.
    """

    delta: float
    b: float
    E: float

    @property
    def delta_norm(self):
        return -self.delta


def theta_c(C, p):
    C = np.asarray(C, dtype=complex)
    N = np.abs(C) ** 2
    return (1j * p.delta + p.gamma + (1j * p.kerr + p.gamma_3) * N) * C + p.drive


def cubic_coefficients(p):
    """``[a3, a2, a1, a0]`` of ``[(D + K E)^2 + (g + g3 E)^2] E - 2 g1 |b|^2``."""
    K, g3, g, D = p.kerr, p.gamma_3, p.gamma, p.delta
    return np.array([K**2 + g3**2, 2 * (K * D + g3 * g), D**2 + g**2,
                     -2 * p.gamma_1 * abs(p.b) ** 2])


def cubic_residual(E, p):
    """Relative residual: |f(E)| over the sum of the term magnitudes."""
    a3, a2, a1, a0 = cubic_coefficients(p)
    terms = np.array([a3 * E**3, a2 * E**2, a1 * E, a0 + 0 * E])
    scale = np.sum(np.abs(terms), axis=0)
    return np.abs(np.sum(terms, axis=0)) / np.where(scale > 0, scale, 1.0)


def _monic_cubic_real_roots(c2, c1, c0):
    """Real roots of ``x^3 + c2 x^2 + c1 x + c0`` (vectorized).

    Companion-matrix eigenvalues, then Newton polishing of the real ones.
    Returns an ``(n, 3)`` array sorted ascending with NaN for missing roots.
    """
    c2, c1, c0 = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (c2, c1, c0))
    n = c2.size
    comp = np.zeros((n, 3, 3))
    comp[:, 0, :] = -np.stack([c2, c1, c0], axis=1)
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    ev = np.linalg.eigvals(comp)
    scale = 1.0 + np.abs(ev)
    real = np.abs(ev.imag) <= 1e-6 * scale
    x = np.where(real, ev.real, np.nan)
    for _ in range(8):
        f = ((x + c2[:, None]) * x + c1[:, None]) * x + c0[:, None]
        df = (3 * x + 2 * c2[:, None]) * x + c1[:, None]
        step = np.where(df != 0, f / np.where(df != 0, df, 1.0), 0.0)
        x = x - step
    f = ((x + c2[:, None]) * x + c1[:, None]) * x + c0[:, None]
    size = ((np.abs(x) + np.abs(c2[:, None])) * np.abs(x) + np.abs(c1[:, None])) * np.abs(x) + np.abs(c0[:, None])
    x[np.abs(f) > 1e-11 * np.where(size > 0, size, 1.0)] = np.nan
    x = np.sort(x, axis=1)  # NaN sorts last
    # a conjugate pair that straddled the realness threshold can polish onto
    # the same real root; keep the number of distinct roots consistent
    dup = np.abs(np.diff(x, axis=1)) <= 1e-9 * (1 + np.abs(x[:, 1:]))
    x[:, 1:][dup] = np.nan
    return np.sort(x, axis=1)


def fixed_point_energies(p):
    """Sorted non-negative real roots ``E_c`` of the fixed-point cubic."""
    return _energies_batch(np.atleast_1d(p.delta), np.atleast_1d(abs(p.b)), p)[0]


def _energies_batch(delta, b, p):
    """Root sets for arrays of detuning/amplitude sharing the rest of ``p``.

    Returns an ``(n, 3)`` array (NaN-padded).
    """
    delta = np.asarray(delta, dtype=float)
    b = np.abs(np.asarray(b))
    g, g1, g3, K = p.gamma, p.gamma_1, p.gamma_3, p.kerr
    kappa = np.hypot(K, g3)
    rhs = 2 * g1 * b**2
    out = np.full((delta.size, 3), np.nan)
    if kappa == 0:
        out[:, 0] = rhs / (delta**2 + g**2)
        return out
    unit = g / kappa  # E in units of gamma/kappa
    c2 = 2 * (K * delta + g3 * g) / (kappa * g)
    c1 = (delta**2 + g**2) / g**2
    c0 = -rhs * kappa / g**3
    x = _monic_cubic_real_roots(c2, c1, c0)
    x[x < 0] = np.where(np.abs(x[x < 0]) < 1e-14, 0.0, np.nan)
    x = np.sort(x, axis=1)
    return x * unit


def steady_amplitude(E, p):
    """Complex fixed point ``B_c`` for a root ``E`` of the cubic."""
    denom = 1j * p.delta + p.gamma + (1j * p.kerr + p.gamma_3) * E
    return -p.drive / denom


def linearize(B, p):
    """``W1 = dTheta/dC`` and ``W2 = dTheta/dC*`` at ``C = B``."""
    nl = 1j * p.kerr + p.gamma_3
    W1 = 1j * p.delta + p.gamma + 2 * nl * np.abs(B) ** 2
    W2 = nl * np.asarray(B) ** 2
    return W1, W2


def fixed_points(p):
    """All fixed points sorted ascending in ``E``, each with ``(W1, W2)``."""
    out = []
    for E in fixed_point_energies(p):
        if np.isnan(E):
            continue
        B = complex(steady_amplitude(E, p))
        W1, W2 = linearize(B, p)
        out.append(FixedPoint(float(E), B, complex(W1), complex(W2)))
    return out


def eigenvalues(W1, W2, scale=None):
    """Eigenvalues and stability class of ``W = [[W1, W2], [W2*, W1*]]``.

    ``scale`` (default ``|W1|``) sets the absolute tolerance below which
    ``upsilon`` or the determinant count as zero (flagged ``degenerate``).
    """
    W1 = complex(W1)
    W2 = complex(W2)
    T = 2 * W1.real
    D = abs(W1) ** 2 - abs(W2) ** 2
    # (T/2)^2 - D written without cancellation
    disc = (abs(W2) - abs(W1.imag)) * (abs(W2) + abs(W1.imag))
    ups = np.sqrt(complex(disc))
    if disc >= 0:
        ups = complex(abs(ups), 0.0)
    else:
        ups = complex(0.0, abs(ups))
    lam1 = T / 2 + ups
    lam2 = T / 2 - ups
    scale = abs(W1) if scale is None else scale
    tol = DEGENERACY_TOL * scale
    degenerate = abs(ups) < tol or abs(D) < tol**2 + 1e-14 * abs(W1) ** 2
    if D < 0:
        kind = SADDLE
    elif disc < 0:
        kind = SPIRAL if T > 0 else UNSTABLE
    else:
        kind = NODE if lam2.real > 0 else UNSTABLE
    if disc >= 0 and abs(W2) > 0:
        alpha = float(np.arcsin(min(1.0, abs(ups) / abs(W2))))
    else:
        alpha = float("nan")
    return StabilityVerdict(
        lambda_1=lam1, lambda_2=lam2, T_W=T, D_W=D, upsilon=ups, kind=kind,
        theta_1=float(np.angle(W1)), W_plus=abs(W1) + abs(W2), W_minus=abs(W1) - abs(W2),
        alpha_W=alpha, degenerate=bool(degenerate),
    )


def real_jacobian(W1, W2):
    """Real 2x2 matrix ``M`` with ``d(Re c, Im c)/dt = -M (Re c, Im c)``."""
    s, d = W1 + W2, W1 - W2
    return np.array([[s.real, -d.imag], [s.imag, d.real]])


def principal_axes(W1, W2):
    """Rotation angle and squeeze-rotation form ``R(theta_1) diag(W+, W-)``.

    Returns :data:`LINEAR_REGIME` when ``W1 W2 = 0``.
    """
    W1, W2 = complex(W1), complex(W2)
    if W1 * W2 == 0:
        return LINEAR_REGIME
    phi = 0.5 * np.angle(W1 * np.conj(W2))
    th = np.angle(W1)
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    W_prime = rot @ np.diag([abs(W1) + abs(W2), abs(W1) - abs(W2)])
    return PrincipalAxes(float(phi), W_prime)


def rotate_frame(W1, W2, phi):
    """Real matrix of ``dxi/dt = -W' xi`` for ``xi = (Re, Im)(c e^{i phi})``."""
    return real_jacobian(W1, W2 * np.exp(2j * phi))


def find_bop(p):
    """Bistability onset point for the detuning/amplitude plane.

    The onset is where both turning points of ``f(E) = [(D+KE)^2+(g+g3 E)^2] E``
    merge: the derivative ``f'(E)`` acquires a double positive root.  That
    condition is quadratic in the detuning and solved in closed form.
    """
    K, g3, g, g1 = p.kerr, p.gamma_3, p.gamma, p.gamma_1
    if K == 0:
        raise InvalidParameterError("no bistability without a Kerr coefficient")
    if K**2 <= 3 * g3**2:
        raise InvalidParameterError("nonlinear damping too strong for bistability (|K| <= sqrt(3) gamma_3)")
    if g1 == 0:
        raise InvalidParameterError("gamma_1 must be positive to drive the resonator")
    k2 = K**2 + g3**2
    delta = g * (-4 * K * g3 - np.sign(K) * np.sqrt(3) * k2) / (K**2 - 3 * g3**2)
    E = -2 * (K * delta + g3 * g) / (3 * k2)
    fE = ((delta + K * E) ** 2 + (g + g3 * E) ** 2) * E
    return BistabilityOnset(delta=float(delta), b=float(np.sqrt(fE / (2 * g1))), E=float(E))


def cubic_discriminant(p):
    """Discriminant of the fixed-point cubic (positive: three real roots)."""
    a, b, c, d = cubic_coefficients(p)
    return 18 * a * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * a * c**3 - 27 * a**2 * d**2


def classify_point(p):
    """Verdicts for every fixed point of ``p`` (ascending ``E``)."""
    return [(fp, eigenvalues(fp.W1, fp.W2, scale=p.gamma)) for fp in fixed_points(p)]


def attractor_label(verdicts):
    """Region label from the locally stable attractors, e.g. ``"CR"``."""
    letters = []
    for v in verdicts:
        if v.degenerate and v.kind != SADDLE:
            return BOUNDARY
        if v.is_stable:
            letters.append(v.letter)
    return "".join(sorted(letters))


@dataclass
class StabilityMap:
    labels: np.ndarray  # (n_b, n_delta) object array
    delta_ratio: np.ndarray
    b_ratio: np.ndarray
    bop: BistabilityOnset
    n_roots: np.ndarray
    upsilon_sq: np.ndarray  # (n_b, n_delta, 3), NaN where no root
    energies: np.ndarray  # (n_b, n_delta, 3)

    def label_at(self, delta_ratio, b_ratio):
        i = int(np.argmin(np.abs(self.b_ratio - b_ratio)))
        j = int(np.argmin(np.abs(self.delta_ratio - delta_ratio)))
        return self.labels[i, j]


def _verdict_arrays(E, delta, p):
    """Vectorized trace/determinant data for roots ``E`` at detunings ``delta``."""
    K, g3, g = p.kerr, p.gamma_3, p.gamma
    half_T = g + 2 * g3 * E
    im_W1 = delta + 2 * K * E
    re_W1 = half_T
    W2_abs = np.hypot(K, g3) * E
    D = re_W1**2 + im_W1**2 - W2_abs**2
    ups_sq = W2_abs**2 - im_W1**2
    return half_T, D, ups_sq


def stability_map(p, delta_ratio=None, b_ratio=None, n_delta=201, n_b=201):
    """Label every cell of the normalized (detuning, amplitude) plane.

    Axes are ``delta / bop.delta_norm`` (default ``[-4, 1]``) and
    ``b / bop.b`` (default ``[0, 2]``); the fields ``delta`` and ``b`` of
    ``p`` are ignored.
    """
    bop = find_bop(p)
    delta_ratio = np.linspace(-4.0, 1.0, n_delta) if delta_ratio is None else np.asarray(delta_ratio, float)
    b_ratio = np.linspace(0.0, 2.0, n_b) if b_ratio is None else np.asarray(b_ratio, float)
    DR, BR = np.meshgrid(delta_ratio, b_ratio)
    delta = DR.ravel() * bop.delta_norm
    b = BR.ravel() * bop.b
    E = _energies_batch(delta, b, p)
    half_T, D, ups_sq = _verdict_arrays(E, delta[:, None], p)
    tol = DEGENERACY_TOL * p.gamma
    has = ~np.isnan(E)
    # the E = 0 root (b = 0) is the unique fixed point of the undriven mode
    degenerate = has & ((np.abs(ups_sq) < tol**2) | (np.abs(D) < tol**2))
    stable = has & (D > 0) & (half_T > 0)
    spiral = stable & (ups_sq < 0)
    node = stable & (ups_sq >= 0) & (half_T - np.sqrt(np.maximum(ups_sq, 0)) > 0)
    labels = np.empty(E.shape[0], dtype=object)
    for k in range(E.shape[0]):
        if np.any(degenerate[k] & (D[k] >= 0)):
            labels[k] = BOUNDARY
            continue
        labels[k] = "".join(sorted("C" * int(spiral[k].sum()) + "R" * int(node[k].sum())))
    shape = BR.shape
    return StabilityMap(
        labels=labels.reshape(shape), delta_ratio=delta_ratio, b_ratio=b_ratio, bop=bop,
        n_roots=has.sum(axis=1).reshape(shape),
        upsilon_sq=ups_sq.reshape(shape + (3,)), energies=E.reshape(shape + (3,)),
    )


def spiral_node_boundaries(E, p):
    """``(Delta_-, Delta_+)``; ``upsilon^2 = (Delta_- - Delta)(Delta_+ + Delta)``."""
    s = np.sqrt(1 + (p.gamma_3 / p.kerr) ** 2)
    return (s - 2) * p.kerr * E, (s + 2) * p.kerr * E


class KerrStabilityClassifier(ClassifierMixin, BaseEstimator):
    """Attractor classification of a driven Kerr resonator.

    ``fit`` locates the bistability onset; ``predict`` maps rows of
    ``(delta, b)`` to region labels (``"C"``, ``"CR"``, ...).  With
    ``normalized=True`` the inputs are in onset units, the detuning divided
    by ``bop_.delta_norm`` so that the onset lies at ``(-1, 1)``.
    """

    def __init__(self, gamma_1=2 * np.pi * 0.5e6, gamma_2=2 * np.pi * 0.5e6,
                 kerr=-2 * np.pi * 2e-9, gamma_3=0.0, phi_1=0.0, normalized=True):
        self.gamma_1 = gamma_1
        self.gamma_2 = gamma_2
        self.kerr = kerr
        self.gamma_3 = gamma_3
        self.phi_1 = phi_1
        self.normalized = normalized

    def _params(self):
        return KerrParams(delta=0.0, gamma_1=self.gamma_1, gamma_2=self.gamma_2,
                          kerr=self.kerr, gamma_3=self.gamma_3, phi_1=self.phi_1)

    def fit(self, X=None, y=None):
        self.params_ = self._params()
        self.bop_ = find_bop(self.params_)
        self.classes_ = np.array(list(REGION_LABELS) + [BOUNDARY], dtype=object)
        return self

    def _physical(self, X):
        X = check_array(X, ensure_min_features=2)
        delta, b = X[:, 0].copy(), X[:, 1].copy()
        if self.normalized:
            delta *= self.bop_.delta_norm
            b *= self.bop_.b
        return delta, b

    def predict(self, X):
        check_is_fitted(self, "bop_")
        delta, b = self._physical(X)
        out = np.empty(delta.size, dtype=object)
        for k, (d, bb) in enumerate(zip(delta, b)):
            out[k] = attractor_label(v for _, v in classify_point(self.params_.replace(delta=d, b=bb)))
        return out

    def transform(self, X):
        """Number of fixed points and of stable attractors per row."""
        check_is_fitted(self, "bop_")
        delta, b = self._physical(X)
        E = _energies_batch(delta, b, self.params_)
        half_T, D, _ = _verdict_arrays(E, delta[:, None], self.params_)
        has = ~np.isnan(E)
        return np.column_stack([has.sum(axis=1), (has & (D > 0) & (half_T > 0)).sum(axis=1)])
