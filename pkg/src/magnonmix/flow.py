"""Basins of attraction of the bistable Kerr resonator.

Noiseless trajectories of ``dC/dt = -Theta(C, C*)`` are integrated in one
batch from a grid of initial amplitudes and labelled by the attractor they
end at.  The separatrix is located by bisection between neighbouring
initial conditions with different labels.
"""
from dataclasses import dataclass, field

import numpy as np

from ._errors import InvalidParameterError, NumericalError
from .integrate import solve
from .kerr import NODE, SADDLE, KerrParams, classify_point, real_jacobian, theta_c

INCONCLUSIVE = -1


@dataclass
class FlowMap:
    attractors: dict  # name -> complex fixed point (C1 node, C2 saddle, C3 spiral)
    verdicts: dict
    initial: np.ndarray  # (n_im, n_re) complex grid of initial amplitudes
    labels: np.ndarray  # 1 -> C1, 3 -> C3, -1 inconclusive
    paths: np.ndarray  # (n_t, n_im * n_re) sampled trajectories
    t: np.ndarray
    separatrix: np.ndarray  # complex points
    saddle_offset: float  # distance of C2 from the bisected crossing on its unstable line
    tolerance: float
    diagnostics: list = field(default_factory=list)


def _rhs(p):
    def rhs(t, C):
        return -theta_c(C, p)
    return rhs


def bistable_fixed_points(p):
    """Return ``{"C1": node-or-spiral, "C2": saddle, "C3": ...}`` with verdicts.

    ``C2`` is the saddle; ``C1`` is the stable node when there is one (else
    the lower-energy attractor) and ``C3`` the other attractor.
    """
    pts = classify_point(p)
    if len(pts) != 3:
        raise InvalidParameterError(f"expected 3 fixed points in the bistable regime, found {len(pts)}")
    saddles = [(fp, v) for fp, v in pts if v.kind == SADDLE]
    stable = [(fp, v) for fp, v in pts if v.is_stable]
    if len(saddles) != 1 or len(stable) != 2:
        raise NumericalError("bistable fixed points are not two attractors and a saddle")
    nodes = [s for s in stable if s[1].kind == NODE]
    c1 = nodes[0] if len(nodes) == 1 else stable[0]
    c3 = stable[1] if c1 is stable[0] else stable[0]
    return {"C1": c1, "C2": saddles[0], "C3": c3}


def terminal_labels(p, C0, t_end, rtol=1e-8, capture=1e-3):
    """Integrate initial amplitudes ``C0`` and label them 1 (C1) or 3 (C3).

    A trajectory is assigned to an attractor when its end point is within
    ``capture`` times the attractor spacing; otherwise it is inconclusive.
    """
    fps = bistable_fixed_points(p)
    c1, c3 = fps["C1"][0].B, fps["C3"][0].B
    scale = abs(c3 - c1)
    C0 = np.asarray(C0, dtype=complex).ravel()
    sol = solve(_rhs(p), (0.0, t_end), C0, t_eval=[t_end], rtol=rtol,
                atol=rtol * scale * 1e-3)
    end = sol.y[-1]
    labels = np.full(C0.size, INCONCLUSIVE)
    labels[np.abs(end - c1) < capture * scale] = 1
    labels[np.abs(end - c3) < capture * scale] = 3
    return labels


def settle_time(p, factor=40.0):
    """Integration horizon from the slowest attractor decay rate."""
    fps = bistable_fixed_points(p)
    rate = min(min(v.lambda_1.real, v.lambda_2.real) for key, (fp, v) in fps.items() if key != "C2")
    lam_u = abs(min(fps["C2"][1].lambda_1.real, fps["C2"][1].lambda_2.real))
    # leaving the saddle neighbourhood adds ~ln(1/eps)/lambda_u
    return factor / rate + 40.0 / lam_u


def _bisect(p, a, b, la, lb, t_end, tol, rtol, max_iter=80):
    """Vectorized bisection of segments ``[a, b]`` with differing end labels."""
    a = np.array(a, dtype=complex)
    b = np.array(b, dtype=complex)
    for _ in range(max_iter):
        if np.all(np.abs(b - a) <= tol):
            break
        mid = 0.5 * (a + b)
        lm = terminal_labels(p, mid, t_end, rtol=rtol)
        same_a = lm == la
        a = np.where(same_a, mid, a)
        b = np.where(same_a, b, mid)
        stuck = lm == INCONCLUSIVE
        if np.any(stuck):
            # midpoint sits on the stable manifold to integrator precision
            a = np.where(stuck, mid, a)
            b = np.where(stuck, mid, b)
    return 0.5 * (a + b)


def unstable_direction(fp):
    """Unit complex direction of the unstable manifold of saddle ``fp``."""
    J = -real_jacobian(fp.W1, fp.W2)
    w, vec = np.linalg.eig(J)
    k = int(np.argmax(w.real))
    d = vec[:, k].real
    return complex(d[0], d[1]) / np.hypot(d[0], d[1])


def dimensionless(p):
    """Rescale to ``gamma = 1`` and ``|K + i gamma_3| = 1``.

    Returns ``(q, a, tau)``: amplitudes scale as ``C = a c`` and time as
    ``t = tau s``; the fixed points and flow of ``q`` map one-to-one onto
    those of ``p``.
    """
    g = p.gamma
    kappa = np.hypot(p.kerr, p.gamma_3)
    a = np.sqrt(g / kappa)
    q = KerrParams(delta=p.delta / g, gamma_1=p.gamma_1 / g, gamma_2=p.gamma_2 / g,
                   kerr=p.kerr / kappa, b=p.b / (np.sqrt(g) * a), gamma_3=p.gamma_3 / kappa,
                   phi_1=p.phi_1)
    return q, a, 1.0 / g


def flow_map(p, n_re=15, n_im=15, margin=0.5, t_end=None, rtol=1e-8, n_samples=200,
             tol=None):
    """Basin labels, sampled paths and separatrix estimate of a bistable point.

    The flow is integrated in the units of :func:`dimensionless`; every
    returned amplitude and time is in the units of ``p``.
    """
    q, a, tau = dimensionless(p)
    fm = _flow_map(q, n_re, n_im, margin, None if t_end is None else t_end / tau, rtol,
                   n_samples, None if tol is None else tol / a)
    fm.attractors = {k: v * a for k, v in fm.attractors.items()}
    fm.verdicts = {k: v for k, v in classify_named(p).items()}
    fm.initial = fm.initial * a
    fm.paths = fm.paths * a
    fm.t = fm.t * tau
    fm.separatrix = fm.separatrix * a
    fm.saddle_offset *= a
    fm.tolerance *= a
    return fm


def classify_named(p):
    return {k: v for k, (fp, v) in bistable_fixed_points(p).items()}


def _flow_map(p, n_re, n_im, margin, t_end, rtol, n_samples, tol):
    fps = bistable_fixed_points(p)
    pts = np.array([fps[k][0].B for k in ("C1", "C2", "C3")])
    span = max(np.ptp(pts.real), np.ptp(pts.imag))
    lo = complex(pts.real.min() - margin * span, pts.imag.min() - margin * span)
    hi = complex(pts.real.max() + margin * span, pts.imag.max() + margin * span)
    re = np.linspace(lo.real, hi.real, n_re)
    im = np.linspace(lo.imag, hi.imag, n_im)
    grid = re[None, :] + 1j * im[:, None]
    if t_end is None:
        t_end = settle_time(p)
    scale = abs(pts[2] - pts[0])
    tol = 1e-6 * scale if tol is None else tol

    t = np.linspace(0.0, t_end, n_samples)
    sol = solve(_rhs(p), (0.0, t_end), grid.ravel(), t_eval=t, rtol=rtol,
                atol=rtol * scale * 1e-3)
    end = sol.y[-1]
    labels = np.full(grid.size, INCONCLUSIVE)
    labels[np.abs(end - pts[0]) < 1e-3 * scale] = 1
    labels[np.abs(end - pts[2]) < 1e-3 * scale] = 3
    diagnostics = []
    if np.any(labels == INCONCLUSIVE):
        diagnostics.append(f"{int(np.sum(labels == INCONCLUSIVE))} trajectories did not settle by t={t_end:g}")
    labels = labels.reshape(grid.shape)

    seg_a, seg_b, la, lb = [], [], [], []
    for axis in (0, 1):
        A = grid if axis == 1 else grid.T
        L = labels if axis == 1 else labels.T
        for i in range(A.shape[0]):
            for j in range(A.shape[1] - 1):
                if L[i, j] != L[i, j + 1] and INCONCLUSIVE not in (L[i, j], L[i, j + 1]):
                    seg_a.append(A[i, j])
                    seg_b.append(A[i, j + 1])
                    la.append(L[i, j])
                    lb.append(L[i, j + 1])
    separatrix = np.array([], dtype=complex)
    if seg_a:
        separatrix = _bisect(p, seg_a, seg_b, np.array(la), np.array(lb), t_end, tol, rtol)

    # the saddle itself: bisect along its unstable manifold, asymmetrically
    # so no midpoint lands exactly on C2
    u = unstable_direction(fps["C2"][0])
    r = 0.05 * scale
    ends = np.array([pts[1] - 0.9 * r * u, pts[1] + 1.3 * r * u])
    end_labels = terminal_labels(p, ends, t_end, rtol=rtol)
    if end_labels[0] == end_labels[1] or INCONCLUSIVE in end_labels:
        raise NumericalError("unstable-manifold probe of the saddle did not split the basins")
    crossing = _bisect(p, ends[:1], ends[1:], end_labels[:1], end_labels[1:], t_end, tol, rtol)[0]
    separatrix = np.append(separatrix, crossing)
    return FlowMap(
        attractors={"C1": pts[0], "C2": pts[1], "C3": pts[2]},
        verdicts={k: fps[k][1] for k in fps},
        initial=grid, labels=labels, paths=sol.y, t=sol.t, separatrix=separatrix,
        saddle_offset=float(abs(crossing - pts[1])), tolerance=float(tol),
        diagnostics=diagnostics,
    )
