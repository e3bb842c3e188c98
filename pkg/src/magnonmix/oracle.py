"""Brute-force time-domain checks of the closed-form results.

The amplitude equation of the Kerr mode and the Bloch equation are
integrated to a periodic steady state, and spectral lines are read off by a
coherently sampled DFT (the observation window spans an integer number of
periods of every line of interest, so no window correction is needed).
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat

import numpy as np
from scipy.signal import windows

from ._errors import CoherentSamplingError, InvalidParameterError, SteadyStateError
from .bloch import DampingParams, LzsDrive, equilibrium, integrate as integrate_bloch
from .integrate import solve
from .intermod import _drive_for_energy, intermod_gain
from .kerr import KerrParams, classify_point, eigenvalues, find_bop, linearize, steady_amplitude, theta_c
from .lzs import modulation_index, sideband_amplitude
from .units import TWO_PI

#: Drive and damping of the sideband figure (angular units).
FIG2_DRIVE = LzsDrive(omega_1=TWO_PI * 0.5e6, omega=TWO_PI * 2.305e9, omega_c=TWO_PI * 2.305e9,
                      omega_b=TWO_PI * 0.5e6, omega_m=TWO_PI * 0.5e6)
FIG2_DAMPING = DampingParams(gamma_1=TWO_PI * 1.0e6, gamma_2=TWO_PI * 2.0e6)

LEAKAGE_LIMIT = 1e-3


@dataclass(frozen=True)
class ToneSpec:
    """Extra input tones ``(offset [rad/s], complex amplitude)``.

    A tone at offset ``w`` enters the rotating-frame equation like the pump,
    ``-i sqrt(2 gamma_1) e^{i phi_1} a e^{-i w t}``, i.e. it sits at
    ``omega_p + w`` in the lab.
    """

    tones: tuple = ()

    def __post_init__(self):
        freqs = [float(w) for w, _ in self.tones]
        if len(set(freqs)) != len(freqs):
            raise InvalidParameterError("tone frequencies must be distinct")
        if not all(np.isfinite(freqs)) or not all(np.isfinite(abs(a)) for _, a in self.tones):
            raise InvalidParameterError("tone frequencies and amplitudes must be finite")

    @property
    def offsets(self):
        return np.array([w for w, _ in self.tones], dtype=float)

    @property
    def amplitudes(self):
        return np.array([a for _, a in self.tones], dtype=complex)


@dataclass(frozen=True)
class SpectralLine:
    frequency: float
    amplitude: complex
    leakage: float

    @property
    def accepted(self):
        return self.leakage < LEAKAGE_LIMIT


def _check_uniform(t):
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise InvalidParameterError("time axis must be 1-D with at least two samples")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * abs(dt[0]) or dt[0] <= 0:
        raise InvalidParameterError("series must be uniformly sampled in increasing time")
    return t, float(dt[0])


def dft_line(series, t, freq, window=None):
    """Complex amplitude ``A`` of the component ``A exp(i freq t)``.

    ``t`` holds ``N`` uniform samples spanning ``N dt`` (end point excluded).
    Without a window that span must hold an integer number of periods of
    ``freq``; the leakage estimate is the largest neighbouring-bin magnitude
    relative to ``|A|``.  ``window="flattop"`` relaxes the alignment
    requirement at the cost of resolution.
    """
    t, dt = _check_uniform(t)
    x = np.asarray(series, dtype=complex)
    if x.shape != t.shape:
        raise InvalidParameterError("series and time axis have different lengths")
    n = t.size
    span = n * dt
    bin_w = TWO_PI / span
    cycles = freq * span / TWO_PI
    if window is None:
        if abs(cycles - round(cycles)) > 1e-6 * max(1.0, abs(cycles)):
            raise CoherentSamplingError(
                f"target frequency spans {cycles:.6g} cycles of the window; "
                "use an integer number of periods or window='flattop'"
            )
        w = np.ones(n)
        guard = 1
    elif window == "flattop":
        w = windows.flattop(n, sym=False)
        guard = 6
    else:
        raise InvalidParameterError(f"unknown window {window!r}")
    norm = w.sum()

    def amp(f):
        return complex(np.sum(x * w * np.exp(-1j * f * t)) / norm)

    A = amp(freq)
    side = max(abs(amp(freq - guard * bin_w)), abs(amp(freq + guard * bin_w)))
    leakage = side / abs(A) if abs(A) > 0 else float("inf")
    return SpectralLine(float(freq), A, float(leakage))


def line_spectrum(series, t):
    """All DFT bins ``(frequencies, amplitudes)`` with ``x = sum A_k e^{i w_k t}``."""
    t, dt = _check_uniform(t)
    x = np.asarray(series, dtype=complex)
    n = t.size
    A = np.fft.fft(x) / n
    w = TWO_PI * np.fft.fftfreq(n, d=dt)
    # refer phases to absolute time
    return w, A * np.exp(-1j * w * t[0])


@dataclass
class AmplitudeSeries:
    t: np.ndarray  # observation window, end point excluded
    C: np.ndarray
    period: float
    t_settle: float
    drift: float  # relative L_inf change between the last two periods


def _tone_period(tones, p):
    offsets = np.abs(tones.offsets[tones.offsets != 0]) if tones.tones else np.array([])
    if offsets.size == 0:
        return TWO_PI / p.gamma
    base = offsets.min()
    ratio = offsets / base
    if np.any(np.abs(ratio - np.round(ratio)) > 1e-9 * ratio):
        raise CoherentSamplingError("tone offsets must be integer multiples of the smallest one")
    return TWO_PI / base


def _slowest_rate(p, C0):
    pts = [(fp, v) for fp, v in classify_point(p) if v.is_stable]
    if not pts:
        return p.gamma
    if C0 is not None:
        fp, v = min(pts, key=lambda s: abs(s[0].B - C0))
        pts = [(fp, v)]
    rate = min(min(v.lambda_1.real, v.lambda_2.real) for _, v in pts)
    return min(p.gamma, rate)


def simulate_amplitude_ode(p, tones=None, C0=None, t_settle=None, n_obs=4, samples_per_period=64,
                           rtol=1e-10, steady_tol=1e-6):
    """Integrate ``dC/dt = -Theta(C, C*) + tones`` into a periodic steady state.

    Parameters
    ----------
    p : KerrParams
        Pump and resonator; the pump is the constant term of ``Theta``.
    tones : ToneSpec, optional
        Extra input tones.  Their offsets set the period ``T`` of the steady
        state (all offsets must be multiples of the smallest).
    C0 : complex, optional
        Initial amplitude (default 0).  Also picks the attractor whose
        decay rate sets the default settling time ``20 / min(gamma, Re lambda)``.
    n_obs : int
        Observation window in periods ``T``.

    Raises
    ------
    SteadyStateError
        If the last two periods differ by more than ``steady_tol`` relative.
    """
    tones = ToneSpec() if tones is None else tones
    T = _tone_period(tones, p)
    if t_settle is None:
        t_settle = 20.0 / _slowest_rate(p, C0)
    t_settle = T * np.ceil(t_settle / T)
    n_obs = int(n_obs)
    if n_obs < 2:
        raise InvalidParameterError("n_obs must be at least 2 periods")
    m = int(samples_per_period)
    t_end = t_settle + n_obs * T
    # one extra period before the window for the steady-state comparison
    t_eval = np.minimum(t_settle - T + T * np.arange((n_obs + 1) * m + 1) / m, t_end)
    w = tones.offsets
    a = -1j * np.sqrt(2 * p.gamma_1) * np.exp(1j * p.phi_1) * tones.amplitudes

    def rhs(t, C):
        out = -theta_c(C, p)
        if w.size:
            out = out + np.sum(a * np.exp(-1j * w * t))
        return out

    y0 = np.array([0.0 if C0 is None else C0], dtype=complex)
    scale = max(abs(y0[0]), abs(p.drive) / p.gamma, 1e-300)
    sol = solve(rhs, (0.0, t_end), y0, t_eval=t_eval, rtol=rtol, atol=rtol * scale * 1e-3,
                max_step=0.25 * T / 2)
    C = sol.y[:, 0]
    last, prev = C[-m - 1:-1], C[-2 * m - 1:-m - 1]
    drift = float(np.max(np.abs(last - prev)) / max(np.max(np.abs(C)), 1e-300))
    if drift > steady_tol:
        raise SteadyStateError(
            f"no periodic steady state after t_settle={t_settle:g}: period-to-period change {drift:.3g}",
            drift=drift, t_settle=t_settle,
        )
    return AmplitudeSeries(t=sol.t[m:-1], C=C[m:-1], period=T, t_settle=t_settle, drift=drift)


@dataclass
class IntermodCheck:
    kind: str
    delta: float
    b: float
    omega: float
    gain_analytic: float  # sqrt(G_I)
    gain_numeric: float
    rel_error: float
    leakage: float
    drift: float


def two_tone_gain(p, B, omega, ratio=1e-2, n_obs=4, samples_per_period=64, rtol=1e-10):
    """Idler/signal amplitude ratio ``sqrt(2 gamma_1) |c_idler| / |b_s|``.

    The signal ``b_s = ratio * |b|`` is applied at ``omega_p + omega``
    starting from the operating point ``B``; the idler is the line of ``C``
    at ``omega_p - omega``.
    """
    b_s = ratio * abs(p.b)
    tones = ToneSpec(((float(omega), complex(b_s)),))
    run = simulate_amplitude_ode(p, tones, C0=B, n_obs=n_obs,
                                 samples_per_period=samples_per_period, rtol=rtol)
    idler = dft_line(run.C, run.t, +omega)
    return np.sqrt(2 * p.gamma_1) * abs(idler.amplitude) / b_s, idler, run


def _excursion(p, fp, v, omega, ratio):
    """First-order signal excursion ``|a| + |d|`` of the amplitude around ``fp``."""
    s = np.sqrt(2 * p.gamma_1) * ratio * abs(p.b)
    den = abs((v.lambda_1 - 1j * omega) * (v.lambda_2 - 1j * omega))
    return s * (abs(np.conj(fp.W1) - 1j * omega) + abs(fp.W2)) / den


def default_intermod_points(p=None, ratio=1e-2, per_class=12):
    """Stable operating points for the two-tone check, spirals and nodes.

    Each entry is ``(params, fixed point, verdict, omega)``.  Candidates lie
    on both branches at five detunings past the onset and are kept when they
    are safely inside the small-signal regime: slowest decay rate at least
    ``gamma / 4`` (away from the saddle-node and spiral-node bifurcations)
    and a first-order signal excursion below a tenth of the distance to the
    saddle, so the signal cannot push the state across the separatrix.
    """
    if p is None:
        p = KerrParams(delta=0.0, gamma_1=0.5, gamma_2=0.5, kerr=-1e-2)
    bop = find_bop(p)
    spirals, nodes = [], []
    for dr in (1.5, 2.0, 2.5, 3.0, 4.0):
        q = p.replace(delta=dr * bop.delta)
        for x in np.linspace(0.05, 3.5, 400) * q.delta / abs(q.kerr):
            qk = q.replace(b=float(_drive_for_energy(x, q)))
            W1, W2 = linearize(steady_amplitude(x, qk), qk)
            v = eigenvalues(W1, W2, scale=q.gamma)
            if not v.is_stable or min(v.lambda_1.real, v.lambda_2.real) < 0.25 * q.gamma:
                continue
            pts = classify_point(qk)
            fp = next((f for f, _ in pts if abs(f.E - x) <= 1e-6 * x), None)
            if fp is None:
                continue
            saddles = [f.B for f, u in pts if u.kind == "Saddle"]
            gap = min((abs(fp.B - s) for s in saddles), default=np.inf)
            (spirals if v.kind == "StableSpiral" else nodes).append((qk, fp, v, gap))
    pick = []
    omegas = (0.5, 1.0, 2.0, 3.0)
    for group in (spirals, nodes):
        chosen = 0
        idx = np.unique(np.linspace(0, len(group) - 1, 3 * per_class).round().astype(int))
        for j, i in enumerate(idx):
            if chosen == per_class:
                break
            qk, fp, v, gap = group[i]
            for k in range(len(omegas)):
                w = omegas[(j + k) % len(omegas)] * p.gamma
                if _excursion(qk, fp, v, w, ratio) <= 0.1 * gap:
                    pick.append((qk, fp, v, w))
                    chosen += 1
                    break
    return pick


def _intermod_check(point, ratio, rtol):
    qk, fp, v, omega = point
    ref = float(np.sqrt(intermod_gain(omega, fp.W2, v.lambda_1, v.lambda_2, qk.gamma_1)))
    g, idler, run = two_tone_gain(qk, fp.B, omega, ratio=ratio, rtol=rtol)
    return IntermodCheck(v.kind, qk.delta, float(abs(qk.b)), float(omega), ref, float(g),
                         abs(g - ref) / ref, idler.leakage, run.drift)


def verify_intermod(points=None, ratio=1e-2, rtol=1e-10, n_jobs=1):
    """Compare ``sqrt(G_I)`` with the two-tone time-domain ratio.

    With ``n_jobs > 1`` the runs go to a process pool; results keep the
    input order.
    """
    points = default_intermod_points(ratio=ratio) if points is None else points
    if n_jobs and n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(_intermod_check, points, repeat(ratio), repeat(rtol)))
    return [_intermod_check(pt, ratio, rtol) for pt in points]


@dataclass
class SidebandCheck:
    l: int
    analytic: float
    numeric: float
    rel_error: float
    leakage: float
    drift: float


def _q_frame(traj, drive):
    """Transverse amplitude with the longitudinal phase modulation removed."""
    p = traj.transverse_rotating()
    a = modulation_index(drive)
    return p * np.exp(-1j * a * np.cos(drive.omega_m * traj.t))


def sideband_line(drive, damping, l, settle_periods=20, obs_periods=4, samples_per_period=64,
                  rel_tol=1e-10, frame="rotating"):
    """Numeric amplitude of the ``l``-th process at the drive frequency ``drive.omega``.

    The Bloch equation is integrated from equilibrium; in the frame that
    removes both the drive carrier and the modulation phase the ``l``-th
    Bessel component oscillates at ``-l omega_m``, where it is read off.
    Returns ``(line, drift)``.
    """
    T = TWO_PI / drive.omega_m if drive.omega_m > 0 else TWO_PI / damping.gamma_2
    m = int(samples_per_period)
    if frame == "lab":
        # resolve the carrier as well
        m = max(m, int(np.ceil(8 * max(abs(drive.omega), abs(drive.omega_c)) * T / TWO_PI)))
    n_tot = settle_periods + obs_periods
    t_eval = T * (settle_periods - 1 + np.arange((obs_periods + 1) * m) / m)
    traj = integrate_bloch(equilibrium(damping), drive, damping, n_tot * T, rel_tol=rel_tol,
                           t_eval=t_eval, frame=frame)
    q = _q_frame(traj, drive)
    last, prev = q[-m:], q[-2 * m:-m]
    drift = float(np.max(np.abs(last - prev)) / max(np.max(np.abs(q)), 1e-300))
    line = dft_line(q[m:], traj.t[m:], -l * drive.omega_m)
    return line, drift


def verify_sidebands(drive=FIG2_DRIVE, damping=FIG2_DAMPING, l_values=range(-3, 4), **kwargs):
    """Per-order relative error ``| |P_+|_analytic - |P_+|_numeric | / |P_+|_analytic``.

    Each order is driven at its own resonance ``omega = omega_c - l omega_m``.
    Magnitudes are compared; the phase carries the Bessel sign convention.
    """
    out = []
    for l in l_values:
        d = drive.replace(omega=drive.omega_c - l * drive.omega_m)
        ref = abs(sideband_amplitude(l, d, damping).P_plus)
        line, drift = sideband_line(d, damping, l, **kwargs)
        num = abs(line.amplitude)
        err = abs(num - ref) / ref if ref > 0 else abs(num)
        out.append(SidebandCheck(int(l), float(ref), float(num), float(err), line.leakage, drift))
    return out


def frame_agreement(drive=None, damping=FIG2_DAMPING, l=1, settle_periods=8, obs_periods=2,
                    rel_tol=1e-8, **kwargs):
    """Relative difference of a sideband line computed in the lab and rotating frames.

    The default drive is a scaled-down resonance (``omega_c = 2 pi 20 MHz``)
    so the lab-frame carrier can be resolved.
    """
    if drive is None:
        drive = FIG2_DRIVE.replace(omega_c=TWO_PI * 20e6, omega=TWO_PI * 20e6 - l * FIG2_DRIVE.omega_m)
    kwargs.update(settle_periods=settle_periods, obs_periods=obs_periods, rel_tol=rel_tol)
    rot, _ = sideband_line(drive, damping, l, frame="rotating", **kwargs)
    lab, _ = sideband_line(drive, damping, l, frame="lab", **kwargs)
    return abs(lab.amplitude - rot.amplitude) / abs(rot.amplitude)


@dataclass
class OracleReport:
    checks: list = field(default_factory=list)

    def add(self, name, error, limit, **extra):
        self.checks.append({"name": name, "error": float(error), "limit": float(limit),
                            "passed": bool(error <= limit), **extra})

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def as_dict(self):
        return {"passed": self.passed, "checks": self.checks}


def run_suite(quick=False, n_jobs=1):
    """The full oracle suite as a report (see :class:`OracleReport`)."""
    rep = OracleReport()
    t = np.arange(256) / 256 * 4 * TWO_PI
    tone = 0.3 - 0.7j
    rep.add("dft.pure_tone", abs(dft_line(tone * np.exp(3j * t), t, 3.0).amplitude - tone), 1e-10)

    exact = verify_sidebands(l_values=[0], drive=FIG2_DRIVE.replace(omega_b=0.0))
    rep.add("sidebands.l0_unmodulated", exact[0].rel_error, 1e-3)
    for c in verify_sidebands(l_values=[0] if quick else range(-3, 4)):
        rep.add(f"sidebands.l{c.l:+d}", c.rel_error, 0.05, analytic=c.analytic, numeric=c.numeric)
    rep.add("frames.lab_vs_rotating", frame_agreement(), 1e-3)
    if not quick:
        # the same formula with the modulation well resolved (omega_m = 5 Gamma_2)
        fast = FIG2_DRIVE.replace(omega_m=TWO_PI * 10e6, omega_b=TWO_PI * 10e6)
        for c in verify_sidebands(drive=fast, l_values=[1], settle_periods=40, obs_periods=4):
            rep.add("sidebands.resolved_l+1", c.rel_error, 0.01, analytic=c.analytic, numeric=c.numeric)

    points = default_intermod_points()
    if quick:
        points = points[::6]
    for k, c in enumerate(verify_intermod(points, n_jobs=n_jobs)):
        rep.add(f"intermod.{k:02d}.{c.kind}", c.rel_error, 0.05,
                gain_analytic=c.gain_analytic, gain_numeric=c.gain_numeric)
    return rep
