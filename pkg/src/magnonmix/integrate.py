"""Dormand-Prince 5(4) Runge-Kutta integrator with dense output.

Works on real or complex state arrays of any shape.  The fifth-order
solution is propagated (local extrapolation) and the embedded fourth-order
solution supplies the error estimate.  A fixed-step mode is provided for
convergence studies.
"""
from dataclasses import dataclass

import numpy as np

from ._errors import InvalidParameterError, StiffnessError

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4
E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# Shampine's continuous extension, coefficients of theta, theta^2, theta^3, theta^4.
P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)
ORDER = 5
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray  # shape (len(t),) + y0.shape
    n_steps: int
    n_rejected: int
    n_evals: int


def _rk_step(fun, t, y, f, h):
    K = [f]
    for s in range(1, 7):
        dy = sum(a * k for a, k in zip(A[s], K) if a != 0.0)
        K.append(fun(t + C[s] * h, y + h * dy))
        if s == 5:
            # stage 7 is evaluated at the propagated solution (FSAL)
            y_new = y + h * sum(b * k for b, k in zip(B, K) if b != 0.0)
            K.append(fun(t + h, y_new))
            break
    err = h * sum(e * k for e, k in zip(E, K) if e != 0.0)
    return y_new, K, err


def _error_norm(err, y, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(fun, t0, y0, f0, direction, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = fun(t0 + direction * h0, y1)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / ORDER)
    return min(100 * h0, h1)


def _dense(y, h, K, theta):
    Q = np.tensordot(P, np.stack(K), axes=([0], [0]))  # (4,) + shape
    powers = theta ** np.arange(1, 5)
    return y + h * np.tensordot(powers, Q, axes=([0], [0]))


def solve(fun, t_span, y0, t_eval=None, rtol=1e-8, atol=1e-12, max_step=np.inf,
          first_step=None, fixed_step=None, max_steps=10_000_000):
    """Integrate ``dy/dt = fun(t, y)`` over ``t_span``.

    Parameters
    ----------
    fun : callable
        Right-hand side returning an array shaped like ``y0``.
    t_span : (float, float)
        Start and end time; integration runs forward only.
    y0 : array_like
        Initial state (real or complex).
    t_eval : array_like, optional
        Sorted output times inside ``t_span``.  Values between steps come
        from the fourth-order continuous extension.  If omitted, every
        accepted step is returned.
    rtol, atol : float
        Local error tolerances; ``rtol`` must lie in (1e-13, 1e-2).
    fixed_step : float, optional
        Take uniform steps of (at most) this size without error control.

    Raises
    ------
    StiffnessError
        If the adaptive step falls below the floating-point resolution of t.
    """
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise InvalidParameterError("t_span must be increasing")
    if fixed_step is None and not (1e-13 < rtol < 1e-2):
        raise InvalidParameterError(f"rtol={rtol!r} outside (1e-13, 1e-2)")
    y = np.array(y0, dtype=np.result_type(np.asarray(y0), float), copy=True)
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if np.any(np.diff(t_eval) < 0) or (t_eval.size and (t_eval[0] < t0 or t_eval[-1] > t1)):
            raise InvalidParameterError("t_eval must be sorted and lie inside t_span")
    n_evals = 1
    f = np.asarray(fun(t0, y))
    if f.dtype.kind == "c" and y.dtype.kind != "c":
        y = y.astype(complex)

    ts, ys = [], []
    if t_eval is None:
        ts.append(t0)
        ys.append(y.copy())
        next_idx = 0
    else:
        next_idx = 0
        while next_idx < t_eval.size and t_eval[next_idx] == t0:
            ts.append(t0)
            ys.append(y.copy())
            next_idx += 1

    if fixed_step is not None:
        n = int(np.ceil((t1 - t0) / fixed_step - 1e-12))
        h_nominal = (t1 - t0) / n
    else:
        h_nominal = first_step or _initial_step(fun, t0, y, f, 1.0, rtol, atol)
        n_evals += 1
    h = min(h_nominal, max_step)

    t = t0
    n_steps = n_rejected = 0
    while t < t1:
        if n_steps >= max_steps:
            raise StiffnessError(f"exceeded max_steps={max_steps} at t={t!r}", t=t, h=h)
        h = min(h, t1 - t)
        if fixed_step is not None:
            if t + h > t1 or t1 - (t + h) < 1e-12 * h_nominal:
                h = t1 - t
            y_new, K, _ = _rk_step(fun, t, y, f, h)
            n_evals += 6
        else:
            while True:
                if h < 10 * np.spacing(max(abs(t), abs(t1))):
                    raise StiffnessError(
                        f"step size underflow at t={t!r} (h={h!r}); problem may be stiff",
                        t=t, h=h,
                    )
                with np.errstate(over="ignore", invalid="ignore"):
                    # an oversized trial step may overflow; it is rejected below
                    y_new, K, err = _rk_step(fun, t, y, f, h)
                    err_norm = _error_norm(err, y, y_new, rtol, atol)
                n_evals += 6
                if not np.isfinite(err_norm):
                    h *= MIN_FACTOR
                    n_rejected += 1
                    continue
                if err_norm <= 1.0:
                    factor = MAX_FACTOR if err_norm == 0 else min(
                        MAX_FACTOR, SAFETY * err_norm ** (-1 / ORDER))
                    break
                h *= max(MIN_FACTOR, SAFETY * err_norm ** (-1 / ORDER))
                n_rejected += 1
        t_new = t + h if (t1 - t - h) > 0 else t1
        if t_eval is None:
            ts.append(t_new)
            ys.append(y_new.copy())
        else:
            while next_idx < t_eval.size and t_eval[next_idx] <= t_new:
                te = t_eval[next_idx]
                ys.append(y_new.copy() if te == t_new else _dense(y, h, K, (te - t) / h))
                ts.append(te)
                next_idx += 1
        t, y, f = t_new, y_new, K[6]
        n_steps += 1
        if fixed_step is None:
            h = min(h * factor, max_step)
    if not np.all(np.isfinite(y)):
        raise StiffnessError("integration produced non-finite values", t=t, h=h)
    return Solution(np.array(ts), np.array(ys), n_steps, n_rejected, n_evals)
