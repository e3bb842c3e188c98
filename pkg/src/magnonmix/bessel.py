"""Integer-order Bessel functions of the first kind via Miller's algorithm.

Backward recurrence ``J_{k-1} = (2k/x) J_k - J_{k+1}`` is started well above
both the requested order and the argument, then normalized with the sum rule
``J_0 + 2 * sum_k J_{2k} = 1``.
"""
import math

import numpy as np

from ._errors import InvalidParameterError

MAX_ARGUMENT = 1e4
_RESCALE = 1e250


def _start_order(n, x):
    m = max(n, x, 1.0)
    start = int(m + 20 + 6.0 * math.sqrt(m) + 2.0 * m ** (1 / 3))
    return start + (start % 2)


def bessel_j_orders(l_max, x):
    """Return ``[J_0(x), ..., J_{l_max}(x)]`` for ``|x| < 1e4``."""
    l_max = int(l_max)
    if l_max < 0:
        raise InvalidParameterError("l_max must be non-negative")
    x = float(x)
    if not abs(x) < MAX_ARGUMENT:
        raise InvalidParameterError(f"|x| must be below {MAX_ARGUMENT:g}, got {x!r}")
    out = np.zeros(l_max + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    ax = abs(x)
    if ax < 1e-8:
        # leading series term (x/2)^k / k!, exact to rounding; 2/x would overflow
        h = ax / 2
        term = 1.0
        for k in range(l_max + 1):
            out[k] = term * (1 - h * h / (k + 1))
            term *= h / (k + 1)
        if x < 0:
            out[1::2] *= -1.0
        return out
    start = _start_order(l_max, ax)
    two_over_x = 2.0 / ax
    j_next, j = 0.0, 1e-300
    norm = 0.0
    for k in range(start, 0, -1):
        j_prev = k * two_over_x * j - j_next
        j_next, j = j, j_prev
        # j now holds the unnormalized J_{k-1}
        if k - 1 <= l_max:
            out[k - 1] = j
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
        if abs(j) > _RESCALE:
            j /= _RESCALE
            j_next /= _RESCALE
            norm /= _RESCALE
            out /= _RESCALE
    norm += j  # J_0 term
    out /= norm
    if x < 0:
        out[1::2] *= -1.0
    return out


def bessel_jl(l, x):
    """Bessel function of the first kind ``J_l(x)`` for integer ``l``.

    Accurate to about 1e-12 absolute for ``|x| < 1e4``.
    """
    l = int(l)
    n = abs(l)
    value = bessel_j_orders(n, x)[n]
    if l < 0 and n % 2:
        value = -value
    return float(value)
