"""Compiled RK4 march for the similarity ODE.

State columns are ``(eta, H, H', K, I)`` where ``I`` is the running
integral of ``2*pi*eta*H``.
"""

import math

import numpy as np
from numba import njit

# termination codes returned by ``march``
FRONT = 0
TURNED = 1
ETA_MAX = 2
UNDERFLOW = 3
MAX_STEPS = 4

TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def _deriv(eta, h, hp, k, lam):
    kp = -(eta ** (1.0 / lam)) * h ** (-(lam + 1.0) / lam)
    return hp, -k - hp / eta, kp, TWO_PI * eta * h


@njit(cache=True, nogil=True)
def _rk4(eta, h, hp, k, i, d, lam):
    """One classical RK4 step; returns ok=False if a stage height is not positive."""
    a1, b1, c1, e1 = _deriv(eta, h, hp, k, lam)
    h2 = h + 0.5 * d * a1
    if h2 <= 0.0:
        return False, h, hp, k, i
    a2, b2, c2, e2 = _deriv(eta + 0.5 * d, h2, hp + 0.5 * d * b1, k + 0.5 * d * c1, lam)
    h3 = h + 0.5 * d * a2
    if h3 <= 0.0:
        return False, h, hp, k, i
    a3, b3, c3, e3 = _deriv(eta + 0.5 * d, h3, hp + 0.5 * d * b2, k + 0.5 * d * c2, lam)
    h4 = h + d * a3
    if h4 <= 0.0:
        return False, h, hp, k, i
    a4, b4, c4, e4 = _deriv(eta + d, h4, hp + d * b3, k + d * c3, lam)
    s = d / 6.0
    hn = h + s * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    if hn <= 0.0:
        return False, h, hp, k, i
    return (
        True,
        hn,
        hp + s * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
        k + s * (c1 + 2.0 * c2 + 2.0 * c3 + c4),
        i + s * (e1 + 2.0 * e2 + 2.0 * e3 + e4),
    )


@njit(cache=True, nogil=True)
def march(lam, start, h_stop, step_fraction, step_min, step_max, eta_max,
          store, max_steps):
    """Advance from ``start`` until a termination rule fires.

    With ``store`` false only the last two samples are kept, which is all
    the shooting loop needs.
    """
    cap = 65536 if store else 2
    buf = np.empty((cap, 5))
    eta, h, hp, k, i = start[0], start[1], start[2], start[3], start[4]
    buf[0, 0] = eta
    buf[0, 1] = h
    buf[0, 2] = hp
    buf[0, 3] = k
    buf[0, 4] = i
    n = 1
    code = MAX_STEPS
    steps = 0
    while steps < max_steps:
        if h < h_stop:
            code = FRONT
            break
        if eta > eta_max:
            code = ETA_MAX
            break
        d = step_fraction * h
        if d < step_min:
            d = step_min
        elif d > step_max:
            d = step_max
        ok, hn, hpn, kn, i_n = _rk4(eta, h, hp, k, i, d, lam)
        while not ok:
            d *= 0.5
            if d < step_min:
                break
            ok, hn, hpn, kn, i_n = _rk4(eta, h, hp, k, i, d, lam)
        if not ok:
            code = UNDERFLOW
            break
        turned = hp < 0.0 and hpn >= 0.0
        eta += d
        h, hp, k, i = hn, hpn, kn, i_n
        steps += 1
        if store:
            if n == cap:
                grown = np.empty((2 * cap, 5))
                grown[:cap] = buf
                buf = grown
                cap *= 2
            slot = n
            n += 1
        else:
            if n == 2:
                buf[0] = buf[1]
            slot = 1
            n = 2
        buf[slot, 0] = eta
        buf[slot, 1] = h
        buf[slot, 2] = hp
        buf[slot, 3] = k
        buf[slot, 4] = i
        if turned and h > 10.0 * h_stop:
            code = TURNED
            break
    return buf[:n].copy(), code
