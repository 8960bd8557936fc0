"""Constant-input forward-Euler loops for the built-in plants.

Each kernel advances ``steps`` Euler steps of size ``h`` with the input held
fixed and returns ``(x_final, bad_step)``; ``bad_step`` is ``-1`` on success,
otherwise the index of the first step whose state norm exceeded ``guard`` or
went non-finite. The state returned on failure is the offending state.

The ``*_py`` functions are the uncompiled reference path. ``ACTIVE`` maps kind
names to whichever variant the env flag selects.
"""

import math

import numpy as np

from . import _jit


def euler_position_py(a, r_slope, x0, u, h, steps, guard):
    x1 = x0[0]
    x2 = x0[1]
    uu = u[0]
    bad = -1
    for j in range(steps):
        dx1 = x2 - r_slope
        dx2 = a * x2 + uu
        x1 = x1 + h * dx1
        x2 = x2 + h * dx2
        if not (abs(x1) <= guard and abs(x2) <= guard):
            bad = j
            break
    out = np.empty(2)
    out[0] = x1
    out[1] = x2
    return out, bad


def euler_pendulum_py(a, b, x0, u, h, steps, guard):
    x1 = x0[0]
    x2 = x0[1]
    uu = u[0]
    bad = -1
    for j in range(steps):
        dx1 = x2
        dx2 = a * math.sin(x1) - b * x2 + uu
        x1 = x1 + h * dx1
        x2 = x2 + h * dx2
        if not (abs(x1) <= guard and abs(x2) <= guard):
            bad = j
            break
    out = np.empty(2)
    out[0] = x1
    out[1] = x2
    return out, bad


def euler_integrator_py(x0, u, h, steps, guard):
    x = x0.copy()
    n = x.shape[0]
    bad = -1
    for j in range(steps):
        norm2 = 0.0
        for i in range(n):
            x[i] = x[i] + h * u[i]
            norm2 += x[i] * x[i]
        if not (norm2 <= guard * guard):
            bad = j
            break
    return x, bad


def euler_lti_py(A, bu, x0, h, steps, guard):
    # bu = B @ u, precomputed by the caller
    x = x0.copy()
    bad = -1
    for j in range(steps):
        x = x + h * (A @ x + bu)
        if not (np.sqrt(np.sum(x * x)) <= guard):
            bad = j
            break
    return x, bad


PURE = {
    "position": euler_position_py,
    "pendulum": euler_pendulum_py,
    "integrator": euler_integrator_py,
    "lti": euler_lti_py,
}


def compiled():
    """Numba-compiled kernels, independent of the env flag."""
    return {name: _jit.force_njit(fn) for name, fn in PURE.items()}


ACTIVE = compiled() if _jit.USE_NUMBA else dict(PURE)
