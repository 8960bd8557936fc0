"""Fixed-step forward Euler, for both the outer loop and the lookahead."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import PlantModel, _as_vector, eval_drift
from .errors import ArgumentError, DivergenceError, NumericError, UnsupportedOperationError
from .kernels import ACTIVE

DIVERGENCE_GUARD = 1e12


@dataclass(frozen=True)
class StepSpec:
    """Outer step ``dt`` and lookahead step ratio ``inner_dt / T``."""

    dt: float = 0.01
    inner_ratio: float = 0.01

    def __post_init__(self):
        if not self.dt > 0:
            raise ArgumentError(f"dt must be positive, got {self.dt}")
        if not 0 < self.inner_ratio <= 1:
            raise ArgumentError(f"inner_ratio must lie in (0, 1], got {self.inner_ratio}")
        n = 1.0 / self.inner_ratio
        if abs(n - round(n)) > 1e-9:
            raise ArgumentError(f"1/inner_ratio must be an integer, got {n}")

    @property
    def inner_steps(self) -> int:
        return int(round(1.0 / self.inner_ratio))


def euler_step(f_value, x, dt, *, step=None, t=None):
    """One forward-Euler update ``x + dt * f_value``."""
    if not dt > 0:
        raise ArgumentError(f"dt must be positive, got {dt}")
    f_value = np.asarray(f_value, dtype=float)
    x = np.asarray(x, dtype=float)
    if not (np.all(np.isfinite(f_value)) and np.all(np.isfinite(x))):
        where = "" if step is None else f" at step {step}"
        when = "" if t is None else f" (t={t:.6g})"
        raise NumericError(f"non-finite value in Euler update{where}{when}")
    return x + dt * f_value


def integrate_const_input(plant: PlantModel, x0, u, horizon: float, steps: int = 100) -> np.ndarray:
    """Euler approximation of the flow from ``x0`` over ``horizon`` with ``u`` held fixed.

    Built-in plant kinds run through the compiled kernels; generic plants fall
    back to a Python loop over ``eval_drift``.

    Raises
    ------
    DivergenceError
        If the state norm exceeds ``DIVERGENCE_GUARD`` (or goes non-finite).
    """
    if plant.is_memoryless:
        raise UnsupportedOperationError("memoryless plants cannot be integrated")
    steps = int(steps)
    if steps < 1:
        raise ArgumentError(f"steps must be >= 1, got {steps}")
    if not horizon > 0:
        raise ArgumentError(f"horizon must be positive, got {horizon}")
    x0 = _as_vector(x0, plant.n, "x0")
    u = _as_vector(u, plant.k, "u")
    h = horizon / steps
    p = plant.params
    kind = plant.kind

    if kind == "position":
        x, bad = ACTIVE["position"](p["a"], p["r_slope"], x0, u, h, steps, DIVERGENCE_GUARD)
    elif kind == "pendulum":
        x, bad = ACTIVE["pendulum"](p["a"], p["b"], x0, u, h, steps, DIVERGENCE_GUARD)
    elif kind == "integrator":
        x, bad = ACTIVE["integrator"](x0, u, h, steps, DIVERGENCE_GUARD)
    elif kind == "lti":
        A = np.ascontiguousarray(p["A"])
        bu = np.ascontiguousarray(p["B"] @ u)
        x, bad = ACTIVE["lti"](A, bu, x0, h, steps, DIVERGENCE_GUARD)
    else:
        x, bad = x0.copy(), -1
        for j in range(steps):
            x = x + h * eval_drift(plant, x, u)
            if not np.linalg.norm(x) <= DIVERGENCE_GUARD:
                bad = j
                break

    if bad >= 0:
        raise DivergenceError(
            f"lookahead state norm exceeded {DIVERGENCE_GUARD:g} at inner step {bad}",
            step=int(bad),
        )
    return x
