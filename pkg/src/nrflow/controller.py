"""Newton-Raphson-flow control laws.

The continuous law steers ``u`` along the Newton direction for ``g(u) = r``::

    udot = alpha * J(u)^-1 (r_future - g(u))

with ``r_future = r(t)`` for memoryless plants and ``r(t + T)`` for dynamic
plants (``reference_timing="preview"``). ``discrete_nr_step`` is the plain
Newton iterate of the discrete-time variable-gain integrator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import PlantModel, _as_vector, eval_drift
from .errors import ArgumentError, SingularJacobianError
from .predictor import SELECTORS, SINGULAR_TOL, Prediction, is_singular, predict, resolve_method

TIMINGS = ("preview", "current")


@dataclass(frozen=True)
class ControllerConfig:
    T: float = 1.0
    alpha: float = 1.0
    dt: float = 0.01
    inner_steps: int = 100
    jacobian_method: str = "auto"
    singularity_tol: float = SINGULAR_TOL
    # "current" feeds r(t) instead of r(t + T) to dynamic plants.
    reference_timing: str = "preview"

    def __post_init__(self):
        if not self.T > 0:
            raise ArgumentError(f"T must be positive, got {self.T}")
        if not self.alpha > 0:
            raise ArgumentError(f"alpha must be positive, got {self.alpha}")
        if not self.dt > 0:
            raise ArgumentError(f"dt must be positive, got {self.dt}")
        if int(self.inner_steps) != self.inner_steps or self.inner_steps < 1:
            raise ArgumentError(f"inner_steps must be a positive integer, got {self.inner_steps}")
        if self.jacobian_method not in SELECTORS:
            raise ArgumentError(
                f"jacobian_method must be one of {SELECTORS}, got {self.jacobian_method!r}"
            )
        if self.reference_timing not in TIMINGS:
            raise ArgumentError(
                f"reference_timing must be one of {TIMINGS}, got {self.reference_timing!r}"
            )
        if not self.singularity_tol > 0:
            raise ArgumentError("singularity_tol must be positive")


@dataclass
class ControlState:
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.u = np.atleast_1d(np.asarray(self.u, dtype=float))
        if not np.all(np.isfinite(self.u)):
            raise ArgumentError("control must be finite")


def newton_direction(J, residual, tol=SINGULAR_TOL, t=None) -> np.ndarray:
    """Solve ``J d = residual`` without forming the inverse."""
    J = np.atleast_2d(np.asarray(J, dtype=float))
    residual = np.atleast_1d(np.asarray(residual, dtype=float))
    if J.shape != (residual.shape[0], residual.shape[0]):
        raise ArgumentError(f"Jacobian shape {J.shape} does not match residual {residual.shape}")
    if is_singular(J, tol):
        stamp = "" if t is None else f" at t={t:.6g}"
        raise SingularJacobianError(f"singular Jacobian{stamp}: det={np.linalg.det(J):.3e}",
                                    matrix=J, time=t)
    if J.shape[0] == 1:
        return residual / J[0, 0]
    return np.linalg.solve(J, residual)


def control_rate(prediction: Prediction, r_future, alpha=1.0, tol=SINGULAR_TOL, t=None) -> np.ndarray:
    residual = np.atleast_1d(np.asarray(r_future, dtype=float)) - prediction.g_value
    return alpha * newton_direction(prediction.jacobian, residual, tol, t)


def discrete_nr_step(u_prev, y_prev, J_prev, r, tol=SINGULAR_TOL) -> np.ndarray:
    """``u_n = u_{n-1} + J^-1 (r - y_{n-1})``."""
    u_prev = np.atleast_1d(np.asarray(u_prev, dtype=float))
    y_prev = np.atleast_1d(np.asarray(y_prev, dtype=float))
    return u_prev + newton_direction(J_prev, np.atleast_1d(r) - y_prev, tol)


def newton_iterate(plant: PlantModel, u0, r, max_iter=50, tol=1e-10):
    """Run the discrete variable-gain integrator on a memoryless plant.

    Returns ``(u, history)`` where ``history`` lists ``|g(u_n) - r|`` for
    n = 0, 1, ...; stops once the residual drops below ``tol``.
    """
    u = _as_vector(u0, plant.k, "u0")
    r = _as_vector(r, plant.k, "r")
    y, J = plant.g(u), plant.g_jacobian(u)
    history = [float(np.linalg.norm(r - y))]
    for _ in range(max_iter):
        if history[-1] < tol:
            break
        u = discrete_nr_step(u, y, J, r)
        y, J = plant.g(u), plant.g_jacobian(u)
        history.append(float(np.linalg.norm(r - y)))
    return u, history


def reference_target(plant: PlantModel, reference, t: float, cfg: ControllerConfig) -> np.ndarray:
    if plant.is_memoryless or cfg.reference_timing == "current":
        return np.atleast_1d(reference(t))
    return np.atleast_1d(reference(t + cfg.T))


def advance(plant, x, u, t, reference, cfg, method):
    """One simultaneous Euler step of plant and controller.

    Returns ``(x_next, u_next, udot, prediction)``; both updates use
    start-of-step values.
    """
    pred = predict(plant, x, u, cfg.T, cfg.inner_steps, method)
    udot = control_rate(pred, reference_target(plant, reference, t, cfg), cfg.alpha,
                        cfg.singularity_tol, t)
    if plant.is_memoryless:
        x_next = x
    else:
        x_next = x + cfg.dt * eval_drift(plant, x, u)
    return x_next, u + cfg.dt * udot, udot, pred


def closed_loop_step(plant: PlantModel, state: ControlState, x, reference, cfg: ControllerConfig):
    """Advance ``(x, u)`` by one outer step ``cfg.dt``; returns ``(x_next, u_next)``."""
    x = np.zeros(0) if plant.is_memoryless else _as_vector(x, plant.n, "x")
    u = _as_vector(state.u, plant.k, "u")
    method = resolve_method(plant, cfg.jacobian_method)
    x_next, u_next, _, _ = advance(plant, x, u, state.t, reference, cfg, method)
    return x_next, u_next
