"""Closed-loop simulation and tracking metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from ..controller import ControllerConfig, advance
from ..dynamics import PlantModel, eval_output, plant_from_params
from ..errors import ArgumentError, DivergenceError, SingularJacobianError
from ..integration import DIVERGENCE_GUARD
from ..predictor import resolve_method
from .references import ReferenceSignal


@dataclass
class Trajectory:
    """Uniformly sampled record of one run.

    ``status`` is ``"ok"``, ``"diverged"`` (overflow guard tripped, also sets
    ``diverged``) or ``"singular"``; failed runs keep every sample recorded
    before the failure.
    """

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    outputs: np.ndarray
    references: np.ndarray
    dt: float
    status: str = "ok"
    message: str = ""
    peak_control_rate: float = 0.0

    @property
    def diverged(self) -> bool:
        return self.status == "diverged"

    def __len__(self):
        return len(self.times)

    @property
    def errors(self) -> np.ndarray:
        """``||r(t_n) - y(t_n)||`` per sample."""
        diff = self.references - self.outputs
        return np.abs(diff[:, 0]) if diff.shape[1] == 1 else np.linalg.norm(diff, axis=1)


@dataclass(frozen=True)
class PlatoonSpec:
    agents: int = 8
    center: tuple = (0.0, 0.0)
    radius: float = 28.0
    spacing: float = 14.0
    # default: one revolution per 40 s
    leader_speed: float = 2 * math.pi * 28.0 / 40.0
    initial_gap: float = 0.7
    radial_perturbation: float = 0.5
    seed: int = 0
    # "lookahead": target behind the predecessor's own T-ahead prediction;
    # "hold": target behind its current position
    follower_mode: str = "lookahead"

    def __post_init__(self):
        if self.agents < 1:
            raise ArgumentError("platoon needs at least one agent")
        if not self.radius > 0:
            raise ArgumentError("circle radius must be positive")
        if not 0 <= self.spacing < 2 * self.radius:
            raise ArgumentError("spacing d must satisfy 0 <= d < 2 * radius (chord must exist)")
        if self.follower_mode not in ("lookahead", "hold"):
            raise ArgumentError(f"unknown follower_mode {self.follower_mode!r}")
        if self.initial_gap * (self.agents - 1) >= 2 * math.pi:
            raise ArgumentError("initial angular gaps wrap past a full circle")


@dataclass(frozen=True)
class ScenarioSpec:
    plant_kind: str
    plant_params: dict
    reference: ReferenceSignal
    controller: ControllerConfig
    duration: float
    x0: Optional[tuple] = None
    u0: Optional[tuple] = None
    name: str = "run"
    expect_stable: bool = False
    platoon: Optional[PlatoonSpec] = None

    def __post_init__(self):
        if not self.duration > 0:
            raise ArgumentError(f"duration must be positive, got {self.duration}")

    @cached_property
    def plant(self) -> PlantModel:
        return plant_from_params(self.plant_kind, self.plant_params)

    def initial_state(self) -> np.ndarray:
        n = self.plant.n
        x0 = np.zeros(n) if self.x0 is None else np.asarray(self.x0, dtype=float)
        if x0.shape != (n,):
            raise ArgumentError(f"x0 must have dimension {n}")
        return x0

    def initial_control(self) -> np.ndarray:
        k = self.plant.k
        u0 = np.zeros(k) if self.u0 is None else np.atleast_1d(np.asarray(self.u0, dtype=float))
        if u0.shape != (k,):
            raise ArgumentError(f"u0 must have dimension {k}")
        return u0


def simulate_closed_loop(spec: ScenarioSpec) -> Trajectory:
    """Iterate the plant/controller loop for ``spec.duration``.

    Unstable runs are returned, not raised: the trajectory stops at the last
    sample before the guard tripped (or the Jacobian went singular).
    """
    plant = spec.plant
    cfg = spec.controller
    ref = spec.reference
    if ref.dim != plant.k:
        raise ArgumentError(f"reference dimension {ref.dim} does not match plant output {plant.k}")
    method = resolve_method(plant, cfg.jacobian_method)
    steps = int(round(spec.duration / cfg.dt))
    x = spec.initial_state()
    u = spec.initial_control()

    times, xs, us, ys, rs = [], [], [], [], []
    status, message, peak = "ok", "", 0.0
    for i in range(steps + 1):
        t = i * cfg.dt
        y = plant.g(u) if plant.is_memoryless else eval_output(plant, x)
        times.append(t)
        xs.append(x)
        us.append(u)
        ys.append(y)
        rs.append(ref(t))
        if i == steps:
            break
        try:
            x_next, u_next, udot, _ = advance(plant, x, u, t, ref, cfg, method)
        except DivergenceError as exc:
            status, message = "diverged", f"t={t:.6g}: {exc}"
            break
        except SingularJacobianError as exc:
            status, message = "singular", str(exc)
            break
        peak = max(peak, float(np.max(np.abs(udot))))
        big = max(np.max(np.abs(x_next), initial=0.0), np.max(np.abs(u_next)))
        if not big <= DIVERGENCE_GUARD:
            status = "diverged"
            message = f"t={t + cfg.dt:.6g}: closed-loop state exceeded {DIVERGENCE_GUARD:g}"
            break
        x, u = x_next, u_next

    k = plant.k
    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(xs, dtype=float).reshape(len(times), plant.n),
        controls=np.asarray(us, dtype=float).reshape(len(times), k),
        outputs=np.asarray(ys, dtype=float).reshape(len(times), k),
        references=np.asarray(rs, dtype=float).reshape(len(times), k),
        dt=cfg.dt,
        status=status,
        message=message,
        peak_control_rate=peak,
    )


# --- metrics ----------------------------------------------------------------


def _window_indices(traj: Trajectory, t0: float, t1: float):
    if not t0 < t1:
        raise ArgumentError(f"empty window [{t0}, {t1}]")
    start, end = traj.times[0], traj.times[-1]
    if t0 < start - 1e-9 or t1 > end + 1e-9:
        raise ArgumentError(f"window [{t0}, {t1}] outside trajectory span [{start}, {end:.6g}]")
    i0 = int(round((t0 - start) / traj.dt))
    i1 = int(round((t1 - start) / traj.dt))
    return i0, i1


def tracking_error_integral(traj: Trajectory, t0: float, t1: float) -> float:
    """Left Riemann sum of ``|r - y| dt`` over ``[t0, t1)``."""
    i0, i1 = _window_indices(traj, t0, t1)
    return float(np.sum(traj.errors[i0:i1]) * traj.dt)


def mean_tracking_error(traj: Trajectory, t0: float, t1: float) -> float:
    i0, i1 = _window_indices(traj, t0, t1)
    return float(np.mean(traj.errors[i0 : i1 + 1]))


def asymptotic_error_sup(traj: Trajectory, tail_fraction: float = 0.25) -> float:
    """Max tracking error over the last ``tail_fraction`` of the run."""
    if not 0 < tail_fraction < 1:
        raise ArgumentError(f"tail_fraction must lie in (0, 1), got {tail_fraction}")
    t_end = traj.times[-1]
    cut = t_end - tail_fraction * (t_end - traj.times[0])
    return float(np.max(traj.errors[traj.times >= cut - 1e-9]))


def window_amplitude(traj: Trajectory, t0: float, t1: float, center: float = 0.0, component: int = 0) -> float:
    """``max |y - center|`` over ``[t0, t1]``."""
    i0, i1 = _window_indices(traj, t0, t1)
    return float(np.max(np.abs(traj.outputs[i0 : i1 + 1, component] - center)))


def window_amplitudes(traj: Trajectory, width: float, center: float = 0.0, component: int = 0):
    """Amplitudes over consecutive windows ``[0, w], [w, 2w], ...`` that fit the run."""
    out = []
    t = traj.times[0]
    while t + width <= traj.times[-1] + 1e-9:
        out.append(window_amplitude(traj, t, t + width, center, component))
        t += width
    return out
