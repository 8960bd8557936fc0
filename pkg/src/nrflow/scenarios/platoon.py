"""Platoon of single-integrator agents on a circle.

Agent 1 follows a point moving counter-clockwise on the circle; agent i > 1
aims at the point a chord ``d`` behind agent i-1. Every agent runs the
lookahead controller with the exact single-integrator predictor
``g(u) = x + T u`` (Jacobian ``T I``). All agents read the same start-of-step
snapshot and are committed together.
"""

from __future__ import annotations

import math

import numpy as np

from ..controller import control_rate
from ..errors import ArgumentError
from ..integration import DIVERGENCE_GUARD
from ..predictor import Prediction
from .references import circle_point
from .simulate import ScenarioSpec, Trajectory


def follower_reference(pred_position, center, r_circ: float, d: float) -> np.ndarray:
    """Point on the circle a chord ``d`` clockwise of the predecessor's angle.

    Only the predecessor's angle about ``center`` matters; it need not lie on
    the circle.
    """
    if not 0 <= d < 2 * r_circ:
        raise ArgumentError(f"spacing d={d} must satisfy 0 <= d < 2 * r_circ")
    rel = np.asarray(pred_position, dtype=float) - np.asarray(center, dtype=float)
    if math.hypot(rel[0], rel[1]) < 1e-12:
        raise ArgumentError("predecessor sits at the circle center; its angle is undefined")
    theta = math.atan2(rel[1], rel[0]) - 2.0 * math.asin(d / (2.0 * r_circ))
    return np.asarray(center, dtype=float) + r_circ * np.array([math.cos(theta), math.sin(theta)])


def integrator_prediction(x, u, T) -> Prediction:
    return Prediction(x + T * u, T * np.eye(x.shape[0]), "integrator-closed-form")


def initial_positions(spec) -> np.ndarray:
    """Agents at angles 0, -gap, -2 gap, ...; followers radially perturbed."""
    p = spec.platoon
    rng = np.random.default_rng(p.seed)
    angles = -p.initial_gap * np.arange(p.agents)
    radii = np.full(p.agents, p.radius)
    if p.agents > 1:
        radii[1:] += rng.uniform(-p.radial_perturbation, p.radial_perturbation, p.agents - 1)
    c = np.asarray(p.center, dtype=float)
    return c + np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])


def simulate_platoon(spec: ScenarioSpec, positions=None, controls=None):
    """Run the platoon; returns ``(trajectories, times, spacings)``.

    ``spacings[n, i]`` is ``||x_{i+1} - x_i||`` (0-based agents) at ``times[n]``.
    """
    p = spec.platoon
    if p is None:
        raise ArgumentError("scenario has no platoon section")
    cfg = spec.controller
    T, alpha, dt = cfg.T, cfg.alpha, cfg.dt
    center = np.asarray(p.center, dtype=float)
    X = initial_positions(spec) if positions is None else np.array(positions, dtype=float)
    U = np.zeros_like(X) if controls is None else np.array(controls, dtype=float)
    na = X.shape[0]
    if X.shape != (na, 2) or na != p.agents:
        raise ArgumentError(f"positions must be an ({p.agents}, 2) array")

    rel0 = X[0] - center
    leader_ref = circle_point(center, p.radius, p.leader_speed / p.radius,
                              math.atan2(rel0[1], rel0[0]))
    lead_time = T if cfg.reference_timing == "preview" else 0.0

    steps = int(round(spec.duration / dt))
    pos, ctl, refs = [], [], []
    status, message = "ok", ""
    for n in range(steps + 1):
        t = n * dt
        R = np.empty_like(X)
        R[0] = leader_ref(t + lead_time)
        for i in range(1, na):
            base = X[i - 1] + T * U[i - 1] if p.follower_mode == "lookahead" else X[i - 1]
            R[i] = follower_reference(base, center, p.radius, p.spacing)
        pos.append(X.copy())
        ctl.append(U.copy())
        refs.append(R)
        if n == steps:
            break
        Udot = np.array([
            control_rate(integrator_prediction(X[i], U[i], T), R[i], alpha, cfg.singularity_tol, t)
            for i in range(na)
        ])
        X, U = X + dt * U, U + dt * Udot
        if not np.max(np.abs(np.concatenate([X.ravel(), U.ravel()]))) <= DIVERGENCE_GUARD:
            status, message = "diverged", f"t={t + dt:.6g}: platoon state exceeded guard"
            break

    pos, ctl, refs = np.asarray(pos), np.asarray(ctl), np.asarray(refs)
    times = np.arange(len(pos)) * dt
    trajectories = [
        Trajectory(times, pos[:, i], ctl[:, i], pos[:, i].copy(), refs[:, i], dt, status, message)
        for i in range(na)
    ]
    spacings = np.linalg.norm(pos[:, 1:] - pos[:, :-1], axis=2)
    return trajectories, times, spacings
