"""Named experiment sets: position control, inverted pendulum, platoon, memoryless bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..controller import ControllerConfig
from ..errors import ArgumentError
from ..lti_analysis import position_stability_condition
from . import output
from .platoon import simulate_platoon
from .references import ReferenceSignal, constant, ramp_residual, sinusoid
from .simulate import (
    PlatoonSpec,
    ScenarioSpec,
    Trajectory,
    asymptotic_error_sup,
    mean_tracking_error,
    simulate_closed_loop,
    tracking_error_integral,
    window_amplitude,
    window_amplitudes,
)

NAMES = ("fig2", "fig3", "fig4", "fig5", "platoon", "prop1")

PENDULUM_TARGET = math.pi / 6

# platoon targets are produced online by the simulator
FOLLOWER_TARGET = ReferenceSignal("follower-target")


@dataclass
class ExperimentBundle:
    name: str
    runs: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    # raw arrays kept for callers (e.g. platoon spacing series); not written
    arrays: dict = field(default_factory=dict)

    def write(self, directory) -> list:
        """Write one CSV per run, extra tables, a summary and a plot script."""
        directory = Path(directory)
        written = []
        for label, traj in self.runs.items():
            written.append(output.write_text(directory, f"{self.name}_{label}.csv",
                                             output.trajectory_to_csv(traj)))
        for fname, text in self.tables.items():
            written.append(output.write_text(directory, fname, text))
        written.append(output.write_text(directory, f"{self.name}_summary.txt",
                                         output.summary_text(self.metrics)))
        series = [(label, f"{self.name}_{label}.csv", "y_1") for label in self.runs]
        first = next(iter(self.runs), None)
        script = output.plot_script(self.name, series, f"{self.name}.png",
                                    reference=f"{self.name}_{first}.csv" if first else None)
        written.append(output.write_text(directory, f"{self.name}_plot.py", script))
        return written


def horizon_label(T, alpha=1.0, suffix="") -> str:
    """``T=0.5`` -> ``T05``; ``alpha != 1`` appends ``_a<alpha>``."""
    label = "T" + f"{T:g}".replace(".", "")
    if alpha != 1:
        label += "_a" + f"{alpha:g}".replace(".", "")
    return label + suffix


def _cfg(T, alpha=1.0, timing="preview", **kw):
    return ControllerConfig(T=T, alpha=alpha, reference_timing=timing, **kw)


# --- scenario definitions ---------------------------------------------------


def fig2_spec(T, alpha=1.0, duration=40.0) -> ScenarioSpec:
    return ScenarioSpec("position", {"a": -1.0, "r_slope": 2.0}, ramp_residual(),
                        _cfg(T, alpha), duration, name=f"fig2_{horizon_label(T, alpha)}")


def fig3_spec(T, alpha=1.0, duration=40.0) -> ScenarioSpec:
    return ScenarioSpec("position", {"a": 0.5, "r_slope": 0.0}, sinusoid(2.0, 1.0),
                        _cfg(T, alpha), duration, name=f"fig3_{horizon_label(T, alpha)}")


def fig4_spec(T, alpha=1.0, duration=60.0) -> ScenarioSpec:
    return ScenarioSpec("pendulum", {"a": 1.0, "b": 0.2}, constant(PENDULUM_TARGET),
                        _cfg(T, alpha), duration, name=f"fig4_{horizon_label(T, alpha)}")


def fig5_spec(T, alpha=1.0, timing="current", duration=35.0) -> ScenarioSpec:
    # Reported error integrals match r(t) fed to the controller, not r(t+T).
    return ScenarioSpec("pendulum", {"a": 1.0, "b": 0.2},
                        sinusoid(PENDULUM_TARGET, math.pi / 8), _cfg(T, alpha, timing), duration,
                        name=f"fig5_{horizon_label(T, alpha)}")


def prop1_spec(alpha, duration=60.0) -> ScenarioSpec:
    return ScenarioSpec("memoryless", {"map": "cubic"}, sinusoid(0.0, 1.0),
                        _cfg(1.0, alpha), duration, name=f"prop1_a{alpha:g}")


def platoon_spec(duration=20.0, **platoon_kw) -> ScenarioSpec:
    return ScenarioSpec("integrator", {"k": 2}, FOLLOWER_TARGET,
                        _cfg(0.6, 45.0), duration, name="platoon",
                        platoon=PlatoonSpec(**platoon_kw))


# --- experiment runners -----------------------------------------------------


def _growth(traj: Trajectory, early, late, center=0.0) -> float:
    try:
        return window_amplitude(traj, *late, center) / window_amplitude(traj, *early, center)
    except ArgumentError:
        return math.inf if traj.diverged else math.nan


def run_fig2() -> ExperimentBundle:
    b = ExperimentBundle("fig2")
    for T in (1.0, 0.5, 0.53, 0.4):
        spec = fig2_spec(T)
        traj = simulate_closed_loop(spec)
        label = horizon_label(T)
        b.runs[label] = traj
        b.metrics[f"{label}_x1_end"] = float(traj.outputs[-1, 0])
        b.metrics[f"{label}_growth_30_40_over_10_20"] = _growth(traj, (10, 20), (30, 40))
        b.metrics[f"{label}_closed_form_verdict"] = position_stability_condition(-1.0, T, 1.0)
        b.metrics[f"{label}_status"] = traj.status
    b.metrics["T1_converged"] = abs(b.metrics["T1_x1_end"]) < 1e-3
    return b


def run_fig3() -> ExperimentBundle:
    b = ExperimentBundle("fig3")
    for T, alpha in ((3.0, 1.0), (0.4, 5.0), (0.4, 1.0)):
        traj = simulate_closed_loop(fig3_spec(T, alpha))
        label = horizon_label(T, alpha)
        b.runs[label] = traj
        b.metrics[f"{label}_status"] = traj.status
        b.metrics[f"{label}_closed_form_verdict"] = position_stability_condition(0.5, T, alpha)
        if not traj.diverged:
            b.metrics[f"{label}_mean_error_20_40"] = mean_tracking_error(traj, 20, 40)
            b.metrics[f"{label}_peak_udot"] = traj.peak_control_rate
    b.metrics["error_ratio_T3_over_T04_a5"] = (
        b.metrics["T3_mean_error_20_40"] / b.metrics["T04_a5_mean_error_20_40"]
    )
    return b


def run_fig4() -> ExperimentBundle:
    b = ExperimentBundle("fig4")
    for T in (2.0, 0.8):
        traj = simulate_closed_loop(fig4_spec(T))
        label = horizon_label(T)
        b.runs[label] = traj
        b.metrics[f"{label}_status"] = traj.status
        amps = window_amplitudes(traj, 10.0, PENDULUM_TARGET)
        b.metrics[f"{label}_window_amplitudes"] = " ".join(f"{a:.6g}" for a in amps)
    t2 = b.runs["T2"]
    b.metrics["T2_max_error_after_30"] = float(np.max(np.abs(
        t2.outputs[t2.times >= 30 - 1e-9, 0] - PENDULUM_TARGET)))
    return b


def run_fig5() -> ExperimentBundle:
    b = ExperimentBundle("fig5")
    for T, alpha, timing in ((2.0, 1.0, "current"), (0.15, 1.0, "current"),
                             (0.15, 20.0, "current"), (0.2, 8.0, "current"),
                             (0.15, 20.0, "preview"), (0.2, 8.0, "preview")):
        traj = simulate_closed_loop(fig5_spec(T, alpha, timing))
        label = horizon_label(T, alpha, "_preview" if timing == "preview" else "")
        b.runs[label] = traj
        b.metrics[f"{label}_status"] = traj.status
        if not traj.diverged:
            b.metrics[f"{label}_E_5_35"] = tracking_error_integral(traj, 5, 35)
    return b


def run_prop1() -> ExperimentBundle:
    b = ExperimentBundle("prop1")
    for alpha in (1.0, 10.0):
        spec = prop1_spec(alpha)
        traj = simulate_closed_loop(spec)
        label = f"a{alpha:g}"
        b.runs[label] = traj
        b.metrics[f"{label}_tail_sup_error"] = asymptotic_error_sup(traj, 0.25)
        b.metrics[f"{label}_bound"] = spec.reference.rate_bound / alpha
    return b


def run_platoon(**platoon_kw) -> ExperimentBundle:
    b = ExperimentBundle("platoon")
    spec = platoon_spec(**platoon_kw)
    trajs, times, spacing = simulate_platoon(spec)
    for i, traj in enumerate(trajs):
        b.runs[f"agent{i + 1}"] = traj
    b.tables["spacing.csv"] = output.spacing_to_csv(times, spacing)
    snap = ["t,agent,x,y"]
    for t_snap in (0.0, 7.0, 20.0):
        n = int(round(t_snap / spec.controller.dt))
        if n < len(times):
            for i, traj in enumerate(trajs):
                x, y = traj.states[n]
                snap.append(f"{t_snap:.9g},{i + 1},{x:.9g},{y:.9g}")
    b.tables["platoon_snapshots.csv"] = "\n".join(snap) + "\n"
    p = spec.platoon
    late = times >= 15 - 1e-9
    b.metrics["follower_mode"] = p.follower_mode
    b.metrics["max_spacing_error_15_20"] = float(np.max(np.abs(spacing[late] - p.spacing)))
    for j in range(spacing.shape[1]):
        b.metrics[f"s_{j + 1}{j + 2}_final"] = float(spacing[-1, j])
    b.arrays["times"] = times
    b.arrays["spacing"] = spacing
    return b


RUNNERS = {
    "fig2": run_fig2,
    "fig3": run_fig3,
    "fig4": run_fig4,
    "fig5": run_fig5,
    "platoon": run_platoon,
    "prop1": run_prop1,
}


def run_named_experiment(name: str) -> ExperimentBundle:
    try:
        runner = RUNNERS[name]
    except KeyError:
        raise ArgumentError(f"unknown experiment {name!r}; valid names: {', '.join(NAMES)}") from None
    return runner()
