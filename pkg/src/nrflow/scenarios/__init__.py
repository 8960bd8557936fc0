from .experiments import NAMES, ExperimentBundle, run_named_experiment
from .platoon import follower_reference, simulate_platoon
from .references import ReferenceSignal
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
