"""Output tracking by Newton-Raphson-flow control with lookahead simulation."""

from ._jit import USE_NUMBA
from .controller import (
    ControllerConfig,
    ControlState,
    closed_loop_step,
    control_rate,
    discrete_nr_step,
    newton_direction,
)
from .dynamics import (
    PlantModel,
    eval_drift,
    eval_memoryless,
    eval_output,
    integrator_plant,
    lti_plant,
    memoryless_plant,
    pendulum_plant,
    position_plant,
)
from .errors import (
    ArgumentError,
    DivergenceError,
    NRFlowError,
    NumericError,
    SingularityError,
    SingularJacobianError,
    UnsupportedOperationError,
    ValidationError,
)
from .integration import StepSpec, euler_step, integrate_const_input
from .predictor import (
    Prediction,
    matrix_exponential,
    predict_jacobian_fd,
    predict_lti_closed_form,
    predict_output,
    predict_position_closed_form,
)

__version__ = "0.1.0"
