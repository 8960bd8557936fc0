"""Lookahead output map ``g(u)`` and its Jacobian.

``g(u)`` is the output the plant would reach after holding ``u`` for ``T``
seconds from the current state. It is available three ways: by Euler
simulation (with a central-difference Jacobian of the *discrete* map), in
closed form for LTI plants, and in closed form for the ramp-tracking position
plant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dynamics import PlantModel, _as_vector, eval_memoryless, eval_output
from .errors import ArgumentError, NumericError, SingularityError, UnsupportedOperationError
from .integration import integrate_const_input

METHODS = ("simulated-fd", "lti-closed-form", "position-closed-form", "memoryless")
SELECTORS = ("auto", "closed-form", "simulated-fd")
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class Prediction:
    g_value: np.ndarray
    jacobian: np.ndarray
    method: str

    @property
    def abs_det(self) -> float:
        return abs(float(np.linalg.det(self.jacobian)))


def is_singular(M, tol=SINGULAR_TOL) -> bool:
    """``|det M|`` below ``tol``, scaled by ``max(1, ||M||)**k`` for k > 1."""
    M = np.atleast_2d(M)
    k = M.shape[0]
    if k == 1:
        v = abs(float(M[0, 0]))
        return not v >= tol
    if not np.all(np.isfinite(M)):
        return True
    scale = max(1.0, float(np.linalg.norm(M, 2))) ** k
    return abs(float(np.linalg.det(M))) < tol * scale


# --- matrix exponential -----------------------------------------------------

_TAYLOR_MAX_TERMS = 40


def matrix_exponential(M) -> np.ndarray:
    """``exp(M)`` by scaling and squaring around a truncated Taylor series.

    ``M`` is scaled by ``2**-s`` until its 1-norm is at most 1/2, the series is
    summed until terms drop below machine precision, and the result is squared
    ``s`` times.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ArgumentError(f"matrix_exponential needs a square matrix, got {M.shape}")
    if M.shape[0] > 16:
        raise ArgumentError(f"matrix_exponential is limited to dimension 16, got {M.shape[0]}")
    if not np.all(np.isfinite(M)):
        raise NumericError("matrix_exponential: non-finite entries")
    n = M.shape[0]
    norm = float(np.abs(M).sum(axis=0).max()) if n else 0.0
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    X = M / (2.0**s)

    result = np.eye(n)
    term = np.eye(n)
    for j in range(1, _TAYLOR_MAX_TERMS):
        term = term @ X / j
        result = result + term
        if np.abs(term).max() <= 1e-17 * max(1.0, np.abs(result).max()):
            break
    for _ in range(s):
        result = result @ result
    return result


# --- simulated predictor ----------------------------------------------------


def predict_output(plant: PlantModel, x, u, T: float, N: int = 100) -> np.ndarray:
    """Predicted output after holding ``u`` for ``T`` (``N`` Euler steps)."""
    if plant.is_memoryless:
        return eval_memoryless(plant, u)[0]
    if not T > 0:
        raise ArgumentError(f"lookahead horizon must be positive, got {T}")
    return eval_output(plant, integrate_const_input(plant, x, u, T, N))


def default_delta(u) -> np.ndarray:
    return np.maximum(1e-5, 1e-5 * np.abs(u))


def predict_jacobian_fd(plant: PlantModel, x, u, T: float, N: int = 100, delta=None) -> np.ndarray:
    """Central-difference Jacobian of the discretised lookahead map.

    Uses the same ``N`` as ``predict_output`` so the derivative belongs to the
    map the controller actually inverts. Columns are filled in input order.
    """
    u = _as_vector(u, plant.k, "u")
    deltas = default_delta(u) if delta is None else np.broadcast_to(np.asarray(delta, float), u.shape)
    if not np.all(deltas > 0):
        raise ArgumentError("finite-difference step must be positive")
    J = np.empty((plant.k, plant.k))
    for j in range(plant.k):
        up = u.copy()
        um = u.copy()
        up[j] += deltas[j]
        um[j] -= deltas[j]
        J[:, j] = (predict_output(plant, x, up, T, N) - predict_output(plant, x, um, T, N)) / (
            2.0 * deltas[j]
        )
    if not np.all(np.isfinite(J)):
        raise NumericError("finite-difference Jacobian has non-finite entries")
    return J


# --- closed forms -----------------------------------------------------------


@lru_cache(maxsize=128)
def _lti_blocks(plant: PlantModel, T: float):
    A, B, C = plant.params["A"], plant.params["B"], plant.params["C"]
    if is_singular(A):
        raise SingularityError("LTI closed form needs a nonsingular A", matrix=A)
    E = matrix_exponential(A * T)
    J = C @ np.linalg.solve(A, (E - np.eye(plant.n)) @ B)
    if is_singular(J):
        raise SingularityError(
            "lookahead Jacobian C A^-1 (e^{AT} - I) B is singular", matrix=J
        )
    CE = C @ E
    for m in (E, J, CE):
        m.setflags(write=False)
    return E, J, CE


def lti_lookahead_blocks(plant: PlantModel, T: float):
    """``(e^{AT}, C A^-1 (e^{AT}-I) B, C e^{AT})`` for an LTI plant (cached)."""
    if plant.kind != "lti":
        raise UnsupportedOperationError(f"{plant.kind} plant has no LTI closed form")
    if not T > 0:
        raise ArgumentError(f"lookahead horizon must be positive, got {T}")
    return _lti_blocks(plant, float(T))


def predict_lti_closed_form(plant: PlantModel, x, u, T: float) -> Prediction:
    _, J, CE = lti_lookahead_blocks(plant, T)
    x = _as_vector(x, plant.n, "x")
    u = _as_vector(u, plant.k, "u")
    return Prediction(CE @ x + J @ u, J.copy(), "lti-closed-form")


def position_jacobian(a: float, T: float) -> float:
    return math.expm1(a * T) / a**2 - T / a


def predict_position_closed_form(plant: PlantModel, x, u, T: float) -> Prediction:
    if plant.kind != "position":
        raise UnsupportedOperationError(f"{plant.kind} plant has no position closed form")
    if not T > 0:
        raise ArgumentError(f"lookahead horizon must be positive, got {T}")
    a, r = plant.params["a"], plant.params["r_slope"]
    x = _as_vector(x, 2, "x")
    u = _as_vector(u, 1, "u")
    J = position_jacobian(a, T)
    g = x[0] + math.expm1(a * T) / a * x[1] + J * u[0] - r * T
    return Prediction(np.array([g]), np.array([[J]]), "position-closed-form")


# --- dispatch ---------------------------------------------------------------


def resolve_method(plant: PlantModel, selector: str = "auto") -> str:
    if selector not in SELECTORS:
        raise ArgumentError(f"unknown jacobian method {selector!r}; expected one of {SELECTORS}")
    if plant.is_memoryless:
        return "memoryless"
    if selector == "simulated-fd":
        return "simulated-fd"
    if plant.closed_form == "lti":
        return "lti-closed-form"
    if plant.closed_form == "position":
        return "position-closed-form"
    if selector == "closed-form":
        raise UnsupportedOperationError(f"{plant.kind} plant has no closed-form predictor")
    return "simulated-fd"


def predict(plant: PlantModel, x, u, T: float, N: int = 100, method: str = "simulated-fd",
            delta=None) -> Prediction:
    """Prediction by a resolved method name (see ``resolve_method``)."""
    if method == "memoryless":
        g, J = eval_memoryless(plant, u)
        return Prediction(g, J, "memoryless")
    if method == "lti-closed-form":
        return predict_lti_closed_form(plant, x, u, T)
    if method == "position-closed-form":
        return predict_position_closed_form(plant, x, u, T)
    if method == "simulated-fd":
        g = predict_output(plant, x, u, T, N)
        return Prediction(g, predict_jacobian_fd(plant, x, u, T, N, delta), "simulated-fd")
    raise ArgumentError(f"unknown prediction method {method!r}")
