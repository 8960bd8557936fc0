"""Plant models.

A plant is either memoryless (``y = g(u)``) or an ODE ``xdot = f(x, u)`` with
output ``y = h(x)``. Built-in kinds carry their parameters in ``params`` so the
integration layer can dispatch to a compiled kernel; ``generic-ode`` plants
wrap user callbacks and always take the pure-Python path.

Lipschitz and growth conditions on ``f`` are documented preconditions only;
nothing here checks them at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import ArgumentError, UnsupportedOperationError

KINDS = ("memoryless", "generic-ode", "lti", "position", "pendulum", "integrator")


@dataclass(frozen=True, eq=False)
class PlantModel:
    """Immutable plant description.

    ``eq=False`` keeps hashing by identity, which the predictor relies on to
    cache matrix exponentials per (plant, T).
    """

    kind: str
    n: int
    k: int
    drift: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    output: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: Mapping[str, object] = field(default_factory=dict)
    g: Optional[Callable[[np.ndarray], np.ndarray]] = None
    g_jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    closed_form: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown plant kind {self.kind!r}; expected one of {KINDS}")
        if self.k < 1 or self.n < 0:
            raise ArgumentError(f"invalid dimensions n={self.n}, k={self.k}")
        if self.kind == "memoryless":
            if self.n != 0:
                raise ArgumentError("memoryless plants have no state (n must be 0)")
            if self.g is None or self.g_jacobian is None:
                raise ArgumentError("memoryless plants need g and its analytic Jacobian")
        elif self.drift is None or self.output is None:
            raise ArgumentError(f"{self.kind} plant needs drift and output maps")

    @property
    def is_memoryless(self) -> bool:
        return self.kind == "memoryless"


def _as_vector(v, dim, name):
    if type(v) is np.ndarray and v.dtype == np.float64 and v.shape == (dim,):
        return v
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise ArgumentError(f"{name} must have dimension {dim}, got shape {np.shape(v)}")
    return arr


def _scalar_map(fn):
    """Lift a scalar function to act on 1-vectors."""

    def wrapped(u):
        return np.atleast_1d(np.asarray(fn(float(np.asarray(u).reshape(-1)[0])), dtype=float))

    return wrapped


# --- constructors -----------------------------------------------------------


def memoryless_plant(g, jacobian, k=1, name=None) -> PlantModel:
    """Memoryless plant ``y = g(u)`` with its analytic Jacobian.

    For ``k == 1`` the callbacks may be scalar functions.
    """
    if k == 1:
        g_vec, jac_vec = _scalar_map(g), _scalar_map(jacobian)

        def jac(u):
            return jac_vec(u).reshape(1, 1)

        return PlantModel("memoryless", 0, 1, g=g_vec, g_jacobian=jac,
                          params={"map": name} if name else {})

    def g_vec(u):
        return np.asarray(g(u), dtype=float).reshape(k)

    def jac(u):
        return np.asarray(jacobian(u), dtype=float).reshape(k, k)

    return PlantModel("memoryless", 0, k, g=g_vec, g_jacobian=jac,
                      params={"map": name} if name else {})


MEMORYLESS_MAPS = {
    "identity": (lambda u: u, lambda u: 1.0),
    "cubic": (lambda u: u**3 + u, lambda u: 3.0 * u**2 + 1.0),
}


def named_memoryless(name: str) -> PlantModel:
    try:
        g, jac = MEMORYLESS_MAPS[name]
    except KeyError:
        raise ArgumentError(
            f"unknown memoryless map {name!r}; expected one of {sorted(MEMORYLESS_MAPS)}"
        ) from None
    return memoryless_plant(g, jac, name=name)


def generic_ode_plant(drift, output, n, k) -> PlantModel:
    return PlantModel("generic-ode", n, k, drift=drift, output=output)


def lti_plant(A, B, C) -> PlantModel:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    n = A.shape[0]
    if A.shape != (n, n):
        raise ArgumentError(f"A must be square, got {A.shape}")
    if B.shape[0] != n:
        B = B.reshape(n, -1)
    k = B.shape[1]
    if C.shape != (k, n):
        raise ArgumentError(f"C must be {k}x{n} for a square loop, got {C.shape}")
    for m in (A, B, C):
        m.setflags(write=False)

    def drift(x, u):
        return A @ x + B @ u

    def output(x):
        return C @ x

    return PlantModel("lti", n, k, drift=drift, output=output,
                      params={"A": A, "B": B, "C": C}, closed_form="lti")


def position_plant(a: float, r_slope: float = 0.0) -> PlantModel:
    """Drag particle written relative to the ramp ``r_slope * t``.

    State is (position error, velocity); output is the position error.
    """
    a, r_slope = float(a), float(r_slope)
    if a == 0.0:
        raise ArgumentError("position plant requires drag coefficient a != 0")

    def drift(x, u):
        return np.array([x[1] - r_slope, a * x[1] + u[0]])

    def output(x):
        return x[:1].copy()

    return PlantModel("position", 2, 1, drift=drift, output=output,
                      params={"a": a, "r_slope": r_slope}, closed_form="position")


def pendulum_plant(a: float = 1.0, b: float = 0.2) -> PlantModel:
    """Inverted pendulum, angle measured from the upper equilibrium."""
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise ArgumentError(f"pendulum requires a > 0 and b > 0, got a={a}, b={b}")

    def drift(x, u):
        return np.array([x[1], a * math.sin(x[0]) - b * x[1] + u[0]])

    def output(x):
        return x[:1].copy()

    return PlantModel("pendulum", 2, 1, drift=drift, output=output, params={"a": a, "b": b})


def integrator_plant(k: int = 2) -> PlantModel:
    k = int(k)

    def drift(x, u):
        return np.array(u, dtype=float)

    def output(x):
        return np.array(x, dtype=float)

    return PlantModel("integrator", k, k, drift=drift, output=output, params={"k": k})


_PARAM_NAMES = {
    "position": (("a",), ("r_slope",)),
    "pendulum": ((), ("a", "b")),
    "integrator": ((), ("k",)),
    "lti": (("A", "B", "C"), ()),
    "memoryless": (("map",), ()),
}


def plant_from_params(kind: str, params: Mapping[str, object]) -> PlantModel:
    """Build a plant from a kind name and a parameter map (config files)."""
    if kind not in _PARAM_NAMES:
        raise ArgumentError(f"plant kind {kind!r} cannot be built from parameters")
    required, optional = _PARAM_NAMES[kind]
    missing = [name for name in required if name not in params]
    if missing:
        raise ArgumentError(f"{kind} plant is missing parameter {missing[0]!r}")
    unknown = sorted(set(params) - set(required) - set(optional))
    if unknown:
        raise ArgumentError(f"unknown parameters for {kind} plant: {unknown}")
    builder = {
        "position": position_plant,
        "pendulum": pendulum_plant,
        "integrator": integrator_plant,
        "lti": lti_plant,
        "memoryless": named_memoryless,
    }[kind]
    return builder(**params) if kind != "memoryless" else builder(params["map"])


# --- evaluation -------------------------------------------------------------


def eval_drift(plant: PlantModel, x, u) -> np.ndarray:
    if plant.is_memoryless:
        raise UnsupportedOperationError("memoryless plants have no drift")
    x = _as_vector(x, plant.n, "x")
    u = _as_vector(u, plant.k, "u")
    return np.asarray(plant.drift(x, u), dtype=float)


def eval_output(plant: PlantModel, x) -> np.ndarray:
    if plant.is_memoryless:
        raise UnsupportedOperationError("memoryless plants have no state; use eval_memoryless")
    x = _as_vector(x, plant.n, "x")
    return np.atleast_1d(np.asarray(plant.output(x), dtype=float))


def eval_memoryless(plant: PlantModel, u):
    """Return ``(g(u), dg/du(u))`` for a memoryless plant."""
    if not plant.is_memoryless:
        raise UnsupportedOperationError(f"{plant.kind} plant is not memoryless")
    u = _as_vector(u, plant.k, "u")
    return plant.g(u), plant.g_jacobian(u)
