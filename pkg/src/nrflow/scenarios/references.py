"""Reference signals with full preview (evaluable at any t >= 0)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError, UnsupportedOperationError

KINDS = ("constant", "ramp-residual", "sinusoid", "circle-point", "follower-target")

_FIELDS = {
    "constant": ({"value"}, set()),
    "ramp-residual": (set(), set()),
    "sinusoid": ({"offset", "amplitude"}, {"omega", "phase"}),
    "circle-point": ({"center", "radius"}, {"omega", "theta0"}),
    "follower-target": (set(), set()),
}


@dataclass(frozen=True)
class ReferenceSignal:
    """``r(t)`` by kind.

    ``ramp-residual`` is the zero signal of a plant written relative to a ramp;
    ``follower-target`` is produced online by the platoon simulator and cannot
    be evaluated on its own.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown reference kind {self.kind!r}; expected one of {KINDS}")
        required, optional = _FIELDS[self.kind]
        missing = required - set(self.params)
        if missing:
            raise ArgumentError(f"{self.kind} reference is missing {sorted(missing)}")
        unknown = set(self.params) - required - optional
        if unknown:
            raise ArgumentError(f"unknown parameters for {self.kind} reference: {sorted(unknown)}")
        if self.kind == "circle-point" and not float(self.params["radius"]) > 0:
            raise ArgumentError("circle radius must be positive")

    @property
    def dim(self) -> int:
        if self.kind == "constant":
            return np.atleast_1d(self.params["value"]).shape[0]
        if self.kind == "circle-point":
            return 2
        return 1

    def __call__(self, t: float) -> np.ndarray:
        p = self.params
        if self.kind == "constant":
            return np.atleast_1d(np.asarray(p["value"], dtype=float)).copy()
        if self.kind == "ramp-residual":
            return np.zeros(1)
        if self.kind == "sinusoid":
            w = p.get("omega", 1.0)
            return np.array([p["offset"] + p["amplitude"] * math.sin(w * t + p.get("phase", 0.0))])
        if self.kind == "circle-point":
            th = p.get("theta0", 0.0) + p.get("omega", 0.0) * t
            c = np.asarray(p["center"], dtype=float)
            return c + p["radius"] * np.array([math.cos(th), math.sin(th)])
        raise UnsupportedOperationError("follower targets are computed online by the platoon simulator")

    @property
    def rate_bound(self) -> float:
        """``sup ||r'(t)||``."""
        p = self.params
        if self.kind in ("constant", "ramp-residual"):
            return 0.0
        if self.kind == "sinusoid":
            return abs(p["amplitude"] * p.get("omega", 1.0))
        if self.kind == "circle-point":
            return abs(p["radius"] * p.get("omega", 0.0))
        raise UnsupportedOperationError("follower targets have no a-priori rate bound")


def constant(value) -> ReferenceSignal:
    v = np.atleast_1d(np.asarray(value, dtype=float))
    return ReferenceSignal("constant", {"value": float(v[0]) if v.size == 1 else v.tolist()})


def sinusoid(offset, amplitude, omega=1.0, phase=0.0) -> ReferenceSignal:
    return ReferenceSignal("sinusoid", {"offset": float(offset), "amplitude": float(amplitude),
                                        "omega": float(omega), "phase": float(phase)})


def ramp_residual() -> ReferenceSignal:
    return ReferenceSignal("ramp-residual")


def circle_point(center, radius, omega, theta0=0.0) -> ReferenceSignal:
    return ReferenceSignal("circle-point", {"center": [float(c) for c in center],
                                            "radius": float(radius), "omega": float(omega),
                                            "theta0": float(theta0)})
