"""Scenario configuration files (TOML).

Layout::

    name = "fig2_T1"
    duration = 40.0
    expect_stable = true          # optional; CLI exits 4 if the run diverges

    [plant]
    kind = "position"
    a = -1.0
    r_slope = 2.0

    [reference]
    kind = "ramp-residual"

    [controller]
    T = 1.0
    alpha = 1.0                   # optional fields fall back to defaults

    [initial]                     # optional
    x0 = [0.0, 0.0]
    u0 = [0.0]

    [platoon]                     # optional; switches `run` to the platoon simulator
    agents = 8

Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Any

import tomli

from .controller import ControllerConfig
from .errors import ArgumentError, ValidationError
from .scenarios.references import ReferenceSignal
from .scenarios.simulate import PlatoonSpec, ScenarioSpec

_TOP_KEYS = {"name", "duration", "expect_stable", "plant", "reference", "controller", "initial",
             "platoon"}
_CONTROLLER_FIELDS = {f.name for f in dataclasses.fields(ControllerConfig)}
_PLATOON_FIELDS = {f.name for f in dataclasses.fields(PlatoonSpec)}
_INITIAL_KEYS = {"x0", "u0"}


def _section(doc, key, required=True) -> dict:
    if key not in doc:
        if required:
            raise ValidationError(f"missing required section [{key}]", field=key)
        return {}
    sec = doc[key]
    if not isinstance(sec, dict):
        raise ValidationError(f"{key} must be a table", field=key)
    return sec


def _reject_unknown(section: dict, allowed, prefix: str):
    for key in section:
        if key not in allowed:
            raise ValidationError(f"unknown key {prefix}{key}", field=f"{prefix}{key}")


def _number(value, field, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{field} must be a number, got {value!r}", field=field)
    if kind is int:
        if int(value) != value:
            raise ValidationError(f"{field} must be an integer, got {value!r}", field=field)
        return int(value)
    return float(value)


def spec_from_dict(doc: dict) -> ScenarioSpec:
    """Validate a parsed document and build a :class:`ScenarioSpec`."""
    _reject_unknown(doc, _TOP_KEYS, "")
    if "duration" not in doc:
        raise ValidationError("missing required field duration", field="duration")
    duration = _number(doc["duration"], "duration")

    plant = dict(_section(doc, "plant"))
    if "kind" not in plant:
        raise ValidationError("missing required field plant.kind", field="plant.kind")
    plant_kind = plant.pop("kind")

    ref = dict(_section(doc, "reference"))
    if "kind" not in ref:
        raise ValidationError("missing required field reference.kind", field="reference.kind")
    ref_kind = ref.pop("kind")

    ctl = _section(doc, "controller")
    _reject_unknown(ctl, _CONTROLLER_FIELDS, "controller.")
    if "T" not in ctl:
        raise ValidationError("missing required field controller.T", field="controller.T")
    ctl_kw: dict[str, Any] = {}
    for key, value in ctl.items():
        if key in ("jacobian_method", "reference_timing"):
            ctl_kw[key] = str(value)
        else:
            ctl_kw[key] = _number(value, f"controller.{key}", int if key == "inner_steps" else float)

    init = _section(doc, "initial", required=False)
    _reject_unknown(init, _INITIAL_KEYS, "initial.")

    platoon = None
    if "platoon" in doc:
        pl = _section(doc, "platoon")
        _reject_unknown(pl, _PLATOON_FIELDS, "platoon.")
        pl_kw = dict(pl)
        if "center" in pl_kw:
            pl_kw["center"] = tuple(float(c) for c in pl_kw["center"])
        for key in ("agents", "seed"):
            if key in pl_kw:
                pl_kw[key] = _number(pl_kw[key], f"platoon.{key}", int)
        try:
            platoon = PlatoonSpec(**pl_kw)
        except ArgumentError as exc:
            raise ValidationError(f"platoon: {exc}", field="platoon") from exc

    try:
        controller = ControllerConfig(**ctl_kw)
    except ArgumentError as exc:
        raise ValidationError(f"controller: {exc}", field="controller") from exc
    try:
        reference = ReferenceSignal(ref_kind, ref)
    except ArgumentError as exc:
        raise ValidationError(f"reference: {exc}", field="reference") from exc

    try:
        spec = ScenarioSpec(
            plant_kind=plant_kind,
            plant_params=plant,
            reference=reference,
            controller=controller,
            duration=duration,
            x0=tuple(float(v) for v in init["x0"]) if "x0" in init else None,
            u0=tuple(float(v) for v in init["u0"]) if "u0" in init else None,
            name=str(doc.get("name", "run")),
            expect_stable=bool(doc.get("expect_stable", False)),
            platoon=platoon,
        )
        spec.plant  # noqa: B018 - builds the plant, surfacing invariant violations
        spec.initial_state()
        spec.initial_control()
    except ArgumentError as exc:
        field = "plant.a" if "a != 0" in str(exc) else "plant"
        raise ValidationError(f"invalid scenario: {exc}", field=field) from exc
    return spec


def parse_config(text: str) -> ScenarioSpec:
    """Parse a TOML scenario document.

    Raises
    ------
    ValidationError
        On syntax errors (message carries line and column) and on any field
        or invariant violation (``field`` names the offending key).
    """
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ValidationError(f"parse error: {exc}", field=None) from exc
    return spec_from_dict(doc)


def load_config(path) -> ScenarioSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# --- canonical emission -----------------------------------------------------


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if hasattr(v, "tolist"):
        v = v.tolist()
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialise {v!r}")


def _table(name, items) -> str:
    lines = [f"[{name}]"]
    lines += [f"{k} = {_toml_value(v)}" for k, v in items]
    return "\n".join(lines) + "\n"


def dump_config(spec: ScenarioSpec) -> str:
    """Canonical TOML for ``spec``; ``parse_config`` reads it back to an equal spec."""
    out = [
        f"name = {_toml_value(spec.name)}\n"
        f"duration = {_toml_value(float(spec.duration))}\n"
        f"expect_stable = {_toml_value(spec.expect_stable)}\n"
    ]
    out.append(_table("plant", [("kind", spec.plant_kind)] + sorted(spec.plant_params.items())))
    out.append(_table("reference", [("kind", spec.reference.kind)]
                      + sorted(spec.reference.params.items())))
    ctl = [(f.name, getattr(spec.controller, f.name)) for f in dataclasses.fields(ControllerConfig)]
    ctl = [(k, v if k == "inner_steps" or isinstance(v, str) else float(v)) for k, v in ctl]
    out.append(_table("controller", ctl))
    init = []
    if spec.x0 is not None:
        init.append(("x0", list(spec.x0)))
    if spec.u0 is not None:
        init.append(("u0", list(spec.u0)))
    if init:
        out.append(_table("initial", init))
    if spec.platoon is not None:
        out.append(_table("platoon", [(f.name, getattr(spec.platoon, f.name))
                                      for f in dataclasses.fields(PlatoonSpec)]))
    return "\n".join(out)
