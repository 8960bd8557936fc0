import dataclasses

import pytest

from nrflow import ValidationError
from nrflow.config import dump_config, load_config, parse_config
from nrflow.controller import ControllerConfig
from nrflow.scenarios import experiments
from nrflow.scenarios.references import sinusoid
from nrflow.scenarios.simulate import ScenarioSpec

FIG2 = """
name = "fig2_T1"
duration = 40.0

[plant]
kind = "position"
a = -1.0
r_slope = 2.0

[reference]
kind = "ramp-residual"

[controller]
T = 1.0
"""


def test_fig2_config_matches_builder():
    assert parse_config(FIG2) == experiments.fig2_spec(1.0)


def test_missing_horizon_names_field():
    with pytest.raises(ValidationError) as info:
        parse_config(FIG2.replace("T = 1.0", "alpha = 2.0"))
    assert info.value.field == "controller.T"


def test_zero_drag_rejected():
    with pytest.raises(ValidationError) as info:
        parse_config(FIG2.replace("a = -1.0", "a = 0.0"))
    assert info.value.field == "plant.a" and "a != 0" in str(info.value)


def test_syntax_error_has_position():
    with pytest.raises(ValidationError, match=r"line 3, column"):
        parse_config('name = "x"\nduration = 1.0\n[plant\n')


@pytest.mark.parametrize("mutation,field", [
    (("duration = 40.0", "duration = 40.0\ncolour = 1"), "colour"),
    (("T = 1.0", "T = 1.0\ngain = 2.0"), "controller.gain"),
    (("T = 1.0", 'T = "fast"'), "controller.T"),
    (("T = 1.0", "T = -1.0"), "controller"),
    (('kind = "ramp-residual"', 'kind = "ramp"'), "reference"),
    (("[reference]", "[initial]\nx0 = [1.0]\n[reference]"), "plant"),
])
def test_strict_validation(mutation, field):
    with pytest.raises(ValidationError) as info:
        parse_config(FIG2.replace(*mutation))
    assert info.value.field == field


@pytest.mark.parametrize("spec", [
    experiments.fig2_spec(1.0),
    experiments.fig3_spec(0.4, 5.0),
    experiments.fig4_spec(2.0),
    experiments.fig5_spec(0.15, 20.0),
    experiments.prop1_spec(10.0),
    experiments.platoon_spec(seed=7),
    ScenarioSpec("pendulum", {"a": 1.0, "b": 0.3}, sinusoid(0.1, 0.2, 2.0, 0.5),
                 ControllerConfig(T=0.7, jacobian_method="simulated-fd", inner_steps=50),
                 12.5, x0=(0.1, -0.2), u0=(0.3,), expect_stable=True),
    ScenarioSpec("lti", {"A": [[-1.0, 0.5], [0.0, -2.0]], "B": [[1.0], [0.5]], "C": [[1.0, 0.0]]},
                 sinusoid(0.0, 1.0), ControllerConfig(), 3.0),
])
def test_round_trip(spec):
    text = dump_config(spec)
    back = parse_config(text)
    assert back == spec
    assert dump_config(back) == text


def test_load_from_file(tmp_path):
    path = tmp_path / "s.toml"
    path.write_text(dump_config(dataclasses.replace(experiments.fig2_spec(0.4), expect_stable=True)))
    spec = load_config(path)
    assert spec.expect_stable and spec.controller.T == 0.4
