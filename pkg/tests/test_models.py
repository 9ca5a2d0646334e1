"""
Unit tests for the Pydantic scenario and report models.
"""
import pytest
from pydantic import ValidationError
from sympy.polys.domains import QQ, QQ_I

from genkahler.config import DEFAULT_ORDER, DEFAULT_SEED, DEFAULT_T_SAMPLE
from genkahler.core.models import GaussRatModel, IdealSpec, Report, RunSettings, Scenario, TaskResult, TaskSpec


@pytest.mark.parametrize(
    "data, expected",
    [
        ("1/2", QQ_I(QQ(1, 2), 0)),
        (3, QQ_I(3, 0)),
        (["0", "-1"], QQ_I(0, -1)),
        ({"re": "2", "im": "1/3"}, QQ_I(2, QQ(1, 3))),
    ]
)
def test_gauss_rat_coercion(data, expected):
    """Test the accepted spellings of a Gaussian rational."""
    assert GaussRatModel.model_validate(data).to_gauss() == expected


def test_gauss_rat_roundtrip():
    """Test that from_gauss writes exact string parts."""
    model = GaussRatModel.from_gauss(QQ_I(QQ(-3, 4), 2))
    assert model.model_dump() == {"re": "-3/4", "im": "2"}


def test_gauss_rat_rejects_wrong_length():
    with pytest.raises(ValidationError):
        GaussRatModel.model_validate(["1", "2", "3"])


def test_scenario_defaults():
    """Test that a minimal scenario picks up the configured defaults."""
    scenario = Scenario(name="flat", n=2)
    assert scenario.seed == DEFAULT_SEED
    assert scenario.order == DEFAULT_ORDER
    assert scenario.objects == {}
    assert scenario.tasks == []


@pytest.mark.parametrize("n", [0, 10])
def test_scenario_dimension_bounds(n):
    with pytest.raises(ValidationError):
        Scenario(name="bad", n=n)


def test_scenario_nested_models():
    """Test that ideals and tasks validate into their own models."""
    scenario = Scenario.model_validate({
        "name": "axis",
        "n": 2,
        "ideals": {"axis": {"generators": ["z1"], "parametrization": {"z1": "0"}, "samples": [[0, ["1", "2"]]]}},
        "tasks": [{"command": "poisson-sub", "args": {"beta": "beta", "ideal": "axis"}, "expect": {"poisson": True}}],
        "comment": "ignored",
    })
    ideal = scenario.ideals["axis"]
    assert isinstance(ideal, IdealSpec)
    assert ideal.codim is None
    assert ideal.samples[0][1].to_gauss() == QQ_I(1, 2)
    assert isinstance(scenario.tasks[0], TaskSpec)
    assert scenario.tasks[0].expect == {"poisson": True}
    assert not hasattr(scenario, "comment")


def test_task_requires_command():
    with pytest.raises(ValidationError):
        TaskSpec(args={"beta": "beta"})


def test_report_dump():
    """Test that a report serialises without floats."""
    task = TaskResult(index=0, command="check-poisson", result={"poisson": True}, verdict="pass")
    report = Report(scenario="flat", seed=0, order=2, samples=4, tasks=[task], verdict="pass")
    dumped = report.model_dump()
    assert dumped["tasks"][0]["result"] == {"poisson": True}
    assert dumped["verdict"] == "pass"


def test_run_settings_overrides():
    """Test that only explicit overrides replace scenario values."""
    scenario = Scenario(name="flat", n=2, seed=7, order=3, samples=5)
    settings = RunSettings.for_scenario(scenario, order=None, samples=2)
    assert settings.seed == 7
    assert settings.order == 3
    assert settings.samples == 2
    assert settings.t_value == DEFAULT_T_SAMPLE
