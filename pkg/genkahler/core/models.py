"""
Pydantic models for genkahler.

This module contains the data transfer objects used to read scenario files and
to write machine-readable reports. Exact numbers travel as strings ("p/q") so
reports never contain floats.
"""
import dataclasses
import typing as t

from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy.polys.domains import QQ_I

from genkahler.config import DEFAULT_ORDER, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_T_SAMPLE
from genkahler.core.coeffring import GaussRat, format_rational, gauss


class GaussRatModel(BaseModel):
    """Gaussian rational re + i*im with exact string parts.

    Accepts {"re": "1/2", "im": "0"}, a bare string or integer (real), or a
    two-element list [re, im].

    Attributes:
        re: Real part as "p/q"
        im: Imaginary part as "p/q"
    """
    re: str = "0"
    im: str = "0"
    model_config = ConfigDict(extra='ignore')

    @model_validator(mode='before')
    @classmethod
    def _coerce(cls, data: t.Any) -> t.Any:
        if isinstance(data, (str, int)):
            return {"re": str(data), "im": "0"}
        if isinstance(data, (list, tuple)):
            if len(data) != 2:
                raise ValueError("expected [re, im]")
            return {"re": str(data[0]), "im": str(data[1])}
        return data

    def to_gauss(self) -> GaussRat:
        return gauss(self.re, self.im)

    @classmethod
    def from_gauss(cls, c: t.Any) -> "GaussRatModel":
        c = QQ_I.convert(c)
        return cls(re=format_rational(c.x), im=format_rational(c.y))


class IdealSpec(BaseModel):
    """Submanifold given by generators, optionally with a graph and samples.

    Attributes:
        generators: Scalar expressions generating the ideal
        codim: Codimension at smooth points, default the number of generators
        parametrization: {"z3": expression in the remaining coordinates}
        samples: Points as lists of complex coordinates
    """
    generators: list[str]
    codim: int | None = None
    parametrization: dict[str, str] = {}
    samples: list[list[GaussRatModel]] = []
    model_config = ConfigDict(extra='ignore')


class TaskSpec(BaseModel):
    """One command of a scenario.

    Attributes:
        command: Command name, e.g. "check-poisson"
        args: Command arguments; strings name objects or are parsed as expressions
        expect: Optional expected values; the task passes when they all match
    """
    command: str
    args: dict[str, t.Any] = {}
    expect: dict[str, t.Any] | None = None
    model_config = ConfigDict(extra='ignore')


class Scenario(BaseModel):
    """A scenario file.

    Attributes:
        name: Scenario name
        description: Free text
        n: Chart dimension
        seed: Seed for sample search and randomised checks
        order: Truncation order T
        samples: Number of sample points per check
        degree_bound: Degree bound D for the deformation solver
        objects: Named expressions
        ideals: Named submanifolds
        tasks: Commands to run in order
    """
    name: str
    description: str = ""
    n: int = Field(ge=1, le=9)
    seed: int = DEFAULT_SEED
    order: int = DEFAULT_ORDER
    samples: int = DEFAULT_SAMPLES
    degree_bound: int | None = None
    objects: dict[str, str] = {}
    ideals: dict[str, IdealSpec] = {}
    tasks: list[TaskSpec] = []
    model_config = ConfigDict(extra='ignore')


class SampleDiagnostics(BaseModel):
    """Per-sample values reported by pointwise checks.

    Attributes:
        point: Complex coordinates of the sample
        values: Named exact values at the sample
    """
    point: list[GaussRatModel]
    values: dict[str, t.Any] = {}
    model_config = ConfigDict(extra='ignore')


class TaskResult(BaseModel):
    """Outcome of one task.

    Attributes:
        index: Position in the scenario
        command: Command name
        args: Arguments as given
        result: Command output, or {"error": {"code", "message"}}
        verdict: "pass", "fail" or "undecided"
    """
    index: int
    command: str
    args: dict[str, t.Any] = {}
    result: dict[str, t.Any] = {}
    verdict: str
    model_config = ConfigDict(extra='ignore')


class Report(BaseModel):
    """Report of a scenario run.

    Attributes:
        scenario: Scenario name
        seed: Seed used
        order: Truncation order used
        samples: Sample count used
        tasks: Per-task results ordered by index
        verdict: Overall verdict
    """
    scenario: str
    seed: int
    order: int
    samples: int
    tasks: list[TaskResult] = []
    verdict: str
    model_config = ConfigDict(extra='ignore')


@dataclasses.dataclass
class RunSettings:
    """Effective run parameters after command-line overrides."""
    seed: int = DEFAULT_SEED
    order: int = DEFAULT_ORDER
    samples: int = DEFAULT_SAMPLES
    degree_bound: t.Optional[int] = None
    t_value: str = DEFAULT_T_SAMPLE

    @classmethod
    def for_scenario(cls, scenario: Scenario, **overrides: t.Any) -> "RunSettings":
        settings = cls(scenario.seed, scenario.order, scenario.samples, scenario.degree_bound)
        for key, value in overrides.items():
            if value is not None:
                setattr(settings, key, value)
        return settings
