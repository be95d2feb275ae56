"""Pydantic schemas for scenario configuration files."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

ParameterValue = float | int | str

# --- Coefficients ---


class CoefficientConfig(BaseModel):
    """A coefficient of p: either a constant or a table interpolated linearly."""

    model_config = ConfigDict(extra="forbid")

    constant: float | None = None
    nodes: list[float] | None = None
    values: list[float] | None = None

    @model_validator(mode="after")
    def _one_form(self) -> "CoefficientConfig":
        tabulated = self.nodes is not None or self.values is not None
        if (self.constant is None) == (not tabulated):
            raise ValueError("give either 'constant' or both 'nodes' and 'values'")
        if tabulated:
            if self.nodes is None or self.values is None:
                raise ValueError("tabulated coefficients need both 'nodes' and 'values'")
            if len(self.nodes) != len(self.values) or len(self.nodes) < 2:
                raise ValueError("'nodes' and 'values' need equal length >= 2")
            if any(b <= a for a, b in zip(self.nodes, self.nodes[1:], strict=False)):
                raise ValueError("'nodes' must be strictly increasing")
        return self


class IntervalConfig(BaseModel):
    """A closed interval."""

    model_config = ConfigDict(extra="forbid")

    bounds: tuple[float, float]

    @model_validator(mode="after")
    def _ordered(self) -> "IntervalConfig":
        if self.bounds[1] <= self.bounds[0]:
            raise ValueError(f"empty interval {self.bounds}")
        return self


class BeliefDomainConfig(BaseModel):
    """The real line or a reflecting interval."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["line", "interval"] = "line"
    bounds: tuple[float, float] | None = None

    @model_validator(mode="after")
    def _bounds_for_interval(self) -> "BeliefDomainConfig":
        if self.kind == "interval" and self.bounds is None:
            raise ValueError("an interval belief domain needs 'bounds'")
        return self


# --- Interaction ---


class BeliefFactorConfig(BaseModel):
    """Belief-distance factor g(d) of the influence."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["rect"] = "rect"
    width: float = Field(default=1.0 / 3.0, gt=0)
    steepness: float = Field(default=64.0, gt=0)


class FactorsConfig(BaseModel):
    """zeta1(p) and zeta2(p') tabulated on the zeta nodes."""

    model_config = ConfigDict(extra="forbid")

    zeta1: list[float]
    zeta2: list[float]


class ZetaConfig(BaseModel):
    """Mutual influence: a personality kernel times an optional belief factor."""

    model_config = ConfigDict(extra="forbid")

    constant: float | None = Field(default=None, ge=0)
    nodes: list[float] | None = None
    kernel: list[list[float]] | None = None
    factors: FactorsConfig | None = None
    belief_factor: BeliefFactorConfig | None = None
    bound: float | None = Field(default=None, ge=0)
    support_radius: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _one_form(self) -> "ZetaConfig":
        forms = [self.constant is not None, self.kernel is not None, self.factors is not None]
        if sum(forms) != 1:
            raise ValueError("give exactly one of 'constant', 'kernel' or 'factors'")
        if (self.kernel is not None or self.factors is not None) and self.nodes is None:
            raise ValueError("tabulated influence needs 'nodes'")
        n = len(self.nodes or [])
        if self.kernel is not None and (
            len(self.kernel) != n or any(len(row) != n for row in self.kernel)
        ):
            raise ValueError(f"'kernel' must be {n}x{n} to match 'nodes'")
        if self.factors is not None and (
            len(self.factors.zeta1) != n or len(self.factors.zeta2) != n
        ):
            raise ValueError(f"'factors' need {n} values each to match 'nodes'")
        return self


class NoiseConfig(BaseModel):
    """Endogenous noise variance."""

    model_config = ConfigDict(extra="forbid")

    value: float


# --- Run controls ---


class GridConfig(BaseModel):
    """Discretization sizes."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    n_p: int | None = Field(default=None, alias="np", ge=3)
    n_x: int | None = Field(default=None, alias="nx", ge=3)


class RunConfig(BaseModel):
    """Time stepping and simulation controls."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    seed: int | None = None
    dt: float | None = Field(default=None, gt=0)
    t_final: float | None = Field(default=None, gt=0)
    agents: int | None = Field(default=None, alias="U", ge=2)
    initial: str | None = None


class ScenarioConfig(BaseModel):
    """A scenario configuration file: a preset with overrides, or every field given."""

    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    preset: str | None = None
    parameters: dict[str, ParameterValue] = Field(default_factory=dict)
    personality_domain: IntervalConfig | None = None
    belief_domain: BeliefDomainConfig | None = None
    alpha: CoefficientConfig | None = None
    prejudice: CoefficientConfig | None = None
    zeta: ZetaConfig | None = None
    sigma2: NoiseConfig | None = None
    rho0: CoefficientConfig | None = None
    grid: GridConfig | None = None
    run: RunConfig | None = None

    @model_validator(mode="after")
    def _complete(self) -> "ScenarioConfig":
        if self.preset is not None:
            return self
        if self.parameters:
            raise ValueError("'parameters' only apply together with 'preset'")
        missing = [
            name
            for name in ("personality_domain", "alpha", "prejudice", "zeta", "sigma2", "rho0")
            if getattr(self, name) is None
        ]
        if missing:
            raise ValueError(f"without a preset the config must define {', '.join(missing)}")
        return self
