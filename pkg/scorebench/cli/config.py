"""Run configuration: one JSON document describing data, roster, rules, grid and output.

Unknown keys are rejected at every level. The published JSON schema is
``RunConfig.model_json_schema()``.
"""

import logging
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigError
from ..forecasting import CopulaKind, ModelSpec, default_roster
from ..ingest import GeneratorSpec
from ..scoring import RuleSpec, default_rules

logger = logging.getLogger(__name__)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CsvSource(_Strict):
    """A panel of levels read from a CSV file."""

    source: Literal["csv"] = "csv"
    name: str
    path: Path
    date_column: str = "date"
    columns: Optional[list[str]] = None
    transform: Literal["log-return", "difference", "none"] = "log-return"


class SyntheticSource(_Strict):
    """A generated panel; levels are turned into log returns."""

    source: Literal["synthetic"] = "synthetic"
    name: str
    generator: GeneratorSpec
    T: int = Field(gt=1)
    d: int = Field(ge=2)
    seed: int = 0


DataSource = Annotated[Union[CsvSource, SyntheticSource], Field(discriminator="source")]


class ModelOverride(_Strict):
    """Per-model changes applied on top of the roster entry."""

    window: Optional[int] = Field(default=None, ge=3)
    factors: Optional[int] = Field(default=None, ge=1)
    quantiles: Optional[tuple[float, ...]] = None
    bags: Optional[int] = Field(default=None, ge=1)
    copula: Optional[CopulaKind] = None


class ModelsConfig(_Strict):
    roster: list[ModelSpec] = Field(default_factory=default_roster, min_length=1)
    overrides: dict[str, ModelOverride] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _known_overrides(self) -> "ModelsConfig":
        names = [spec.name for spec in self.roster]
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate model names in roster: {names}")
        unknown = sorted(set(self.overrides) - set(names))
        if unknown:
            raise ValueError(f"Overrides for models not in the roster: {unknown}")
        return self

    def resolved(self) -> list[ModelSpec]:
        """Roster with overrides applied and re-validated."""
        specs = []
        for spec in self.roster:
            override = self.overrides.get(spec.name)
            if override is not None:
                spec = ModelSpec.model_validate({**spec.model_dump(), **override.model_dump(exclude_none=True)})
            specs.append(spec)
        return specs


class GridConfig(_Strict):
    n_draws: int = Field(default=5000, ge=2)
    subsample: int = Field(default=100, ge=1)
    frequency: Literal["quarterly"] = "quarterly"
    root_seed: int = Field(default=0, ge=0)
    max_dates: Optional[int] = Field(default=None, ge=1, description="Keep only the most recent evaluation dates per panel")
    bootstrap_reps: int = Field(default=5000, ge=1)
    cache_models: bool = False

    @model_validator(mode="after")
    def _subsample_fits(self) -> "GridConfig":
        if self.subsample > self.n_draws:
            raise ValueError(f"subsample ({self.subsample}) must not exceed n_draws ({self.n_draws})")
        return self


class OutputConfig(_Strict):
    directory: Path = Path("output")


class RunConfig(_Strict):
    """Everything a run needs; re-running the same document reproduces the same bytes."""

    data: list[DataSource] = Field(min_length=1)
    models: ModelsConfig = Field(default_factory=ModelsConfig)
    rules: list[RuleSpec] = Field(default_factory=default_rules, min_length=1)
    grid: GridConfig = Field(default_factory=GridConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @field_validator("data")
    @classmethod
    def _unique_panels(cls, data: list) -> list:
        names = [source.name for source in data]
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate panel names: {names}")
        return data

    @field_validator("rules")
    @classmethod
    def _unique_rules(cls, rules: list) -> list:
        tags = [rule.tag for rule in rules]
        if len(set(tags)) != len(tags):
            raise ValueError(f"Duplicate scoring rules: {tags}")
        return rules


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Read and validate a run configuration.

    Relative CSV paths are resolved against the configuration file's directory.

    Raises:
        ConfigError: Unreadable file, invalid JSON or schema violation
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read run configuration {path}: {e}") from e
    try:
        config = RunConfig.model_validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration {path}:\n{e}") from e

    for source in config.data:
        if isinstance(source, CsvSource) and not source.path.is_absolute():
            source.path = path.parent / source.path
    logger.debug(f"Loaded run configuration from {path} with {len(config.data)} data sources")
    return config
