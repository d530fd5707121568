"""Configurable multivariate scoring rules used by the simulation grid."""

import re
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ScoringError
from .ensemble import EnsembleLike, energy_scores, variogram_scores


class EnergyRule(BaseModel):
    """Energy score with exponent beta."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["energy"] = "energy"
    beta: float = Field(default=1.0, gt=0, lt=2, description="Exponent of the Euclidean distance")

    @property
    def tag(self) -> str:
        return f"ES({self.beta:g})"

    def score(self, forecast: EnsembleLike, observations: np.ndarray) -> np.ndarray:
        return energy_scores(forecast, observations, self.beta)


class VariogramRule(BaseModel):
    """Variogram score of order p with unit weights."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["variogram"] = "variogram"
    p: float = Field(default=0.5, gt=0, description="Order of the absolute component differences")

    @property
    def tag(self) -> str:
        return f"VS({self.p:g})"

    def score(self, forecast: EnsembleLike, observations: np.ndarray) -> np.ndarray:
        return variogram_scores(forecast, observations, self.p)


ScoringRule = Union[EnergyRule, VariogramRule]
RuleSpec = Annotated[ScoringRule, Field(discriminator="kind")]


def default_rules() -> list[ScoringRule]:
    """ES(1), VS(0.5), VS(1) and VS(2)."""
    return [EnergyRule(beta=1.0), VariogramRule(p=0.5), VariogramRule(p=1.0), VariogramRule(p=2.0)]


_TAG = re.compile(r"^(ES|VS)\(([^()]+)\)$")


def rule_from_tag(tag: str) -> ScoringRule:
    """Parse a tag such as ``ES(1)`` or ``VS(0.5)`` back into a rule."""
    match = _TAG.match(tag.strip())
    if match is None:
        raise ScoringError(f"Unrecognised scoring rule tag {tag!r}")
    family, raw = match.groups()
    try:
        value = float(raw)
        return EnergyRule(beta=value) if family == "ES" else VariogramRule(p=value)
    except ValueError as e:
        raise ScoringError(f"Invalid parameter in scoring rule tag {tag!r}: {e}") from e
