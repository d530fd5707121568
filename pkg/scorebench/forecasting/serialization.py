"""Versioned JSON documents for calibrated models."""

import logging
from dataclasses import asdict
from datetime import date
from pathlib import Path
from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ModelDocumentError
from .models import CalibratedModel, EdfCopulaModel, EgarchTParams, FqModel, MvGarchModel, PointMassModel
from .quantile_curve import MonotoneQuantileCurve

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class ModelDocument(BaseModel):
    """Serialized calibrated model with its window end date, seed lineage and roster entry."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    name: str
    family: Literal["edf", "fq", "mv-garch", "point-mass"]
    end_date: Optional[date] = Field(default=None, description="Last date of the calibration window")
    seed_lineage: list[Union[int, str]] = Field(default_factory=list, description="Root seed followed by the stream keys")
    model_spec: Optional[dict[str, Any]] = Field(default=None, description="Roster entry the model was fitted under")
    parameters: dict[str, Any]


def _array(value: Any) -> np.ndarray:
    return np.asarray(value, dtype=float)


def model_to_document(
    model: CalibratedModel,
    end_date: Optional[date] = None,
    seed_lineage: tuple = (),
    model_spec: Optional[dict[str, Any]] = None,
) -> ModelDocument:
    """Describe a calibrated model as a JSON-ready document."""
    if isinstance(model, EdfCopulaModel):
        family, parameters = "edf", {"support": model.support.tolist(), "correlation": model.correlation.tolist()}
    elif isinstance(model, FqModel):
        family = "fq"
        parameters = {
            "variant": model.variant,
            "m": model.m,
            "taus": model.taus.tolist(),
            "coefficients": model.coefficients.tolist(),
            "curves": [curve.to_dict() for curve in model.curves],
            "correlation": model.correlation.tolist(),
            "bags": model.bags,
        }
    elif isinstance(model, MvGarchModel):
        family = "mv-garch"
        parameters = {
            "kind": model.kind,
            "univariate": [asdict(p) for p in model.univariate],
            "correlation": model.correlation.tolist(),
            "dcc_a": model.dcc_a,
            "dcc_b": model.dcc_b,
            "qbar": None if model.qbar is None else model.qbar.tolist(),
            "q_next": None if model.q_next is None else model.q_next.tolist(),
            "metadata": model.metadata,
        }
    elif isinstance(model, PointMassModel):
        family, parameters = "point-mass", {"location": model.location.tolist()}
    else:
        raise ModelDocumentError(f"Cannot serialize {type(model).__name__}")
    return ModelDocument(
        name=model.name,
        family=family,
        end_date=end_date,
        seed_lineage=list(seed_lineage),
        model_spec=model_spec,
        parameters=parameters,
    )


def model_from_document(document: Union[ModelDocument, dict, str]) -> CalibratedModel:
    """Rebuild a calibrated model from a document, a dict or a JSON string.

    Raises:
        ModelDocumentError: Malformed document or unsupported schema version
    """
    try:
        if isinstance(document, str):
            document = ModelDocument.model_validate_json(document)
        elif isinstance(document, dict):
            document = ModelDocument.model_validate(document)
    except ValidationError as e:
        raise ModelDocumentError(f"Invalid model document: {e}") from e

    p = document.parameters
    try:
        match document.family:
            case "edf":
                return EdfCopulaModel(support=_array(p["support"]), correlation=_array(p["correlation"]), name=document.name)
            case "fq":
                return FqModel(
                    variant=p["variant"],
                    m=int(p["m"]),
                    taus=_array(p["taus"]),
                    coefficients=_array(p["coefficients"]),
                    curves=tuple(MonotoneQuantileCurve.from_dict(c) for c in p["curves"]),
                    correlation=_array(p["correlation"]),
                    bags=int(p["bags"]),
                    name=document.name,
                )
            case "mv-garch":
                return MvGarchModel(
                    kind=p["kind"],
                    univariate=tuple(EgarchTParams(**u) for u in p["univariate"]),
                    correlation=_array(p["correlation"]),
                    dcc_a=float(p["dcc_a"]),
                    dcc_b=float(p["dcc_b"]),
                    qbar=None if p["qbar"] is None else _array(p["qbar"]),
                    q_next=None if p["q_next"] is None else _array(p["q_next"]),
                    name=document.name,
                    metadata=p.get("metadata", {}),
                )
            case "point-mass":
                return PointMassModel(location=_array(p["location"]), name=document.name)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelDocumentError(f"Model document '{document.name}' is missing or has invalid parameters: {e}") from e
    raise ModelDocumentError(f"Unknown model family {document.family!r}")


def save_model(
    model: CalibratedModel,
    path: Union[str, Path],
    end_date: Optional[date] = None,
    seed_lineage: tuple = (),
    model_spec: Optional[dict[str, Any]] = None,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model_to_document(model, end_date, seed_lineage, model_spec).model_dump_json(indent=2), encoding="utf-8")
    logger.debug(f"Saved {model.name} to {path}")


def load_document(path: Union[str, Path]) -> ModelDocument:
    """Read a stored document without rebuilding the model.

    Raises:
        ModelDocumentError: Malformed document or unsupported schema version
    """
    try:
        return ModelDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ModelDocumentError(f"Invalid model document {path}: {e}") from e


def load_model(path: Union[str, Path]) -> CalibratedModel:
    return model_from_document(load_document(path))
