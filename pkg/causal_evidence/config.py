"""Configuration files for sweeps and analyses.

A config file is either a YAML mapping (``.yaml``/``.yml``) or a flat
``key = value`` file with ``#`` comments. In key/value files list values are
comma separated, except ``model`` which repeats one spec per line because
model specs contain commas themselves.
"""

from pathlib import Path
from typing import Any

import structlog
import yaml
from pydantic import ValidationError

from .errors import ConfigError
from .models import (
    AnalysisConfig,
    BasisSpec,
    ColumnMapping,
    EstimatorSettings,
    ModelKind,
    ModelSpec,
    SweepConfig,
)

logger = structlog.get_logger(__name__)

DESCRIPTIVE_KEYS = {"name", "description"}
SETTINGS_KEYS = set(EstimatorSettings.model_fields)
SWEEP_KEYS = {
    "scenario",
    "n_grid",
    "beta",
    "reps",
    "rep_start",
    "alpha",
    "seed",
    "models",
    "basis",
    "interactions",
    "workers",
    "cache_dir",
    "out",
}
ANALYSIS_KEYS = {
    "csv",
    "outcome",
    "treatment",
    "instrument",
    "mediator",
    "covariates",
    "model",
    "alpha",
    "level",
    "basis",
    "interactions",
    "out",
}
REPEATABLE_KEYS = {"model"}


def _parse_key_value(text: str, path: Path) -> dict[str, Any]:
    data: dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{number}: expected key = value, got {raw.strip()!r}")
        key = key.strip().lower().replace("-", "_")
        value = value.strip()
        if key in REPEATABLE_KEYS:
            data.setdefault(key, []).append(value)
        elif key in data:
            raise ConfigError(f"{path}:{number}: duplicate key {key!r}")
        else:
            data[key] = value
    return data


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a YAML or key/value config file into a plain dict."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e

    if path.suffix.lower() in {".yaml", ".yml"}:
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: invalid YAML: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        data = {str(k).lower().replace("-", "_"): v for k, v in data.items()}
    else:
        data = _parse_key_value(text, path)
    logger.debug("loaded config", path=str(path), keys=sorted(data))
    return data


def merge_overrides(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    """``base`` updated with every override that was actually given."""
    merged = dict(base)
    merged.update({k: v for k, v in overrides.items() if v is not None and v != ()})
    return merged


def _check_keys(data: dict[str, Any], allowed: set[str], kind: str) -> None:
    unknown = set(data) - allowed - SETTINGS_KEYS - DESCRIPTIVE_KEYS
    if unknown:
        raise ConfigError(f"unknown {kind} config key(s): {', '.join(sorted(unknown))}")


def _as_list(value: Any) -> list[Any]:
    if value is None:
        return []
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    if isinstance(value, list | tuple):
        items: list[Any] = []
        for item in value:
            items.extend(_as_list(item) if isinstance(item, str) else [item])
        return items
    return [value]


def _as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in {"1", "true", "yes", "on"}


def _basis(data: dict[str, Any]) -> BasisSpec:
    interactions = _as_bool(data.get("interactions", False))
    if "basis" not in data:
        return BasisSpec(include_interactions=interactions)
    try:
        return BasisSpec.parse(str(data["basis"]), include_interactions=interactions)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def settings_from_config(data: dict[str, Any]) -> EstimatorSettings:
    try:
        return EstimatorSettings(**{k: data[k] for k in SETTINGS_KEYS if k in data})
    except ValidationError as e:
        raise ConfigError(f"invalid estimator settings: {e}") from e


def mapping_from_config(data: dict[str, Any]) -> ColumnMapping:
    try:
        return ColumnMapping(
            outcome_name=data["outcome"],
            treatment_name=data["treatment"],
            instrument_name=data.get("instrument") or None,
            mediator_name=data.get("mediator") or None,
            covariate_names=[str(c) for c in _as_list(data.get("covariates"))],
        )
    except KeyError as e:
        raise ConfigError(f"missing required key {e.args[0]!r}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid column mapping: {e}") from e


def sweep_from_config(data: dict[str, Any]) -> SweepConfig:
    """Validate a sweep config; ``seed`` is mandatory."""
    _check_keys(data, SWEEP_KEYS, "simulate")
    if "seed" not in data:
        raise ConfigError("a seed is required for reproducible sweeps")
    fields: dict[str, Any] = {
        "scenario": data.get("scenario"),
        "master_seed": data["seed"],
        "basis": _basis(data),
        "settings": settings_from_config(data),
    }
    if "n_grid" in data:
        fields["n_grid"] = _as_list(data["n_grid"])
    if "beta" in data:
        fields["beta_values"] = _as_list(data["beta"])
    for key in ("reps", "rep_start", "alpha"):
        if key in data:
            fields[key] = data[key]
    if data.get("models"):
        try:
            fields["models"] = [ModelKind(str(m).lower()) for m in _as_list(data["models"])]
        except ValueError as e:
            raise ConfigError(str(e)) from e
    try:
        return SweepConfig(**fields)
    except ValidationError as e:
        raise ConfigError(f"invalid simulate config: {e}") from e


def analysis_from_config(data: dict[str, Any]) -> AnalysisConfig:
    _check_keys(data, ANALYSIS_KEYS, "analyze")
    basis = _basis(data)
    raw_models = data.get("model") or []
    if isinstance(raw_models, str):
        raw_models = [raw_models]
    try:
        models = [ModelSpec.parse(str(text), default_basis=basis) for text in raw_models]
    except ValueError as e:
        raise ConfigError(str(e)) from e
    fields: dict[str, Any] = {
        "mapping": mapping_from_config(data),
        "models": models,
        "settings": settings_from_config(data),
    }
    if "alpha" in data:
        fields["alphas"] = _as_list(data["alpha"])
    if "level" in data:
        fields["level"] = data["level"]
    try:
        return AnalysisConfig(**fields)
    except ValidationError as e:
        raise ConfigError(f"invalid analyze config: {e}") from e
