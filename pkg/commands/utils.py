from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from circuit_runner.circuit_types import CircuitConfig
from circuit_runner.ensemble import default_threads
from circuit_runner.persistence import read_records
from utils.errors import ConfigError, PersistenceError
from .manifest import load_manifest


def load_config(path: str | Path) -> CircuitConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        return CircuitConfig.model_validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}") from e


def dataset_config(dataset: str | Path) -> CircuitConfig:
    """The dataset's circuit config, from its manifest or else its first record."""
    manifest = load_manifest(dataset)
    if manifest is not None and manifest.config is not None:
        return manifest.config
    for record in read_records(dataset):
        return record.config
    raise PersistenceError(f"{dataset} has neither a manifest config nor any records")


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        return default_threads()
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    return threads
