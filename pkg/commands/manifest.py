"""
manifest.json: one per output directory, listing every command run against
it and every artifact it wrote.
"""
import datetime as dt
import time
from contextlib import contextmanager
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Iterator, Literal, Optional

from pydantic import BaseModel, Field, ValidationError

from circuit_runner.circuit_types import CircuitConfig
from utils.errors import PersistenceError
from utils.logger import logger, _log_fields

MANIFEST_FILE = "manifest.json"
PACKAGE_NAME = "monitored-gme"


class CommandEntry(BaseModel):
    command: str
    arguments: dict[str, Any] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=list, description="Files written, relative to the directory.")
    code_version: str
    started_at: str
    wall_seconds: Optional[float] = None
    status: Literal["running", "completed", "failed"] = "running"


class RunManifest(BaseModel):
    config: Optional[CircuitConfig] = None
    commands: list[CommandEntry] = Field(default_factory=list)

    @property
    def artifacts(self) -> list[str]:
        return sorted({path for entry in self.commands for path in entry.outputs})


def code_version() -> str:
    try:
        return version(PACKAGE_NAME)
    except PackageNotFoundError:
        return "unknown"


def load_manifest(directory: str | Path) -> Optional[RunManifest]:
    path = Path(directory) / MANIFEST_FILE
    if not path.exists():
        return None
    try:
        return RunManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise PersistenceError(f"{path} is not a valid manifest: {e}") from e


def save_manifest(directory: str | Path, manifest: RunManifest):
    path = Path(directory) / MANIFEST_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")


@contextmanager
def manifest_entry(directory: str | Path, command: str, arguments: dict[str, Any],
                   config: Optional[CircuitConfig] = None) -> Iterator[CommandEntry]:
    """
    Appends a CommandEntry for the enclosed command to the directory's manifest,
    marked completed or failed on exit. The caller lists outputs on the entry.
    """
    entry = CommandEntry(
        command=command, arguments={k: v for k, v in arguments.items() if v is not None},
        code_version=code_version(),
        started_at=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"))
    started = time.monotonic()
    try:
        yield entry
        entry.status = "completed"
    except Exception:
        entry.status = "failed"
        raise
    finally:
        entry.wall_seconds = round(time.monotonic() - started, 3)
        try:
            manifest = load_manifest(directory) or RunManifest()
            if config is not None:
                manifest.config = config
            manifest.commands.append(entry)
            save_manifest(directory, manifest)
        except (OSError, PersistenceError) as e:
            logger.error("could not update manifest", **_log_fields(directory=str(directory), error=str(e)))
