"""
JSONL dataset files: one CircuitRecord per line in records.jsonl, one
ObservableRow per line in observables.jsonl.
"""
from pathlib import Path
from typing import Iterable, Iterator, Optional

from pydantic import ValidationError

from utils.errors import PersistenceError
from utils.logger import logger, _log_fields
from .circuit_types import CircuitRecord, ObservableRow

RECORDS_FILE = "records.jsonl"
OBSERVABLES_FILE = "observables.jsonl"
PARTIAL_SUFFIX = ".partial"


def _mark_partial(path: Path, error: Exception):
    marker = path.with_name(path.name + PARTIAL_SUFFIX)
    try:
        marker.write_text(f"{type(error).__name__}: {error}\n")
    except OSError:
        pass
    logger.error("dataset write aborted", **_log_fields(file=str(path), marker=str(marker), error=str(error)))


class DatasetWriter:
    """
    Single consumer of realization output. Opening truncates (or, with
    append=True, extends) the dataset files; a failure leaves a `.partial`
    marker next to the file being written and raises PersistenceError.
    """

    def __init__(self, directory: str | Path, append: bool = False, records: bool = True):
        self.directory = Path(directory)
        self._mode = "a" if append else "w"
        self._with_records = records
        self._files = {}
        self.n_records = 0
        self.n_rows = 0

    def __enter__(self) -> "DatasetWriter":
        names = [OBSERVABLES_FILE] + ([RECORDS_FILE] if self._with_records else [])
        for name in names:
            path = self.directory / name
            try:
                self.directory.mkdir(parents=True, exist_ok=True)
                self._files[name] = path.open(self._mode, encoding="utf-8")
            except OSError as e:
                _mark_partial(path, e)
                self.close()
                raise PersistenceError(f"cannot open {path}: {e}") from e
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()
        if exc is not None and not isinstance(exc, PersistenceError):
            for name in self._files:
                _mark_partial(self.directory / name, exc)
        return False

    def close(self):
        for handle in self._files.values():
            if not handle.closed:
                handle.close()

    def _write(self, name: str, line: str):
        try:
            self._files[name].write(line + "\n")
        except OSError as e:
            _mark_partial(self.directory / name, e)
            raise PersistenceError(f"cannot write {self.directory / name}: {e}") from e

    def write_record(self, record: CircuitRecord):
        self._write(RECORDS_FILE, record.model_dump_json())
        self.n_records += 1

    def write_rows(self, rows: Iterable[ObservableRow]):
        for row in rows:
            self._write(OBSERVABLES_FILE, row.model_dump_json())
            self.n_rows += 1


def _read_jsonl(path: Path, model):
    if not path.exists():
        raise PersistenceError(f"{path} does not exist")
    with path.open(encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield model.model_validate_json(line)
            except ValidationError as e:
                raise PersistenceError(f"{path}:{number} is not a valid {model.__name__}: {e}") from e


def read_records(directory: str | Path) -> Iterator[CircuitRecord]:
    yield from _read_jsonl(Path(directory) / RECORDS_FILE, CircuitRecord)


def read_rows(directory: str | Path, observable: Optional[str] = None) -> list[ObservableRow]:
    rows = _read_jsonl(Path(directory) / OBSERVABLES_FILE, ObservableRow)
    return [row for row in rows if observable is None or row.observable == observable]


def is_partial(directory: str | Path) -> bool:
    return any(Path(directory).glob(f"*{PARTIAL_SUFFIX}"))
