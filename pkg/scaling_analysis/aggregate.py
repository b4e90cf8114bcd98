"""
Per-separation ensemble statistics from persisted observable rows, and the
aggregated CSV they are exchanged in.
"""
import csv
import math
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from circuit_runner.circuit_types import ObservableRow
from circuit_runner.persistence import read_rows
from utils.errors import PersistenceError
from utils.logger import logger, _log_fields
from .scaling_types import SeriesPoint

AGGREGATED_FILE = "aggregated.csv"
TIME_SERIES_FILE = "time_series.csv"
CSV_COLUMNS = ["observable", "x", "mean", "stderr", "n_total", "n_positive"]
TIME_COLUMNS = ["observable", "layer", "mean", "stderr", "n_total", "n_positive"]
EMPTY = "EMPTY"

Dataset = Union[str, Path, Sequence[ObservableRow]]


def _rows(dataset: Dataset, observable: str) -> list[ObservableRow]:
    if isinstance(dataset, (str, Path)):
        return read_rows(dataset, observable)
    return [row for row in dataset if row.observable == observable]


def summarize(values: Sequence[float], observable: str, x: Optional[int] = None,
              layer: Optional[int] = None) -> SeriesPoint:
    """Mean and stderr with compensated sums; independent of the order of `values`."""
    n = len(values)
    if n == 0:
        logger.warning("no rows to aggregate", **_log_fields(observable=observable, x=x, layer=layer))
        return SeriesPoint(observable=observable, x=x, layer=layer)
    ordered = sorted(values)
    mean = math.fsum(ordered) / n
    if n > 1:
        variance = math.fsum((v - mean) ** 2 for v in ordered) / (n - 1)
        stderr = math.sqrt(variance) / math.sqrt(n)
    else:
        stderr = 0.0
    return SeriesPoint(observable=observable, x=x, layer=layer, mean=mean, stderr=stderr,
                       n_total=n, n_positive=sum(1 for v in values if v > 0))


def _final(rows: Iterable[ObservableRow]) -> list[ObservableRow]:
    return [row for row in rows if row.meta.get("layer") is None]


def aggregate(dataset: Dataset, observable: str, x: int) -> SeriesPoint:
    """Final-time rows of `observable` at separation x, zeros included."""
    values = [row.value for row in _final(_rows(dataset, observable)) if row.meta.get("x") == x]
    return summarize(values, observable, x)


def aggregate_series(dataset: Dataset, observable: str) -> list[SeriesPoint]:
    by_x = defaultdict(list)
    for row in _final(_rows(dataset, observable)):
        if row.meta.get("x") is not None:
            by_x[row.meta["x"]].append(row.value)
    return [summarize(by_x[x], observable, x) for x in sorted(by_x)]


def aggregate_time_series(dataset: Dataset, observable: str) -> list[SeriesPoint]:
    """Time-resolved rows averaged per layer over realizations and positions."""
    by_layer = defaultdict(list)
    for row in _rows(dataset, observable):
        if row.meta.get("layer") is not None:
            by_layer[row.meta["layer"]].append(row.value)
    return [summarize(by_layer[layer], observable, layer=layer) for layer in sorted(by_layer)]


def aggregate_all(dataset: str | Path) -> tuple[list[SeriesPoint], list[SeriesPoint]]:
    rows = read_rows(dataset)
    observables = sorted({row.observable for row in rows})
    spatial = [p for name in observables for p in aggregate_series(rows, name)]
    temporal = [p for name in observables for p in aggregate_time_series(rows, name)]
    return spatial, temporal


def _cell(value: Optional[float]) -> str:
    return EMPTY if value is None else repr(float(value))


def write_aggregated_csv(points: Sequence[SeriesPoint], path: str | Path, by: str = "x"):
    """Rows sorted by (observable, x) or (observable, layer); floats as shortest round-trip repr."""
    columns = CSV_COLUMNS if by == "x" else TIME_COLUMNS
    ordered = sorted(points, key=lambda p: (p.observable, getattr(p, by)))
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for p in ordered:
            writer.writerow([p.observable, getattr(p, by), _cell(p.mean), _cell(p.stderr), p.n_total, p.n_positive])


def read_aggregated_csv(path: str | Path, observable: Optional[str] = None) -> list[SeriesPoint]:
    path = Path(path)
    if not path.exists():
        raise PersistenceError(f"{path} does not exist")
    points = []
    with path.open(newline="", encoding="utf-8") as f:
        for record in csv.DictReader(f):
            if observable is not None and record["observable"] != observable:
                continue
            points.append(SeriesPoint(
                observable=record["observable"], x=int(record["x"]),
                mean=None if record["mean"] == EMPTY else float(record["mean"]),
                stderr=None if record["stderr"] == EMPTY else float(record["stderr"]),
                n_total=int(record["n_total"]), n_positive=int(record["n_positive"])))
    return points
