from pathlib import Path

from floggit import flog

from scaling_analysis.aggregate import (
    AGGREGATED_FILE, TIME_SERIES_FILE, aggregate_all, write_aggregated_csv)
from scaling_analysis.scaling_types import SeriesPoint
from utils.logger import logger
from utils.logs_with_run_context import log_with_run_context
from .manifest import manifest_entry


@flog
@log_with_run_context
@logger.catch(reraise=True)
def cmd_aggregate(*, dataset: str | Path) -> list[SeriesPoint]:
    """Writes aggregated.csv, plus time_series.csv when time-resolved rows exist."""
    dataset = Path(dataset)
    with manifest_entry(dataset, "aggregate", {}) as entry:
        spatial, temporal = aggregate_all(dataset)
        write_aggregated_csv(spatial, dataset / AGGREGATED_FILE)
        entry.outputs.append(AGGREGATED_FILE)
        if temporal:
            write_aggregated_csv(temporal, dataset / TIME_SERIES_FILE, by="layer")
            entry.outputs.append(TIME_SERIES_FILE)
    return spatial
