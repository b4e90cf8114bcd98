import math
import os
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from pathlib import Path

from floggit import flog
from pydantic import BaseModel, Field

from utils.logger import logger, _log_fields
from .circuit_types import CircuitConfig, CircuitRecord, ObservableRow
from .persistence import DatasetWriter
from .runner import run_realization


class EnsembleSummary(BaseModel):
    n_realizations: int
    n_rows: int
    n_measurement_events: int
    means: dict[str, float] = Field(
        default_factory=dict, description="Mean final-time value per observable over all rows.")
    wall_seconds: float = 0.0


def _run_one(config: CircuitConfig, realization_index: int) -> tuple[CircuitRecord, list[ObservableRow]]:
    # the 2^L state stays in the worker; the record replays it
    result = run_realization(config, realization_index)
    return result.record, result.rows


def default_threads() -> int:
    return max(1, int(os.getenv("GME_THREADS", "1")))


@flog
@logger.catch(reraise=True)
def run_ensemble(config: CircuitConfig, n_realizations: int, out: str | Path,
                 threads: int = 1) -> EnsembleSummary:
    """
    Runs realizations 0..n-1 and streams their records and rows to `out`.

    Results are consumed in realization order whatever the worker count, so
    the files and the summary do not depend on scheduling.
    """
    if n_realizations < 0:
        raise ValueError(f"n_realizations must be >= 0, got {n_realizations}")
    progress_every = max(1, int(os.getenv("GME_PROGRESS_EVERY", "100")))
    started = time.monotonic()
    sums: dict[str, list[float]] = defaultdict(list)
    n_measurements = 0

    with DatasetWriter(out) as writer:
        if threads > 1 and n_realizations > 1:
            pool = ProcessPoolExecutor(max_workers=threads)
            results = pool.map(_run_one, repeat(config), range(n_realizations),
                               chunksize=max(1, n_realizations // (4 * threads)))
        else:
            pool = None
            results = map(_run_one, repeat(config), range(n_realizations))
        try:
            for done, (record, rows) in enumerate(results, start=1):
                writer.write_record(record)
                writer.write_rows(rows)
                n_measurements += len(record.measurement_events)
                for row in rows:
                    if row.meta.get("layer") is None:
                        sums[row.observable].append(row.value)
                if done % progress_every == 0:
                    logger.info("realizations done", **_log_fields(done=done, total=n_realizations))
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)

    summary = EnsembleSummary(
        n_realizations=n_realizations, n_rows=writer.n_rows, n_measurement_events=n_measurements,
        means={name: math.fsum(values) / len(values) for name, values in sorted(sums.items())},
        wall_seconds=time.monotonic() - started)
    logger.info("ensemble finished", **_log_fields(**summary.model_dump(exclude={"means"})))
    return summary
