from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from pathlib import Path
from typing import Optional

from floggit import flog

from circuit_runner.circuit_types import CircuitRecord, ObservableName, ObservableRow, ObservableSpec
from circuit_runner.observables import evaluate_observables, positions_for
from circuit_runner.persistence import OBSERVABLES_FILE, DatasetWriter, read_records, read_rows
from circuit_runner.runner import replay_realization
from utils.errors import ConfigError
from utils.logger import logger, _log_fields
from utils.logs_with_run_context import log_with_run_context
from .manifest import manifest_entry
from .utils import dataset_config, resolve_threads


def _measure_record(record: CircuitRecord, spec: ObservableSpec) -> list[ObservableRow]:
    state = replay_realization(record)
    return evaluate_observables(state, record.config, record.realization_index, observables=[spec])


@flog
@log_with_run_context
@logger.catch(reraise=True)
def cmd_measure(*, dataset: str | Path, observable: ObservableName,
                positions_spec: str = "(i,i+x,i+2x)", separations: Optional[list[int]] = None,
                sites: Optional[list[int]] = None, threads: Optional[int] = None) -> int:
    """
    Replays every persisted record to its final state and evaluates one more
    observable on it. Existing final-time rows of that observable at the same
    positions are replaced. Returns the number of rows written.
    """
    dataset = Path(dataset)
    config = dataset_config(dataset)
    spec = ObservableSpec(name=observable, positions_spec=positions_spec,
                          separations=separations, sites=sites)
    try:
        positions = {p for _, p in positions_for(config, spec)}
    except ValueError as e:
        raise ConfigError(str(e)) from e

    arguments = {"observable": observable, "positions_spec": positions_spec,
                 "separations": separations, "sites": sites}
    with manifest_entry(dataset, "measure", arguments) as entry:
        if not positions:
            logger.info("positions spec selects no positions; nothing to measure", **_log_fields(
                observable=observable, positions_spec=positions_spec, L=config.L))
            return 0

        records = list(read_records(dataset))
        workers = resolve_threads(threads)
        if workers > 1 and len(records) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                new_rows = [row for rows in pool.map(_measure_record, records, repeat(spec)) for row in rows]
        else:
            new_rows = [row for record in records for row in _measure_record(record, spec)]

        kept = [row for row in read_rows(dataset)
                if not (row.observable == observable and tuple(row.positions) in positions
                        and row.meta.get("layer") is None)]
        with DatasetWriter(dataset, records=False) as writer:
            writer.write_rows(kept)
            writer.write_rows(new_rows)
        entry.outputs.append(OBSERVABLES_FILE)

    logger.info("measured", **_log_fields(observable=observable, n_rows=len(new_rows), n_records=len(records)))
    return len(new_rows)
