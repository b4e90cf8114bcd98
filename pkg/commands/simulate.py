from pathlib import Path
from typing import Optional

from floggit import flog
from pydantic import ValidationError

from circuit_runner.circuit_types import CircuitConfig
from circuit_runner.ensemble import EnsembleSummary, run_ensemble
from circuit_runner.observables import positions_for
from circuit_runner.persistence import OBSERVABLES_FILE, RECORDS_FILE
from utils.errors import ConfigError
from utils.logger import logger
from utils.logs_with_run_context import log_with_run_context
from .manifest import manifest_entry
from .utils import load_config, resolve_threads


def _validated(config: CircuitConfig | str | Path | dict) -> CircuitConfig:
    if isinstance(config, CircuitConfig):
        resolved = config
    elif isinstance(config, dict):
        try:
            resolved = CircuitConfig.model_validate(config)
        except ValidationError as e:
            raise ConfigError(f"invalid config: {e}") from e
    else:
        resolved = load_config(config)
    try:
        for spec in resolved.observables:
            positions_for(resolved, spec)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return resolved


@flog
@log_with_run_context
@logger.catch(reraise=True)
def cmd_simulate(*, config: CircuitConfig | str | Path | dict, n: int, out: str | Path,
                 threads: Optional[int] = None, master_seed: Optional[int] = None) -> EnsembleSummary:
    """
    Runs an ensemble of n realizations and writes records.jsonl,
    observables.jsonl and manifest.json into `out`.
    """
    resolved = _validated(config)
    if master_seed is not None:
        resolved = resolved.model_copy(update={"master_seed": master_seed})
    if n < 0:
        raise ConfigError(f"--n must be >= 0, got {n}")
    workers = resolve_threads(threads)
    out = Path(out)
    with manifest_entry(out, "simulate", {"n": n, "threads": workers}, config=resolved) as entry:
        summary = run_ensemble(resolved, n, out, threads=workers)
        entry.outputs += [RECORDS_FILE, OBSERVABLES_FILE]
    return summary
