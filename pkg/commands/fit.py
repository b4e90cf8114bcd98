from pathlib import Path
from typing import Optional

from floggit import flog
from pydantic import BaseModel

from circuit_runner.circuit_types import Boundary
from scaling_analysis.aggregate import AGGREGATED_FILE, read_aggregated_csv
from scaling_analysis.fit import exponent_ordering, fit_power_law, write_plot_data
from scaling_analysis.scaling_types import FitExclusions, FitResult, OrderingCheck, Parity
from utils.errors import ConfigError
from utils.logger import logger, _log_fields
from utils.logs_with_run_context import log_with_run_context
from .aggregate import cmd_aggregate
from .manifest import manifest_entry
from .utils import dataset_config


class FitReport(BaseModel):
    fit: FitResult
    ordering: Optional[OrderingCheck] = None


def _stem(observable: str, ccr: bool) -> str:
    return f"fit_{observable}{'_ccr' if ccr else ''}"


def _other_fits(dataset: Path, ccr: bool, current: FitResult) -> dict[str, FitResult]:
    fits = {current.observable: current}
    for name in ("E", "W", "I2"):
        path = dataset / f"{_stem(name, ccr)}.json"
        if name not in fits and path.exists():
            fits[name] = FitReport.model_validate_json(path.read_text(encoding="utf-8")).fit
    return fits


@flog
@log_with_run_context
@logger.catch(reraise=True)
def cmd_fit(*, dataset: str | Path, observable: str, exclude_last: bool = False,
            exclude_x: Optional[list[int]] = None, parity: Optional[Parity] = None,
            ccr: bool = False) -> FitReport:
    """
    Power-law fit of one observable's aggregated series; writes
    fit_<obs>[_ccr].json and a two-column fit_<obs>[_ccr].dat.

    Negativity is fitted on one parity only, even unless told otherwise.
    """
    dataset = Path(dataset)
    if not (dataset / AGGREGATED_FILE).exists():
        logger.info("no aggregated.csv yet; aggregating first", **_log_fields(dataset=str(dataset)))
        cmd_aggregate(dataset=dataset)
    if observable == "E" and parity is None:
        parity = "even"

    N = None
    if ccr:
        config = dataset_config(dataset)
        if config.boundary != Boundary.PBC:
            raise ConfigError("the cross-ratio domain needs a periodic chain")
        N = config.L

    series = read_aggregated_csv(dataset / AGGREGATED_FILE, observable)
    exclusions = FitExclusions(parity=parity, exclude_x=exclude_x or [], exclude_last=exclude_last)
    arguments = {"observable": observable, "exclude_last": exclude_last, "exclude_x": exclude_x,
                 "parity": parity, "ccr": ccr}
    stem = _stem(observable, ccr)
    with manifest_entry(dataset, "fit", arguments) as entry:
        result = fit_power_law(series, exclusions, domain="inverse_ccr" if ccr else "x", N=N)
        report = FitReport(fit=result, ordering=exponent_ordering(_other_fits(dataset, ccr, result)))
        (dataset / f"{stem}.json").write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
        write_plot_data(result, dataset / f"{stem}.dat", N=N)
        entry.outputs += [f"{stem}.json", f"{stem}.dat"]
    if report.ordering is not None and not report.ordering.holds:
        logger.warning("exponent ordering violated", **_log_fields(**report.ordering.model_dump()))
    return report
