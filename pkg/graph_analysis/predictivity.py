"""
Does the graph picture predict W? Compares mean W between triples with
connected and disconnected G_min, and between low and high parasitic scores.
"""
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy.stats import ttest_ind

from circuit_runner.circuit_types import ObservableRow
from utils.logger import logger, _log_fields
from .graph_types import GraphRow


class GroupComparison(BaseModel):
    label_high: str
    label_low: str
    mean_high: Optional[float] = None
    mean_low: Optional[float] = None
    n_high: int = 0
    n_low: int = 0
    p_value: Optional[float] = Field(None, description="One-sided Welch t-test, mean_high > mean_low.")


class PredictivityReport(BaseModel):
    n_joined: int
    connectivity: GroupComparison
    parasitic: GroupComparison
    median_parasitic_score: Optional[float] = None


def _compare(high: list[float], low: list[float], label_high: str, label_low: str) -> GroupComparison:
    comparison = GroupComparison(
        label_high=label_high, label_low=label_low, n_high=len(high), n_low=len(low),
        mean_high=math.fsum(high) / len(high) if high else None,
        mean_low=math.fsum(low) / len(low) if low else None)
    if len(high) >= 2 and len(low) >= 2 and (np.var(high) > 0 or np.var(low) > 0):
        result = ttest_ind(high, low, equal_var=False, alternative="greater")
        comparison.p_value = float(result.pvalue)
    return comparison


def predictivity_report(graph_rows: list[GraphRow], w_rows: list[ObservableRow]) -> PredictivityReport:
    w_by_key = {(row.realization, tuple(row.positions)): row.value
                for row in w_rows if row.observable == "W" and row.meta.get("layer") is None}
    joined = [(row, w_by_key[(row.realization, tuple(row.targets))])
              for row in graph_rows if (row.realization, tuple(row.targets)) in w_by_key]

    connectivity = _compare(
        [w for row, w in joined if row.connected], [w for row, w in joined if not row.connected],
        "connected", "disconnected")

    scored = [(row.parasitic_score, w) for row, w in joined
              if row.connected and row.parasitic_score is not None]
    median = float(np.median([score for score, _ in scored])) if scored else None
    parasitic = _compare(
        [w for score, w in scored if score < median] if scored else [],
        [w for score, w in scored if score >= median] if scored else [],
        "below_median_parasitic", "at_or_above_median_parasitic")

    report = PredictivityReport(
        n_joined=len(joined), connectivity=connectivity, parasitic=parasitic,
        median_parasitic_score=median)
    logger.info("graph predictivity", **_log_fields(
        n_joined=report.n_joined, connected_mean=connectivity.mean_high,
        disconnected_mean=connectivity.mean_low, p_value=connectivity.p_value))
    return report
