from pathlib import Path
from typing import Optional

from floggit import flog

from circuit_runner.circuit_types import ObservableSpec
from circuit_runner.observables import positions_for
from circuit_runner.persistence import OBSERVABLES_FILE, read_records, read_rows
from graph_analysis.export import write_adjacency, write_layout
from graph_analysis.graph_types import GraphRow, SpanningMode
from graph_analysis.parasitic import escape_edges, parasitic_score
from graph_analysis.predictivity import PredictivityReport, predictivity_report
from graph_analysis.spacetime import build_spacetime_graph
from graph_analysis.steiner import minimal_spanning_graph
from utils.errors import ConfigError
from utils.logger import logger, _log_fields
from utils.logs_with_run_context import log_with_run_context
from .manifest import manifest_entry
from .utils import dataset_config

GRAPHS_FILE = "graphs.jsonl"
PREDICTIVITY_FILE = "predictivity.json"
EXPORT_DIR = "graphs"


@flog
@log_with_run_context
@logger.catch(reraise=True)
def cmd_graphs(*, dataset: str | Path, targets: Optional[list[int]] = None,
               positions_spec: str = "(i,i+x,i+2x)", mode: SpanningMode = SpanningMode.UNRESTRICTED,
               export: int = 0) -> Optional[PredictivityReport]:
    """
    Spacetime graph, G_min and parasitic score for every record and target set.

    Targets are one explicit site list, or else every position tuple of
    `positions_spec`. The first `export` realizations also get an adjacency
    list and a layout CSV. When the dataset holds W rows a predictivity report
    is written as well.
    """
    dataset = Path(dataset)
    config = dataset_config(dataset)
    spec = ObservableSpec(name="W", positions_spec=positions_spec, sites=targets)
    try:
        target_sets = [list(p) for _, p in positions_for(config, spec)]
    except ValueError as e:
        raise ConfigError(str(e)) from e

    arguments = {"targets": targets, "positions_spec": None if targets else positions_spec,
                 "mode": mode.value, "export": export}
    with manifest_entry(dataset, "graphs", arguments) as entry:
        rows = []
        with (dataset / GRAPHS_FILE).open("w", encoding="utf-8") as f:
            for record in read_records(dataset):
                graph = build_spacetime_graph(record)
                for number, target in enumerate(target_sets):
                    g_min = minimal_spanning_graph(graph, target, mode=mode)
                    score = parasitic_score(graph, g_min, target) if g_min.connected else None
                    row = GraphRow(
                        realization=record.realization_index, targets=target, spanned=g_min.spanned,
                        connected=g_min.connected, edge_count=g_min.edge_count,
                        parasitic_score=score, seeds=g_min.seeds, mode=mode)
                    f.write(row.model_dump_json() + "\n")
                    rows.append(row)

                    if number == 0 and record.realization_index < export:
                        out_dir = dataset / EXPORT_DIR
                        out_dir.mkdir(exist_ok=True)
                        stem = f"r{record.realization_index}"
                        write_adjacency(graph, out_dir / f"{stem}_adjacency.txt")
                        escapes = escape_edges(
                            graph, g_min, [s for s in range(graph.L) if s not in target])
                        write_layout(graph, out_dir / f"{stem}_layout.csv", g_min, escapes)
                        entry.outputs += [f"{EXPORT_DIR}/{stem}_adjacency.txt", f"{EXPORT_DIR}/{stem}_layout.csv"]
        entry.outputs.append(GRAPHS_FILE)

        report = None
        if (dataset / OBSERVABLES_FILE).exists():
            w_rows = read_rows(dataset, "W")
            if w_rows:
                report = predictivity_report(rows, w_rows)
                (dataset / PREDICTIVITY_FILE).write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
                entry.outputs.append(PREDICTIVITY_FILE)

    logger.info("graphs analyzed", **_log_fields(
        n_rows=len(rows), n_connected=sum(r.connected for r in rows)))
    return report
