import argparse
import json
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

# NOTE: load .env before anything reads LOG_LEVEL or GME_* variables
load_dotenv()

from pydantic import ValidationError

from commands.aggregate import cmd_aggregate
from commands.fit import cmd_fit
from commands.graphs import cmd_graphs
from commands.measure import cmd_measure
from commands.presets import PRESETS, preset_config
from commands.simulate import cmd_simulate
from graph_analysis.graph_types import SpanningMode
from utils.errors import CircuitToolError, ConfigError
from utils.logger import logger


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace("(", "").replace(")", "").split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monitored-gme",
        description="Monitored hybrid circuits: simulate, measure entanglement, analyze graphs, fit scaling.")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Run an ensemble of realizations.")
    simulate.add_argument("config", nargs="?", help="JSON CircuitConfig file.")
    simulate.add_argument("--preset", choices=sorted(PRESETS), help="Named experiment instead of a file.")
    simulate.add_argument("--L", type=int, help="Preset override: chain length.")
    simulate.add_argument("--p", type=float, help="Preset override: measurement rate.")
    simulate.add_argument("--layers", type=int, help="Preset override: unitary layers.")
    simulate.add_argument("--seed", type=int, help="Master seed override.")
    simulate.add_argument("--n", type=int, required=True, help="Number of realizations.")
    simulate.add_argument("--out", required=True, help="Dataset directory.")
    simulate.add_argument("--threads", type=int, help="Worker processes (default GME_THREADS or 1).")

    measure = sub.add_parser("measure", help="Evaluate an observable on replayed final states.")
    measure.add_argument("dataset")
    measure.add_argument("--observable", required=True, choices=["W", "I2", "W4", "E", "D"])
    measure.add_argument("--positions-spec", default="(i,i+x,i+2x)")
    measure.add_argument("--separations", type=_int_list, help="Comma-separated x values.")
    measure.add_argument("--sites", type=_int_list, help="One explicit position tuple, e.g. 4,7,10.")
    measure.add_argument("--threads", type=int)

    graphs = sub.add_parser("graphs", help="Spacetime graphs, G_min and parasitic scores.")
    graphs.add_argument("dataset")
    graphs.add_argument("--targets", type=_int_list, help="Explicit target sites, e.g. 3,5,7.")
    graphs.add_argument("--positions-spec", default="(i,i+x,i+2x)")
    graphs.add_argument("--mode", choices=[m.value for m in SpanningMode], default=SpanningMode.UNRESTRICTED.value)
    graphs.add_argument("--export", type=int, default=0, help="Export graphs of the first N realizations.")

    aggregate = sub.add_parser("aggregate", help="Write aggregated.csv.")
    aggregate.add_argument("dataset")

    fit = sub.add_parser("fit", help="Power-law fit of an aggregated series.")
    fit.add_argument("dataset")
    fit.add_argument("--observable", required=True, choices=["W", "I2", "W4", "E", "D"])
    fit.add_argument("--exclude-last", action="store_true")
    fit.add_argument("--exclude-x", type=_int_list)
    fit.add_argument("--parity", choices=["even", "odd"])
    fit.add_argument("--ccr", action="store_true", help="Fit against 1/eta instead of x.")
    return parser


def _run(args: argparse.Namespace):
    if args.command == "simulate":
        if (args.config is None) == (args.preset is None):
            raise ConfigError("give exactly one of CONFIG or --preset")
        if args.preset:
            config = preset_config(args.preset, L=args.L, p=args.p, layers=args.layers)
        else:
            config = args.config
        return cmd_simulate(config=config, n=args.n, out=args.out, threads=args.threads,
                            master_seed=args.seed)
    if args.command == "measure":
        return cmd_measure(dataset=args.dataset, observable=args.observable,
                           positions_spec=args.positions_spec, separations=args.separations,
                           sites=args.sites, threads=args.threads)
    if args.command == "graphs":
        return cmd_graphs(dataset=args.dataset, targets=args.targets, positions_spec=args.positions_spec,
                          mode=SpanningMode(args.mode), export=args.export)
    if args.command == "aggregate":
        return cmd_aggregate(dataset=args.dataset)
    return cmd_fit(dataset=args.dataset, observable=args.observable, exclude_last=args.exclude_last,
                   exclude_x=args.exclude_x, parity=args.parity, ccr=args.ccr)


def exit_code(error: BaseException) -> int:
    """0 success, 2 config, 3 I/O, 4 numerical, 1 anything else."""
    if isinstance(error, CircuitToolError):
        return error.exit_code
    if isinstance(error, (ValidationError, ValueError)):
        return 2
    if isinstance(error, OSError):
        return 3
    return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = _run(args)
    except Exception as e:
        logger.error("command failed", command=args.command, error=str(e), error_type=type(e).__name__)
        return exit_code(e)
    if hasattr(result, "model_dump"):
        print(json.dumps(result.model_dump(mode="json"), indent=2))
    elif result is not None and not isinstance(result, list):
        print(json.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
