import asyncio
from dotenv import load_dotenv
from typing import Annotated, Optional

# NOTE: this loads environment variables from .env file BEFORE any other imports
load_dotenv()

from fastmcp import FastMCP

from commands.aggregate import cmd_aggregate
from commands.fit import cmd_fit
from commands.graphs import cmd_graphs
from commands.measure import cmd_measure
from commands.presets import preset_config
from commands.simulate import cmd_simulate
from graph_analysis.graph_types import SpanningMode
from utils.errors import ConfigError
from utils.logs_with_run_context import log_with_run_context

mcp = FastMCP("monitored_gme")


@mcp.tool(
        name='simulate',
        description='Runs an ensemble of monitored brickwork circuits and writes records, observable rows and a manifest to the output directory. Give either a JSON circuit config or a preset name.'
)
@log_with_run_context
async def simulate(
        n: Annotated[int, "Number of realizations."],
        out: Annotated[str, "Dataset directory to write."],
        config: Annotated[Optional[dict], "CircuitConfig as a JSON object."] = None,
        preset: Annotated[Optional[str], "Preset name, e.g. fig4 or fig8-L16."] = None,
        L: Annotated[Optional[int], "Preset override: chain length."] = None,
        p: Annotated[Optional[float], "Preset override: measurement rate."] = None,
        layers: Annotated[Optional[int], "Preset override: unitary layers."] = None,
        master_seed: Annotated[Optional[int], "Master seed override."] = None,
        threads: Annotated[Optional[int], "Worker processes."] = None,
) -> dict:
    if (config is None) == (preset is None):
        raise ConfigError("give exactly one of config or preset")
    # a raw config dict is validated inside cmd_simulate so it fails as a ConfigError
    resolved = preset_config(preset, L=L, p=p, layers=layers) if preset else config
    summary = await asyncio.to_thread(
        cmd_simulate, config=resolved, n=n, out=out, threads=threads, master_seed=master_seed)
    return summary.model_dump(mode="json")


@mcp.tool(
        name='measure',
        description='Replays the final states of a dataset and evaluates one more observable (W, I2, W4, E or D) over a positions spec such as (i,i+x,i+2x).'
)
@log_with_run_context
async def measure(
        dataset: Annotated[str, "Dataset directory."],
        observable: Annotated[str, "W, I2, W4, E or D."],
        positions_spec: Annotated[str, "Position template."] = "(i,i+x,i+2x)",
        separations: Annotated[Optional[list[int]], "Restrict to these separations."] = None,
) -> int:
    return await asyncio.to_thread(
        cmd_measure, dataset=dataset, observable=observable,
        positions_spec=positions_spec, separations=separations)


@mcp.tool(
        name='analyze_graphs',
        description='Builds spacetime entanglement graphs of every realization, finds minimal spanning graphs of the target spins and scores parasitic graphs.'
)
@log_with_run_context
async def analyze_graphs(
        dataset: Annotated[str, "Dataset directory."],
        targets: Annotated[Optional[list[int]], "Explicit target sites; the positions spec is used when omitted."] = None,
        positions_spec: Annotated[str, "Position template for target triples."] = "(i,i+x,i+2x)",
        mode: Annotated[str, "UNRESTRICTED or SINGLE_SEED."] = "UNRESTRICTED",
) -> Optional[dict]:
    report = await asyncio.to_thread(
        cmd_graphs, dataset=dataset, targets=targets, positions_spec=positions_spec,
        mode=SpanningMode(mode))
    return report.model_dump(mode="json") if report else None


@mcp.tool(
        name='aggregate',
        description='Aggregates observable rows of a dataset into per-separation mean, stderr and hit counts (aggregated.csv).'
)
@log_with_run_context
async def aggregate(
        dataset: Annotated[str, "Dataset directory."],
) -> list[dict]:
    points = await asyncio.to_thread(cmd_aggregate, dataset=dataset)
    return [point.model_dump(mode="json") for point in points]


@mcp.tool(
        name='fit',
        description='Fits mean = C x^-alpha (or against 1/eta with ccr) to an aggregated series and reports alpha with its error.'
)
@log_with_run_context
async def fit(
        dataset: Annotated[str, "Dataset directory."],
        observable: Annotated[str, "W, I2, W4, E or D."],
        exclude_last: Annotated[bool, "Drop the largest x."] = False,
        exclude_x: Annotated[Optional[list[int]], "Separations to drop."] = None,
        parity: Annotated[Optional[str], "even or odd."] = None,
        ccr: Annotated[bool, "Fit against the inverse cross ratio."] = False,
) -> dict:
    report = await asyncio.to_thread(
        cmd_fit, dataset=dataset, observable=observable, exclude_last=exclude_last,
        exclude_x=exclude_x, parity=parity, ccr=ccr)
    return report.model_dump(mode="json")
