import json

import pytest
from fastmcp.client import Client
from fastmcp.client.transports import FastMCPTransport
from fastmcp.exceptions import ToolError

from circuit_runner.circuit_types import ObservableRow
from circuit_runner.persistence import OBSERVABLES_FILE
from server import mcp


@pytest.fixture
async def main_mcp_client():
    async with Client(transport=mcp) as mcp_client:
        yield mcp_client


@pytest.fixture
def power_law_dataset(tmp_path):
    rows = [ObservableRow(realization=k, observable="W", positions=[0, x, 2 * x], value=float(x) ** -4, meta={"x": x})
            for k in range(2) for x in range(1, 5)]
    (tmp_path / OBSERVABLES_FILE).write_text("".join(r.model_dump_json() + "\n" for r in rows))
    return tmp_path


async def test_list_tools(main_mcp_client: Client[FastMCPTransport]):
    list_tools = await main_mcp_client.list_tools()

    assert len(list_tools) == 5

    expected_tools = [
      'simulate',
      'measure',
      'analyze_graphs',
      'aggregate',
      'fit',
    ]

    for tool in list_tools:
        assert tool.name in expected_tools


async def test_aggregate_then_fit(main_mcp_client: Client[FastMCPTransport], power_law_dataset):
    call_result = await main_mcp_client.call_tool('aggregate', arguments={'dataset': str(power_law_dataset)})
    assert not call_result.is_error
    assert (power_law_dataset / 'aggregated.csv').exists()

    call_result = await main_mcp_client.call_tool(
        'fit', arguments={'dataset': str(power_law_dataset), 'observable': 'W'})
    result = json.loads(call_result.content[0].text)

    assert result['fit']['alpha'] == pytest.approx(4.0, abs=1e-9)
    assert [p['x'] for p in result['fit']['points_used']] == [1, 2, 3, 4]


async def test_simulate_small_ensemble(main_mcp_client: Client[FastMCPTransport], tmp_path):
    config = {'L': 4, 'p': 0.2, 'n_unitary_layers': 3,
              'observables': [{'name': 'E', 'positions_spec': '(i,i+x)'}]}
    call_result = await main_mcp_client.call_tool(
        'simulate', arguments={'n': 2, 'out': str(tmp_path / 'run'), 'config': config, 'threads': 1})
    result = json.loads(call_result.content[0].text)

    assert result['n_realizations'] == 2
    assert result['n_rows'] == 2 * (3 + 2 + 1)


async def test_simulate_reports_an_invalid_config_as_a_config_error(main_mcp_client: Client[FastMCPTransport], tmp_path):
    with pytest.raises(ToolError, match="invalid config"):
        await main_mcp_client.call_tool(
            'simulate', arguments={'n': 1, 'out': str(tmp_path / 'run'), 'config': {'L': 4, 'p': 1.5}})
    assert not (tmp_path / 'run').exists()


@pytest.mark.parametrize("arguments", [
    {'config': {'L': 4}, 'preset': 'fig4'},
    {},
])
async def test_simulate_needs_exactly_one_of_config_or_preset(main_mcp_client: Client[FastMCPTransport], tmp_path,
                                                              arguments):
    with pytest.raises(ToolError, match="exactly one"):
        await main_mcp_client.call_tool('simulate', arguments={'n': 1, 'out': str(tmp_path / 'run'), **arguments})
