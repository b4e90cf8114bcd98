import json
import math

import pytest

from circuit_runner.circuit_types import CircuitConfig, ObservableRow
from circuit_runner.persistence import OBSERVABLES_FILE, RECORDS_FILE, read_rows
from cli import exit_code, main
from commands.graphs import GRAPHS_FILE
from commands.manifest import RunManifest, load_manifest, save_manifest
from commands.measure import cmd_measure
from graph_analysis.graph_types import GraphRow
from scaling_analysis.geometry import chord_length
from utils.errors import ConfigError, NumericalError, PersistenceError


def write_config(path, **fields):
    base = {"L": 4, "boundary": "OBC", "p": 0.2, "n_unitary_layers": 4, "master_seed": 3,
            "observables": [{"name": "E", "positions_spec": "(i,i+x)"}]}
    path.write_text(json.dumps({**base, **fields}))
    return str(path)


def simulate(tmp_path, name="run", n=3, **fields) -> str:
    out = tmp_path / name
    config = write_config(tmp_path / f"{name}.json", **fields)
    assert main(["simulate", config, "--n", str(n), "--out", str(out), "--threads", "1"]) == 0
    return str(out)


def synthetic_dataset(directory, observable, means, boundary="PBC", L=12):
    """One row per separation with the given mean; no records needed for fitting."""
    directory.mkdir()
    rows = [ObservableRow(realization=0, observable=observable, positions=[0, x], value=m, meta={"x": x})
            for x, m in means.items()]
    (directory / OBSERVABLES_FILE).write_text("".join(r.model_dump_json() + "\n" for r in rows))
    save_manifest(directory, RunManifest(config=CircuitConfig(L=L, boundary=boundary, p=0.1)))
    return str(directory)


class TestSimulate:

    def test_empty_ensemble(self, tmp_path):
        out = simulate(tmp_path, n=0)
        assert (tmp_path / "run" / RECORDS_FILE).read_text() == ""
        manifest = load_manifest(out)
        assert manifest.config.L == 4
        assert manifest.commands[-1].status == "completed"

    def test_same_config_same_bytes(self, tmp_path):
        simulate(tmp_path, "a")
        simulate(tmp_path, "b")
        for name in (RECORDS_FILE, OBSERVABLES_FILE):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_preset_with_overrides(self, tmp_path):
        out = tmp_path / "preset"
        assert main(["simulate", "--preset", "fig3-negativity", "--L", "6", "--layers", "3",
                     "--seed", "9", "--n", "2", "--out", str(out)]) == 0
        config = load_manifest(out).config
        assert (config.L, config.n_unitary_layers, config.master_seed) == (6, 3, 9)

    @pytest.mark.parametrize("fields", [{"p": 2.0}, {"L": 1}, {"observables": [{"name": "X"}]},
                                        {"observables": [{"name": "W", "separations": [5]}]}])
    def test_invalid_config(self, tmp_path, fields):
        config = write_config(tmp_path / "bad.json", **fields)
        assert main(["simulate", config, "--n", "1", "--out", str(tmp_path / "out")]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["simulate", str(tmp_path / "nope.json"), "--n", "1", "--out", str(tmp_path / "o")]) == 2

    def test_needs_exactly_one_config_source(self, tmp_path):
        assert main(["simulate", "--n", "1", "--out", str(tmp_path / "o")]) == 2


class TestMeasure:

    def test_adds_rows_and_replaces_on_rerun(self, tmp_path):
        out = simulate(tmp_path, L=5, observables=[])
        assert main(["measure", out, "--observable", "E", "--positions-spec", "(i,i+x)"]) == 0
        first = read_rows(out, "E")
        assert len(first) == 3 * (4 + 3 + 2 + 1)
        assert main(["measure", out, "--observable", "E", "--positions-spec", "(i,i+x)"]) == 0
        assert read_rows(out, "E") == first

    def test_replayed_values_match_the_original_run(self, tmp_path):
        out = simulate(tmp_path)
        original = read_rows(out, "E")
        assert main(["measure", out, "--observable", "E", "--positions-spec", "(i,i+x)"]) == 0
        replayed = read_rows(out, "E")
        assert [(r.realization, r.positions) for r in replayed] == [(r.realization, r.positions) for r in original]
        assert [r.value for r in replayed] == pytest.approx([r.value for r in original], abs=1e-9)

    def test_no_positions_is_a_no_op(self, tmp_path):
        out = simulate(tmp_path, L=2, observables=[])
        assert cmd_measure(dataset=out, observable="W", positions_spec="(i,i+x,i+2x)") == 0
        assert read_rows(out) == []

    def test_separation_out_of_range(self, tmp_path):
        out = simulate(tmp_path, observables=[])
        assert main(["measure", out, "--observable", "W", "--separations", "7"]) == 2

    def test_missing_dataset(self, tmp_path):
        assert main(["measure", str(tmp_path / "nothing"), "--observable", "E"]) == 3


class TestGraphs:

    def test_everything_connects_without_measurements(self, tmp_path):
        out = simulate(tmp_path, L=6, p=0.0, observables=[], n=2)
        assert main(["graphs", out, "--export", "1"]) == 0
        lines = (tmp_path / "run" / GRAPHS_FILE).read_text().splitlines()
        rows = [GraphRow.model_validate_json(line) for line in lines]
        assert len(rows) == 2 * (4 + 2)
        assert all(row.connected and row.parasitic_score is not None for row in rows)
        assert (tmp_path / "run" / "graphs" / "r0_adjacency.txt").exists()
        assert not (tmp_path / "run" / "graphs" / "r1_layout.csv").exists()

    def test_full_monitoring_leaves_only_pairs(self, tmp_path):
        out = simulate(tmp_path, L=6, p=1.0, observables=[], n=2)
        assert main(["graphs", out]) == 0
        rows = [GraphRow.model_validate_json(line)
                for line in (tmp_path / "run" / GRAPHS_FILE).read_text().splitlines()]
        assert not any(row.connected for row in rows)
        assert all(len(row.spanned) <= 2 for row in rows)

    def test_explicit_targets_and_single_seed(self, tmp_path):
        out = simulate(tmp_path, L=6, p=0.3, observables=[], n=2)
        assert main(["graphs", out, "--targets", "1,3,5", "--mode", "SINGLE_SEED"]) == 0
        rows = [json.loads(line) for line in (tmp_path / "run" / GRAPHS_FILE).read_text().splitlines()]
        assert [row["targets"] for row in rows] == [[1, 3, 5]] * 2
        assert {row["mode"] for row in rows} == {"SINGLE_SEED"}

    def test_target_out_of_range(self, tmp_path):
        out = simulate(tmp_path, observables=[])
        assert main(["graphs", out, "--targets", "0,9"]) == 2


class TestAggregateAndFit:

    def test_end_to_end_independent_of_threads(self, tmp_path):
        outputs = []
        for threads in ("1", "2"):
            out = tmp_path / f"t{threads}"
            config = write_config(tmp_path / "c.json", L=5)
            assert main(["simulate", config, "--n", "4", "--out", str(out), "--threads", threads]) == 0
            assert main(["aggregate", str(out)]) == 0
            outputs.append(out)
        for name in (OBSERVABLES_FILE, "aggregated.csv"):
            assert (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()

    def test_manifest_lists_every_artifact(self, tmp_path):
        out = simulate(tmp_path, L=6)
        assert main(["graphs", out, "--export", "1"]) == 0
        assert main(["aggregate", out]) == 0
        written = {str(p.relative_to(out)) for p in (tmp_path / "run").rglob("*")
                   if p.is_file() and p.name != "manifest.json"}
        manifest = load_manifest(out)
        assert written == set(manifest.artifacts)
        assert [entry.command for entry in manifest.commands] == ["simulate", "graphs", "aggregate"]

    def test_negativity_defaults_to_even_separations(self, tmp_path):
        out = synthetic_dataset(tmp_path / "e", "E", {x: float(x) ** -2 + (0.5 if x % 2 else 0) for x in range(1, 7)})
        assert main(["fit", out, "--observable", "E"]) == 0
        report = json.loads((tmp_path / "e" / "fit_E.json").read_text())
        assert [p["x"] for p in report["fit"]["points_used"]] == [2, 4, 6]
        assert report["fit"]["alpha"] == pytest.approx(2.0, abs=1e-9)
        assert (tmp_path / "e" / "aggregated.csv").exists()
        assert (tmp_path / "e" / "fit_E.dat").read_text().startswith("# x mean")

    def test_exclude_last(self, tmp_path):
        out = synthetic_dataset(tmp_path / "w", "W", {1: 0.5, 2: 0.01, 3: 0.002, 4: 0.5})
        assert main(["fit", out, "--observable", "W", "--exclude-last"]) == 0
        report = json.loads((tmp_path / "w" / "fit_W.json").read_text())
        assert [p["x"] for p in report["fit"]["points_used"]] == [1, 2, 3]
        assert report["fit"]["excluded"] == [{"x": 4, "reason": "last"}]

    def test_cross_ratio_domain(self, tmp_path):
        out = synthetic_dataset(tmp_path / "c", "W", {x: chord_length(12, x) ** -6 for x in range(1, 5)})
        assert main(["fit", out, "--observable", "W", "--ccr"]) == 0
        report = json.loads((tmp_path / "c" / "fit_W_ccr.json").read_text())
        assert report["fit"]["domain"] == "inverse_ccr"
        assert report["fit"]["alpha"] == pytest.approx(3.0, abs=1e-9)

    def test_cross_ratio_needs_a_ring(self, tmp_path):
        out = synthetic_dataset(tmp_path / "o", "W", {1: 0.5, 2: 0.1}, boundary="OBC")
        assert main(["fit", out, "--observable", "W", "--ccr"]) == 2

    def test_ordering_uses_earlier_fits(self, tmp_path):
        directory = tmp_path / "all"
        out = synthetic_dataset(directory, "E", {x: float(x) ** -1 for x in range(1, 7)})
        extra = [ObservableRow(realization=0, observable=name, positions=[0, x, 2 * x],
                               value=float(x) ** -alpha, meta={"x": x})
                 for name, alpha in (("W", 7), ("I2", 5)) for x in range(1, 4)]
        with (directory / OBSERVABLES_FILE).open("a") as f:
            f.writelines(r.model_dump_json() + "\n" for r in extra)
        for name in ("E", "W", "I2"):
            assert main(["fit", out, "--observable", name]) == 0
        ordering = json.loads((directory / "fit_I2.json").read_text())["ordering"]
        assert ordering["w_decays_faster"] and ordering["i2_decays_faster"]

    def test_aggregate_writes_time_series(self, tmp_path):
        out = simulate(tmp_path, n=2, time_resolved=True,
                       observables=[{"name": "E", "sites": [0, 1]}, {"name": "E", "positions_spec": "(i,i+x)"}])
        assert main(["aggregate", out]) == 0
        lines = (tmp_path / "run" / "time_series.csv").read_text().splitlines()
        assert lines[0].startswith("observable,layer")
        assert len(lines) == 1 + 8
        spatial = (tmp_path / "run" / "aggregated.csv").read_text().splitlines()
        assert len(spatial) == 1 + 3

    def test_too_few_points(self, tmp_path):
        out = synthetic_dataset(tmp_path / "few", "W", {1: 0.5})
        assert main(["fit", out, "--observable", "W"]) == 2


class TestExitCode:

    @pytest.mark.parametrize("error,code", [
        (ConfigError("x"), 2), (PersistenceError("x"), 3), (NumericalError("x"), 4),
        (ValueError("x"), 2), (OSError("x"), 3), (RuntimeError("x"), 1)])
    def test_mapping(self, error, code):
        assert exit_code(error) == code


@pytest.mark.slow
class TestDeskScale:

    def test_w_over_triples(self, tmp_path):
        out = tmp_path / "fig4"
        assert main(["simulate", "--preset", "fig4", "--L", "8", "--layers", "12", "--n", "6",
                     "--out", str(out), "--threads", "2"]) == 0
        assert main(["aggregate", str(out)]) == 0
        lines = (out / "aggregated.csv").read_text().splitlines()[1:]
        assert [line.split(",")[1] for line in lines] == ["1", "2", "3"]
        for line in lines:
            _, x, mean, _, n_total, n_positive = line.split(",")
            assert float(mean) >= 0
            assert int(n_positive) <= int(n_total) == 6 * (8 - 2 * int(x))
        assert not math.isnan(float(lines[0].split(",")[2]))
