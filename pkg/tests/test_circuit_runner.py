import json
import math
from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.stats import chisquare, f_oneway

from circuit_runner.circuit_types import Boundary, CircuitConfig, LayerKind, ObservableSpec
from circuit_runner.ensemble import run_ensemble
from circuit_runner.observables import (
    enumerate_positions, evaluate_observables, max_separation, parse_positions_spec, positions_for)
from circuit_runner.persistence import (
    OBSERVABLES_FILE, RECORDS_FILE, DatasetWriter, is_partial, read_records, read_rows)
from circuit_runner.runner import replay_realization, replay_states, run_realization
from circuit_runner.schedule import build_layer_schedule, even_bonds, odd_bonds
from circuit_runner.seeding import realization_streams
from measures.density import partial_trace
from state_engine.state_types import FloquetIsingFamily


def small_config(**overrides) -> CircuitConfig:
    base = dict(L=4, boundary="OBC", p=0.3, n_unitary_layers=4, master_seed=11)
    return CircuitConfig(**{**base, **overrides})


class TestCircuitConfig:

    @pytest.mark.parametrize("overrides", [{"p": 1.5}, {"p": -0.1}, {"L": 1}, {"n_unitary_layers": 0}])
    def test_invalid_values_are_rejected(self, overrides):
        with pytest.raises(ValidationError):
            small_config(**overrides)

    def test_unitary_family_from_json(self):
        config = CircuitConfig.model_validate_json(json.dumps(
            {"L": 4, "p": 0.2, "unitary_family": {"kind": "FLOQUET_ISING", "g": 0.5}}))
        assert isinstance(config.unitary_family, FloquetIsingFamily)
        assert config.unitary_family.g == 0.5
        assert config.n_unitary_layers == 49


class TestBuildLayerSchedule:

    def test_odd_bonds_start_with_the_first_two_sites(self):
        assert odd_bonds(4) == [(0, 1), (2, 3)]

    @pytest.mark.parametrize("L,boundary,expected", [
        (4, Boundary.OBC, [(1, 2)]),
        (4, Boundary.PBC, [(1, 2), (3, 0)]),
        (5, Boundary.PBC, [(1, 2), (3, 4)]),
    ])
    def test_even_bonds(self, L, boundary, expected):
        assert even_bonds(L, boundary) == expected

    def test_layers_alternate_and_end_with_measurement(self):
        layers = build_layer_schedule(small_config(n_unitary_layers=5))
        assert len(layers) == 10
        assert [layer.kind for layer in layers[:4]] == [
            LayerKind.UNITARY, LayerKind.MEASUREMENT, LayerKind.UNITARY, LayerKind.MEASUREMENT]
        assert layers[-1].kind == LayerKind.MEASUREMENT
        assert layers[0].bonds == [(0, 1), (2, 3)]
        assert layers[2].bonds == [(1, 2)]
        assert [layer.index for layer in layers] == list(range(10))


class TestRunRealization:

    def test_no_measurements_at_rate_zero(self):
        result = run_realization(small_config(p=0.0), 0)
        assert result.record.measurement_events == []
        assert abs(result.state.norm_squared() - 1.0) <= 1e-12

    def test_every_site_measured_at_rate_one(self):
        config = small_config(p=1.0)
        result = run_realization(config, 0)
        assert len(result.record.measurement_events) == config.L * config.n_unitary_layers
        assert np.isclose(np.max(np.abs(result.state.amplitudes)), 1.0, atol=1e-12)

    def test_gate_events_follow_the_schedule(self):
        result = run_realization(small_config(p=0.0), 0)
        assert [e.bond for e in result.record.gate_events[:3]] == [(0, 1), (2, 3), (1, 2)]
        assert [e.gate_id for e in result.record.gate_events] == list(range(len(result.record.gate_events)))

    def test_same_seed_and_index_give_identical_records(self):
        config = small_config()
        first = run_realization(config, 3).record.model_dump_json()
        second = run_realization(config, 3).record.model_dump_json()
        assert first == second

    def test_different_indices_differ(self):
        config = small_config(p=0.5, n_unitary_layers=10)
        first, second = (run_realization(config, k, evaluate=False).record for k in (0, 1))
        assert first.measurement_events != second.measurement_events

    def test_recorded_probabilities_are_born_probabilities(self):
        result = run_realization(small_config(p=0.5), 2)
        for event in result.record.measurement_events:
            assert 0.0 < event.pre_probability <= 1.0

    @pytest.mark.parametrize("family", [None, FloquetIsingFamily()])
    def test_replay_reproduces_the_final_state(self, family):
        config = small_config(p=0.4, n_unitary_layers=6)
        if family is not None:
            config = config.model_copy(update={"unitary_family": family})
        result = run_realization(config, 5)
        replayed = replay_realization(result.record)
        assert np.allclose(replayed.amplitudes, result.state.amplitudes, atol=1e-12)

    def test_replay_yields_every_layer(self):
        config = small_config(n_unitary_layers=3)
        record = run_realization(config, 0).record
        assert [layer for layer, _ in replay_states(record)] == list(range(6))

    def test_expected_number_of_measurements(self):
        config = small_config(L=6, p=0.3, n_unitary_layers=10)
        n = 60
        total = sum(len(run_realization(config, k, evaluate=False).record.measurement_events) for k in range(n))
        trials = n * config.L * config.n_unitary_layers
        assert abs(total - config.p * trials) < 5 * math.sqrt(trials * config.p * (1 - config.p))

    def test_outcomes_are_uncorrelated_across_realizations(self):
        config = small_config(p=1.0, n_unitary_layers=1)
        first = [run_realization(config, k, evaluate=False).record.measurement_events[0].outcome for k in range(400)]
        pairs = Counter(zip(first[::2], first[1::2]))
        assert chisquare([pairs[(a, b)] for a in (0, 1) for b in (0, 1)]).pvalue > 1e-3

    def test_periodic_chain_statistics_do_not_depend_on_the_site(self):
        config = small_config(L=6, boundary="PBC", p=0.2, n_unitary_layers=6)
        purities = np.array([
            [np.trace(np.linalg.matrix_power(partial_trace(state, [s]).matrix, 2)).real for s in range(config.L)]
            for state in (run_realization(config, k, evaluate=False).state for k in range(300))])
        assert f_oneway(*purities.T).pvalue > 1e-3

    def test_time_resolved_rows_carry_the_layer(self):
        config = small_config(n_unitary_layers=2, time_resolved=True,
                              observables=[ObservableSpec(name="E", sites=[0, 1])])
        rows = run_realization(config, 0).rows
        assert [row.meta.get("layer") for row in rows] == [0, 1, 2, 3, None]
        assert rows[0].meta["layer_kind"] == "unitary"

    def test_streams_are_independent_of_each_other(self):
        a = realization_streams(1, 0)
        b = realization_streams(1, 0)
        assert a.gates.random() == b.gates.random()
        assert a.sites.random() != a.outcomes.random()


class TestPositions:

    @pytest.mark.parametrize("spec,expected", [
        ("(i,i+x)", [0, 1]),
        ("(i,i+x,i+2x)", [0, 1, 2]),
        ("( i, i+x, i+2x, i+3x )", [0, 1, 2, 3]),
    ])
    def test_parse(self, spec, expected):
        assert parse_positions_spec(spec) == expected

    @pytest.mark.parametrize("spec", ["i,i+x", "(i,j)", "(i,i)"])
    def test_parse_rejects(self, spec):
        with pytest.raises(ValueError):
            parse_positions_spec(spec)

    def test_open_chain_of_18_triples_reaches_x_8(self):
        assert max_separation(18, Boundary.OBC, [0, 1, 2]) == 8

    def test_periodic_chain_of_24_pairs_reaches_x_12(self):
        xs = {x for x, _ in enumerate_positions(24, Boundary.PBC, [0, 1])}
        assert xs == set(range(1, 13))

    def test_open_chain_base_sites(self):
        positions = [p for x, p in enumerate_positions(6, Boundary.OBC, [0, 1, 2]) if x == 2]
        assert positions == [(0, 2, 4), (1, 3, 5)]

    def test_periodic_positions_wrap(self):
        positions = [p for x, p in enumerate_positions(6, Boundary.PBC, [0, 1]) if x == 2]
        assert positions[-1] == (5, 1)
        assert len(positions) == 6

    def test_separation_beyond_the_chain(self):
        with pytest.raises(ValueError):
            list(enumerate_positions(18, Boundary.OBC, [0, 1, 2], separations=[9]))

    def test_explicit_sites_are_range_checked(self):
        with pytest.raises(ValueError):
            positions_for(small_config(), ObservableSpec(name="E", sites=[0, 4]))


class TestEvaluateObservables:

    def test_one_row_per_position(self):
        config = small_config(observables=[ObservableSpec(name="E", positions_spec="(i,i+x)")])
        result = run_realization(config, 0)
        assert len(result.rows) == len(positions_for(config, config.observables[0]))
        assert all(row.value >= 0 for row in result.rows)
        assert {row.meta["x"] for row in result.rows} == {1, 2, 3}

    def test_w_and_i2_share_positions_and_respect_ordering(self):
        config = small_config(L=3, p=0.0, n_unitary_layers=3, observables=[
            ObservableSpec(name="I2", sites=[0, 1, 2]), ObservableSpec(name="W", sites=[0, 1, 2])],
            optimizer={"W": {"n_restarts": 2}, "I2": {"n_restarts": 1}})
        result = run_realization(config, 0)
        values = {row.observable: row.value for row in result.rows}
        assert values["I2"] >= values["W"]
        assert [row.observable for row in result.rows] == ["W", "I2"]

    def test_wrong_number_of_spins(self):
        config = small_config(observables=[ObservableSpec(name="W", positions_spec="(i,i+x)")])
        with pytest.raises(ValueError):
            evaluate_observables(run_realization(config, 0, evaluate=False).state, config, 0)


class TestPersistence:

    def test_roundtrip_through_files(self, tmp_path):
        config = small_config(observables=[ObservableSpec(name="E", sites=[0, 1])])
        result = run_realization(config, 0)
        with DatasetWriter(tmp_path) as writer:
            writer.write_record(result.record)
            writer.write_rows(result.rows)
        assert list(read_records(tmp_path)) == [result.record]
        assert read_rows(tmp_path) == result.rows

    def test_failure_leaves_partial_markers(self, tmp_path):
        with pytest.raises(RuntimeError):
            with DatasetWriter(tmp_path):
                raise RuntimeError("worker died")
        assert is_partial(tmp_path)
        assert (tmp_path / (OBSERVABLES_FILE + ".partial")).exists()


class TestRunEnsemble:

    def config(self) -> CircuitConfig:
        return small_config(L=5, p=0.2, n_unitary_layers=4,
                            observables=[ObservableSpec(name="E", positions_spec="(i,i+x)")])

    def test_empty_ensemble_writes_empty_files(self, tmp_path):
        summary = run_ensemble(self.config(), 0, tmp_path)
        assert summary.n_rows == 0
        assert (tmp_path / RECORDS_FILE).read_text() == ""
        assert (tmp_path / OBSERVABLES_FILE).read_text() == ""

    def test_parallel_and_serial_runs_write_identical_files(self, tmp_path):
        run_ensemble(self.config(), 8, tmp_path / "serial", threads=1)
        run_ensemble(self.config(), 8, tmp_path / "parallel", threads=3)
        for name in (RECORDS_FILE, OBSERVABLES_FILE):
            assert (tmp_path / "serial" / name).read_bytes() == (tmp_path / "parallel" / name).read_bytes()

    def test_summary_mean_matches_one_pass_recomputation(self, tmp_path):
        summary = run_ensemble(self.config(), 6, tmp_path)
        values = [json.loads(line)["value"] for line in (tmp_path / OBSERVABLES_FILE).read_text().splitlines()]
        assert summary.means["E"] == pytest.approx(sum(values) / len(values), abs=1e-12)
        assert summary.n_rows == len(values)

    def test_negative_count(self, tmp_path):
        with pytest.raises(ValueError):
            run_ensemble(self.config(), -1, tmp_path)
