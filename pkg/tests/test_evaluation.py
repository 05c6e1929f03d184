import dataclasses
import math

import pytest

from dro_offload.config import default_config, parse_config
from dro_offload.evaluation import (
    CSV_COLUMNS,
    EvaluationReport,
    build_ambiguity_sets,
    compare_methods,
    draw_realization,
    evaluate_seed,
    realized_energy,
    realized_latency,
    sweep,
)
from dro_offload.geometry import generate_scenario
from dro_offload.mdrloa import mdrloa_solve
from dro_offload.model import expected_energy, expected_latency


def _cfg(**experiment):
    base = default_config()
    exp = {"seeds": (1, 2), **experiment}
    return dataclasses.replace(
        base, experiment=dataclasses.replace(base.experiment, **exp)
    )


class TestInstanceGeneration:
    def test_shared_history_shares_reference(self):
        sets = build_ambiguity_sets(default_config(), 1)
        assert len(sets) == 10
        assert all(s.reference == sets[0].reference for s in sets)

    def test_per_device_histories_differ(self):
        cfg = default_config()
        cfg = dataclasses.replace(
            cfg, ambiguity=dataclasses.replace(cfg.ambiguity, per_device_history=True)
        )
        sets = build_ambiguity_sets(cfg, 1)
        assert len({s.reference.probs for s in sets}) > 1

    def test_confidence_path_sets_radius(self):
        cfg = default_config()
        cfg = dataclasses.replace(
            cfg,
            ambiguity=dataclasses.replace(cfg.ambiguity, epsilon=None, confidence=0.95),
        )
        sets = build_ambiguity_sets(cfg, 1)
        assert sets[0].radius == pytest.approx(0.06622896708185044, abs=1e-12)

    def test_realization_deterministic_atoms(self):
        cfg = default_config()
        a = draw_realization(cfg, 5)
        b = draw_realization(cfg, 5)
        assert a == b
        atoms = set(cfg.ambiguity.sample_space().atoms)
        assert set(a.task_sizes) <= atoms
        assert len(a.task_sizes) == 10


class TestRealizedMetrics:
    def test_point_mass_equivalence(self):
        cfg = default_config()
        scenario = generate_scenario(cfg.scenario, 1)
        sets = build_ambiguity_sets(cfg, 1)
        real = draw_realization(cfg, 1)
        decision = mdrloa_solve(scenario, sets).decision
        assert realized_latency(decision, scenario, real) == pytest.approx(
            expected_latency(decision, scenario, real.as_array()), rel=1e-15
        )
        uav, hap = realized_energy(decision, scenario, real)
        uav2, hap2 = expected_energy(decision, scenario, real.as_array())
        assert hap == hap2 and (uav == uav2).all()


class TestEvaluateSeed:
    def test_one_row_per_method(self):
        rows = evaluate_seed(default_config(), 1)
        assert [r.method for r in rows] == ["MDRLOA", "DO", "RO"]
        for r in rows:
            assert r.feasible
            assert r.seed == 1
            assert r.realized_latency > 0

    def test_infeasible_recorded_not_raised(self):
        cfg = parse_config(
            {
                "scenario": {"num_tds": 3, "num_uavs": 1, "quota_uav": 2},
                "experiment": {"seeds": [1]},
            }
        )
        rows = evaluate_seed(cfg, 1)
        assert len(rows) == 3
        for r in rows:
            assert not r.feasible
            assert math.isnan(r.realized_latency)


class TestReport:
    def test_csv_header_and_determinism(self):
        cfg = _cfg()
        a = compare_methods(cfg)
        b = compare_methods(cfg)
        assert a.to_csv() == b.to_csv()
        header = a.to_csv().splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)

    def test_rows_sorted_by_seed_then_method(self):
        rows = compare_methods(_cfg()).sorted_rows()
        keys = [(r.seed, r.method) for r in rows]
        assert keys == [
            (1, "MDRLOA"),
            (1, "DO"),
            (1, "RO"),
            (2, "MDRLOA"),
            (2, "DO"),
            (2, "RO"),
        ]

    def test_parallel_matches_serial(self):
        serial = compare_methods(_cfg(jobs=1))
        parallel = compare_methods(_cfg(jobs=2))
        assert serial.to_csv() == parallel.to_csv()

    def test_csv_file_round_trip(self, tmp_path):
        report = compare_methods(_cfg())
        path = tmp_path / "results.csv"
        report.write_csv(path)
        assert path.read_text(encoding="utf-8") == report.to_csv()

    def test_summary_headlines(self):
        text = compare_methods(_cfg()).summary()
        assert "latency vs DO" in text
        assert "energy vs RO" in text
        assert "MDRLOA" in text

    def test_aggregates_counts(self):
        agg = compare_methods(_cfg()).aggregates()
        per_method = agg[("", None)]
        assert per_method["MDRLOA"]["count"] == 2
        assert per_method["MDRLOA"]["solved"] == 2

    def test_empty_report_serializes(self):
        report = EvaluationReport(rows=())
        assert report.to_csv().splitlines() == [",".join(CSV_COLUMNS)]


class TestSweep:
    def test_param_columns_filled(self):
        report = sweep(_cfg(methods=("dro",)), "eps", [0.1, 0.3])
        values = {(r.param_name, r.param_value) for r in report.rows}
        assert values == {("eps", 0.1), ("eps", 0.3)}

    def test_q_sweep_with_confidence_rederives_radius(self):
        cfg = _cfg(methods=("dro",))
        cfg = dataclasses.replace(
            cfg, ambiguity=dataclasses.replace(cfg.ambiguity, epsilon=None, confidence=0.95)
        )
        radii = []
        for q in (50, 400):
            sets = build_ambiguity_sets(cfg.with_override("Q", q), 1)
            radii.append(sets[0].radius)
        assert radii[0] > radii[1]  # more history shrinks the ball

    def test_quota_sweep_changes_scenario(self):
        cfg = _cfg(methods=("dro",))
        report = sweep(cfg, "quota-hap", [2, 6])
        assert all(r.feasible for r in report.rows)

    def test_byte_identical_reruns(self):
        cfg = _cfg(methods=("dro", "do"))
        a = sweep(cfg, "eps", [0.1, 0.5]).to_csv()
        b = sweep(cfg, "eps", [0.1, 0.5]).to_csv()
        assert a.encode() == b.encode()
