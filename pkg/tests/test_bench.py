import csv

import pytest

from ecoform.bench import (AggregateRow, BenchConfig, BenchError,
                           BenchmarkRecord, RandomSource, ScenarioSource,
                           aggregate, config_from_json, read_records,
                           run_benchmark, write_records)
from ecoform.solvers import Exhaustive, Tabu


def small_config(**overrides):
    base = dict(sizes=(8,),
                source=RandomSource(sigma=0.2, density=0.95),
                solvers=(("exhaustive", Exhaustive()), ("tabu", Tabu())),
                seeds_per_point=3,
                reference="exact-dp")
    base.update(overrides)
    return BenchConfig(**base)


def strip_runtime(records):
    return [
        (r.instance_id, r.n, r.source, r.sigma, r.density, r.kappa, r.solver,
         r.seed, r.splits, r.qubo_solves, r.best_value, r.ref_value, r.quality_ratio)
        for r in records
    ]


class TestRunBenchmark:
    def test_row_count_and_order(self):
        records = run_benchmark(small_config())
        assert len(records) == 3 * 2
        keys = [(r.n, r.instance_id, r.solver, r.seed) for r in records]
        assert keys == sorted(keys)

    def test_deterministic_apart_from_runtime(self):
        config = small_config()
        assert strip_runtime(run_benchmark(config)) == strip_runtime(run_benchmark(config))

    def test_exhaustive_never_beats_exact_reference(self):
        records = run_benchmark(small_config(sizes=(12,), seeds_per_point=5,
                                             solvers=(("exhaustive", Exhaustive()),)))
        for r in records:
            assert r.quality_ratio is None or r.quality_ratio <= 1.0 + 1e-9

    def test_three_node_rows(self):
        # at n=3 the exhaustive pipeline always reaches the DP optimum
        records = run_benchmark(small_config(sizes=(3,), seeds_per_point=5))
        for row in records:
            if row.solver != "exhaustive":
                continue
            assert row.quality_ratio is None or row.quality_ratio == pytest.approx(1.0)
            # each accepted split adds one pending coalition; only size >= 2
            # coalitions consume a solve
            assert row.qubo_solves <= 2 * row.splits + 1

    def test_scenario_source(self):
        config = small_config(sizes=(5,), seeds_per_point=2,
                              source=ScenarioSource(kappa=0.05))
        records = run_benchmark(config)
        assert all(r.source == "fitted" for r in records)
        assert all(r.kappa == 0.05 for r in records)
        assert all(r.sigma is None for r in records)

    def test_parallel_jobs_match_serial(self):
        config = small_config()
        serial = strip_runtime(run_benchmark(config))
        parallel = strip_runtime(run_benchmark(small_config(jobs=2)))
        assert serial == parallel

    def test_config_validation(self):
        with pytest.raises(BenchError):
            small_config(sizes=(25,))  # exact-dp cap
        with pytest.raises(BenchError):
            small_config(seeds_per_point=0)
        with pytest.raises(BenchError):
            small_config(reference="gurobi")
        with pytest.raises(BenchError):
            small_config(solvers=())


class TestAggregate:
    def rec(self, ratio, runtime=1.0, solver="sa", n=8, seed=0):
        return BenchmarkRecord(instance_id=f"random-n{n:03d}-r{seed:03d}", n=n,
                               source="random", sigma=0.2, density=0.95, kappa=0.0,
                               solver=solver, seed=seed, splits=1, qubo_solves=2,
                               best_value=ratio, ref_value=1.0, quality_ratio=ratio,
                               runtime_ms=runtime)

    def test_single_record(self):
        rows = aggregate([self.rec(1.0)])
        assert rows == [AggregateRow(n=8, solver="sa", runs=1, undefined_ratios=0,
                                     mean_quality=1.0, std_quality=0.0,
                                     mean_runtime_ms=1.0, std_runtime_ms=0.0)]

    def test_identical_ratios(self):
        rows = aggregate([self.rec(1.0, seed=i) for i in range(20)])
        assert rows[0].mean_quality == 1.0
        assert rows[0].std_quality == 0.0

    def test_known_pair(self):
        rows = aggregate([self.rec(0.9, seed=0), self.rec(1.1, seed=1)])
        assert rows[0].mean_quality == pytest.approx(1.0)
        assert rows[0].std_quality == pytest.approx(0.14142135623,
                                                    rel=1e-9)  # sample std

    def test_undefined_excluded_and_counted(self):
        records = [self.rec(1.0, seed=0), self.rec(None, seed=1)]
        rows = aggregate(records)
        assert rows[0].runs == 2
        assert rows[0].undefined_ratios == 1
        assert rows[0].mean_quality == 1.0

    def test_empty_rejected(self):
        with pytest.raises(BenchError):
            aggregate([])


class TestCsv:
    def test_header_exact(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_records([], path)
        assert path.read_text().strip() == (
            "instance_id,n,source,sigma,density,kappa,solver,seed,splits,"
            "qubo_solves,best_value,ref_value,quality_ratio,runtime_ms")

    def test_round_trip_equal_fields(self, tmp_path):
        # values representable in 9 significant digits survive the CSV exactly
        rec = BenchmarkRecord(instance_id="random-n003-r000", n=3, source="random",
                              sigma=0.2, density=0.95, kappa=0.0, solver="tabu",
                              seed=4, splits=1, qubo_solves=2, best_value=1.5,
                              ref_value=1.5, quality_ratio=1.0, runtime_ms=0.25)
        path = tmp_path / "one.csv"
        write_records([rec], path)
        assert read_records(path) == [rec]

    def test_round_trip_aggregate_stable(self, tmp_path):
        records = run_benchmark(small_config())
        path = tmp_path / "bench.csv"
        write_records(records, path)
        back = read_records(path)
        a = aggregate(back)
        b = aggregate(records)
        for x, y in zip(a, b):
            assert x.n == y.n and x.solver == y.solver and x.runs == y.runs
            assert x.mean_quality == pytest.approx(y.mean_quality, rel=1e-8)

    def test_nine_significant_digits(self, tmp_path):
        rec = BenchmarkRecord(instance_id="random-n003-r000", n=3, source="random",
                              sigma=0.2, density=0.95, kappa=0.0, solver="sa", seed=0,
                              splits=1, qubo_solves=2, best_value=1.23456789123,
                              ref_value=1.0, quality_ratio=1.23456789123, runtime_ms=0.5)
        path = tmp_path / "one.csv"
        write_records([rec], path)
        with path.open() as fh:
            row = list(csv.DictReader(fh))[0]
        assert row["best_value"] == "1.23456789"
        assert row["sigma"] == "0.2"

    def test_unwritable_path(self):
        with pytest.raises(BenchError, match="cannot write"):
            write_records([], "/nonexistent-dir/x.csv")


class TestConfigJson:
    def test_full_document(self):
        text = """{
          "sizes": [8, 10],
          "source": {"kind": "random", "sigma": 0.5, "density": 0.8},
          "solvers": [{"name": "exhaustive"}, {"name": "sa", "sweeps": 100},
                      {"name": "qbsolv", "inner": {"name": "tabu", "restarts": 1}}],
          "seeds_per_point": 4,
          "reference": "best-found",
          "base_seed": 9
        }"""
        config = config_from_json(text)
        assert config.sizes == (8, 10)
        assert config.source == RandomSource(sigma=0.5, density=0.8)
        assert config.seeds_per_point == 4
        assert config.reference == "best-found"
        names = [name for name, _ in config.solvers]
        assert names == ["exhaustive", "sa", "qbsolv"]
        assert config.solvers[1][1].sweeps == 100
        assert config.solvers[2][1].inner.restarts == 1

    def test_defaults(self):
        config = config_from_json('{"sizes": [6], "solvers": [{"name": "tabu"}]}')
        assert config.seeds_per_point == 20
        assert config.reference == "exact-dp"
        assert config.source == RandomSource()

    def test_unknown_solver(self):
        with pytest.raises(Exception, match="unknown solver"):
            config_from_json('{"sizes": [6], "solvers": [{"name": "gurobi"}]}')
