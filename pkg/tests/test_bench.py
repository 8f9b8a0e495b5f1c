import csv
import io
import json

import pytest

from lowsum.bench import ExperimentConfig, bench, derive_seed, rows_to_csv, run_rows, summarize
from lowsum.embedders import best_embed, greedy_embed, prop2_embed
from lowsum.errors import BadParameters, EpsilonOutOfRange
from lowsum.graphs import gen_forest, gen_zero_sum_labeling
from lowsum.oracle import min_abs_sum

SMALL = ExperimentConfig(n=(4, 5, 8), trials=3, seed=7, algorithms=("greedy", "prop2", "monotone+", "monotone-", "best"))


@pytest.fixture(scope="module")
def small_rows():
    return run_rows(SMALL)


def test_row_count_and_errors(small_rows):
    # perfect matchings do not exist for n = 5, which shows up as error rows
    assert len(small_rows) == 3 * 4 * 3 * 5
    errors = [r for r in small_rows if r["error"]]
    assert {(r["n"], r["kind"]) for r in errors} == {(5, "perfect_matching")}
    assert all(r["error"] == "InfeasibleKind" for r in errors)


def test_rows_replay(small_rows):
    for row in small_rows:
        if row["error"]:
            continue
        lab = gen_zero_sum_labeling(row["n"], row["labeling_seed"])
        forest = gen_forest(row["n"], row["kind"], row["forest_seed"])
        if row["algorithm"] == "greedy":
            assert greedy_embed(lab, forest).c_value == row["c_value"]
        elif row["algorithm"] == "prop2":
            assert prop2_embed(lab, forest).c_value == row["c_value"]
        elif row["algorithm"] == "best":
            assert best_embed(lab, forest).c_value == row["c_value"]
        assert row["min_abs_sum"] == min_abs_sum(lab, forest)
        assert row["gap"] == row["abs_c"] - row["min_abs_sum"] >= 0


def test_summary_matches_rows(small_rows):
    summary = summarize(small_rows)
    assert summary["prop2"]["frac_delta_plus_1"] == "1"
    assert summary["best"]["frac_delta_plus_1"] == "1"
    greedy = [r for r in small_rows if r["algorithm"] == "greedy" and not r["error"]]
    assert summary["greedy"]["runs"] == len(greedy)
    assert summary["greedy"]["errors"] == 3
    assert summary["greedy"]["oracle_rows"] == len(greedy)
    mean_gap = sum(r["gap"] for r in greedy) / len(greedy)
    assert float(summary["greedy"]["mean_gap"]) == pytest.approx(mean_gap, abs=1e-6)


def test_bench_files_deterministic(tmp_path):
    a = bench(SMALL, tmp_path / "a")
    b = bench(SMALL, tmp_path / "b")
    assert a == b
    for name in ("runs.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    header = (tmp_path / "a" / "runs.csv").read_text().splitlines()[0]
    assert "runtime_s" not in header
    assert json.loads((tmp_path / "a" / "summary.json").read_text()) == a


def test_parallel_matches_serial():
    config = ExperimentConfig(n=(8, 9, 12), trials=2, seed=3, threads=1)
    parallel = ExperimentConfig(n=(8, 9, 12), trials=2, seed=3, threads=3)
    assert rows_to_csv(run_rows(config)) == rows_to_csv(run_rows(parallel))


def test_timing_column():
    config = ExperimentConfig(n=(4,), kinds=("path",), with_timing=True)
    text = rows_to_csv(run_rows(config), with_timing=True)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert all(float(r["runtime_s"]) >= 0 for r in rows)


def test_seeds_depend_on_every_part():
    assert derive_seed(0, 8, 1) != derive_seed(0, 8, 2)
    assert derive_seed(0, 8, 1) == derive_seed(0, 8, 1)


@pytest.mark.parametrize(
    "data",
    [
        {"n": []},
        {"n": [6]},
        {"n": [8], "trials": 0},
        {"n": [8], "kinds": ["cycle"]},
        {"n": [8], "algorithms": ["magic"]},
        {"n": [8], "oracle_cap": 11},
        {"n": [8], "colour": "red"},
    ],
)
def test_config_validation(data):
    with pytest.raises(BadParameters):
        ExperimentConfig.from_dict(data)


def test_config_epsilon_range():
    with pytest.raises(EpsilonOutOfRange):
        ExperimentConfig.from_dict({"n": [8], "epsilon": 0.3})
