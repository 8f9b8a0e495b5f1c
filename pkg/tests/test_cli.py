import json
import subprocess
import sys

import pytest

from lowsum.cli import run_cli
from lowsum.graphs import format_graph, format_labeling, gen_forest, parse_forest, parse_labeling


@pytest.fixture
def l4_files(tmp_path, L4, P3):
    lab = tmp_path / "lab.txt"
    forest = tmp_path / "forest.txt"
    lab.write_text(format_labeling(L4))
    forest.write_text(format_graph(P3))
    return str(lab), str(forest)


def run_json(tmp_path, argv, name="out.json"):
    out = tmp_path / name
    assert run_cli(argv + ["--json", str(out)]) == 0
    return json.loads(out.read_text())


def test_gen_labeling(tmp_path):
    out = tmp_path / "lab.txt"
    assert run_cli(["gen-labeling", "--n", "8", "--seed", "3", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# generator=numpy.random.PCG64/v1 pattern=uniform seed=3")
    lab = parse_labeling(text)
    assert lab.n == 8 and lab.is_zero_sum()


def test_gen_labeling_infeasible(capsys):
    assert run_cli(["gen-labeling", "--n", "6"]) == 1
    assert "InfeasibleZeroSum" in capsys.readouterr().err


def test_gen_forest_stdout(capsys):
    assert run_cli(["gen-forest", "--n", "5", "--kind", "path"]) == 0
    assert parse_forest(capsys.readouterr().out) == gen_forest(5, "path")


def test_usage_errors():
    assert run_cli([]) == 2
    assert run_cli(["embed"]) == 2
    assert run_cli(["gen-forest", "--n", "4", "--kind", "spider"]) == 2


def test_embed_best(tmp_path, l4_files):
    lab, forest = l4_files
    out = run_json(tmp_path, ["embed", "--labeling", lab, "--forest", forest, "--algo", "best"])
    assert out["c_value"] == 0
    assert out["certificates"]["delta_plus_1"] is True
    assert out["max_degree"] == 2


@pytest.mark.parametrize("algo", ["greedy", "prop2", "monotone+", "monotone-"])
def test_embed_algorithms(tmp_path, l4_files, algo):
    lab, forest = l4_files
    out = run_json(tmp_path, ["embed", "--labeling", lab, "--forest", forest, "--algo", algo])
    assert out["algorithm"] == algo
    assert sorted(out["embedding"]) == [1, 2, 3, 4]
    assert ("monitor" in out) == (algo == "greedy")


def test_embed_bad_epsilon(tmp_path, l4_files, capsys):
    lab, forest = l4_files
    assert run_cli(["embed", "--labeling", lab, "--forest", forest, "--algo", "greedy", "--epsilon", "1/4"]) == 1
    assert "EpsilonOutOfRange" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert run_cli(["oracle", "--labeling", str(tmp_path / "nope"), "--forest", str(tmp_path / "nope")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_dimension_mismatch(tmp_path, l4_files):
    lab, _ = l4_files
    forest = tmp_path / "f5.txt"
    forest.write_text(format_graph(gen_forest(5, "path")))
    assert run_cli(["embed", "--labeling", lab, "--forest", str(forest)]) == 1


def test_oracle(tmp_path, l4_files):
    lab, forest = l4_files
    out = run_json(tmp_path, ["oracle", "--labeling", lab, "--forest", forest])
    assert out == {"n": 4, "n_factorial": 24, "counts": {"-2": 6, "0": 12, "2": 6}, "mean": "0", "min_abs_sum": 0}


def test_oracle_refuses_large(tmp_path):
    lab, forest = tmp_path / "lab.txt", tmp_path / "forest.txt"
    assert run_cli(["gen-labeling", "--n", "12", "--out", str(lab)]) == 0
    assert run_cli(["gen-forest", "--n", "12", "--kind", "path", "--out", str(forest)]) == 0
    assert run_cli(["oracle", "--labeling", str(lab), "--forest", str(forest)]) == 1
    assert run_cli(["oracle", "--labeling", str(lab), "--forest", str(forest), "--cap", "12"]) == 1


def test_local_search(tmp_path, l4_files):
    lab, _ = l4_files
    sub = tmp_path / "h.txt"
    sub.write_text("4 2\n1 2\n3 4\n")
    out = run_json(tmp_path, ["local-search", "--labeling", lab, "--subgraph", str(sub), "--rule", "first"])
    assert out["final_sum"] == 0 and out["certified"] and out["is_regular"]
    assert out["rule"] == "first_improvement"


def test_local_search_heuristic_stall(tmp_path):
    lab = tmp_path / "plus.txt"
    lines = ["8"] + [f"{u} {v} +1" for u in range(1, 9) for v in range(u + 1, 9)]
    lab.write_text("\n".join(lines) + "\n")
    sub = tmp_path / "h.txt"
    sub.write_text("8 5\n1 2\n2 3\n3 4\n5 6\n7 8\n")
    argv = ["local-search", "--labeling", str(lab), "--subgraph", str(sub)]
    assert run_cli(argv) == 1
    out = run_json(tmp_path, argv + ["--heuristic"])
    assert out["stalled"] and out["local_optimum"] and not out["certified"]


def test_verify(tmp_path):
    lab, forest = tmp_path / "lab.txt", tmp_path / "forest.txt"
    assert run_cli(["gen-labeling", "--n", "8", "--seed", "2", "--out", str(lab)]) == 0
    assert run_cli(["gen-forest", "--n", "8", "--kind", "random_tree", "--seed", "2", "--out", str(forest)]) == 0
    out = run_json(tmp_path, ["verify", "--labeling", str(lab), "--forest", str(forest), "--samples", "20", "--claim3-max-p", "6"])
    assert set(out) == {"recurrence", "formula", "claim3", "claim4"}
    assert all(r["passed"] for r in out.values())
    assert out["formula"]["bruteforce"] is True
    assert "skipped" in out["claim4"]
    assert run_cli(["verify", "--labeling", str(lab), "--forest", str(forest), "--checks", "bogus"]) == 1


def test_verify_balanced_vertex_check(tmp_path):
    lab, forest = tmp_path / "lab.txt", tmp_path / "forest.txt"
    assert run_cli(["gen-labeling", "--n", "100", "--seed", "1", "--out", str(lab)]) == 0
    assert run_cli(["gen-forest", "--n", "100", "--kind", "star", "--out", str(forest)]) == 0
    out = run_json(tmp_path, ["verify", "--labeling", str(lab), "--forest", str(forest), "--checks", "claim4"])
    assert out["claim4"]["passed"] and 15 <= out["claim4"]["degree"] <= 84


def test_bench(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"n": [8], "trials": 2, "seed": 1, "epsilon": "1/5"}))
    assert run_cli(["bench", "--config", str(config), "--out", str(tmp_path / "run")]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["prop2"]["frac_delta_plus_1"] == "1"
    assert (tmp_path / "run" / "runs.csv").exists()
    config.write_text("{not json")
    assert run_cli(["bench", "--config", str(config), "--out", str(tmp_path / "run")]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lowsum", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
