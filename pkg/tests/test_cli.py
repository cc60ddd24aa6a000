import json

from layoutsat.bench_harness import load_csv
from layoutsat.cli import main, parse_seeds
from layoutsat.layout_model import load_instance


def test_parse_seeds():
    assert parse_seeds("0..3") == [0, 1, 2, 3]
    assert parse_seeds("1,4,7") == [1, 4, 7]
    assert parse_seeds("5") == [5]


def test_gen_then_optimize(tmp_path, capsys):
    path = tmp_path / "inst.json"
    assert main(["gen", "--rows", "2", "--cols", "3", "--structure", "mixed", "--rho", "0.15",
                 "--rho-soft", "0.2", "--seed", "3", "--out", str(path)]) == 0
    inst = load_instance(path.read_text())
    assert inst.n_machines == 6 and inst.meta["seed"] == 3
    for mode in ("cold", "warm", "enum"):
        capsys.readouterr()
        assert main(["optimize", str(path), "--mode", mode, "--time-limit", "10"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["status"] == "OPT" and out["mode"] == mode
        assert {"nodes_explored", "nodes_pruned", "runtime", "hint_cost", "best_layout"} <= set(out)


def test_bench_writes_csv_and_markdown(tmp_path):
    csv_path, md_path = tmp_path / "r.csv", tmp_path / "r.md"
    assert main(["bench", "--suite", "scaling", "--seeds", "0..0", "--feas-timeout", "5",
                 "--out", str(csv_path), "--markdown", str(md_path)]) == 0
    assert len(load_csv(csv_path.read_text())) == 8
    assert md_path.read_text().startswith("## scaling")
