import json

import pytest

from rfxy.cli import build_parser, main
from rfxy.io import load_instance


@pytest.fixture
def inst_path(tmp_path):
    path = tmp_path / "i.rfxy"
    assert main(["gen", "--d", "2", "--L", "4", "--delta", "1.5", "--seed", "3", "--out", str(path)]) == 0
    return path


def test_gen(inst_path):
    inst = load_instance(inst_path)
    assert inst.n_sites == 16 and inst.delta == 1.5 and inst.disorder_seed == 3


@pytest.mark.parametrize("solver", ["rtr", "rcg", "mbh", "ms", "compare"])
def test_solve(inst_path, tmp_path, solver):
    out = tmp_path / "r.json"
    cfg = tmp_path / "c.ini"
    cfg.write_text("[global]\nnr = 2\nmni = 2\n")
    args = ["solve", str(inst_path), "--solver", solver, "--config", str(cfg), "--seed", "4", "--out", str(out),
            "--save-angles", str(tmp_path / "a.txt"), "--checked"]
    assert main(args) == 0
    payload = json.loads(out.read_text())
    assert payload
    assert len((tmp_path / "a.txt").read_text().split()) == 16


def test_campaign_and_compare_local(inst_path, tmp_path):
    camp = tmp_path / "c.ini"
    camp.write_text("[campaign]\nname = t\nd = 1\nsizes = 4\ndeltas = 1.0\n[global]\nnr = 2\nmni = 1\n")
    assert main(["campaign", str(camp), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "t.csv").exists()
    assert main(["compare-local", str(inst_path), "--runs", "3", "--out", str(tmp_path / "l")]) == 0
    assert (tmp_path / "l" / "compare_local.json").exists()


def test_bench_and_oracle(inst_path, tmp_path, capsys):
    assert main(["bench", "--d", "2", "--L", "4", "--repetitions", "100", "--out", str(tmp_path / "b.json")]) == 0
    assert "cost_angular" in json.loads((tmp_path / "b.json").read_text())["timings"]
    small = tmp_path / "s.rfxy"
    main(["gen", "--d", "1", "--L", "4", "--delta", "1.0", "--seed", "1", "--out", str(small)])
    assert main(["oracle", str(small), "--k", "6", "--out", str(tmp_path / "o.json")]) == 0
    res = json.loads((tmp_path / "o.json").read_text())
    assert res["refined_energy"] <= res["grid_energy"]


def test_config_dump(capsys):
    assert main(["config"]) == 0
    out = capsys.readouterr().out
    assert "[local]" in out and "grad_tol = 1e-06" in out and "nr = 50" in out


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["gen", "--L", "1", "--delta", "1", "--seed", "1", "--out", str(tmp_path / "x")]) == 2
    assert main(["oracle", str(tmp_path / "missing.rfxy"), "--k", "4"]) == 2
    with pytest.raises(SystemExit):
        build_parser().parse_args(["solve"])


def test_oracle_hidden_from_help():
    assert "oracle" not in build_parser().format_help()
