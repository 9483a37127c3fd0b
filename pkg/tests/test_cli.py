import json

import numpy as np
import pytest

from avgmix import io as mio
from avgmix.cli import main, parse_chain


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_exact_two_point(capsys):
    code, out = _run(capsys, [
        "exact", "--chain", "two_point:p=0.1,q=0.4", "--xi", "0.1",
    ])
    assert code == 0
    payload = json.loads(out)["rows"][0]
    assert payload["t_mix"] == 3 and payload["t_sharp"] == 2


def test_exact_profile_csv(tmp_path, capsys):
    out_file = tmp_path / "profile.csv"
    code, _ = _run(capsys, [
        "exact", "--chain", "two_point:p=0.1,q=0.4", "--xi", "0.1",
        "--tcap", "5", "--profile", "--output", str(out_file), "--format", "csv",
    ])
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0].startswith("#")
    data = [l for l in lines if not l.startswith("#")]
    assert data[0].split(",") == ["t", "beta", "d"]
    assert len(data) == 7  # header + t = 0..5


def test_chain_round_trip(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(
        {"family": "two_point", "params": {"p": 0.1, "q": 0.4}}))
    chain_file = tmp_path / "chain.json"
    code, out = _run(capsys, ["family", "--spec", str(spec),
                              "--output", str(chain_file)])
    assert code == 0
    assert json.loads(out)["size"] == 2
    P = mio.load_chain_file(str(chain_file))
    direct = parse_chain("two_point:p=0.1,q=0.4")
    assert np.array_equal(P.rows, direct.rows)
    # exported chain can be fed back through every chain-spec form
    code, out = _run(capsys, ["exact", "--chain", f"file:{chain_file}",
                              "--xi", "0.1"])
    assert code == 0
    assert json.loads(out)["rows"][0]["t_mix"] == 3
    code, _ = _run(capsys, ["exact", "--chain", str(chain_file)])
    assert code == 0


def test_estimate_with_config_mirror(tmp_path, capsys):
    code, flagged = _run(capsys, [
        "estimate", "--chain", "two_point:p=0.1,q=0.4", "--n", "20000",
        "--seed", "3", "--xi", "0.1", "--eps", "0.25",
    ])
    assert code == 0
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"xi": 0.1, "eps": 0.25}))
    code, configured = _run(capsys, [
        "--config", str(cfg),
        "estimate", "--chain", "two_point:p=0.1,q=0.4", "--n", "20000",
        "--seed", "3",
    ])
    assert code == 0
    assert json.loads(flagged) == json.loads(configured)
    row = json.loads(flagged)["rows"][0]
    assert 1 <= row["t_sharp_hat"] <= 20000
    assert row["lower"] <= row["t_sharp_hat"] <= row["upper"] or row["warning"]


def test_experiment_gap_search_and_rerun_identical(tmp_path, capsys):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    argv = ["experiment", "gap-search", "--xi", "0.1", "--M", "50"]
    assert main(argv + ["--output", str(out1)]) == 0
    assert main(argv + ["--output", str(out2)]) == 0
    capsys.readouterr()
    assert out1.read_bytes() == out2.read_bytes()
    row = json.loads(out1.read_text())["rows"][0]
    assert row["ratio"] > 50


def test_experiment_bound_violation_exit_code(capsys):
    # an absurdly short trajectory cannot land in a deep window: exit code 2
    code = main([
        "experiment", "coverage", "--chain", "two_point:p=0.1,q=0.4",
        "--xi", "0.001", "--eps", "0.25", "--delta", "0.1",
        "--n", "6", "--replicas", "20",
    ])
    assert code == 2


def test_bounds_subcommands(capsys):
    code, out = _run(capsys, [
        "bounds", "atmix", "--mode", "finite", "--xi", "0.2", "--eps", "0.25",
        "--delta", "0.1", "--tmix", "1", "--size", "6",
    ])
    assert code == 0
    assert json.loads(out)["rows"][0]["n"] > 1
    code, out = _run(capsys, [
        "bounds", "bp", "--kind", "exponential", "--beta0", "2.0",
        "--beta1", "1.0", "--p", "1", "--s", "500",
    ])
    assert code == 0
    assert json.loads(out)["rows"][0]["value"] == pytest.approx(2.0, rel=1e-9)
    code, out = _run(capsys, [
        "bounds", "mad-uniform", "--eps", "0.2", "--delta", "0.1",
        "--s", "1", "--tmix", "3", "--jinf", "4.0", "--n", "1001",
    ])
    assert code == 0
    assert json.loads(out)["rows"][0]["pac_n"] > 1


def test_error_paths(capsys, tmp_path):
    assert main(["exact", "--chain", "nope:x=1"]) == 1
    assert main(["exact", "--chain", str(tmp_path / "missing.json")]) == 1
    capsys.readouterr()
