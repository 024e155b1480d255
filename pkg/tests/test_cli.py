from __future__ import annotations

import json

import pandas as pd
import pytest

from cli import build_parser, main, overrides_from_args

SMALL = ["--side", "4", "--steps", "20", "--tail", "5"]


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    assert "fig8-desk" in out
    assert "table1" in out


def test_run_single_seed_is_single_run(tmp_path):
    assert main(["run", *SMALL, "--seeds", "1", "--out", str(tmp_path), "-q"]) == 0
    series = pd.read_csv(tmp_path / "series.csv", comment="#")
    assert len(series) == 20
    assert json.loads((tmp_path / "config.json").read_text())["kind"] == "single-run"


def test_run_many_seeds_is_ensemble(tmp_path):
    assert main(["run", *SMALL, "--seeds", "2", "--out", str(tmp_path), "-q"]) == 0
    assert (tmp_path / "ensemble.csv").exists()


def test_sweep_subcommand(tmp_path):
    argv = ["sweep", *SMALL, "--seeds", "2", "--out", str(tmp_path), "-q",
            "--axis", "p:0:1:3", "--axis", "q:0:1:3"]
    assert main(argv) == 0
    assert len(pd.read_csv(tmp_path / "sweep.csv", comment="#")) == 9


def test_snapshot_subcommand(tmp_path):
    argv = ["snapshot", "--side", "5", "--steps", "12", "--tail", "5", "--seeds", "1",
            "--snapshot-times", "1,10", "--out", str(tmp_path), "-q"]
    assert main(argv) == 0
    assert (tmp_path / "snapshot_t00001.txt").read_text().startswith("t=1 side=5\n")


def test_size_sweep_subcommand(tmp_path):
    argv = ["size-sweep", "--steps", "10", "--tail", "5", "--seeds", "1",
            "--sizes", "16,36", "--out", str(tmp_path), "-q"]
    assert main(argv) == 0
    assert pd.read_csv(tmp_path / "size_sweep.csv", comment="#")["n"].tolist() == [16, 36]


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({"kind": "single-run", "steps": 30, "tail": 10,
                                  "network": {"side": 4}, "seeds": {"count": 1}}))
    out = tmp_path / "out"
    assert main(["run", "--config", str(config), "--steps", "15", "--out", str(out), "-q"]) == 0
    assert len(pd.read_csv(out / "series.csv", comment="#")) == 15


def test_preset_with_overrides(tmp_path):
    argv = ["run", "--preset", "table1-desk", "--steps", "30", "--tail", "10", "--side", "4",
            "--out", str(tmp_path), "-q"]
    assert main(argv) == 0
    assert (tmp_path / "table1-desk" / "p0.8_q0.5" / "theory.csv").exists()
    stacked = pd.read_csv(tmp_path / "table1-desk" / "theory.csv", comment="#")
    assert (stacked["category"] == "learner").sum() == 3


@pytest.mark.parametrize("argv", [
    ["run", "--r", "1.5"],
    ["run", "--preset", "fig99"],
    ["snapshot", "--preset", "table1-desk"],
    ["run", "--kappa", "0"],
])
def test_configuration_errors_exit_2(argv, tmp_path):
    assert main([*argv, "--out", str(tmp_path), "-q"]) == 2


def test_malformed_config_file_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path), "-q"]) == 2


@pytest.mark.parametrize("seeds", [3, "many", [1, 2]])
def test_non_mapping_seeds_in_config_file_exits_2(seeds, tmp_path, caplog):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({"steps": 10, "tail": 5, "network": {"side": 4}, "seeds": seeds}))
    assert main(["run", "--config", str(config), "--out", str(tmp_path / "out"), "-q"]) == 2
    assert "seeds" in caplog.text


def test_unwritable_output_exits_1(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", *SMALL, "--seeds", "1", "--out", str(blocker / "sub"), "-q"]) == 1


def test_bad_axis_syntax_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--axis", "p:0:1"])
    assert exc.value.code == 2


def test_overrides_map_flags_to_config_paths():
    args = build_parser().parse_args(
        ["run", "--m", "10", "--beta", "0.9", "--net", "ws", "--ring-degree", "6", "--seed", "7", "--seeds", "3"])
    assert overrides_from_args(args) == {
        "params": {"M": 10, "beta": 0.9},
        "network": {"kind": "ws", "ring_degree": 6},
        "seeds": {"master": 7, "count": 3},
    }
