import csv
import json

import pytest

from adtm.cli import ConfigError, ExperimentConfig, build_parser, main, read_config
from adtm.machine import TsetlinMachine


def test_simulate_la(capsys, tmp_path):
    assert main(["simulate-la", "--kind", "ta", "--probs", "1.0,0.0", "--steps", "2000", "--trials", "20",
                 "--N", "10", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "simulate_la.json").read_text())
    assert report["optimal_fraction"] == 1.0


@pytest.mark.parametrize("argv", [
    ["simulate-la", "--probs", "1.5,0.1"],
    ["simulate-la", "--probs", "0.5"],
    ["simulate-la", "--kind", "nope"],
    ["train", "--dataset", "iris"],
    ["train", "--dataset", "xor", "--m", "3"],
    ["train", "--dataset", "xor", "--d", "0"],
    ["train", "--dataset", "xor", "--ratio", "1.5"],
    ["train", "--dataset", "xor", "--epochs", "0"],
    ["train", "--dataset", "xor", "--set", "colour=blue"],
    ["energy-report", "--dataset", "iris"],
])
def test_validation_errors_exit_1(argv, capsys):
    assert main(argv) == 1
    assert "invalid configuration" in capsys.readouterr().err


def test_missing_data_exits_2(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ADTM_DATA_DIR", str(tmp_path))
    assert main(["train", "--dataset", "liver", "--out", str(tmp_path / "o")]) == 2
    assert "not found" in capsys.readouterr().err


def test_malformed_data_exits_2(tmp_path, capsys):
    bad = tmp_path / "bupa.data"
    bad.write_text("1,2,3\n")
    assert main(["train", "--dataset", "liver", "--data-path", str(bad), "--out", str(tmp_path / "o")]) == 2


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\ndataset = xor\nm = 8\nT = 4  # vote target\nd = 1, 100, inf\nseeds = 3\n")
    values = read_config(cfg)
    assert values["d"] == [1, 100, float("inf")]
    args = build_parser().parse_args(["train", "--config", str(cfg), "--T", "6", "--set", "m=12"])
    from adtm.cli import build_config
    c = build_config(args)
    assert (c.dataset, c.T, c.m, c.seeds) == ("xor", 6, 12, [3])


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        read_config(tmp_path / "missing.cfg")
    bad = tmp_path / "bad.cfg"
    bad.write_text("just words\n")
    with pytest.raises(ConfigError):
        read_config(bad)
    bad.write_text("m = many\n")
    with pytest.raises(ConfigError):
        read_config(bad)
    with pytest.raises(ConfigError):
        ExperimentConfig(dataset="xor", seeds=[]).validate()


def train_xor(out):
    return main(["train", "--dataset", "xor", "--d", "1,inf", "--epochs", "3", "--seeds", "3", "--out", str(out)])


def test_train_outputs_byte_identical(tmp_path, capsys):
    assert train_xor(tmp_path / "a") == 0
    assert train_xor(tmp_path / "b") == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["curve_d1.csv", "curve_dinf.csv", "energy_d1.json", "energy_dinf.json",
                     "metrics.json", "model_d1.adtm", "model_dinf.adtm"]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    tm = TsetlinMachine.load(tmp_path / "a" / "model_dinf.adtm")
    assert tm.config.d == float("inf")
    curve = (tmp_path / "a" / "curve_d1.csv").read_bytes()
    assert curve.startswith(b"epoch,train_acc,test_acc\r\n")
    energy = json.loads((tmp_path / "a" / "energy_dinf.json").read_text())
    assert energy["accounting"]["ta_update_coins"] == 0


def test_output_root_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ADTM_OUTPUT_DIR", str(tmp_path))
    assert main(["train", "--dataset", "xor", "--epochs", "1", "--seeds", "0"]) == 0
    assert (tmp_path / "train-xor" / "model_d1.adtm").is_file()


def test_benchmark_writes_tables(tmp_path, capsys):
    assert main(["benchmark", "--dataset", "xor", "--d", "tm,1,inf", "--epochs", "2", "--seeds", "0,1",
                 "--m", "10", "--out", str(tmp_path)]) == 0
    with (tmp_path / "results.csv").open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["d"] for r in rows] == ["tm", "1", "inf"]
    assert all(r["seeds"] == "2" for r in rows)
    text = (tmp_path / "results.txt").read_text()
    assert "TM" in text and "d=inf" in text
    with (tmp_path / "results_per_seed.csv").open(newline="") as fh:
        assert len(list(csv.reader(fh))) == 7


def test_energy_report(tmp_path, capsys):
    assert main(["energy-report", "--dataset", "heart", "--d", "1,5000,inf", "--json", "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [r["d"] for r in out["rows"]] == ["1", "5000", "inf"]
    assert out["rows"][0]["power_mw"] == pytest.approx(148.0)
    assert (tmp_path / "energy_heart.json").is_file()


def test_prepare_data(tmp_path, capsys):
    assert main(["prepare-data", "--dataset", "balance-scale", "--seeds", "0", "--out", str(tmp_path)]) == 0
    prov = json.loads((tmp_path / "provenance.json").read_text())
    assert prov["rows"] == 576 and prov["o"] == 20
    assert (tmp_path / "train.bits").read_text().splitlines()[1].startswith("# rows=460 o=20 labels=0:230,1:230")
