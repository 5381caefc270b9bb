"""End-to-end checks of the command-line interface."""

import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from pdspeech.cli import main, parse_m_values
from pdspeech.eval import read_report, report_fingerprint


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("clicorpus") / "corpus"
    rc = main(["synth", "--subjects", "2", "--segments", "3",
               "--seed", "3", "--out", str(out)])
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def manifest_path(corpus_dir):
    return str(corpus_dir / "manifest.csv")


class TestSynth:
    def test_deterministic_output(self, tmp_path):
        for d in ("a", "b"):
            rc = main(["synth", "--subjects", "1", "--segments", "2",
                       "--seed", "7", "--out", str(tmp_path / d)])
            assert rc == 0
        names_a = sorted(p.name for p in (tmp_path / "a").iterdir())
        names_b = sorted(p.name for p in (tmp_path / "b").iterdir())
        assert names_a == names_b and len(names_a) == 5
        for name in names_a:
            assert (tmp_path / "a" / name).read_bytes() == \
                   (tmp_path / "b" / name).read_bytes()

    def test_runs_as_module(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "pdspeech.cli", "synth",
             "--subjects", "1", "--segments", "1", "--out",
             str(tmp_path / "c")],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "manifest.csv" in proc.stdout


class TestExtract:
    def test_feature_csv(self, manifest_path, tmp_path):
        out = tmp_path / "feats.csv"
        rc = main(["extract", "--manifest", manifest_path,
                   "--out", str(out)])
        assert rc == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][:4] == ["segment", "subject", "task", "label"]
        assert len(rows[0]) == 4 + 480
        assert len(rows) == 1 + 12
        for row in rows[1:]:
            assert row[3] in ("0", "1")
            float(row[4])

    def test_task_filter(self, manifest_path, tmp_path):
        out = tmp_path / "t1.csv"
        rc = main(["extract", "--manifest", manifest_path,
                   "--task", "1", "--out", str(out)])
        assert rc == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 4
        assert all(row[2] == "1" for row in rows[1:])


class TestRank:
    def test_ranking_csv(self, manifest_path, tmp_path):
        out = tmp_path / "rank.csv"
        rc = main(["rank", "--manifest", manifest_path,
                   "--method", "fisher", "--out", str(out)])
        assert rc == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["rank", "feature_index", "score", "method"]
        assert len(rows) == 1 + 480
        assert [int(r[0]) for r in rows[1:]] == list(range(1, 481))
        assert sorted(int(r[1]) for r in rows[1:]) == list(range(480))


class TestEvaluate:
    def test_writes_artifacts(self, manifest_path, tmp_path):
        out = tmp_path / "run"
        rc = main(["evaluate", "--manifest", manifest_path,
                   "--m", "40", "--out", str(out)])
        assert rc == 0
        assert (out / "segments_classical.csv").is_file()
        assert (out / "roc_classical.csv").is_file()
        report = read_report(out / "report.json")
        assert report["format_version"] == 1
        assert 0.0 <= report["branches"]["classical"]["accuracy"] <= 1.0
        assert "generated_at" in report

    def test_deterministic_reports(self, manifest_path, tmp_path):
        for d in ("r1", "r2"):
            rc = main(["evaluate", "--manifest", manifest_path,
                       "--m", "40", "--out", str(tmp_path / d)])
            assert rc == 0
        assert report_fingerprint(tmp_path / "r1" / "report.json") == \
               report_fingerprint(tmp_path / "r2" / "report.json")

    def test_flag_beats_config_file(self, manifest_path, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"m": 10, "method": "fisher"}))
        out = tmp_path / "run"
        rc = main(["evaluate", "--config", str(cfg),
                   "--manifest", manifest_path, "--m", "5",
                   "--gamma", "0.5", "--out", str(out)])
        assert rc == 0
        echo = read_report(out / "report.json")["config"]
        assert echo["m"] == 5            # flag wins
        assert echo["method"] == "fisher"  # file fills the gap
        assert echo["gamma"] == 0.5

    def test_config_file_supplies_required_paths(self, manifest_path,
                                                 tmp_path):
        out = tmp_path / "run"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"manifest": manifest_path,
                                   "out": str(out), "m": 5}))
        rc = main(["evaluate", "--config", str(cfg)])
        assert rc == 0
        assert (out / "report.json").is_file()

    def test_missing_config_file(self, capsys):
        rc = main(["evaluate", "--config", "missing.json", "--out", "x"])
        assert rc == 1
        err = capsys.readouterr().err
        assert "[config]" in err and "missing.json" in err

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"bogus": 1}')
        rc = main(["evaluate", "--config", str(cfg), "--out", "x"])
        assert rc == 1
        err = capsys.readouterr().err
        assert "[config]" in err and "bogus" in err

    def test_missing_manifest_flag(self, tmp_path, capsys):
        rc = main(["evaluate", "--out", str(tmp_path / "x")])
        assert rc == 1
        assert "--manifest is required" in capsys.readouterr().err

    def test_manifest_not_found(self, tmp_path, capsys):
        rc = main(["evaluate", "--manifest", "nope.csv",
                   "--out", str(tmp_path / "x")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "[ingest]" in err and "nope.csv" in err

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as ei:
            main(["synth", "--bogus"])
        assert ei.value.code == 2

    def test_cnn_branch_flags(self, manifest_path, tmp_path):
        out = tmp_path / "run"
        rc = main(["evaluate", "--manifest", manifest_path,
                   "--branch", "cnn", "--epochs", "1",
                   "--batch-size", "32", "--out", str(out)])
        assert rc == 0
        report = read_report(out / "report.json")
        assert report["config"]["train"]["max_epochs"] == 1
        assert report["branches"]["cnn"]["n_windows"] == 12 * 6
        assert (out / "segments_cnn.csv").is_file()


class TestSweep:
    def test_curve_points(self, manifest_path, tmp_path):
        out = tmp_path / "sw"
        rc = main(["sweep", "--manifest", manifest_path,
                   "--method", "fisher", "--m", "1:5", "--out", str(out)])
        assert rc == 0
        sweep = read_report(out / "report.json")["sweep"]
        assert [p["m"] for p in sweep["points"]] == [1, 2, 3, 4, 5]
        assert sweep["best_m"] in range(1, 6)
        assert sweep["method"] == "fisher"

    def test_bad_m_spec(self, manifest_path, tmp_path, capsys):
        rc = main(["sweep", "--manifest", manifest_path,
                   "--m", "9:1", "--out", str(tmp_path / "x")])
        assert rc == 1
        assert "empty m range" in capsys.readouterr().err


class TestMSpec:
    @pytest.mark.parametrize("spec,expected", [
        ("40", [40]),
        ("5,10,20", [5, 10, 20]),
        ("10:100:10", list(range(10, 101, 10))),
        (40, [40]),
        ([1, 2], [1, 2]),
    ])
    def test_accepted_forms(self, spec, expected):
        assert parse_m_values(spec) == expected

    def test_inclusive_range(self):
        values = parse_m_values("1:480")
        assert len(values) == 480
        assert values[0] == 1 and values[-1] == 480

    @pytest.mark.parametrize("spec", ["a", "1:2:3:4", "3:1", "1:10:0",
                                      "", "5,,10"])
    def test_rejected_forms(self, spec):
        with pytest.raises(ValueError):
            parse_m_values(spec)


class TestHelp:
    @pytest.mark.parametrize("cmd", ["synth", "extract", "rank",
                                     "evaluate", "sweep"])
    def test_lists_flags_with_defaults(self, cmd, capsys):
        with pytest.raises(SystemExit) as ei:
            main([cmd, "--help"])
        assert ei.value.code == 0
        text = capsys.readouterr().out
        assert "--config" in text
        assert "default:" in text
        assert "--out" in text
