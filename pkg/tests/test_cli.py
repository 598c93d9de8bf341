from __future__ import annotations

import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from depgrid import ConditionSet, Uniform, sample
from depgrid import presets
from depgrid.cli import main
from depgrid.records import (
    condition_document,
    read_report,
    write_scenarios,
)


def run_cli(*argv: str) -> int:
    return main(list(argv))


@pytest.fixture
def small_pipeline(tmp_path):
    """sample -> run at a size small enough for every CLI test."""
    scen = tmp_path / "scen.jsonl"
    rec = tmp_path / "rec.jsonl"
    assert run_cli("sample", "--condition", "testing", "--n", "400",
                   "--seed", "3", "--out", str(scen)) == 0
    assert run_cli("run", "--scenarios", str(scen), "--condition", "testing",
                   "--seed", "5", "--out", str(rec)) == 0
    return {"scen": scen, "rec": rec, "dir": tmp_path}


class TestSample:
    def test_zero_scenarios_ok(self, tmp_path):
        out = tmp_path / "none.jsonl"
        assert run_cli("sample", "--condition", "testing", "--n", "0",
                       "--out", str(out)) == 0
        assert out.read_text() == ""

    def test_requested_count(self, tmp_path):
        out = tmp_path / "s.jsonl"
        assert run_cli("sample", "--condition", "oc3", "--n", "1000",
                       "--seed", "1", "--out", str(out)) == 0
        assert len(out.read_text().splitlines()) == 1000

    def test_unknown_condition_exits_2(self, tmp_path, capsys):
        code = run_cli("sample", "--condition", "oc9", "--n", "5",
                       "--out", str(tmp_path / "x.jsonl"))
        assert code == 2
        assert "oc9" in capsys.readouterr().err

    def test_custom_config_document(self, tmp_path):
        doc = condition_document(presets.condition("oc1"),
                                 presets.default_grid(), seed=0)
        cfg = tmp_path / "cond.json"
        cfg.write_text(json.dumps(doc))
        out = tmp_path / "s.jsonl"
        assert run_cli("sample", "--config", str(cfg), "--n", "50",
                       "--out", str(out)) == 0
        ys = [json.loads(line)[2] for line in out.read_text().splitlines()]
        assert max(ys) <= 30.0


class TestRunObservePredict:
    def test_observe_report(self, small_pipeline, tmp_path):
        out = tmp_path / "obs.json"
        assert run_cli("observe", "--records",
                       str(small_pipeline["rec"]), "--out", str(out)) == 0
        report = read_report(out)
        total = (report.dependability + report.task_undependability
                 + report.harmful_undependability)
        assert abs(total - 1.0) <= 1e-12

    def test_predict_identity_close_to_observed(self, small_pipeline, tmp_path):
        pred = tmp_path / "pred.json"
        obs = tmp_path / "obs.json"
        # 400 samples cannot cover 1000 voxels; use a coarse grid
        assert run_cli("predict", "--records", str(small_pipeline["rec"]),
                       "--condition", "testing", "--grid", "3,3,3",
                       "--out", str(pred)) == 0
        assert run_cli("observe", "--records", str(small_pipeline["rec"]),
                       "--out", str(obs)) == 0
        p, o = read_report(pred), read_report(obs)
        assert p.dependability == pytest.approx(o.dependability, abs=0.08)

    def test_empty_partition_exits_4_and_renormalize_recovers(
            self, tmp_path, capsys):
        space = presets.domain_space()
        low_y = ConditionSet("low_y", space, (
            Uniform(0, 10), Uniform(0, 10), Uniform(0, 25)))
        scen = tmp_path / "low.jsonl"
        write_scenarios(scen, sample(low_y, 300, 9))
        rec = tmp_path / "low_rec.jsonl"
        assert run_cli("run", "--scenarios", str(scen), "--seed", "7",
                       "--out", str(rec)) == 0
        out = tmp_path / "pred.json"
        code = run_cli("predict", "--records", str(rec), "--condition", "oc2",
                       "--grid", "10,10,10", "--out", str(out))
        assert code == 4
        assert "no test samples" in capsys.readouterr().err
        assert run_cli("predict", "--records", str(rec), "--condition", "oc2",
                       "--grid", "10,10,10", "--renormalize-empty",
                       "--out", str(out)) == 0
        report = read_report(out)
        assert report.renormalized and report.dropped_mass == 1.0

    def test_malformed_records_exit_3(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("not json\n")
        assert run_cli("observe", "--records", str(bad),
                       "--out", str(tmp_path / "r.json")) == 3

    def test_empty_records_exit_3(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert run_cli("observe", "--records", str(empty),
                       "--out", str(tmp_path / "r.json")) == 3

    def test_rerun_from_manifest_is_byte_identical(self, small_pipeline,
                                                   tmp_path):
        manifest = small_pipeline["rec"].with_suffix(".manifest.json")
        assert manifest.exists()
        out2 = tmp_path / "rec2.jsonl"
        assert run_cli("run", "--manifest", str(manifest),
                       "--out", str(out2)) == 0
        assert out2.read_bytes() == small_pipeline["rec"].read_bytes()

    def test_run_with_safety_records_settings(self, small_pipeline, tmp_path):
        rec = tmp_path / "safe.jsonl"
        assert run_cli("run", "--scenarios", str(small_pipeline["scen"]),
                       "--safety", "--seed", "5", "--out", str(rec)) == 0
        manifest = json.loads(rec.with_suffix(".manifest.json").read_text())
        assert manifest["safety"] == {
            "goal_clip_max": pytest.approx(38.47 - 0.5), "delta": 0.5}


class TestCompareAndPlot:
    def test_compare_outputs_json_and_valid_svg(self, small_pipeline,
                                                tmp_path):
        obs = tmp_path / "obs.json"
        run_cli("observe", "--records", str(small_pipeline["rec"]),
                "--out", str(obs))
        out = tmp_path / "cmp.json"
        svg = tmp_path / "cmp.svg"
        assert run_cli("compare", "--predicted", str(obs), "--observed",
                       str(obs), "--out", str(out), "--svg", str(svg)) == 0
        deltas = json.loads(out.read_text())["deltas_pts"]
        assert all(v == 0.0 for v in deltas.values())
        root = ET.parse(svg).getroot()  # must be valid XML
        assert root.tag.endswith("svg")

    def test_plot_failures_svg(self, small_pipeline, tmp_path):
        svg = tmp_path / "fail.svg"
        assert run_cli("plot", "--records", str(small_pipeline["rec"]),
                       "--dims", "v,y", "--out", str(svg)) == 0
        root = ET.parse(svg).getroot()
        labels = [el.text for el in root.iter()
                  if el.tag.endswith("text") and el.text]
        assert any("v [in/s]" in t for t in labels)
        assert any("y [in]" in t for t in labels)

    def test_plot_three_dims(self, small_pipeline, tmp_path):
        svg = tmp_path / "fail3.svg"
        assert run_cli("plot", "--records", str(small_pipeline["rec"]),
                       "--dims", "v,t,y", "--out", str(svg)) == 0
        ET.parse(svg)

    def test_plot_zero_failure_campaign(self, tmp_path):
        space = presets.domain_space()
        easy = ConditionSet("easy", space, (
            Uniform(2, 10), Uniform(0, 10), Uniform(0, 10)))
        scen = tmp_path / "easy.jsonl"
        write_scenarios(scen, sample(easy, 40, 30))
        rec = tmp_path / "easy_rec.jsonl"
        run_cli("run", "--scenarios", str(scen), "--seed", "31",
                "--out", str(rec))
        svg = tmp_path / "none.svg"
        assert run_cli("plot", "--records", str(rec), "--dims", "v,y",
                       "--out", str(svg)) == 0
        ET.parse(svg)

    def test_unknown_dimension_exits_2(self, small_pipeline, tmp_path):
        assert run_cli("plot", "--records", str(small_pipeline["rec"]),
                       "--dims", "v,z", "--out",
                       str(tmp_path / "x.svg")) == 2


class TestReproduce:
    def test_smoke(self, tmp_path):
        out = tmp_path / "repro"
        assert run_cli("reproduce", "--out-dir", str(out), "--n", "150",
                       "--seed", "2", "--grid", "2,2,2") == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n"] == 150
        assert (out / "summary.txt").exists()
        assert (out / "plots" / "comparison.svg").exists()
        for name in ("testing", "oc1", "oc2", "oc3", "oc4"):
            assert (out / "records" / f"{name}.jsonl").exists()
            assert (out / "conditions" / f"{name}.json").exists()
        ET.parse(out / "plots" / "failures_testing.svg")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "depgrid.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "depgrid" in proc.stdout
