import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from persona_miner.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def _invoke(runner, args):
    return runner.invoke(main, args, catch_exceptions=False)


def test_help_lists_subcommands(runner):
    result = _invoke(runner, ["--help"])
    assert result.exit_code == 0
    for cmd in ("fetch", "filter", "metrics", "classify", "cluster", "analyze",
                "assign", "report", "simulate", "run"):
        assert cmd in result.output


def test_metrics_subcommand(runner, fixture_archive_path, tmp_path):
    out = tmp_path / "metrics.csv"
    result = _invoke(runner, ["metrics", "--archive", str(fixture_archive_path),
                              "--output", str(out)])
    assert result.exit_code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) > 0
    assert "rc_commits_created" in rows[0]


def test_classify_subcommand(runner, fixture_archive_path, tmp_path):
    out = tmp_path / "cls.csv"
    result = _invoke(runner, ["classify", "--archive", str(fixture_archive_path),
                              "--output", str(out)])
    assert result.exit_code == 0
    rows = list(csv.DictReader(out.open()))
    assert all(r["dev_type"] and r["activity_type"] for r in rows)


def test_simulate_assign_round_trip(runner, tmp_path):
    metrics = tmp_path / "sim.csv"
    truth = tmp_path / "truth.csv"
    result = _invoke(runner, ["simulate", "--count", "50", "--noise-sd", "2.0",
                              "--seed", "0", "--metrics-output", str(metrics),
                              "--truth-output", str(truth)])
    assert result.exit_code == 0

    personas = tmp_path / "personas.csv"
    result = _invoke(runner, ["assign", "--metrics", str(metrics),
                              "--output", str(personas)])
    assert result.exit_code == 0

    truth_by_login = {r["login"]: r["archetype"]
                      for r in csv.DictReader(truth.open())}
    rows = list(csv.DictReader(personas.open()))
    hits = sum(truth_by_login[r["login"]] == r["persona"] for r in rows)
    assert hits / len(rows) >= 0.99


def test_cluster_subcommand_on_blob_metrics(runner, tmp_path):
    metrics = tmp_path / "sim.csv"
    _invoke(runner, ["simulate", "--count", "30", "--noise-sd", "1.0",
                     "--seed", "1", "--metrics-output", str(metrics)])
    labels = tmp_path / "labels.csv"
    dendro = tmp_path / "dendro.json"
    result = _invoke(runner, ["cluster", "--metrics", str(metrics),
                              "--labels-output", str(labels),
                              "--dendrogram-output", str(dendro)])
    assert result.exit_code == 0
    assert "k=" in result.output
    rows = list(csv.DictReader(labels.open()))
    assert len(rows) == 210
    assert json.loads(dendro.read_text())["n_leaves"] == 210


def test_analyze_subcommand(runner, tmp_path):
    metrics = tmp_path / "sim.csv"
    _invoke(runner, ["simulate", "--count", "20", "--noise-sd", "1.0",
                     "--seed", "2", "--metrics-output", str(metrics)])
    labels = tmp_path / "labels.csv"
    _invoke(runner, ["cluster", "--metrics", str(metrics), "--k-max", "3",
                     "--labels-output", str(labels)])
    stats = tmp_path / "stats.json"
    result = _invoke(runner, ["analyze", "--metrics", str(metrics),
                              "--labels", str(labels), "--output", str(stats)])
    assert result.exit_code == 0
    obj = json.loads(stats.read_text())
    assert obj["format"] == "persona-miner-stats"
    assert obj["pca"] is not None
    assert set(obj["anova"]) == set(obj["tukey"])


def test_report_subcommand(runner, fixture_archive_path, tmp_path):
    out = tmp_path / "reports"
    result = _invoke(runner, ["report", "--archive", str(fixture_archive_path),
                              "--output-dir", str(out)])
    assert result.exit_code == 0
    assert {p.name for p in out.iterdir()} == {"totals.csv", "upset.json",
                                               "composition.csv"}


def test_filter_subcommand(runner, tmp_path):
    summaries = tmp_path / "summaries.json"
    summaries.write_text(json.dumps([
        {"repo": "org/good", "visibility": "public", "unique_committers": 50,
         "license_id": "MIT", "languages": ["Python"], "is_fork": False,
         "age_days": 2000},
        {"repo": "org/forked", "visibility": "public", "unique_committers": 50,
         "license_id": "MIT", "languages": ["Python"], "is_fork": True,
         "age_days": 2000},
    ]))
    out = tmp_path / "elig.csv"
    result = _invoke(runner, ["filter", "--summaries", str(summaries),
                              "--output", str(out)])
    assert result.exit_code == 0
    assert "1 eligible; sampled 1" in result.output
    assert "org/good" in result.output


def test_run_full_pipeline_deterministic(runner, fixture_archive_path, tmp_path):
    outputs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        result = _invoke(runner, ["run", "--archive", str(fixture_archive_path),
                                  "--seed", "0", "--output-dir", str(out)])
        assert result.exit_code == 0
        assert "pipeline complete" in result.output
        outputs.append(out)
    for path in sorted(outputs[0].iterdir()):
        if path.name == "run_manifest.json":
            continue
        assert path.read_bytes() == (outputs[1] / path.name).read_bytes()


def test_run_with_config_file(runner, fixture_archive_path, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "archive_path": str(fixture_archive_path),
        "output_dir": str(tmp_path / "out"),
        "seed": 7,
        "exclude_bots": True,
    }))
    result = _invoke(runner, ["run", "--config", str(cfg)])
    assert result.exit_code == 0
    manifest = json.loads((tmp_path / "out" / "run_manifest.json").read_text())
    assert manifest["seed"] == 7


def test_run_missing_config_file_exit_2(runner):
    result = runner.invoke(main, ["run", "--config", "/nonexistent/cfg.json"])
    assert result.exit_code == 2


def test_run_unparseable_config_exit_2(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    result = runner.invoke(main, ["run", "--config", str(cfg)])
    assert result.exit_code == 2


def test_run_unknown_config_key_exit_2(runner, fixture_archive_path, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"archive_path": str(fixture_archive_path),
                               "bogus_key": 1}))
    result = runner.invoke(main, ["run", "--config", str(cfg)])
    assert result.exit_code == 2


def test_run_missing_archive_is_nonzero(runner, tmp_path):
    # config names an archive that does not exist
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"archive_path": str(tmp_path / "missing.jsonl")}))
    result = runner.invoke(main, ["run", "--config", str(cfg)])
    assert result.exit_code == 2
    # no data source at all is a validation failure
    result = runner.invoke(main, ["run", "--seed", "1",
                                  "--output-dir", str(tmp_path / "x")])
    assert result.exit_code == 4


def test_bad_archive_exit_4(runner, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"format": "something-else", "version": 1}\n')
    out = tmp_path / "m.csv"
    result = runner.invoke(main, ["metrics", "--archive", str(bad),
                                  "--output", str(out)])
    assert result.exit_code == 4


def test_cluster_too_few_rows_exit_4(runner, tmp_path):
    metrics = tmp_path / "sim.csv"
    _invoke(runner, ["simulate", "--count", "1", "--noise-sd", "0.0",
                     "--seed", "0", "--metrics-output", str(metrics)])
    # keep only the header plus two rows
    lines = metrics.read_text().splitlines()
    metrics.write_text("\n".join(lines[:3]) + "\n")
    result = runner.invoke(main, ["cluster", "--metrics", str(metrics),
                                  "--labels-output", str(tmp_path / "l.csv")])
    assert result.exit_code == 4
