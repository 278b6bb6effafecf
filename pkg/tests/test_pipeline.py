"""Pipeline tests: staging, manifests, no-op reruns, CLI behavior."""

import dataclasses
import json
import shutil
from pathlib import Path

import pytest

from matchbench.cli import main as cli_main
from matchbench.csvio import parse_dataset, write_dataset
from matchbench.generator import GeneratorConfig
from matchbench.pipeline import (
    MANIFEST_NAME,
    STAGE_ORDER,
    _OUTPUTS,
    MissingPrerequisiteError,
    PipelineConfig,
    StaleArtifactError,
    run_all,
    run_stage,
)
from matchbench.seeding import derive_seed

from helpers import make_dataset, random_records, small_mimic_config

_ALL_FILES = sorted({f for outs in _OUTPUTS.values() for f in outs}) + [MANIFEST_NAME]


def _config_dict(out_dir: str) -> dict:
    return {
        "out_dir": out_dir,
        "seed": 11,
        "n_records": 2000,
        "feature_dim": 8,
        "split": {"viral_load_target_per_category": 30},
        "training": {"max_iter": 300},
    }


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    """One fully built pipeline directory, shared read-only by the tests."""
    root = tmp_path_factory.mktemp("pipe")
    out = root / "main"
    cfg_path = root / "config.json"
    cfg_path.write_text(json.dumps(_config_dict(str(out))))
    rc = cli_main(["all", "--config", str(cfg_path)])
    assert rc == 0
    return root, out, cfg_path


def test_run_all_produces_every_artifact(built):
    _, out, _ = built
    for fname in _ALL_FILES:
        assert (out / fname).exists(), fname
    manifest = json.loads((out / MANIFEST_NAME).read_text())
    assert set(manifest) == set(STAGE_ORDER)
    for stage in STAGE_ORDER:
        assert set(manifest[stage]["outputs"]) == set(_OUTPUTS[stage])


def test_rerun_is_a_noop(built, capsys):
    root, out, cfg_path = built
    before = {f: (out / f).read_bytes() for f in _ALL_FILES}
    rc = cli_main(["all", "--config", str(cfg_path)])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == len(STAGE_ORDER)
    assert all("skipped (up to date)" in line for line in lines)
    after = {f: (out / f).read_bytes() for f in _ALL_FILES}
    assert before == after


def test_single_stage_rerun_skips(built, capsys):
    _, _, cfg_path = built
    assert cli_main(["train", "--config", str(cfg_path)]) == 0
    assert "stage train: skipped (up to date)" in capsys.readouterr().out


def test_fresh_directory_is_byte_identical(built, tmp_path):
    _, out, _ = built
    cfg = PipelineConfig.from_dict(_config_dict(str(tmp_path / "fresh")))
    results = run_all(cfg)
    assert not any(r.skipped for r in results)
    for fname in _ALL_FILES:
        assert (tmp_path / "fresh" / fname).read_bytes() == (out / fname).read_bytes(), fname


def test_changed_training_config_invalidates_only_downstream(built, tmp_path):
    _, out, _ = built
    clone = tmp_path / "clone"
    shutil.copytree(out, clone)
    d = _config_dict(str(clone))
    d["training"]["max_iter"] = 301
    results = run_all(PipelineConfig.from_dict(d))
    by_stage = {r.stage: r.skipped for r in results}
    for stage in ("generate", "filter", "audit", "split", "match"):
        assert by_stage[stage], stage
    for stage in ("train", "evaluate", "report"):
        assert not by_stage[stage], stage


def test_changed_seed_invalidates_everything(built, tmp_path):
    _, out, _ = built
    clone = tmp_path / "clone-seed"
    shutil.copytree(out, clone)
    d = _config_dict(str(clone))
    d["seed"] = 12
    results = run_all(PipelineConfig.from_dict(d))
    assert not any(r.skipped for r in results)


def test_missing_prerequisite_names_the_stage(tmp_path):
    cfg = PipelineConfig.from_dict(_config_dict(str(tmp_path / "empty")))
    with pytest.raises(MissingPrerequisiteError, match="run `matchbench generate`"):
        run_stage("filter", cfg)
    with pytest.raises(MissingPrerequisiteError, match="filter"):
        run_stage("split", cfg)


def test_hand_edited_artifact_is_detected(tmp_path):
    out = tmp_path / "stale"
    cfg = PipelineConfig(
        out_dir=str(out),
        seed=1,
        generator=small_mimic_config(seed=0, n=300, feature_dim=4),
    )
    run_stage("generate", cfg)
    run_stage("filter", cfg)
    target = out / "filtered.csv"
    target.write_text(target.read_text() + "# tampered\n")
    with pytest.raises(StaleArtifactError, match="re-run `matchbench filter`"):
        run_stage("audit", cfg)


def test_unknown_stage_rejected(tmp_path):
    cfg = PipelineConfig.from_dict(_config_dict(str(tmp_path / "x")))
    with pytest.raises(ValueError, match="unknown stage"):
        run_stage("bogus", cfg)


def test_config_requires_exactly_one_source(tmp_path):
    with pytest.raises(ValueError, match="exactly one"):
        PipelineConfig(out_dir="x", input_path="a.csv", generator="mimic").validate()
    with pytest.raises(ValueError, match="exactly one"):
        PipelineConfig(out_dir="x", input_path=None, generator=None).validate()
    with pytest.raises(ValueError, match="mimic"):
        PipelineConfig(out_dir="x", generator="bogus").validate()


def test_generator_seed_is_derived_from_global_seed():
    cfg = PipelineConfig(out_dir="x", seed=99)
    assert cfg.generator_config().seed == derive_seed(99, "generate")
    explicit = small_mimic_config(seed=7, n=100, feature_dim=4)
    cfg2 = PipelineConfig(out_dir="x", seed=99, generator=explicit)
    eff = cfg2.generator_config()
    assert eff.seed == derive_seed(99, "generate")
    assert eff.n == 100  # everything but the seed is preserved
    assert isinstance(eff, GeneratorConfig)


def test_cli_ingests_external_csv(tmp_path, capsys):
    src = tmp_path / "input.csv"
    ds = make_dataset(random_records(seed=3, n=30))
    write_dataset(ds, src)
    out = tmp_path / "ingest"
    rc = cli_main(["generate", "--input", str(src), "--out", str(out)])
    assert rc == 0
    assert "ingested 30 records" in capsys.readouterr().out
    round_tripped = parse_dataset(out / "dataset.csv")
    assert list(round_tripped) == list(ds)


def test_cli_errors_are_json_on_stderr(tmp_path, capsys):
    rc = cli_main(["split", "--out", str(tmp_path / "nothing")])
    assert rc == 1
    captured = capsys.readouterr()
    payload = json.loads(captured.err)
    assert payload["error"] == "MissingPrerequisiteError"
    assert "filter" in payload["message"]
    assert captured.out == ""


def test_cli_seed_override_changes_outputs(built, tmp_path, capsys):
    root, out, cfg_path = built
    other = tmp_path / "other-seed"
    rc = cli_main(
        ["generate", "--config", str(cfg_path), "--seed", "12", "--out", str(other)]
    )
    assert rc == 0
    capsys.readouterr()
    assert (other / "dataset.csv").read_bytes() != (out / "dataset.csv").read_bytes()
