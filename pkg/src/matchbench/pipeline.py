"""Staged pipeline with content-hash manifests.

Eight stages (generate, filter, audit, split, match, train, evaluate,
report) form a small DAG. Each stage writes its artifacts into the output
directory plus a manifest entry recording the hashes of everything it
consumed and produced. Re-running a stage whose inputs are unchanged is a
no-op; artifacts edited behind the pipeline's back are detected by hash
and reported with the stage to re-run. Staleness is content-based, never
timestamp-based, so identical configs produce byte-identical trees.

Every stage derives its own seed from the pipeline's global seed and the
stage name; seed fields inside nested configs are overridden with the
derived value, which is what makes `--seed` the single reproducibility
knob.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .audit import build_audit_report, render_audit_report, submissions_over_time
from .csvio import parse_dataset, write_dataset
from .eligibility import apply_eligibility_filter
from .generator import GeneratorConfig, default_paper_mimic_config, generate_dataset
from .matching import MatchedSet, build_matched_set
from .metrics import CLASSIFIERS, assemble_report
from .models import (
    LinearModel,
    TrainingParams,
    train_logistic,
    train_max_margin,
    tune_lam,
)
from .seeding import derive_seed
from .splits import SplitAssignment, SplitConfig, build_designed_split, build_random_split

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1

STAGE_ORDER = ("generate", "filter", "audit", "split", "match", "train", "evaluate", "report")

_DEPS = {
    "generate": (),
    "filter": ("generate",),
    "audit": ("filter",),
    "split": ("filter",),
    "match": ("split",),
    "train": ("split",),
    "evaluate": ("train", "match"),
    "report": ("evaluate", "audit"),
}

_OUTPUTS = {
    "generate": ("dataset.csv",),
    "filter": ("filtered.csv", "exclusion_report.json"),
    "audit": ("audit.json", "audit.md", "submissions_day.csv", "submissions_week.csv"),
    "split": ("designed_split.csv", "random_split.csv", "split_info.json"),
    "match": ("matched_ids.csv", "balance_table.json"),
    "train": tuple(
        f"model_{family}_{split}.json"
        for family, _ in CLASSIFIERS
        for split in ("designed", "random")
    ),
    "evaluate": ("eval_report.json",),
    "report": ("report.md",),
}


class MissingPrerequisiteError(RuntimeError):
    """A required upstream stage has not produced its artifacts."""


class StaleArtifactError(RuntimeError):
    """An artifact no longer matches the manifest (edited or corrupted)."""


@dataclass(frozen=True)
class PipelineConfig:
    """One bundle driving all stages.

    Exactly one data source is set: input_path (a CSV to ingest) or
    generator (a GeneratorConfig, or the string "mimic" for the stock
    confounded-study configuration). All nested seed fields are
    overridden by values derived from the global seed.
    """

    out_dir: str
    seed: int = 0
    input_path: str | None = None
    generator: GeneratorConfig | str | None = "mimic"
    split: SplitConfig = field(default_factory=SplitConfig)
    training: TrainingParams = field(default_factory=TrainingParams)
    tune: bool = False
    audit_threshold: float = 0.2
    n_records: int = 37018
    feature_dim: int = 24

    def validate(self) -> None:
        has_input = self.input_path is not None
        has_gen = self.generator is not None
        if has_input == has_gen:
            raise ValueError(
                "exactly one of input_path and generator must be set "
                f"(input_path={self.input_path!r}, generator={'set' if has_gen else None})"
            )
        if isinstance(self.generator, str) and self.generator != "mimic":
            raise ValueError(f"generator: unknown reference {self.generator!r}; use 'mimic'")
        if not self.audit_threshold > 0:
            raise ValueError(f"audit_threshold must be > 0, got {self.audit_threshold}")

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        kwargs = dict(d)
        gen = kwargs.get("generator", "mimic" if "input_path" not in kwargs else None)
        if isinstance(gen, dict):
            gen = GeneratorConfig.from_dict(gen)
        kwargs["generator"] = gen
        if isinstance(kwargs.get("split"), dict):
            kwargs["split"] = SplitConfig.from_dict(kwargs["split"])
        kwargs.setdefault("split", SplitConfig())
        if isinstance(kwargs.get("training"), dict):
            kwargs["training"] = TrainingParams(**kwargs["training"])
        kwargs.setdefault("training", TrainingParams())
        return cls(**kwargs)

    def generator_config(self) -> GeneratorConfig:
        """The effective generator config with the derived stage seed."""
        seed = derive_seed(self.seed, "generate")
        if isinstance(self.generator, GeneratorConfig):
            return dataclasses.replace(self.generator, seed=seed)
        return default_paper_mimic_config(seed, n=self.n_records, feature_dim=self.feature_dim)


@dataclass(frozen=True)
class StageResult:
    stage: str
    skipped: bool
    outputs: tuple
    message: str = ""


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _hash_obj(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def _config_slice(name: str, cfg: PipelineConfig) -> dict:
    """The part of the config a stage's output actually depends on."""
    if name == "generate":
        if cfg.input_path is not None:
            return {"input_path": cfg.input_path}
        return {"generator": cfg.generator_config().to_dict()}
    if name == "audit":
        return {"audit_threshold": cfg.audit_threshold}
    if name == "split":
        scfg = dataclasses.replace(cfg.split, seed=derive_seed(cfg.seed, "split"))
        return {"split": scfg.to_dict(), "random_seed": derive_seed(cfg.seed, "split-random")}
    if name == "match":
        return {"match_seed": derive_seed(cfg.seed, "match")}
    if name == "train":
        params = dataclasses.replace(cfg.training, seed=derive_seed(cfg.seed, "train"))
        return {"training": params.to_dict(), "tune": cfg.tune}
    return {}


def _load_manifest(out: Path) -> dict:
    path = out / MANIFEST_NAME
    if not path.exists():
        return {}
    return json.loads(path.read_text())


def _save_manifest(out: Path, manifest: dict) -> None:
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _read_split(path: Path) -> SplitAssignment:
    lines = path.read_text().splitlines()
    ids = []
    test = set()
    provenance = {}
    for line in lines[1:]:
        rid, assignment, prov = line.split(",")
        ids.append(rid)
        if assignment == "Test":
            test.add(rid)
            provenance[rid] = tuple(prov.split("|")) if prov else ()
    return SplitAssignment(
        ids=tuple(ids), test_ids=frozenset(test), provenance=provenance
    )


def _read_matched(path: Path) -> MatchedSet:
    ids = path.read_text().splitlines()[1:]
    return MatchedSet(selected_ids=frozenset(ids), stratum_counts={}, warnings=())


# -- stage bodies ----------------------------------------------------------


def _stage_generate(cfg: PipelineConfig, out: Path) -> str:
    if cfg.input_path is not None:
        ds = parse_dataset(Path(cfg.input_path))
        msg = f"ingested {len(ds)} records from {cfg.input_path}"
    else:
        ds = generate_dataset(cfg.generator_config())
        msg = f"generated {len(ds)} records"
    write_dataset(ds, out / "dataset.csv")
    return msg


def _stage_filter(cfg: PipelineConfig, out: Path) -> str:
    ds = parse_dataset(out / "dataset.csv")
    kept, report = apply_eligibility_filter(ds)
    write_dataset(kept, out / "filtered.csv")
    (out / "exclusion_report.json").write_text(report.to_json() + "\n")
    return f"{report.surviving} of {report.input_size} records kept"


def _stage_audit(cfg: PipelineConfig, out: Path) -> str:
    ds = parse_dataset(out / "filtered.csv")
    report = build_audit_report(ds, cfg.audit_threshold)
    (out / "audit.json").write_text(report.to_json() + "\n")
    (out / "audit.md").write_text(render_audit_report(report))
    (out / "submissions_day.csv").write_text(submissions_over_time(ds, "day").to_csv())
    (out / "submissions_week.csv").write_text(submissions_over_time(ds, "week").to_csv())
    return f"{len(report.flagged)} variables flagged: {', '.join(report.flagged) or 'none'}"


def _stage_split(cfg: PipelineConfig, out: Path) -> str:
    ds = parse_dataset(out / "filtered.csv")
    scfg = dataclasses.replace(cfg.split, seed=derive_seed(cfg.seed, "split"))
    designed = build_designed_split(ds, scfg)
    rand = build_random_split(ds, scfg.test_fraction, derive_seed(cfg.seed, "split-random"))
    (out / "designed_split.csv").write_text(designed.to_csv())
    (out / "random_split.csv").write_text(rand.to_csv())
    info = {
        "config": scfg.to_dict(),
        "choices": designed.choices,
        "warnings": list(designed.warnings),
        "step_counts": designed.step_counts(),
        "designed_test_size": len(designed.test_ids),
        "designed_train_size": len(designed.train_ids),
    }
    (out / "split_info.json").write_text(json.dumps(info, indent=2, sort_keys=True) + "\n")
    return (
        f"designed test {len(designed.test_ids)} / train {len(designed.train_ids)}"
        + (f"; {len(designed.warnings)} warning(s)" if designed.warnings else "")
    )


def _stage_match(cfg: PipelineConfig, out: Path) -> str:
    ds = parse_dataset(out / "filtered.csv")
    designed = _read_split(out / "designed_split.csv")
    matched = build_matched_set(designed.test_dataset(ds), derive_seed(cfg.seed, "match"))
    (out / "matched_ids.csv").write_text(matched.to_ids_csv())
    (out / "balance_table.json").write_text(matched.balance_table_json() + "\n")
    return f"matched set of {matched.size} records ({matched.size // 2} per class)"


def _stage_train(cfg: PipelineConfig, out: Path) -> str:
    ds = parse_dataset(out / "filtered.csv")
    splits = {
        "designed": _read_split(out / "designed_split.csv"),
        "random": _read_split(out / "random_split.csv"),
    }
    params = dataclasses.replace(cfg.training, seed=derive_seed(cfg.seed, "train"))
    notes = []
    for family, mode in CLASSIFIERS:
        trainer = train_max_margin if family == "max_margin" else train_logistic
        for split_name, split in splits.items():
            train_ds = split.train_dataset(ds)
            p = params
            if cfg.tune:
                lam = tune_lam(train_ds, mode, family, params)
                p = dataclasses.replace(params, lam=lam)
                notes.append(f"{family}/{split_name}: lam={lam:g}")
            model = trainer(train_ds, mode, p)
            (out / f"model_{family}_{split_name}.json").write_text(model.to_json() + "\n")
    return "4 models trained" + (f" ({'; '.join(notes)})" if notes else "")


def _stage_evaluate(cfg: PipelineConfig, out: Path) -> str:
    ds = parse_dataset(out / "filtered.csv")
    designed = _read_split(out / "designed_split.csv")
    rand = _read_split(out / "random_split.csv")
    matched = _read_matched(out / "matched_ids.csv")
    models = {}
    for family, _ in CLASSIFIERS:
        for split_name in ("designed", "random"):
            path = out / f"model_{family}_{split_name}.json"
            models[family, split_name] = LinearModel.from_json(path.read_text())
    report = assemble_report(
        ds,
        designed,
        rand,
        matched,
        models,
        seeds={"global": cfg.seed, "training": derive_seed(cfg.seed, "train")},
    )
    (out / "eval_report.json").write_text(report.to_json() + "\n")
    parts = []
    for family, _ in CLASSIFIERS:
        aucs = "/".join(f"{report.auc(family, v):.3f}" for v in ("Randomized", "Designed", "Matched"))
        parts.append(f"{family} {aucs}")
    return "; ".join(parts)


def _stage_report(cfg: PipelineConfig, out: Path) -> str:
    from .metrics import EvalCell, EvalReport

    data = json.loads((out / "eval_report.json").read_text())
    eval_report = EvalReport(
        cells=tuple(EvalCell(**c) for c in data["cells"]),
        dataset_fingerprint=data["dataset_fingerprint"],
        seeds=data["seeds"],
    )
    audit_data = json.loads((out / "audit.json").read_text())
    lines = [eval_report.render_markdown()]
    lines.append("## Flagged confounders")
    lines.append("")
    if audit_data["flagged"]:
        for name in audit_data["flagged"]:
            lines.append(f"- {name} (statistic {audit_data['statistics'][name]:.3f})")
    else:
        lines.append("- none at threshold " + str(audit_data["threshold"]))
    lines.append("")
    (out / "report.md").write_text("\n".join(lines))
    return "report.md written"


_STAGE_FN = {
    "generate": _stage_generate,
    "filter": _stage_filter,
    "audit": _stage_audit,
    "split": _stage_split,
    "match": _stage_match,
    "train": _stage_train,
    "evaluate": _stage_evaluate,
    "report": _stage_report,
}


def _input_state(name: str, cfg: PipelineConfig, out: Path) -> dict:
    files = {}
    for dep in _DEPS[name]:
        for fname in _OUTPUTS[dep]:
            path = out / fname
            if not path.exists():
                raise MissingPrerequisiteError(
                    f"stage '{name}' needs artifact '{fname}' from stage '{dep}'; "
                    f"run `matchbench {dep}` first"
                )
            files[fname] = _sha256_file(path)
    return {
        "config": _hash_obj(_config_slice(name, cfg)),
        "files": files,
        "version": MANIFEST_VERSION,
    }


def _check_upstream_integrity(name: str, manifest: dict, out: Path) -> None:
    """Artifacts must match what their producing stage recorded."""
    for dep in _DEPS[name]:
        entry = manifest.get(dep)
        if entry is None:
            continue
        for fname, recorded in entry["outputs"].items():
            path = out / fname
            if path.exists() and _sha256_file(path) != recorded:
                raise StaleArtifactError(
                    f"artifact '{fname}' does not match what stage '{dep}' recorded "
                    f"(modified outside the pipeline?); re-run `matchbench {dep}`"
                )


def run_stage(name: str, cfg: PipelineConfig) -> StageResult:
    """Run one stage, skipping when inputs and outputs are already current."""
    if name not in _STAGE_FN:
        raise ValueError(f"unknown stage {name!r}; stages are {', '.join(STAGE_ORDER)}")
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = _load_manifest(out)

    _check_upstream_integrity(name, manifest, out)
    state = _input_state(name, cfg, out)

    entry = manifest.get(name)
    if entry is not None and entry["inputs"] == state:
        outputs_ok = all(
            (out / fname).exists() and _sha256_file(out / fname) == recorded
            for fname, recorded in entry["outputs"].items()
        )
        if outputs_ok:
            return StageResult(stage=name, skipped=True, outputs=_OUTPUTS[name], message="up to date")

    message = _STAGE_FN[name](cfg, out)
    outputs = {}
    for fname in _OUTPUTS[name]:
        path = out / fname
        if not path.exists():
            raise RuntimeError(f"stage '{name}' did not produce declared output '{fname}'")
        outputs[fname] = _sha256_file(path)
    manifest[name] = {"inputs": state, "outputs": outputs}
    _save_manifest(out, manifest)
    return StageResult(stage=name, skipped=False, outputs=_OUTPUTS[name], message=message)


def run_all(cfg: PipelineConfig) -> list:
    """Run every stage in dependency order; returns the StageResults."""
    return [run_stage(name, cfg) for name in STAGE_ORDER]
