"""matchbench: confounding-aware test-set design and evaluation.

Library surface for building designed and exactly matched test sets over
observational health-style records, training from-scratch linear
classifiers, and comparing ROC-AUC across Randomized / Designed / Matched
split variants. See the README for the CLI.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .audit import (
    AuditReport,
    Breakdown,
    CrossTab,
    SymptomComboTable,
    TimeSeries,
    build_audit_report,
    cross_tabulate,
    distribution_breakdown,
    submissions_over_time,
    symptom_combinations,
)
from .csvio import ParseError, parse_dataset, write_dataset
from .eligibility import (
    EXCLUSION_REASONS,
    ExclusionReport,
    apply_eligibility_filter,
    exclusion_reason,
    missing_data_partition,
)
from .features import (
    AUDIO_ONLY,
    METADATA_ONLY,
    FeatureSpec,
    encode_dataset,
    encode_record,
    fit_feature_spec,
)
from .generator import (
    AUDIO_CHANNELS,
    ConfigError,
    GeneratorConfig,
    RecruitmentOdds,
    StudyWindow,
    SymptomProfile,
    default_paper_mimic_config,
    generate_dataset,
    mimic_confound_weights,
    zero_confound_weights,
)
from .matching import (
    MATCHING_VARIABLES,
    MatchedSet,
    StratumKey,
    build_matched_set,
    stratum_key,
)
from .metrics import EvalReport, assemble_report, roc_auc, run_comparison
from .models import (
    LinearModel,
    SingleClassError,
    TrainingParams,
    predict_scores,
    train_logistic,
    train_max_margin,
    tune_lam,
)
from .pipeline import (
    MissingPrerequisiteError,
    PipelineConfig,
    StaleArtifactError,
    StageResult,
    run_all,
    run_stage,
)
from .records import (
    CovidStatus,
    Dataset,
    Gender,
    RecruitmentSource,
    SmokerStatus,
    SubmissionRecord,
    TestType,
    ViralLoad,
)
from .splits import (
    InfeasibleSplitError,
    SplitAssignment,
    SplitConfig,
    build_designed_split,
    build_random_split,
)

__version__ = "0.1.0"

__all__ = [
    "AUDIO_CHANNELS",
    "AUDIO_ONLY",
    "AuditReport",
    "Breakdown",
    "ConfigError",
    "CovidStatus",
    "CrossTab",
    "Dataset",
    "EXCLUSION_REASONS",
    "EvalReport",
    "ExclusionReport",
    "FeatureSpec",
    "Gender",
    "GeneratorConfig",
    "InfeasibleSplitError",
    "KERNEL_BACKEND",
    "LinearModel",
    "MATCHING_VARIABLES",
    "METADATA_ONLY",
    "MatchedSet",
    "MissingPrerequisiteError",
    "ParseError",
    "PipelineConfig",
    "RecruitmentOdds",
    "RecruitmentSource",
    "SingleClassError",
    "SmokerStatus",
    "SplitAssignment",
    "SplitConfig",
    "StageResult",
    "StaleArtifactError",
    "StratumKey",
    "StudyWindow",
    "SubmissionRecord",
    "SymptomComboTable",
    "SymptomProfile",
    "TestType",
    "TimeSeries",
    "TrainingParams",
    "ViralLoad",
    "apply_eligibility_filter",
    "assemble_report",
    "build_audit_report",
    "build_designed_split",
    "build_matched_set",
    "build_random_split",
    "cross_tabulate",
    "default_paper_mimic_config",
    "distribution_breakdown",
    "encode_dataset",
    "encode_record",
    "exclusion_reason",
    "fit_feature_spec",
    "generate_dataset",
    "mimic_confound_weights",
    "missing_data_partition",
    "parse_dataset",
    "predict_scores",
    "roc_auc",
    "run_all",
    "run_comparison",
    "run_stage",
    "stratum_key",
    "submissions_over_time",
    "symptom_combinations",
    "train_logistic",
    "train_max_margin",
    "tune_lam",
    "write_dataset",
    "zero_confound_weights",
]
