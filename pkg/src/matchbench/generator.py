"""Synthetic submission generator.

Produces datasets whose joint distribution over covid status, symptoms,
recruitment source, and age mirrors the confounding structure of a
case-control respiratory study: cases are recruited overwhelmingly through
symptomatic testing while controls come mostly from a population survey, so
naive models can classify status from enrollment artifacts alone.

Audio features are a linear read-out of the confounded covariates plus an
optional genuine status signal:

    x = W z + beta * 1[Positive] * v + sigma * eps

where z stacks the fifteen symptom flags, standardized age, and the
recruitment-source indicator. With beta = 0 every bit of audio
predictability is confounding by construction, which is what makes the
generated data useful for stress-testing evaluation protocols.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .records import (
    REAL_SYMPTOM_FIELDS,
    SYMPTOM_FIELDS,
    CovidStatus,
    Dataset,
    Gender,
    RecruitmentSource,
    SmokerStatus,
    SubmissionRecord,
    TestType,
    ViralLoad,
    HEIGHT_BINS,
    WEIGHT_BINS,
)
from .seeding import substream

# Channels of the latent covariate vector z, in fixed order. The first 15
# are the symptom flags; the last two are standardized age and the
# recruitment-source indicator (1 = TestAndTrace).
AUDIO_CHANNELS: tuple[str, ...] = SYMPTOM_FIELDS + ("age", "recruitment_source")

# Core symptoms: prevalence differs by status among symptomatic records.
# Everything else is status-independent given the symptomatic flag.
CORE_SYMPTOMS: tuple[str, ...] = (
    "cough_any",
    "sore_throat",
    "shortness_of_breath",
    "runny_blocked_nose",
)

_SHARED_SYMPTOMS: tuple[str, ...] = tuple(
    s
    for s in REAL_SYMPTOM_FIELDS
    if s not in CORE_SYMPTOMS and s != "new_continuous_cough"
)


class ConfigError(ValueError):
    """Raised when a generator configuration fails validation.

    Carries the full list of field-level problems so callers can report
    everything at once instead of fixing errors one at a time.
    """

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid generator config:\n  " + "\n  ".join(errors))


def _check_prob(errors: list[str], name: str, value) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        errors.append(f"{name}: expected a number, got {value!r}")
    elif not 0.0 <= float(value) <= 1.0:
        errors.append(f"{name}: probability {value!r} outside [0, 1]")


@dataclass(frozen=True)
class RecruitmentOdds:
    """P(TestAndTrace | status, symptomatic) for the four cells.

    Conditioning on the symptomatic flag as well as status is what lets a
    single configuration hit status-by-source and symptoms-by-source
    marginals simultaneously; use from_status_only when the simpler
    two-parameter model is enough.
    """

    positive_symptomatic: float
    positive_asymptomatic: float
    negative_symptomatic: float
    negative_asymptomatic: float

    @classmethod
    def from_status_only(cls, p_positive: float, p_negative: float) -> "RecruitmentOdds":
        return cls(p_positive, p_positive, p_negative, p_negative)

    def validate(self, errors: list[str]) -> None:
        for f in dataclasses.fields(self):
            _check_prob(errors, f"recruitment_odds.{f.name}", getattr(self, f.name))

    def probability(self, positive: np.ndarray, symptomatic: np.ndarray) -> np.ndarray:
        p = np.where(
            positive,
            np.where(symptomatic, self.positive_symptomatic, self.positive_asymptomatic),
            np.where(symptomatic, self.negative_symptomatic, self.negative_asymptomatic),
        )
        return p


@dataclass(frozen=True)
class SymptomProfile:
    """Conditional symptom model.

    p_symptomatic_positive / p_symptomatic_negative drive the no_symptoms
    flag. Among symptomatic records, each core symptom fires with a
    status-specific rate and each shared symptom with a single rate;
    new_continuous_cough is conditioned on cough_any instead so the two
    cough fields stay coherent. Asymptomatic records report no real
    symptoms and no_symptoms=True, with prefer_not_to_say always False.
    A symptomatic record that would otherwise end up with zero real flags
    has other_symptom forced on, keeping the symptomatic flag consistent
    with at least one concrete complaint.
    """

    p_symptomatic_positive: float
    p_symptomatic_negative: float
    core_rates: dict  # symptom -> (rate | Positive, rate | Negative)
    shared_rates: dict  # symptom -> rate, status-independent
    ncc_given_cough: float
    ncc_given_no_cough: float

    def validate(self, errors: list[str]) -> None:
        _check_prob(errors, "symptom_profile.p_symptomatic_positive", self.p_symptomatic_positive)
        _check_prob(errors, "symptom_profile.p_symptomatic_negative", self.p_symptomatic_negative)
        _check_prob(errors, "symptom_profile.ncc_given_cough", self.ncc_given_cough)
        _check_prob(errors, "symptom_profile.ncc_given_no_cough", self.ncc_given_no_cough)
        for name, pair in self.core_rates.items():
            if name not in CORE_SYMPTOMS:
                errors.append(f"symptom_profile.core_rates: {name!r} is not a core symptom")
                continue
            if not isinstance(pair, (tuple, list)) or len(pair) != 2:
                errors.append(f"symptom_profile.core_rates[{name!r}]: expected (pos, neg) pair")
                continue
            _check_prob(errors, f"symptom_profile.core_rates[{name!r}][0]", pair[0])
            _check_prob(errors, f"symptom_profile.core_rates[{name!r}][1]", pair[1])
        for name in CORE_SYMPTOMS:
            if name not in self.core_rates:
                errors.append(f"symptom_profile.core_rates: missing {name!r}")
        for name, rate in self.shared_rates.items():
            if name not in _SHARED_SYMPTOMS:
                errors.append(
                    f"symptom_profile.shared_rates: {name!r} is not a shared symptom field"
                )
                continue
            _check_prob(errors, f"symptom_profile.shared_rates[{name!r}]", rate)
        for name in _SHARED_SYMPTOMS:
            if name not in self.shared_rates:
                errors.append(f"symptom_profile.shared_rates: missing {name!r}")


@dataclass(frozen=True)
class AgeParams:
    """Status-conditional age model: clipped rounded normals."""

    positive_mean: float
    positive_sd: float
    negative_mean: float
    negative_sd: float
    min_age: int = 18
    max_age: int = 94

    def validate(self, errors: list[str]) -> None:
        for f in ("positive_sd", "negative_sd"):
            if getattr(self, f) <= 0:
                errors.append(f"age_params.{f}: must be positive")
        if not self.min_age < self.max_age:
            errors.append("age_params: min_age must be below max_age")
        if self.min_age < 18:
            errors.append("age_params.min_age: generated records must be adults (>= 18)")

    @property
    def reference_mean(self) -> float:
        # Midpoint of the two conditional means; used only to center the
        # age channel of z, so it does not need to track prevalence.
        return 0.5 * (self.positive_mean + self.negative_mean)

    @property
    def reference_sd(self) -> float:
        spread = 0.5 * abs(self.positive_mean - self.negative_mean)
        base = 0.5 * (self.positive_sd + self.negative_sd)
        return float(np.hypot(base, spread))


@dataclass(frozen=True)
class CategoricalWeights:
    """A finite categorical distribution with explicit category order."""

    categories: tuple
    weights: tuple

    def validate(self, errors: list[str], name: str) -> None:
        if len(self.categories) != len(self.weights):
            errors.append(f"{name}: {len(self.categories)} categories vs {len(self.weights)} weights")
            return
        if not self.categories:
            errors.append(f"{name}: empty")
            return
        if len(set(self.categories)) != len(self.categories):
            errors.append(f"{name}: duplicate categories")
        if any(w < 0 for w in self.weights):
            errors.append(f"{name}: negative weight")
            return
        total = float(sum(self.weights))
        if not 0.999 <= total <= 1.001:
            errors.append(f"{name}: weights sum to {total:.6f}, expected 1")

    def probabilities(self) -> np.ndarray:
        p = np.asarray(self.weights, dtype=np.float64)
        return p / p.sum()


@dataclass(frozen=True)
class StudyWindow:
    """Test-date model.

    TestAndTrace dates follow a smooth two-bump intensity over the whole
    window (centers/widths/heights in days relative to start); React dates
    are uniform over a handful of survey rounds. Submission lags tests by
    an integer number of days uniform on [0, max_delay_days].
    """

    start: date
    end: date
    react_rounds: tuple  # of (offset_days, length_days)
    tandt_bumps: tuple  # of (center_days, width_days, height)
    max_delay_days: int = 10

    def validate(self, errors: list[str]) -> None:
        if self.end <= self.start:
            errors.append("window: end must be after start")
            return
        span = (self.end - self.start).days
        if not self.react_rounds:
            errors.append("window.react_rounds: need at least one round")
        for i, rnd in enumerate(self.react_rounds):
            if len(rnd) != 2:
                errors.append(f"window.react_rounds[{i}]: expected (offset, length)")
                continue
            off, length = rnd
            if off < 0 or length <= 0 or off + length > span + 1:
                errors.append(f"window.react_rounds[{i}]: outside the study window")
        for i, bump in enumerate(self.tandt_bumps):
            if len(bump) != 3:
                errors.append(f"window.tandt_bumps[{i}]: expected (center, width, height)")
                continue
            if bump[1] <= 0 or bump[2] < 0:
                errors.append(f"window.tandt_bumps[{i}]: width must be > 0 and height >= 0")
        if not 0 <= self.max_delay_days <= 10:
            errors.append("window.max_delay_days: must lie in [0, 10] to keep records eligible")

    def n_days(self) -> int:
        return (self.end - self.start).days + 1

    def tandt_day_weights(self) -> np.ndarray:
        days = np.arange(self.n_days(), dtype=np.float64)
        w = np.ones_like(days)
        for center, width, height in self.tandt_bumps:
            w += height * np.exp(-0.5 * ((days - center) / width) ** 2)
        return w / w.sum()

    def react_day_weights(self) -> np.ndarray:
        w = np.zeros(self.n_days(), dtype=np.float64)
        for off, length in self.react_rounds:
            w[off : off + length] += 1.0
        return w / w.sum()


@dataclass(frozen=True)
class GeneratorConfig:
    """Everything generate_dataset needs, in one immutable bundle."""

    n: int
    prevalence: float
    recruitment_odds: RecruitmentOdds
    symptom_profile: SymptomProfile
    age_params: AgeParams
    gender_weights: CategoricalWeights
    ethnicity_weights: CategoricalWeights
    language_weights: CategoricalWeights
    authority_weights: CategoricalWeights
    # Odds multiplier applied to an authority's weight on the positive
    # side only; authorities absent from the dict get multiplier 1.
    authority_positive_tilt: dict
    smoker_weights: CategoricalWeights
    height_weights: CategoricalWeights
    weight_weights: CategoricalWeights
    # Marginal rates of (asthma, copd, other_resp); none_resp is derived as
    # the complement of the three so the block stays internally consistent.
    resp_rates: tuple
    viral_recorded_fraction: float
    viral_category_weights: tuple  # (high, medium, low), positives with a reading
    window: StudyWindow
    confound_weights: tuple  # feature_dim rows of len(AUDIO_CHANNELS) floats
    signal_strength: float
    noise_scale: float
    feature_dim: int
    seed: int

    def validate(self) -> None:
        errors: list[str] = []
        if not isinstance(self.n, int) or self.n <= 0:
            errors.append(f"n: expected a positive integer, got {self.n!r}")
        _check_prob(errors, "prevalence", self.prevalence)
        self.recruitment_odds.validate(errors)
        self.symptom_profile.validate(errors)
        self.age_params.validate(errors)
        self.gender_weights.validate(errors, "gender_weights")
        self.ethnicity_weights.validate(errors, "ethnicity_weights")
        self.language_weights.validate(errors, "language_weights")
        self.authority_weights.validate(errors, "authority_weights")
        self.smoker_weights.validate(errors, "smoker_weights")
        self.height_weights.validate(errors, "height_weights")
        self.weight_weights.validate(errors, "weight_weights")
        known_genders = {g.value for g in Gender}
        for cat in self.gender_weights.categories:
            if cat not in known_genders:
                errors.append(f"gender_weights: unknown gender {cat!r}")
        known_smoker = {s.value for s in SmokerStatus}
        for cat in self.smoker_weights.categories:
            if cat not in known_smoker:
                errors.append(f"smoker_weights: unknown smoker status {cat!r}")
        for cat in self.height_weights.categories:
            if cat not in HEIGHT_BINS:
                errors.append(f"height_weights: unknown height bin {cat!r}")
        for cat in self.weight_weights.categories:
            if cat not in WEIGHT_BINS:
                errors.append(f"weight_weights: unknown weight bin {cat!r}")
        for auth in self.authority_positive_tilt:
            if auth not in self.authority_weights.categories:
                errors.append(f"authority_positive_tilt: unknown authority {auth!r}")
        for auth, tilt in self.authority_positive_tilt.items():
            if not tilt > 0:
                errors.append(f"authority_positive_tilt[{auth!r}]: must be positive")
        if len(self.resp_rates) != 3:
            errors.append("resp_rates: expected (asthma, copd, other_resp)")
        else:
            for i, r in enumerate(self.resp_rates):
                _check_prob(errors, f"resp_rates[{i}]", r)
        _check_prob(errors, "viral_recorded_fraction", self.viral_recorded_fraction)
        if len(self.viral_category_weights) != 3:
            errors.append("viral_category_weights: expected (high, medium, low)")
        else:
            for i, w in enumerate(self.viral_category_weights):
                _check_prob(errors, f"viral_category_weights[{i}]", w)
            total = float(sum(self.viral_category_weights))
            if not 0.999 <= total <= 1.001:
                errors.append(f"viral_category_weights: sum {total:.6f}, expected 1")
        self.window.validate(errors)
        if not isinstance(self.feature_dim, int) or self.feature_dim <= 0:
            errors.append(f"feature_dim: expected a positive integer, got {self.feature_dim!r}")
        else:
            if len(self.confound_weights) != self.feature_dim:
                errors.append(
                    f"confound_weights: {len(self.confound_weights)} rows, expected feature_dim={self.feature_dim}"
                )
            for i, row in enumerate(self.confound_weights):
                if len(row) != len(AUDIO_CHANNELS):
                    errors.append(
                        f"confound_weights[{i}]: {len(row)} entries, expected {len(AUDIO_CHANNELS)}"
                    )
                    break
        if self.signal_strength < 0:
            errors.append("signal_strength: must be >= 0")
        if self.noise_scale < 0:
            errors.append("noise_scale: must be >= 0")
        if not isinstance(self.seed, int):
            errors.append(f"seed: expected an integer, got {self.seed!r}")
        if errors:
            raise ConfigError(errors)

    # -- JSON round-trip -------------------------------------------------

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["window"]["start"] = self.window.start.isoformat()
        d["window"]["end"] = self.window.end.isoformat()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorConfig":
        def pairs(seq):
            return {k: tuple(v) for k, v in seq.items()}

        sp = dict(d["symptom_profile"])
        sp["core_rates"] = pairs(sp["core_rates"])
        sp["shared_rates"] = dict(sp["shared_rates"])
        win = dict(d["window"])
        win["start"] = date.fromisoformat(win["start"])
        win["end"] = date.fromisoformat(win["end"])
        win["react_rounds"] = tuple(tuple(r) for r in win["react_rounds"])
        win["tandt_bumps"] = tuple(tuple(b) for b in win["tandt_bumps"])

        def weights(key):
            w = d[key]
            return CategoricalWeights(tuple(w["categories"]), tuple(w["weights"]))

        return cls(
            n=d["n"],
            prevalence=d["prevalence"],
            recruitment_odds=RecruitmentOdds(**d["recruitment_odds"]),
            symptom_profile=SymptomProfile(**sp),
            age_params=AgeParams(**d["age_params"]),
            gender_weights=weights("gender_weights"),
            ethnicity_weights=weights("ethnicity_weights"),
            language_weights=weights("language_weights"),
            authority_weights=weights("authority_weights"),
            authority_positive_tilt=dict(d["authority_positive_tilt"]),
            smoker_weights=weights("smoker_weights"),
            height_weights=weights("height_weights"),
            weight_weights=weights("weight_weights"),
            resp_rates=tuple(d["resp_rates"]),
            viral_recorded_fraction=d["viral_recorded_fraction"],
            viral_category_weights=tuple(d["viral_category_weights"]),
            window=StudyWindow(**win),
            confound_weights=tuple(tuple(row) for row in d["confound_weights"]),
            signal_strength=d["signal_strength"],
            noise_scale=d["noise_scale"],
            feature_dim=d["feature_dim"],
            seed=d["seed"],
        )


# -- sampling ------------------------------------------------------------


def _choice(rng: np.random.Generator, weights: CategoricalWeights, size: int) -> list:
    idx = rng.choice(len(weights.categories), size=size, p=weights.probabilities())
    return [weights.categories[i] for i in idx]


def generate_dataset(config: GeneratorConfig) -> Dataset:
    """Draw a complete synthetic dataset.

    Every field block uses its own named substream of config.seed, so the
    same seed always yields byte-identical records regardless of platform
    or process, and changing one block's model leaves the others' draws
    untouched.
    """
    config.validate()
    n = config.n
    sp = config.symptom_profile

    positive = substream(config.seed, "status").random(n) < config.prevalence

    rng_sym = substream(config.seed, "symptoms")
    p_symp = np.where(positive, sp.p_symptomatic_positive, sp.p_symptomatic_negative)
    symptomatic = rng_sym.random(n) < p_symp

    flags: dict[str, np.ndarray] = {}
    for name in CORE_SYMPTOMS:
        p_pos, p_neg = sp.core_rates[name]
        p = np.where(positive, p_pos, p_neg)
        flags[name] = symptomatic & (rng_sym.random(n) < p)
    for name in _SHARED_SYMPTOMS:
        flags[name] = symptomatic & (rng_sym.random(n) < sp.shared_rates[name])
    p_ncc = np.where(flags["cough_any"], sp.ncc_given_cough, sp.ncc_given_no_cough)
    flags["new_continuous_cough"] = symptomatic & (rng_sym.random(n) < p_ncc)

    any_real = np.zeros(n, dtype=bool)
    for name in REAL_SYMPTOM_FIELDS:
        any_real |= flags[name]
    # Symptomatic records must carry at least one concrete symptom.
    flags["other_symptom"] = flags["other_symptom"] | (symptomatic & ~any_real)
    flags["no_symptoms"] = ~symptomatic
    flags["prefer_not_to_say"] = np.zeros(n, dtype=bool)

    p_tandt = config.recruitment_odds.probability(positive, symptomatic)
    tandt = substream(config.seed, "source").random(n) < p_tandt

    rng_age = substream(config.seed, "age")
    ap = config.age_params
    mean = np.where(positive, ap.positive_mean, ap.negative_mean)
    sd = np.where(positive, ap.positive_sd, ap.negative_sd)
    age = np.clip(np.rint(rng_age.normal(mean, sd)), ap.min_age, ap.max_age).astype(np.int64)

    gender = _choice(substream(config.seed, "gender"), config.gender_weights, n)
    ethnicity = _choice(substream(config.seed, "ethnicity"), config.ethnicity_weights, n)
    language = _choice(substream(config.seed, "language"), config.language_weights, n)
    smoker = _choice(substream(config.seed, "smoker"), config.smoker_weights, n)
    height_bin = _choice(substream(config.seed, "height"), config.height_weights, n)
    weight_bin = _choice(substream(config.seed, "weight"), config.weight_weights, n)

    rng_resp = substream(config.seed, "respiratory")
    asthma = rng_resp.random(n) < config.resp_rates[0]
    copd = rng_resp.random(n) < config.resp_rates[1]
    other_resp = rng_resp.random(n) < config.resp_rates[2]
    none_resp = ~(asthma | copd | other_resp)

    rng_auth = substream(config.seed, "authority")
    base_w = config.authority_weights.probabilities()
    tilt = np.array(
        [config.authority_positive_tilt.get(a, 1.0) for a in config.authority_weights.categories],
        dtype=np.float64,
    )
    w_pos = base_w * tilt
    w_pos /= w_pos.sum()
    auth_idx = np.zeros(n, dtype=np.int64)
    n_pos = int(positive.sum())
    auth_idx[positive] = rng_auth.choice(len(base_w), size=n_pos, p=w_pos)
    auth_idx[~positive] = rng_auth.choice(len(base_w), size=n - n_pos, p=base_w)
    authority = [config.authority_weights.categories[i] for i in auth_idx]

    rng_viral = substream(config.seed, "viral")
    recorded = positive & (rng_viral.random(n) < config.viral_recorded_fraction)
    cat_order = (ViralLoad.HIGH, ViralLoad.MEDIUM, ViralLoad.LOW)
    p_cat = np.asarray(config.viral_category_weights, dtype=np.float64)
    p_cat /= p_cat.sum()
    cat_idx = rng_viral.choice(3, size=n, p=p_cat)
    viral = [cat_order[cat_idx[i]] if recorded[i] else ViralLoad.UNRECORDED for i in range(n)]

    rng_dates = substream(config.seed, "dates")
    days = np.arange(config.window.n_days())
    test_off = np.zeros(n, dtype=np.int64)
    n_tandt = int(tandt.sum())
    test_off[tandt] = rng_dates.choice(days, size=n_tandt, p=config.window.tandt_day_weights())
    test_off[~tandt] = rng_dates.choice(days, size=n - n_tandt, p=config.window.react_day_weights())
    delay = rng_dates.integers(0, config.window.max_delay_days + 1, size=n)

    z = np.zeros((n, len(AUDIO_CHANNELS)), dtype=np.float64)
    for j, name in enumerate(SYMPTOM_FIELDS):
        z[:, j] = flags[name].astype(np.float64)
    z[:, len(SYMPTOM_FIELDS)] = (age - ap.reference_mean) / ap.reference_sd
    z[:, len(SYMPTOM_FIELDS) + 1] = tandt.astype(np.float64)

    w_mat = np.asarray(config.confound_weights, dtype=np.float64)
    direction = substream(config.seed, "signal").normal(size=config.feature_dim)
    norm = float(np.linalg.norm(direction))
    if norm > 0:
        direction /= norm
    noise = substream(config.seed, "noise").normal(size=(n, config.feature_dim))
    audio = z @ w_mat.T + np.outer(
        positive.astype(np.float64) * config.signal_strength, direction
    )
    audio += config.noise_scale * noise

    width = max(6, len(str(n - 1)))
    records = []
    for i in range(n):
        t_date = config.window.start + timedelta(days=int(test_off[i]))
        sym_kwargs = {name: bool(flags[name][i]) for name in SYMPTOM_FIELDS}
        records.append(
            SubmissionRecord(
                id=f"r{i:0{width}d}",
                age=int(age[i]),
                gender=Gender(gender[i]),
                ethnicity=ethnicity[i],
                first_language=language[i],
                local_authority=authority[i],
                recruitment_source=RecruitmentSource.TEST_AND_TRACE
                if tandt[i]
                else RecruitmentSource.REACT,
                covid_status=CovidStatus.POSITIVE if positive[i] else CovidStatus.NEGATIVE,
                asthma=bool(asthma[i]),
                copd=bool(copd[i]),
                other_resp=bool(other_resp[i]),
                none_resp=bool(none_resp[i]),
                smoker_status=SmokerStatus(smoker[i]),
                height_bin=height_bin[i],
                weight_bin=weight_bin[i],
                viral_load=viral[i],
                test_date=t_date,
                submission_date=t_date + timedelta(days=int(delay[i])),
                test_type=TestType.PCR,
                lab_under_investigation=False,
                metadata_complete=True,
                audio_features=tuple(float(v) for v in audio[i]),
                **sym_kwargs,
            )
        )
    return Dataset(
        records=tuple(records),
        feature_dim=config.feature_dim,
        provenance=f"generate(seed={config.seed}, n={n})",
    )


# -- default configuration ------------------------------------------------


def zero_confound_weights(feature_dim: int) -> tuple:
    """All-zero W: audio carries no covariate read-out at all."""
    return tuple(tuple(0.0 for _ in AUDIO_CHANNELS) for _ in range(feature_dim))


# Per-channel scales of the default W. Only channels that the matched-set
# design can actually balance carry weight, so exact matching provably
# removes the confounded part of the audio signal. Channels absent here
# contribute nothing.
DEFAULT_CHANNEL_SCALES: dict = {
    "cough_any": 0.70,
    "sore_throat": 0.45,
    "shortness_of_breath": 0.50,
    "runny_blocked_nose": 0.45,
    "no_symptoms": 0.90,
    "age": 0.55,
    "recruitment_source": 1.00,
}


def mimic_confound_weights(seed: int, feature_dim: int, scales: dict | None = None) -> tuple:
    """W whose column for channel c is scale_c times a fixed unit vector."""
    if scales is None:
        scales = DEFAULT_CHANNEL_SCALES
    rng = substream(seed, "confound-weights")
    w = np.zeros((feature_dim, len(AUDIO_CHANNELS)))
    for j, name in enumerate(AUDIO_CHANNELS):
        u = rng.normal(size=feature_dim)
        u /= np.linalg.norm(u)
        w[:, j] = scales.get(name, 0.0) * u
    return tuple(tuple(float(v) for v in row) for row in w)


def _authority_names(count: int) -> tuple:
    return tuple(f"LA-{i + 1:03d}" for i in range(count))


def _authority_weight_values(count: int) -> tuple:
    raw = [(i + 25.0) ** -0.5 for i in range(count)]
    total = sum(raw)
    return tuple(v / total for v in raw)


def default_paper_mimic_config(
    seed: int, n: int = 37018, feature_dim: int = 24
) -> GeneratorConfig:
    """The stock confounded-study configuration.

    Calibrated so the generated population reproduces the headline
    marginals of a large case-control respiratory audio study: roughly
    35.7% positives, ~96.6% of positives symptomatic versus ~23.3% of
    negatives, recruitment source almost deterministic given status and
    symptoms, a twelve-year median age gap between cases and controls, and
    viral load recorded for about 62% of positives.
    """
    authorities = _authority_names(160)
    tilt = {
        "LA-001": 1.8,
        "LA-002": 0.5,
        "LA-003": 1.6,
        "LA-004": 0.6,
        "LA-005": 1.5,
        "LA-006": 0.7,
    }
    return GeneratorConfig(
        n=n,
        prevalence=13199.0 / 37018.0,
        recruitment_odds=RecruitmentOdds(
            positive_symptomatic=0.991924,
            positive_asymptomatic=0.863229,
            negative_symptomatic=0.109228,
            negative_asymptomatic=0.019484,
        ),
        symptom_profile=SymptomProfile(
            p_symptomatic_positive=0.966210,
            p_symptomatic_negative=0.232924,
            core_rates={
                "cough_any": (0.62, 0.36),
                "sore_throat": (0.42, 0.56),
                "shortness_of_breath": (0.26, 0.12),
                "runny_blocked_nose": (0.52, 0.64),
            },
            shared_rates={
                "fatigue": 0.45,
                "headache": 0.50,
                "smell_taste_change": 0.18,
                "fever": 0.16,
                "loss_of_taste": 0.14,
                "diarrhoea": 0.07,
                "abdominal_pain": 0.05,
                "other_symptom": 0.12,
            },
            ncc_given_cough=0.55,
            ncc_given_no_cough=0.03,
        ),
        age_params=AgeParams(
            positive_mean=43.0,
            positive_sd=9.0,
            negative_mean=55.0,
            negative_sd=9.0,
        ),
        gender_weights=CategoricalWeights(
            categories=(
                Gender.FEMALE.value,
                Gender.MALE.value,
                Gender.OTHER.value,
                Gender.PREFER_NOT_TO_SAY.value,
            ),
            weights=(0.5778, 0.4042, 0.010, 0.008),
        ),
        ethnicity_weights=CategoricalWeights(
            categories=(
                "White British",
                "White Other",
                "Indian",
                "Pakistani",
                "Black African",
                "Black Caribbean",
                "Chinese",
                "Mixed",
                "Other",
            ),
            weights=(0.960, 0.0105, 0.0060, 0.0050, 0.0040, 0.0035, 0.0030, 0.0045, 0.0035),
        ),
        language_weights=CategoricalWeights(
            categories=(
                "English",
                "Polish",
                "Urdu",
                "Punjabi",
                "Bengali",
                "Gujarati",
                "Welsh",
                "French",
                "Romanian",
                "Portuguese",
            ),
            weights=(0.970, 0.0050, 0.0042, 0.0036, 0.0034, 0.0030, 0.0030, 0.0028, 0.0026, 0.0024),
        ),
        authority_weights=CategoricalWeights(
            categories=authorities,
            weights=_authority_weight_values(160),
        ),
        authority_positive_tilt=tilt,
        smoker_weights=CategoricalWeights(
            categories=(
                SmokerStatus.NEVER.value,
                SmokerStatus.EX.value,
                SmokerStatus.CURRENT.value,
                SmokerStatus.PREFER_NOT_TO_SAY.value,
            ),
            weights=(0.62, 0.26, 0.10, 0.02),
        ),
        height_weights=CategoricalWeights(
            categories=tuple(HEIGHT_BINS),
            weights=(0.03, 0.12, 0.30, 0.32, 0.18, 0.05),
        ),
        weight_weights=CategoricalWeights(
            categories=tuple(WEIGHT_BINS),
            weights=(0.04, 0.18, 0.32, 0.27, 0.13, 0.06),
        ),
        resp_rates=(0.13, 0.025, 0.03),
        viral_recorded_fraction=0.62,
        viral_category_weights=(0.40, 0.34, 0.26),
        window=StudyWindow(
            start=date(2021, 3, 1),
            end=date(2021, 11, 29),
            react_rounds=((10, 18), (72, 18), (134, 18), (196, 18), (252, 18)),
            tandt_bumps=((130.0, 28.0, 2.0), (225.0, 22.0, 3.0)),
        ),
        confound_weights=mimic_confound_weights(seed, feature_dim),
        signal_strength=0.0,
        noise_scale=1.0,
        feature_dim=feature_dim,
        seed=seed,
    )
