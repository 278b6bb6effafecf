"""Generator tests: determinism, validation, conditional rates, audio model."""

import dataclasses
import json

import numpy as np
import pytest

from matchbench.eligibility import apply_eligibility_filter, exclusion_reason
from matchbench.generator import (
    AUDIO_CHANNELS,
    DEFAULT_CHANNEL_SCALES,
    ConfigError,
    GeneratorConfig,
    RecruitmentOdds,
    default_paper_mimic_config,
    generate_dataset,
    mimic_confound_weights,
    zero_confound_weights,
)
from matchbench.records import (
    REAL_SYMPTOM_FIELDS,
    SYMPTOM_FIELDS,
    CovidStatus,
    RecruitmentSource,
    ViralLoad,
)

from helpers import small_mimic_config


def test_generation_is_deterministic():
    cfg = small_mimic_config(seed=7, n=400, feature_dim=6)
    a = generate_dataset(cfg)
    b = generate_dataset(cfg)
    assert len(a) == len(b) == 400
    for ra, rb in zip(a, b):
        assert ra == rb  # bit-exact, audio floats included


def test_seed_changes_output():
    a = generate_dataset(small_mimic_config(seed=1, n=200))
    b = generate_dataset(small_mimic_config(seed=2, n=200))
    assert any(ra != rb for ra, rb in zip(a, b))


def test_validation_collects_all_errors():
    cfg = small_mimic_config(seed=0, n=100)
    bad = dataclasses.replace(
        cfg,
        prevalence=1.5,
        noise_scale=-1.0,
        confound_weights=((0.0, 0.0), (0.0, 0.0)),
        signal_strength=-0.5,
    )
    with pytest.raises(ConfigError) as exc:
        generate_dataset(bad)
    msgs = exc.value.errors
    assert len(msgs) >= 4
    joined = "\n".join(msgs)
    assert "prevalence" in joined
    assert "noise_scale" in joined
    assert "confound_weights" in joined
    assert "signal_strength" in joined


def test_recruitment_odds_helpers():
    odds = RecruitmentOdds.from_status_only(0.9, 0.1)
    assert odds.positive_symptomatic == odds.positive_asymptomatic == 0.9
    pos = np.array([True, True, False, False])
    symp = np.array([True, False, True, False])
    full = RecruitmentOdds(0.9, 0.8, 0.2, 0.1)
    assert full.probability(pos, symp).tolist() == [0.9, 0.8, 0.2, 0.1]


def test_config_round_trips_through_json():
    cfg = small_mimic_config(seed=11, n=300, feature_dim=5)
    restored = GeneratorConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert restored == cfg
    a = generate_dataset(cfg)
    b = generate_dataset(restored)
    assert all(ra == rb for ra, rb in zip(a, b))


def test_all_generated_records_are_eligible():
    ds = generate_dataset(small_mimic_config(seed=3, n=1000))
    assert all(exclusion_reason(r) is None for r in ds)
    kept, report = apply_eligibility_filter(ds)
    assert report.surviving == 1000
    assert report.counts == {}


def test_symptom_flags_are_internally_consistent():
    ds = generate_dataset(small_mimic_config(seed=5, n=1500))
    for r in ds:
        real = [s for s in REAL_SYMPTOM_FIELDS if getattr(r, s)]
        assert not r.prefer_not_to_say
        if r.no_symptoms:
            assert not real
        else:
            assert real  # symptomatic records carry at least one concrete flag


def test_conditional_rates_match_configuration():
    cfg = default_paper_mimic_config(seed=13, n=20000, feature_dim=8)
    ds = generate_dataset(cfg)
    pos = np.array([r.covid_status is CovidStatus.POSITIVE for r in ds])
    symp = np.array([not r.no_symptoms for r in ds])
    tandt = np.array([r.recruitment_source is RecruitmentSource.TEST_AND_TRACE for r in ds])
    sp = cfg.symptom_profile

    # binomial sd at n=20000 is under 0.004, so 0.02 is a > 5 sigma margin
    assert abs(pos.mean() - cfg.prevalence) < 0.02
    assert abs(symp[pos].mean() - sp.p_symptomatic_positive) < 0.02
    assert abs(symp[~pos].mean() - sp.p_symptomatic_negative) < 0.02

    odds = cfg.recruitment_odds
    cells = [
        (pos & symp, odds.positive_symptomatic),
        (pos & ~symp, odds.positive_asymptomatic),
        (~pos & symp, odds.negative_symptomatic),
        (~pos & ~symp, odds.negative_asymptomatic),
    ]
    for mask, expected in cells:
        assert mask.sum() > 100
        assert abs(tandt[mask].mean() - expected) < 0.04

    cough = np.array([r.cough_any for r in ds])
    p_pos, p_neg = sp.core_rates["cough_any"]
    assert abs(cough[pos & symp].mean() - p_pos) < 0.03
    assert abs(cough[~pos & symp].mean() - p_neg) < 0.03
    assert not cough[~symp].any()


def _reconstruct_channels(r, age_params) -> np.ndarray:
    z = np.zeros(len(AUDIO_CHANNELS))
    for j, name in enumerate(SYMPTOM_FIELDS):
        z[j] = float(getattr(r, name))
    z[len(SYMPTOM_FIELDS)] = (r.age - age_params.reference_mean) / age_params.reference_sd
    z[len(SYMPTOM_FIELDS) + 1] = float(
        r.recruitment_source is RecruitmentSource.TEST_AND_TRACE
    )
    return z


def test_noise_free_audio_is_exactly_linear_in_channels():
    # with noise_scale=0 the audio must equal W z + beta [positive] v exactly
    base = small_mimic_config(seed=21, n=250, feature_dim=7)
    cfg = dataclasses.replace(
        base,
        noise_scale=0.0,
        signal_strength=1.75,
        confound_weights=mimic_confound_weights(21, 7),
    )
    ds = generate_dataset(cfg)
    w = np.array(cfg.confound_weights)
    from matchbench.seeding import substream

    direction = substream(cfg.seed, "signal").normal(size=cfg.feature_dim)
    direction /= np.linalg.norm(direction)
    for r in ds:
        z = _reconstruct_channels(r, cfg.age_params)
        expected = w @ z
        if r.covid_status is CovidStatus.POSITIVE:
            expected = expected + cfg.signal_strength * direction
        np.testing.assert_allclose(np.array(r.audio_features), expected, rtol=0, atol=1e-12)


def test_zero_weights_zero_signal_zero_noise_gives_silent_audio():
    cfg = dataclasses.replace(
        small_mimic_config(seed=2, n=60, feature_dim=4),
        noise_scale=0.0,
        signal_strength=0.0,
        confound_weights=zero_confound_weights(4),
    )
    for r in generate_dataset(cfg):
        assert all(v == 0.0 for v in r.audio_features)


def test_viral_load_recorded_for_positives_only():
    cfg = default_paper_mimic_config(seed=17, n=8000, feature_dim=4)
    ds = generate_dataset(cfg)
    neg = [r for r in ds if r.covid_status is CovidStatus.NEGATIVE]
    assert all(r.viral_load is ViralLoad.UNRECORDED for r in neg)
    pos = [r for r in ds if r.covid_status is CovidStatus.POSITIVE]
    recorded = [r for r in pos if r.viral_load is not ViralLoad.UNRECORDED]
    assert abs(len(recorded) / len(pos) - cfg.viral_recorded_fraction) < 0.03


def test_dates_stay_inside_window_with_bounded_delay():
    cfg = small_mimic_config(seed=9, n=800)
    ds = generate_dataset(cfg)
    for r in ds:
        assert cfg.window.start <= r.test_date <= cfg.window.end
        delay = (r.submission_date - r.test_date).days
        assert 0 <= delay <= cfg.window.max_delay_days


def test_ages_respect_bounds():
    cfg = small_mimic_config(seed=31, n=3000)
    ages = [r.age for r in generate_dataset(cfg)]
    assert min(ages) >= cfg.age_params.min_age
    assert max(ages) <= cfg.age_params.max_age


def test_mimic_weight_columns_have_configured_norms():
    w = np.array(mimic_confound_weights(5, 12))
    assert w.shape == (12, len(AUDIO_CHANNELS))
    for j, name in enumerate(AUDIO_CHANNELS):
        norm = np.linalg.norm(w[:, j])
        np.testing.assert_allclose(norm, DEFAULT_CHANNEL_SCALES.get(name, 0.0), atol=1e-12)
    assert np.array(zero_confound_weights(3)).sum() == 0.0


def test_authority_tilt_shifts_positive_mix():
    cfg = default_paper_mimic_config(seed=23, n=30000, feature_dim=4)
    ds = generate_dataset(cfg)
    share = {}
    for status in (CovidStatus.POSITIVE, CovidStatus.NEGATIVE):
        rows = [r for r in ds if r.covid_status is status]
        share[status] = sum(r.local_authority == "LA-001" for r in rows) / len(rows)
    # LA-001 carries a 1.8x positive tilt in the stock config
    assert share[CovidStatus.POSITIVE] > 1.3 * share[CovidStatus.NEGATIVE]


def test_ids_are_unique_and_sequential():
    ds = generate_dataset(small_mimic_config(seed=1, n=25))
    assert [r.id for r in ds] == [f"r{i:06d}" for i in range(25)]
