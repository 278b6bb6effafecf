"""Matching tests: stratum keys, the min rule, and exact balance."""

import dataclasses
import json

from matchbench.matching import (
    AGE_BIN_WIDTH,
    MATCHING_VARIABLES,
    MatchedSet,
    StratumKey,
    build_matched_set,
    stratum_key,
)
from matchbench.records import CovidStatus, Gender, RecruitmentSource

from helpers import make_dataset, make_record, random_records


def test_stratum_key_age_bins():
    assert stratum_key(make_record(age=29)).age_bin == 2
    assert stratum_key(make_record(age=30)).age_bin == 3
    assert stratum_key(make_record(age=39)).age_bin == 3
    assert stratum_key(make_record(age=30)) == stratum_key(make_record(age=39))
    assert stratum_key(make_record(age=29)) != stratum_key(make_record(age=30))


def test_stratum_key_covers_the_nine_variables():
    key = stratum_key(make_record())
    assert tuple(key.to_dict()) == MATCHING_VARIABLES
    assert AGE_BIN_WIDTH == 10


def test_fatigue_only_sets_symptom_flag_but_no_matched_bool():
    key = stratum_key(make_record(fatigue=True))
    assert key.at_least_one_symptom
    assert not (key.cough_any or key.sore_throat or key.shortness_of_breath)
    # and it differs from the fully asymptomatic stratum
    assert key != stratum_key(make_record())
    # but fatigue vs headache agree: neither is matched on directly
    assert key == stratum_key(make_record(headache=True))


def test_status_does_not_enter_the_key():
    a = stratum_key(make_record(covid_status=CovidStatus.POSITIVE))
    b = stratum_key(make_record())
    assert a == b


def _group(ds):
    strata = {}
    for r in ds:
        side = "pos" if r.covid_status is CovidStatus.POSITIVE else "neg"
        strata.setdefault(stratum_key(r), {"pos": [], "neg": []})[side].append(r.id)
    return strata


def test_min_rule_and_balance_on_random_records():
    ds = make_dataset(random_records(seed=12, n=100))
    matched = build_matched_set(ds, seed=4)
    strata = _group(ds)
    for key, bucket in strata.items():
        m = min(len(bucket["pos"]), len(bucket["neg"]))
        sel_pos = [i for i in bucket["pos"] if i in matched.selected_ids]
        sel_neg = [i for i in bucket["neg"] if i in matched.selected_ids]
        assert len(sel_pos) == len(sel_neg) == m
        if m:
            assert matched.stratum_counts[key] == (m, m)
        else:
            assert key not in matched.stratum_counts
    assert matched.size == 2 * sum(v[0] for v in matched.stratum_counts.values())


def test_four_strata_hand_fixture():
    recs = []
    # stratum A: ages 30-39 female, 3 pos / 2 neg -> 2+2
    for i in range(3):
        recs.append(make_record(id=f"ap{i}", age=35, covid_status=CovidStatus.POSITIVE))
    for i in range(2):
        recs.append(make_record(id=f"an{i}", age=31))
    # stratum B: ages 40-49 female, 1 pos / 4 neg -> 1+1
    recs.append(make_record(id="bp0", age=44, covid_status=CovidStatus.POSITIVE))
    for i in range(4):
        recs.append(make_record(id=f"bn{i}", age=49))
    # stratum C: male coughers, 2 pos / 0 neg -> dropped
    for i in range(2):
        recs.append(
            make_record(
                id=f"cp{i}", gender=Gender.MALE, cough_any=True,
                covid_status=CovidStatus.POSITIVE,
            )
        )
    # stratum D: REACT, 1 pos / 1 neg -> 1+1
    recs.append(
        make_record(
            id="dp0", recruitment_source=RecruitmentSource.REACT,
            covid_status=CovidStatus.POSITIVE,
        )
    )
    recs.append(make_record(id="dn0", recruitment_source=RecruitmentSource.REACT))

    matched = build_matched_set(make_dataset(recs), seed=0)
    assert matched.size == 8
    assert "bp0" in matched.selected_ids
    assert {"dp0", "dn0"} <= matched.selected_ids
    assert not any(i.startswith("cp") for i in matched.selected_ids)
    assert {"an0", "an1"} <= matched.selected_ids
    by_m = {tuple(sorted(k.to_dict().items())): v for k, v in matched.stratum_counts.items()}
    assert sorted(v for v in by_m.values()) == [(1, 1), (1, 1), (2, 2)]


def test_exact_balance_across_seeds():
    ds = make_dataset(random_records(seed=33, n=150))
    for seed in range(20):
        matched = build_matched_set(ds, seed=seed)
        subset = matched.dataset(ds)
        pos_keys = sorted(
            str(stratum_key(r).to_dict())
            for r in subset
            if r.covid_status is CovidStatus.POSITIVE
        )
        neg_keys = sorted(
            str(stratum_key(r).to_dict())
            for r in subset
            if r.covid_status is CovidStatus.NEGATIVE
        )
        assert pos_keys == neg_keys  # multiset equality over the nine variables


def test_matching_is_deterministic_and_seed_sensitive():
    ds = make_dataset(random_records(seed=2, n=200))
    a = build_matched_set(ds, seed=7)
    b = build_matched_set(ds, seed=7)
    assert a.selected_ids == b.selected_ids
    assert a.stratum_counts == b.stratum_counts
    c = build_matched_set(ds, seed=8)
    assert c.selected_ids != a.selected_ids
    assert c.size == a.size  # only the within-stratum draws change


def test_empty_result_warns_instead_of_raising():
    recs = [
        make_record(id="p0", covid_status=CovidStatus.POSITIVE, age=25),
        make_record(id="n0", age=75),
    ]
    matched = build_matched_set(make_dataset(recs), seed=0)
    assert matched.size == 0
    assert matched.selected_ids == frozenset()
    assert matched.warnings
    assert "empty" in matched.warnings[0]


def test_matched_dataset_preserves_input_order():
    ds = make_dataset(random_records(seed=9, n=80))
    matched = build_matched_set(ds, seed=1)
    subset = matched.dataset(ds)
    assert [r.id for r in subset] == [r.id for r in ds if r.id in matched.selected_ids]
    assert "matched" in subset.provenance


def test_ids_csv_and_balance_table():
    ds = make_dataset(random_records(seed=5, n=60))
    matched = build_matched_set(ds, seed=2)
    lines = matched.to_ids_csv().splitlines()
    assert lines[0] == "id"
    assert lines[1:] == sorted(matched.selected_ids)
    rows = json.loads(matched.balance_table_json())
    assert len(rows) == len(matched.stratum_counts)
    for row in rows:
        assert row["selected_positives"] == row["selected_negatives"] > 0
        assert set(MATCHING_VARIABLES) < set(row)


def test_matched_set_shrinks_with_sparser_strata():
    # spreading ages over more bins strictly reduces matchable pairs
    tight = make_dataset(
        [
            make_record(
                id=f"t{i}",
                age=30 + (i % 5),
                covid_status=CovidStatus.POSITIVE if i % 2 else CovidStatus.NEGATIVE,
            )
            for i in range(40)
        ]
    )
    spread = make_dataset(
        [
            make_record(
                id=f"s{i}",
                age=18 + ((7 * i) % 70),
                covid_status=CovidStatus.POSITIVE if i % 2 else CovidStatus.NEGATIVE,
            )
            for i in range(40)
        ]
    )
    assert build_matched_set(tight, seed=0).size >= build_matched_set(spread, seed=0).size
