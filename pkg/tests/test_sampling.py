import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persona_miner.models import RepoSlug, RepoSummary, Visibility
from persona_miner.sampling import (
    CriteriaConfig,
    apply_inclusion_criteria,
    subsample,
    write_eligibility_report,
)


def _summary(**over):
    base = dict(
        slug=RepoSlug("org", "repo"),
        visibility=Visibility.PUBLIC,
        unique_committers=50,
        license_id="MIT",
        languages=("Python",),
        is_fork=False,
        age_days=1500,
    )
    base.update(over)
    return RepoSummary(**base)


def test_all_criteria_pass():
    decision = apply_inclusion_criteria(_summary())
    assert decision.eligible
    assert decision.failed_criteria == ()


def test_below_min_committers():
    decision = apply_inclusion_criteria(_summary(unique_committers=5))
    assert not decision.eligible
    assert [cid for cid, _ in decision.failed_criteria] == ["min_committers"]


def test_fork_fails_criterion():
    decision = apply_inclusion_criteria(_summary(is_fork=True))
    assert [cid for cid, _ in decision.failed_criteria] == ["fork"]


def test_unknown_license_reason():
    decision = apply_inclusion_criteria(_summary(license_id="GPL-3.0"))
    assert decision.failed_criteria[0][0] == "license"
    assert "unrecognized" in decision.failed_criteria[0][1]


def test_language_passes_if_any_matches():
    decision = apply_inclusion_criteria(_summary(languages=("Haskell", "Python")))
    assert decision.eligible


def test_no_short_circuit_collects_all_failures():
    decision = apply_inclusion_criteria(_summary(
        visibility=Visibility.PRIVATE,
        unique_committers=500,
        license_id=None,
        languages=("Haskell",),
        is_fork=True,
        age_days=10,
    ))
    failed_ids = [cid for cid, _ in decision.failed_criteria]
    assert failed_ids == ["public", "max_committers", "license", "language",
                          "fork", "age"]


def test_seven_way_failure_fixture():
    # committers below min AND a private fork with everything else wrong:
    # six distinct criteria fire at once (min/max are mutually exclusive)
    decision = apply_inclusion_criteria(_summary(
        visibility=Visibility.MISSING,
        unique_committers=0,
        license_id=None,
        languages=(),
        is_fork=True,
        age_days=0,
    ))
    failed_ids = {cid for cid, _ in decision.failed_criteria}
    assert failed_ids == {"public", "min_committers", "license", "language",
                          "fork", "age"}


def test_purity():
    summary = _summary()
    cfg = CriteriaConfig()
    assert apply_inclusion_criteria(summary, cfg) == \
        apply_inclusion_criteria(summary, cfg)


def test_bad_config_rejected():
    with pytest.raises(ValueError):
        CriteriaConfig(min_committers=100, max_committers=10)


# -- subsample -------------------------------------------------------------

def _slugs(n):
    return [RepoSlug("org", f"repo{i:04d}") for i in range(n)]


def test_identity_fraction_returns_all_sorted():
    slugs = _slugs(10)[::-1]
    assert subsample(slugs, 1.0, seed=1) == sorted(slugs, key=str)


def test_determinism_same_seed():
    slugs = _slugs(100)
    assert subsample(slugs, 0.45, seed=7) == subsample(slugs, 0.45, seed=7)


def test_study_scale_floor():
    assert len(subsample(_slugs(2981), 0.45, seed=0)) == 1341


def test_empty_input():
    with pytest.raises(ValueError):
        subsample([], 0.0, seed=0)
    # fraction 1.0 of nothing is nothing
    assert subsample([], 1.0, seed=0) == []


@given(n=st.integers(min_value=0, max_value=300),
       fraction=st.floats(min_value=0.01, max_value=1.0),
       seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_subsample_size_and_subset_property(n, fraction, seed):
    slugs = _slugs(n)
    picked = subsample(slugs, fraction, seed)
    assert len(picked) == math.floor(fraction * n)
    assert len(set(map(str, picked))) == len(picked)
    assert set(map(str, picked)) <= set(map(str, slugs))


def test_eligibility_report_csv(tmp_path):
    decisions = [
        apply_inclusion_criteria(_summary()),
        apply_inclusion_criteria(_summary(is_fork=True)),
    ]
    out = tmp_path / "elig.csv"
    write_eligibility_report(decisions, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "repo,eligible,failed_criteria"
    assert lines[1].startswith("org/repo,true,")
    assert "fork" in lines[2]
