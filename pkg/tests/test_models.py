from datetime import datetime, timezone

import pytest

from persona_miner.errors import DataValidationError
from persona_miner.models import (
    ALL_KINDS,
    CommitPayload,
    InteractionEvent,
    InteractionKind,
    InteractionSet,
    RepoSlug,
    isoformat_utc,
    parse_utc,
)


def test_repo_slug_parse_and_str():
    slug = RepoSlug.parse("octo/project")
    assert slug == RepoSlug("octo", "project")
    assert str(slug) == "octo/project"


def test_repo_slug_rejects_bad_forms():
    for bad in ("no-slash", "a/b/c", "/x", "x/", ""):
        with pytest.raises(DataValidationError):
            RepoSlug.parse(bad)
    with pytest.raises(DataValidationError):
        RepoSlug("has/slash", "x")


def test_six_interaction_kinds():
    assert [k.value for k in ALL_KINDS] == [
        "CommitCreated", "IssueCreated", "IssueClosed", "IssueAssigned",
        "PRCreated", "PRClosed",
    ]


def test_event_requires_tz_aware_timestamp():
    with pytest.raises(DataValidationError):
        InteractionEvent(
            repo=RepoSlug("o", "r"), actor="ada",
            kind=InteractionKind.COMMIT_CREATED,
            timestamp=datetime(2023, 1, 1),  # naive
            subject_id="sha",
        )


def test_event_requires_subject():
    with pytest.raises(DataValidationError):
        InteractionEvent(
            repo=RepoSlug("o", "r"), actor="ada",
            kind=InteractionKind.COMMIT_CREATED,
            timestamp=datetime(2023, 1, 1, tzinfo=timezone.utc),
            subject_id="",
        )


def test_commit_payload_rejects_duplicate_files():
    with pytest.raises(DataValidationError):
        CommitPayload(message="m", changed_files=("a.py", "a.py"))


def test_interaction_set_same_repo_invariant():
    ev = InteractionEvent(
        repo=RepoSlug("other", "repo"), actor="ada",
        kind=InteractionKind.COMMIT_CREATED,
        timestamp=datetime(2023, 1, 1, tzinfo=timezone.utc), subject_id="s",
    )
    with pytest.raises(DataValidationError):
        InteractionSet(repo=RepoSlug("o", "r"), events=(ev,),
                       fetched_at=datetime(2024, 1, 1, tzinfo=timezone.utc))


def test_parse_utc_round_trip():
    ts = parse_utc("2023-05-01T10:30:00Z")
    assert ts.tzinfo is not None
    assert ts.astimezone(timezone.utc).hour == 10
    assert isoformat_utc(ts) == "2023-05-01T10:30:00Z"
