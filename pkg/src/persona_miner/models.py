"""Core domain types for mined repository interaction data.

Everything here is an immutable value object; instances are safe to share
between threads and to round-trip through the archive format.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Optional

from .errors import DataValidationError


class InteractionKind(str, Enum):
    """The six interaction types counted per repo-individual."""

    COMMIT_CREATED = "CommitCreated"
    ISSUE_CREATED = "IssueCreated"
    ISSUE_CLOSED = "IssueClosed"
    ISSUE_ASSIGNED = "IssueAssigned"
    PR_CREATED = "PRCreated"
    PR_CLOSED = "PRClosed"


ALL_KINDS: tuple[InteractionKind, ...] = tuple(InteractionKind)


class Visibility(str, Enum):
    PUBLIC = "public"
    PRIVATE = "private"
    MISSING = "missing"


@dataclass(frozen=True)
class RepoSlug:
    """An owner/name pair identifying one GitHub repository."""

    owner: str
    name: str

    def __post_init__(self):
        if not self.owner or not self.name:
            raise DataValidationError("repo slug parts must be non-empty")
        if "/" in self.owner or "/" in self.name:
            raise DataValidationError("repo slug parts must not contain '/'")

    def __str__(self) -> str:
        return f"{self.owner}/{self.name}"

    @classmethod
    def parse(cls, text: str) -> "RepoSlug":
        owner, _, name = text.partition("/")
        return cls(owner, name)


@dataclass(frozen=True)
class ZenodoRecord:
    """One deposit record as returned by the Zenodo search API."""

    record_id: str
    resource_type: str
    access_right: str
    related_urls: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.record_id:
            raise DataValidationError("record_id must be non-empty")


@dataclass(frozen=True)
class RepoSummary:
    """Summary repository facts used by the eligibility criteria."""

    slug: RepoSlug
    visibility: Visibility
    unique_committers: int = 0
    license_id: Optional[str] = None
    languages: tuple[str, ...] = ()
    is_fork: bool = False
    created_at: Optional[datetime] = None
    age_days: int = 0
    default_branch: str = "main"

    def __post_init__(self):
        if self.age_days < 0:
            raise DataValidationError("age_days must be >= 0")
        if self.unique_committers < 0:
            raise DataValidationError("unique_committers must be >= 0")


@dataclass(frozen=True)
class CommitPayload:
    """Commit message and changed paths attached to a CommitCreated event."""

    message: str = ""
    changed_files: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.changed_files)) != len(self.changed_files):
            raise DataValidationError("changed_files must not contain duplicates")


@dataclass(frozen=True)
class InteractionEvent:
    """One timestamped actor/repo interaction of one of the six kinds."""

    repo: RepoSlug
    actor: str
    kind: InteractionKind
    timestamp: datetime
    subject_id: str
    payload: Optional[CommitPayload] = None

    def __post_init__(self):
        if not self.subject_id:
            raise DataValidationError("subject_id must be non-empty")
        if self.timestamp.tzinfo is None:
            raise DataValidationError("timestamps must be timezone-aware")


@dataclass(frozen=True)
class InteractionSet:
    """All events fetched for one repository."""

    repo: RepoSlug
    events: tuple[InteractionEvent, ...]
    fetched_at: datetime
    incomplete: bool = False

    def __post_init__(self):
        for ev in self.events:
            if ev.repo != self.repo:
                raise DataValidationError(
                    f"event repo {ev.repo} does not match set repo {self.repo}"
                )


def parse_utc(text: str) -> datetime:
    """Parse an ISO-8601 timestamp and normalize it to UTC."""
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def isoformat_utc(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")
