"""Per-contributor contribution metrics.

A repo-individual is one (login, repository) pair. Each of the six interaction
types yields a repository contribution (RC): the percentage of the repo's
interactions of that type made by this individual. The ten clustering features
are the six RCs, their mean (MRC), net created-minus-closed issues, the share
of all interactions, and the share of interaction days.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, timezone
from pathlib import Path
from typing import Iterable, Union

from .errors import DataValidationError
from .github import is_bot_login
from .models import ALL_KINDS, InteractionKind, InteractionSet, RepoSlug

FEATURE_NAMES: tuple[str, ...] = (
    "rc_commits_created",
    "rc_issues_created",
    "rc_issues_closed",
    "rc_issues_assigned",
    "rc_prs_created",
    "rc_prs_closed",
    "mrc",
    "pct_created_minus_closed_issues",
    "pct_sum_n_interactions",
    "pct_interaction_days",
)

_RC_KIND_ORDER: tuple[InteractionKind, ...] = (
    InteractionKind.COMMIT_CREATED,
    InteractionKind.ISSUE_CREATED,
    InteractionKind.ISSUE_CLOSED,
    InteractionKind.ISSUE_ASSIGNED,
    InteractionKind.PR_CREATED,
    InteractionKind.PR_CLOSED,
)


@dataclass(frozen=True)
class RepoIndividual:
    repo: RepoSlug
    login: str
    counts: dict[InteractionKind, int]
    active_dates: frozenset[date]
    is_bot_flagged: bool = False

    def __post_init__(self):
        if set(self.counts) != set(ALL_KINDS):
            raise DataValidationError("counts must have exactly the six kinds")
        if not any(v > 0 for v in self.counts.values()):
            raise DataValidationError("a repo-individual needs at least one interaction")
        if not self.active_dates:
            raise DataValidationError("active_dates must be non-empty")

    @property
    def n_interactions(self) -> int:
        return sum(self.counts.values())

    @property
    def n_interaction_days(self) -> int:
        return len(self.active_dates)


@dataclass(frozen=True)
class RepoTotals:
    repo: RepoSlug
    totals: dict[InteractionKind, int]
    sum_interactions: int
    sum_individual_interaction_days: int

    def __post_init__(self):
        if self.sum_interactions != sum(self.totals.values()):
            raise DataValidationError("sum_interactions must equal the kind totals")
        if any(v < 0 for v in self.totals.values()):
            raise DataValidationError("totals must be >= 0")


@dataclass(frozen=True)
class MetricVector:
    rc_commits_created: float
    rc_issues_created: float
    rc_issues_closed: float
    rc_issues_assigned: float
    rc_prs_created: float
    rc_prs_closed: float
    mrc: float
    pct_created_minus_closed_issues: float
    pct_sum_n_interactions: float
    pct_interaction_days: float
    uit: int
    repo: RepoSlug
    login: str
    is_bot_flagged: bool = False

    def features(self) -> tuple[float, ...]:
        """The ten clustering features in fixed order."""
        return (
            self.rc_commits_created,
            self.rc_issues_created,
            self.rc_issues_closed,
            self.rc_issues_assigned,
            self.rc_prs_created,
            self.rc_prs_closed,
            self.mrc,
            self.pct_created_minus_closed_issues,
            self.pct_sum_n_interactions,
            self.pct_interaction_days,
        )

    def rc_values(self) -> tuple[float, ...]:
        return self.features()[:6]


def build_repo_individuals(
    iset: InteractionSet,
    bot_deny_list: frozenset[str] = frozenset(),
) -> tuple[list[RepoIndividual], RepoTotals]:
    """Tally events into one RepoIndividual per distinct actor plus repo totals.

    Active dates are UTC calendar dates with at least one event. Individuals
    are returned sorted by login for deterministic downstream output.
    """
    counts: dict[str, dict[InteractionKind, int]] = {}
    dates: dict[str, set[date]] = {}
    for ev in iset.events:
        actor_counts = counts.setdefault(ev.actor, {k: 0 for k in ALL_KINDS})
        actor_counts[ev.kind] += 1
        dates.setdefault(ev.actor, set()).add(
            ev.timestamp.astimezone(timezone.utc).date()
        )

    individuals = [
        RepoIndividual(
            repo=iset.repo,
            login=login,
            counts=counts[login],
            active_dates=frozenset(dates[login]),
            is_bot_flagged=is_bot_login(login, bot_deny_list),
        )
        for login in sorted(counts)
    ]
    totals = {k: sum(c[k] for c in counts.values()) for k in ALL_KINDS}
    repo_totals = RepoTotals(
        repo=iset.repo,
        totals=totals,
        sum_interactions=sum(totals.values()),
        sum_individual_interaction_days=sum(len(d) for d in dates.values()),
    )
    return individuals, repo_totals


def compute_rc(individual_count: int, repo_total: int) -> float:
    """100 * count / total; a zero total maps to 0.0 by convention."""
    if individual_count > repo_total:
        raise DataValidationError(
            f"individual count {individual_count} exceeds repo total {repo_total}"
        )
    if repo_total == 0:
        return 0.0
    return 100.0 * individual_count / repo_total


def compute_mrc(six_rcs: Iterable[float]) -> float:
    """Arithmetic mean of the six RCs; absent types count as zero."""
    rcs = tuple(six_rcs)
    if len(rcs) != 6:
        raise DataValidationError(f"expected 6 RC values, got {len(rcs)}")
    return sum(rcs) / 6


def compute_uit(counts: dict[InteractionKind, int]) -> int:
    """Number of interaction kinds with a nonzero count."""
    if set(counts) != set(ALL_KINDS):
        raise DataValidationError("counts must have exactly the six kinds")
    return sum(1 for v in counts.values() if v > 0)


def compute_pct_interaction_days(individual_days: int,
                                 sum_all_individuals_days: int) -> float:
    if sum_all_individuals_days == 0:
        return 0.0
    return 100.0 * individual_days / sum_all_individuals_days


def compute_net_created_closed(rc_created: float, rc_closed: float) -> float:
    """Signed net share; negative means a net closer."""
    return rc_created - rc_closed


def compute_net_pr_balance(v: MetricVector) -> float:
    """Derived, reported but never clustered: created minus closed PR share."""
    return v.rc_prs_created - v.rc_prs_closed


def assemble_metric_vectors(individuals: list[RepoIndividual],
                            totals: RepoTotals) -> list[MetricVector]:
    """Compute the ten-feature vector for every individual of one repo."""
    vectors = []
    for ind in individuals:
        if ind.repo != totals.repo:
            raise DataValidationError(
                f"individual repo {ind.repo} does not match totals repo {totals.repo}"
            )
        rcs = tuple(
            compute_rc(ind.counts[k], totals.totals[k]) for k in _RC_KIND_ORDER
        )
        vectors.append(MetricVector(
            rc_commits_created=rcs[0],
            rc_issues_created=rcs[1],
            rc_issues_closed=rcs[2],
            rc_issues_assigned=rcs[3],
            rc_prs_created=rcs[4],
            rc_prs_closed=rcs[5],
            mrc=compute_mrc(rcs),
            pct_created_minus_closed_issues=compute_net_created_closed(rcs[1], rcs[2]),
            pct_sum_n_interactions=compute_rc(ind.n_interactions,
                                              totals.sum_interactions),
            pct_interaction_days=compute_pct_interaction_days(
                ind.n_interaction_days, totals.sum_individual_interaction_days
            ),
            uit=compute_uit(ind.counts),
            repo=ind.repo,
            login=ind.login,
            is_bot_flagged=ind.is_bot_flagged,
        ))
    return vectors


METRICS_CSV_COLUMNS: tuple[str, ...] = FEATURE_NAMES + ("repo", "login", "uit", "is_bot")


def write_metrics_csv(vectors: list[MetricVector], path: Union[str, Path]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_CSV_COLUMNS)
        for v in vectors:
            writer.writerow([
                *(repr(x) for x in v.features()),
                str(v.repo),
                v.login,
                v.uit,
                "true" if v.is_bot_flagged else "false",
            ])


def read_metrics_csv(path: Union[str, Path]) -> list[MetricVector]:
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != METRICS_CSV_COLUMNS:
            raise DataValidationError(f"{path}: unexpected metrics CSV header")
        vectors = []
        for row in reader:
            feats = [float(x) for x in row[:10]]
            vectors.append(MetricVector(
                *feats,
                uit=int(row[12]),
                repo=RepoSlug.parse(row[10]),
                login=row[11],
                is_bot_flagged=row[13] == "true",
            ))
    return vectors
