"""Machine-readable summary artifacts: totals, UpSet counts, composition.

All emitters use stable ordering so identical inputs give byte-identical
files; plot rendering is left to external tooling.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

from .errors import DataValidationError
from .metrics import RepoIndividual, _RC_KIND_ORDER
from .models import InteractionKind, RepoSlug


def interaction_totals(
    individuals: Sequence[RepoIndividual],
) -> dict[InteractionKind, tuple[int, float]]:
    """Per-kind counts and their percentage of all interactions."""
    totals = {k: 0 for k in _RC_KIND_ORDER}
    for ind in individuals:
        for kind, count in ind.counts.items():
            totals[kind] += count
    grand = sum(totals.values())
    return {
        kind: (count, 100.0 * count / grand if grand else 0.0)
        for kind, count in totals.items()
    }


@dataclass(frozen=True)
class UpSetTable:
    """Exact-combination counts keyed by a canonical sorted kind tuple."""

    counts: dict[tuple[str, ...], int]

    def __post_init__(self):
        if any(not key for key in self.counts):
            raise DataValidationError("the empty combination must never appear")


def upset_counts(individuals: Sequence[RepoIndividual],
                 min_fraction: float = 0.0) -> UpSetTable:
    """Count individuals per exact combination of nonzero interaction kinds.

    ``min_fraction`` optionally drops combinations below a display cutoff
    (expressed as a fraction of all individuals); the unfiltered table always
    sums to the individual count.
    """
    counts: dict[tuple[str, ...], int] = {}
    for ind in individuals:
        combo = tuple(
            k.value for k in _RC_KIND_ORDER if ind.counts[k] > 0
        )
        counts[combo] = counts.get(combo, 0) + 1
    if min_fraction > 0.0 and individuals:
        floor = min_fraction * len(individuals)
        counts = {c: n for c, n in counts.items() if n >= floor}
    return UpSetTable(counts=counts)


@dataclass(frozen=True)
class CompositionRow:
    repo: RepoSlug
    clusters_present: frozenset[int]
    n_individuals_per_cluster: dict[int, int]


def composition(
    individuals_with_labels: Sequence[tuple[RepoIndividual, int]],
) -> tuple[list[CompositionRow], float]:
    """Per-repo cluster presence plus the fraction of repos with >= 2 clusters."""
    per_repo: dict[RepoSlug, dict[int, int]] = {}
    for ind, label in individuals_with_labels:
        per_repo.setdefault(ind.repo, {}).setdefault(label, 0)
        per_repo[ind.repo][label] += 1
    rows = [
        CompositionRow(
            repo=repo,
            clusters_present=frozenset(clusters),
            n_individuals_per_cluster=dict(sorted(clusters.items())),
        )
        for repo, clusters in sorted(per_repo.items(), key=lambda kv: str(kv[0]))
    ]
    if not rows:
        return rows, 0.0
    mixed = sum(1 for r in rows if len(r.clusters_present) >= 2)
    return rows, mixed / len(rows)


# -- file emission --------------------------------------------------------


def write_totals_csv(totals: dict[InteractionKind, tuple[int, float]],
                     path: Union[str, Path]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["interaction_type", "count", "percentage"])
        for kind in _RC_KIND_ORDER:
            count, pct = totals[kind]
            writer.writerow([kind.value, count, repr(pct)])


def write_upset_json(table: UpSetTable, path: Union[str, Path]) -> None:
    entries = [
        {"combination": list(combo), "count": count}
        for combo, count in sorted(
            table.counts.items(), key=lambda kv: (-kv[1], kv[0])
        )
    ]
    obj = {"format": "persona-miner-upset", "version": 1, "combinations": entries}
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", "utf-8")


def write_composition_csv(rows: Sequence[CompositionRow], mixed_fraction: float,
                          path: Union[str, Path]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["repo", "clusters_present", "counts_per_cluster",
                         "mixed_fraction"])
        for i, row in enumerate(rows):
            writer.writerow([
                str(row.repo),
                ";".join(str(c) for c in sorted(row.clusters_present)),
                ";".join(f"{c}:{n}" for c, n in row.n_individuals_per_cluster.items()),
                repr(mixed_fraction) if i == 0 else "",
            ])


def write_labels_csv(rows: Sequence[tuple[RepoSlug, str, int, int]],
                     path: Union[str, Path]) -> None:
    """Rows are (repo, login, cluster, subcluster)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["repo", "login", "cluster", "subcluster"])
        for repo, login, cluster, sub in rows:
            writer.writerow([str(repo), login, cluster, sub])
