"""Persona reference profiles and nearest-centroid labeling.

Distances use only the six RC dimensions: MRC is derivable from them and
would double-weight the same information, and the other percentage features
have no published reference values.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import ConfigError, DataValidationError
from .metrics import MetricVector
from .models import RepoSlug

UNMATCHED = "Unmatched persona"
DEFAULT_UNMATCHED_DISTANCE = 25.0

INTERACTIVITY_LEVELS = ("Low", "Moderate", "High")


@dataclass(frozen=True)
class PersonaProfile:
    name: str
    interactivity: str
    centroid: tuple[float, ...]  # six RC reference means

    def __post_init__(self):
        if len(self.centroid) != 6:
            raise ConfigError("persona centroid must have six RC values")
        if any(not 0.0 <= v <= 100.0 for v in self.centroid):
            raise ConfigError("persona centroid values must be in [0, 100]")
        if self.interactivity not in INTERACTIVITY_LEVELS:
            raise ConfigError(f"unknown interactivity {self.interactivity!r}")


@dataclass(frozen=True)
class PersonaAssignment:
    repo: RepoSlug
    login: str
    persona: str
    distance: float
    cluster_path: Optional[tuple[int, int]] = None  # (initial cluster, sub-cluster)


def load_profiles(path: Optional[Union[str, Path]] = None) -> tuple[PersonaProfile, ...]:
    if path is not None:
        raw = json.loads(Path(path).read_text("utf-8"))
    else:
        raw = json.loads(
            resources.files("persona_miner.data")
            .joinpath("personas.json")
            .read_text("utf-8")
        )
    return tuple(
        PersonaProfile(
            name=p["name"],
            interactivity=p["interactivity"],
            centroid=tuple(float(v) for v in p["centroid"]),
        )
        for p in raw["profiles"]
    )


DEFAULT_PROFILES = load_profiles()


@dataclass(frozen=True)
class InteractivityRanking:
    """Cluster-to-level mapping; non-3-way clusterings carry raw ranks only."""

    standard: bool
    levels: Optional[dict[int, str]]  # cluster id -> Low/Moderate/High
    ranks: dict[int, int]  # cluster id -> ascending-MRC rank


def order_clusters_by_interactivity(
    cluster_mean_mrcs: dict[int, float],
    cluster_sizes: Optional[dict[int, int]] = None,
) -> InteractivityRanking:
    """Map ascending mean MRC onto Low < Moderate < High for exactly 3 clusters.

    Ties break by cluster size descending. Any other k yields a nonstandard
    result carrying raw ranks instead of named levels.
    """
    sizes = cluster_sizes or {}
    ordered = sorted(
        cluster_mean_mrcs,
        key=lambda c: (cluster_mean_mrcs[c], -sizes.get(c, 0), c),
    )
    ranks = {c: i for i, c in enumerate(ordered)}
    if len(ordered) != 3:
        return InteractivityRanking(standard=False, levels=None, ranks=ranks)
    levels = {c: INTERACTIVITY_LEVELS[i] for i, c in enumerate(ordered)}
    return InteractivityRanking(standard=True, levels=levels, ranks=ranks)


def _distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def label_subcluster(
    subcluster_centroid: Sequence[float],
    profiles: Sequence[PersonaProfile] = DEFAULT_PROFILES,
    max_distance: Optional[float] = None,
) -> tuple[str, float]:
    """Nearest reference centroid by Euclidean distance over the six RCs.

    Ties break by profile declaration order. With ``max_distance`` set, a
    nearest distance beyond it yields the honest "Unmatched persona" label.
    """
    centroid = tuple(subcluster_centroid)
    if len(centroid) != 6:
        raise DataValidationError("sub-cluster centroid must have six RC values")
    best_name, best_dist = None, math.inf
    for profile in profiles:
        dist = _distance(centroid, profile.centroid)
        if dist < best_dist:
            best_name, best_dist = profile.name, dist
    if max_distance is not None and best_dist > max_distance:
        return UNMATCHED, best_dist
    return best_name, best_dist


def assign_persona(
    v: MetricVector,
    profiles: Sequence[PersonaProfile] = DEFAULT_PROFILES,
    cluster_path: Optional[tuple[int, int]] = None,
) -> PersonaAssignment:
    """Direct-mode labeling of one individual by its six RC values only."""
    name, dist = label_subcluster(v.rc_values(), profiles)
    return PersonaAssignment(
        repo=v.repo,
        login=v.login,
        persona=name,
        distance=dist,
        cluster_path=cluster_path,
    )


def write_personas_csv(assignments: Sequence[PersonaAssignment],
                       path: Union[str, Path]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["repo", "login", "persona", "distance", "cluster", "subcluster"])
        for a in assignments:
            cluster = a.cluster_path[0] if a.cluster_path else ""
            sub = a.cluster_path[1] if a.cluster_path else ""
            writer.writerow([str(a.repo), a.login, a.persona, repr(a.distance),
                             cluster, sub])
