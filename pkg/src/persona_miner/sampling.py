"""Inclusion/exclusion criteria and seeded sub-sampling of eligible repos."""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Union

from .models import RepoSlug, RepoSummary, Visibility


def _defaults() -> dict:
    with resources.files("persona_miner.data").joinpath(
        "sampling_defaults.json"
    ).open("r", encoding="utf-8") as fh:
        return json.load(fh)


_DEFAULTS = _defaults()

# stable criterion identifiers used in EligibilityDecision.failed_criteria
CRITERION_PUBLIC = "public"
CRITERION_MIN_COMMITTERS = "min_committers"
CRITERION_MAX_COMMITTERS = "max_committers"
CRITERION_LICENSE = "license"
CRITERION_LANGUAGE = "language"
CRITERION_FORK = "fork"
CRITERION_AGE = "age"


@dataclass(frozen=True)
class CriteriaConfig:
    min_committers: int = 10
    max_committers: int = 307
    min_age_days: int = 1000
    allowed_licenses: tuple[str, ...] = tuple(_DEFAULTS["allowed_licenses"])
    allowed_languages: tuple[str, ...] = tuple(_DEFAULTS["allowed_languages"])
    exclude_forks: bool = True
    require_public: bool = True

    def __post_init__(self):
        if self.min_committers > self.max_committers:
            raise ValueError("min_committers must be <= max_committers")
        if self.min_age_days < 0:
            raise ValueError("min_age_days must be >= 0")


@dataclass(frozen=True)
class EligibilityDecision:
    slug: RepoSlug
    eligible: bool
    failed_criteria: tuple[tuple[str, str], ...]  # (criterion id, reason)

    def __post_init__(self):
        if self.eligible != (len(self.failed_criteria) == 0):
            raise ValueError("eligible must mirror an empty failed_criteria list")


def apply_inclusion_criteria(summary: RepoSummary,
                             cfg: CriteriaConfig = CriteriaConfig()) -> EligibilityDecision:
    """Evaluate every criterion (no short-circuit) so the failure list is complete."""
    failed: list[tuple[str, str]] = []

    if cfg.require_public and summary.visibility != Visibility.PUBLIC:
        failed.append((CRITERION_PUBLIC,
                       f"repository is {summary.visibility.value}, not public"))
    if summary.unique_committers < cfg.min_committers:
        failed.append((CRITERION_MIN_COMMITTERS,
                       f"{summary.unique_committers} committers < {cfg.min_committers}"))
    if summary.unique_committers >= cfg.max_committers:
        failed.append((CRITERION_MAX_COMMITTERS,
                       f"{summary.unique_committers} committers >= {cfg.max_committers}"))
    if summary.license_id in cfg.allowed_licenses:
        pass
    elif summary.license_id is None:
        failed.append((CRITERION_LICENSE, "no license visible"))
    else:
        failed.append((CRITERION_LICENSE,
                       f"unrecognized license {summary.license_id!r}"))
    if not any(lang in cfg.allowed_languages for lang in summary.languages):
        failed.append((CRITERION_LANGUAGE,
                       "no repository language is in the allowed list"
                       if summary.languages else "unrecognized"))
    if cfg.exclude_forks and summary.is_fork:
        failed.append((CRITERION_FORK, "repository is a fork"))
    if summary.age_days < cfg.min_age_days:
        failed.append((CRITERION_AGE,
                       f"{summary.age_days} days old < {cfg.min_age_days}"))

    return EligibilityDecision(
        slug=summary.slug,
        eligible=not failed,
        failed_criteria=tuple(failed),
    )


def subsample(eligible: list[RepoSlug], fraction: float, seed: int) -> list[RepoSlug]:
    """Pick floor(fraction * n) slugs uniformly without replacement.

    Uses Python's Mersenne Twister (random.Random) so a given seed reproduces
    across platforms. Output is sorted by slug for determinism.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1]")
    n_pick = math.floor(fraction * len(eligible))
    rng = random.Random(seed)
    picked = rng.sample(eligible, n_pick)
    return sorted(picked, key=str)


def write_eligibility_report(decisions: list[EligibilityDecision],
                             path: Union[str, Path]) -> None:
    """Emit one CSV row per repo with a semicolon-joined failed-criteria column."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["repo", "eligible", "failed_criteria"])
        for d in decisions:
            writer.writerow([
                str(d.slug),
                "true" if d.eligible else "false",
                ";".join(f"{cid}: {reason}" for cid, reason in d.failed_criteria),
            ])
