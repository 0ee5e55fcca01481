"""Commit classification by message keywords, size, and changed-file types.

Three independent classifiers, each total and deterministic:
- development type from verb-stem matching on the commit message;
- size class from the number of changed files;
- activity type from ordered pattern rules over changed paths.

The stem and pattern tables are shipped as editable data files; the built-in
defaults are a documented, replaceable approximation.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .errors import ConfigError, DataValidationError
from .models import CommitPayload


class DevelopmentType(str, Enum):
    FORWARD_ENGINEERING = "ForwardEngineering"
    REENGINEERING = "Reengineering"
    CORRECTIVE_ENGINEERING = "CorrectiveEngineering"
    MANAGEMENT = "Management"
    UNCLASSIFIED = "Unclassified"


class SizeClass(str, Enum):
    TINY = "Tiny"
    SMALL = "Small"
    MEDIUM = "Medium"
    LARGE = "Large"


@dataclass(frozen=True)
class SizeThresholds:
    """Upper bounds (inclusive) for Tiny/Small/Medium; above medium is Large."""

    tiny_max: int = 5
    small_max: int = 25
    medium_max: int = 125

    def __post_init__(self):
        if not self.tiny_max < self.small_max < self.medium_max:
            raise ConfigError("size thresholds must be strictly increasing")


@dataclass(frozen=True)
class KeywordTable:
    """Ordered verb-stem table; first-token stem match, case-insensitive."""

    stems: tuple[tuple[DevelopmentType, tuple[str, ...]], ...]
    match_anywhere: bool = False

    def __post_init__(self):
        seen: dict[str, DevelopmentType] = {}
        for dev_type, words in self.stems:
            for stem in words:
                if stem in seen:
                    raise ConfigError(
                        f"stem {stem!r} appears under both {seen[stem].value} "
                        f"and {dev_type.value}"
                    )
                seen[stem] = dev_type


@dataclass(frozen=True)
class ActivityRule:
    category: str
    patterns: tuple[re.Pattern, ...]


@dataclass(frozen=True)
class ActivityRules:
    rules: tuple[ActivityRule, ...]
    fallback: str = "unknown"

    @property
    def categories(self) -> tuple[str, ...]:
        return tuple(r.category for r in self.rules) + (self.fallback,)


def _data_text(name: str) -> str:
    return resources.files("persona_miner.data").joinpath(name).read_text("utf-8")


def load_keyword_table(path: Optional[Union[str, Path]] = None) -> KeywordTable:
    raw = json.loads(Path(path).read_text("utf-8")) if path else json.loads(
        _data_text("commit_keywords.json")
    )
    try:
        stems = tuple(
            (DevelopmentType(name), tuple(words))
            for name, words in raw["stems"].items()
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad keyword table: {exc}") from exc
    return KeywordTable(stems=stems, match_anywhere=bool(raw.get("match_anywhere", False)))


def load_activity_rules(path: Optional[Union[str, Path]] = None) -> ActivityRules:
    raw = json.loads(Path(path).read_text("utf-8")) if path else json.loads(
        _data_text("activity_rules.json")
    )
    rules = []
    for entry in raw["rules"]:
        compiled = []
        for pattern in entry["patterns"]:
            try:
                compiled.append(re.compile(pattern, re.IGNORECASE))
            except re.error as exc:
                raise ConfigError(
                    f"bad activity pattern {pattern!r} in {entry['category']}: {exc}"
                ) from exc
        rules.append(ActivityRule(category=entry["category"], patterns=tuple(compiled)))
    return ActivityRules(rules=tuple(rules), fallback=raw.get("fallback", "unknown"))


DEFAULT_KEYWORD_TABLE = load_keyword_table()
DEFAULT_ACTIVITY_RULES = load_activity_rules()
DEFAULT_SIZE_THRESHOLDS = SizeThresholds()


def classify_message(message: str,
                     table: KeywordTable = DEFAULT_KEYWORD_TABLE) -> DevelopmentType:
    """Match the first word of the lowercased message against stems in table order."""
    text = message.strip().lower()
    if not text:
        return DevelopmentType.UNCLASSIFIED
    first_word = text.split()[0]
    haystack = text if table.match_anywhere else first_word
    for dev_type, stems in table.stems:
        for stem in stems:
            if table.match_anywhere:
                if stem in haystack:
                    return dev_type
            elif first_word.startswith(stem):
                return dev_type
    return DevelopmentType.UNCLASSIFIED


def classify_size(n_files: int,
                  thresholds: SizeThresholds = DEFAULT_SIZE_THRESHOLDS) -> SizeClass:
    """Bucket a commit by number of changed files."""
    if n_files < 1:
        raise DataValidationError(
            "a commit with a payload must list at least one file; "
            "payload-absent commits skip size classification"
        )
    if n_files <= thresholds.tiny_max:
        return SizeClass.TINY
    if n_files <= thresholds.small_max:
        return SizeClass.SMALL
    if n_files <= thresholds.medium_max:
        return SizeClass.MEDIUM
    return SizeClass.LARGE


def classify_files(paths: list[str],
                   rules: ActivityRules = DEFAULT_ACTIVITY_RULES) -> str:
    """First rule (in declared order) matched by ANY path wins; else fallback."""
    for rule in rules.rules:
        for pattern in rule.patterns:
            if any(pattern.search(p) for p in paths):
                return rule.category
    return rules.fallback


@dataclass(frozen=True)
class CommitClassification:
    sha: str
    repo: str
    dev_type: DevelopmentType
    size_class: Optional[SizeClass]  # None when the payload lacks a file list
    activity_type: str


def classify_commit(sha: str, repo: str, payload: Optional[CommitPayload],
                    table: KeywordTable = DEFAULT_KEYWORD_TABLE,
                    rules: ActivityRules = DEFAULT_ACTIVITY_RULES,
                    thresholds: SizeThresholds = DEFAULT_SIZE_THRESHOLDS,
                    ) -> CommitClassification:
    message = payload.message if payload else ""
    files = list(payload.changed_files) if payload else []
    return CommitClassification(
        sha=sha,
        repo=repo,
        dev_type=classify_message(message, table),
        size_class=classify_size(len(files), thresholds) if files else None,
        activity_type=classify_files(files, rules),
    )


def write_classification_csv(rows: list[CommitClassification],
                             path: Union[str, Path]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sha", "repo", "dev_type", "size_class", "activity_type"])
        for r in rows:
            writer.writerow([
                r.sha,
                r.repo,
                r.dev_type.value,
                r.size_class.value if r.size_class else "payload-absent",
                r.activity_type,
            ])
