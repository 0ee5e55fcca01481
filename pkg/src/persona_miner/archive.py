"""Offline archive of fetched interaction sets.

Format: JSON Lines. The first line is a header object
``{"format": "persona-miner-archive", "version": 1}``; each following line is
either a repo marker or an event. Round-trips are exact field-for-field.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .errors import ArchiveFormatError
from .models import (
    CommitPayload,
    InteractionEvent,
    InteractionKind,
    InteractionSet,
    RepoSlug,
    isoformat_utc,
    parse_utc,
)

ARCHIVE_FORMAT = "persona-miner-archive"
ARCHIVE_VERSION = 1


def _event_to_obj(ev: InteractionEvent) -> dict:
    obj = {
        "type": "event",
        "repo": str(ev.repo),
        "actor": ev.actor,
        "kind": ev.kind.value,
        "timestamp": isoformat_utc(ev.timestamp),
        "subject_id": ev.subject_id,
    }
    if ev.payload is not None:
        obj["payload"] = {
            "message": ev.payload.message,
            "changed_files": list(ev.payload.changed_files),
        }
    return obj


def _event_from_obj(obj: dict) -> InteractionEvent:
    payload = None
    if "payload" in obj and obj["payload"] is not None:
        payload = CommitPayload(
            message=obj["payload"]["message"],
            changed_files=tuple(obj["payload"]["changed_files"]),
        )
    return InteractionEvent(
        repo=RepoSlug.parse(obj["repo"]),
        actor=obj["actor"],
        kind=InteractionKind(obj["kind"]),
        timestamp=parse_utc(obj["timestamp"]),
        subject_id=obj["subject_id"],
        payload=payload,
    )


def save_archive(sets: list[InteractionSet], path: Union[str, Path]) -> None:
    """Write interaction sets to ``path`` as a versioned JSON Lines archive."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"format": ARCHIVE_FORMAT, "version": ARCHIVE_VERSION}))
        fh.write("\n")
        for iset in sets:
            marker = {
                "type": "repo",
                "repo": str(iset.repo),
                "fetched_at": isoformat_utc(iset.fetched_at),
                "incomplete": iset.incomplete,
                "n_events": len(iset.events),
            }
            fh.write(json.dumps(marker))
            fh.write("\n")
            for ev in iset.events:
                fh.write(json.dumps(_event_to_obj(ev)))
                fh.write("\n")


def load_archive(path: Union[str, Path]) -> list[InteractionSet]:
    """Load an archive written by :func:`save_archive`.

    Raises :class:`ArchiveFormatError` on a missing/unknown header or a
    structurally invalid body.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise ArchiveFormatError(f"{path}: empty file, expected archive header")
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ArchiveFormatError(f"{path}: unparseable header") from exc
        if not isinstance(header, dict) or header.get("format") != ARCHIVE_FORMAT:
            raise ArchiveFormatError(f"{path}: not a {ARCHIVE_FORMAT} file")
        if header.get("version") != ARCHIVE_VERSION:
            raise ArchiveFormatError(
                f"{path}: unsupported archive version {header.get('version')!r}"
            )

        sets: list[InteractionSet] = []
        current: dict | None = None
        events: list[InteractionEvent] = []

        def flush():
            if current is not None:
                sets.append(
                    InteractionSet(
                        repo=RepoSlug.parse(current["repo"]),
                        events=tuple(events),
                        fetched_at=parse_utc(current["fetched_at"]),
                        incomplete=bool(current.get("incomplete", False)),
                    )
                )

        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ArchiveFormatError(f"{path}:{lineno}: unparseable line") from exc
            kind = obj.get("type")
            if kind == "repo":
                flush()
                current = obj
                events = []
            elif kind == "event":
                if current is None:
                    raise ArchiveFormatError(
                        f"{path}:{lineno}: event before any repo marker"
                    )
                events.append(_event_from_obj(obj))
            else:
                raise ArchiveFormatError(f"{path}:{lineno}: unknown line type {kind!r}")
        flush()
    return sets
