"""GitHub REST v3 client producing repository summaries and interaction events.

Event attribution rules:
- commits go to the platform login when present, else a synthetic identity
  derived from the lowercased author email;
- an issue-API record counts as an issue only when it lacks a pull_request
  linkage (the issues API also returns PRs);
- issue closure is attributed to the closing actor, assignment once per
  (issue, assignee) pair, PR closure to the merging actor when merged, else
  the closing actor, else the PR author.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterator, Optional

from .errors import RetryableFetchError
from .models import (
    CommitPayload,
    InteractionEvent,
    InteractionKind,
    InteractionSet,
    RepoSlug,
    RepoSummary,
    Visibility,
    parse_utc,
)
from .transport import Transport

logger = logging.getLogger(__name__)

GITHUB_API = "https://api.github.com"
BOT_SUFFIX = "[bot]"


def commit_identity(commit_obj: dict) -> Optional[str]:
    """Resolve a commit to a stable actor identity.

    Prefers the platform login; falls back to a synthetic identity built from
    the lowercase-normalized author email so no interaction is dropped.
    """
    author = commit_obj.get("author")
    if author and author.get("login"):
        return author["login"]
    email = (commit_obj.get("commit", {}).get("author") or {}).get("email", "")
    email = email.strip().lower()
    if email:
        return f"email:{email}"
    return None


def is_bot_login(login: str, deny_list: frozenset[str] = frozenset()) -> bool:
    return login.endswith(BOT_SUFFIX) or login in deny_list


@dataclass
class GitHubClient:
    transport: Transport
    base_url: str = GITHUB_API
    page_size: int = 100

    def _paginate(self, url: str, params: Optional[dict] = None) -> Iterator[dict]:
        params = dict(params or {})
        params["per_page"] = self.page_size
        page = 1
        while True:
            params["page"] = page
            resp = self.transport.get(url, params=params)
            if resp.status >= 500:
                raise RetryableFetchError(f"HTTP {resp.status} from {url}")
            if resp.status >= 400:
                raise RetryableFetchError(f"HTTP {resp.status} from {url}")
            items = resp.body or []
            if not items:
                return
            yield from items
            if len(items) < self.page_size:
                return
            page += 1

    def _repo_url(self, slug: RepoSlug, *parts: str) -> str:
        return "/".join([self.base_url, "repos", slug.owner, slug.name, *parts])

    # -- summary ----------------------------------------------------------

    def fetch_repo_summary(self, slug: RepoSlug,
                           reference_date: Optional[datetime] = None) -> RepoSummary:
        """Fetch summary facts for the eligibility criteria.

        404 maps to missing, 403/451 to private; other client errors are
        treated as retryable transport problems.
        """
        resp = self.transport.get(self._repo_url(slug))
        if resp.status == 404:
            return RepoSummary(slug=slug, visibility=Visibility.MISSING)
        if resp.status in (403, 451):
            return RepoSummary(slug=slug, visibility=Visibility.PRIVATE)
        if resp.status >= 400:
            raise RetryableFetchError(f"HTTP {resp.status} fetching {slug}")
        body = resp.body or {}

        lang_resp = self.transport.get(self._repo_url(slug, "languages"))
        languages = tuple(sorted((lang_resp.body or {}).keys())) \
            if lang_resp.status < 400 else ()

        created_at = parse_utc(body["created_at"]) if body.get("created_at") else None
        ref = reference_date or datetime.now(timezone.utc)
        age_days = max(0, (ref - created_at).days) if created_at else 0

        default_branch = body.get("default_branch") or "main"
        committers: set[str] = set()
        for commit in self._paginate(self._repo_url(slug, "commits"),
                                     {"sha": default_branch}):
            ident = commit_identity(commit)
            if ident:
                committers.add(ident)

        license_obj = body.get("license") or {}
        return RepoSummary(
            slug=slug,
            visibility=Visibility.PUBLIC,
            unique_committers=len(committers),
            license_id=license_obj.get("spdx_id"),
            languages=languages,
            is_fork=bool(body.get("fork", False)),
            created_at=created_at,
            age_days=age_days,
            default_branch=default_branch,
        )

    # -- interactions -----------------------------------------------------

    def fetch_interactions(self, slug: RepoSlug, fetch_commit_files: bool = True,
                           now: Optional[datetime] = None) -> InteractionSet:
        """Fetch all six event kinds for a public repository.

        A failed sub-fetch marks the set incomplete rather than silently
        truncating it.
        """
        events: list[InteractionEvent] = []
        incomplete = False
        try:
            events.extend(self._commit_events(slug, fetch_commit_files))
            events.extend(self._issue_events(slug))
            events.extend(self._pr_events(slug))
        except RetryableFetchError:
            logger.warning("partial fetch for %s", slug)
            incomplete = True
        return InteractionSet(
            repo=slug,
            events=tuple(events),
            fetched_at=now or datetime.now(timezone.utc),
            incomplete=incomplete,
        )

    def _commit_events(self, slug: RepoSlug,
                       fetch_files: bool) -> Iterator[InteractionEvent]:
        for commit in self._paginate(self._repo_url(slug, "commits")):
            actor = commit_identity(commit)
            if actor is None:
                logger.warning("commit %s has no resolvable author; skipped",
                               commit.get("sha"))
                continue
            sha = commit["sha"]
            message = commit.get("commit", {}).get("message", "")
            changed: tuple[str, ...] = ()
            payload_present = False
            if fetch_files:
                detail = self.transport.get(self._repo_url(slug, "commits", sha))
                if detail.status < 400 and detail.body:
                    files = detail.body.get("files")
                    if files is not None:
                        seen = []
                        for f in files:
                            p = f.get("filename")
                            if p and p not in seen:
                                seen.append(p)
                        changed = tuple(seen)
                        payload_present = True
            payload = CommitPayload(message=message, changed_files=changed) \
                if (payload_present or message) else CommitPayload(message=message)
            yield InteractionEvent(
                repo=slug,
                actor=actor,
                kind=InteractionKind.COMMIT_CREATED,
                timestamp=parse_utc(commit["commit"]["author"]["date"]),
                subject_id=sha,
                payload=payload,
            )

    def _issue_events(self, slug: RepoSlug) -> Iterator[InteractionEvent]:
        for issue in self._paginate(self._repo_url(slug, "issues"),
                                    {"state": "all"}):
            if "pull_request" in issue:
                continue  # the issues API returns PRs too; keep types disjoint
            number = str(issue["number"])
            user = (issue.get("user") or {}).get("login")
            if user:
                yield InteractionEvent(
                    repo=slug,
                    actor=user,
                    kind=InteractionKind.ISSUE_CREATED,
                    timestamp=parse_utc(issue["created_at"]),
                    subject_id=number,
                )
            assigned_pairs: set[str] = set()
            closed_emitted = False
            for ev in self._paginate(self._repo_url(slug, "issues", number, "events")):
                etype = ev.get("event")
                if etype == "assigned":
                    assignee = (ev.get("assignee") or {}).get("login")
                    if assignee and assignee not in assigned_pairs:
                        assigned_pairs.add(assignee)
                        yield InteractionEvent(
                            repo=slug,
                            actor=assignee,
                            kind=InteractionKind.ISSUE_ASSIGNED,
                            timestamp=parse_utc(ev["created_at"]),
                            subject_id=number,
                        )
                elif etype == "closed" and not closed_emitted:
                    closer = (ev.get("actor") or {}).get("login")
                    if closer:
                        closed_emitted = True
                        yield InteractionEvent(
                            repo=slug,
                            actor=closer,
                            kind=InteractionKind.ISSUE_CLOSED,
                            timestamp=parse_utc(ev["created_at"]),
                            subject_id=number,
                        )

    def _pr_events(self, slug: RepoSlug) -> Iterator[InteractionEvent]:
        for pr in self._paginate(self._repo_url(slug, "pulls"), {"state": "all"}):
            number = str(pr["number"])
            user = (pr.get("user") or {}).get("login")
            if user:
                yield InteractionEvent(
                    repo=slug,
                    actor=user,
                    kind=InteractionKind.PR_CREATED,
                    timestamp=parse_utc(pr["created_at"]),
                    subject_id=number,
                )
            if pr.get("state") == "closed" and pr.get("closed_at"):
                closer = self._pr_closer(slug, pr, number) or user
                if closer:
                    yield InteractionEvent(
                        repo=slug,
                        actor=closer,
                        kind=InteractionKind.PR_CLOSED,
                        timestamp=parse_utc(pr["closed_at"]),
                        subject_id=number,
                    )

    def _pr_closer(self, slug: RepoSlug, pr: dict, number: str) -> Optional[str]:
        if pr.get("merged_at"):
            detail = self.transport.get(self._repo_url(slug, "pulls", number))
            if detail.status < 400 and detail.body:
                merged_by = (detail.body.get("merged_by") or {}).get("login")
                if merged_by:
                    return merged_by
        for ev in self._paginate(self._repo_url(slug, "issues", number, "events")):
            if ev.get("event") == "closed":
                actor = (ev.get("actor") or {}).get("login")
                if actor:
                    return actor
        return None
