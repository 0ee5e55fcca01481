"""Command-line front-end wiring the pipeline stages.

Exit codes: 0 success, 2 config error, 3 network error, 4 data validation
error. The API token is read from the PERSONA_MINER_TOKEN environment
variable for live fetches.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from .archive import load_archive, save_archive
from .cluster import agglomerate, cut, select_k
from .commit_classify import classify_commit, write_classification_csv
from .errors import (
    ArchiveFormatError,
    ConfigError,
    DataValidationError,
    PersonaMinerError,
    RateBudgetError,
    RetryableFetchError,
)
from .github import GitHubClient
from .metrics import (
    assemble_metric_vectors,
    build_repo_individuals,
    read_metrics_csv,
    write_metrics_csv,
)
from .models import InteractionKind, RepoSlug, parse_utc
from .personas import assign_persona, load_profiles, write_personas_csv
from .pipeline import RunConfig, cluster_and_label, run_pipeline
from .report import (
    composition,
    interaction_totals,
    upset_counts,
    write_composition_csv,
    write_labels_csv,
    write_totals_csv,
    write_upset_json,
)
from .sampling import (
    CriteriaConfig,
    apply_inclusion_criteria,
    subsample,
    write_eligibility_report,
)
from .simgen import default_archetypes, generate, load_archetype_specs
from .transport import RequestsTransport, TokenBucket
from .zenodo import ZenodoQueryConfig, extract_github_slug, query_zenodo_software_records

EXIT_CONFIG = 2
EXIT_NETWORK = 3
EXIT_DATA = 4

logger = logging.getLogger(__name__)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(fn):
    """Map package exceptions onto the documented exit codes."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            _fail(EXIT_CONFIG, str(exc))
        except (RetryableFetchError, RateBudgetError) as exc:
            _fail(EXIT_NETWORK, str(exc))
        except (ArchiveFormatError, DataValidationError) as exc:
            _fail(EXIT_DATA, str(exc))
        except PersonaMinerError as exc:
            _fail(EXIT_DATA, str(exc))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _live_transport() -> RequestsTransport:
    headers = {"Accept": "application/vnd.github+json"}
    token = os.environ.get("PERSONA_MINER_TOKEN")
    if token:
        headers["Authorization"] = f"Bearer {token}"
    return RequestsTransport(
        headers=headers,
        bucket=TokenBucket(capacity=10, refill_per_sec=1.0),
    )


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    """Mine repository interactions, cluster contributors, assign personas."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--page-limit", default=5, show_default=True)
@click.option("--repos", help="Comma-separated owner/name list to fetch directly.")
@click.option("--output", "output_path", required=True, type=click.Path())
@_guard
def fetch(page_limit: int, repos: str | None, output_path: str):
    """Fetch interaction data into an offline archive (network required)."""
    transport = _live_transport()
    client = GitHubClient(transport=transport)
    slugs: list[RepoSlug] = []
    if repos:
        slugs = [RepoSlug.parse(r.strip()) for r in repos.split(",") if r.strip()]
    else:
        records = query_zenodo_software_records(
            transport, ZenodoQueryConfig(), page_limit=page_limit
        )
        for record in records:
            slug = extract_github_slug(record)
            if slug:
                slugs.append(slug)
    sets = [client.fetch_interactions(slug) for slug in slugs]
    save_archive(sets, output_path)
    click.echo(f"archived {len(sets)} repositories to {output_path}")


@main.command("filter")
@click.option("--summaries", "summaries_path", required=True, type=click.Path(exists=True),
              help="JSON list of repo summaries to evaluate.")
@click.option("--fraction", default=1.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--output", "output_path", required=True, type=click.Path())
@_guard
def filter_cmd(summaries_path: str, fraction: float, seed: int, output_path: str):
    """Apply the seven inclusion criteria and seeded sub-sampling."""
    from .models import RepoSummary, Visibility

    raw = json.loads(Path(summaries_path).read_text("utf-8"))
    cfg = CriteriaConfig()
    decisions = []
    for obj in raw:
        summary = RepoSummary(
            slug=RepoSlug.parse(obj["repo"]),
            visibility=Visibility(obj.get("visibility", "public")),
            unique_committers=int(obj.get("unique_committers", 0)),
            license_id=obj.get("license_id"),
            languages=tuple(obj.get("languages", [])),
            is_fork=bool(obj.get("is_fork", False)),
            created_at=parse_utc(obj["created_at"]) if obj.get("created_at") else None,
            age_days=int(obj.get("age_days", 0)),
            default_branch=obj.get("default_branch", "main"),
        )
        decisions.append(apply_inclusion_criteria(summary, cfg))
    write_eligibility_report(decisions, output_path)
    eligible = [d.slug for d in decisions if d.eligible]
    picked = subsample(eligible, fraction, seed) if eligible else []
    click.echo(f"{len(eligible)} eligible; sampled {len(picked)}")
    for slug in picked:
        click.echo(str(slug))


@main.command()
@click.option("--archive", "archive_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--exclude-bots", is_flag=True)
@_guard
def metrics(archive_path: str, output_path: str, exclude_bots: bool):
    """Compute the ten-feature metric table from an archive."""
    vectors = []
    for iset in sorted(load_archive(archive_path), key=lambda s: str(s.repo)):
        individuals, totals = build_repo_individuals(iset)
        repo_vectors = assemble_metric_vectors(individuals, totals)
        if exclude_bots:
            repo_vectors = [v for v in repo_vectors if not v.is_bot_flagged]
        vectors.extend(repo_vectors)
    write_metrics_csv(vectors, output_path)
    click.echo(f"wrote {len(vectors)} metric rows to {output_path}")


@main.command()
@click.option("--archive", "archive_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@_guard
def classify(archive_path: str, output_path: str):
    """Classify commits by message, size, and changed-file types."""
    rows = []
    for iset in sorted(load_archive(archive_path), key=lambda s: str(s.repo)):
        for ev in iset.events:
            if ev.kind == InteractionKind.COMMIT_CREATED:
                rows.append(classify_commit(ev.subject_id, str(iset.repo), ev.payload))
    write_classification_csv(rows, output_path)
    click.echo(f"classified {len(rows)} commits")


@main.command()
@click.option("--metrics", "metrics_path", required=True, type=click.Path(exists=True))
@click.option("--k-min", default=2, show_default=True)
@click.option("--k-max", default=10, show_default=True)
@click.option("--labels-output", required=True, type=click.Path())
@click.option("--dendrogram-output", type=click.Path())
@_guard
def cluster(metrics_path: str, k_min: int, k_max: int, labels_output: str,
            dendrogram_output: str | None):
    """Cluster metric vectors and emit labels (and optionally the merge tree)."""
    vectors = read_metrics_csv(metrics_path)
    if len(vectors) < 3:
        _fail(EXIT_DATA, "clustering needs at least 3 metric rows")
    rows = np.asarray([v.features() for v in vectors])
    k_best, _scores = select_k(rows, k_min=k_min, k_max=k_max)
    dendro = agglomerate(rows)
    labels = cut(dendro, k_best)
    write_labels_csv(
        [(v.repo, v.login, labels.labels[i], 0) for i, v in enumerate(vectors)],
        labels_output,
    )
    if dendrogram_output:
        dendro.save_json(dendrogram_output)
    click.echo(f"k={k_best} clusters over {len(vectors)} rows")


@main.command()
@click.option("--metrics", "metrics_path", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@_guard
def analyze(metrics_path: str, labels_path: str, output_path: str):
    """Validate a clustering: PCA, feature importance, per-feature ANOVA/Tukey."""
    from .cluster import ClusterLabels
    from .pipeline import _stats_block

    vectors = read_metrics_csv(metrics_path)
    labels_by_key: dict[tuple[str, str], int] = {}
    with Path(labels_path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["repo", "login", "cluster", "subcluster"]:
            raise DataValidationError(f"{labels_path}: unexpected labels header")
        for row in reader:
            labels_by_key[(row["repo"], row["login"])] = int(row["cluster"])
    try:
        raw = [labels_by_key[(str(v.repo), v.login)] for v in vectors]
    except KeyError as exc:
        raise DataValidationError(f"no cluster label for individual {exc}") from exc
    k = (max(raw) + 1) if raw else 0
    initial = ClusterLabels(labels=tuple(raw), k=k)
    block = _stats_block(vectors, initial)
    obj = {"format": "persona-miner-stats", "version": 1, **block}
    Path(output_path).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", "utf-8"
    )
    click.echo(f"analysis written to {output_path}")


@main.command()
@click.option("--metrics", "metrics_path", required=True, type=click.Path(exists=True))
@click.option("--profiles", "profiles_path", type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@_guard
def assign(metrics_path: str, profiles_path: str | None, output_path: str):
    """Direct-mode persona assignment: nearest centroid per individual."""
    vectors = read_metrics_csv(metrics_path)
    profiles = load_profiles(profiles_path)
    assignments = [assign_persona(v, profiles) for v in vectors]
    write_personas_csv(assignments, output_path)
    click.echo(f"assigned personas to {len(assignments)} individuals")


@main.command()
@click.option("--archive", "archive_path", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_path", type=click.Path(exists=True))
@click.option("--output-dir", required=True, type=click.Path())
@_guard
def report(archive_path: str, labels_path: str | None, output_dir: str):
    """Emit totals, UpSet counts, and composition from an archive."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    individuals = []
    for iset in sorted(load_archive(archive_path), key=lambda s: str(s.repo)):
        repo_individuals, _totals = build_repo_individuals(iset)
        individuals.extend(repo_individuals)
    write_totals_csv(interaction_totals(individuals), out / "totals.csv")
    write_upset_json(upset_counts(individuals), out / "upset.json")

    labels_by_key: dict[tuple[str, str], int] = {}
    if labels_path:
        with Path(labels_path).open("r", newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["repo", "login", "cluster", "subcluster"]:
                raise DataValidationError(f"{labels_path}: unexpected labels header")
            for row in reader:
                labels_by_key[(row["repo"], row["login"])] = int(row["cluster"])
    pairs = [
        (ind, labels_by_key.get((str(ind.repo), ind.login), 0))
        for ind in individuals
    ]
    rows, fraction = composition(pairs)
    write_composition_csv(rows, fraction, out / "composition.csv")
    click.echo(f"reports written to {out}")


@main.command()
@click.option("--specs", "specs_path", type=click.Path(exists=True),
              help="Archetype spec file; defaults to the seven reference personas.")
@click.option("--count", default=200, show_default=True)
@click.option("--noise-sd", default=2.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--metrics-output", required=True, type=click.Path())
@click.option("--truth-output", type=click.Path())
@_guard
def simulate(specs_path: str | None, count: int, noise_sd: float, seed: int,
             metrics_output: str, truth_output: str | None):
    """Generate synthetic metric vectors from persona archetypes."""
    specs = load_archetype_specs(specs_path) if specs_path else \
        default_archetypes(count=count, noise_sd=noise_sd)
    vectors, truth = generate(specs, seed=seed)
    write_metrics_csv(vectors, metrics_output)
    if truth_output:
        with Path(truth_output).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["login", "archetype"])
            for v, name in zip(vectors, truth):
                writer.writerow([v.login, name])
    click.echo(f"generated {len(vectors)} synthetic rows")


@main.command()
@click.option("--config", "config_path", type=click.Path(),
              help="JSON run configuration file.")
@click.option("--archive", "archive_path", type=click.Path())
@click.option("--seed", type=int)
@click.option("--fraction", type=float)
@click.option("--output-dir", type=click.Path())
@click.option("--exclude-bots", is_flag=True, default=None)
@click.option("--reference-date")
@click.option("--k-max", type=int)
@_guard
def run(config_path: str | None, archive_path: str | None, seed: int | None,
        fraction: float | None, output_dir: str | None,
        exclude_bots: bool | None, reference_date: str | None, k_max: int | None):
    """Run the full pipeline: metrics, clustering, stats, personas, reports."""
    base: dict = {}
    if config_path:
        if not Path(config_path).exists():
            raise ConfigError(f"config file not found: {config_path}")
        try:
            base = json.loads(Path(config_path).read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"unparseable config {config_path}: {exc}") from exc
    overrides = {
        "archive_path": archive_path,
        "seed": seed,
        "fraction": fraction,
        "output_dir": output_dir,
        "exclude_bots": exclude_bots,
        "reference_date": reference_date,
        "k_max": k_max,
    }
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    try:
        cfg = RunConfig(**base)
    except TypeError as exc:
        raise ConfigError(f"bad run configuration: {exc}") from exc
    if cfg.archive_path and not Path(cfg.archive_path).exists():
        raise ConfigError(f"archive not found: {cfg.archive_path}")
    result = run_pipeline(cfg)
    click.echo(
        f"pipeline complete: {result.n_individuals} individuals, "
        f"k={result.initial_k}, outputs in {result.output_dir}"
    )


if __name__ == "__main__":
    main()
