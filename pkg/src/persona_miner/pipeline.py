"""End-to-end orchestration: archive in, report directory out.

Each stage persists its output file so expensive steps never repeat; a rerun
with the same archive, config, and seed yields byte-identical outputs except
for the timestamps inside run_manifest.json.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import __version__
from .archive import load_archive
from .cluster import ClusterLabels, agglomerate, cut, select_k, subcluster
from .commit_classify import classify_commit, write_classification_csv
from .errors import DataValidationError
from .metrics import (
    FEATURE_NAMES,
    MetricVector,
    RepoIndividual,
    assemble_metric_vectors,
    build_repo_individuals,
    write_metrics_csv,
)
from .models import InteractionKind, InteractionSet
from .personas import (
    DEFAULT_UNMATCHED_DISTANCE,
    PersonaAssignment,
    load_profiles,
    order_clusters_by_interactivity,
    label_subcluster,
    write_personas_csv,
)
from .report import (
    composition,
    interaction_totals,
    upset_counts,
    write_composition_csv,
    write_labels_csv,
    write_totals_csv,
    write_upset_json,
)
from .stats import feature_importance, one_way_anova, pca, tukey_hsd

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    archive_path: Optional[str] = None  # offline source; exactly one source
    live: bool = False
    seed: int = 0
    fraction: float = 1.0
    k_min: int = 2
    k_max: int = 10
    persona_profile_path: Optional[str] = None
    output_dir: str = "out"
    exclude_bots: bool = False
    bot_deny_list: tuple[str, ...] = ()
    reference_date: Optional[str] = None
    unmatched_distance: float = DEFAULT_UNMATCHED_DISTANCE
    upset_min_fraction: float = 0.0

    def __post_init__(self):
        if bool(self.archive_path) == self.live:
            raise DataValidationError(
                "exactly one data source required: archive_path or live"
            )

    def config_hash(self) -> str:
        """Digest of the analysis-relevant settings (output location excluded)."""
        settings = asdict(self)
        settings.pop("output_dir")
        payload = json.dumps(settings, sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class PipelineResult:
    output_dir: Path
    n_individuals: int
    initial_k: int
    persona_counts: dict[str, int] = field(default_factory=dict)


def _feature_matrix(vectors: list[MetricVector]) -> np.ndarray:
    return np.asarray([v.features() for v in vectors], dtype=float)


def cluster_and_label(
    vectors: list[MetricVector],
    profiles,
    k_min: int = 2,
    k_max: int = 10,
    unmatched_distance: float = DEFAULT_UNMATCHED_DISTANCE,
):
    """Cluster, sub-cluster, and label sub-cluster centroids with personas.

    Returns (initial_labels, sub_labels, assignments, diagnostics). Inputs
    are percentages already; no standardization is applied before clustering.
    """
    rows = _feature_matrix(vectors)
    n = rows.shape[0]
    if n < 3:
        initial = ClusterLabels(labels=tuple(0 for _ in range(n)), k=1) if n else \
            ClusterLabels(labels=(), k=0)
        sub = tuple(0 for _ in range(n))
        assignments = [
            a for a in _assign_by_centroid(vectors, initial.labels, sub,
                                           profiles, unmatched_distance)
        ]
        return initial, sub, assignments, {"initial_k": max(initial.k, 0),
                                           "scores": {}, "sub_k": {}}

    k_best, scores = select_k(rows, k_min=k_min, k_max=k_max)
    dendro = agglomerate(rows)
    initial = cut(dendro, k_best)

    sub_labels = [0] * n
    sub_k: dict[int, int] = {}
    for parent in range(k_best):
        result = subcluster(rows, initial, parent, k_min=k_min, k_max=k_max)
        member_idx = [i for i, lab in enumerate(initial.labels) if lab == parent]
        for local, global_idx in enumerate(member_idx):
            sub_labels[global_idx] = result.labels[local] if result.splittable else 0
        sub_k[parent] = result.k if result.splittable else 1

    assignments = _assign_by_centroid(vectors, initial.labels, tuple(sub_labels),
                                      profiles, unmatched_distance)
    diagnostics = {"initial_k": k_best, "scores": scores, "sub_k": sub_k}
    return initial, tuple(sub_labels), assignments, diagnostics


def _assign_by_centroid(vectors, initial_labels, sub_labels, profiles,
                        unmatched_distance) -> list[PersonaAssignment]:
    groups: dict[tuple[int, int], list[int]] = {}
    for idx, (c, s) in enumerate(zip(initial_labels, sub_labels)):
        groups.setdefault((c, s), []).append(idx)

    labels_by_group: dict[tuple[int, int], tuple[str, float]] = {}
    for path, members in groups.items():
        centroid = np.mean([vectors[i].rc_values() for i in members], axis=0)
        labels_by_group[path] = label_subcluster(
            tuple(float(x) for x in centroid), profiles,
            max_distance=unmatched_distance,
        )

    assignments = []
    for idx, v in enumerate(vectors):
        path = (initial_labels[idx], sub_labels[idx])
        name, dist = labels_by_group[path]
        assignments.append(PersonaAssignment(
            repo=v.repo, login=v.login, persona=name, distance=dist,
            cluster_path=path,
        ))
    return assignments


def _stats_block(vectors: list[MetricVector], initial: ClusterLabels) -> dict:
    rows = _feature_matrix(vectors)
    block: dict = {"pca": None, "feature_importance": None, "anova": {},
                   "tukey": {}}
    if rows.shape[0] >= 2:
        n_comp = min(3, rows.shape[1])
        pca_result = pca(rows, n_comp)
        block["pca"] = {
            "explained_variance_ratio": list(pca_result.explained_variance_ratio),
            "components": [list(c) for c in pca_result.components],
        }
        fi = feature_importance(pca_result, FEATURE_NAMES)
        block["feature_importance"] = [
            [{"feature": name, "value": value} for name, value in ranking]
            for ranking in fi.rankings
        ]

    by_cluster: dict[int, list[int]] = {}
    for idx, lab in enumerate(initial.labels):
        by_cluster.setdefault(lab, []).append(idx)
    groups_ok = len(by_cluster) >= 2 and all(
        len(m) >= 2 for m in by_cluster.values()
    )
    if groups_ok:
        for f_idx, name in enumerate(FEATURE_NAMES):
            groups = [
                [rows[i, f_idx] for i in members]
                for _, members in sorted(by_cluster.items())
            ]
            anova = one_way_anova(groups)
            block["anova"][name] = {
                "f_statistic": anova.f_statistic,
                "p_value": anova.p_value,
                "p_approx_zero": anova.p_approx_zero,
                "df_between": anova.df_between,
                "df_within": anova.df_within,
            }
            tukey = tukey_hsd(groups)
            block["tukey"][name] = [
                {
                    "group_a": p.group_a,
                    "group_b": p.group_b,
                    "mean_diff": p.mean_diff,
                    "p_adjusted": p.p_adjusted,
                    "reject": p.reject,
                }
                for p in tukey.pairs
            ]
    return block


def run_pipeline(cfg: RunConfig) -> PipelineResult:
    """Execute all stages in order and write every report file."""
    started_at = datetime.now(timezone.utc)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    if cfg.live:
        raise DataValidationError(
            "live mining requires the fetch subcommand; run_pipeline consumes archives"
        )
    sets = load_archive(cfg.archive_path)

    deny = frozenset(cfg.bot_deny_list)
    individuals: list[RepoIndividual] = []
    vectors: list[MetricVector] = []
    classifications = []
    for iset in sorted(sets, key=lambda s: str(s.repo)):
        repo_individuals, totals = build_repo_individuals(iset, bot_deny_list=deny)
        if cfg.exclude_bots:
            kept = [i for i in repo_individuals if not i.is_bot_flagged]
            if len(kept) != len(repo_individuals):
                # totals must reflect the kept population only
                filtered = InteractionSet(
                    repo=iset.repo,
                    events=tuple(
                        ev for ev in iset.events
                        if not any(ev.actor == b.login for b in repo_individuals
                                   if b.is_bot_flagged)
                    ),
                    fetched_at=iset.fetched_at,
                    incomplete=iset.incomplete,
                )
                repo_individuals, totals = build_repo_individuals(filtered,
                                                                  bot_deny_list=deny)
        individuals.extend(repo_individuals)
        vectors.extend(assemble_metric_vectors(repo_individuals, totals))
        for ev in iset.events:
            if ev.kind == InteractionKind.COMMIT_CREATED:
                classifications.append(
                    classify_commit(ev.subject_id, str(iset.repo), ev.payload)
                )

    write_metrics_csv(vectors, out / "metrics.csv")
    write_classification_csv(classifications, out / "classification.csv")

    profiles = load_profiles(cfg.persona_profile_path)
    initial, sub_labels, assignments, diagnostics = cluster_and_label(
        vectors, profiles, k_min=cfg.k_min, k_max=cfg.k_max,
        unmatched_distance=cfg.unmatched_distance,
    )

    if vectors and initial.k >= 3:
        rows = _feature_matrix(vectors)
        mrc_idx = FEATURE_NAMES.index("mrc")
        mean_mrcs = {
            c: float(np.mean([rows[i, mrc_idx] for i, lab in
                              enumerate(initial.labels) if lab == c]))
            for c in range(initial.k)
        }
        sizes = {c: sum(1 for lab in initial.labels if lab == c)
                 for c in range(initial.k)}
        ranking = order_clusters_by_interactivity(mean_mrcs, sizes)
        diagnostics["interactivity_levels"] = ranking.levels if ranking.standard \
            else None

    if vectors:
        dendro = agglomerate(_feature_matrix(vectors)) if len(vectors) > 1 else \
            agglomerate([vectors[0].features()])
        dendro.save_json(out / "dendrogram.json")
    else:
        (out / "dendrogram.json").write_text(
            json.dumps({"n_leaves": 0, "merges": []}, indent=2) + "\n", "utf-8"
        )

    write_labels_csv(
        [(v.repo, v.login, initial.labels[i] if initial.labels else 0,
          sub_labels[i] if sub_labels else 0)
         for i, v in enumerate(vectors)],
        out / "labels.csv",
    )
    write_personas_csv(assignments, out / "personas.csv")

    stats_block = _stats_block(vectors, initial) if len(vectors) >= 2 else {
        "pca": None, "feature_importance": None, "anova": {}, "tukey": {}}
    stats_obj = {"format": "persona-miner-stats", "version": 1,
                 "diagnostics": {
                     "initial_k": diagnostics.get("initial_k", 0),
                     "ch_scores": {str(k): v for k, v in
                                   diagnostics.get("scores", {}).items()},
                     "sub_k": {str(k): v for k, v in
                               diagnostics.get("sub_k", {}).items()},
                     "interactivity_levels": {
                         str(k): v for k, v in
                         (diagnostics.get("interactivity_levels") or {}).items()
                     },
                 },
                 **stats_block}
    (out / "stats.json").write_text(
        json.dumps(stats_obj, indent=2, sort_keys=True) + "\n", "utf-8"
    )

    totals_map = interaction_totals(individuals)
    write_totals_csv(totals_map, out / "totals.csv")
    write_upset_json(upset_counts(individuals, cfg.upset_min_fraction),
                     out / "upset.json")
    comp_rows, mixed_fraction = composition(
        list(zip(individuals, initial.labels if initial.labels else []))
    )
    write_composition_csv(comp_rows, mixed_fraction, out / "composition.csv")

    persona_counts: dict[str, int] = {}
    for a in assignments:
        persona_counts[a.persona] = persona_counts.get(a.persona, 0) + 1

    manifest = {
        "format": "persona-miner-manifest",
        "version": 1,
        "tool_version": __version__,
        "inputs": {"archive": str(cfg.archive_path)},
        "seed": cfg.seed,
        "config_hash": cfg.config_hash(),
        "n_individuals": len(vectors),
        "initial_k": diagnostics.get("initial_k", 0),
        "persona_counts": dict(sorted(persona_counts.items())),
        "started_at": started_at.isoformat(),
        "finished_at": datetime.now(timezone.utc).isoformat(),
    }
    (out / "run_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8"
    )

    return PipelineResult(
        output_dir=out,
        n_individuals=len(vectors),
        initial_k=diagnostics.get("initial_k", 0),
        persona_counts=persona_counts,
    )
