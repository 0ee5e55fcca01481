"""Agglomerative hierarchical clustering with Ward linkage.

The merge loop runs the Lance-Williams recurrence on squared Euclidean
distances over an updateable dissimilarity matrix. Reported merge heights are
the square roots of the recurrence values, so two singleton points merge at
their plain Euclidean distance. Ties on the merge dissimilarity break toward
the lowest (i, j) pair for cross-platform determinism.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DataValidationError


@dataclass(frozen=True)
class Dendrogram:
    """Merge tree: leaf ids 0..n-1, internal ids n..2n-2, n-1 merges."""

    n_leaves: int
    merges: tuple[tuple[int, int, float, int], ...]  # (a, b, height, new_size)

    def to_json_obj(self) -> dict:
        return {
            "n_leaves": self.n_leaves,
            "merges": [[a, b, h, s] for a, b, h, s in self.merges],
        }

    def save_json(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj(), indent=2) + "\n", "utf-8")


@dataclass(frozen=True)
class ClusterLabels:
    labels: tuple[int, ...]
    k: int

    def __post_init__(self):
        present = set(self.labels)
        if present and (present != set(range(self.k))):
            raise DataValidationError("labels must cover 0..k-1 with no empty cluster")


def _validate_rows(vectors) -> np.ndarray:
    rows = np.asarray(vectors, dtype=float)
    if rows.ndim == 1:
        rows = rows.reshape(-1, 1)
    if rows.size and not np.all(np.isfinite(rows)):
        raise DataValidationError("input rows must be finite (no NaN/inf)")
    return rows


def agglomerate(vectors) -> Dendrogram:
    """Build the full Ward merge tree for the given rows."""
    rows = _validate_rows(vectors)
    n = rows.shape[0]
    if n < 1:
        raise DataValidationError("need at least one row")
    if n == 1:
        return Dendrogram(n_leaves=1, merges=())

    # squared Euclidean distances between current clusters; inf marks inactive
    diff = rows[:, None, :] - rows[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)

    # Ward objective between singletons is d2/2 * 2 = ... use the classical
    # convention where reported height^2 follows Lance-Williams on squared
    # distances, which for singletons is the squared Euclidean distance.
    size = np.ones(n)
    node_id = np.arange(n)
    active = np.ones(n, dtype=bool)
    merges: list[tuple[int, int, float, int]] = []

    work = d2.copy()
    for step in range(n - 1):
        min_val = float(np.min(work))
        # break exact ties toward the lexicographically lowest node-id pair
        cand = np.argwhere(work == min_val)
        best_pair = None
        best_key = None
        for ci, cj in cand:
            if ci >= cj:
                continue
            a, b = int(node_id[ci]), int(node_id[cj])
            key = (min(a, b), max(a, b))
            if best_key is None or key < best_key:
                best_key = key
                best_pair = (int(ci), int(cj))
        i, j = best_pair
        height = math.sqrt(max(min_val, 0.0))
        a, b = best_key
        new_size = int(size[i] + size[j])
        merges.append((a, b, height, new_size))

        ni, nj = size[i], size[j]
        dij = work[i, j]
        # Lance-Williams update for Ward, merged cluster kept in slot i
        mask = active.copy()
        mask[i] = False
        mask[j] = False
        nm = size[mask]
        new = ((ni + nm) * work[i, mask] + (nj + nm) * work[j, mask] - nm * dij) / (
            ni + nj + nm
        )
        work[i, mask] = new
        work[mask, i] = new
        active[j] = False
        work[j, :] = np.inf
        work[:, j] = np.inf
        work[i, i] = np.inf
        size[i] = ni + nj
        node_id[i] = n + step

    return Dendrogram(n_leaves=n, merges=tuple(merges))


def cut(dendrogram: Dendrogram, k: int) -> ClusterLabels:
    """Undo the last k-1 merges; clusters labeled by ascending smallest leaf id."""
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise DataValidationError(f"k={k} out of range [1, {n}]")

    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for idx, (a, b, _h, _s) in enumerate(dendrogram.merges[: n - k]):
        new_node = n + idx
        parent[find(a)] = new_node
        parent[find(b)] = new_node

    roots: dict[int, int] = {}
    for leaf in range(n):
        root = find(leaf)
        if root not in roots:
            roots[root] = len(roots)  # ascending smallest-member order
    labels = tuple(roots[find(leaf)] for leaf in range(n))
    return ClusterLabels(labels=labels, k=k)


def ch_index(vectors, labels: ClusterLabels) -> float:
    """Calinski-Harabasz score; zero within-cluster scatter reports +inf."""
    rows = _validate_rows(vectors)
    n = rows.shape[0]
    k = labels.k
    if k < 2:
        raise DataValidationError("CH index needs k >= 2")
    if n <= k:
        raise DataValidationError("CH index needs n > k")
    lab = np.asarray(labels.labels)
    grand_mean = rows.mean(axis=0)
    between = 0.0
    within = 0.0
    for c in range(k):
        members = rows[lab == c]
        centroid = members.mean(axis=0)
        between += len(members) * float(np.sum((centroid - grand_mean) ** 2))
        within += float(np.sum((members - centroid) ** 2))
    if within == 0.0:
        return math.inf
    return (between / (k - 1)) / (within / (n - k))


def select_k(vectors, k_min: int = 2, k_max: int = 10,
             ) -> tuple[int, dict[int, float]]:
    """Scan cut(d, k) over [k_min, k_max] and return the CH argmax.

    k_max is clamped to n-1; ties (and multiple +inf degenerate scores) break
    toward the smallest k.
    """
    rows = _validate_rows(vectors)
    n = rows.shape[0]
    if n < 3:
        raise DataValidationError("k selection needs at least 3 rows")
    k_max = min(k_max, n - 1)
    if k_min > k_max:
        raise DataValidationError(f"empty k range [{k_min}, {k_max}]")
    dendro = agglomerate(rows)
    scores: dict[int, float] = {}
    for k in range(k_min, k_max + 1):
        scores[k] = ch_index(rows, cut(dendro, k))
    best = max(sorted(scores), key=lambda k: scores[k])
    return best, scores


@dataclass(frozen=True)
class SubclusterResult:
    parent_id: int
    splittable: bool
    labels: tuple[int, ...] = ()  # local to the parent's rows, in parent order
    k: int = 1
    scores: dict[int, float] = None  # type: ignore[assignment]


def subcluster(vectors, parent_labels: ClusterLabels, parent_id: int,
               k_min: int = 2, k_max: int = 10) -> SubclusterResult:
    """Re-cluster the rows of one parent cluster; tiny parents are unsplittable."""
    rows = _validate_rows(vectors)
    mask = np.asarray(parent_labels.labels) == parent_id
    members = rows[mask]
    if members.shape[0] < 3:
        return SubclusterResult(parent_id=parent_id, splittable=False,
                                labels=tuple(0 for _ in range(members.shape[0])),
                                k=1, scores={})
    k_best, scores = select_k(members, k_min=k_min, k_max=k_max)
    dendro = agglomerate(members)
    labels = cut(dendro, k_best)
    return SubclusterResult(parent_id=parent_id, splittable=True,
                            labels=labels.labels, k=k_best, scores=scores)
