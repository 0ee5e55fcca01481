"""Cluster validation mathematics: PCA, one-way ANOVA, and Tukey HSD.

The statistical machinery is written out directly: the F-test p-value comes
from the regularized incomplete beta function and the studentized range CDF
is evaluated by numerical integration (target tolerance 1e-8), so no
statistics package is required at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import betainc, gammaln, ndtr

from .errors import DataValidationError

# p-values below this are indistinguishable from zero and reported as 0.0
P_CLAMP = 1e-300


@dataclass(frozen=True)
class PCAResult:
    components: tuple[tuple[float, ...], ...]  # unit-length loading vectors
    explained_variance_ratio: tuple[float, ...]
    n_components: int


@dataclass(frozen=True)
class AnovaResult:
    f_statistic: float
    p_value: float
    df_between: int
    df_within: int
    p_approx_zero: bool = False


@dataclass(frozen=True)
class TukeyPair:
    group_a: int
    group_b: int
    mean_diff: float
    p_adjusted: float
    reject: bool


@dataclass(frozen=True)
class TukeyResult:
    pairs: tuple[TukeyPair, ...]
    alpha: float


@dataclass(frozen=True)
class FeatureImportance:
    # per component: (feature name, signed loading * 100), ranked by |loading|
    rankings: tuple[tuple[tuple[str, float], ...], ...]


def pca(rows, n_components: int) -> PCAResult:
    """Eigendecompose the sample covariance of mean-centered rows.

    Sign convention: the largest-magnitude loading of each component is made
    positive so results reproduce across platforms.
    """
    data = np.asarray(rows, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise DataValidationError("PCA needs a 2-d array with at least 2 rows")
    n_features = data.shape[1]
    if n_components > n_features:
        raise DataValidationError("n_components exceeds the feature count")

    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (data.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]

    trace = float(eigvals.sum())
    ratios = eigvals / trace if trace > 0 else np.zeros_like(eigvals)

    components = []
    for idx in range(n_components):
        vec = eigvecs[:, idx].copy()
        pivot = int(np.argmax(np.abs(vec)))
        if vec[pivot] < 0:
            vec = -vec
        components.append(tuple(float(x) for x in vec))
    return PCAResult(
        components=tuple(components),
        explained_variance_ratio=tuple(float(r) for r in ratios[:n_components]),
        n_components=n_components,
    )


def feature_importance(result: PCAResult,
                       feature_names: Sequence[str]) -> FeatureImportance:
    """Rank features per component by absolute loading, reporting signed x100."""
    if len(feature_names) != len(result.components[0]):
        raise DataValidationError("feature_names length must match the feature count")
    rankings = []
    for comp in result.components:
        ranked = sorted(
            zip(feature_names, comp), key=lambda nv: abs(nv[1]), reverse=True
        )
        rankings.append(tuple((name, value * 100.0) for name, value in ranked))
    return FeatureImportance(rankings=tuple(rankings))


def _check_groups(groups: Sequence[Sequence[float]]) -> list[np.ndarray]:
    if len(groups) < 2:
        raise DataValidationError("need at least 2 groups")
    arrays = [np.asarray(g, dtype=float) for g in groups]
    for g in arrays:
        if g.size < 2:
            raise DataValidationError("each group needs at least 2 values")
    n = sum(g.size for g in arrays)
    if n <= len(arrays):
        raise DataValidationError("total n must exceed the number of groups")
    return arrays


def f_sf(f: float, df1: int, df2: int) -> float:
    """Upper tail of the F distribution via the regularized incomplete beta."""
    if f <= 0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return float(betainc(df2 / 2.0, df1 / 2.0, x))


def one_way_anova(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Classic F = MS_between / MS_within with beta-function p-value."""
    arrays = _check_groups(groups)
    k = len(arrays)
    n = sum(g.size for g in arrays)
    grand_mean = sum(float(g.sum()) for g in arrays) / n

    ss_between = sum(g.size * (float(g.mean()) - grand_mean) ** 2 for g in arrays)
    ss_within = sum(float(((g - g.mean()) ** 2).sum()) for g in arrays)
    df_between = k - 1
    df_within = n - k

    if ss_within == 0.0:
        if ss_between == 0.0:
            return AnovaResult(0.0, 1.0, df_between, df_within)
        return AnovaResult(math.inf, 0.0, df_between, df_within, p_approx_zero=True)

    f = (ss_between / df_between) / (ss_within / df_within)
    p = f_sf(f, df_between, df_within)
    if 0.0 < p < P_CLAMP:
        return AnovaResult(f, 0.0, df_between, df_within, p_approx_zero=True)
    return AnovaResult(f, p, df_between, df_within)


def _range_cdf(r: float, k: int) -> float:
    """CDF of the range of k independent standard normals."""
    if r <= 0:
        return 0.0

    def integrand(z):
        return math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi) * (
            ndtr(z) - ndtr(z - r)
        ) ** (k - 1)

    val, _err = integrate.quad(integrand, -np.inf, np.inf,
                               epsabs=1e-10, epsrel=1e-10, limit=200)
    return min(1.0, k * val)


def studentized_range_cdf(q: float, k: int, df: int) -> float:
    """P(Q <= q) for the studentized range with k groups and df error dof.

    Integrates the normal-range CDF against the scaled-chi density of the
    pooled standard deviation estimate; target tolerance 1e-8.
    """
    if q <= 0:
        return 0.0
    if df > 10000:
        return _range_cdf(q, k)

    log_norm = (df / 2.0) * math.log(df) - gammaln(df / 2.0) \
        - (df / 2.0 - 1.0) * math.log(2.0)

    def integrand(u):
        if u <= 0:
            return 0.0
        log_density = log_norm + (df - 1) * math.log(u) - df * u * u / 2.0
        if log_density < -745:  # exp underflow
            return 0.0
        return math.exp(log_density) * _range_cdf(q * u, k)

    val, _err = integrate.quad(integrand, 0, np.inf,
                               epsabs=1e-9, epsrel=1e-9, limit=200)
    return min(1.0, val)


def tukey_hsd(groups: Sequence[Sequence[float]], alpha: float = 0.05) -> TukeyResult:
    """Tukey-Kramer pairwise comparisons against the studentized range."""
    arrays = _check_groups(groups)
    k = len(arrays)
    n = sum(g.size for g in arrays)
    df_within = n - k
    ss_within = sum(float(((g - g.mean()) ** 2).sum()) for g in arrays)
    ms_within = ss_within / df_within

    pairs = []
    for a, b in combinations(range(k), 2):
        diff = float(arrays[a].mean()) - float(arrays[b].mean())
        if ms_within == 0.0:
            p_adj = 1.0 if diff == 0.0 else 0.0
        else:
            se = math.sqrt(ms_within / 2.0 * (1.0 / arrays[a].size + 1.0 / arrays[b].size))
            q = abs(diff) / se
            p_adj = 1.0 - studentized_range_cdf(q, k, df_within)
            p_adj = min(1.0, max(0.0, p_adj))
        pairs.append(TukeyPair(
            group_a=a,
            group_b=b,
            mean_diff=diff,
            p_adjusted=p_adj,
            reject=p_adj < alpha,
        ))
    return TukeyResult(pairs=tuple(pairs), alpha=alpha)
