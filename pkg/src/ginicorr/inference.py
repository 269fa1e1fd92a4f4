"""Inference for the categorical Gini correlation: jackknife variance and
confidence intervals, a permutation independence test, and marginal feature
screening.

Every procedure reuses one set of pairwise distances. Leave-one-out
estimates come from O(n) updates of cached row sums, and permutation
replicates reshuffle labels over the fixed distance cache, so the pooled
Gini mean difference is computed exactly once per dataset.
"""

import math
import secrets
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

from . import metric
from ._validation import check_alpha, check_unit_interval
from .exceptions import (
    DegenerateSample,
    InsufficientClassSize,
    InsufficientData,
    InvalidInput,
)
from .metric import (
    DEFAULT_CACHE_CAP,
    LabeledSample,
    _estimate,
    _pair_count,
    _pair_count_vector,
    _sorted_pair_sum,
    partition,
)


def _validated(x, y, min_class_size: int):
    sample = LabeledSample.from_arrays(x, y)
    if sample.n < 2:
        raise InsufficientData(f"need at least 2 observations, got {sample.n}")
    parts = partition(sample.labels)
    smallest = int(parts.counts.min())
    if smallest < min_class_size:
        k = int(parts.counts.argmin())
        raise InsufficientClassSize(
            f"class {parts.classes[k]!r} has {smallest} member(s); "
            f"need at least {min_class_size}"
        )
    return sample, parts


def _row_sums(sample, parts, alpha, cache_cap):
    """Row/class distance sums, cached when the matrix fits, streamed otherwise."""
    if sample.n <= cache_cap:
        cache = metric.build_cache(sample, parts, alpha, cap=cache_cap)
        return cache.row_total, cache.row_within, cache.grand_total, cache.class_total
    row_total, row_within = metric._row_sums_streaming(sample.data, parts.codes, alpha)
    grand = float(row_total.sum() / 2.0)
    class_total = np.array(
        [row_within[idx].sum() / 2.0 for idx in parts.indices], dtype=np.float64
    )
    return row_total, row_within, grand, class_total


# ---------------------------------------------------------------------------
# Jackknife
# ---------------------------------------------------------------------------

def jackknife_variance(
    x, y, alpha: float = 1.0, cache_cap: int = DEFAULT_CACHE_CAP
) -> tuple[float, np.ndarray]:
    """Leave-one-out variance of the correlation estimate.

    Returns ``(sigma2, pseudo_values)`` where ``pseudo_values[i]`` is the
    estimate with row ``i`` deleted and

        sigma2 = (n - 1) / n * sum_i (pv_i - mean(pv))^2.

    Each pseudo-value is an O(n) update from cached row sums: deleting row
    ``i`` of class ``k`` subtracts its row total from the grand total, its
    same-class row sum from that class total, and renormalizes pair counts
    and proportions over n - 1 rows. Every class needs at least 3 members
    so each leave-one-out subsample still has 2 per class.
    """
    alpha = check_alpha(alpha)
    sample, parts = _validated(x, y, min_class_size=3)
    pseudo = _pseudo_values(sample, parts, alpha, cache_cap)
    n = sample.n
    sigma2 = float((n - 1) / n * np.sum((pseudo - pseudo.mean()) ** 2))
    return sigma2, pseudo


def _pseudo_values(sample, parts, alpha, cache_cap) -> np.ndarray:
    row_total, row_within, grand, class_total = _row_sums(sample, parts, alpha, cache_cap)
    n = sample.n
    codes = parts.codes
    counts = parts.counts.astype(np.float64)

    u_loo = (grand - row_total) / _pair_count(n - 1)
    if np.any(u_loo <= 0.0):
        raise DegenerateSample("a leave-one-out subsample has all observations identical")

    # Weighted within-class term for each deletion, assembled per class:
    # classes other than the deleted row's keep their pair sums, while the
    # affected class loses the row's within-class distances and one member.
    base = counts * class_total / _pair_count_vector(parts.counts)
    base_total = float(base.sum())
    cnt = counts[codes]
    shrunk = (cnt - 1.0) * (class_total[codes] - row_within) / (
        (cnt - 1.0) * (cnt - 2.0) / 2.0
    )
    within_loo = (base_total - base[codes] + shrunk) / (n - 1)
    return (u_loo - within_loo) / u_loo


# ---------------------------------------------------------------------------
# Normal quantile and confidence interval
# ---------------------------------------------------------------------------

# Rational approximation coefficients for the inverse standard-normal CDF
# (relative error below 1.15e-9 before refinement).
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_quantile(p: float) -> float:
    """Inverse CDF of the standard normal distribution.

    A rational approximation supplies the starting point and one Halley
    refinement step against the exact CDF (via erfc) brings the absolute
    error well under 1e-9 across (0, 1).
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InvalidInput(f"p must lie in (0, 1), got {p!r}")
    if p > 0.5:
        # 1 - p is exact here (Sterbenz), and the lower tail keeps full
        # relative precision in the erfc-based refinement.
        return -_lower_quantile(1.0 - p)
    return _lower_quantile(p)


def _lower_quantile(p: float) -> float:
    """normal_quantile restricted to 0 < p <= 0.5 (non-positive output)."""
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        z = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    else:
        q = p - 0.5
        r = q * q
        z = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )
    # Halley step: e is the CDF error at z, u = e / phi(z); erfc sees a
    # non-negative argument, so e carries full precision even deep in the tail.
    e = 0.5 * math.erfc(-z / math.sqrt(2.0)) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(z * z / 2.0)
    return z - u / (1.0 + z * u / 2.0)


@dataclass(frozen=True)
class IntervalResult:
    """Normal-approximation confidence interval around the point estimate.

    Bounds are reported unclipped and may leave [0, 1]; the interval is
    symmetric, so ``upper - lower == 2 * z * stderr`` for the level's
    normal quantile ``z``.
    """

    estimate: float
    stderr: float
    lower: float
    upper: float
    level: float
    pseudo_values: np.ndarray = field(repr=False)


def confidence_interval(
    x,
    y,
    alpha: float = 1.0,
    level: float = 0.95,
    cache_cap: int = DEFAULT_CACHE_CAP,
) -> IntervalResult:
    """Jackknife confidence interval for the categorical Gini correlation.

    ``stderr`` is the square root of the jackknife variance of the
    estimator, which plays the role of sigma-hat / sqrt(n) in the normal
    approximation.
    """
    level = check_unit_interval(level, "level")
    estimate = metric.cgc(x, y, alpha=alpha, cache_cap=cache_cap)
    sigma2, pseudo = jackknife_variance(x, y, alpha=alpha, cache_cap=cache_cap)
    stderr = math.sqrt(sigma2)
    z = normal_quantile((1.0 + level) / 2.0)
    return IntervalResult(
        estimate=estimate.rho,
        stderr=stderr,
        lower=estimate.rho - z * stderr,
        upper=estimate.rho + z * stderr,
        level=level,
        pseudo_values=pseudo,
    )


# ---------------------------------------------------------------------------
# Permutation independence test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestResult:
    """Outcome of the permutation test of independence between X and y."""

    statistic: float
    p_value: float
    permutations: int
    rejected: bool
    seed: int
    significance: float


def _within_machinery(sample, parts, alpha, cache_cap):
    """Overall pair sum plus a function mapping per-class row sets to
    within-class pair sums, with the distances computed once up front
    whenever the cache fits."""
    X = sample.data
    n = sample.n
    if n <= cache_cap:
        cache = metric.build_cache(sample, parts, alpha, cap=cache_cap)
        condensed = cache.condensed
        grids = {
            int(m): np.triu_indices(int(m), k=1)
            for m in np.unique(parts.counts)
            if m >= 2
        }
        # Offset table: pair (lo < hi) lives at offsets[lo] + hi - lo - 1.
        arange = np.arange(n, dtype=np.int64)
        offsets = arange * (2 * n - arange - 1) // 2

        def within(rows_by_class):
            out = np.empty(len(rows_by_class), dtype=np.float64)
            for k, rows in enumerate(rows_by_class):
                m = rows.shape[0]
                if m < 2:
                    out[k] = 0.0
                    continue
                ii, jj = grids[m]
                a, b = rows[ii], rows[jj]
                lo, hi = np.minimum(a, b), np.maximum(a, b)
                out[k] = condensed[offsets[lo] + hi - lo - 1].sum()
            return out

        return cache.grand_total, within

    if sample.d == 1 and alpha == 1.0:
        col = X[:, 0]

        def within(rows_by_class):
            return np.array(
                [
                    _sorted_pair_sum(col[rows]) if rows.shape[0] >= 2 else 0.0
                    for rows in rows_by_class
                ],
                dtype=np.float64,
            )

        return _sorted_pair_sum(col), within

    row_total, _ = metric._row_sums_streaming(X, parts.codes, alpha)

    def within(rows_by_class):
        out = np.empty(len(rows_by_class), dtype=np.float64)
        for k, rows in enumerate(rows_by_class):
            if rows.shape[0] < 2:
                out[k] = 0.0
                continue
            dists = pdist(X[np.sort(rows)])
            if alpha != 1.0:
                np.power(dists, alpha, out=dists)
            out[k] = dists.sum()
        return out

    return float(row_total.sum() / 2.0), within


def _rho_from_within(within_sums, pair_counts, proportions, u_overall):
    u_within = within_sums / pair_counts
    # fsum keeps the K-term reduction independent of class ordering.
    weighted = math.fsum(
        float(p) * float(u) for p, u in zip(proportions, u_within)
    )
    return (u_overall - weighted) / u_overall


def independence_test(
    x,
    y,
    alpha: float = 1.0,
    permutations: int = 1000,
    seed: int | None = None,
    significance: float = 0.05,
    workers: int | None = None,
    cache_cap: int = DEFAULT_CACHE_CAP,
) -> TestResult:
    """Permutation test of the null that X and y are independent
    (equivalently, that all per-class distributions coincide).

    Labels are reshuffled uniformly for each of ``permutations`` replicates;
    class sizes are preserved, only within-class sums change, and the pooled
    Gini mean difference is reused throughout. The p-value uses the add-one
    estimator

        p = (1 + #{replicates with statistic >= observed}) / (B + 1),

    which is never zero and counts ties as extreme. Replicate ``b`` draws
    from an RNG stream derived from ``(seed, b)`` and replicates are reduced
    by counting, so the result is identical for any ``workers`` count.
    """
    alpha = check_alpha(alpha)
    permutations = int(permutations)
    if permutations < 1:
        raise InvalidInput(f"permutation count must be >= 1, got {permutations}")
    significance = check_unit_interval(significance, "significance")
    if seed is None:
        seed = secrets.randbits(63)
    seed = int(seed)

    sample, parts = _validated(x, y, min_class_size=2)
    n = sample.n
    K = parts.n_classes
    pair_counts = _pair_count_vector(parts.counts)
    offsets = np.concatenate(([0], np.cumsum(parts.counts)))

    overall_pair_sum, within = _within_machinery(sample, parts, alpha, cache_cap)
    u_overall = overall_pair_sum / _pair_count(n)
    if u_overall <= 0.0:
        raise DegenerateSample("all observations are identical; the test is undefined")
    observed = _rho_from_within(
        within(parts.indices), pair_counts, parts.proportions, u_overall
    )

    def replicate_exceeds(b: int) -> bool:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(b,)))
        order = rng.permutation(n)
        rows_by_class = [order[offsets[k] : offsets[k + 1]] for k in range(K)]
        rho = _rho_from_within(
            within(rows_by_class), pair_counts, parts.proportions, u_overall
        )
        return rho >= observed

    if workers is None or workers <= 1:
        count = sum(replicate_exceeds(b) for b in range(permutations))
    else:
        chunks = np.array_split(np.arange(permutations), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_chunk = pool.map(
                lambda chunk: sum(replicate_exceeds(int(b)) for b in chunk), chunks
            )
            count = sum(per_chunk)

    p_value = (1 + count) / (permutations + 1)
    return TestResult(
        statistic=observed,
        p_value=p_value,
        permutations=permutations,
        rejected=p_value <= significance,
        seed=seed,
        significance=significance,
    )


# ---------------------------------------------------------------------------
# Feature screening
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FeatureScore:
    """Marginal score of one feature column; ``rho`` is NaN when the column
    is constant (flagged degenerate) so the screen never aborts."""

    index: int
    rho: float
    degenerate: bool = False


@dataclass(frozen=True)
class ScreeningResult:
    """Features ranked by marginal correlation with the labels.

    Ranking is by descending rho with ties broken by ascending column
    index; degenerate (constant) columns sort last.
    """

    ranking: tuple
    alpha: float

    def top(self, k: int) -> tuple:
        return self.ranking[:k]


def screen_features(
    x, y, alpha: float = 1.0, cache_cap: int = DEFAULT_CACHE_CAP
) -> ScreeningResult:
    """Score every feature column by its marginal categorical Gini
    correlation with ``y`` (the univariate fast path applies per column
    when alpha == 1)."""
    alpha = check_alpha(alpha)
    sample, parts = _validated(x, y, min_class_size=2)
    scores = []
    for j in range(sample.d):
        column = LabeledSample(data=sample.data[:, j : j + 1], labels=sample.labels)
        try:
            est = _estimate(column, parts, alpha, "auto", cache_cap)
        except DegenerateSample:
            scores.append(FeatureScore(index=j, rho=float("nan"), degenerate=True))
        else:
            scores.append(FeatureScore(index=j, rho=est.rho, degenerate=False))
    ranking = sorted(
        scores,
        key=lambda s: (s.degenerate, -s.rho if not s.degenerate else 0.0, s.index),
    )
    return ScreeningResult(ranking=tuple(ranking), alpha=alpha)
