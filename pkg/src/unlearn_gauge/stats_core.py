"""Numerical kernel: ECDF, two-sample KS test, ROC AUC, and Rouge-L primitives.

Everything here is a pure function over plain sequences of floats or token
lists; no file formats, no model access.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Truncation rule for the asymptotic p-value series: stop once the last
# accumulated term drops below TERM_EPS, or after MAX_SERIES_TERMS terms.
# The term is accumulated before the size check so large statistics keep
# first-term relative accuracy instead of collapsing to 0.
TERM_EPS = 1e-12
MAX_SERIES_TERMS = 100


@dataclass(frozen=True)
class KSResult:
    """Two-sample KS outcome: raw statistic, size-adjusted statistic, p-value."""

    statistic: float
    adjusted: float
    p_value: float
    n: int
    m: int


def ecdf_eval(sample, x: float) -> float:
    """Empirical CDF of `sample` at `x`: fraction of points <= x."""
    arr = np.asarray(sample, dtype=float)
    if arr.size == 0:
        raise ValueError("ecdf_eval: empty sample")
    return float(np.count_nonzero(arr <= x)) / arr.size


def ks_statistic(a, b) -> float:
    """Max absolute ECDF difference, evaluated over the pooled sample points.

    Both F(x) and the left limit F(x-) are compared at every pooled point so
    the result equals the true sup-norm distance between the step functions.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("ks_statistic: empty sample")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    fa_left = np.searchsorted(a, pooled, side="left") / a.size
    fb_left = np.searchsorted(b, pooled, side="left") / b.size
    gap = np.abs(fa - fb)
    gap_left = np.abs(fa_left - fb_left)
    return float(max(gap.max(), gap_left.max()))


def ks_pvalue(adjusted: float) -> float:
    """Asymptotic two-sided KS p-value  p = 2 * sum_k (-1)^(k-1) exp(-2 k^2 D^2).

    The alternating series is summed until the last term is below TERM_EPS or
    MAX_SERIES_TERMS terms were taken, then clamped to [0, 1] (the asymptotic
    series can overshoot 1 for small arguments).  The series degenerates for
    arguments near 0, where it is still oscillating at the term cap; there the
    true survival probability is 1 to machine precision, so non-convergence
    maps to p = 1 (D = 0 included).
    """
    if adjusted < 0 or math.isnan(adjusted):
        raise ValueError(f"ks_pvalue: adjusted statistic must be >= 0, got {adjusted}")
    if adjusted == 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, MAX_SERIES_TERMS + 1):
        term = sign * 2.0 * math.exp(-2.0 * k * k * adjusted * adjusted)
        total += term
        if abs(term) < TERM_EPS:
            return min(max(total, 0.0), 1.0)
        sign = -sign
    return 1.0


def ks_two_sample(a, b) -> KSResult:
    """Two-sample KS test: statistic, size adjustment S*sqrt(nm/(n+m)), p-value."""
    n, m = len(a), len(b)
    stat = ks_statistic(a, b)
    adjusted = stat * math.sqrt(n * m / (n + m))
    return KSResult(statistic=stat, adjusted=adjusted, p_value=ks_pvalue(adjusted), n=n, m=m)


def auc_roc(member_scores, nonmember_scores) -> float:
    """Probability a random member score exceeds a random non-member score.

    Ties count 0.5 (Mann-Whitney convention).  Computed via midranks, which is
    exactly the pairwise win/tie count for any tie pattern.
    """
    mem = np.asarray(member_scores, dtype=float)
    non = np.asarray(nonmember_scores, dtype=float)
    if mem.size == 0 or non.size == 0:
        raise ValueError("auc_roc: empty score list")
    combined = np.concatenate([mem, non])
    order = np.argsort(combined, kind="mergesort")
    ranks = np.empty(combined.size, dtype=float)
    sorted_vals = combined[order]
    i = 0
    while i < combined.size:
        j = i
        while j + 1 < combined.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # midrank, 1-based
        i = j + 1
    rank_sum = float(ranks[: mem.size].sum())
    u = rank_sum - mem.size * (mem.size + 1) / 2.0
    return u / (mem.size * non.size)


def lcs_length(a, b) -> int:
    """Longest common subsequence length between two token sequences."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for tok in a:
        cur = [0] * (len(b) + 1)
        for j, other in enumerate(b, start=1):
            if tok == other:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[len(b)]


def rouge_l(candidate_tokens, reference_tokens, mode: str = "recall") -> float:
    """Rouge-L over pre-split token lists.

    recall = LCS/|reference|; f1 = 2PR/(P+R) with precision = LCS/|candidate|
    (an empty candidate scores 0).
    """
    if not reference_tokens:
        raise ValueError("rouge_l: empty reference")
    if mode not in ("recall", "f1"):
        raise ValueError(f"rouge_l: unknown mode {mode!r}")
    lcs = lcs_length(candidate_tokens, reference_tokens)
    recall = lcs / len(reference_tokens)
    if mode == "recall":
        return recall
    precision = lcs / len(candidate_tokens) if candidate_tokens else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def rouge_l_text(candidate: str, reference: str, mode: str = "recall") -> float:
    """Rouge-L on whitespace-split, lowercased text."""
    return rouge_l(candidate.lower().split(), reference.lower().split(), mode=mode)
