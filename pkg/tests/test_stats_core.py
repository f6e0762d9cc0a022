import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unlearn_gauge.stats_core import (
    KSResult,
    auc_roc,
    ecdf_eval,
    ks_pvalue,
    ks_statistic,
    ks_two_sample,
    lcs_length,
    rouge_l,
    rouge_l_text,
)

from oracles import (
    brute_auc,
    brute_ecdf,
    brute_ks_statistic,
    brute_rouge_l,
    highprec_ks_pvalue,
    is_subsequence,
)

floats_01 = st.floats(min_value=0.0, max_value=1.0, allow_nan=False, exclude_min=True)
samples = st.lists(floats_01, min_size=1, max_size=40)


class TestEcdf:
    def test_below_minimum(self):
        assert ecdf_eval([1, 2, 3], 0) == 0.0

    def test_at_maximum_uses_leq(self):
        assert ecdf_eval([1, 2, 3], 3) == 1.0

    def test_with_duplicates(self):
        # frozen from the counting oracle: #{x <= 2} = 3 of 4
        assert brute_ecdf([1, 2, 2, 5], 2) == 0.75
        assert ecdf_eval([1, 2, 2, 5], 2) == 0.75

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            ecdf_eval([], 1.0)

    @given(samples, st.floats(-2, 2, allow_nan=False))
    def test_matches_oracle(self, sample, x):
        assert ecdf_eval(sample, x) == brute_ecdf(sample, x)

    @given(samples, st.floats(-2, 2, allow_nan=False), st.floats(0, 1, allow_nan=False))
    def test_nondecreasing(self, sample, x, step):
        assert ecdf_eval(sample, x) <= ecdf_eval(sample, x + step)


class TestKsStatistic:
    def test_identical_samples(self):
        assert ks_statistic([0.3, 0.7, 0.7], [0.7, 0.3, 0.7]) == 0.0

    def test_disjoint_supports(self):
        assert ks_statistic([1, 2, 3], [4, 5, 6]) == 1.0

    def test_enumerated_example(self):
        a, b = [0.1, 0.4, 0.7], [0.2, 0.5, 0.9]
        expected = brute_ks_statistic(a, b)
        assert expected == pytest.approx(1 / 3)
        assert ks_statistic(a, b) == expected

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ks_statistic([], [1.0])

    @given(samples, samples)
    def test_symmetric_and_bounded(self, a, b):
        s = ks_statistic(a, b)
        assert s == ks_statistic(b, a)
        assert 0.0 <= s <= 1.0

    @given(samples, samples)
    def test_matches_brute_force_exactly(self, a, b):
        assert ks_statistic(a, b) == brute_ks_statistic(a, b)

    @given(samples, samples)
    def test_invariant_under_shared_monotone_map(self, a, b):
        # doubling is exact in binary floats, so this checks true invariance
        doubled = ks_statistic([2 * x for x in a], [2 * x for x in b])
        assert ks_statistic(a, b) == doubled


class TestKsPvalue:
    def test_degenerate_zero(self):
        assert ks_pvalue(0.0) == 1.0

    def test_tiny_argument_is_certainty(self):
        # below the series' convergence range the survival is 1 to machine precision
        assert ks_pvalue(1e-6) == 1.0
        assert ks_pvalue(0.03) == 1.0

    def test_classical_critical_point(self):
        # frozen from the extended-precision series oracle
        assert ks_pvalue(1.36) == pytest.approx(highprec_ks_pvalue(1.36), abs=1e-12)
        assert ks_pvalue(1.36) == pytest.approx(0.049485876755, abs=1e-9)

    def test_first_term_dominates_for_large_arguments(self):
        p = ks_pvalue(3.0)
        first_term = 2 * math.exp(-2 * 9.0)
        assert p == pytest.approx(first_term, rel=1e-7)
        # tail beyond the first term is far below the truncation threshold
        assert abs(p - first_term) < 1e-20

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            ks_pvalue(-0.1)

    def test_strictly_decreasing_on_grid(self):
        grid = np.linspace(0.3, 5.0, 200)
        values = [ks_pvalue(float(x)) for x in grid]
        assert all(a > b for a, b in zip(values, values[1:]))

    @given(st.floats(min_value=0.0, max_value=50.0, allow_nan=False))
    def test_always_a_probability(self, adjusted):
        assert 0.0 <= ks_pvalue(adjusted) <= 1.0


class TestKsTwoSample:
    def test_identical_samples(self):
        rng = np.random.default_rng(0)
        a = list(rng.random(100))
        res = ks_two_sample(a, list(a))
        assert isinstance(res, KSResult)
        assert res.statistic == 0.0
        assert res.p_value == 1.0
        assert res.n == res.m == 100

    def test_disjoint_supports(self):
        a = [float(i) for i in range(50)]
        b = [float(i + 100) for i in range(50)]
        res = ks_two_sample(a, b)
        assert res.statistic == 1.0
        assert res.adjusted == pytest.approx(5.0)
        assert res.p_value < 1e-10

    def test_adjustment_formula(self):
        res = ks_two_sample([1, 2, 3], [2, 3, 4, 5])
        assert res.adjusted == pytest.approx(res.statistic * math.sqrt(12 / 7))

    def test_matches_independent_reference(self):
        # seeded standard-uniform draws vs a from-scratch reimplementation
        rng = np.random.default_rng(42)
        a, b = list(rng.random(400)), list(rng.random(400))
        res = ks_two_sample(a, b)
        ref_stat = brute_ks_statistic(a, b)
        ref_p = highprec_ks_pvalue(ref_stat * math.sqrt(400 * 400 / 800))
        assert res.statistic == ref_stat
        assert res.p_value == pytest.approx(ref_p, abs=1e-9)

    def test_null_pvalues_roughly_uniform(self):
        # interleaved same-distribution draws: rejection rate near the nominal level
        rng = np.random.default_rng(7)
        low = 0
        trials = 1000
        for _ in range(trials):
            pooled = rng.random(400)
            a, b = pooled[::2], pooled[1::2]
            if ks_two_sample(a, b).p_value < 0.05:
                low += 1
        assert 0.02 <= low / trials <= 0.09


class TestAucRoc:
    def test_perfect_separation(self):
        assert auc_roc([0.8, 0.9], [0.1, 0.2]) == 1.0

    def test_identical_multisets(self):
        assert auc_roc([0.3, 0.5], [0.5, 0.3]) == 0.5

    def test_three_of_four_pairs(self):
        assert auc_roc([0.9, 0.4], [0.5, 0.1]) == 0.75

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            auc_roc([], [0.1])

    @given(st.lists(st.integers(0, 5), min_size=1, max_size=15),
           st.lists(st.integers(0, 5), min_size=1, max_size=15))
    def test_matches_pairwise_oracle_exactly(self, mem, non):
        assert auc_roc(mem, non) == brute_auc(mem, non)

    @given(st.lists(st.integers(0, 4), min_size=1, max_size=12),
           st.lists(st.integers(0, 4), min_size=1, max_size=12))
    def test_complementarity(self, mem, non):
        # exact at the pair-counting level; float rounding allows one ulp in the sum
        total = auc_roc(mem, non) + auc_roc(non, mem)
        assert total == pytest.approx(1.0, abs=1e-15)


class TestRougeL:
    def test_identical_sequences(self):
        toks = "a b c".split()
        assert rouge_l(toks, toks, "recall") == 1.0
        assert rouge_l(toks, toks, "f1") == 1.0

    def test_no_overlap(self):
        assert rouge_l(["x"], ["y", "z"], "recall") == 0.0
        assert rouge_l(["x"], ["y", "z"], "f1") == 0.0

    def test_partial_overlap(self):
        cand = "the cat sat".split()
        ref = "the dog sat down".split()
        assert rouge_l(cand, ref, "recall") == pytest.approx(0.5)
        assert rouge_l(cand, ref, "f1") == pytest.approx(4 / 7)

    def test_empty_candidate_scores_zero(self):
        assert rouge_l([], ["a"], "recall") == 0.0
        assert rouge_l([], ["a"], "f1") == 0.0

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError):
            rouge_l(["a"], [], "recall")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            rouge_l(["a"], ["a"], "precision")

    def test_text_variant_lowercases_and_splits(self):
        assert rouge_l_text("The Cat", "the cat", "recall") == 1.0

    @given(st.lists(st.sampled_from("abcd"), max_size=10),
           st.lists(st.sampled_from("abcd"), min_size=1, max_size=10),
           st.sampled_from(["recall", "f1"]))
    def test_matches_dp_oracle(self, cand, ref, mode):
        assert rouge_l(cand, ref, mode) == brute_rouge_l(cand, ref, mode)

    @given(st.lists(st.sampled_from("abc"), min_size=1, max_size=8),
           st.lists(st.sampled_from("abc"), min_size=1, max_size=8))
    def test_full_recall_iff_reference_is_subsequence(self, cand, ref):
        assert (rouge_l(cand, ref, "recall") == 1.0) == is_subsequence(ref, cand)

    @given(st.lists(st.sampled_from("ab"), min_size=1, max_size=8))
    def test_lcs_of_self(self, toks):
        assert lcs_length(toks, toks) == len(toks)
