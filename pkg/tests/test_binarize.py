"""Tests for threshold selection and score binarization.

Oracle: a naive recount that, for every candidate threshold, classifies
each sample by strict score > tau and counts rates directly. The fast
sorted-sweep must reproduce it exactly.
"""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyeval import (
    DomainError,
    NotFittedError,
    RocPoint,
    ScoredSample,
    ThresholdBinarizer,
    binarize_scores,
    rho_eta_at_threshold,
    roc_points,
    roc_to_csv,
    select_threshold,
    select_threshold_by_system,
)


def make(scores, gold, system="sys"):
    return [
        ScoredSample(f"i{k}", f"o{k}", system, float(s), int(g))
        for k, (s, g) in enumerate(zip(scores, gold))
    ]


def naive_roc(samples):
    """Recount (tau, tpr, fpr) at every candidate threshold directly."""
    scores = [s.score for s in samples]
    gold = [s.gold for s in samples]
    n_pos = sum(gold)
    n_neg = len(gold) - n_pos
    out = []
    for tau in [-math.inf] + sorted(set(scores)):
        tp = sum(1 for s, g in zip(scores, gold) if g == 1 and s > tau)
        fp = sum(1 for s, g in zip(scores, gold) if g == 0 and s > tau)
        out.append(
            (
                tau,
                tp / n_pos if n_pos else 0.0,
                fp / n_neg if n_neg else 0.0,
            )
        )
    return out


def naive_select(samples):
    pts = naive_roc(samples)
    best = min(pts, key=lambda p: (abs(p[1] - (1.0 - p[2])), -(p[1] + (1.0 - p[2])), p[0]))
    return best[0], best[1], 1.0 - best[2]


FIXTURE = make([0.9, 0.7, 0.6, 0.2], [1, 1, 0, 0])


class TestScoredSample:
    def test_casts_score_and_gold(self):
        s = ScoredSample("i", "o", "sys", 1, 1)
        assert s.score == 1.0 and isinstance(s.score, float)
        assert s.gold == 1 and isinstance(s.gold, int)

    def test_rejects_bad_gold(self):
        with pytest.raises(DomainError, match="gold must be 0 or 1"):
            ScoredSample("i", "o", "sys", 0.5, 2)

    def test_rejects_nan_score(self):
        with pytest.raises(DomainError, match="score must be a real number"):
            ScoredSample("i", "o", "sys", float("nan"), 1)


class TestBinarizeScores:
    def test_basic_split(self):
        assert binarize_scores(make([0.1, 0.9], [0, 1]), 0.5) == [0, 1]

    def test_infinite_threshold_rates_nothing_positive(self):
        assert binarize_scores(make([0.1, 0.9, 100.0], [0, 1, 1]), math.inf) == [0, 0, 0]

    def test_strict_inequality_at_boundary(self):
        # score == tau is rated 0, not 1
        assert binarize_scores(make([0.5], [1]), 0.5) == [0]

    def test_sentinel_rates_everything_positive(self):
        assert binarize_scores(make([-5.0, 0.0, 5.0], [0, 1, 0]), -math.inf) == [1, 1, 1]


class TestRocPoints:
    def test_fixture_point_at_balanced_threshold(self):
        pts = {p.tau: p for p in roc_points(FIXTURE)}
        assert pts[0.6].tpr == 1.0
        assert pts[0.6].fpr == 0.0
        assert pts[0.6].n_pos == 2 and pts[0.6].n_neg == 2

    def test_includes_sentinel_and_all_distinct_scores(self):
        pts = roc_points(FIXTURE)
        assert [p.tau for p in pts] == [-math.inf, 0.2, 0.6, 0.7, 0.9]
        assert pts[0].tpr == 1.0 and pts[0].fpr == 1.0

    def test_sorted_by_tau_with_monotone_rates(self):
        rng = np.random.default_rng(7)
        samples = make(rng.integers(0, 15, 500) / 15.0, rng.integers(0, 2, 500))
        pts = roc_points(samples)
        taus = [p.tau for p in pts]
        assert taus == sorted(taus)
        tprs = [p.tpr for p in pts]
        fprs = [p.fpr for p in pts]
        assert all(a >= b for a, b in zip(tprs, tprs[1:]))
        assert all(a >= b for a, b in zip(fprs, fprs[1:]))

    def test_each_point_reproducible_by_recount(self):
        rng = np.random.default_rng(11)
        samples = make(rng.integers(0, 10, 300) / 10.0, rng.integers(0, 2, 300))
        gold = [s.gold for s in samples]
        n_pos = sum(gold)
        n_neg = len(gold) - n_pos
        for pt in roc_points(samples):
            ratings = binarize_scores(samples, pt.tau)
            tp = sum(1 for r, g in zip(ratings, gold) if r == 1 and g == 1)
            fp = sum(1 for r, g in zip(ratings, gold) if r == 1 and g == 0)
            assert pt.tpr == tp / n_pos
            assert pt.fpr == fp / n_neg

    def test_matches_naive_recount_on_fixed_large_case(self):
        rng = np.random.default_rng(3)
        samples = make(rng.integers(0, 20, 200) / 20.0, rng.integers(0, 2, 200))
        got = [(p.tau, p.tpr, p.fpr) for p in roc_points(samples)]
        assert got == naive_roc(samples)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.tuples(st.integers(0, 6), st.integers(0, 1)),
            min_size=1,
            max_size=60,
        )
    )
    def test_matches_naive_recount(self, pairs):
        samples = make([a / 6.0 for a, _ in pairs], [g for _, g in pairs])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            got = [(p.tau, p.tpr, p.fpr) for p in roc_points(samples)]
        assert got == naive_roc(samples)

    def test_single_gold_class_warns_and_zeroes_missing_rate(self):
        with pytest.warns(UserWarning, match="only one gold class"):
            pts = roc_points(make([0.1, 0.9], [1, 1]))
        assert all(p.fpr == 0.0 for p in pts)

    def test_empty_rejected(self):
        with pytest.raises(DomainError, match="empty"):
            roc_points([])

    def test_random_scores_give_chance_auc(self):
        rng = np.random.default_rng(42)
        n = 10_000
        samples = make(rng.random(n), rng.integers(0, 2, n))
        pts = roc_points(samples)
        # ascending tau means descending fpr; reverse for the integral
        fprs = np.array([p.fpr for p in pts])[::-1]
        tprs = np.array([p.tpr for p in pts])[::-1]
        auc = float(np.trapezoid(tprs, fprs))
        assert abs(auc - 0.5) < 0.02

    def test_separable_scores_give_unit_auc(self):
        samples = make([0.1, 0.2, 0.3, 0.8, 0.9, 1.0], [0, 0, 0, 1, 1, 1])
        pts = roc_points(samples)
        fprs = np.array([p.fpr for p in pts])[::-1]
        tprs = np.array([p.tpr for p in pts])[::-1]
        assert float(np.trapezoid(tprs, fprs)) == 1.0


class TestRocPointSerialization:
    def test_sentinel_tau_serializes_as_null(self):
        d = roc_points(FIXTURE)[0].to_dict()
        assert d["tau"] is None

    def test_finite_tau_survives(self):
        d = roc_points(FIXTURE)[2].to_dict()
        assert d == {"tau": 0.6, "tpr": 1.0, "fpr": 0.0, "n_pos": 2, "n_neg": 2}

    def test_csv_keeps_sentinel_text_and_roundtrip_floats(self):
        text = roc_to_csv(roc_points(FIXTURE))
        lines = text.strip().split("\n")
        assert lines[0] == "tau,tpr,fpr,n_pos,n_neg"
        assert lines[1].startswith("-inf,")
        tau, tpr, fpr, n_pos, n_neg = lines[2].split(",")
        assert float(tau) == 0.2 and float(tpr) == 1.0 and float(fpr) == 0.5
        assert int(n_pos) == 2 and int(n_neg) == 2


class TestSelectThreshold:
    def test_fixture_selects_perfect_split(self):
        tau, rho_hat, eta_hat = select_threshold(FIXTURE)
        assert (tau, rho_hat, eta_hat) == (0.6, 1.0, 1.0)

    def test_separable_scores_reach_perfect_rates(self):
        samples = make([0.05, 0.1, 0.3, 0.7, 0.8, 0.95], [0, 0, 0, 1, 1, 1])
        tau, rho_hat, eta_hat = select_threshold(samples)
        assert rho_hat == 1.0 and eta_hat == 1.0
        assert tau == 0.3

    def test_anti_correlated_scores_give_sub_random_metric(self):
        # positives score lower than negatives: the balanced threshold
        # lands below 0.5 combined accuracy, the flip-rule regime
        samples = make([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0])
        tau, rho_hat, eta_hat = select_threshold(samples)
        assert rho_hat + eta_hat < 1.0
        assert (tau, rho_hat, eta_hat) == (0.2, 0.0, 0.0)

    def test_tie_break_prefers_more_informative_then_smaller_tau(self):
        # taus 0.2 and 0.9 both give |rho - eta| = 0 on the fixture;
        # 0.6 wins on rho + eta = 2
        got = select_threshold(FIXTURE)
        assert got == naive_select(FIXTURE)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.tuples(st.integers(0, 6), st.integers(0, 1)),
            min_size=2,
            max_size=60,
        )
    )
    def test_matches_naive_selection(self, pairs):
        gold = [g for _, g in pairs]
        if len(set(gold)) < 2:
            return
        samples = make([a / 6.0 for a, _ in pairs], gold)
        assert select_threshold(samples) == naive_select(samples)

    def test_monotone_transform_preserves_rates(self):
        rng = np.random.default_rng(5)
        scores = rng.random(400)
        gold = (scores + rng.normal(0, 0.4, 400) > 0.5).astype(int)
        if len(set(gold.tolist())) < 2:
            pytest.skip("degenerate draw")
        base = make(scores, gold)
        warped = make([math.exp(2.0 * s) for s in scores], gold)
        tau_a, rho_a, eta_a = select_threshold(base)
        tau_b, rho_b, eta_b = select_threshold(warped)
        assert (rho_a, eta_a) == (rho_b, eta_b)
        if math.isfinite(tau_a):
            assert tau_b == pytest.approx(math.exp(2.0 * tau_a), rel=1e-12)

    def test_rejects_mixed_systems_by_default(self):
        mixed = make([0.1, 0.9], [0, 1], system="a") + make([0.2, 0.8], [0, 1], system="b")
        with pytest.raises(DomainError, match="filter to one system"):
            select_threshold(mixed)

    def test_pool_flag_allows_mixing(self):
        mixed = make([0.1, 0.2], [0, 0], system="a") + make([0.8, 0.9], [1, 1], system="b")
        tau, rho_hat, eta_hat = select_threshold(mixed, pool=True)
        assert rho_hat == 1.0 and eta_hat == 1.0

    def test_per_system_selection(self):
        mixed = make([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1], system="a") + make(
            [0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0], system="b"
        )
        got = select_threshold_by_system(mixed)
        assert sorted(got) == ["a", "b"]
        assert got["a"][1] == 1.0 and got["a"][2] == 1.0
        assert got["b"][1] + got["b"][2] < 1.0

    def test_estimation_samples_remeasure_rates(self):
        fit = make([0.8, 0.9, 0.1, 0.2], [1, 1, 0, 0])
        held_out = make([0.1, 0.9, 0.5, 0.15], [1, 1, 0, 0])
        tau, rho_hat, eta_hat = select_threshold(fit, estimation_samples=held_out)
        assert tau == 0.2
        assert (rho_hat, eta_hat) == (0.5, 0.5)
        assert (rho_hat, eta_hat) == rho_eta_at_threshold(held_out, tau)

    def test_empty_estimation_samples_rejected(self):
        with pytest.raises(DomainError, match="estimation_samples"):
            select_threshold(FIXTURE, estimation_samples=[])

    def test_single_gold_class_rejected(self):
        with pytest.raises(DomainError, match="both gold classes"):
            select_threshold(make([0.1, 0.9], [1, 1]))

    def test_empty_rejected(self):
        with pytest.raises(DomainError, match="empty"):
            select_threshold([])


class TestRhoEtaAtThreshold:
    def test_exact_counts(self):
        rho_hat, eta_hat = rho_eta_at_threshold(FIXTURE, 0.65)
        # only 0.9 and 0.7 clear 0.65: tp=2/2, tn=2/2
        assert (rho_hat, eta_hat) == (1.0, 1.0)

    def test_empty_rejected(self):
        with pytest.raises(DomainError, match="empty"):
            rho_eta_at_threshold([], 0.5)


class TestThresholdBinarizer:
    def test_fit_selects_fixture_threshold(self):
        tb = ThresholdBinarizer().fit([0.2, 0.6, 0.7, 0.9], [0, 0, 1, 1])
        assert tb.threshold_ == 0.6
        assert tb.rho_ == 1.0 and tb.eta_ == 1.0
        assert [p.tau for p in tb.points_] == [-math.inf, 0.2, 0.6, 0.7, 0.9]

    def test_transform_is_strict(self):
        tb = ThresholdBinarizer().fit([0.2, 0.6, 0.7, 0.9], [0, 0, 1, 1])
        np.testing.assert_array_equal(tb.transform([0.1, 0.6, 0.61]), [0, 0, 1])

    def test_fit_transform_matches_fit_then_transform(self):
        X = [0.2, 0.6, 0.7, 0.9]
        y = [0, 0, 1, 1]
        np.testing.assert_array_equal(
            ThresholdBinarizer().fit_transform(X, y),
            ThresholdBinarizer().fit(X, y).transform(X),
        )

    def test_agrees_with_select_threshold(self):
        rng = np.random.default_rng(13)
        scores = rng.integers(0, 12, 250) / 12.0
        gold = rng.integers(0, 2, 250)
        tb = ThresholdBinarizer().fit(scores, gold)
        tau, rho_hat, eta_hat = select_threshold(make(scores, gold))
        assert (tb.threshold_, tb.rho_, tb.eta_) == (tau, rho_hat, eta_hat)

    def test_get_set_params(self):
        tb = ThresholdBinarizer()
        assert tb.get_params() == {"pool": False}
        assert tb.set_params(pool=True) is tb
        assert tb.pool is True
        with pytest.raises(DomainError, match="invalid parameter"):
            tb.set_params(bogus=1)

    def test_not_fitted(self):
        with pytest.raises(NotFittedError, match="not fitted"):
            ThresholdBinarizer().transform([0.5])

    def test_mixed_system_ids_rejected_unless_pooling(self):
        X = [0.1, 0.2, 0.8, 0.9]
        y = [0, 0, 1, 1]
        ids = ["a", "a", "b", "b"]
        with pytest.raises(DomainError, match="pool=True"):
            ThresholdBinarizer().fit(X, y, system_ids=ids)
        tb = ThresholdBinarizer(pool=True).fit(X, y, system_ids=ids)
        assert tb.rho_ == 1.0

    def test_fit_validation(self):
        with pytest.raises(DomainError, match="lengths differ"):
            ThresholdBinarizer().fit([0.1, 0.2], [0])
        with pytest.raises(DomainError, match="empty"):
            ThresholdBinarizer().fit([], [])
        with pytest.raises(DomainError, match="only 0 and 1"):
            ThresholdBinarizer().fit([0.1, 0.9], [0, 2])
        with pytest.raises(DomainError, match="both gold classes"):
            ThresholdBinarizer().fit([0.1, 0.9], [1, 1])
