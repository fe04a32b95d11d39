"""Rank-based AUC against pair enumeration, plus report formatting."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import auc_oracle, random_labels
from ipof.evaluation import auc, improvement, report_header, report_row


class TestAuc:
    def test_perfect_separation(self):
        assert auc(np.array([0.9, 0.8, 0.2, 0.1]), np.array([1, 1, 0, 0])) == 1.0

    def test_inverted_separation(self):
        assert auc(np.array([0.1, 0.2, 0.8, 0.9]), np.array([1, 1, 0, 0])) == 0.0

    def test_all_tied_is_half(self):
        assert auc(np.array([3.0, 3.0, 3.0, 3.0]), np.array([1, 0, 1, 0])) == 0.5

    def test_mixed_example(self):
        # pairs: (2>1)=1, (2<3)=0 -> 0.5
        assert auc(np.array([2.0, 3.0, 1.0]), np.array([1, 0, 0])) == 0.5

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            auc(np.array([1.0, 2.0]), np.array([1, 1]))
        with pytest.raises(ValueError, match="positive"):
            auc(np.array([1.0, 2.0]), np.array([0, 0]))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="shape"):
            auc(np.array([1.0, 2.0, 3.0]), np.array([1, 0]))

    def test_bad_labels_rejected(self):
        with pytest.raises(ValueError, match="0 or 1"):
            auc(np.array([1.0, 2.0]), np.array([1, 2]))

    def test_matches_pair_enumeration(self):
        rng = np.random.default_rng(53)
        for trial in range(30):
            n = int(rng.integers(4, 80))
            labels = random_labels(rng, n)
            if trial % 2 == 0:
                scores = rng.normal(size=n)
            else:
                scores = rng.integers(0, 4, size=n).astype(np.float64)  # heavy ties
            assert auc(scores, labels) == auc_oracle(scores, labels)

    @given(
        scores=st.lists(st.integers(min_value=0, max_value=5), min_size=4, max_size=40),
        data=st.data(),
    )
    @settings(max_examples=150, deadline=None)
    def test_complement_identity(self, scores, data):
        n = len(scores)
        labels = data.draw(
            st.lists(st.integers(min_value=0, max_value=1), min_size=n, max_size=n)
        )
        if sum(labels) in (0, n):
            return
        scores = np.asarray(scores, dtype=np.float64)
        labels = np.asarray(labels)
        assert auc(scores, labels) + auc(-scores, labels) == 1.0

    def test_strictly_increasing_transform_invariance(self):
        rng = np.random.default_rng(59)
        scores = rng.normal(size=50)
        labels = random_labels(rng, 50)
        base = auc(scores, labels)
        assert auc(3.0 * scores + 7.0, labels) == base
        assert auc(np.arctan(scores), labels) == base

    def test_joint_permutation_invariance(self):
        rng = np.random.default_rng(61)
        scores = rng.integers(0, 3, size=40).astype(np.float64)
        labels = random_labels(rng, 40)
        perm = rng.permutation(40)
        assert auc(scores[perm], labels[perm]) == auc(scores, labels)


class TestImprovement:
    def test_reference_values(self):
        assert improvement(0.6450, 0.7657) == pytest.approx(18.71, abs=0.01)
        assert improvement(0.6709, 0.9294) == pytest.approx(38.53, abs=0.05)

    def test_no_change_is_zero(self):
        assert improvement(0.5, 0.5) == 0.0

    def test_decline_is_negative(self):
        assert improvement(0.8, 0.6) == pytest.approx(-25.0)

    def test_non_positive_baseline_rejected(self):
        with pytest.raises(ValueError, match="baseline"):
            improvement(0.0, 0.5)
        with pytest.raises(ValueError, match="baseline"):
            improvement(-0.1, 0.5)


class TestReport:
    def test_header(self):
        assert report_header() == (
            "dataset,detector,K,auc_initial,auc_final,improvement_pct,iterations,converged"
        )

    def test_full_row(self):
        row = report_row("synthetic", "lof(10)", 10, 0.5, 0.75, 50.0, 42, True)
        assert row == "synthetic,lof(10),10,0.5,0.75,50.0,42,true"

    def test_absent_fields_stay_empty(self):
        row = report_row("d", "scores", None, 0.8125, None, None, None, None)
        assert row == "d,scores,,0.8125,,,,"

    def test_false_flag(self):
        row = report_row("d", "lof(10)", 5, 0.5, 0.5, 0.0, 10000, False)
        assert row.endswith(",false")

    def test_floats_round_trip(self):
        value = 1.0 / 3.0
        row = report_row("d", "x", 1, value, value, value, 1, True)
        fields = row.split(",")
        assert float(fields[3]) == value
        assert "np.float64" not in row
