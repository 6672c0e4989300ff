import numpy as np
import pytest

from morphoprobe.analysis import EmbeddingRecord, lda_fit, lda_project
from oracles import oracle_axes, oracle_scatters
from morphoprobe.errors import BadInput, DegenerateClasses, SingularScatter


def records_from(X, labels):
    return [EmbeddingRecord(wordform=f"w{i}", class_label=str(lab), vector=np.asarray(x, dtype=float))
            for i, (x, lab) in enumerate(zip(X, labels))]


def random_instance(rng, dim, n_classes, per_class=20, spread=3.0):
    X, labels = [], []
    for c in range(n_classes):
        center = rng.normal(scale=spread, size=dim)
        X.extend(center + rng.normal(size=(per_class, dim)))
        labels.extend([c] * per_class)
    return np.array(X), labels


class TestLdaFit:
    def test_two_class_closed_form(self):
        # within-scatter is the identity by construction, means (0,0) and (1,0)
        offsets = np.array([[0.5, 0.0], [-0.5, 0.0], [0.0, 0.5], [0.0, -0.5]])
        X = np.vstack([offsets, offsets + [1.0, 0.0]])
        labels = ["a"] * 4 + ["b"] * 4
        model = lda_fit(records_from(X, labels), shrinkage=0.0)
        np.testing.assert_allclose(model.within_scatter, np.eye(2), atol=1e-12)
        assert model.n_axes == 1
        np.testing.assert_allclose(model.axes[0], [1.0, 0.0], atol=1e-9)

    def test_four_classes_give_three_axes(self):
        rng = np.random.default_rng(0)
        X, labels = random_instance(rng, dim=5, n_classes=4)
        model = lda_fit(records_from(X, labels))
        assert model.n_axes == 3

    def test_axis_count_capped_by_dimension(self):
        rng = np.random.default_rng(1)
        X, labels = random_instance(rng, dim=2, n_classes=4)
        model = lda_fit(records_from(X, labels))
        assert model.n_axes == 2

    def test_axes_unit_norm_and_sign_fixed(self):
        rng = np.random.default_rng(2)
        X, labels = random_instance(rng, dim=6, n_classes=3)
        model = lda_fit(records_from(X, labels))
        for axis in model.axes:
            assert np.linalg.norm(axis) == pytest.approx(1.0, abs=1e-12)
            first_nonzero = axis[np.nonzero(np.abs(axis) > 1e-12)[0][0]]
            assert first_nonzero > 0

    def test_eigenvalues_nonnegative_descending(self):
        rng = np.random.default_rng(3)
        X, labels = random_instance(rng, dim=4, n_classes=3)
        model = lda_fit(records_from(X, labels))
        assert np.all(model.eigenvalues >= 0)
        assert np.all(np.diff(model.eigenvalues) <= 1e-12)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            dim = int(rng.integers(2, 7))
            n_classes = int(rng.integers(3, 5))
            X, labels = random_instance(rng, dim=dim, n_classes=n_classes)
            model = lda_fit(records_from(X, labels), shrinkage=1e-3)
            expected_axes, _ = oracle_axes(X, labels, shrinkage=1e-3)
            assert model.axes.shape == expected_axes.shape
            for mine, ref in zip(model.axes, expected_axes):
                assert min(np.linalg.norm(mine - ref), np.linalg.norm(mine + ref)) < 1e-6

    def test_scatters_match_oracle(self):
        rng = np.random.default_rng(5)
        X, labels = random_instance(rng, dim=3, n_classes=3)
        model = lda_fit(records_from(X, labels))
        within, between = oracle_scatters(X, labels)
        np.testing.assert_allclose(model.within_scatter, within, atol=1e-9)
        np.testing.assert_allclose(model.between_scatter, between, atol=1e-9)

    def test_one_class_rejected(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(8, 3))
        with pytest.raises(DegenerateClasses):
            lda_fit(records_from(X, ["a"] * 8))

    def test_tiny_class_rejected(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(5, 3))
        with pytest.raises(DegenerateClasses):
            lda_fit(records_from(X, ["a", "a", "a", "a", "b"]))

    def test_non_finite_rejected(self):
        X = np.array([[0.0, 1.0], [1.0, np.nan], [2.0, 0.0], [3.0, 1.0]])
        with pytest.raises(BadInput):
            lda_fit(records_from(X, ["a", "a", "b", "b"]))

    def test_singular_scatter_without_shrinkage(self):
        # all points share one direction: within-scatter is rank deficient
        X = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
        with pytest.raises(SingularScatter):
            lda_fit(records_from(X, ["a", "a", "b", "b"]), shrinkage=0.0)


class TestLdaProject:
    def test_class_means_separate_with_opposite_signs(self):
        rng = np.random.default_rng(8)
        X, labels = random_instance(rng, dim=4, n_classes=2)
        records = records_from(X, labels)
        model = lda_fit(records)
        coords = lda_project(model, records)[:, 0]
        mean_a = np.mean([c for c, lab in zip(coords, labels) if lab == 0])
        mean_b = np.mean([c for c, lab in zip(coords, labels) if lab == 1])
        assert mean_a * mean_b < 0

    def test_translation_invariance(self):
        rng = np.random.default_rng(9)
        X, labels = random_instance(rng, dim=5, n_classes=3)
        records = records_from(X, labels)
        shifted = records_from(X + 17.3, labels)
        model = lda_fit(records)
        model_shifted = lda_fit(shifted)
        np.testing.assert_allclose(
            lda_project(model, records), lda_project(model_shifted, shifted), atol=1e-9
        )

    def test_scaling_preserves_class_mean_order(self):
        rng = np.random.default_rng(10)
        X, labels = random_instance(rng, dim=4, n_classes=3)
        model = lda_fit(records_from(X, labels))
        scaled_model = lda_fit(records_from(X * 4.0, labels))

        def mean_order(m, data):
            recs = records_from(data, labels)
            coords = lda_project(m, recs)[:, 0]
            means = [np.mean([c for c, lab in zip(coords, labels) if lab == k]) for k in range(3)]
            return np.argsort(means).tolist()

        assert mean_order(model, X) == mean_order(scaled_model, X * 4.0)

    def test_projects_unseen_classes(self):
        rng = np.random.default_rng(11)
        X, labels = random_instance(rng, dim=4, n_classes=2)
        records = records_from(X, labels)
        model = lda_fit(records)
        extra = records_from(rng.normal(size=(5, 4)), ["zeta"] * 5)
        coords = lda_project(model, records + extra)
        assert coords.shape == (len(records) + 5, 1)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(12)
        X, labels = random_instance(rng, dim=4, n_classes=2)
        model = lda_fit(records_from(X, labels))
        with pytest.raises(BadInput):
            lda_project(model, records_from(rng.normal(size=(2, 3)), ["a", "a"]))

    def test_bad_axis_index(self):
        rng = np.random.default_rng(13)
        X, labels = random_instance(rng, dim=4, n_classes=2)
        records = records_from(X, labels)
        model = lda_fit(records)
        with pytest.raises(BadInput):
            lda_project(model, records, axis_indices=[1])
