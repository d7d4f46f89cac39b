import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mutsel.data import (
    DataError,
    Dataset,
    DegenerateDataError,
    EmptyCsvError,
    FeatureScoreTable,
    FoldPlanError,
    LabelClassError,
    MissingColumnError,
    MutationPlan,
    NonNumericCellError,
    anova_f_scores,
    flip_count,
    load_csv,
    make_fold_plan,
    make_synthetic,
    mutate_labels,
    select_k_best,
    synthetic_from_spec,
    validate_synthetic_spec,
)
from oracles import anova_f_by_hand


class TestDataset:
    def test_coercion_and_shapes(self):
        ds = Dataset([[1, 2], [3, 4]], [0, 1])
        assert ds.features.dtype == np.float64
        assert ds.labels.dtype == np.int64
        assert ds.n_samples == 2 and ds.n_features == 2

    def test_arrays_frozen(self, small_dataset):
        with pytest.raises(ValueError):
            small_dataset.features[0, 0] = 99.0
        with pytest.raises(ValueError):
            small_dataset.labels[0] = 1

    def test_label_values_validated(self):
        with pytest.raises(DataError):
            Dataset([[1.0], [2.0]], [0, 2])

    def test_nonfinite_feature_rejected(self):
        with pytest.raises(DataError):
            Dataset([[1.0], [np.nan]], [0, 1])

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            Dataset([[1.0], [2.0]], [0, 1, 1])

    def test_class_counts(self):
        ds = Dataset([[0.0]] * 5, [0, 0, 1, 1, 1])
        assert ds.class_counts() == (2, 3)
        assert ds.has_both_classes()
        assert not Dataset([[0.0]] * 2, [1, 1]).has_both_classes()

    def test_take_and_with_labels(self, small_dataset):
        sub = small_dataset.take([3, 1, 4])
        assert sub.n_samples == 3
        assert np.array_equal(sub.features, small_dataset.features[[3, 1, 4]])
        relab = small_dataset.with_labels(1 - small_dataset.labels)
        assert np.array_equal(relab.features, small_dataset.features)
        assert np.array_equal(relab.labels, 1 - small_dataset.labels)

    def test_fingerprint_sensitivity(self, small_dataset):
        fp = small_dataset.fingerprint()
        assert fp == small_dataset.fingerprint()
        other = small_dataset.with_labels(1 - small_dataset.labels)
        assert other.fingerprint() != fp


class TestMutation:
    def test_flip_count_rounds_half_up(self):
        assert flip_count(0.2, 10) == 2
        assert flip_count(0.25, 10) == 3
        assert flip_count(0.1, 5) == 1
        assert flip_count(0.0, 100) == 0
        assert flip_count(0.3, 9) == 3

    def test_exact_count_and_determinism(self, noisy_dataset):
        lab1, plan1 = mutate_labels(noisy_dataset, 0.2, 42)
        lab2, plan2 = mutate_labels(noisy_dataset, 0.2, 42)
        assert np.array_equal(lab1, lab2)
        assert np.array_equal(plan1.flipped_indices, plan2.flipped_indices)
        assert plan1.flipped_indices.shape[0] == flip_count(
            0.2, noisy_dataset.n_samples)
        changed = lab1 != noisy_dataset.labels
        assert changed.sum() == plan1.flipped_indices.shape[0]

    def test_involution(self, noisy_dataset):
        lab, plan = mutate_labels(noisy_dataset, 0.3, 5)
        assert np.array_equal(plan.apply(lab), noisy_dataset.labels)

    def test_eta_zero_flips_nothing(self, noisy_dataset):
        lab, plan = mutate_labels(noisy_dataset, 0.0, 1)
        assert np.array_equal(lab, noisy_dataset.labels)
        assert plan.flipped_indices.shape[0] == 0

    def test_eta_range(self, noisy_dataset):
        with pytest.raises(DataError):
            mutate_labels(noisy_dataset, -0.01, 0)
        with pytest.raises(DataError):
            mutate_labels(noisy_dataset, 1.0, 0)

    def test_plan_validates_ordering(self):
        with pytest.raises(DataError):
            MutationPlan(0.2, 0, np.array([3, 1]))
        with pytest.raises(DataError):
            MutationPlan(0.2, 0, np.array([1, 1]))

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(min_value=4, max_value=400),
        eta=st.floats(min_value=0.0, max_value=0.95),
        seed=st.integers(min_value=0, max_value=2**32),
    )
    def test_mutation_contract_property(self, n, eta, seed):
        ds = Dataset(np.zeros((n, 1)), np.arange(n) % 2)
        lab, plan = mutate_labels(ds, eta, seed)
        k = plan.flipped_indices.shape[0]
        assert k == flip_count(eta, n)
        assert (lab != ds.labels).sum() == k
        assert np.array_equal(plan.apply(lab), ds.labels)
        idx = plan.flipped_indices
        assert np.array_equal(np.unique(idx), idx)


class TestFoldPlan:
    def test_even_split(self):
        ds = Dataset(np.zeros((10, 1)), np.arange(10) % 2)
        plan = make_fold_plan(ds, 5, seed=0)
        sizes = [plan.test_indices(j).shape[0] for j in range(5)]
        assert sizes == [2] * 5

    def test_remainder_spread(self):
        ds = Dataset(np.zeros((11, 1)), np.arange(11) % 2)
        plan = make_fold_plan(ds, 3, seed=0)
        sizes = sorted(plan.test_indices(j).shape[0] for j in range(3))
        assert sizes == [3, 4, 4]

    def test_partition_covers_everything(self, noisy_dataset):
        plan = make_fold_plan(noisy_dataset, 7, seed=3)
        seen = np.concatenate([plan.test_indices(j) for j in range(7)])
        assert np.array_equal(np.sort(seen),
                              np.arange(noisy_dataset.n_samples))
        for j in range(7):
            tr = plan.train_indices(j)
            te = plan.test_indices(j)
            assert np.intersect1d(tr, te).size == 0
            assert tr.shape[0] + te.shape[0] == noisy_dataset.n_samples

    def test_determinism_and_seed_sensitivity(self, noisy_dataset):
        a = make_fold_plan(noisy_dataset, 5, seed=9)
        b = make_fold_plan(noisy_dataset, 5, seed=9)
        c = make_fold_plan(noisy_dataset, 5, seed=10)
        assert np.array_equal(a.assignment, b.assignment)
        assert not np.array_equal(a.assignment, c.assignment)

    def test_k_bounds(self, noisy_dataset):
        with pytest.raises(FoldPlanError):
            make_fold_plan(noisy_dataset, 1, seed=0)
        with pytest.raises(FoldPlanError):
            make_fold_plan(noisy_dataset, noisy_dataset.n_samples + 1, seed=0)

    def test_stratified_balanced_example(self):
        ds = Dataset(np.zeros((12, 1)), np.array([0] * 6 + [1] * 6))
        plan = make_fold_plan(ds, 3, seed=4, stratified=True)
        for j in range(3):
            te = plan.test_indices(j)
            labs = ds.labels[te]
            assert (labs == 0).sum() == 2 and (labs == 1).sum() == 2

    def test_stratified_spread(self):
        ds = Dataset(np.zeros((23, 1)),
                     np.array([0] * 13 + [1] * 10))
        plan = make_fold_plan(ds, 4, seed=1, stratified=True)
        sizes = [plan.test_indices(j).shape[0] for j in range(4)]
        assert max(sizes) - min(sizes) <= 1
        for cls in (0, 1):
            per = [
                int((ds.labels[plan.test_indices(j)] == cls).sum())
                for j in range(4)
            ]
            assert max(per) - min(per) <= 1

    def test_stratified_infeasible(self):
        ds = Dataset(np.zeros((10, 1)), np.array([0] * 8 + [1] * 2))
        with pytest.raises(FoldPlanError):
            make_fold_plan(ds, 3, seed=0, stratified=True)

    def test_iter_folds_order(self, noisy_dataset):
        plan = make_fold_plan(noisy_dataset, 4, seed=2)
        folds = list(plan.iter_folds())
        assert [f[0] for f in folds] == [0, 1, 2, 3]
        for j, tr, te in folds:
            assert np.array_equal(te, plan.test_indices(j))
            assert np.array_equal(tr, plan.train_indices(j))


class TestAnova:
    def test_textbook_two_group_value(self):
        # class 0 feature values {1,2,3}, class 1 {7,8,9}: between sum of
        # squares 54 on 1 dof, within 4 on 4 dof, so F = 54 exactly
        ds = Dataset(np.array([[1.0], [2.0], [3.0], [7.0], [8.0], [9.0]]),
                     np.array([0, 0, 0, 1, 1, 1]))
        table = anova_f_scores(ds)
        assert table.f_scores[0] == 54.0
        assert anova_f_by_hand([1, 2, 3], [7, 8, 9]) == 54.0

    def test_matches_hand_route_on_random_data(self, rng):
        X = rng.normal(size=(40, 6))
        y = (rng.random(40) < 0.5).astype(np.int64)
        y[:2] = [0, 1]
        ds = Dataset(X, y)
        table = anova_f_scores(ds)
        for j in range(6):
            ref = anova_f_by_hand(X[y == 0, j], X[y == 1, j])
            assert table.f_scores[j] == pytest.approx(ref, rel=1e-10)

    def test_row_permutation_invariance_exact(self, rng):
        for trial in range(10):
            X = rng.normal(size=(30, 5))
            y = np.array([0, 1] * 15)
            ds = Dataset(X, y)
            base = anova_f_scores(ds)
            perm = rng.permutation(30)
            shuffled = Dataset(X[perm], y[perm])
            other = anova_f_scores(shuffled)
            assert np.array_equal(base.f_scores, other.f_scores)
            assert np.array_equal(base.ranking, other.ranking)

    def test_constant_feature_scores_zero(self):
        X = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 7.0], [5.0, 8.0]])
        ds = Dataset(X, np.array([0, 0, 1, 1]))
        table = anova_f_scores(ds)
        assert table.f_scores[0] == 0.0

    def test_zero_within_variance_ranks_top(self):
        # feature 0 separates perfectly with no spread: infinite F is
        # mapped to one more than the best finite score
        X = np.array([[0.0, 1.0], [0.0, 2.0], [1.0, 7.0], [1.0, 8.0]])
        ds = Dataset(X, np.array([0, 0, 1, 1]))
        table = anova_f_scores(ds)
        assert table.f_scores[0] == table.f_scores[1] + 1.0
        assert table.ranking[0] == 0

    def test_tie_breaks_to_lower_index(self):
        X = np.array([[1.0, 1.0], [2.0, 2.0], [7.0, 7.0], [8.0, 8.0]])
        ds = Dataset(X, np.array([0, 0, 1, 1]))
        table = anova_f_scores(ds)
        assert table.f_scores[0] == table.f_scores[1]
        assert table.ranking.tolist() == [0, 1]

    def test_single_class_rejected(self):
        ds = Dataset(np.zeros((4, 2)), np.zeros(4, dtype=int))
        with pytest.raises(DegenerateDataError):
            anova_f_scores(ds)

    def test_score_table_validation(self):
        with pytest.raises(DataError):
            FeatureScoreTable(np.array([-1.0, 2.0]), np.array([1, 0]))
        with pytest.raises(DataError):
            FeatureScoreTable(np.array([1.0, 2.0]), np.array([0, 0]))


class TestSelectKBest:
    def test_keeps_original_column_order(self, rng):
        X = rng.normal(size=(30, 4))
        X[:, 2] += 5.0 * (np.arange(30) % 2)
        ds = Dataset(X, np.arange(30) % 2)
        table = anova_f_scores(ds)
        top1 = select_k_best(ds, table, 1)
        assert np.array_equal(top1.features[:, 0], X[:, 2])
        top3 = select_k_best(ds, table, 3)
        kept = np.sort(table.ranking[:3])
        assert np.array_equal(top3.features, X[:, kept])

    def test_selections_nest(self, rng):
        X = rng.normal(size=(50, 8))
        y = np.arange(50) % 2
        X[:, 1] += 2.0 * y
        X[:, 6] += 4.0 * y
        ds = Dataset(X, y)
        table = anova_f_scores(ds)
        cols = {
            k: set(np.sort(table.ranking[:k]).tolist()) for k in (1, 3, 5, 8)
        }
        assert cols[1] <= cols[3] <= cols[5] <= cols[8]
        full = select_k_best(ds, table, 8)
        assert np.array_equal(full.features, X)

    def test_k_bounds(self, small_dataset):
        table = anova_f_scores(small_dataset)
        with pytest.raises(DataError):
            select_k_best(small_dataset, table, 0)
        with pytest.raises(DataError):
            select_k_best(small_dataset, table,
                          small_dataset.n_features + 1)

    def test_name_and_feature_names_follow(self):
        ds = Dataset([[1.0, 10.0], [2.0, 20.0], [7.0, 10.0], [8.0, 20.0]],
                     [0, 0, 1, 1], feature_names=("a", "b"), name="toy")
        table = anova_f_scores(ds)
        sub = select_k_best(ds, table, 1)
        assert sub.name == "toy[k=1]"
        assert sub.feature_names == ("a",)


class TestSynthetic:
    def test_determinism(self):
        a = make_synthetic(50, 3, 2.0, 0.1, seed=5)
        b = make_synthetic(50, 3, 2.0, 0.1, seed=5)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_balance_and_noise_count(self):
        clean = make_synthetic(101, 2, 3.0, 0.0, seed=8)
        assert clean.class_counts()[1] == 50
        noisy = make_synthetic(101, 2, 3.0, 0.1, seed=8)
        assert np.array_equal(clean.features, noisy.features)
        assert (clean.labels != noisy.labels).sum() == flip_count(0.1, 101)

    def test_informative_columns_only(self):
        one = make_synthetic(40, 2, 6.0, 0.0, seed=3, n_informative=1)
        two = make_synthetic(40, 2, 6.0, 0.0, seed=3, n_informative=2)
        assert np.array_equal(one.features[:, 0], two.features[:, 0])
        assert not np.array_equal(one.features[:, 1], two.features[:, 1])
        # the pure-noise axis carries no class signal worth selecting
        table = anova_f_scores(one)
        assert table.ranking[0] == 0

    def test_separation_scales_distance(self):
        near = make_synthetic(400, 1, 1.0, 0.0, seed=2)
        far = make_synthetic(400, 1, 5.0, 0.0, seed=2)
        def gap(ds):
            x = ds.features[:, 0]
            return x[ds.labels == 1].mean() - x[ds.labels == 0].mean()
        assert gap(far) - gap(near) == pytest.approx(4.0, abs=0.3)

    def test_validation_errors(self):
        for bad in (
            {"n_samples": 3, "n_features": 1, "class_separation": 1.0,
             "label_noise_rate": 0.0, "seed": 0},
            {"n_samples": 10, "n_features": 0, "class_separation": 1.0,
             "label_noise_rate": 0.0, "seed": 0},
            {"n_samples": 10, "n_features": 1, "class_separation": -1.0,
             "label_noise_rate": 0.0, "seed": 0},
            {"n_samples": 10, "n_features": 1, "class_separation": 1.0,
             "label_noise_rate": 0.5, "seed": 0},
            {"n_samples": 10, "n_features": 2, "class_separation": 1.0,
             "label_noise_rate": 0.0, "seed": 0, "n_informative": 3},
            {"n_samples": 10, "n_features": 2, "class_separation": 1.0,
             "label_noise_rate": 0.0, "seed": 0, "bogus": 1},
            {"n_features": 2, "class_separation": 1.0,
             "label_noise_rate": 0.0, "seed": 0},
        ):
            with pytest.raises(DataError):
                validate_synthetic_spec(bad)

    def test_spec_roundtrip(self):
        spec = {"n_samples": 24, "n_features": 3, "class_separation": 2.0,
                "label_noise_rate": 0.1, "seed": 91, "name": "s"}
        ds = synthetic_from_spec(spec)
        direct = make_synthetic(24, 3, 2.0, 0.1, seed=91, name="s")
        assert np.array_equal(ds.features, direct.features)
        assert np.array_equal(ds.labels, direct.labels)


class TestLoadCsv:
    def _write(self, tmp_path, text, name="d.csv"):
        p = tmp_path / name
        p.write_text(text)
        return p

    def test_header_and_named_label(self, tmp_path):
        p = self._write(tmp_path, "a,b,sex\n1.5,2,M\n3,4,F\n5,6,M\n")
        ds = load_csv(p, "sex")
        assert ds.feature_names == ("a", "b")
        # F sorts before M, so F maps to class 0
        assert ds.labels.tolist() == [1, 0, 1]
        assert ds.features[0].tolist() == [1.5, 2.0]

    def test_integer_label_no_header(self, tmp_path):
        p = self._write(tmp_path, "1,2,R\n3,4,M\n5,6,R\n")
        ds = load_csv(p, 2)
        assert ds.feature_names is None
        assert ds.n_samples == 3
        assert ds.labels.tolist() == [1, 0, 1]

    def test_integer_label_with_header_detected(self, tmp_path):
        p = self._write(tmp_path, "x,y,cls\n1,2,a\n3,4,b\n")
        ds = load_csv(p, 2)
        assert ds.feature_names == ("x", "y")
        assert ds.n_samples == 2

    def test_three_classes_rejected(self, tmp_path):
        p = self._write(tmp_path, "1,a\n2,b\n3,c\n")
        with pytest.raises(LabelClassError):
            load_csv(p, 1)

    def test_single_class_rejected(self, tmp_path):
        p = self._write(tmp_path, "1,a\n2,a\n")
        with pytest.raises(LabelClassError):
            load_csv(p, 1)

    def test_non_numeric_cell_reports_position(self, tmp_path):
        p = self._write(tmp_path, "1,2,a\n3,oops,b\n")
        with pytest.raises(NonNumericCellError, match="line 2"):
            load_csv(p, 2)

    def test_non_finite_rejected(self, tmp_path):
        p = self._write(tmp_path, "1,2,a\nnan,4,b\n")
        with pytest.raises(NonNumericCellError):
            load_csv(p, 2)

    def test_empty_file(self, tmp_path):
        p = self._write(tmp_path, "")
        with pytest.raises(EmptyCsvError):
            load_csv(p, 0)

    def test_header_only(self, tmp_path):
        p = self._write(tmp_path, "a,b,c\n")
        with pytest.raises(EmptyCsvError):
            load_csv(p, "c")

    def test_missing_named_column(self, tmp_path):
        p = self._write(tmp_path, "a,b\n1,x\n2,y\n")
        with pytest.raises(MissingColumnError):
            load_csv(p, "label")

    def test_label_index_out_of_range(self, tmp_path):
        p = self._write(tmp_path, "1,a\n2,b\n")
        with pytest.raises(MissingColumnError):
            load_csv(p, 5)

    def test_ragged_rows_rejected(self, tmp_path):
        p = self._write(tmp_path, "1,2,a\n3,b\n")
        with pytest.raises(NonNumericCellError, match="line 2"):
            load_csv(p, 2)

    def test_blank_lines_skipped(self, tmp_path):
        p = self._write(tmp_path, "1,2,a\n\n3,4,b\n   \n")
        ds = load_csv(p, 2)
        assert ds.n_samples == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "absent.csv", 0)
