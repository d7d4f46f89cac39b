"""Datasets and the operations that shape them.

Tabular binary-classification container plus label mutation, fold
planning, ANOVA F feature scoring/selection, a two-cluster synthetic
generator and CSV ingestion.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _seeds

__all__ = [
    "DataError",
    "EmptyCsvError",
    "NonNumericCellError",
    "LabelClassError",
    "MissingColumnError",
    "FoldPlanError",
    "DegenerateDataError",
    "Dataset",
    "MutationPlan",
    "FoldPlan",
    "FeatureScoreTable",
    "flip_count",
    "mutate_labels",
    "make_fold_plan",
    "anova_f_scores",
    "select_k_best",
    "make_synthetic",
    "validate_synthetic_spec",
    "synthetic_from_spec",
    "load_csv",
]


class DataError(ValueError):
    """Base class for dataset construction and ingestion failures."""


class EmptyCsvError(DataError):
    """CSV file holds no data rows."""


class NonNumericCellError(DataError):
    """A feature cell could not be parsed as a finite number."""


class LabelClassError(DataError):
    """Label column does not hold exactly two distinct values."""


class MissingColumnError(DataError):
    """Requested label column is absent."""


class FoldPlanError(DataError):
    """Fold plan request cannot be satisfied."""


class DegenerateDataError(DataError):
    """Operation needs more samples or both classes."""


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus binary labels.

    features : (n_samples, n_features) float64, all finite.
    labels   : (n_samples,) int64 with values in {0, 1}.

    Arrays are coerced, made C-contiguous and frozen read-only, so a
    Dataset can be shared across selection rounds without defensive
    copies.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple | None = None
    name: str = "dataset"

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        y = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        if X.ndim != 2:
            raise DataError("features must be 2-D, got shape %s" % (X.shape,))
        if y.ndim != 1:
            raise DataError("labels must be 1-D, got shape %s" % (y.shape,))
        if y.shape[0] != X.shape[0]:
            raise DataError(
                "%d labels for %d feature rows" % (y.shape[0], X.shape[0])
            )
        if X.size and not np.isfinite(X).all():
            r, c = np.argwhere(~np.isfinite(X))[0]
            raise DataError(
                "non-finite feature value at row %d, column %d" % (r, c)
            )
        bad = np.setdiff1d(np.unique(y), [0, 1])
        if bad.size:
            raise DataError("labels must be 0/1, found %s" % bad.tolist())
        if self.feature_names is not None:
            names = tuple(str(s) for s in self.feature_names)
            if len(names) != X.shape[1]:
                raise DataError(
                    "%d feature names for %d columns" % (len(names), X.shape[1])
                )
            object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "features", _readonly(X))
        object.__setattr__(self, "labels", _readonly(y))

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def class_counts(self):
        """(count of class 0, count of class 1)."""
        n1 = int(self.labels.sum())
        return self.n_samples - n1, n1

    def has_both_classes(self):
        n0, n1 = self.class_counts()
        return n0 > 0 and n1 > 0

    def take(self, indices, name=None):
        """Row subset as a new Dataset (copies)."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.features[idx],
            self.labels[idx],
            self.feature_names,
            name if name is not None else self.name,
        )

    def with_labels(self, labels, name=None):
        """Same features, different labels."""
        return Dataset(
            self.features,
            labels,
            self.feature_names,
            name if name is not None else self.name,
        )

    def fingerprint(self):
        """sha256 over shape and raw bytes; stable content identifier."""
        h = hashlib.sha256()
        h.update(repr(self.features.shape).encode())
        h.update(self.features.tobytes())
        h.update(self.labels.tobytes())
        return h.hexdigest()


def flip_count(eta, n):
    """Number of labels flipped at rate eta: round(eta * n), half up."""
    return int(math.floor(eta * n + 0.5))


@dataclass(frozen=True)
class MutationPlan:
    """Record of one label mutation draw.

    flipped_indices is sorted, unique, and exactly round(eta * n) long;
    applying the same plan twice restores the original labels.
    """

    eta: float
    seed: int
    flipped_indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.flipped_indices, dtype=np.int64)
        if idx.ndim != 1:
            raise DataError("flipped_indices must be 1-D")
        if idx.size and (np.diff(idx) <= 0).any():
            raise DataError("flipped_indices must be sorted and unique")
        object.__setattr__(self, "flipped_indices", _readonly(idx))

    def apply(self, labels):
        """Flip the planned indices in a copy of ``labels``."""
        out = np.array(labels, dtype=np.int64)
        out[self.flipped_indices] = 1 - out[self.flipped_indices]
        return out


def mutate_labels(dataset, eta, seed):
    """Flip round(eta * n) labels chosen uniformly without replacement.

    Returns (mutated_labels, MutationPlan). Any eta in [0, 1) is
    accepted here (eta = 0 flips nothing); the MV strategy itself
    restricts eta to (0, 0.5) so mutated data stays closer to the
    original labelling than to its complement.
    """
    if not 0.0 <= eta < 1.0:
        raise DataError("eta must lie in [0, 1), got %r" % (eta,))
    n = dataset.n_samples
    k = flip_count(eta, n)
    if k:
        chosen = _seeds.rng(seed).choice(n, size=k, replace=False)
        chosen = np.sort(chosen.astype(np.int64))
    else:
        chosen = np.empty(0, dtype=np.int64)
    plan = MutationPlan(float(eta), int(seed), chosen)
    return _readonly(plan.apply(dataset.labels)), plan


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of each sample to one of k folds.

    Fold sizes differ by at most one. ``assignment[i]`` is the fold that
    holds sample i as test data.
    """

    k: int
    assignment: np.ndarray
    seed: int
    stratified: bool = False

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        if a.ndim != 1:
            raise FoldPlanError("assignment must be 1-D")
        if self.k < 2:
            raise FoldPlanError("k must be at least 2, got %d" % self.k)
        if a.size and (a.min() < 0 or a.max() >= self.k):
            raise FoldPlanError("fold ids must lie in [0, k)")
        sizes = np.bincount(a, minlength=self.k)
        if sizes.size and sizes.max() - sizes.min() > 1:
            raise FoldPlanError(
                "fold sizes spread more than one: %s" % sizes.tolist()
            )
        object.__setattr__(self, "assignment", _readonly(a))

    @property
    def n_samples(self):
        return self.assignment.shape[0]

    def test_indices(self, fold):
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.assignment != fold)

    def iter_folds(self):
        for fold in range(self.k):
            yield fold, self.train_indices(fold), self.test_indices(fold)


def make_fold_plan(dataset, k, seed, stratified=False):
    """Random k-fold partition of the dataset's rows.

    Unstratified: one permutation chopped into contiguous chunks, the
    first n mod k folds one sample larger. Stratified: each class is
    permuted and dealt separately, per-class remainders going to the
    currently least-loaded folds, which keeps the global size spread at
    one and each class balanced within one across folds.
    """
    n = dataset.n_samples
    if k < 2:
        raise FoldPlanError("k must be at least 2, got %d" % k)
    if k > n:
        raise FoldPlanError("k = %d exceeds n_samples = %d" % (k, n))
    gen = _seeds.rng(seed)
    assignment = np.empty(n, dtype=np.int64)
    if not stratified:
        perm = gen.permutation(n)
        base, rem = divmod(n, k)
        pos = 0
        for fold in range(k):
            size = base + (1 if fold < rem else 0)
            assignment[perm[pos:pos + size]] = fold
            pos += size
    else:
        loads = np.zeros(k, dtype=np.int64)
        for cls in (0, 1):
            members = np.flatnonzero(dataset.labels == cls)
            n_c = members.size
            if n_c < k:
                raise FoldPlanError(
                    "stratification infeasible: class %d has %d samples "
                    "for k = %d" % (cls, n_c, k)
                )
            members = members[gen.permutation(n_c)]
            base, rem = divmod(n_c, k)
            quota = np.full(k, base, dtype=np.int64)
            if rem:
                order = np.lexsort((np.arange(k), loads))
                quota[order[:rem]] += 1
            pos = 0
            for fold in range(k):
                assignment[members[pos:pos + quota[fold]]] = fold
                pos += quota[fold]
            loads += quota
    return FoldPlan(int(k), assignment, int(seed), bool(stratified))


@dataclass(frozen=True)
class FeatureScoreTable:
    """Per-feature ANOVA F scores plus a descending ranking.

    ``ranking`` lists feature indices from the highest score down; equal
    scores rank the lower index first.
    """

    f_scores: np.ndarray
    ranking: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.f_scores, dtype=np.float64)
        r = np.asarray(self.ranking, dtype=np.int64)
        if s.ndim != 1 or r.shape != s.shape:
            raise DataError(
                "f_scores and ranking must be matching 1-D arrays"
            )
        if s.size and (s < 0).any():
            raise DataError("f_scores cannot be negative")
        if np.sort(r).tolist() != list(range(s.size)):
            raise DataError("ranking must be a permutation of the features")
        object.__setattr__(self, "f_scores", _readonly(s))
        object.__setattr__(self, "ranking", _readonly(r))


def anova_f_scores(dataset):
    """One-way ANOVA F score of each feature against the binary label.

    F = between-group mean square over within-group mean square with
    (1, n - 2) degrees of freedom. Globally constant features score 0.
    Features whose within-group variance vanishes while the group means
    differ (an infinite F) receive one more than the largest finite
    score so they rank on top without breaking comparisons. Group values
    are sorted before summation, which makes the result invariant to
    row permutations of the dataset.
    """
    if dataset.n_samples < 2:
        raise DegenerateDataError("ANOVA needs at least two samples")
    if not dataset.has_both_classes():
        raise DegenerateDataError("ANOVA needs both classes present")
    y = dataset.labels
    g0 = np.sort(dataset.features[y == 0], axis=0)
    g1 = np.sort(dataset.features[y == 1], axis=0)
    n0, n1 = g0.shape[0], g1.shape[0]
    n = n0 + n1
    sum0 = g0.sum(axis=0)
    sum1 = g1.sum(axis=0)
    mean0 = sum0 / n0
    mean1 = sum1 / n1
    grand = (sum0 + sum1) / n
    ssb = n0 * (mean0 - grand) ** 2 + n1 * (mean1 - grand) ** 2
    ssw = ((g0 - mean0) ** 2).sum(axis=0) + ((g1 - mean1) ** 2).sum(axis=0)
    msw = ssw / (n - 2)
    cmin = np.minimum(g0[0], g1[0])
    cmax = np.maximum(g0[-1], g1[-1])
    constant = cmax == cmin
    regular = ~constant & (msw > 0.0)
    infinite = ~constant & ~regular
    scores = np.zeros(dataset.n_features)
    scores[regular] = ssb[regular] / msw[regular]
    if infinite.any():
        top = scores[regular].max() if regular.any() else 0.0
        scores[infinite] = top + 1.0
    ranking = np.argsort(-scores, kind="stable").astype(np.int64)
    return FeatureScoreTable(scores, ranking)


def select_k_best(dataset, table, k):
    """Keep the k best-scoring features (original column order)."""
    if table.f_scores.shape[0] != dataset.n_features:
        raise DataError(
            "score table covers %d features, dataset has %d"
            % (table.f_scores.shape[0], dataset.n_features)
        )
    if not 1 <= k <= dataset.n_features:
        raise DataError(
            "k must lie in [1, %d], got %d" % (dataset.n_features, k)
        )
    keep = np.sort(table.ranking[:k])
    names = None
    if dataset.feature_names is not None:
        names = tuple(dataset.feature_names[j] for j in keep)
    return Dataset(
        dataset.features[:, keep],
        dataset.labels,
        names,
        "%s[k=%d]" % (dataset.name, k),
    )


def make_synthetic(n_samples, n_features, class_separation,
                   label_noise_rate, seed, n_informative=None,
                   name="synthetic"):
    """Two Gaussian clusters with optional label noise.

    Classes are balanced (floor(n/2) positives). Informative axes (the
    first n_informative, all by default) are shifted by half the class
    separation in opposite directions per class; remaining axes are pure
    standard normal noise. Label noise flips round(rate * n) labels.

    The draw order is fixed (class assignment, then features, then noise
    flips), so two calls sharing a seed and differing only in
    label_noise_rate produce identical features and differ in exactly
    the flipped labels.
    """
    if n_samples < 4:
        raise DataError("n_samples must be at least 4, got %d" % n_samples)
    if n_features < 1:
        raise DataError("n_features must be at least 1, got %d" % n_features)
    if not 0.0 <= label_noise_rate < 0.5:
        raise DataError(
            "label_noise_rate must lie in [0, 0.5), got %r"
            % (label_noise_rate,)
        )
    if class_separation < 0.0:
        raise DataError(
            "class_separation must be nonnegative, got %r"
            % (class_separation,)
        )
    if n_informative is None:
        n_informative = n_features
    if not 1 <= n_informative <= n_features:
        raise DataError(
            "n_informative must lie in [1, %d], got %d"
            % (n_features, n_informative)
        )
    gen = _seeds.rng(seed)
    base = np.zeros(n_samples, dtype=np.int64)
    base[:n_samples // 2] = 1
    clean = base[gen.permutation(n_samples)]
    X = gen.standard_normal((n_samples, n_features))
    shift = (2.0 * clean - 1.0) * (class_separation / 2.0)
    X[:, :n_informative] += shift[:, None]
    labels = clean
    k = flip_count(label_noise_rate, n_samples)
    if k:
        chosen = gen.choice(n_samples, size=k, replace=False)
        labels = clean.copy()
        labels[chosen] = 1 - labels[chosen]
    return Dataset(X, labels, None, name)


_SYNTH_KEYS = {
    "n_samples", "n_features", "class_separation", "label_noise_rate",
    "seed", "n_informative", "name",
}


def validate_synthetic_spec(spec):
    """Check a JSON-style generator spec; returns normalised kwargs.

    Raises DataError on missing/unknown keys or out-of-range values
    without generating anything.
    """
    if not isinstance(spec, dict):
        raise DataError("synthetic spec must be a mapping")
    unknown = set(spec) - _SYNTH_KEYS
    if unknown:
        raise DataError(
            "unknown synthetic spec keys: %s" % sorted(unknown)
        )
    for key in ("n_samples", "n_features", "class_separation",
                "label_noise_rate", "seed"):
        if key not in spec:
            raise DataError("synthetic spec is missing %r" % key)
    try:
        kwargs = {
            "n_samples": int(spec["n_samples"]),
            "n_features": int(spec["n_features"]),
            "class_separation": float(spec["class_separation"]),
            "label_noise_rate": float(spec["label_noise_rate"]),
            "seed": int(spec["seed"]),
            "n_informative": None if spec.get("n_informative") is None
            else int(spec["n_informative"]),
            "name": str(spec.get("name", "synthetic")),
        }
    except (TypeError, ValueError) as exc:
        raise DataError("malformed synthetic spec: %s" % exc) from None
    if kwargs["n_samples"] < 4:
        raise DataError(
            "n_samples must be at least 4, got %d" % kwargs["n_samples"]
        )
    if kwargs["n_features"] < 1:
        raise DataError(
            "n_features must be at least 1, got %d" % kwargs["n_features"]
        )
    if not 0.0 <= kwargs["label_noise_rate"] < 0.5:
        raise DataError(
            "label_noise_rate must lie in [0, 0.5), got %r"
            % (kwargs["label_noise_rate"],)
        )
    if kwargs["class_separation"] < 0.0:
        raise DataError(
            "class_separation must be nonnegative, got %r"
            % (kwargs["class_separation"],)
        )
    ninf = kwargs["n_informative"]
    if ninf is not None and not 1 <= ninf <= kwargs["n_features"]:
        raise DataError(
            "n_informative must lie in [1, %d], got %d"
            % (kwargs["n_features"], ninf)
        )
    return kwargs


def synthetic_from_spec(spec):
    """Build a synthetic dataset from a JSON-style mapping."""
    return make_synthetic(**validate_synthetic_spec(spec))


def _parse_cell(cell, line_no, col_name):
    text = cell.strip()
    try:
        val = float(text)
    except ValueError:
        raise NonNumericCellError(
            "non-numeric value %r at line %d, column %s"
            % (cell, line_no, col_name)
        ) from None
    if not math.isfinite(val):
        raise NonNumericCellError(
            "non-finite value %r at line %d, column %s"
            % (cell, line_no, col_name)
        )
    return val


def load_csv(path, label_column):
    """Read a CSV into a Dataset.

    label_column may be a column name (requires a header row) or a
    0-based integer position. With an integer, a header is detected by
    trying to parse the first row's feature cells as numbers. Label
    values may be arbitrary strings; the lexicographically smaller of
    the two classes maps to 0.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError("no such dataset file: %s" % p)
    with open(p, newline="", encoding="utf-8") as fh:
        raw = [
            (i + 1, row) for i, row in enumerate(csv.reader(fh))
            if row and any(c.strip() for c in row)
        ]
    if not raw:
        raise EmptyCsvError("%s holds no rows" % p)
    width = len(raw[0][1])
    for line_no, row in raw:
        if len(row) != width:
            raise NonNumericCellError(
                "line %d has %d cells, expected %d"
                % (line_no, len(row), width)
            )

    if isinstance(label_column, str) and not isinstance(label_column, bool):
        header = [c.strip() for c in raw[0][1]]
        if label_column not in header:
            raise MissingColumnError(
                "no column named %r in %s (header: %s)"
                % (label_column, p, header)
            )
        label_idx = header.index(label_column)
        names = [h for i, h in enumerate(header) if i != label_idx]
        body = raw[1:]
    else:
        label_idx = int(label_column)
        if not 0 <= label_idx < width:
            raise MissingColumnError(
                "label column %d out of range for %d columns"
                % (label_idx, width)
            )
        first = raw[0][1]
        try:
            for i, cell in enumerate(first):
                if i != label_idx:
                    float(cell.strip())
            names = None
            body = raw
        except ValueError:
            names = [
                h.strip() for i, h in enumerate(first) if i != label_idx
            ]
            body = raw[1:]

    if not body:
        raise EmptyCsvError("%s holds a header but no data rows" % p)

    n, f = len(body), width - 1
    X = np.empty((n, f), dtype=np.float64)
    raw_labels = []
    for r, (line_no, row) in enumerate(body):
        c = 0
        for i, cell in enumerate(row):
            if i == label_idx:
                raw_labels.append(cell.strip())
                continue
            col_name = names[c] if names is not None else str(i)
            X[r, c] = _parse_cell(cell, line_no, col_name)
            c += 1
    classes = sorted(set(raw_labels))
    if len(classes) != 2:
        raise LabelClassError(
            "label column needs exactly two distinct values, found %d: %s"
            % (len(classes), classes[:6])
        )
    mapping = {classes[0]: 0, classes[1]: 1}
    y = np.array([mapping[v] for v in raw_labels], dtype=np.int64)
    return Dataset(X, y, tuple(names) if names is not None else None, p.stem)
