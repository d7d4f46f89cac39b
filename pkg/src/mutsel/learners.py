"""Binary classifiers behind a uniform fit/predict contract.

Three model families, each with a single capacity knob:

* decision_tree  -- CART with Gini splits, capacity = max depth (1..30)
* poly_krc       -- polynomial kernel ridge classifier on +-1 targets,
                    capacity = degree (1..15)
* poly_svm       -- polynomial kernelised Pegasos SVM,
                    capacity = degree (1..15)

Kernel methods z-score each feature column on the training portion
(population std; constant columns get scale 1) before the kernel, and
apply the same transform at prediction time. The polynomial kernel is
(x . z + 1)^degree with unit scale and coefficient.

Every fit routes through one chokepoint so resource accounting can
count model fits with a context manager, ``count_fits``.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from . import _seeds, backends
from .data import DegenerateDataError

__all__ = [
    "ALGORITHMS",
    "DT_DEPTH_RANGE",
    "POLY_DEGREE_RANGE",
    "DEFAULT_KRC_LAMBDA",
    "DEFAULT_SVM_LAMBDA",
    "DEFAULT_SVM_EPOCHS",
    "FactorizationError",
    "CandidateModel",
    "FittedModel",
    "Scaler",
    "poly_kernel",
    "fit_decision_tree",
    "fit_poly_krc",
    "fit_poly_svm",
    "fit_candidate",
    "predict",
    "accuracy",
    "count_fits",
    "candidate_grid",
]

ALGORITHMS = ("decision_tree", "poly_krc", "poly_svm")
DT_DEPTH_RANGE = (1, 30)
POLY_DEGREE_RANGE = (1, 15)
DEFAULT_KRC_LAMBDA = 1e-3
DEFAULT_SVM_LAMBDA = 1e-2
DEFAULT_SVM_EPOCHS = 10


class FactorizationError(RuntimeError):
    """Kernel system stayed unsolvable after the jitter retry."""


@dataclass(frozen=True)
class CandidateModel:
    """One point on a model family's capacity axis."""

    algorithm: str
    capacity: int
    regularization: float | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                "unknown algorithm %r (choose from %s)"
                % (self.algorithm, ", ".join(ALGORITHMS))
            )
        lo, hi = (DT_DEPTH_RANGE if self.algorithm == "decision_tree"
                  else POLY_DEGREE_RANGE)
        if not (isinstance(self.capacity, (int, np.integer))
                and lo <= int(self.capacity) <= hi):
            raise ValueError(
                "%s capacity must be an integer in [%d, %d], got %r"
                % (self.algorithm, lo, hi, self.capacity)
            )
        object.__setattr__(self, "capacity", int(self.capacity))
        if self.regularization is not None:
            r = float(self.regularization)
            if not r > 0.0:
                raise ValueError(
                    "regularization must be positive, got %r" % (r,)
                )
            object.__setattr__(self, "regularization", r)

    def label(self):
        return "%s(%d)" % (self.algorithm, self.capacity)


def candidate_grid(algorithm, capacities, regularization=None):
    """CandidateModels for one algorithm over a capacity range."""
    return tuple(
        CandidateModel(algorithm, int(c), regularization)
        for c in capacities
    )


@dataclass(frozen=True)
class Scaler:
    """Per-column z-score transform frozen at fit time."""

    mean: np.ndarray
    scale: np.ndarray

    def transform(self, X):
        return (X - self.mean) / self.scale


def _fit_scaler(X):
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 0.0, scale, 1.0)
    return Scaler(mean, scale)


@dataclass(frozen=True)
class TreeParams:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    @property
    def depth(self):
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                for child in (self.left[node], self.right[node]):
                    depths[child] = depths[node] + 1
        return int(depths.max())


@dataclass(frozen=True)
class KrcParams:
    support: np.ndarray
    dual: np.ndarray
    degree: int
    lam: float
    scaler: Scaler


@dataclass(frozen=True)
class SvmParams:
    support: np.ndarray
    alpha: np.ndarray
    y_pm: np.ndarray
    degree: int
    lam: float
    epochs: int
    scaler: Scaler


@dataclass(frozen=True)
class FittedModel:
    """A trained candidate, ready for ``predict``."""

    algorithm: str
    candidate: CandidateModel
    seed: int
    n_features: int
    params: object


class _FitTally:
    def __init__(self):
        self.count = 0


_tally_stack = []


@contextlib.contextmanager
def count_fits():
    """Count model fits executed inside the block.

    Yields a tally whose ``count`` holds the number of completed fits.
    Nested blocks each see the fits inside them.
    """
    tally = _FitTally()
    _tally_stack.append(tally)
    try:
        yield tally
    finally:
        _tally_stack.remove(tally)


def _record_fit():
    for tally in _tally_stack:
        tally.count += 1


def poly_kernel(x, z, degree):
    """Polynomial kernel (x . z + 1)^degree for two 1-D vectors."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.ndim != 1 or z.ndim != 1 or x.shape != z.shape:
        raise ValueError(
            "poly_kernel needs two equal-length 1-D vectors, got shapes "
            "%s and %s" % (x.shape, z.shape)
        )
    if not (isinstance(degree, (int, np.integer)) and degree >= 1):
        raise ValueError("degree must be a positive integer, got %r"
                         % (degree,))
    return float(_int_power(np.dot(x, z) + 1.0, int(degree)))


def _int_power(base, degree):
    # square-and-multiply; an order of magnitude cheaper than pow() on
    # the large gram matrices and exact for the small degrees used here
    out = None
    while degree:
        if degree & 1:
            out = base if out is None else out * base
        degree >>= 1
        if degree:
            base = base * base
    return out


def _poly_gram(A, B, degree):
    return _int_power(A @ B.T + 1.0, int(degree))


def _check_trainable(dataset, algorithm):
    if dataset.n_samples < 2:
        raise DegenerateDataError(
            "%s needs at least two training samples, got %d"
            % (algorithm, dataset.n_samples)
        )
    if not dataset.has_both_classes():
        raise DegenerateDataError(
            "%s needs both classes in the training data" % algorithm
        )


def fit_decision_tree(dataset, max_depth, seed=0):
    """CART tree with Gini splits, capped at ``max_depth`` levels.

    Deterministic given the data (the seed is recorded but unused: split
    ties break by scan order, not randomness). Training accuracy is
    nondecreasing in max_depth, since deeper trees refine the same
    greedy prefix of splits.
    """
    lo, hi = DT_DEPTH_RANGE
    if not lo <= max_depth <= hi:
        raise ValueError(
            "max_depth must lie in [%d, %d], got %r" % (lo, hi, max_depth)
        )
    _check_trainable(dataset, "decision_tree")
    X = dataset.features
    order = np.argsort(X, axis=0, kind="stable").T.copy()
    nodes = backends.grow_tree(X, dataset.labels, order, int(max_depth))
    _record_fit()
    return FittedModel(
        "decision_tree",
        CandidateModel("decision_tree", int(max_depth)),
        int(seed),
        dataset.n_features,
        TreeParams(*nodes),
    )


def fit_poly_krc(dataset, degree, lam=DEFAULT_KRC_LAMBDA, seed=0):
    """Kernel ridge classification: solve (G + lam I) a = y on +-1 labels.

    Uses a Cholesky factorisation; on failure retries once with the
    ridge raised by 1e-8 times the mean Gram diagonal, then raises
    FactorizationError. Deterministic given the data.
    """
    lo, hi = POLY_DEGREE_RANGE
    if not lo <= degree <= hi:
        raise ValueError(
            "degree must lie in [%d, %d], got %r" % (lo, hi, degree)
        )
    if not lam > 0.0:
        raise ValueError("lam must be positive, got %r" % (lam,))
    _check_trainable(dataset, "poly_krc")
    scaler = _fit_scaler(dataset.features)
    Xs = scaler.transform(dataset.features)
    y = 2.0 * dataset.labels - 1.0
    G = _poly_gram(Xs, Xs, int(degree))
    n = G.shape[0]
    dual = None
    for ridge in (lam, lam + 1e-8 * float(np.mean(np.diag(G)))):
        A = G + ridge * np.eye(n)
        try:
            dual = cho_solve(cho_factor(A, lower=True), y)
            break
        except LinAlgError:
            continue
    if dual is None:
        raise FactorizationError(
            "kernel system for degree %d stayed non-positive-definite "
            "after the jitter retry" % degree
        )
    _record_fit()
    return FittedModel(
        "poly_krc",
        CandidateModel("poly_krc", int(degree), float(lam)),
        int(seed),
        dataset.n_features,
        KrcParams(Xs, dual, int(degree), float(lam), scaler),
    )


def fit_poly_svm(dataset, degree, lam=DEFAULT_SVM_LAMBDA,
                 epochs=DEFAULT_SVM_EPOCHS, seed=0):
    """Kernelised Pegasos SVM, epochs * n update steps.

    The draw sequence (one uniform sample index per step) is generated
    up front from the seed, so results are reproducible and independent
    of the backend.
    """
    lo, hi = POLY_DEGREE_RANGE
    if not lo <= degree <= hi:
        raise ValueError(
            "degree must lie in [%d, %d], got %r" % (lo, hi, degree)
        )
    if not lam > 0.0:
        raise ValueError("lam must be positive, got %r" % (lam,))
    if not epochs >= 1:
        raise ValueError("epochs must be at least 1, got %r" % (epochs,))
    _check_trainable(dataset, "poly_svm")
    scaler = _fit_scaler(dataset.features)
    Xs = scaler.transform(dataset.features)
    y_pm = 2.0 * dataset.labels - 1.0
    G = _poly_gram(Xs, Xs, int(degree))
    n = dataset.n_samples
    draws = _seeds.rng(seed).integers(0, n, size=int(epochs) * n)
    alpha = backends.pegasos(G, y_pm, draws.astype(np.int64), float(lam))
    _record_fit()
    return FittedModel(
        "poly_svm",
        CandidateModel("poly_svm", int(degree), float(lam)),
        int(seed),
        dataset.n_features,
        SvmParams(Xs, alpha, y_pm, int(degree), float(lam), int(epochs),
                  scaler),
    )


def fit_candidate(candidate, dataset, seed=0, epochs=None):
    """Fit one CandidateModel; dispatches on its algorithm."""
    if candidate.algorithm == "decision_tree":
        return fit_decision_tree(dataset, candidate.capacity, seed)
    if candidate.algorithm == "poly_krc":
        lam = (candidate.regularization if candidate.regularization
               is not None else DEFAULT_KRC_LAMBDA)
        return fit_poly_krc(dataset, candidate.capacity, lam, seed)
    lam = (candidate.regularization if candidate.regularization
           is not None else DEFAULT_SVM_LAMBDA)
    return fit_poly_svm(dataset, candidate.capacity, lam,
                        epochs if epochs is not None else DEFAULT_SVM_EPOCHS,
                        seed)


def predict(model, features):
    """Predicted 0/1 labels for a feature matrix."""
    X = np.ascontiguousarray(np.asarray(features, dtype=np.float64))
    if X.ndim != 2:
        raise ValueError("features must be 2-D, got shape %s" % (X.shape,))
    if X.shape[1] != model.n_features:
        raise ValueError(
            "model was fit on %d features, got %d"
            % (model.n_features, X.shape[1])
        )
    p = model.params
    if model.algorithm == "decision_tree":
        return backends.predict_tree(X, p.feature, p.threshold, p.left,
                                     p.right, p.value)
    Xs = p.scaler.transform(X)
    K = _poly_gram(Xs, p.support, p.degree)
    if model.algorithm == "poly_krc":
        score = K @ p.dual
    else:
        score = K @ (p.alpha * p.y_pm)
    return (score > 0.0).astype(np.int64)


def accuracy(predicted, actual):
    """Fraction of agreeing labels."""
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape or predicted.ndim != 1:
        raise ValueError(
            "label vectors must share a 1-D shape, got %s and %s"
            % (predicted.shape, actual.shape)
        )
    if predicted.size == 0:
        raise ValueError("accuracy of zero samples is undefined")
    return float(np.mean(predicted == actual))
