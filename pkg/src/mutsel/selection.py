"""Model selection by mutation validation or k-fold cross-validation.

Both strategies score every candidate on the same training data and the
winner is the argmax (ties: smallest capacity). Their randomness is
paired across candidates: one selection seed drives one mutation draw
(MV) or one inner fold plan (CV) that every candidate shares, so
candidate scores stay comparable and the outcome cannot depend on the
order candidates are listed in.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _seeds
from .data import DataError, DegenerateDataError, make_fold_plan, mutate_labels
from .learners import accuracy, fit_candidate, predict

__all__ = [
    "SingleClassFoldWarning",
    "MvScoreRecord",
    "MvStrategy",
    "CvStrategy",
    "SelectionOutcome",
    "m_score",
    "mv_score",
    "cv_score",
    "select_model",
]


class SingleClassFoldWarning(UserWarning):
    """An inner training partition lost one class and was skipped."""


def m_score(acc_orig, acc_mut_on_mut, acc_mut_on_orig, eta):
    """Mutation-validation score.

    m = (1 - 2 eta) * acc_mut_on_orig + acc_orig - acc_mut_on_mut + eta

    Rewards a model family that fits the clean labelling while refusing
    to reproduce the injected label noise. A family that ignores the
    mutation entirely (all three accuracies equal, as for a constant
    classifier) scores acc + eta - 2 * acc * eta.
    """
    return ((1.0 - 2.0 * eta) * acc_mut_on_orig
            + acc_orig - acc_mut_on_mut + eta)


@dataclass(frozen=True)
class MvScoreRecord:
    """One candidate's mutation-validation outcome.

    acc_orig        : training accuracy of the fit on clean labels
    acc_mut_on_mut  : training accuracy of the mutated fit on the
                      mutated labels
    acc_mut_on_orig : accuracy of the mutated fit against the clean
                      labels
    """

    acc_orig: float
    acc_mut_on_mut: float
    acc_mut_on_orig: float
    eta: float
    m: float

    @classmethod
    def from_accuracies(cls, acc_orig, acc_mut_on_mut, acc_mut_on_orig,
                        eta):
        return cls(acc_orig, acc_mut_on_mut, acc_mut_on_orig, eta,
                   m_score(acc_orig, acc_mut_on_mut, acc_mut_on_orig, eta))


@dataclass(frozen=True)
class MvStrategy:
    """Mutation validation with rate eta, averaged over repeats draws."""

    eta: float = 0.2
    repeats: int = 1

    def __post_init__(self):
        if not 0.0 < self.eta < 0.5:
            raise DataError("eta must lie in (0, 0.5), got %r" % (self.eta,))
        if self.repeats < 1:
            raise DataError("repeats must be at least 1, got %r"
                            % (self.repeats,))


@dataclass(frozen=True)
class CvStrategy:
    """k-fold cross-validation."""

    k: int = 5
    stratified: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise DataError("k must be at least 2, got %r" % (self.k,))


@dataclass(frozen=True)
class SelectionOutcome:
    chosen: object
    per_candidate_scores: dict
    strategy: str
    seed: int


def mv_score(candidate, dataset, eta=0.2, repeats=1, seed=0, epochs=None):
    """Mutation-validation score of one candidate.

    Per repeat d: flip round(eta * n) labels (seed mix(seed, MV_DRAW, d),
    identical for every candidate scored under the same seed), fit the
    candidate on the clean and on the mutated data, and record the three
    accuracies. Fit seeds additionally mix in the candidate's capacity,
    so stochastic learners get per-candidate draws while the mutation
    itself stays shared. Accuracies are averaged over repeats before the
    m formula is applied once. Exactly 2 * repeats fits are performed.
    """
    if not 0.0 < eta < 0.5:
        raise DataError("eta must lie in (0, 0.5), got %r" % (eta,))
    if repeats < 1:
        raise DataError("repeats must be at least 1, got %r" % (repeats,))
    a_orig = a_mm = a_mo = 0.0
    for d in range(repeats):
        mut_labels, _ = mutate_labels(dataset, eta,
                                      _seeds.mix(seed, _seeds.MV_DRAW, d))
        mutated = dataset.with_labels(mut_labels)
        f_clean = fit_candidate(
            candidate, dataset,
            _seeds.mix(seed, _seeds.MV_FIT, d, 0, candidate.capacity),
            epochs)
        f_mut = fit_candidate(
            candidate, mutated,
            _seeds.mix(seed, _seeds.MV_FIT, d, 1, candidate.capacity),
            epochs)
        pred_clean = predict(f_clean, dataset.features)
        pred_mut = predict(f_mut, dataset.features)
        a_orig += accuracy(pred_clean, dataset.labels)
        a_mm += accuracy(pred_mut, mut_labels)
        a_mo += accuracy(pred_mut, dataset.labels)
    a_orig /= repeats
    a_mm /= repeats
    a_mo /= repeats
    return MvScoreRecord.from_accuracies(a_orig, a_mm, a_mo, eta)


def cv_score(candidate, dataset, fold_plan, seed=0, epochs=None):
    """Mean held-out accuracy of one candidate over a fold plan.

    Performs exactly k fits, one per fold, each seeded from (seed, fold,
    candidate capacity). Folds whose training partition holds a single
    class are skipped with a SingleClassFoldWarning; the mean runs over
    the surviving folds. All folds degenerate raises DegenerateDataError.
    """
    if fold_plan.n_samples != dataset.n_samples:
        raise DataError(
            "fold plan covers %d samples, dataset has %d"
            % (fold_plan.n_samples, dataset.n_samples)
        )
    scores = []
    for fold, train_idx, test_idx in fold_plan.iter_folds():
        train = dataset.take(train_idx)
        if not train.has_both_classes():
            warnings.warn(
                "inner fold %d training partition is single-class; "
                "fold skipped" % fold,
                SingleClassFoldWarning,
                stacklevel=2,
            )
            continue
        model = fit_candidate(
            candidate, train,
            _seeds.mix(seed, _seeds.CV_FIT, fold, candidate.capacity),
            epochs)
        preds = predict(model, dataset.features[test_idx])
        scores.append(accuracy(preds, dataset.labels[test_idx]))
    if not scores:
        raise DegenerateDataError(
            "every training partition of the fold plan is single-class"
        )
    return float(np.mean(scores))


def select_model(candidates, dataset, strategy, seed=0, epochs=None):
    """Score all candidates under one strategy and pick the winner.

    The winner maximises the strategy score; exact ties go to the
    smaller capacity. The result is invariant to the listing order of
    ``candidates``.
    """
    candidates = tuple(candidates)
    if not candidates:
        raise ValueError("select_model needs at least one candidate")
    if isinstance(strategy, CvStrategy):
        plan = make_fold_plan(dataset, strategy.k,
                              _seeds.mix(seed, _seeds.CV_INNER_PLAN),
                              strategy.stratified)
        scores = {
            c: cv_score(c, dataset, plan, seed, epochs) for c in candidates
        }
        tag = "cv"
    elif isinstance(strategy, MvStrategy):
        scores = {
            c: mv_score(c, dataset, strategy.eta, strategy.repeats, seed,
                        epochs).m
            for c in candidates
        }
        tag = "mv"
    else:
        raise TypeError(
            "strategy must be CvStrategy or MvStrategy, got %r"
            % type(strategy).__name__
        )
    best = None
    best_score = -np.inf
    for c in candidates:
        s = scores[c]
        if (best is None or s > best_score
                or (s == best_score and c.capacity < best.capacity)):
            best = c
            best_score = s
    return SelectionOutcome(best, scores, tag, int(seed))
