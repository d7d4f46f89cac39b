"""Bayesian comparison of paired score differences.

Per dataset: the correlated t-test for repeated cross-validation, whose
posterior for the mean difference is a location-scale Student t that
widens the naive standard error by the fold-overlap correlation rho.
Across datasets: a two-level Monte Carlo that draws a plausible mean per
dataset from each correlated-t posterior, then a population mean across
datasets, and classifies every population draw against a region of
practical equivalence (ROPE).

Differences follow one convention everywhere: mv minus cv, so p_mv is
the probability that mutation validation is practically better and p_cv
the mirror. Artifacts stamp the convention string.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import _seeds

__all__ = [
    "DIFF_CONVENTION",
    "RopeInterval",
    "PosteriorTriple",
    "CorrelatedTModel",
    "student_t_cdf",
    "correlated_ttest",
    "hierarchical_test",
    "write_posterior_samples_csv",
]

DIFF_CONVENTION = "mv_minus_cv"


@dataclass(frozen=True)
class RopeInterval:
    """Region of practical equivalence for an accuracy difference."""

    lo: float = -0.025
    hi: float = 0.025

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(
                "ROPE needs lo < hi, got [%r, %r]" % (self.lo, self.hi)
            )

    def classify(self, x):
        """'cv' below, 'pe' inside (boundaries included), 'mv' above."""
        if x < self.lo:
            return "cv"
        if x > self.hi:
            return "mv"
        return "pe"


@dataclass(frozen=True)
class PosteriorTriple:
    """(P[cv better], P[practically equivalent], P[mv better])."""

    p_cv: float
    p_pe: float
    p_mv: float

    def __post_init__(self):
        for name in ("p_cv", "p_pe", "p_mv"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError("%s must lie in [0, 1], got %r" % (name, v))
        total = self.p_cv + self.p_pe + self.p_mv
        if abs(total - 1.0) > 1e-9:
            raise ValueError(
                "probabilities must sum to 1 within 1e-9, got %.17g" % total
            )

    def as_dict(self):
        return {"p_cv": self.p_cv, "p_pe": self.p_pe, "p_mv": self.p_mv}


@dataclass(frozen=True)
class CorrelatedTModel:
    """Student-t posterior of a mean difference under fold correlation.

    Built from n paired differences with sample mean x, sample variance
    s2 (ddof 1) and correlation rho between overlapping training sets:
    the posterior is t with n - 1 degrees of freedom, location x and
    scale sqrt(s2 * (1/n + rho / (1 - rho))). rho defaults to 1/k of
    the outer cross-validation in callers. Zero variance collapses the
    posterior to a point mass at the mean.
    """

    n: int
    mean: float
    sample_variance: float
    rho: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least 2 differences, got %d" % self.n)
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1), got %r" % (self.rho,))
        if self.sample_variance < 0.0:
            raise ValueError("sample variance cannot be negative")

    @property
    def dof(self):
        return self.n - 1

    @property
    def scale(self):
        return float(np.sqrt(
            self.sample_variance
            * (1.0 / self.n + self.rho / (1.0 - self.rho))
        ))

    @classmethod
    def from_differences(cls, diff, rho):
        d = np.asarray(diff, dtype=np.float64)
        if d.ndim != 1 or d.shape[0] < 2:
            raise ValueError(
                "need a 1-D vector of at least 2 differences, got shape %s"
                % (d.shape,)
            )
        if not np.isfinite(d).all():
            raise ValueError("differences must be finite")
        if (d == d[0]).all():
            # identical observations have zero variance by definition;
            # np.var would leave rounding residue and miss the
            # point-mass branch
            return cls(int(d.shape[0]), float(d[0]), 0.0, float(rho))
        return cls(int(d.shape[0]), float(np.mean(d)),
                   float(np.var(d, ddof=1)), float(rho))

    def draw(self, gen, size):
        """Posterior draws; a point mass when the variance vanishes."""
        if self.scale == 0.0:
            return np.full(size, self.mean)
        return self.mean + self.scale * gen.standard_t(self.dof, size=size)


def student_t_cdf(x, dof):
    """CDF of the standard Student t via the regularised incomplete beta.

    For x >= 0, F(x) = 1 - I_{dof/(dof+x^2)}(dof/2, 1/2) / 2, and the
    negative side uses the reflection F(-x) = 1 - F(x). Evaluating each
    side directly (rather than subtracting from 1) keeps the symmetry
    F(-x) + F(x) = 1 exact in floating point.
    """
    if not dof >= 1:
        raise ValueError("dof must be at least 1, got %r" % (dof,))
    xa = np.asarray(x, dtype=np.float64)
    ib = special.betainc(dof / 2.0, 0.5, dof / (dof + xa * xa))
    out = np.where(xa > 0.0, 1.0 - 0.5 * ib, 0.5 * ib)
    if np.isscalar(x) or getattr(x, "ndim", 1) == 0:
        return float(out)
    return out


def _triple_from_model(model, rope):
    if model.sample_variance == 0.0 or model.scale == 0.0:
        region = rope.classify(model.mean)
        return PosteriorTriple(
            1.0 if region == "cv" else 0.0,
            1.0 if region == "pe" else 0.0,
            1.0 if region == "mv" else 0.0,
        )
    z_lo = (rope.lo - model.mean) / model.scale
    z_hi = (rope.hi - model.mean) / model.scale
    # upper tail as the CDF of the negated argument: bitwise symmetric
    # under a sign flip of the differences when the ROPE is symmetric
    p_cv = student_t_cdf(z_lo, model.dof)
    p_mv = student_t_cdf(-z_hi, model.dof)
    # the parenthesised sum keeps a sign flip of the differences an
    # exact (p_cv, p_mv) swap: addition commutes bitwise
    p_pe = max(0.0, 1.0 - (p_cv + p_mv))
    return PosteriorTriple(p_cv, p_pe, p_mv)


def correlated_ttest(diff, rho=0.1, rope=RopeInterval()):
    """Posterior ROPE triple for one vector of paired differences.

    diff follows the mv minus cv convention; rho is the training-set
    overlap correlation, 1/k_outer for k-fold outer evaluation.
    """
    model = CorrelatedTModel.from_differences(diff, rho)
    return _triple_from_model(model, rope), model


def hierarchical_test(per_dataset_diffs, rho=0.1, rope=RopeInterval(),
                      n_samples=4000, seed=0):
    """Population-level ROPE triple across several datasets.

    Each round draws one plausible mean per dataset from its
    correlated-t posterior, summarises the q draws by their mean and
    standard error, draws a population mean from a t with q - 1 degrees
    of freedom around that summary, and classifies it against the ROPE.
    Probabilities are the classification frequencies over n_samples
    rounds. Returns (triple, population_samples).
    """
    diffs = list(per_dataset_diffs)
    q = len(diffs)
    if q < 2:
        raise ValueError(
            "hierarchical test needs at least 2 datasets, got %d" % q
        )
    if n_samples < 1000:
        raise ValueError(
            "n_samples must be at least 1000, got %d" % n_samples
        )
    models = [CorrelatedTModel.from_differences(d, rho) for d in diffs]
    gen = _seeds.rng(seed)
    theta = np.empty((n_samples, q))
    for col, model in enumerate(models):
        theta[:, col] = model.draw(gen, n_samples)
    loc = theta.mean(axis=1)
    scale = theta.std(axis=1, ddof=1) / np.sqrt(q)
    pop = loc + scale * gen.standard_t(q - 1, size=n_samples)
    n_cv = int(np.count_nonzero(pop < rope.lo))
    n_mv = int(np.count_nonzero(pop > rope.hi))
    n_pe = n_samples - n_cv - n_mv
    triple = PosteriorTriple(n_cv / n_samples, n_pe / n_samples,
                             n_mv / n_samples)
    return triple, pop


def write_posterior_samples_csv(path, samples, rope):
    """Posterior population draws with their ROPE region, one per row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "value", "region"])
        for i, v in enumerate(np.asarray(samples, dtype=np.float64)):
            writer.writerow([i, repr(float(v)), rope.classify(float(v))])
