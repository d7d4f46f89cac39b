"""Paired nested cross-validation comparison of MV and CV selection.

One run executes repeats x k_outer iterations. Each iteration takes the
outer training fold, lets both strategies select a candidate from the
same grid on the same training data, refits each winner on that
training fold and scores it on the held-out outer fold. The outer fold
plans are shared between strategies, which makes the per-iteration
score differences (mv minus cv) a paired sample.

Seed contract, all derived from the master seed via mutsel._seeds.mix:

    outer plan of repeat r           mix(seed, OUTER_PLAN, r)
    selection in iteration (r, j)    mix(seed, SELECT, r, j, strategy)
    refit of the winner              mix(seed, REFIT, r, j, strategy)
    final whole-dataset refit        mix(seed, FINAL_REFIT, strategy)

with strategy = STRATEGY_CV or STRATEGY_MV. Nothing depends on
execution order, so any worker count reproduces the same numbers.

Resource accounting: model_fits counts selection-phase fits only (the
quantity the two strategies actually compete on); refits and final fits
are reported separately as eval_fits. Wall clock covers strategy-owned
work (selection plus evaluation), and CO2 grams follow
(seconds / 3600) * (watts / 1000) * grams_per_kWh.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _seeds, backends
from .bayes import DIFF_CONVENTION
from .data import Dataset, DegenerateDataError, anova_f_scores, \
    make_fold_plan, select_k_best
from .learners import CandidateModel, FactorizationError, accuracy, \
    count_fits, fit_candidate, predict
from .selection import CvStrategy, MvStrategy, select_model

__all__ = [
    "RESULT_SCHEMA",
    "NONDETERMINISTIC_RESOURCE_FIELDS",
    "ResourceModel",
    "ResourceReport",
    "ExperimentConfig",
    "FinalModel",
    "IterationFailure",
    "PairedComparisonResult",
    "HarnessAbortError",
    "co2_grams",
    "config_hash",
    "run_paired_comparison",
    "track_resources",
    "result_to_dict",
    "write_result_json",
    "write_scores_csv",
    "load_result_json",
]

RESULT_SCHEMA = "mutsel.paired_result.v1"

# the only result fields that may differ between identical reruns
NONDETERMINISTIC_RESOURCE_FIELDS = (
    "wall_clock_seconds", "co2_grams", "selection_seconds",
    "evaluation_seconds",
)


@dataclass(frozen=True)
class ResourceModel:
    """Power draw and grid carbon intensity used for CO2 estimates."""

    power_watts: float = 65.0
    carbon_intensity_g_per_kwh: float = 475.0

    def __post_init__(self):
        if not self.power_watts > 0.0:
            raise ValueError("power_watts must be positive")
        if not self.carbon_intensity_g_per_kwh >= 0.0:
            raise ValueError("carbon intensity cannot be negative")


def co2_grams(wall_clock_seconds, power_watts, carbon_intensity_g_per_kwh):
    """Estimated emissions of a computation."""
    return ((wall_clock_seconds / 3600.0) * (power_watts / 1000.0)
            * carbon_intensity_g_per_kwh)


@dataclass(frozen=True)
class ResourceReport:
    """Per-strategy cost of one run."""

    wall_clock_seconds: float
    model_fits: int
    co2_grams: float
    selection_seconds: float
    evaluation_seconds: float
    eval_fits: int

    def as_dict(self):
        return {
            "wall_clock_seconds": self.wall_clock_seconds,
            "model_fits": self.model_fits,
            "co2_grams": self.co2_grams,
            "selection_seconds": self.selection_seconds,
            "evaluation_seconds": self.evaluation_seconds,
            "eval_fits": self.eval_fits,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one paired comparison depends on."""

    dataset: Dataset
    candidates: tuple
    repeats: int = 10
    k_outer: int = 10
    k_inner: int = 5
    eta: float = 0.2
    mv_repeats: int = 1
    seed: int = 0
    stratified: bool = False
    epochs: int | None = None
    feature_k: int | None = None
    resource_model: ResourceModel = field(default_factory=ResourceModel)

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.candidates:
            raise ValueError("config needs at least one candidate")
        for c in self.candidates:
            if not isinstance(c, CandidateModel):
                raise TypeError("candidates must be CandidateModel instances")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if self.k_outer < 2:
            raise ValueError("k_outer must be at least 2")
        if self.k_inner < 2:
            raise ValueError("k_inner must be at least 2")
        if not 0.0 < self.eta < 0.5:
            raise ValueError("eta must lie in (0, 0.5)")
        if self.mv_repeats < 1:
            raise ValueError("mv_repeats must be at least 1")

    @property
    def n_iterations(self):
        return self.repeats * self.k_outer


@dataclass(frozen=True)
class FinalModel:
    """The candidate a strategy hands over after the whole run."""

    candidate: CandidateModel
    model: object
    validation_score: float
    iteration: int


@dataclass(frozen=True)
class IterationFailure:
    iteration: int
    repeat: int
    fold: int
    strategy: str
    error: str


@dataclass
class PairedComparisonResult:
    config: ExperimentConfig
    effective_n_features: int
    cv_scores: np.ndarray
    mv_scores: np.ndarray
    cv_choices: list
    mv_choices: list
    diff: np.ndarray
    final_cv: FinalModel
    final_mv: FinalModel
    resources: dict
    failures: list
    backend: str

    @property
    def n_iterations(self):
        return self.cv_scores.shape[0]

    def valid_diff(self):
        """Differences of the iterations where both strategies succeeded."""
        return self.diff[np.isfinite(self.diff)]


class HarnessAbortError(RuntimeError):
    """Raised when more than 10 percent of iterations failed."""

    def __init__(self, message, failures):
        super().__init__(message)
        self.failures = failures


def _effective_dataset(config):
    if config.feature_k is None:
        return config.dataset
    table = anova_f_scores(config.dataset)
    return select_k_best(config.dataset, table, config.feature_k)


def _iteration_job(args):
    """One outer iteration: both strategies on the same training fold."""
    dataset, config, r, j = args
    plan = make_fold_plan(dataset, config.k_outer,
                          _seeds.mix(config.seed, _seeds.OUTER_PLAN, r),
                          config.stratified)
    train_idx = plan.train_indices(j)
    test_idx = plan.test_indices(j)
    train = dataset.take(train_idx)
    test_X = dataset.features[test_idx]
    test_y = dataset.labels[test_idx]
    strategies = {
        "cv": (CvStrategy(config.k_inner, config.stratified),
               _seeds.STRATEGY_CV),
        "mv": (MvStrategy(config.eta, config.mv_repeats),
               _seeds.STRATEGY_MV),
    }
    out = {}
    for tag, (strategy, code) in strategies.items():
        try:
            t0 = time.perf_counter()
            with count_fits() as sel_tally:
                outcome = select_model(
                    config.candidates, train, strategy,
                    _seeds.mix(config.seed, _seeds.SELECT, r, j, code),
                    config.epochs,
                )
            t_sel = time.perf_counter() - t0
            t0 = time.perf_counter()
            with count_fits() as eval_tally:
                model = fit_candidate(
                    outcome.chosen, train,
                    _seeds.mix(config.seed, _seeds.REFIT, r, j, code),
                    config.epochs,
                )
                score = accuracy(predict(model, test_X), test_y)
            t_eval = time.perf_counter() - t0
            out[tag] = {
                "score": score,
                "choice": outcome.chosen,
                "selection_seconds": t_sel,
                "evaluation_seconds": t_eval,
                "selection_fits": sel_tally.count,
                "eval_fits": eval_tally.count,
                "error": None,
            }
        except (DegenerateDataError, FactorizationError) as exc:
            out[tag] = {
                "score": float("nan"),
                "choice": None,
                "selection_seconds": 0.0,
                "evaluation_seconds": 0.0,
                "selection_fits": 0,
                "eval_fits": 0,
                "error": "%s: %s" % (type(exc).__name__, exc),
            }
    return out


def run_paired_comparison(config, workers=1):
    """Execute the full paired design and aggregate both strategies.

    workers > 1 distributes outer iterations over processes; results
    are identical for any worker count. Raises HarnessAbortError when
    more than 10 percent of iterations failed (either strategy).
    """
    dataset = _effective_dataset(config)
    n_iter = config.n_iterations
    jobs = [
        (dataset, config, r, j)
        for r in range(config.repeats) for j in range(config.k_outer)
    ]
    if workers > 1:
        chunk = max(1, n_iter // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_iteration_job, jobs, chunksize=chunk))
    else:
        rows = [_iteration_job(job) for job in jobs]

    scores = {"cv": np.full(n_iter, np.nan), "mv": np.full(n_iter, np.nan)}
    choices = {"cv": [], "mv": []}
    sel_seconds = {"cv": 0.0, "mv": 0.0}
    eval_seconds = {"cv": 0.0, "mv": 0.0}
    sel_fits = {"cv": 0, "mv": 0}
    eval_fits = {"cv": 0, "mv": 0}
    failures = []
    failed_iterations = set()
    for i, row in enumerate(rows):
        r, j = divmod(i, config.k_outer)
        for tag in ("cv", "mv"):
            cell = row[tag]
            scores[tag][i] = cell["score"]
            choices[tag].append(cell["choice"])
            sel_seconds[tag] += cell["selection_seconds"]
            eval_seconds[tag] += cell["evaluation_seconds"]
            sel_fits[tag] += cell["selection_fits"]
            eval_fits[tag] += cell["eval_fits"]
            if cell["error"] is not None:
                failures.append(
                    IterationFailure(i, r, j, tag, cell["error"])
                )
                failed_iterations.add(i)

    if len(failed_iterations) > 0.1 * n_iter:
        raise HarnessAbortError(
            "%d of %d iterations failed (over the 10%% abort threshold)"
            % (len(failed_iterations), n_iter),
            failures,
        )

    diff = scores["mv"] - scores["cv"]

    finals = {}
    for tag, code in (("cv", _seeds.STRATEGY_CV), ("mv", _seeds.STRATEGY_MV)):
        best_i = -1
        best_score = -np.inf
        for i in range(n_iter):
            s = scores[tag][i]
            if np.isfinite(s) and s > best_score:
                best_score = s
                best_i = i
        if best_i < 0:
            raise HarnessAbortError(
                "strategy %s produced no successful iteration" % tag,
                failures,
            )
        t0 = time.perf_counter()
        with count_fits() as tally:
            model = fit_candidate(
                choices[tag][best_i], dataset,
                _seeds.mix(config.seed, _seeds.FINAL_REFIT, code),
                config.epochs,
            )
        eval_seconds[tag] += time.perf_counter() - t0
        eval_fits[tag] += tally.count
        finals[tag] = FinalModel(choices[tag][best_i], model,
                                 float(best_score), best_i)

    rm = config.resource_model
    resources = {}
    for tag in ("cv", "mv"):
        wall = sel_seconds[tag] + eval_seconds[tag]
        resources[tag] = ResourceReport(
            wall, sel_fits[tag],
            co2_grams(wall, rm.power_watts, rm.carbon_intensity_g_per_kwh),
            sel_seconds[tag], eval_seconds[tag], eval_fits[tag],
        )

    return PairedComparisonResult(
        config, dataset.n_features, scores["cv"], scores["mv"],
        choices["cv"], choices["mv"], diff, finals["cv"], finals["mv"],
        resources, failures, backends.backend_name(),
    )


def track_resources(result):
    """Per-strategy ResourceReport map of a completed run."""
    return dict(result.resources)


def _choice_dict(c):
    if c is None:
        return None
    return {"algorithm": c.algorithm, "capacity": c.capacity}


def _candidate_dict(c):
    if c is None:
        return None
    return {
        "algorithm": c.algorithm,
        "capacity": c.capacity,
        "regularization": c.regularization,
    }


def _config_payload(config):
    return {
        "dataset": {
            "name": config.dataset.name,
            "n_samples": config.dataset.n_samples,
            "n_features": config.dataset.n_features,
            "fingerprint": config.dataset.fingerprint(),
        },
        "candidates": [_candidate_dict(c) for c in config.candidates],
        "repeats": config.repeats,
        "k_outer": config.k_outer,
        "k_inner": config.k_inner,
        "eta": config.eta,
        "mv_repeats": config.mv_repeats,
        "seed": config.seed,
        "stratified": config.stratified,
        "epochs": config.epochs,
        "feature_k": config.feature_k,
        "resource_model": {
            "power_watts": config.resource_model.power_watts,
            "carbon_intensity_g_per_kwh":
                config.resource_model.carbon_intensity_g_per_kwh,
        },
    }


def config_hash(config):
    """sha256 of the canonical JSON form of the config."""
    payload = json.dumps(_config_payload(config), sort_keys=True,
                         separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def _float_or_none(x):
    x = float(x)
    return x if np.isfinite(x) else None


def result_to_dict(result):
    """JSON-ready form of a PairedComparisonResult.

    Score vectors are top-level arrays (null at failed iterations),
    choices are {algorithm, capacity} objects. Deterministic for a
    fixed config and environment except for the fields named in
    NONDETERMINISTIC_RESOURCE_FIELDS.
    """
    config = result.config
    return {
        "schema": RESULT_SCHEMA,
        "diff_convention": DIFF_CONVENTION,
        "backend": result.backend,
        "config": _config_payload(config),
        "config_hash": config_hash(config),
        "effective_n_features": result.effective_n_features,
        "cv_scores": [_float_or_none(s) for s in result.cv_scores],
        "mv_scores": [_float_or_none(s) for s in result.mv_scores],
        "cv_choices": [_choice_dict(c) for c in result.cv_choices],
        "mv_choices": [_choice_dict(c) for c in result.mv_choices],
        "diff": [_float_or_none(d) for d in result.diff],
        "final_cv_model": {
            "candidate": _candidate_dict(result.final_cv.candidate),
            "validation_score": result.final_cv.validation_score,
            "iteration": result.final_cv.iteration,
        },
        "final_mv_model": {
            "candidate": _candidate_dict(result.final_mv.candidate),
            "validation_score": result.final_mv.validation_score,
            "iteration": result.final_mv.iteration,
        },
        "resources": {
            tag: report.as_dict()
            for tag, report in result.resources.items()
        },
        "failures": [
            {
                "iteration": f.iteration,
                "repeat": f.repeat,
                "fold": f.fold,
                "strategy": f.strategy,
                "error": f.error,
            }
            for f in result.failures
        ],
        "n_failed_iterations": len({f.iteration for f in result.failures}),
    }


def write_result_json(path, result):
    doc = result_to_dict(result)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return doc


def write_scores_csv(path, result):
    """Flat per-iteration scores: (iteration, strategy, score, capacity).

    One row per strategy per iteration; failed iterations leave score
    and capacity empty.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "strategy", "score", "capacity"])
        for i in range(result.n_iterations):
            for tag, scores, choices in (
                    ("cv", result.cv_scores, result.cv_choices),
                    ("mv", result.mv_scores, result.mv_choices)):
                choice = choices[i]
                writer.writerow([
                    i, tag, _csv_float(scores[i]),
                    choice.capacity if choice is not None else "",
                ])


def _csv_float(x):
    return repr(float(x)) if np.isfinite(x) else ""


def load_result_json(path):
    """Read and sanity-check a result document written by this module."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != RESULT_SCHEMA:
        raise ValueError(
            "%s is not a paired result document (schema %r)"
            % (path, doc.get("schema"))
        )
    if doc.get("diff_convention") != DIFF_CONVENTION:
        raise ValueError(
            "%s uses difference convention %r, expected %r"
            % (path, doc.get("diff_convention"), DIFF_CONVENTION)
        )
    for key in ("config", "diff", "cv_scores", "mv_scores", "cv_choices",
                "mv_choices", "resources", "final_cv_model",
                "final_mv_model"):
        if key not in doc:
            raise ValueError("%s is missing the %r field" % (path, key))
    return doc
