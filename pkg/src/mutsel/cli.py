"""Command line interface: run, report, sweep-features.

Exit codes: 0 success, 2 config error, 3 data error (missing or
malformed dataset/result files), 4 partial run failure (some cells
aborted, the rest completed and a manifest was written).

Config JSON layout::

    {
      "seed": 0,
      "outer": {"repeats": 10, "k": 10},
      "inner_k": [5],                  // int or list of ints
      "mv": {"eta": 0.2, "repeats": 1},
      "stratified": false,
      "feature_k": null,
      "resource_model": {"power_watts": 65.0,
                         "carbon_intensity_g_per_kwh": 475.0},
      "datasets": [
        {"name": "toy", "csv": "toy.csv", "label_column": "target"},
        {"name": "blob", "synthetic": {"n_samples": 300, "n_features": 5,
          "class_separation": 3.0, "label_noise_rate": 0.1, "seed": 7}}
      ],
      "algorithms": [
        {"algorithm": "decision_tree", "capacities": {"min": 1, "max": 30}},
        {"algorithm": "poly_krc", "capacities": [1, 2, 3],
         "regularization": 0.001}
      ]
    }

One run cell is a (dataset, algorithm entry, inner k) combination; cells
get child seeds mixed from the master seed, and the master seed comes
from --seed, else the MUTSEL_SEED environment variable, else the config.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _seeds, backends
from .bayes import DIFF_CONVENTION, RopeInterval, correlated_ttest, \
    hierarchical_test, write_posterior_samples_csv
from .data import DataError, load_csv, synthetic_from_spec, \
    validate_synthetic_spec
from .harness import ExperimentConfig, HarnessAbortError, ResourceModel, \
    load_result_json, run_paired_comparison, write_result_json, \
    write_scores_csv
from .learners import ALGORITHMS, candidate_grid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_PARTIAL = 4

MANIFEST_SCHEMA = "mutsel.run_manifest.v1"
REPORT_SCHEMA = "mutsel.report.v1"


class ConfigError(ValueError):
    """Configuration file or command line argument is invalid."""


def _fail(path, message):
    where = ("%s: " % path) if path else ""
    raise ConfigError(where + message)


def _expect(doc, key, kinds, path, default=KeyError):
    if key not in doc:
        if default is KeyError:
            _fail(path, "missing required key %r" % key)
        return default
    val = doc[key]
    if kinds is not None and not isinstance(val, kinds):
        _fail("%s.%s" % (path, key) if path else key,
              "expected %s, got %r"
              % (" or ".join(k.__name__ for k in kinds), type(val).__name__))
    return val


_TOP_KEYS = {"seed", "outer", "inner_k", "mv", "stratified", "feature_k",
             "resource_model", "datasets", "algorithms"}


def parse_config(doc):
    """Validate a config mapping; returns a normalised dict.

    Structure errors raise ConfigError; no dataset is touched here, so
    configuration problems always surface before data problems.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError("unknown config keys: %s" % sorted(unknown))

    out = {"seed": int(_expect(doc, "seed", (int,), "", 0))}

    outer = _expect(doc, "outer", (dict,), "", {})
    out["repeats"] = int(_expect(outer, "repeats", (int,), "outer", 10))
    out["k_outer"] = int(_expect(outer, "k", (int,), "outer", 10))
    bad = set(outer) - {"repeats", "k"}
    if bad:
        _fail("outer", "unknown keys %s" % sorted(bad))

    inner = doc.get("inner_k", 5)
    if isinstance(inner, bool) or not isinstance(inner, (int, list)):
        _fail("inner_k", "expected an int or a list of ints")
    inner_ks = [inner] if isinstance(inner, int) else inner
    if not inner_ks or not all(
            isinstance(k, int) and not isinstance(k, bool) and k >= 2
            for k in inner_ks):
        _fail("inner_k", "every inner k must be an integer >= 2")
    out["inner_ks"] = [int(k) for k in inner_ks]

    mv = _expect(doc, "mv", (dict,), "", {})
    out["eta"] = float(_expect(mv, "eta", (int, float), "mv", 0.2))
    out["mv_repeats"] = int(_expect(mv, "repeats", (int,), "mv", 1))
    bad = set(mv) - {"eta", "repeats"}
    if bad:
        _fail("mv", "unknown keys %s" % sorted(bad))
    if not 0.0 < out["eta"] < 0.5:
        _fail("mv.eta", "must lie in (0, 0.5), got %r" % out["eta"])

    out["stratified"] = bool(_expect(doc, "stratified", (bool,), "", False))
    fk = doc.get("feature_k")
    if fk is not None and (isinstance(fk, bool) or not isinstance(fk, int)
                           or fk < 1):
        _fail("feature_k", "must be null or a positive integer")
    out["feature_k"] = fk

    rm = _expect(doc, "resource_model", (dict,), "", {})
    bad = set(rm) - {"power_watts", "carbon_intensity_g_per_kwh"}
    if bad:
        _fail("resource_model", "unknown keys %s" % sorted(bad))
    try:
        out["resource_model"] = ResourceModel(
            float(_expect(rm, "power_watts", (int, float),
                          "resource_model", 65.0)),
            float(_expect(rm, "carbon_intensity_g_per_kwh", (int, float),
                          "resource_model", 475.0)),
        )
    except ValueError as exc:
        _fail("resource_model", str(exc))

    datasets = _expect(doc, "datasets", (list,), "")
    if not datasets:
        _fail("datasets", "needs at least one entry")
    out["datasets"] = [
        _parse_dataset_entry(entry, "datasets[%d]" % i)
        for i, entry in enumerate(datasets)
    ]
    names = [d["name"] for d in out["datasets"]]
    if len(set(names)) != len(names):
        _fail("datasets", "dataset names must be unique, got %s" % names)

    algorithms = _expect(doc, "algorithms", (list,), "")
    if not algorithms:
        _fail("algorithms", "needs at least one entry")
    out["algorithms"] = [
        _parse_algorithm_entry(entry, "algorithms[%d]" % i)
        for i, entry in enumerate(algorithms)
    ]
    if out["repeats"] < 1:
        _fail("outer.repeats", "must be at least 1")
    if out["k_outer"] < 2:
        _fail("outer.k", "must be at least 2")
    if out["mv_repeats"] < 1:
        _fail("mv.repeats", "must be at least 1")
    return out


def _parse_dataset_entry(entry, path):
    if not isinstance(entry, dict):
        _fail(path, "must be an object")
    has_csv = "csv" in entry
    has_synth = "synthetic" in entry
    if has_csv == has_synth:
        _fail(path, "needs exactly one of 'csv' or 'synthetic'")
    if has_csv:
        bad = set(entry) - {"name", "csv", "label_column"}
        if bad:
            _fail(path, "unknown keys %s" % sorted(bad))
        csv_path = _expect(entry, "csv", (str,), path)
        label = _expect(entry, "label_column", (str, int), path)
        name = str(entry.get("name", Path(csv_path).stem))
        return {"name": name, "csv": csv_path, "label_column": label}
    bad = set(entry) - {"name", "synthetic"}
    if bad:
        _fail(path, "unknown keys %s" % sorted(bad))
    spec = _expect(entry, "synthetic", (dict,), path)
    name = str(entry.get("name", spec.get("name", "synthetic")))
    try:
        validate_synthetic_spec(dict(spec, name=name))
    except DataError as exc:
        _fail(path + ".synthetic", str(exc))
    return {"name": name, "synthetic": dict(spec, name=name)}


def _parse_algorithm_entry(entry, path):
    if not isinstance(entry, dict):
        _fail(path, "must be an object")
    bad = set(entry) - {"algorithm", "capacities", "regularization",
                        "epochs"}
    if bad:
        _fail(path, "unknown keys %s" % sorted(bad))
    algorithm = _expect(entry, "algorithm", (str,), path)
    if algorithm not in ALGORITHMS:
        _fail(path + ".algorithm",
              "unknown algorithm %r (choose from %s)"
              % (algorithm, ", ".join(ALGORITHMS)))
    caps = _expect(entry, "capacities", (list, dict), path)
    if isinstance(caps, dict):
        bad = set(caps) - {"min", "max"}
        if bad:
            _fail(path + ".capacities", "unknown keys %s" % sorted(bad))
        lo = _expect(caps, "min", (int,), path + ".capacities")
        hi = _expect(caps, "max", (int,), path + ".capacities")
        if lo > hi:
            _fail(path + ".capacities", "min exceeds max")
        caps = list(range(int(lo), int(hi) + 1))
    if not caps or not all(
            isinstance(c, int) and not isinstance(c, bool) for c in caps):
        _fail(path + ".capacities", "must be a nonempty list of integers")
    reg = entry.get("regularization")
    if reg is not None:
        reg = float(reg)
    epochs = entry.get("epochs")
    if epochs is not None and (isinstance(epochs, bool)
                                or not isinstance(epochs, int)
                                or epochs < 1):
        _fail(path + ".epochs", "must be a positive integer")
    if epochs is not None and algorithm != "poly_svm":
        _fail(path + ".epochs", "only applies to poly_svm")
    try:
        grid = candidate_grid(algorithm, caps, reg)
    except ValueError as exc:
        _fail(path, str(exc))
    return {"algorithm": algorithm, "candidates": grid, "epochs": epochs}


def load_datasets(cfg, base_dir):
    """Materialise every dataset entry; raises DataError family on
    malformed files so callers can map them to the data exit code."""
    loaded = []
    for entry in cfg["datasets"]:
        if "csv" in entry:
            path = Path(entry["csv"])
            if not path.is_absolute():
                path = Path(base_dir) / path
            ds = load_csv(path, entry["label_column"])
            ds = ds.__class__(ds.features, ds.labels, ds.feature_names,
                              entry["name"])
        else:
            ds = synthetic_from_spec(entry["synthetic"])
        loaded.append((entry["name"], ds))
    return loaded


def _slug(name):
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", name).strip("-") or "x"


def _resolve_seed(cfg_seed, flag_seed):
    if flag_seed is not None:
        return int(flag_seed), "flag"
    env = os.environ.get("MUTSEL_SEED")
    if env is not None and env.strip():
        try:
            return int(env), "env"
        except ValueError:
            raise ConfigError(
                "MUTSEL_SEED must be an integer, got %r" % env) from None
    return int(cfg_seed), "config"


def _utc_stamp():
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _cells_of(cfg, datasets):
    """(cell name, dataset index, algorithm index, k_inner) tuples."""
    alg_counts = {}
    for entry in cfg["algorithms"]:
        alg_counts[entry["algorithm"]] = \
            alg_counts.get(entry["algorithm"], 0) + 1
    cells = []
    for di, (ds_name, _) in enumerate(datasets):
        for ai, entry in enumerate(cfg["algorithms"]):
            for k in cfg["inner_ks"]:
                name = "%s__%s__k%d" % (_slug(ds_name),
                                        entry["algorithm"], k)
                if alg_counts[entry["algorithm"]] > 1:
                    name += "__%d" % ai
                cells.append((name, di, ai, k))
    return cells


def cmd_run(config_path, out_dir, workers=1, seed=None):
    """Execute every cell of a config; returns the exit code."""
    doc = _read_json(config_path)
    cfg = parse_config(doc)
    master, seed_source = _resolve_seed(cfg["seed"], seed)
    datasets = load_datasets(cfg, Path(config_path).parent)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _utc_stamp()
    cell_rows = []
    n_failed = 0
    for name, di, ai, k_inner in _cells_of(cfg, datasets):
        ds_name, ds = datasets[di]
        entry = cfg["algorithms"][ai]
        config = ExperimentConfig(
            dataset=ds,
            candidates=entry["candidates"],
            repeats=cfg["repeats"],
            k_outer=cfg["k_outer"],
            k_inner=k_inner,
            eta=cfg["eta"],
            mv_repeats=cfg["mv_repeats"],
            seed=_seeds.mix(master, di, ai, k_inner),
            stratified=cfg["stratified"],
            epochs=entry["epochs"],
            feature_k=cfg["feature_k"],
            resource_model=cfg["resource_model"],
        )
        row = {
            "name": name,
            "dataset": ds_name,
            "algorithm": entry["algorithm"],
            "k_inner": k_inner,
            "feature_k": cfg["feature_k"],
            "status": "ok",
            "error": None,
            "result": None,
            "scores_csv": None,
            "config_hash": None,
        }
        try:
            result = run_paired_comparison(config, workers)
        except HarnessAbortError as exc:
            row["status"] = "failed"
            row["error"] = str(exc)
            n_failed += 1
            print("cell %s: FAILED (%s)" % (name, exc), file=sys.stderr)
        else:
            result_doc = write_result_json(out / ("%s.json" % name), result)
            write_scores_csv(out / ("%s.scores.csv" % name), result)
            row["result"] = "%s.json" % name
            row["scores_csv"] = "%s.scores.csv" % name
            row["config_hash"] = result_doc["config_hash"]
            print("cell %s: ok (%d iterations, %d failed)"
                  % (name, result.n_iterations,
                     len({f.iteration for f in result.failures})))
        cell_rows.append(row)

    for row in cell_rows:
        if row["status"] != "ok":
            continue
        loaded = load_result_json(out / row["result"])
        if loaded["config_hash"] != row["config_hash"]:
            raise RuntimeError(
                "manifest self-check failed for cell %s" % row["name"]
            )
        if not (out / row["scores_csv"]).exists():
            raise RuntimeError(
                "scores CSV missing for cell %s" % row["name"]
            )

    manifest = {
        "schema": MANIFEST_SCHEMA,
        "version": __version__,
        "command": "run",
        "backend": backends.backend_name(),
        "config_file": str(config_path),
        "seed": master,
        "seed_source": seed_source,
        "workers": workers,
        "started_utc": started,
        "finished_utc": _utc_stamp(),
        "datasets": {
            name: {
                "n_samples": ds.n_samples,
                "n_features": ds.n_features,
                "fingerprint": ds.fingerprint(),
            }
            for name, ds in datasets
        },
        "cells": cell_rows,
    }
    _write_json(out / "manifest.json", manifest)
    print("manifest: %s" % (out / "manifest.json"))
    return EXIT_PARTIAL if n_failed else EXIT_OK


def _capacity_summary(choices):
    caps = np.array([c["capacity"] for c in choices if c is not None],
                    dtype=np.float64)
    if caps.size == 0:
        return {"n": 0, "mean": None, "std": None, "median": None,
                "q25": None, "q75": None}
    return {
        "n": int(caps.size),
        "mean": float(caps.mean()),
        "std": float(caps.std()),
        "median": float(np.median(caps)),
        "q25": float(np.percentile(caps, 25)),
        "q75": float(np.percentile(caps, 75)),
    }


def _cell_report(doc, rope, rho):
    diffs = np.array([d for d in doc["diff"] if d is not None])
    if diffs.size < 2:
        raise DataError(
            "result %s has %d usable differences; need at least 2"
            % (doc["config"]["dataset"]["name"], diffs.size)
        )
    r = rho if rho is not None else 1.0 / doc["config"]["k_outer"]
    triple, model = correlated_ttest(diffs, r, rope)
    return {
        "dataset": doc["config"]["dataset"]["name"],
        "n_differences": int(diffs.size),
        "rho": r,
        "posterior": triple.as_dict(),
        "mean_diff": model.mean,
        "capacity": {
            "cv": _capacity_summary(doc["cv_choices"]),
            "mv": _capacity_summary(doc["mv_choices"]),
        },
        "resources": doc["resources"],
        "config_hash": doc["config_hash"],
    }, diffs


def cmd_report(result_paths, out_dir, rope=None, rho=None,
               n_samples=4000, seed=0):
    """Posterior report over one or more result files; exit code."""
    rope = rope if rope is not None else RopeInterval()
    docs = []
    for path in result_paths:
        if not Path(path).exists():
            raise DataError("no such result file: %s" % path)
        try:
            docs.append((path, load_result_json(path)))
        except (ValueError, OSError) as exc:
            raise DataError(str(exc)) from None
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    all_diffs = []
    for path, doc in docs:
        row, diffs = _cell_report(doc, rope, rho)
        row["result_file"] = str(path)
        rows.append(row)
        all_diffs.append(diffs)
        p = row["posterior"]
        print("cell %s: p_cv=%.4f p_pe=%.4f p_mv=%.4f (mean diff %+.5f)"
              % (row["dataset"], p["p_cv"], p["p_pe"], p["p_mv"],
                 row["mean_diff"]))

    hierarchical = None
    if len(rows) >= 2:
        rhos = {row["rho"] for row in rows}
        if len(rhos) != 1:
            raise ConfigError(
                "results disagree on rho (%s); pass --rho explicitly"
                % sorted(rhos)
            )
        triple, samples = hierarchical_test(
            all_diffs, rhos.pop(), rope, n_samples, seed)
        write_posterior_samples_csv(out / "posterior_samples.csv",
                                    samples, rope)
        hierarchical = {
            "posterior": triple.as_dict(),
            "n_samples": int(n_samples),
            "seed": int(seed),
            "samples_csv": "posterior_samples.csv",
        }
        print("hierarchical: p_cv=%.4f p_pe=%.4f p_mv=%.4f"
              % (triple.p_cv, triple.p_pe, triple.p_mv))

    summary = {
        "schema": REPORT_SCHEMA,
        "diff_convention": DIFF_CONVENTION,
        "rope": [rope.lo, rope.hi],
        "cells": rows,
        "hierarchical": hierarchical,
    }
    _write_json(out / "summary.json", summary)

    with open(out / "cells.csv", "w", newline="", encoding="utf-8") as fh:
        import csv as _csv
        writer = _csv.writer(fh)
        writer.writerow([
            "dataset", "n_differences", "rho", "p_cv", "p_pe", "p_mv",
            "mean_diff", "cv_capacity_mean", "mv_capacity_mean",
            "cv_model_fits", "mv_model_fits", "cv_co2_grams",
            "mv_co2_grams",
        ])
        for row in rows:
            p = row["posterior"]
            writer.writerow([
                row["dataset"], row["n_differences"], row["rho"],
                repr(p["p_cv"]), repr(p["p_pe"]), repr(p["p_mv"]),
                repr(row["mean_diff"]),
                row["capacity"]["cv"]["mean"],
                row["capacity"]["mv"]["mean"],
                row["resources"]["cv"]["model_fits"],
                row["resources"]["mv"]["model_fits"],
                row["resources"]["cv"]["co2_grams"],
                row["resources"]["mv"]["co2_grams"],
            ])
    print("report: %s" % (out / "summary.json"))
    return EXIT_OK


def cmd_sweep_features(config_path, k_values, out_dir, workers=1,
                       seed=None):
    """Re-run every cell at several feature-selection sizes K.

    Emits one result file per (cell, K) plus a per-cell curve CSV of
    posterior probabilities and chosen capacities against K. All K share
    a cell's seed, so fold plans and selection draws are paired across
    the sweep.
    """
    doc = _read_json(config_path)
    cfg = parse_config(doc)
    if not k_values:
        raise ConfigError("sweep needs at least one K")
    if len(set(k_values)) != len(k_values):
        raise ConfigError("duplicate K values: %s" % k_values)
    master, seed_source = _resolve_seed(cfg["seed"], seed)
    datasets = load_datasets(cfg, Path(config_path).parent)
    for _, ds in datasets:
        for K in k_values:
            if not 1 <= K <= ds.n_features:
                raise ConfigError(
                    "K=%d out of range for dataset %s with %d features"
                    % (K, ds.name, ds.n_features)
                )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _utc_stamp()
    rope = RopeInterval()
    cell_rows = []
    n_failed = 0
    for name, di, ai, k_inner in _cells_of(cfg, datasets):
        ds_name, ds = datasets[di]
        entry = cfg["algorithms"][ai]
        curve = []
        for K in k_values:
            config = ExperimentConfig(
                dataset=ds,
                candidates=entry["candidates"],
                repeats=cfg["repeats"],
                k_outer=cfg["k_outer"],
                k_inner=k_inner,
                eta=cfg["eta"],
                mv_repeats=cfg["mv_repeats"],
                seed=_seeds.mix(master, di, ai, k_inner),
                stratified=cfg["stratified"],
                epochs=entry["epochs"],
                feature_k=K,
                resource_model=cfg["resource_model"],
            )
            row = {
                "name": "%s__K%d" % (name, K),
                "dataset": ds_name,
                "algorithm": entry["algorithm"],
                "k_inner": k_inner,
                "feature_k": K,
                "status": "ok",
                "error": None,
                "result": None,
                "scores_csv": None,
                "config_hash": None,
            }
            try:
                result = run_paired_comparison(config, workers)
            except HarnessAbortError as exc:
                row["status"] = "failed"
                row["error"] = str(exc)
                n_failed += 1
                print("cell %s K=%d: FAILED (%s)" % (name, K, exc),
                      file=sys.stderr)
            else:
                fname = "%s__K%d" % (name, K)
                result_doc = write_result_json(
                    out / ("%s.json" % fname), result)
                write_scores_csv(out / ("%s.scores.csv" % fname), result)
                row["result"] = "%s.json" % fname
                row["scores_csv"] = "%s.scores.csv" % fname
                row["config_hash"] = result_doc["config_hash"]
                rep, _ = _cell_report(result_doc, rope, None)
                p = rep["posterior"]
                for strat in ("cv", "mv"):
                    cap = rep["capacity"][strat]
                    curve.append([
                        K, strat,
                        repr(p["p_cv"]), repr(p["p_pe"]), repr(p["p_mv"]),
                        repr(rep["mean_diff"]),
                        cap["mean"], cap["std"],
                    ])
                print("cell %s K=%d: ok (p_pe=%.4f)" % (name, K, p["p_pe"]))
            cell_rows.append(row)
        if curve:
            curve_path = out / ("%s__curve.csv" % name)
            with open(curve_path, "w", newline="",
                      encoding="utf-8") as fh:
                import csv as _csv
                writer = _csv.writer(fh)
                writer.writerow([
                    "K", "strategy", "p_cv", "p_pe", "p_mv",
                    "mean_diff", "capacity_mean", "capacity_std",
                ])
                writer.writerows(curve)

    manifest = {
        "schema": MANIFEST_SCHEMA,
        "version": __version__,
        "command": "sweep-features",
        "backend": backends.backend_name(),
        "config_file": str(config_path),
        "seed": master,
        "seed_source": seed_source,
        "workers": workers,
        "k_values": list(k_values),
        "rope": [rope.lo, rope.hi],
        "started_utc": started,
        "finished_utc": _utc_stamp(),
        "datasets": {
            name: {
                "n_samples": ds.n_samples,
                "n_features": ds.n_features,
                "fingerprint": ds.fingerprint(),
            }
            for name, ds in datasets
        },
        "cells": cell_rows,
    }
    _write_json(out / "manifest.json", manifest)
    print("manifest: %s" % (out / "manifest.json"))
    return EXIT_PARTIAL if n_failed else EXIT_OK


def _read_json(path):
    p = Path(path)
    if not p.exists():
        raise ConfigError("no such config file: %s" % p)
    try:
        with open(p, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("%s is not valid JSON: %s" % (p, exc)) from None


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _parse_rope(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError("--rope expects LO,HI, got %r" % text)
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError("--rope bounds must be numbers, got %r"
                          % text) from None
    if not lo < hi:
        raise ConfigError("--rope needs LO < HI, got %r" % text)
    return RopeInterval(lo, hi)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mutsel",
        description="Mutation validation vs. cross-validation model "
                    "selection experiments.",
    )
    parser.add_argument("--version", action="version",
                        version="mutsel %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a config's cells")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=None,
                       help="overrides MUTSEL_SEED and the config seed")

    p_rep = sub.add_parser("report", help="posterior report over results")
    p_rep.add_argument("results", nargs="+")
    p_rep.add_argument("--out", required=True)
    p_rep.add_argument("--rope", default=None,
                       help="LO,HI practical-equivalence bounds "
                            "(default -0.025,0.025)")
    p_rep.add_argument("--rho", type=float, default=None,
                       help="override the 1/k_outer correlation")
    p_rep.add_argument("--samples", type=int, default=4000)
    p_rep.add_argument("--seed", type=int, default=0)

    p_sw = sub.add_parser("sweep-features",
                          help="rerun cells at several feature counts")
    p_sw.add_argument("--config", required=True)
    p_sw.add_argument("--k", required=True,
                      help="comma-separated feature counts, e.g. 50,4950")
    p_sw.add_argument("--out", required=True)
    p_sw.add_argument("--workers", type=int, default=1)
    p_sw.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out, args.workers, args.seed)
        if args.command == "report":
            rope = _parse_rope(args.rope) if args.rope else None
            if args.samples < 1000:
                raise ConfigError("--samples must be at least 1000")
            return cmd_report(args.results, args.out, rope, args.rho,
                              args.samples, args.seed)
        if args.command == "sweep-features":
            try:
                k_values = [int(s) for s in args.k.split(",") if s.strip()]
            except ValueError:
                raise ConfigError(
                    "--k expects comma-separated integers, got %r"
                    % args.k) from None
            return cmd_sweep_features(args.config, k_values, args.out,
                                      args.workers, args.seed)
        raise ConfigError("unknown command %r" % args.command)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FileNotFoundError) as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
