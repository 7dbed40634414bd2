"""Command-line front end.

Subcommands: validate, synth, distances, map, entropy, susceptible, report.
Every command is a deterministic function of its inputs and configuration;
outputs go only under the configured output directory.  Failures exit
nonzero with a machine-readable JSON error on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import report as rpt
from .advmap import create_map, neighbor_consistency
from .dataset import (
    ValidationError,
    generate_blobs,
    load_attack_log,
    load_dataset,
    save_attack_log,
    save_dataset,
    simulate_attack,
    subsample,
)
from .distances import (
    MEASURES,
    class_centroids,
    cosine_scaled_distance_matrix,
    euclidean_distance_matrix,
)
from .knn import (
    ForbiddenDistance,
    average_displacement,
    build_knn_graph,
    forbidden_distance,
    hopping_distance_matrix,
    mean_off_diagonal,
    nearest_class_affinity,
)
from .susceptible import evaluate_accuracy, rank_global
from .transition import entropy_sweep, uniform_transition, weighted_transition
from .tsne import TsneParams, save_embedding, tsne_distance_matrix, tsne_embed

DEFAULT_EPSILONS = [round(0.1 * i, 10) for i in range(1, 21)]


@dataclass(frozen=True)
class RunConfig:
    dataset: str | None = None
    log: str | None = None
    measures: tuple[str, ...] = ("euclidean", "euclidean_cosine", "hopping")
    knn_k: int = 6
    fd: float | None = None
    k_values: tuple[int, ...] = (1, 2, 4)
    perplexity: float = 30.0
    tsne_iters: int = 1000
    subsample_cap: int | None = None
    seed: int = 0
    out: str = "advgeo_out"
    zero_floor: float | None = None
    # synth-only knobs
    synth_classes: int = 5
    synth_per_class: int = 40
    synth_dims: int = 4
    synth_spread: float = 0.6
    synth_spacing: float = 4.0
    epsilons: tuple[float, ...] = tuple(DEFAULT_EPSILONS)

    def echo(self) -> dict:
        d = {k: v for k, v in self.__dict__.items()}
        d["measures"] = list(self.measures)
        d["k_values"] = list(self.k_values)
        d["epsilons"] = list(self.epsilons)
        return d


_CONFIG_KEYS = {f for f in RunConfig.__dataclass_fields__}


def _parse_list(text: str, cast):
    return tuple(cast(v) for v in text.split(",") if v.strip())


def load_config_file(path) -> dict:
    """Flat key=value file; '#' starts a comment line."""
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = raw
    return values


def _coerce(key: str, raw: str):
    if key in {"dataset", "log", "out"}:
        return raw
    if key == "measures":
        return _parse_list(raw, str)
    if key == "k_values":
        return _parse_list(raw, int)
    if key == "epsilons":
        return _parse_list(raw, float)
    if key in {"knn_k", "tsne_iters", "seed", "synth_classes", "synth_per_class", "synth_dims"}:
        return int(raw)
    if key == "subsample_cap":
        return None if raw.lower() in {"", "none"} else int(raw)
    if key in {"fd", "zero_floor"}:
        return None if raw.lower() in {"", "none"} else float(raw)
    return float(raw)


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        file_values = load_config_file(args.config)
        cfg = replace(cfg, **{k: _coerce(k, v) for k, v in file_values.items()})
    overrides = {}
    mapping = {
        "dataset": "dataset",
        "log": "log",
        "knn_k": "knn_k",
        "fd": "fd",
        "perplexity": "perplexity",
        "tsne_iters": "tsne_iters",
        "subsample": "subsample_cap",
        "seed": "seed",
        "out": "out",
        "zero_floor": "zero_floor",
        "classes": "synth_classes",
        "per_class": "synth_per_class",
        "dims": "synth_dims",
        "spread": "synth_spread",
        "spacing": "synth_spacing",
    }
    for arg_name, cfg_name in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            overrides[cfg_name] = value
    if getattr(args, "measures", None):
        overrides["measures"] = _parse_list(args.measures, str)
    if getattr(args, "k", None):
        overrides["k_values"] = _parse_list(args.k, int)
    if getattr(args, "epsilons", None):
        overrides["epsilons"] = _parse_list(args.epsilons, float)
    cfg = replace(cfg, **overrides)
    bad = [m for m in cfg.measures if m not in MEASURES]
    if bad:
        raise ValidationError(f"unknown measures {bad}; choose from {list(MEASURES)}")
    if not cfg.measures:
        raise ValidationError("at least one measure must be selected")
    return cfg


# ---------------------------------------------------------------------------
# Analysis pipeline pieces shared by commands


def _load_inputs(cfg: RunConfig, need_dataset=True, need_log=False):
    dataset = log = None
    if need_dataset:
        if not cfg.dataset:
            raise ValidationError("--dataset is required for this command")
        dataset = load_dataset(cfg.dataset)
        if cfg.subsample_cap:
            dataset = subsample(dataset, cfg.subsample_cap, cfg.seed)
    if need_log:
        if not cfg.log:
            raise ValidationError("--log is required for this command")
        log = load_attack_log(cfg.log, dataset.n_classes if dataset else None)
    return dataset, log


def compute_distances(dataset, cfg: RunConfig, timings: dict):
    """Distance matrix per selected measure, plus graph byproducts."""
    out = {}
    byproducts = {}
    cents = class_centroids(dataset)
    for measure in cfg.measures:
        t0 = time.perf_counter()
        if measure == "euclidean":
            out[measure] = euclidean_distance_matrix(cents)
        elif measure == "euclidean_cosine":
            out[measure] = cosine_scaled_distance_matrix(cents)
        elif measure == "hopping":
            graph = build_knn_graph(dataset, cfg.knn_k)
            out[measure] = hopping_distance_matrix(graph)
            byproducts["graph"] = graph
            byproducts["affinity"] = nearest_class_affinity(graph)
        elif measure == "tsne":
            params = TsneParams(
                perplexity=cfg.perplexity, max_iters=cfg.tsne_iters, seed=cfg.seed
            )
            embedding = tsne_embed(dataset, params)
            out[measure] = tsne_distance_matrix(embedding, dataset.n_classes)
            byproducts["embedding"] = embedding
        timings[f"distances.{measure}"] = time.perf_counter() - t0
    return out, byproducts


def threshold_for(measure: str, matrix, cfg: RunConfig) -> ForbiddenDistance:
    if cfg.fd is not None:
        return ForbiddenDistance(cfg.fd, measure, "user-supplied")
    if measure == "hopping":
        return forbidden_distance(matrix)
    return mean_off_diagonal(matrix)


def _valid_ks(cfg: RunConfig, n_classes: int) -> tuple[int, ...]:
    """Configured cutoffs that fit this dataset; at least k = n-1 survives."""
    ks = tuple(k for k in cfg.k_values if 1 <= k <= n_classes - 1)
    return ks or (n_classes - 1,)


def _transitions_for(matrices, cfg: RunConfig):
    n = next(iter(matrices.values())).n_classes
    models = [("uniform", uniform_transition(n))]
    for measure, matrix in matrices.items():
        models.append(
            (measure, weighted_transition(matrix, zero_floor=cfg.zero_floor))
        )
    return models


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(cfg: RunConfig) -> dict:
    result = {}
    if not cfg.dataset and not cfg.log:
        raise ValidationError("nothing to validate: give --dataset and/or --log")
    dataset = None
    if cfg.dataset:
        dataset = load_dataset(cfg.dataset)
        result["dataset"] = {
            "path": cfg.dataset,
            "points": dataset.n_points,
            "dims": dataset.n_dims,
            "classes": dataset.n_classes,
        }
    if cfg.log:
        log = load_attack_log(cfg.log, dataset.n_classes if dataset else None)
        result["log"] = {
            "path": cfg.log,
            "records": len(log.records),
            "misclassified": len(log.misclassified),
            "classes": log.n_classes,
            "epsilons": log.epsilon_values,
        }
    result["valid"] = True
    return result


def cmd_synth(cfg: RunConfig) -> dict:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    t0 = time.perf_counter()
    dataset = generate_blobs(
        cfg.synth_classes,
        cfg.synth_per_class,
        cfg.synth_dims,
        cfg.synth_spacing,
        cfg.synth_spread,
        cfg.seed,
    )
    graph = build_knn_graph(dataset, cfg.knn_k)
    s_d = hopping_distance_matrix(graph)
    transition = weighted_transition(s_d, zero_floor=cfg.zero_floor)
    eps = list(cfg.epsilons)
    top = max(eps) if eps else 1.0
    log = simulate_attack(
        dataset, transition, eps, cfg.seed, success_prob=[min(1.0, e / top) for e in eps]
    )
    timings["synth"] = time.perf_counter() - t0
    dataset_path = out / "dataset.csv"
    log_path = out / "attack_log.csv"
    save_dataset(dataset, dataset_path)
    save_attack_log(log, log_path)
    rpt.write_manifest(out / "manifest.json", cfg.echo(), timings)
    return {"dataset": str(dataset_path), "log": str(log_path)}


def cmd_distances(cfg: RunConfig) -> dict:
    dataset, _ = _load_inputs(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    matrices, extras = compute_distances(dataset, cfg, timings)
    written = []
    for measure, matrix in matrices.items():
        path = out / f"distances_{measure}.csv"
        rpt.write_matrix_csv(matrix, path)
        written.append(str(path))
    if "affinity" in extras:
        rpt.write_affinity_csv(extras["affinity"], out / "nearest_class_affinity.csv")
        written.append(str(out / "nearest_class_affinity.csv"))
    if "embedding" in extras:
        save_embedding(extras["embedding"], out / "embedding.csv")
        rpt.write_kl_trace_csv(extras["embedding"].kl_trace, out / "kl_trace.csv")
        written += [str(out / "embedding.csv"), str(out / "kl_trace.csv")]
    rpt.write_manifest(out / "manifest.json", cfg.echo(), timings)
    return {"written": written}


def cmd_map(cfg: RunConfig) -> dict:
    dataset, _ = _load_inputs(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    matrices, _ = compute_distances(dataset, cfg, timings)
    written = []
    for measure, matrix in matrices.items():
        f_d = threshold_for(measure, matrix, cfg)
        amap = create_map(matrix, f_d)
        rpt.write_map_csv(amap, out / f"map_{measure}.csv")
        rpt.write_map_json(amap, out / f"map_{measure}.json")
        written += [str(out / f"map_{measure}.csv"), str(out / f"map_{measure}.json")]
    rpt.write_manifest(out / "manifest.json", cfg.echo(), timings)
    return {"written": written}


def cmd_entropy(cfg: RunConfig) -> dict:
    dataset, log = _load_inputs(cfg, need_log=True)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    matrices, _ = compute_distances(dataset, cfg, timings)
    sweep = entropy_sweep(log, _transitions_for(matrices, cfg))
    rpt.write_entropy_csv(sweep, out / "entropy_sweep.csv")
    rpt.write_manifest(out / "manifest.json", cfg.echo(), timings)
    return {"written": [str(out / "entropy_sweep.csv")], "entries": len(sweep.entries)}


def cmd_susceptible(cfg: RunConfig) -> dict:
    dataset, log = _load_inputs(cfg, need_log=True)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    matrices, _ = compute_distances(dataset, cfg, timings)
    written = []
    for measure, matrix in matrices.items():
        transition = weighted_transition(matrix, zero_floor=cfg.zero_floor)
        ranking = rank_global(transition)
        rpt.write_ranking_json(ranking, out / f"ranking_{measure}.json")
        written.append(str(out / f"ranking_{measure}.json"))
        accuracy = evaluate_accuracy(log, ranking, _valid_ks(cfg, dataset.n_classes))
        rpt.write_accuracy_csv(accuracy, out / f"accuracy_{measure}.csv")
        written.append(str(out / f"accuracy_{measure}.csv"))
    rpt.write_manifest(out / "manifest.json", cfg.echo(), timings)
    return {"written": written}


def cmd_report(cfg: RunConfig) -> dict:
    dataset, log = _load_inputs(cfg, need_log=True)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    written = []
    matrices, extras = compute_distances(dataset, cfg, timings)

    for measure, matrix in matrices.items():
        rpt.write_matrix_csv(matrix, out / f"distances_{measure}.csv")
        written.append(f"distances_{measure}.csv")
        f_d = threshold_for(measure, matrix, cfg)
        amap = create_map(matrix, f_d)
        rpt.write_map_csv(amap, out / f"map_{measure}.csv")
        rpt.write_map_json(amap, out / f"map_{measure}.json")
        written += [f"map_{measure}.csv", f"map_{measure}.json"]
        transition = weighted_transition(matrix, zero_floor=cfg.zero_floor)
        ranking = rank_global(transition)
        rpt.write_ranking_json(ranking, out / f"ranking_{measure}.json")
        written.append(f"ranking_{measure}.json")
        accuracy = evaluate_accuracy(log, ranking, _valid_ks(cfg, dataset.n_classes))
        rpt.write_accuracy_csv(accuracy, out / f"accuracy_{measure}.csv")
        written.append(f"accuracy_{measure}.csv")

    sweep = entropy_sweep(log, _transitions_for(matrices, cfg))
    rpt.write_entropy_csv(sweep, out / "entropy_sweep.csv")
    written.append("entropy_sweep.csv")

    consistency = {}
    if "hopping" in matrices:
        s_d = matrices["hopping"]
        f_d = threshold_for("hopping", s_d, cfg)
        rows = []
        for eps in log.epsilon_values:
            recs = [r for r in log.records if r.epsilon == eps]
            sub = type(log)(tuple(recs), log.n_classes, log.metadata)
            flips = len(sub.misclassified)
            disp = average_displacement(sub, s_d) if recs else 0.0
            rows.append((eps, flips, disp, f_d.value))
        rpt.write_displacement_csv(rows, out / "displacement.csv")
        written.append("displacement.csv")
        overall, per_class = neighbor_consistency(create_map(s_d, f_d), log)
        consistency = {"overall": overall, "per_class": {str(k): v for k, v in per_class.items()}}
        (out / "consistency.json").write_text(
            __import__("json").dumps(consistency, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        written.append("consistency.json")
        rpt.write_affinity_csv(extras["affinity"], out / "nearest_class_affinity.csv")
        written.append("nearest_class_affinity.csv")

    if "embedding" in extras:
        save_embedding(extras["embedding"], out / "embedding.csv")
        rpt.write_kl_trace_csv(extras["embedding"].kl_trace, out / "kl_trace.csv")
        written += ["embedding.csv", "kl_trace.csv"]

    rpt.write_manifest(out / "manifest.json", cfg.echo(), timings, {"files": sorted(written)})
    return {"out": str(out), "files": sorted(written)}


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--dataset", help="dataset CSV or binary file")
    p.add_argument("--log", help="attack log CSV")
    p.add_argument("--measures", help="comma list from: tsne,euclidean,euclidean_cosine,hopping")
    p.add_argument("--knn-k", dest="knn_k", type=int, help="k for the k-NN graph (default 6)")
    p.add_argument("--fd", type=float, help="override the forbidden distance")
    p.add_argument("--k", help="comma list of top-k cutoffs for accuracy (default 1,2,4)")
    p.add_argument("--perplexity", type=float, help="t-SNE perplexity (default 30)")
    p.add_argument("--tsne-iters", dest="tsne_iters", type=int, help="t-SNE iterations")
    p.add_argument("--subsample", type=int, help="per-class subsampling cap")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--out", help="output directory (default advgeo_out)")
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument(
        "--zero-floor", dest="zero_floor", type=float,
        help="floor applied to zero inter-class distances before 1/d weighting",
    )


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advgeo",
        description="Class-geometry analysis of classifiers under adversarial attack",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "validate": cmd_validate,
        "synth": cmd_synth,
        "distances": cmd_distances,
        "map": cmd_map,
        "entropy": cmd_entropy,
        "susceptible": cmd_susceptible,
        "report": cmd_report,
    }
    for name, fn in commands.items():
        p = sub.add_parser(name)
        _add_common(p)
        if name == "synth":
            p.add_argument("--classes", type=int, help="number of blob classes")
            p.add_argument("--per-class", dest="per_class", type=int)
            p.add_argument("--dims", type=int)
            p.add_argument("--spread", type=float)
            p.add_argument("--spacing", type=float, help="center spacing on the first axis")
            p.add_argument("--epsilons", help="comma list of epsilon values")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        result = args.func(cfg)
    except (ValidationError, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    json.dump(result, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
