"""Command-line pipeline: ingest -> select-features -> project -> footprint
-> classify -> plot, runnable end to end or one stage at a time.

Each stage reads its predecessor's serialized artifacts from the output
directory, so a staged run and a monolithic `pipeline` run produce identical
bytes. All randomness derives from one global seed (config `seed`, overridden
by the EAPR_SEED environment variable, overridden by --seed).
"""
from __future__ import annotations

import hashlib
import json
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import click
import numpy as np

from . import classify, footprint as fp, ingest, project, report as rpt, selection
from .model import FeatureSubset, InstanceTable, InstanceRecord, Outcome, validate_table
from .seeds import derive_seed

STAGES = ("ingest", "select-features", "project", "footprint", "classify", "plot")

_ARTIFACTS = {
    "table.json": "ingest",
    "selection.json": "select-features",
    "pca_model.json": "project",
    "coordinates.json": "project",
    "footprints.json": "footprint",
    "models.json": "classify",
    "metrics.json": "classify",
}

_STAGE_NEEDS = {
    "ingest": (),
    "select-features": ("table.json",),
    "project": ("table.json", "selection.json"),
    "footprint": ("table.json", "coordinates.json"),
    "classify": ("table.json", "coordinates.json"),
    "plot": (
        "table.json",
        "selection.json",
        "pca_model.json",
        "coordinates.json",
        "footprints.json",
        "metrics.json",
    ),
}


class CliFailure(Exception):
    """Carries a machine-parsable error code; printed as `CODE detail`."""

    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code} {detail}".strip())
        self.code = code
        self.detail = detail


@dataclass(frozen=True)
class PipelineConfig:
    input_path: Path
    output_dir: Path
    ga: selection.GaConfig
    svm: classify.SvmConfig
    plot: rpt.PlotSpec
    repeats: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


_CONFIG_KEYS = {
    "input", "output", "seed", "repeats",
    "ga.population", "ga.generations", "ga.crossover", "ga.mutation",
    "ga.tournament", "ga.min_k", "ga.max_k", "ga.cv_folds",
    "svm.kernel", "svm.c", "svm.gamma", "svm.tolerance", "svm.max_passes",
    "plot.width", "plot.height", "plot.margin", "plot.point_radius", "plot.palette",
}


def parse_config_file(path: Path) -> dict[str, str]:
    """Flat `key=value` lines with dotted keys; `#` starts a comment."""
    values: dict[str, str] = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliFailure("E_IO", f"cannot read config: {exc}") from exc
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliFailure("E_PARSE", f"config line {line_no}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise CliFailure("E_PARSE", f"config line {line_no}: unknown key {key!r}")
        values[key] = value
    return values


def _num(values: dict[str, str], key: str, cast, default):
    if key not in values:
        return default
    try:
        return cast(values[key])
    except ValueError:
        raise CliFailure("E_PARSE", f"config key {key}: bad value {values[key]!r}") from None


def build_config(
    file_values: dict[str, str],
    input_path: str | None = None,
    output_dir: str | None = None,
    seed: int | None = None,
    repeats: int | None = None,
    env_seed: str | None = None,
) -> PipelineConfig:
    """Merge config sources: CLI flag > EAPR_SEED env > config file > default."""
    v = file_values
    final_input = input_path or v.get("input")
    final_output = output_dir or v.get("output")
    if not final_input:
        raise CliFailure("E_PARSE", "no input path given (flag --input or config `input`)")
    if not final_output:
        raise CliFailure("E_PARSE", "no output dir given (flag --output or config `output`)")

    final_seed = _num(v, "seed", int, 0)
    if env_seed is not None:
        try:
            final_seed = int(env_seed)
        except ValueError:
            raise CliFailure("E_PARSE", f"EAPR_SEED: bad value {env_seed!r}") from None
    if seed is not None:
        final_seed = seed

    mutation_raw = v.get("ga.mutation", "auto")
    mutation = None if mutation_raw == "auto" else _num(v, "ga.mutation", float, None)
    gamma_raw = v.get("svm.gamma", "median")
    gamma = "median-heuristic" if gamma_raw == "median" else _num(v, "svm.gamma", float, 1.0)

    try:
        ga = selection.GaConfig(
            population_size=_num(v, "ga.population", int, 50),
            generations=_num(v, "ga.generations", int, 100),
            crossover_rate=_num(v, "ga.crossover", float, 0.9),
            mutation_rate=mutation,
            tournament_size=_num(v, "ga.tournament", int, 2),
            min_k=_num(v, "ga.min_k", int, 4),
            max_k=_num(v, "ga.max_k", int, 12),
            cv_folds=_num(v, "ga.cv_folds", int, 5),
        )
        svm = classify.SvmConfig(
            kernel=v.get("svm.kernel", "rbf"),
            C=_num(v, "svm.c", float, 1.0),
            gamma=gamma,
            tolerance=_num(v, "svm.tolerance", float, 1e-3),
            max_passes=_num(v, "svm.max_passes", int, 200),
        )
        plot = rpt.PlotSpec(
            width=_num(v, "plot.width", int, 640),
            height=_num(v, "plot.height", int, 480),
            margin=_num(v, "plot.margin", int, 48),
            point_radius=_num(v, "plot.point_radius", float, 3.0),
            palette=v.get("plot.palette", "default"),
        )
        return PipelineConfig(
            input_path=Path(final_input),
            output_dir=Path(final_output),
            ga=ga,
            svm=svm,
            plot=plot,
            repeats=repeats if repeats is not None else _num(v, "repeats", int, 1),
            seed=final_seed,
        )
    except ValueError as exc:
        raise CliFailure("E_PARSE", str(exc)) from exc


# ---------------------------------------------------------------------------
# Artifact helpers


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _read_json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def _table_to_dict(table: InstanceTable, digest: str) -> dict:
    return {
        "input_digest": digest,
        "feature_names": list(table.feature_names),
        "algorithm_names": list(table.algorithm_names),
        "rows": [
            {
                "id": r.instance_id,
                "dataset": r.dataset_tag,
                "features": list(r.features),
                "outcomes": {a: r.outcomes[a].value for a in table.algorithm_names},
            }
            for r in table.rows
        ],
    }


def _table_from_dict(data: dict) -> tuple[InstanceTable, str]:
    rows = [
        InstanceRecord(
            instance_id=r["id"],
            dataset_tag=r["dataset"],
            features=tuple(r["features"]),
            outcomes={a: Outcome(v) for a, v in r["outcomes"].items()},
        )
        for r in data["rows"]
    ]
    table = InstanceTable.build(data["feature_names"], data["algorithm_names"], rows)
    return table, data["input_digest"]


def _require(out_dir: Path, stage: str) -> None:
    for artifact in _STAGE_NEEDS[stage]:
        if not (out_dir / artifact).exists():
            raise CliFailure("E_STAGE", _ARTIFACTS[artifact])


def _load_table(out_dir: Path) -> tuple[InstanceTable, str]:
    return _table_from_dict(_read_json(out_dir / "table.json"))


# ---------------------------------------------------------------------------
# Stages


def stage_ingest(cfg: PipelineConfig) -> None:
    try:
        raw = cfg.input_path.read_bytes()
    except OSError as exc:
        raise CliFailure("E_IO", str(exc)) from exc
    digest = hashlib.sha256(raw).hexdigest()

    try:
        table = ingest.parse_instance_table(raw)
        table = ingest.aggregate_rows(table, "instance_id")
    except ingest.IngestError as exc:
        raise CliFailure("E_PARSE", str(exc)) from exc

    violations = validate_table(table)
    bad_rows = {v.row for v in violations if v.rule == "non-finite feature"}
    if bad_rows:
        click.echo(
            f"warning: dropping {len(bad_rows)} row(s) with non-finite features: "
            + ", ".join(sorted(bad_rows)),
            err=True,
        )
        table = InstanceTable.build(
            table.feature_names,
            table.algorithm_names,
            [r for r in table.rows if r.instance_id not in bad_rows],
        )
        violations = validate_table(table)
    if violations:
        first = violations[0]
        degenerate = first.rule in ("too few rows", "too few features")
        code = "E_DEGENERATE" if degenerate else "E_PARSE"
        raise CliFailure(code, f"{len(violations)} violation(s), first: {first}")

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _write_json(cfg.output_dir / "table.json", _table_to_dict(table, digest))


def _final_subset(
    winners: list[tuple[FeatureSubset, selection.FitnessValue]],
    table: InstanceTable,
    ga: selection.GaConfig,
) -> tuple[tuple[str, ...], dict[str, float]]:
    """Frequency vote over repeat winners: keep features chosen in > half the
    repeats, clamped to [min_k, max_k] by frequency rank (ties by name)."""
    counts: dict[str, int] = {name: 0 for name in table.feature_names}
    for subset, _ in winners:
        for name in subset.selected:
            counts[name] += 1
    frequencies = {n: counts[n] / len(winners) for n in table.feature_names if counts[n]}
    ranked = sorted(frequencies, key=lambda n: (-frequencies[n], n))
    max_k = min(ga.max_k, len(table.feature_names))
    chosen = [n for n in ranked if frequencies[n] > 0.5][:max_k]
    for name in ranked:
        if len(chosen) >= ga.min_k:
            break
        if name not in chosen:
            chosen.append(name)
    return tuple(sorted(chosen)), frequencies


def stage_select_features(cfg: PipelineConfig) -> None:
    _require(cfg.output_dir, "select-features")
    table, _ = _load_table(cfg.output_dir)
    stage_seed = derive_seed(cfg.seed, "select-features")

    winners: list[tuple[FeatureSubset, selection.FitnessValue]] = []
    repeats_out = []
    try:
        for r in range(cfg.repeats):
            ga = replace(cfg.ga, seed=derive_seed(stage_seed, f"repeat:{r}"))
            result = selection.run_ga(table, ga)
            winners.append((result.best, result.best_fitness))
            repeats_out.append(
                {
                    "features": list(result.best.sorted_names),
                    "accuracy": result.best_fitness.mean_cv_accuracy,
                    "size": result.best_fitness.subset_size,
                    "history": [h.mean_cv_accuracy for h in result.history],
                }
            )
        final, frequencies = _final_subset(winners, table, cfg.ga)
        fitness = selection.evaluate_subset(
            table, FeatureSubset.of(final), cfg.ga, derive_seed(stage_seed, "final")
        )
    except (selection.DegenerateLabels, ValueError) as exc:
        raise CliFailure("E_DEGENERATE", str(exc)) from exc

    _write_json(
        cfg.output_dir / "selection.json",
        {
            "selected": list(final),
            "fitness": {
                "mean_cv_accuracy": fitness.mean_cv_accuracy,
                "subset_size": fitness.subset_size,
            },
            "frequencies": frequencies,
            "repeats": repeats_out,
        },
    )


def stage_project(cfg: PipelineConfig) -> None:
    _require(cfg.output_dir, "project")
    table, _ = _load_table(cfg.output_dir)
    selected = _read_json(cfg.output_dir / "selection.json")["selected"]
    try:
        model, coords = project.fit_projection(table, FeatureSubset.of(selected))
    except (ingest.AllFeaturesDropped, project.NonFiniteInput, ValueError) as exc:
        raise CliFailure("E_DEGENERATE", str(exc)) from exc

    project.save_model(model, cfg.output_dir / "pca_model.json")
    _write_json(
        cfg.output_dir / "coordinates.json",
        {
            "ids": list(table.instance_ids),
            "coords": [[float(a), float(b)] for a, b in coords],
        },
    )


def _load_coords(out_dir: Path) -> np.ndarray:
    data = _read_json(out_dir / "coordinates.json")
    return np.array(data["coords"], dtype=float).reshape(-1, 2)


def _poly_points(poly: fp.ConvexPolygon) -> list[list[float]]:
    return [[float(x), float(y)] for x, y in poly.vertices]


def stage_footprint(cfg: PipelineConfig) -> None:
    _require(cfg.output_dir, "footprint")
    table, _ = _load_table(cfg.output_dir)
    coords = _load_coords(cfg.output_dir)

    all_hull_area = fp.polygon_area(fp.convex_hull([(p[0], p[1]) for p in coords]))
    algorithms = sorted(table.algorithm_names)
    prints: dict[str, fp.Footprint] = {}
    blocks: dict[str, dict] = {}
    for algorithm in algorithms:
        labels = table.outcome_labels(algorithm)
        print_ = fp.compute_footprint(coords, labels, algorithm)
        prints[algorithm] = print_
        norm = all_hull_area if all_hull_area > 0.0 else 1.0
        blocks[algorithm] = {
            "algorithm": algorithm,
            "area_good": print_.area_good,
            "area_net": print_.area_net,
            "purity": print_.purity,
            "density": print_.density,
            "area_good_norm": print_.area_good / norm,
            "area_net_norm": print_.area_net / norm,
            "degenerate": print_.is_degenerate,
            "good_hull": _poly_points(print_.good_hull),
            "bad_hull": _poly_points(print_.bad_hull),
            "contradiction": _poly_points(print_.contradiction),
        }

    overlap = []
    for a in algorithms:
        row = []
        for b in algorithms:
            if prints[a].is_degenerate or prints[b].is_degenerate:
                row.append(0.0)
            else:
                row.append(fp.footprint_overlap(prints[a], prints[b]))
        overlap.append(row)

    _write_json(
        cfg.output_dir / "footprints.json",
        {
            "algorithms": algorithms,
            "footprints": blocks,
            "overlap": overlap,
            "total_hull_area": all_hull_area,
        },
    )


def stage_classify(cfg: PipelineConfig) -> None:
    _require(cfg.output_dir, "classify")
    table, _ = _load_table(cfg.output_dir)
    coords = _load_coords(cfg.output_dir)
    stage_seed = derive_seed(cfg.seed, "classify")

    models: dict[str, dict] = {}
    cv_metrics: dict[str, dict] = {}
    train_metrics: dict[str, dict] = {}
    for algorithm in sorted(table.algorithm_names):
        idx, y = table.labeled_indices(algorithm)
        n_pos = int(np.sum(y == 1.0))
        n_neg = int(np.sum(y == -1.0))
        if min(n_pos, n_neg) < 2:
            click.echo(f"warning: skipping degenerate labels for {algorithm}", err=True)
            empty = {"accuracy": None, "precision": None, "recall": None}
            cv_metrics[algorithm] = dict(empty)
            train_metrics[algorithm] = dict(empty)
            continue
        pts = coords[idx]
        svm_config = replace(cfg.svm, seed=derive_seed(stage_seed, f"svm:{algorithm}"))
        model = classify.train_svm(pts, y, svm_config)
        models[algorithm] = classify.model_to_dict(model)

        values = classify.decision_values(model, pts)
        predicted = np.where(values >= 0.0, 1.0, -1.0)
        tm = classify.compute_metrics(y, predicted)
        train_metrics[algorithm] = {
            "accuracy": tm.accuracy, "precision": tm.precision, "recall": tm.recall,
        }
        cv_config = replace(cfg.svm, seed=derive_seed(stage_seed, f"cv:{algorithm}"))
        cm = classify.cross_validate(pts, y, cfg.ga.cv_folds, cv_config)
        cv_metrics[algorithm] = {
            "accuracy": cm.accuracy, "precision": cm.precision, "recall": cm.recall,
        }

    if not models:
        raise CliFailure("E_DEGENERATE", "no algorithm has trainable labels")

    def _aggregate(block: dict[str, dict]) -> dict:
        defined = [m for m in block.values() if m["accuracy"] is not None]
        precs = [m["precision"] for m in defined if m["precision"] is not None]
        return {
            "per_algorithm": block,
            "accuracy": float(np.mean([m["accuracy"] for m in defined])),
            "precision": float(np.mean(precs)) if precs else None,
        }

    _write_json(cfg.output_dir / "models.json", {"models": models})
    _write_json(
        cfg.output_dir / "metrics.json",
        {"cv": _aggregate(cv_metrics), "training": _aggregate(train_metrics)},
    )


def _config_echo(cfg: PipelineConfig) -> dict:
    return {
        "seed": cfg.seed,
        "repeats": cfg.repeats,
        "ga.population": cfg.ga.population_size,
        "ga.generations": cfg.ga.generations,
        "ga.crossover": cfg.ga.crossover_rate,
        "ga.mutation": cfg.ga.mutation_rate if cfg.ga.mutation_rate is not None else "auto",
        "ga.tournament": cfg.ga.tournament_size,
        "ga.min_k": cfg.ga.min_k,
        "ga.max_k": cfg.ga.max_k,
        "ga.cv_folds": cfg.ga.cv_folds,
        "svm.kernel": cfg.svm.kernel,
        "svm.c": cfg.svm.C,
        "svm.gamma": cfg.svm.gamma,
        "svm.tolerance": cfg.svm.tolerance,
        "svm.max_passes": cfg.svm.max_passes,
    }


def stage_plot(cfg: PipelineConfig) -> None:
    _require(cfg.output_dir, "plot")
    out = cfg.output_dir
    table, digest = _load_table(out)
    coords = _load_coords(out)
    sel = _read_json(out / "selection.json")
    pca = project.load_model(out / "pca_model.json")
    foot = _read_json(out / "footprints.json")
    metrics = _read_json(out / "metrics.json")

    def _poly(points: list) -> fp.ConvexPolygon:
        return fp.ConvexPolygon(tuple((float(x), float(y)) for x, y in points))

    for algorithm in foot["algorithms"]:
        block = foot["footprints"][algorithm]
        print_ = fp.Footprint(
            algorithm=algorithm,
            good_hull=_poly(block["good_hull"]),
            bad_hull=_poly(block["bad_hull"]),
            contradiction=_poly(block["contradiction"]),
            area_good=block["area_good"],
            area_net=block["area_net"],
            purity=block["purity"],
            density=block["density"],
        )
        svg = rpt.render_footprint_svg(
            coords, table.outcome_labels(algorithm), print_, cfg.plot
        )
        (out / f"footprint_{algorithm}.svg").write_text(svg, encoding="utf-8")

    for name in sel["selected"]:
        raw = table.feature_matrix([name])[:, 0]
        params = ingest.MinMaxParams.from_values(raw)
        svg = rpt.render_feature_svg(
            coords,
            ingest.minmax_normalize(raw),
            cfg.plot,
            name=name,
            vmin=params.vmin,
            vmax=params.vmax,
        )
        (out / f"feature_{name}.svg").write_text(svg, encoding="utf-8")

    (out / "datasets.svg").write_text(
        rpt.render_dataset_svg(coords, table.dataset_tags, cfg.plot), encoding="utf-8"
    )

    ratios = project.explained_variance(pca)
    dataset_counts: dict[str, int] = {}
    for tag in table.dataset_tags:
        dataset_counts[tag] = dataset_counts.get(tag, 0) + 1
    footprint_metrics = {
        a: {
            k: b[k]
            for k in (
                "area_good", "area_net", "purity", "density",
                "area_good_norm", "area_net_norm", "degenerate",
            )
        }
        for a, b in foot["footprints"].items()
    }
    analysis = rpt.AnalysisReport(
        provenance={"input_digest": digest, "config": _config_echo(cfg)},
        selected_features=tuple(pca.feature_names),
        loadings=tuple((float(a), float(b)) for a, b in pca.loadings),
        eigenvalues=tuple(float(v) for v in pca.eigenvalues),
        explained_variance_2d=pca.explained_variance_2d,
        explained_variance_ratios=tuple(float(r) for r in ratios),
        selection={
            "selected": sel["selected"],
            "fitness": sel["fitness"],
            "frequencies": sel["frequencies"],
            "repeats": sel["repeats"],
        },
        algorithm_names=tuple(foot["algorithms"]),
        footprints=footprint_metrics,
        overlap=tuple(tuple(row) for row in foot["overlap"]),
        selector=metrics,
        instances={"count": len(table), "datasets": dataset_counts},
    )
    rpt.write_report(analysis, out / "report.json")


_STAGE_FNS = {
    "ingest": stage_ingest,
    "select-features": stage_select_features,
    "project": stage_project,
    "footprint": stage_footprint,
    "classify": stage_classify,
    "plot": stage_plot,
}


def cmd_stage(stage: str, cfg: PipelineConfig) -> None:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _STAGE_FNS[stage](cfg)


def cmd_pipeline(cfg: PipelineConfig) -> None:
    if not cfg.input_path.exists():
        raise CliFailure("E_IO", f"input not found: {cfg.input_path}")
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    for stage in STAGES:
        _STAGE_FNS[stage](cfg)


# ---------------------------------------------------------------------------
# Selection of the best algorithm for a new feature vector


def rank_for_vector(model_dir: Path, vector: dict[str, float]) -> list[tuple[str, float]]:
    """Standardize, project and score one feature vector against saved models."""
    pca_path = model_dir / "pca_model.json"
    models_path = model_dir / "models.json"
    if not pca_path.exists() or not models_path.exists():
        raise CliFailure("E_MODEL", f"missing pca_model.json or models.json in {model_dir}")
    try:
        pca = project.load_model(pca_path)
        model_blocks = _read_json(models_path)["models"]
        models = {a: classify.model_from_dict(d) for a, d in model_blocks.items()}
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise CliFailure("E_MODEL", f"corrupt model files: {exc}") from exc
    if not models:
        raise CliFailure("E_MODEL", "no algorithm models present")

    known = set(pca.feature_names) | set(pca.scaling.dropped_features)
    unknown = set(vector) - known
    if unknown:
        raise CliFailure("E_MODEL", f"unknown features: {sorted(unknown)}")
    missing = set(pca.feature_names) - set(vector)
    if missing:
        raise CliFailure("E_MODEL", f"missing features: {sorted(missing)}")

    raw = np.array([vector[n] for n in pca.feature_names], dtype=float)
    standardized = (raw - np.asarray(pca.scaling.means)) / np.asarray(pca.scaling.stds)
    point = standardized @ pca.loadings
    return classify.select_aprt(models, point)


def _parse_vector(text: str) -> dict[str, float]:
    vector: dict[str, float] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        sep = "," if "," in line else "="
        if sep not in line:
            raise CliFailure("E_MODEL", f"stdin line {line_no}: expected name,value")
        name, value = (part.strip() for part in line.split(sep, 1))
        try:
            vector[name] = float(value)
        except ValueError:
            raise CliFailure("E_MODEL", f"stdin line {line_no}: bad value {value!r}") from None
    if not vector:
        raise CliFailure("E_MODEL", "empty feature vector on stdin")
    return vector


def cmd_select(model_dir: Path, stdin_text: str) -> str:
    ranked = rank_for_vector(model_dir, _parse_vector(stdin_text))
    return "".join(
        f"{rank},{algorithm},{value:.6g}\n"
        for rank, (algorithm, value) in enumerate(ranked, start=1)
    )


# ---------------------------------------------------------------------------
# Click wiring


def _shared_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(), default=None,
                      help="Flat key=value config file.")(fn)
    fn = click.option("--input", "input_path", type=click.Path(), default=None,
                      help="Input CSV (overrides config).")(fn)
    fn = click.option("--output", "output_dir", type=click.Path(), default=None,
                      help="Output directory (overrides config).")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="Global seed (overrides EAPR_SEED and config).")(fn)
    fn = click.option("--repeats", type=int, default=None,
                      help="Feature-learning repetitions (overrides config).")(fn)
    return fn


def _make_config(config_path, input_path, output_dir, seed, repeats) -> PipelineConfig:
    file_values = parse_config_file(Path(config_path)) if config_path else {}
    return build_config(
        file_values,
        input_path=input_path,
        output_dir=output_dir,
        seed=seed,
        repeats=repeats,
        env_seed=os.environ.get("EAPR_SEED"),
    )


def _guarded(fn):
    try:
        fn()
    except CliFailure as failure:
        click.echo(str(failure), err=True)
        sys.exit(1)


@click.group()
def main():
    """Map algorithm effectiveness across a 2D instance space and train a
    per-algorithm selector."""


@main.command()
@_shared_options
def pipeline(config_path, input_path, output_dir, seed, repeats):
    """Run every stage end to end."""
    def run():
        cfg = _make_config(config_path, input_path, output_dir, seed, repeats)
        cmd_pipeline(cfg)
        click.echo(f"report written to {cfg.output_dir / 'report.json'}")
    _guarded(run)


def _stage_command(stage_name: str, help_text: str):
    @main.command(name=stage_name, help=help_text)
    @_shared_options
    def _cmd(config_path, input_path, output_dir, seed, repeats):
        def run():
            cfg = _make_config(config_path, input_path, output_dir, seed, repeats)
            cmd_stage(stage_name, cfg)
        _guarded(run)
    return _cmd


_stage_command("ingest", "Parse and aggregate the input CSV into table.json.")
_stage_command("select-features", "Run the GA feature search over table.json.")
_stage_command("project", "Fit the 2D PCA model for the selected features.")
_stage_command("footprint", "Compute per-algorithm footprint geometry.")
_stage_command("classify", "Train per-algorithm SVMs and selector metrics.")
_stage_command("plot", "Render SVGs and assemble report.json.")


@main.command()
@click.option("--models", "model_dir", type=click.Path(), required=True,
              help="Directory holding pca_model.json and models.json.")
def select(model_dir):
    """Rank algorithms for a feature vector given as name,value lines on stdin."""
    def run():
        text = click.get_text_stream("stdin").read()
        click.echo(cmd_select(Path(model_dir), text), nl=False)
    _guarded(run)


if __name__ == "__main__":
    main()
