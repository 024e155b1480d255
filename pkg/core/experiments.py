"""Experiment orchestration: run a config, write its data files.

Outputs by experiment kind (all in ``cfg.out``):

* single-run    series.csv, series_by_category.csv, theory.csv*, moments.csv*, histogram.csv*
* ensemble      ensemble.csv, theory.csv*
* snapshot-run  series.csv, series_by_category.csv, snapshot_tNNNNN.txt, theory.csv*
* sweep2d       sweep.csv, theory.csv*
* size-sweep    size_sweep.csv, theory.csv*

(* only when categories are dynamic, i.e. p + q > 0, and the statistic is
defined.) Every directory also receives config.json.

``run_preset`` writes each case into ``out/<preset>/<label>``; presets of
single runs or ensembles also get a stacked ``out/<preset>/theory.csv``.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

import pandas as pd

from .categories import TransitionParams, expected_counts
from .config import ExperimentConfig, merge, parse_config
from .engine import EnsembleSummary, MetricsSeries, NetworkSpec, run, run_ensemble
from .errors import InsufficientSampleError, UndefinedStatisticError
from .export import prepare_output_dir, snapshot_filename, write_config, write_csv, write_snapshot
from .presets import get_preset
from .stats import histogram, moments, relative_error, spread, tail_mean, STD_CONVENTION, SHAPE_CONVENTION

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int, str], None]

POINT_KINDS = ("single-run", "ensemble", "snapshot-run")


@dataclass
class ExperimentResult:
    """Files written by one experiment plus non-fatal observations."""
    kind: str
    out_dir: Path
    files: list[Path]
    elapsed_seconds: float
    notes: list[str] = field(default_factory=list)


@dataclass
class SweepCell:
    values: dict[str, float | int]
    summary: EnsembleSummary


def theory_rows(tp: TransitionParams, n: int, simulated_learners: float, notes: list[str]) -> list[dict]:
    """Expected vs simulated learner and profiteer counts.

    Categories with zero expected count have no relative error and are left
    out with a note.
    """
    expected = dict(zip(("learner", "profiteer"), expected_counts(tp, n)))
    simulated = {"learner": simulated_learners, "profiteer": n - simulated_learners}
    rows = []
    for category in ("learner", "profiteer"):
        try:
            err = relative_error(simulated[category], expected[category])
        except UndefinedStatisticError:
            notes.append(f"theory: no {category}s expected (p={tp.p}, q={tp.q}); row omitted")
            continue
        rows.append({
            "category": category,
            "expected": expected[category],
            "simulated": simulated[category],
            "relative_error": err,
        })
    return rows


def _moment_frame(series: MetricsSeries, tail: int) -> pd.DataFrame:
    rows = []
    for category, sample in (("learner", series.learner_count[-tail:]),
                             ("profiteer", series.profiteer_count[-tail:])):
        m = moments(sample)
        rows.append({
            "category": category, "n": m.n, "mean": m.mean, "std": m.std,
            "skewness": m.skewness, "kurtosis": m.kurtosis,
            "std_convention": STD_CONVENTION, "shape_convention": SHAPE_CONVENTION,
        })
    return pd.DataFrame(rows)


def _series_outputs(cfg: ExperimentConfig, series: MetricsSeries, out: Path, notes: list[str]) -> list[Path]:
    cj = cfg.to_json()
    files = [
        write_csv(series.to_frame(), out / "series.csv", cj),
        write_csv(series.category_frame(), out / "series_by_category.csv", cj),
    ]
    tp = cfg.params.to_params().transition
    if not tp.is_dynamic:
        return files

    rows = theory_rows(tp, series.n, tail_mean(series.learner_count, cfg.tail), notes)
    if rows:
        files.append(write_csv(pd.DataFrame(rows), out / "theory.csv", cj))
    if cfg.kind != "single-run":
        return files
    try:
        files.append(write_csv(_moment_frame(series, cfg.tail), out / "moments.csv", cj))
    except (InsufficientSampleError, UndefinedStatisticError) as e:
        notes.append(f"moments skipped: {e}")
    hist = histogram(series.learner_count[-cfg.tail:])
    files.append(write_csv(
        pd.DataFrame({"learner_count": list(hist), "probability": list(hist.values())}),
        out / "histogram.csv", cj,
    ))
    return files


def _run_single(cfg: ExperimentConfig, out: Path, notes: list[str]) -> list[Path]:
    seed = cfg.seeds.derive()[0]
    if cfg.seeds.count > 1 and "count" in cfg.seeds.model_fields_set:
        notes.append(f"{cfg.kind} uses one run; seeds.count={cfg.seeds.count} ignored beyond the first seed")
    net = cfg.network.to_spec().build(seed)
    times = cfg.snapshot_times if cfg.kind == "snapshot-run" else ()
    series, snapshots = run(net, cfg.params.to_params(), seed, cfg.steps, times)
    files = _series_outputs(cfg, series, out, notes)
    for snap in snapshots:
        files.append(write_snapshot(snap, out / snapshot_filename(snap.t)))
    return files


def _run_ensemble(cfg: ExperimentConfig, out: Path, notes: list[str]) -> list[Path]:
    params = cfg.params.to_params()
    summary = run_ensemble(cfg.network.to_spec(), params, cfg.seeds.derive(), cfg.steps, cfg.tail, cfg.workers)
    cj = cfg.to_json()
    files = [write_csv(summary.to_frame(), out / "ensemble.csv", cj)]
    if params.transition.is_dynamic:
        rows = theory_rows(params.transition, summary.n, summary.mean_learner_count, notes)
        if rows:
            files.append(write_csv(pd.DataFrame(rows), out / "theory.csv", cj))
    return files


def run_sweep(
    cfg: ExperimentConfig,
    progress_callback: ProgressCallback | None = None,
) -> list[SweepCell]:
    """Ensemble at every grid point, ordered by axis 1 then axis 2."""
    a1, a2 = cfg.axes
    spec = cfg.network.to_spec()
    seeds = cfg.seeds.derive()
    grid = list(itertools.product(a1.values(), a2.values()))
    cells = []
    for k, (v1, v2) in enumerate(grid, start=1):
        params = cfg.with_params(**{a1.name: v1, a2.name: v2}).to_params()
        summary = run_ensemble(spec, params, seeds, cfg.steps, cfg.tail, cfg.workers)
        cells.append(SweepCell(values={a1.name: v1, a2.name: v2}, summary=summary))
        label = f"{a1.name}={v1:g}, {a2.name}={v2:g}"
        logger.info("sweep cell %d/%d (%s): f_c=%.4f", k, len(grid), label, summary.mean_f_c)
        if progress_callback:
            progress_callback(k, len(grid), label)
    return cells


def _run_sweep(
    cfg: ExperimentConfig, out: Path, notes: list[str], progress_callback: ProgressCallback | None,
) -> list[Path]:
    a1, a2 = cfg.axes
    cells = run_sweep(cfg, progress_callback)
    cj = cfg.to_json()
    frame = pd.DataFrame([{**c.values, "mean_f_c": c.summary.mean_f_c} for c in cells],
                         columns=[a1.name, a2.name, "mean_f_c"])
    files = [write_csv(frame, out / "sweep.csv", cj)]

    theory = []
    for c in cells:
        tp = cfg.with_params(**c.values).to_params().transition
        if tp.is_dynamic:
            for row in theory_rows(tp, c.summary.n, c.summary.mean_learner_count, notes):
                theory.append({**c.values, **row})
    if theory:
        files.append(write_csv(pd.DataFrame(theory), out / "theory.csv", cj))
    return files


def _size_spec(cfg: ExperimentConfig, n: int) -> NetworkSpec:
    spec = cfg.network.to_spec()
    if spec.kind == "lattice":
        return NetworkSpec(kind="lattice", side=math.isqrt(n))
    return NetworkSpec(kind="ws", n=n, ring_degree=spec.ring_degree, rewire_prob=spec.rewire_prob)


def _run_size_sweep(
    cfg: ExperimentConfig, out: Path, notes: list[str], progress_callback: ProgressCallback | None,
) -> list[Path]:
    params = cfg.params.to_params()
    seeds = cfg.seeds.derive()
    sizes = sorted(cfg.sizes)
    summaries = []
    for k, n in enumerate(sizes, start=1):
        summaries.append(run_ensemble(_size_spec(cfg, n), params, seeds, cfg.steps, cfg.tail, cfg.workers))
        logger.info("size %d (%d/%d): f_c=%.4f", n, k, len(sizes), summaries[-1].mean_f_c)
        if progress_callback:
            progress_callback(k, len(sizes), f"n={n}")

    f_c = [s.mean_f_c for s in summaries]
    sp = spread(f_c)
    cj = cfg.to_json()
    frame = pd.DataFrame({"n": sizes, "mean_f_c": f_c, "range": sp.range, "std": sp.std})
    files = [write_csv(frame, out / "size_sweep.csv", cj)]
    if params.transition.is_dynamic:
        theory = [{"n": n, **row}
                  for n, s in zip(sizes, summaries)
                  for row in theory_rows(params.transition, n, s.mean_learner_count, notes)]
        if theory:
            files.append(write_csv(pd.DataFrame(theory), out / "theory.csv", cj))
    return files


def run_experiment(
    cfg: ExperimentConfig,
    progress_callback: ProgressCallback | None = None,
) -> ExperimentResult:
    """Run ``cfg`` and write its data files into ``cfg.out``.

    The output directory is checked for writability before any simulation.
    """
    t_start = time.time()
    out = prepare_output_dir(cfg.out)
    notes: list[str] = []
    logger.info("running %s experiment into %s", cfg.kind, out)

    if cfg.kind in ("single-run", "snapshot-run"):
        files = _run_single(cfg, out, notes)
    elif cfg.kind == "ensemble":
        files = _run_ensemble(cfg, out, notes)
    elif cfg.kind == "sweep2d":
        files = _run_sweep(cfg, out, notes, progress_callback)
    else:
        files = _run_size_sweep(cfg, out, notes, progress_callback)
    files.append(write_config(cfg.to_json(), out / "config.json"))

    for note in notes:
        logger.warning(note)
    return ExperimentResult(
        kind=cfg.kind, out_dir=out, files=files,
        elapsed_seconds=time.time() - t_start, notes=notes,
    )


@dataclass
class PresetResult:
    """Case results of one preset plus the preset-level report files."""
    name: str
    out_dir: Path
    cases: list[ExperimentResult]
    files: list[Path] = field(default_factory=list)


def _theory_report(name: str, out: Path, configs: list[ExperimentConfig],
                   cases: list[ExperimentResult]) -> list[Path]:
    """Stack the per-case theory tables of a point-experiment preset into one table."""
    frames = []
    for cfg, result in zip(configs, cases):
        path = result.out_dir / "theory.csv"
        if cfg.kind not in POINT_KINDS or path not in result.files:
            continue
        df = pd.read_csv(path, comment="#")
        df.insert(0, "q", cfg.params.q)
        df.insert(0, "p", cfg.params.p)
        df.insert(0, "case", result.out_dir.name)
        frames.append(df)
    if not frames:
        return []
    header = json.dumps({"preset": name, "cases": {
        r.out_dir.name: json.loads(c.to_json()) for c, r in zip(configs, cases)}})
    return [write_csv(pd.concat(frames, ignore_index=True), out / "theory.csv", header)]


def run_preset(
    name: str,
    overrides: Mapping[str, Any] | None = None,
    out: str | Path = "results",
    progress_callback: ProgressCallback | None = None,
) -> PresetResult:
    """Run every case of preset ``name`` into ``out/<name>/<case label>``.

    Presets made of single runs or ensembles also get ``out/<name>/theory.csv``
    with one block of rows per case.
    """
    preset = get_preset(name)
    root = Path(out) / name
    configs = []
    for case in preset.cases:
        data = merge(case.config, overrides or {})
        data["out"] = str(root / case.label)
        configs.append(parse_config(data))
    cases = [run_experiment(cfg, progress_callback) for cfg in configs]
    return PresetResult(name=name, out_dir=root, cases=cases,
                        files=_theory_report(name, root, configs, cases))
