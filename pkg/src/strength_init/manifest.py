"""Experiment manifests: one JSON document that reproduces a whole run.

A manifest pins the dataset, architecture, initializer, rewire mode(s),
seeds, schedule, and output directory. Running it executes every
repetition, writes one JSON-lines metric file per repetition (one record
per epoch plus a final summary record), a merged summary per arm, CSV
curve bundles for plotting, and, when both a baseline and a treatment
arm are declared, a statistical comparison report. Re-running the same
manifest on the same platform reproduces every output byte for byte.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .dataset import load_named_dataset, split
from .rng import SPLIT_DOMAIN, harness_generator
from .stats import compare
from .training import MlpArch, RunMetrics, TrainConfig, train

__all__ = ["ExperimentManifest", "run_manifest", "plot_export", "read_run_dir", "resolve_data_dir"]

DATA_ENV_VAR = "STRENGTH_INIT_DATA"


@dataclass(frozen=True)
class ExperimentManifest:
    """Serializable description of one experiment."""

    dataset: str
    arch: tuple[int, ...]
    out_dir: str
    init_method: str = "kaiming-uniform"
    init_gain: float = 1.0
    baseline_rewire: str = "none"
    treatment_rewire: str | None = None
    global_seed: int = 0
    repetitions: int = 100  # the full protocol's population size; desk runs override
    epochs: int = 100
    batch_size: int = 128
    lr0: float = 0.01
    momentum: float = 0.9
    data_dir: str | None = None
    alpha: float = 0.05
    jobs: int = 1
    log_gradients: bool = True

    def __post_init__(self):
        object.__setattr__(self, "arch", tuple(int(s) for s in self.arch))
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentManifest":
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise ValueError("manifest must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown manifest fields: {sorted(unknown)}")
        missing = {"dataset", "arch", "out_dir"} - set(doc)
        if missing:
            raise ValueError(f"manifest missing required fields: {sorted(missing)}")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "ExperimentManifest":
        return cls.from_json(Path(path).read_text())

    def train_config(self, rewire: str, repetition: int) -> TrainConfig:
        return TrainConfig(
            arch=MlpArch(self.arch),
            epochs=self.epochs,
            batch_size=self.batch_size,
            lr0=self.lr0,
            momentum=self.momentum,
            global_seed=self.global_seed,
            repetition_index=repetition,
            init_method=self.init_method,
            init_gain=self.init_gain,
            rewire=rewire,
            log_gradients=self.log_gradients,
        )


def resolve_data_dir(explicit=None) -> Path:
    """Data directory precedence: explicit argument, $STRENGTH_INIT_DATA, ./data."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(DATA_ENV_VAR)
    if env:
        return Path(env)
    return Path("data")


def _prepare_data(manifest: ExperimentManifest):
    data_dir = resolve_data_dir(manifest.data_dir)
    train_full, test_ds = load_named_dataset(data_dir, manifest.dataset)
    split_gen = harness_generator(manifest.global_seed, SPLIT_DOMAIN)
    train_ds, val_ds = split(train_full, test_ds.n, split_gen)
    return train_ds, val_ds, test_ds


# Worker-side cache so a process pool loads and splits the dataset once
# per worker instead of once per repetition.
_worker_state: dict = {}


def _worker_init(manifest_doc: dict) -> None:
    manifest = ExperimentManifest(**manifest_doc)
    _worker_state["manifest"] = manifest
    _worker_state["data"] = _prepare_data(manifest)


def _worker_run(args) -> dict:
    rewire, rep = args
    manifest = _worker_state["manifest"]
    train_ds, val_ds, test_ds = _worker_state["data"]
    metrics = train(manifest.train_config(rewire, rep), train_ds, val_ds, test_ds)
    return _metrics_doc(metrics)


def _metrics_doc(metrics: RunMetrics) -> dict:
    return {"records": metrics.epoch_records(), "summary": metrics.summary()}


def _write_rep_file(path: Path, doc: dict) -> None:
    with open(path, "w") as f:
        for rec in doc["records"]:
            f.write(json.dumps(rec) + "\n")
        f.write(json.dumps(doc["summary"]) + "\n")


def _run_population(manifest: ExperimentManifest, rewire: str, arm_dir: Path, data) -> list[dict]:
    arm_dir.mkdir(parents=True, exist_ok=True)
    reps = list(range(manifest.repetitions))
    if manifest.jobs > 1:
        with ProcessPoolExecutor(
            max_workers=manifest.jobs,
            initializer=_worker_init,
            initargs=(asdict(manifest),),
        ) as pool:
            docs = list(pool.map(_worker_run, [(rewire, r) for r in reps]))
    else:
        train_ds, val_ds, test_ds = data
        docs = []
        for r in reps:
            metrics = train(manifest.train_config(rewire, r), train_ds, val_ds, test_ds)
            docs.append(_metrics_doc(metrics))
    summaries = []
    for r, doc in zip(reps, docs):
        _write_rep_file(arm_dir / f"rep_{r:03d}.jsonl", doc)
        summaries.append(doc["summary"])
    _write_arm_summary(arm_dir / "summary.json", rewire, summaries)
    plot_export(arm_dir)
    return summaries


def _write_arm_summary(path: Path, rewire: str, summaries: list[dict]) -> None:
    keys = ("epoch1_train_acc", "epoch1_val_acc", "convergence_epoch", "test_acc")
    agg = {}
    for key in keys:
        vals = np.asarray([s[key] for s in summaries], dtype=np.float64)
        agg[key] = {
            "mean": float(vals.mean()),
            "std": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
            "median": float(np.median(vals)),
        }
    doc = {"rewire": rewire, "repetitions": len(summaries), "aggregate": agg, "runs": summaries}
    path.write_text(json.dumps(doc, indent=2) + "\n")


def run_population(manifest: ExperimentManifest, rewire: str, out_dir) -> list[dict]:
    """Run a single arm of a manifest straight into `out_dir`.

    Writes rep_*.jsonl files, summary.json, and the CSV curve bundles,
    and returns the per-repetition summary records. Used by the train
    subcommand, where there is only one population and no comparison.
    """
    data = _prepare_data(manifest) if manifest.jobs == 1 else None
    return _run_population(manifest, rewire, Path(out_dir), data)


def run_manifest(manifest: ExperimentManifest) -> int:
    """Execute a manifest end to end; returns 0 on success.

    Baseline always runs; the treatment arm and the comparison report are
    produced only when treatment_rewire is declared.
    """
    out_dir = Path(manifest.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(manifest.to_json())
    data = _prepare_data(manifest) if manifest.jobs == 1 else None

    base_summaries = _run_population(manifest, manifest.baseline_rewire, out_dir / "baseline", data)
    if manifest.treatment_rewire is not None:
        treat_summaries = _run_population(
            manifest, manifest.treatment_rewire, out_dir / "treatment", data
        )
        report = compare(base_summaries, treat_summaries, alpha=manifest.alpha)
        (out_dir / "comparison.md").write_text(report.to_markdown())
        (out_dir / "comparison.json").write_text(report.to_json())
    return 0


def read_run_dir(runs_dir) -> list[dict]:
    """Load every rep_*.jsonl in a directory into {records, summary} docs."""
    runs_dir = Path(runs_dir)
    files = sorted(runs_dir.glob("rep_*.jsonl"))
    if not files:
        raise FileNotFoundError(f"no rep_*.jsonl metric files in {runs_dir}")
    docs = []
    for fp in files:
        records = []
        summary = None
        with open(fp) as f:
            for line in f:
                rec = json.loads(line)
                if rec.get("type") == "summary":
                    summary = rec
                else:
                    records.append(rec)
        if summary is None:
            raise ValueError(f"{fp} has no summary record")
        docs.append({"records": records, "summary": summary})
    return docs


def plot_export(runs_dir) -> list[Path]:
    """Aggregate a run directory into plot-ready CSV bundles.

    Writes curves.csv (per-epoch mean and std of train/val accuracy and
    validation loss) and, when gradient logging was on, gradients.csv
    (per-epoch per-layer mean and std of the absolute weight gradient).
    Returns the written paths.
    """
    runs_dir = Path(runs_dir)
    docs = read_run_dir(runs_dir)
    n_epochs = len(docs[0]["records"])
    written = []

    def column(key):
        return np.asarray([[doc["records"][e][key] for e in range(n_epochs)] for doc in docs])

    train_acc = column("train_acc")
    val_acc = column("val_acc")
    val_loss = column("val_loss")
    lines = ["epoch,train_acc_mean,train_acc_std,val_acc_mean,val_acc_std,val_loss_mean,val_loss_std"]
    for e in range(n_epochs):
        cells = []
        for arr in (train_acc, val_acc, val_loss):
            col = arr[:, e]
            std = col.std(ddof=1) if col.size > 1 else 0.0
            cells.extend([f"{col.mean():.17g}", f"{std:.17g}"])
        lines.append(f"{e + 1}," + ",".join(cells))
    curves = runs_dir / "curves.csv"
    curves.write_text("\n".join(lines) + "\n")
    written.append(curves)

    if all("grad_abs_mean" in doc["records"][0] for doc in docs):
        n_layers = len(docs[0]["records"][0]["grad_abs_mean"])
        glines = ["epoch,layer,grad_abs_mean,grad_abs_std"]
        for e in range(n_epochs):
            for l in range(n_layers):
                col = np.asarray([doc["records"][e]["grad_abs_mean"][l] for doc in docs])
                std = col.std(ddof=1) if col.size > 1 else 0.0
                glines.append(f"{e + 1},{l},{col.mean():.17g},{std:.17g}")
        gradients = runs_dir / "gradients.csv"
        gradients.write_text("\n".join(glines) + "\n")
        written.append(gradients)
    return written
