"""Experiment harness: regression sweeps, twin-run equivalence checks, and
deterministic result emission.

A sweep trains the reference MLP on corrupted sine data for every
(optimizer, noise setting, seed) cell.  Datasets and initial weights are
keyed only by seed, so the two optimizers in a cell always see bit-identical
data and starting points, and rerunning a config reproduces every output
file byte for byte.  Runs are independent; with workers > 1 they execute in
a process pool and the aggregate files are always written from a canonical
sort of the finished records, never from completion order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np
import scipy

from tadam import __version__
from tadam.data import NoiseSpec, ground_truth, make_dataset, write_dataset_csv
from tadam.fileio import (atomic_write_text, format_float, sha256_of_file,
                          write_json)
from tadam.mlp import Batch, forward, init_model, mse_loss_and_grad
from tadam.optim import NU_AUTO, Optimizer, OptimizerConfig
from tadam.rng import stream

EXPERIMENTS = ("regress", "verify", "regret", "equivalence")
LAYER_SIZES = (1, 50, 50, 50, 50, 1)
GRID_POINTS = 1001

RESULTS_COLUMNS = ("optimizer", "p", "nu_noise", "scale", "seed",
                   "final_clean_mse", "epochs")
DIAGNOSTICS_COLUMNS = ("optimizer", "p", "nu_noise", "scale", "seed",
                       "mean_w", "min_w", "mean_beta_w")
PREDICTIONS_COLUMNS = ("optimizer", "p", "nu_noise", "scale", "seed",
                       "x", "prediction")


def default_noise_grid() -> tuple[NoiseSpec, ...]:
    """Full sweep grid: two student-t shapes crossed with p = 0..100."""
    return tuple(NoiseSpec(nu_noise, scale, p)
                 for nu_noise, scale in ((1.0, 0.05), (2.0, 0.03))
                 for p in range(0, 101, 10))


def prediction_grid() -> np.ndarray:
    """Dense evaluation grid used for the clean-MSE metric and predictions."""
    return np.linspace(0.0, 1.0, GRID_POINTS)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment invocation needs, in serializable form.

    `nu` follows the optimizer convention: a positive number or "auto" for
    per-group dimension matching.  `horizon` is the round count for regret
    runs, `equiv_steps` the step count for twin-run equivalence checks; both
    are ignored by the other experiments.
    """

    experiment: str = "regress"
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    nu: float | str = NU_AUTO
    amsgrad: bool = False
    noise_grid: tuple[NoiseSpec, ...] = field(default_factory=default_noise_grid)
    seeds: tuple[int, ...] = tuple(range(10))
    epochs: int = 200
    batch_size: int = 64
    n_train: int = 1000
    horizon: int = 10_000
    equiv_steps: int = 1000
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}, "
                             f"got {self.experiment!r}")
        object.__setattr__(self, "noise_grid", tuple(self.noise_grid))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.noise_grid:
            raise ValueError("noise_grid must not be empty")
        for spec in self.noise_grid:
            if not isinstance(spec, NoiseSpec):
                raise TypeError(f"noise_grid entries must be NoiseSpec, "
                                f"got {type(spec).__name__}")
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        if any(s < 0 for s in self.seeds):
            raise ValueError(f"seeds must be nonnegative, got {self.seeds}")
        for name in ("epochs", "batch_size", "n_train", "horizon", "workers"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, "
                                 f"got {value}")
        if not isinstance(self.equiv_steps, int) or self.equiv_steps < 0:
            raise ValueError(f"equiv_steps must be a nonnegative integer, "
                             f"got {self.equiv_steps}")
        # Hyperparameter sanity comes from the strictest consumer: sweeps
        # always include the student-t path, so validate against it.
        self.optimizer_config("tadam")

    def optimizer_config(self, algorithm: str) -> OptimizerConfig:
        return OptimizerConfig(alpha=self.alpha, beta1=self.beta1,
                               beta2=self.beta2, epsilon=self.epsilon,
                               nu=self.nu if algorithm == "tadam" else NU_AUTO,
                               amsgrad=self.amsgrad, algorithm=algorithm)


def _format_value(name: str, value) -> str:
    if name == "noise_grid":
        return ";".join(f"{format_float(s.nu_noise)}:{format_float(s.scale)}"
                        f":{s.p_percent}" for s in value)
    if name == "seeds":
        return ",".join(str(s) for s in value)
    if name == "amsgrad":
        return "true" if value else "false"
    if name == "nu":
        return NU_AUTO if value == NU_AUTO else format_float(value)
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def format_config(config: ExperimentConfig) -> str:
    """Flat `key = value` text, one field per line, round-trip exact."""
    lines = [f"{f.name} = {_format_value(f.name, getattr(config, f.name))}"
             for f in fields(config)]
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat key = value format; unknown keys are errors, missing
    keys fall back to defaults.  '#' starts a comment."""
    known = {f.name: f for f in fields(ExperimentConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', "
                             f"got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate config key {key!r}")
        values[key] = _parse_value(key, value, lineno)
    return ExperimentConfig(**values)


def _parse_value(key: str, value: str, lineno: int):
    try:
        if key == "noise_grid":
            specs = []
            for chunk in value.split(";"):
                nu_noise, scale, p = chunk.split(":")
                specs.append(NoiseSpec(float(nu_noise), float(scale), int(p)))
            return tuple(specs)
        if key == "seeds":
            return tuple(int(s) for s in value.split(","))
        if key == "amsgrad":
            lowered = value.lower()
            if lowered not in ("true", "false"):
                raise ValueError(f"expected true/false, got {value!r}")
            return lowered == "true"
        if key == "nu":
            return NU_AUTO if value == NU_AUTO else float(value)
        if key in ("experiment", "output_dir"):
            return value
        if key in ("alpha", "beta1", "beta2", "epsilon"):
            return float(value)
        return int(value)
    except ValueError as exc:
        raise ValueError(f"line {lineno}: bad value for {key!r}: {exc}") from exc


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(format_config(config).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunRecord:
    """One trained (optimizer, noise, seed) cell.

    `train_losses` holds the per-epoch mean squared error over the training
    pass; `final_clean_mse` scores the trained model against the noise-free
    target on the dense grid.  Aborted runs (non-finite training loss) carry
    an infinite clean MSE and however many epochs completed.  Wall time is
    excluded from equality so reruns compare bit-identical.
    """

    optimizer: str
    noise: NoiseSpec
    seed: int
    epochs: int
    train_losses: tuple[float, ...]
    final_clean_mse: float
    grid_predictions: tuple[float, ...]
    mean_w: float | None
    min_w: float | None
    mean_beta_w: float | None
    aborted: bool
    wall_time: float = field(compare=False, default=0.0)

    def __post_init__(self) -> None:
        if math.isnan(self.final_clean_mse) or self.final_clean_mse < 0:
            raise ValueError(f"final_clean_mse must be nonnegative, "
                             f"got {self.final_clean_mse}")
        if not self.aborted and len(self.train_losses) != self.epochs:
            raise ValueError(
                f"completed run must record one loss per epoch: "
                f"{len(self.train_losses)} losses for {self.epochs} epochs")


def _record_sort_key(record: RunRecord):
    return (record.noise.nu_noise, record.noise.scale, record.noise.p_percent,
            record.seed, record.optimizer)


def train_one_run(optimizer: str, noise: NoiseSpec, seed: int,
                  config: ExperimentConfig) -> RunRecord:
    """Train the reference MLP once and summarize the run.

    Dataset, weight init, and shuffle order depend only on the seed (and the
    noise spec for the data), never on the optimizer, which is what makes
    the optimizer comparison paired.
    """
    if optimizer not in ("adam", "tadam"):
        raise ValueError(f"optimizer must be 'adam' or 'tadam', "
                         f"got {optimizer!r}")
    started = time.perf_counter()
    dataset = make_dataset(config.n_train, noise, seed)
    model = init_model(LAYER_SIZES, seed)
    engine = Optimizer(config.optimizer_config(optimizer))
    for name, value in model.parameter_groups().items():
        engine.register(name, value.shape)
    shuffle = stream(seed, "shuffle")

    xs = dataset.xs.reshape(-1, 1)
    ts = dataset.ts.reshape(-1, 1)
    n = len(dataset)
    epoch_losses: list[float] = []
    w_sum = 0.0
    w_count = 0
    w_min = math.inf
    bw_sum = 0.0
    aborted = False

    for _ in range(config.epochs):
        order = shuffle.permutation(n)
        squared_error = 0.0
        for lo in range(0, n, config.batch_size):
            idx = order[lo:lo + config.batch_size]
            batch = Batch(xs[idx], ts[idx])
            loss, grads = mse_loss_and_grad(model, batch)
            if not math.isfinite(loss):
                aborted = True
                break
            squared_error += loss * len(batch)
            params, diags = engine.step(model.parameter_groups(), grads)
            model.set_parameters(params)
            for diag in diags.values():
                w_sum += diag.w_t
                w_count += 1
                w_min = min(w_min, diag.w_t)
                bw_sum += diag.beta_w
        if aborted:
            break
        epoch_losses.append(squared_error / n)

    grid = prediction_grid().reshape(-1, 1)
    predictions = forward(model, grid).ravel()
    if aborted:
        clean_mse = math.inf
    else:
        residual = predictions - ground_truth(prediction_grid())
        clean_mse = float(np.mean(residual * residual))

    has_diags = w_count > 0
    return RunRecord(
        optimizer=optimizer, noise=noise, seed=int(seed),
        epochs=config.epochs,
        train_losses=tuple(epoch_losses),
        final_clean_mse=clean_mse,
        grid_predictions=tuple(float(p) for p in predictions),
        mean_w=w_sum / w_count if has_diags else None,
        min_w=w_min if has_diags else None,
        mean_beta_w=bw_sum / w_count if has_diags else None,
        aborted=aborted,
        wall_time=time.perf_counter() - started,
    )


def _run_job(args) -> RunRecord:
    return train_one_run(*args)


def run_regression_sweep(config: ExperimentConfig) -> list[RunRecord]:
    """Train both optimizers on every (noise, seed) cell of the grid."""
    if config.experiment != "regress":
        raise ValueError(f"experiment must be 'regress', "
                         f"got {config.experiment!r}")
    jobs = [(optimizer, noise, seed, config)
            for noise in config.noise_grid
            for seed in config.seeds
            for optimizer in ("adam", "tadam")]
    if config.workers == 1:
        records = [_run_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_run_job, jobs))
    return sorted(records, key=_record_sort_key)


@dataclass(frozen=True)
class EquivalenceReport:
    """Twin-run comparison of Adam against the student-t path.

    Both models start from identical weights and consume identical batches;
    `divergence_series[k]` is the worst relative parameter gap after step
    k+1, measured as max|a - b| / max|a| over all parameters.
    """

    steps: int
    seed: int
    nu: float | str
    noise: NoiseSpec
    max_relative_divergence: float
    final_relative_divergence: float
    divergence_series: tuple[float, ...]

    def claims(self, tolerance: float = 1e-6) -> list[dict]:
        return [{
            "claim": "student-t path with large nu tracks the plain adaptive "
                     "path within tolerance",
            "statistic": self.max_relative_divergence,
            "interval": [None, tolerance],
            "verdict": "pass" if self.max_relative_divergence <= tolerance
            else "fail",
        }]

    def to_dict(self, tolerance: float = 1e-6) -> dict:
        return {
            "params": {
                "steps": self.steps, "seed": self.seed, "nu": self.nu,
                "noise": {"nu_noise": self.noise.nu_noise,
                          "scale": self.noise.scale,
                          "p_percent": self.noise.p_percent},
            },
            "max_relative_divergence": self.max_relative_divergence,
            "final_relative_divergence": self.final_relative_divergence,
            "claims": self.claims(tolerance),
        }


def run_equivalence_check(config: ExperimentConfig) -> EquivalenceReport:
    """Train Adam and student-t twins on one shared batch stream.

    Uses the first noise spec and the first seed of the config.  The
    student-t twin runs with the configured nu; pass a large value to probe
    the Adam limit or leave "auto" to confirm the check can fail.
    """
    if config.experiment != "equivalence":
        raise ValueError(f"experiment must be 'equivalence', "
                         f"got {config.experiment!r}")
    seed = config.seeds[0]
    noise = config.noise_grid[0]
    steps = config.equiv_steps

    dataset = make_dataset(config.n_train, noise, seed)
    xs = dataset.xs.reshape(-1, 1)
    ts = dataset.ts.reshape(-1, 1)
    n = len(dataset)

    model_a = init_model(LAYER_SIZES, seed)
    model_t = init_model(LAYER_SIZES, seed)
    engine_a = Optimizer(config.optimizer_config("adam"))
    engine_t = Optimizer(config.optimizer_config("tadam"))
    for name, value in model_a.parameter_groups().items():
        engine_a.register(name, value.shape)
        engine_t.register(name, value.shape)
    shuffle = stream(seed, "shuffle")

    series: list[float] = []
    done = 0
    while done < steps:
        order = shuffle.permutation(n)
        for lo in range(0, n, config.batch_size):
            if done >= steps:
                break
            idx = order[lo:lo + config.batch_size]
            batch = Batch(xs[idx], ts[idx])
            for model, engine in ((model_a, engine_a), (model_t, engine_t)):
                loss, grads = mse_loss_and_grad(model, batch)
                if not math.isfinite(loss):
                    raise ArithmeticError(
                        f"non-finite training loss at step {done + 1}")
                params, _ = engine.step(model.parameter_groups(), grads)
                model.set_parameters(params)
            gap = 0.0
            magnitude = 0.0
            for name, pa in model_a.parameter_groups().items():
                pt = model_t.parameter_groups()[name]
                gap = max(gap, float(np.max(np.abs(pa - pt))))
                magnitude = max(magnitude, float(np.max(np.abs(pa))))
            series.append(gap / max(magnitude, 1e-300))
            done += 1

    peak = max(series) if series else 0.0
    return EquivalenceReport(
        steps=steps, seed=int(seed), nu=config.nu, noise=noise,
        max_relative_divergence=float(peak),
        final_relative_divergence=float(series[-1]) if series else 0.0,
        divergence_series=tuple(series),
    )


def _noise_fields(noise: NoiseSpec) -> list[str]:
    return [str(noise.p_percent), format_float(noise.nu_noise),
            format_float(noise.scale)]


def emit_results(records, output_dir, config: ExperimentConfig) -> dict:
    """Write the sweep artifacts and a manifest; returns {name: path}.

    Emits results.csv (one row per run), diagnostics.csv (weight summaries
    for runs that produce them), predictions.csv (dense-grid outputs), one
    dataset CSV per noise spec at its first seed, and manifest.json with the
    config, its hash, library versions, and a checksum of every file.  All
    writes are atomic and the row order is canonical, so identical configs
    reproduce identical bytes.
    """
    records = sorted(records, key=_record_sort_key)
    if not records:
        raise ValueError("no records to emit")
    output_dir = os.fspath(output_dir)
    try:
        os.makedirs(output_dir, exist_ok=True)
        os.makedirs(os.path.join(output_dir, "datasets"), exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {output_dir}: "
                      f"{exc}") from exc

    results_buf = io.StringIO()
    writer = csv.writer(results_buf)
    writer.writerow(RESULTS_COLUMNS)
    for r in records:
        p, nu_noise, scale = _noise_fields(r.noise)
        writer.writerow([r.optimizer, p, nu_noise, scale, r.seed,
                         format_float(r.final_clean_mse), r.epochs])

    diagnostics_buf = io.StringIO()
    writer = csv.writer(diagnostics_buf)
    writer.writerow(DIAGNOSTICS_COLUMNS)
    for r in records:
        if r.mean_w is None:
            continue
        p, nu_noise, scale = _noise_fields(r.noise)
        writer.writerow([r.optimizer, p, nu_noise, scale, r.seed,
                         format_float(r.mean_w), format_float(r.min_w),
                         format_float(r.mean_beta_w)])

    predictions_buf = io.StringIO()
    writer = csv.writer(predictions_buf)
    writer.writerow(PREDICTIONS_COLUMNS)
    grid = prediction_grid()
    for r in records:
        p, nu_noise, scale = _noise_fields(r.noise)
        for x, prediction in zip(grid, r.grid_predictions):
            writer.writerow([r.optimizer, p, nu_noise, scale, r.seed,
                             format_float(x), format_float(prediction)])

    paths = {
        "results.csv": os.path.join(output_dir, "results.csv"),
        "diagnostics.csv": os.path.join(output_dir, "diagnostics.csv"),
        "predictions.csv": os.path.join(output_dir, "predictions.csv"),
    }
    atomic_write_text(paths["results.csv"], results_buf.getvalue())
    atomic_write_text(paths["diagnostics.csv"], diagnostics_buf.getvalue())
    atomic_write_text(paths["predictions.csv"], predictions_buf.getvalue())

    # One sample dataset per noise spec (first seed) for overlay plots.
    seen: dict[NoiseSpec, int] = {}
    for r in records:
        seen.setdefault(r.noise, r.seed)
    for noise, seed in sorted(seen.items(),
                              key=lambda kv: (kv[0].nu_noise, kv[0].scale,
                                              kv[0].p_percent)):
        name = (f"datasets/dataset_nu{format_float(noise.nu_noise)}"
                f"_scale{format_float(noise.scale)}"
                f"_p{noise.p_percent}_seed{seed}.csv")
        path = os.path.join(output_dir, name)
        write_dataset_csv(make_dataset(config.n_train, noise, seed), path)
        paths[name] = path

    paths["manifest.json"] = write_manifest(paths, config, output_dir)
    return paths


def write_manifest(paths: dict, config: ExperimentConfig, output_dir) -> str:
    """Checksum every emitted file against the config that produced it."""
    manifest = {
        "config_hash": config_hash(config),
        "config": format_config(config).rstrip("\n").split("\n"),
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "package": __version__,
        },
        "files": {name: sha256_of_file(path)
                  for name, path in sorted(paths.items())},
    }
    manifest_path = os.path.join(os.fspath(output_dir), "manifest.json")
    write_json(manifest_path, manifest)
    return manifest_path
