"""Deterministic regression data under student-t/Bernoulli target corruption.

Targets follow t = sin(2*pi*x) + zeta where zeta is a location-0 student-t
draw applied with probability p/100.  The corruption mask, the noise
magnitudes, and the input locations each use their own random stream, so
the set of corrupted indices depends only on (seed, p): sweeping the noise
shape or scale re-corrupts the same rows, which keeps comparisons paired.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from tadam.fileio import atomic_write_text, format_float
from tadam.rng import stream

DATASET_COLUMNS = ("x", "t", "clean_t", "corrupted_flag")


@dataclass(frozen=True)
class NoiseSpec:
    """Student-t corruption model: degrees of freedom, scale, probability."""

    nu_noise: float
    scale: float
    p_percent: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.nu_noise) and self.nu_noise > 0):
            raise ValueError(f"nu_noise must be positive, got {self.nu_noise}")
        if not (np.isfinite(self.scale) and self.scale >= 0):
            raise ValueError(f"scale must be nonnegative, got {self.scale}")
        if int(self.p_percent) != self.p_percent or not 0 <= self.p_percent <= 100:
            raise ValueError(
                f"p_percent must be an integer in [0, 100], got {self.p_percent}")


@dataclass(frozen=True)
class Dataset:
    """Inputs, observed targets, noise-free targets, and the corruption mask."""

    xs: np.ndarray
    ts: np.ndarray
    clean_ts: np.ndarray
    corrupted: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.xs)
        if not (len(self.ts) == len(self.clean_ts) == len(self.corrupted) == n):
            raise ValueError("dataset columns must have equal length")

    def __len__(self) -> int:
        return len(self.xs)


def ground_truth(xs: np.ndarray) -> np.ndarray:
    return np.sin(2.0 * np.pi * np.asarray(xs, dtype=np.float64))


def sample_student_t(nu: float, scale: float, rng: np.random.Generator,
                     size: int | None = None):
    """Location-0 student-t draws: scale * z / sqrt(c/nu), z ~ N(0,1), c ~ chi2(nu)."""
    if not (np.isfinite(nu) and nu > 0):
        raise ValueError(f"nu must be positive, got {nu}")
    if not (np.isfinite(scale) and scale >= 0):
        raise ValueError(f"scale must be nonnegative, got {scale}")
    z = rng.standard_normal(size=size)
    c = rng.chisquare(nu, size=size)
    return scale * z / np.sqrt(c / nu)


def make_dataset(n: int, noise: NoiseSpec, seed: int) -> Dataset:
    """n samples with xs uniform on [0, 1), deterministic per seed."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    xs = stream(seed, "xs").random(n)
    clean = ground_truth(xs)
    mask = stream(seed, "mask").random(n) < noise.p_percent / 100.0
    # Draw noise for every row regardless of the mask so the magnitudes
    # consumed by row i never depend on p.
    draws = sample_student_t(noise.nu_noise, noise.scale, stream(seed, "noise"),
                             size=n)
    ts = clean.copy()
    ts[mask] += draws[mask]
    return Dataset(xs=xs, ts=ts, clean_ts=clean, corrupted=mask)


def write_dataset_csv(dataset: Dataset, path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(DATASET_COLUMNS)
    for x, t, ct, flag in zip(dataset.xs, dataset.ts, dataset.clean_ts,
                              dataset.corrupted):
        writer.writerow([format_float(x), format_float(t), format_float(ct),
                         int(flag)])
    atomic_write_text(path, buf.getvalue())


def read_dataset_csv(path) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != DATASET_COLUMNS:
            raise ValueError(
                f"{path}: expected header {list(DATASET_COLUMNS)}, got {header}")
        xs, ts, cts, flags = [], [], [], []
        for row in reader:
            x, t, ct, flag = row
            xs.append(float(x))
            ts.append(float(t))
            cts.append(float(ct))
            flags.append(bool(int(flag)))
    return Dataset(xs=np.array(xs), ts=np.array(ts), clean_ts=np.array(cts),
                   corrupted=np.array(flags, dtype=bool))
