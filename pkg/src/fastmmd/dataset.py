"""Two-sample data handling: labeled sample sets, CSV I/O, synthetic generators.

A :class:`SampleSet` holds N observations in d dimensions with labels in
{1, 2} marking which of the two compared groups each row belongs to.
Generators are pure functions of their parameters and a seed, so repeated
calls reproduce identical data.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import ValidationError

# Rejection sampling guard for the ring generator; the acceptance region
# covers ~47% of the square, so this is never hit in practice.
_MAX_DRAWS_PER_POINT = 10**6


@dataclass(frozen=True)
class SampleSet:
    """Immutable labeled two-sample dataset.

    data   : (N, d) float array, all entries finite.
    labels : (N,) int array over {1, 2}; both labels must occur.
    """

    data: np.ndarray
    labels: np.ndarray
    idx1: np.ndarray = field(init=False, repr=False)
    idx2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if data.ndim != 2:
            raise ValidationError(f"data must be 2-D, got shape {data.shape}")
        if labels.shape != (data.shape[0],):
            raise ValidationError(
                f"labels shape {labels.shape} does not match {data.shape[0]} rows"
            )
        if not np.isfinite(data).all():
            bad = np.argwhere(~np.isfinite(data))[0]
            raise ValidationError(
                f"non-finite feature at row {bad[0]}, column {bad[1]}"
            )
        bad_labels = ~np.isin(labels, (1, 2))
        if bad_labels.any():
            row = int(np.argmax(bad_labels))
            raise ValidationError(
                f"label {labels[row]} at row {row} is outside {{1, 2}}"
            )
        idx1 = np.flatnonzero(labels == 1)
        idx2 = np.flatnonzero(labels == 2)
        if idx1.size == 0 or idx2.size == 0:
            raise ValidationError("each label in {1, 2} needs at least one sample")
        data.setflags(write=False)
        labels.setflags(write=False)
        idx1.setflags(write=False)
        idx2.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "idx1", idx1)
        object.__setattr__(self, "idx2", idx2)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    @property
    def n1(self) -> int:
        return self.idx1.size

    @property
    def n2(self) -> int:
        return self.idx2.size

    def group(self, label: int) -> np.ndarray:
        """Rows belonging to one label, in dataset order."""
        if label == 1:
            return self.data[self.idx1]
        if label == 2:
            return self.data[self.idx2]
        raise ValidationError(f"label must be 1 or 2, got {label}")


def two_sample(x1: np.ndarray, x2: np.ndarray) -> SampleSet:
    """Combine two sample blocks into one SampleSet (x1 -> label 1, x2 -> label 2)."""
    x1 = np.atleast_2d(np.asarray(x1, dtype=np.float64))
    x2 = np.atleast_2d(np.asarray(x2, dtype=np.float64))
    if x1.shape[1] != x2.shape[1]:
        raise ValidationError(
            f"dimension mismatch: {x1.shape[1]} vs {x2.shape[1]} columns"
        )
    labels = np.concatenate(
        [np.ones(x1.shape[0], dtype=np.int64), np.full(x2.shape[0], 2, dtype=np.int64)]
    )
    return SampleSet(np.vstack([x1, x2]), labels)


# ---------------------------------------------------------------------------
# CSV ingestion / emission
# ---------------------------------------------------------------------------
# Dialect: comma-separated, UTF-8, decimal point, first row is a header.


def load_csv(path: str | Path, label_column: str | int = "label") -> SampleSet:
    """Load a SampleSet from a CSV file.

    ``label_column`` selects the label column by header name or 0-based
    index; every other column is a feature and must be numeric.  Rows are
    kept in file order.  Errors identify the offending row and column
    (rows counted as in the file, header = row 1).
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        if isinstance(label_column, int):
            label_idx = label_column
            if not 0 <= label_idx < len(header):
                raise ValidationError(
                    f"label column index {label_idx} out of range for {len(header)} columns"
                )
        else:
            try:
                label_idx = header.index(label_column)
            except ValueError:
                raise ValidationError(
                    f"label column {label_column!r} not in header {header}"
                ) from None
        feature_cols = [i for i in range(len(header)) if i != label_idx]
        rows: list[list[float]] = []
        labels: list[int] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(
                    f"row {line_no}: expected {len(header)} cells, got {len(row)}"
                )
            labels.append(_parse_label(row[label_idx], line_no, header[label_idx]))
            feats = []
            for i in feature_cols:
                try:
                    value = float(row[i])
                except ValueError:
                    raise ValidationError(
                        f"row {line_no}, column {header[i]!r}: "
                        f"non-numeric value {row[i]!r}"
                    ) from None
                if not math.isfinite(value):
                    raise ValidationError(
                        f"row {line_no}, column {header[i]!r}: non-finite value {row[i]!r}"
                    )
                feats.append(value)
            rows.append(feats)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    return SampleSet(data, np.asarray(labels, dtype=np.int64))


def _parse_label(cell: str, line_no: int, col_name: str) -> int:
    try:
        value = float(cell)
    except ValueError:
        raise ValidationError(
            f"row {line_no}, column {col_name!r}: label {cell!r} is not numeric"
        ) from None
    if value not in (1.0, 2.0):
        raise ValidationError(
            f"row {line_no}, column {col_name!r}: label {cell!r} is outside {{1, 2}}"
        )
    return int(value)


def save_csv(s: SampleSet, path: str | Path) -> None:
    """Write a SampleSet to CSV with full float precision (exact round-trip)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(s.d)] + ["label"])
        for row, label in zip(s.data, s.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


# ---------------------------------------------------------------------------
# Synthetic generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlobSpec:
    """Parameters for the 5x5 grid-of-Gaussians generator.

    grid_spacing     : distance between adjacent grid centers.
    epsilon          : ratio (>= 1) of large to small covariance eigenvalues
                       of the anisotropic group.
    samples_per_set  : samples drawn per group.
    """

    grid_spacing: float = 5.0
    epsilon: float = 1.0
    samples_per_set: int = 1000

    def __post_init__(self) -> None:
        if self.epsilon < 1.0:
            raise ValidationError(f"epsilon must be >= 1, got {self.epsilon}")
        if self.samples_per_set < 1:
            raise ValidationError("samples_per_set must be >= 1")
        if self.grid_spacing <= 0:
            raise ValidationError("grid_spacing must be positive")


def blob_centers(spec: BlobSpec) -> np.ndarray:
    """The 25 grid centers, rows in row-major grid order."""
    ticks = np.arange(5, dtype=np.float64) * spec.grid_spacing
    gx, gy = np.meshgrid(ticks, ticks, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def synth_blobs(
    spec: BlobSpec, which: Literal["P", "Q"], seed: int
) -> np.ndarray:
    """Draw one group's samples from the blob mixture; returns an (n, 2) array.

    Each sample picks one of the 25 centers uniformly and adds Gaussian
    noise.  Group P uses identity covariance.  Group Q uses covariance with
    eigenvalues (epsilon, 1) along the diagonal directions (1,1)/sqrt(2)
    and (1,-1)/sqrt(2); epsilon = 1 makes Q identical to P.
    """
    if which not in ("P", "Q"):
        raise ValidationError(f"which must be 'P' or 'Q', got {which!r}")
    rng = np.random.default_rng(seed)
    centers = blob_centers(spec)
    n = spec.samples_per_set
    picks = rng.integers(0, centers.shape[0], size=n)
    noise = rng.standard_normal((n, 2))
    if which == "Q":
        # T = R diag(sqrt(eps), 1) R' for R rotating onto the diagonals;
        # written out so that eps = 1 gives the exact identity matrix.
        a = math.sqrt(spec.epsilon)
        t = np.array([[(a + 1) / 2, (a - 1) / 2], [(a - 1) / 2, (a + 1) / 2]])
        noise = noise @ t.T
    return centers[picks] + noise


def synth_ring(n_per_class: int, seed: int) -> SampleSet:
    """Uniform points on [-5, 5]^2 split by the annulus 1 <= x1^2 + x2^2 <= 16.

    Points inside the annulus get label 1, all others label 2; exactly
    ``n_per_class`` of each are kept, via rejection sampling.
    """
    if n_per_class < 1:
        raise ValidationError("n_per_class must be >= 1")
    rng = np.random.default_rng(seed)
    inside: list[np.ndarray] = []
    outside: list[np.ndarray] = []
    n_in = n_out = 0
    draws = 0
    budget = 2 * n_per_class * _MAX_DRAWS_PER_POINT
    while n_in < n_per_class or n_out < n_per_class:
        batch = rng.uniform(-5.0, 5.0, size=(max(1024, n_per_class), 2))
        draws += batch.shape[0]
        if draws > budget:  # pragma: no cover
            raise RuntimeError("ring sampling exceeded its draw budget")
        r2 = np.einsum("ij,ij->i", batch, batch)
        mask = (r2 >= 1.0) & (r2 <= 16.0)
        inside.append(batch[mask])
        outside.append(batch[~mask])
        n_in += int(mask.sum())
        n_out += int((~mask).sum())
    x1 = np.vstack(inside)[:n_per_class]
    x2 = np.vstack(outside)[:n_per_class]
    return two_sample(x1, x2)


def synth_hypercube(n_per_class: int, d: int, seed: int) -> SampleSet:
    """Label 1 uniform on [0, 0.95]^d, label 2 uniform on [0.95, 1]^d."""
    if n_per_class < 1:
        raise ValidationError("n_per_class must be >= 1")
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(0.0, 0.95, size=(n_per_class, d))
    x2 = rng.uniform(0.95, 1.0, size=(n_per_class, d))
    return two_sample(x1, x2)
