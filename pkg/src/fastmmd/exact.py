"""Quadratic-time MMD estimators and the two subsampling baselines.

The squared MMD between the empirical kernel mean embeddings of the two
groups is computed from pairwise kernel sums:

  biased    sum_ij a_i a_j K(x_i, x_j),  a_i = 1/m on group 1, -1/n on group 2
  unbiased  the three-term U-statistic with within-group diagonals removed

The two are linked by an exact algebraic identity (``unbiased_from_embedding_norms``)
used throughout the test suite as a cross-check.  ``mmd_linear`` and
``mmd_btest`` are the classical cheap baselines: both operate on equalized,
seeded-shuffled groups and are unbiased-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .dataset import SampleSet
from .errors import NumericalContractError, ValidationError
from .kernel import ShiftInvariantKernel, gram, pair_sum

EstimateKind = Literal["biased", "unbiased"]

# Floating-point slack for clamping a slightly negative biased square to 0.
_CLAMP_REL = 1e-12


@dataclass(frozen=True)
class MmdEstimate:
    """A squared-MMD estimate with its provenance.

    value_sq may be negative for unbiased estimates; biased estimates are
    clamped at zero.  ``basis_count`` is 0 for methods that do not sample
    frequencies.
    """

    value_sq: float
    kind: EstimateKind
    method: Literal["exact", "linear", "btest", "fourier", "fastfood", "circular"]
    basis_count: int = 0
    seed: int | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.value_sq):
            raise NumericalContractError(f"non-finite estimate {self.value_sq}")
        if self.kind == "biased" and self.value_sq < 0:
            raise NumericalContractError(
                f"biased squared MMD must be >= 0, got {self.value_sq}"
            )
        if self.method in ("linear", "btest") and self.kind != "unbiased":
            raise ValidationError(f"{self.method} is unbiased-only")

    @property
    def value(self) -> float:
        """MMD on the original scale; the negative part is truncated."""
        return math.sqrt(max(self.value_sq, 0.0))


def _clamp_biased(value_sq: float, k0: float) -> float:
    if value_sq < -_CLAMP_REL * k0:
        raise NumericalContractError(
            f"biased squared MMD {value_sq} below rounding slack"
        )
    return max(value_sq, 0.0)


def _group_sums(
    s: SampleSet, k: ShiftInvariantKernel
) -> tuple[float, float, float]:
    x1 = s.group(1)
    x2 = s.group(2)
    return pair_sum(k, x1, x1), pair_sum(k, x2, x2), pair_sum(k, x1, x2)


def mmd_biased_exact(s: SampleSet, k: ShiftInvariantKernel) -> MmdEstimate:
    """Exact biased squared MMD (V-statistic, includes diagonal terms)."""
    m, n = s.n1, s.n2
    s11, s22, s12 = _group_sums(s, k)
    value = s11 / m**2 + s22 / n**2 - 2.0 * s12 / (m * n)
    return MmdEstimate(_clamp_biased(value, k.k0), "biased", "exact")


def mmd_unbiased_exact(s: SampleSet, k: ShiftInvariantKernel) -> MmdEstimate:
    """Exact unbiased squared MMD (U-statistic, diagonal terms excluded)."""
    m, n = s.n1, s.n2
    if m < 2 or n < 2:
        raise ValidationError(
            f"unbiased estimate needs at least 2 samples per group, got {m} and {n}"
        )
    s11, s22, s12 = _group_sums(s, k)
    value = (
        (s11 - m * k.k0) / (m * (m - 1))
        + (s22 - n * k.k0) / (n * (n - 1))
        - 2.0 * s12 / (m * n)
    )
    return MmdEstimate(value, "unbiased", "exact")


def unbiased_from_embedding_norms(
    biased_sq: float, mean1_sq: float, mean2_sq: float, m: int, n: int, k0: float
) -> float:
    """Unbiased squared MMD from the biased square and the squared norms of
    the two group embedding means.  Exact algebraic reformulation of the
    U-statistic; holds for any kernel with K(x, x) = k0."""
    return (
        biased_sq
        + mean1_sq / (m - 1)
        + mean2_sq / (n - 1)
        - (m + n - 2) * k0 / ((m - 1) * (n - 1))
    )


# ---------------------------------------------------------------------------
# Subsampling baselines
# ---------------------------------------------------------------------------


def _equalized_pairs(s: SampleSet, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Shuffle each group with the seeded stream and truncate to equal size."""
    rng = np.random.default_rng(seed)
    x = s.group(1)
    y = s.group(2)
    x = x[rng.permutation(x.shape[0])]
    y = y[rng.permutation(y.shape[0])]
    n = min(x.shape[0], y.shape[0])
    return x[:n], y[:n]


def _rowwise_kernel(
    k: ShiftInvariantKernel, a: np.ndarray, b: np.ndarray
) -> np.ndarray:
    delta = a - b
    if k.family == "gaussian":
        d2 = np.einsum("ij,ij->i", delta, delta)
        return k.k0 * np.exp(-d2 / (2.0 * k.sigma**2))
    return k.k0 * np.exp(-np.abs(delta).sum(axis=1) / k.sigma)


def mmd_linear(s: SampleSet, k: ShiftInvariantKernel, seed: int) -> MmdEstimate:
    """Linear-time unbiased estimate from disjoint consecutive sample pairs.

    After equalization, paired observations z_i = (x_i, y_i) are grouped as
    (z_1, z_2), (z_3, z_4), ... and

      h(z, z') = K(x, x') + K(y, y') - K(x, y') - K(x', y)

    is averaged over the floor(n/2) disjoint pairs.
    """
    x, y = _equalized_pairs(s, seed)
    n = x.shape[0]
    if n < 2:
        raise ValidationError("mmd_linear needs at least 2 samples per group")
    pairs = n // 2
    xo, xe = x[0 : 2 * pairs : 2], x[1 : 2 * pairs : 2]
    yo, ye = y[0 : 2 * pairs : 2], y[1 : 2 * pairs : 2]
    h = (
        _rowwise_kernel(k, xo, xe)
        + _rowwise_kernel(k, yo, ye)
        - _rowwise_kernel(k, xo, ye)
        - _rowwise_kernel(k, xe, yo)
    )
    return MmdEstimate(float(h.mean()), "unbiased", "linear", seed=seed)


def _unbiased_on_groups(
    k: ShiftInvariantKernel, x: np.ndarray, y: np.ndarray
) -> float:
    m, n = x.shape[0], y.shape[0]
    s11 = float(gram(k, x).sum())
    s22 = float(gram(k, y).sum())
    s12 = float(gram(k, x, y).sum())
    return (
        (s11 - m * k.k0) / (m * (m - 1))
        + (s22 - n * k.k0) / (n * (n - 1))
        - 2.0 * s12 / (m * n)
    )


def mmd_btest(
    s: SampleSet,
    k: ShiftInvariantKernel,
    block_size: int | None = None,
    seed: int = 0,
) -> MmdEstimate:
    """Block-averaged unbiased estimate.

    After equalization to n per group, the paired samples are split into
    floor(n/B) blocks of size B (default B = round(sqrt(n)), the customary
    choice); the exact unbiased MMD is computed within each block and the
    block values are averaged.  The remainder is discarded so that every
    block is a complete U-statistic.
    """
    x, y = _equalized_pairs(s, seed)
    n = x.shape[0]
    if block_size is None:
        block_size = max(2, round(math.sqrt(n)))
    if block_size < 2:
        raise ValidationError(f"block_size must be >= 2, got {block_size}")
    if block_size > n:
        raise ValidationError(
            f"block_size {block_size} exceeds equalized group size {n}"
        )
    n_blocks = n // block_size
    values = [
        _unbiased_on_groups(
            k,
            x[b * block_size : (b + 1) * block_size],
            y[b * block_size : (b + 1) * block_size],
        )
        for b in range(n_blocks)
    ]
    return MmdEstimate(float(np.mean(values)), "unbiased", "btest", seed=seed)
