"""Shared helpers: independent brute-force oracles and random instances.

The oracles deliberately use plain Python loops and scalar kernel
evaluation so they share no code path with the vectorized estimators
they check.
"""

from __future__ import annotations

import numpy as np

import fastmmd as fm


def brute_biased(s: fm.SampleSet, k: fm.ShiftInvariantKernel) -> float:
    """Double-loop signed sum a_i a_j K(x_i, x_j)."""
    signs = [1.0 / s.n1 if l == 1 else -1.0 / s.n2 for l in s.labels]
    total = 0.0
    for i in range(s.n):
        for j in range(s.n):
            total += signs[i] * signs[j] * fm.evaluate(k, s.data[i], s.data[j])
    return total


def brute_unbiased(s: fm.SampleSet, k: fm.ShiftInvariantKernel) -> float:
    """Three-term U-statistic with explicit loops and diagonal exclusion."""
    idx1 = [i for i, l in enumerate(s.labels) if l == 1]
    idx2 = [i for i, l in enumerate(s.labels) if l == 2]
    m, n = len(idx1), len(idx2)
    t11 = sum(
        fm.evaluate(k, s.data[i], s.data[j]) for i in idx1 for j in idx1 if i != j
    )
    t22 = sum(
        fm.evaluate(k, s.data[i], s.data[j]) for i in idx2 for j in idx2 if i != j
    )
    t12 = sum(fm.evaluate(k, s.data[i], s.data[j]) for i in idx1 for j in idx2)
    return t11 / (m * (m - 1)) + t22 / (n * (n - 1)) - 2.0 * t12 / (m * n)


def brute_unbiased_via_identity(s: fm.SampleSet, k: fm.ShiftInvariantKernel) -> float:
    """Unbiased value from the biased square plus group mean-embedding norms."""
    idx1 = [i for i, l in enumerate(s.labels) if l == 1]
    idx2 = [i for i, l in enumerate(s.labels) if l == 2]
    m, n = len(idx1), len(idx2)
    s1 = sum(fm.evaluate(k, s.data[i], s.data[j]) for i in idx1 for j in idx1) / m**2
    s2 = sum(fm.evaluate(k, s.data[i], s.data[j]) for i in idx2 for j in idx2) / n**2
    return fm.unbiased_from_embedding_norms(brute_biased(s, k), s1, s2, m, n, k.k0)


def random_instance(
    rng: np.random.Generator,
    max_n: int = 25,
    max_d: int = 8,
    min_per_group: int = 2,
    families: tuple[str, ...] = ("gaussian", "laplacian"),
) -> tuple[fm.SampleSet, fm.ShiftInvariantKernel]:
    """A random two-group dataset and kernel for oracle comparisons."""
    d = int(rng.integers(1, max_d + 1))
    m = int(rng.integers(min_per_group, max_n + 1))
    n = int(rng.integers(min_per_group, max_n + 1))
    x1 = rng.normal(0.0, 1.5, size=(m, d))
    x2 = rng.normal(rng.uniform(-1, 1), 1.0, size=(n, d))
    family = families[int(rng.integers(len(families)))]
    kern = fm.ShiftInvariantKernel(
        family, float(rng.uniform(0.4, 3.0)), float(rng.uniform(0.5, 2.0))
    )
    return fm.two_sample(x1, x2), kern


def rel_diff(a: float, b: float, floor: float = 0.0) -> float:
    """|a - b| over the larger magnitude.

    ``floor`` sets the smallest scale to divide by: signed statistics cross
    zero, where a pure ratio is ill-posed; the statistic's natural scale
    (k0 for MMD squares, which are sums of kernel terms bounded by k0) is
    then the meaningful denominator.
    """
    scale = max(abs(a), abs(b), floor, 1e-300)
    return abs(a - b) / scale
