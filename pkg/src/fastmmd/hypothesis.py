"""Two-sample hypothesis testing on top of any squared-MMD estimator.

The null distribution is built by permuting labels over the pooled
samples (group sizes preserved) and recomputing the statistic for each
shuffle, with frequency banks redrawn per shuffle from derived sub-seeds
so estimator noise is part of the null.  Conventions, chosen to be
conservative for a finite number of shuffles:

  threshold  smallest null value whose ascending rank reaches
             ceil((1 - alpha) * shuffles)
  p-value    (1 + #{null >= statistic}) / (shuffles + 1)
  reject     statistic > threshold

Also provides the bandwidth sweep over a geometric sigma grid and the
blob-data Type II error experiment grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import BlobSpec, SampleSet, synth_blobs, two_sample
from .errors import FastmmdError, ValidationError
from .estimators import EstimatorConfig, compute_estimate
from .kernel import ShiftInvariantKernel

_SEED_MASK = 2**64 - 1


def _sub_seed(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class TestResult:
    """Outcome of one permutation test."""

    statistic: float
    threshold: float
    p_value: float
    reject: bool
    alpha: float
    shuffles: int
    method: str
    kind: str
    basis_count: int
    seed: int


@dataclass(frozen=True)
class SweepResult:
    """Per-bandwidth estimate statistics over repeated banks.

    ``values`` holds the raw estimates, shape (len(sigmas), repeats).
    """

    sigmas: np.ndarray
    values: np.ndarray
    argmax_sigma: float

    @property
    def means(self) -> np.ndarray:
        return self.values.mean(axis=1)

    @property
    def stds(self) -> np.ndarray:
        if self.values.shape[1] < 2:
            return np.zeros(self.values.shape[0])
        return self.values.std(axis=1, ddof=1)


@dataclass(frozen=True)
class Type2Cell:
    """One (epsilon, basis count) cell of the Type II experiment."""

    epsilon: float
    basis_count: int
    trials: int
    alpha: float
    shuffles: int
    reject_rate: float

    @property
    def type2_error(self) -> float:
        return 1.0 - self.reject_rate


def _permuted(s: SampleSet, rng: np.random.Generator) -> SampleSet:
    return SampleSet(s.data, s.labels[rng.permutation(s.n)])


def bootstrap_null(
    s: SampleSet,
    k: ShiftInvariantKernel,
    config: EstimatorConfig,
    shuffles: int,
    seed: int,
) -> np.ndarray:
    """Null statistics from ``shuffles`` label permutations of the pooled data.

    Each shuffle owns a derived sub-seed pair: one stream for the
    permutation, one seed for the estimator's frequency bank.  The
    observed labeling is not inserted into the returned set.
    """
    if shuffles < 1:
        raise ValidationError(f"shuffles must be >= 1, got {shuffles}")
    root = np.random.SeedSequence(entropy=(seed & _SEED_MASK, 3))
    children = root.spawn(shuffles)
    out = np.empty(shuffles)
    for i, child in enumerate(children):
        perm_ss, bank_ss = child.spawn(2)
        rng = np.random.Generator(np.random.PCG64(perm_ss))
        shuffled = _permuted(s, rng)
        try:
            out[i] = compute_estimate(shuffled, k, config, _sub_seed(bank_ss)).value_sq
        except FastmmdError as exc:
            raise type(exc)(f"shuffle {i}: {exc}") from exc
    return out


def two_sample_test(
    s: SampleSet,
    k: ShiftInvariantKernel,
    config: EstimatorConfig,
    alpha: float,
    shuffles: int,
    seed: int,
) -> TestResult:
    """Permutation test of equal distributions at level ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    stat_seed = _sub_seed(np.random.SeedSequence(entropy=(seed & _SEED_MASK, 2)))
    statistic = compute_estimate(s, k, config, stat_seed).value_sq
    null = np.sort(bootstrap_null(s, k, config, shuffles, seed))
    rank = math.ceil((1.0 - alpha) * shuffles)
    threshold = float(null[rank - 1])
    p_value = (1.0 + float(np.count_nonzero(null >= statistic))) / (shuffles + 1.0)
    return TestResult(
        statistic=float(statistic),
        threshold=threshold,
        p_value=p_value,
        reject=bool(statistic > threshold),
        alpha=alpha,
        shuffles=shuffles,
        method=config.method,
        kind=config.kind,
        basis_count=config.basis_count if config.method != "exact" else 0,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Experiment grids
# ---------------------------------------------------------------------------


def geometric_grid(
    sigma_min: float, sigma_max: float, steps_per_decade: int
) -> np.ndarray:
    """sigma_min * 10^(k / steps_per_decade) up to sigma_max."""
    if not 0 < sigma_min < sigma_max:
        raise ValidationError(
            f"need 0 < sigma_min < sigma_max, got {sigma_min}, {sigma_max}"
        )
    if steps_per_decade < 1:
        raise ValidationError("steps_per_decade must be >= 1")
    n_steps = round(steps_per_decade * math.log10(sigma_max / sigma_min))
    return sigma_min * 10.0 ** (np.arange(n_steps + 1) / steps_per_decade)


def bandwidth_sweep(
    s: SampleSet,
    family: str,
    sigma_min: float,
    sigma_max: float,
    steps_per_decade: int,
    config: EstimatorConfig,
    repeats: int,
    seed: int,
    k0: float = 1.0,
) -> SweepResult:
    """Estimate the MMD across a geometric bandwidth grid.

    Each (sigma, repetition) cell runs the estimator with an independent
    derived seed; ``argmax_sigma`` is the bandwidth with the largest mean
    estimate.
    """
    if repeats < 1:
        raise ValidationError(f"repeats must be >= 1, got {repeats}")
    sigmas = geometric_grid(sigma_min, sigma_max, steps_per_decade)
    root = np.random.SeedSequence(entropy=(seed & _SEED_MASK, 4))
    per_sigma = root.spawn(len(sigmas))
    values = np.empty((len(sigmas), repeats))
    for i, sigma in enumerate(sigmas):
        kern = ShiftInvariantKernel(family, float(sigma), k0)  # type: ignore[arg-type]
        for j, cell in enumerate(per_sigma[i].spawn(repeats)):
            values[i, j] = compute_estimate(s, kern, config, _sub_seed(cell)).value_sq
    argmax_sigma = float(sigmas[int(np.argmax(values.mean(axis=1)))])
    return SweepResult(sigmas=sigmas, values=values, argmax_sigma=argmax_sigma)


def type2_experiment(
    spec: BlobSpec,
    epsilons: list[float],
    basis_counts: list[int],
    trials: int,
    alpha: float,
    shuffles: int,
    seed: int,
    config: EstimatorConfig | None = None,
    sigma: float = 1.0,
    k0: float = 1.0,
) -> list[Type2Cell]:
    """Fraction of trials failing to reject on blob data, per (epsilon, L) cell.

    Group 1 draws from the isotropic mixture, group 2 from the anisotropic
    one with the cell's epsilon; each trial uses fresh data and a fresh
    test seed.  With epsilon = 1 the groups share a distribution and the
    rejection rate calibrates to alpha.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    base = config or EstimatorConfig(method="fourier", kind="biased")
    kern = ShiftInvariantKernel("gaussian", sigma, k0)
    grid = [(eps, basis) for eps in epsilons for basis in basis_counts]
    cell_seeds = np.random.SeedSequence(entropy=(seed & _SEED_MASK, 5)).spawn(len(grid))
    cells = []
    for (eps, basis_count), cell_ss in zip(grid, cell_seeds):
        eps_spec = BlobSpec(spec.grid_spacing, eps, spec.samples_per_set)
        cell_config = EstimatorConfig(
            method=base.method,
            kind=base.kind,
            basis_count=basis_count,
            block_size=base.block_size,
            threads=base.threads,
        )
        rejects = 0
        for trial_ss in cell_ss.spawn(trials):
            p_ss, q_ss, test_ss = trial_ss.spawn(3)
            data = two_sample(
                synth_blobs(eps_spec, "P", _sub_seed(p_ss)),
                synth_blobs(eps_spec, "Q", _sub_seed(q_ss)),
            )
            result = two_sample_test(
                data, kern, cell_config, alpha, shuffles, _sub_seed(test_ss)
            )
            rejects += int(result.reject)
        cells.append(
            Type2Cell(
                epsilon=eps,
                basis_count=basis_count,
                trials=trials,
                alpha=alpha,
                shuffles=shuffles,
                reject_rate=rejects / trials,
            )
        )
    return cells
