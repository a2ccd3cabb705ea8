"""Uniform dispatch over the squared-MMD estimators.

The hypothesis-test layer and the CLI both need "an estimator" as a
value: a method name plus its knobs, applied to (data, kernel, seed).
``EstimatorConfig`` validates the method/kind combinations up front
(the subsampling baselines are unbiased-only, the circular ensemble is
biased-only) and ``compute_estimate`` routes to the right implementation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .circular import ensemble_discrepancy
from .dataset import SampleSet
from .errors import ValidationError
from .exact import (
    MmdEstimate,
    mmd_biased_exact,
    mmd_btest,
    mmd_linear,
    mmd_unbiased_exact,
)
from .fastfood import fastmmd_fastfood
from .fourier import fastmmd_fourier
from .kernel import ShiftInvariantKernel, sample_spectral

Method = Literal["exact", "linear", "btest", "fourier", "fastfood", "circular"]

METHODS: tuple[str, ...] = ("exact", "linear", "btest", "fourier", "fastfood", "circular")
SAMPLED_METHODS: tuple[str, ...] = ("fourier", "fastfood", "circular")


@dataclass(frozen=True)
class EstimatorConfig:
    """Method selection plus the knobs that method needs."""

    method: Method = "fourier"
    kind: Literal["biased", "unbiased"] = "unbiased"
    basis_count: int = 128
    block_size: int | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")
        if self.kind not in ("biased", "unbiased"):
            raise ValidationError(f"unknown estimate kind {self.kind!r}")
        if self.method in ("linear", "btest") and self.kind != "unbiased":
            raise ValidationError(f"{self.method} supports unbiased estimates only")
        if self.method == "circular" and self.kind != "biased":
            raise ValidationError("circular supports biased estimates only")
        if self.method in SAMPLED_METHODS and self.basis_count < 1:
            raise ValidationError(
                f"{self.method} needs basis_count >= 1, got {self.basis_count}"
            )
        if self.threads < 1:
            raise ValidationError(f"threads must be >= 1, got {self.threads}")


def compute_estimate(
    s: SampleSet, k: ShiftInvariantKernel, config: EstimatorConfig, seed: int = 0
) -> MmdEstimate:
    """Run the configured estimator; ``seed`` drives any frequency sampling."""
    method = config.method
    if method == "exact":
        if config.kind == "biased":
            return mmd_biased_exact(s, k)
        return mmd_unbiased_exact(s, k)
    if method == "linear":
        return mmd_linear(s, k, seed)
    if method == "btest":
        return mmd_btest(s, k, config.block_size, seed)
    if method == "circular":
        bank = sample_spectral(k, config.basis_count, s.d, seed)
        return ensemble_discrepancy(s, k, bank)
    if method == "fourier":
        bank = sample_spectral(k, config.basis_count, s.d, seed)
        biased, unbiased = fastmmd_fourier(s, k, bank, threads=config.threads)
    else:
        biased, unbiased = fastmmd_fastfood(
            s, k, config.basis_count, seed, threads=config.threads
        )
    if config.kind == "biased":
        return biased
    if unbiased is None:
        raise ValidationError(
            "unbiased estimate needs at least 2 samples per group"
        )
    return unbiased
