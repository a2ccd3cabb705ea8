"""Structured spectral projection for the Gaussian kernel.

Replaces the dense (L, d) Gaussian frequency matrix with a stack of
implicit blocks

    V = (1 / (sigma * sqrt(d'))) * S H G P H B

where d' is the input dimension padded to a power of two, B is a random
sign diagonal, P a random permutation, G a standard normal diagonal, S a
rescaling diagonal, and H the (unnormalized) Walsh-Hadamard matrix applied
via the O(d' log d') butterfly.  Each implicit row then has the same
marginal law as a draw from N(0, I / sigma^2), while projecting a sample
costs O(L log d) instead of O(L d).

The rescaling in S draws each target row norm from the chi distribution
with d' degrees of freedom (the norm law of a d'-dimensional standard
normal vector) and divides by the common row norm sqrt(d') * |G| that the
H G P H B product produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import SampleSet
from .errors import ValidationError
from .exact import MmdEstimate
from .fourier import class_sinusoid_means, estimates_from_class_means
from .kernel import FrequencyBank, ShiftInvariantKernel


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def fwht(x: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform of a length-2^p vector.

    Applying it twice returns the input scaled by the length.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValidationError(f"fwht expects a vector, got shape {x.shape}")
    if not _is_power_of_two(x.shape[0]):
        raise ValidationError(f"length {x.shape[0]} is not a power of two")
    return _fwht_rows(x[None, :].copy())[0]


def _fwht_rows(mat: np.ndarray) -> np.ndarray:
    """In-place butterfly over the last axis of an (N, 2^p) array."""
    n = mat.shape[1]
    half = 1
    while half < n:
        view = mat.reshape(mat.shape[0], n // (2 * half), 2, half)
        even = view[:, :, 0, :].copy()
        odd = view[:, :, 1, :]
        view[:, :, 0, :] = even + odd
        view[:, :, 1, :] = even - odd
        half *= 2
    return mat


@dataclass(frozen=True)
class FastfoodBlock:
    """One implicit d' x d' block: sign flip, permutation, Gaussian and
    rescaling diagonals."""

    signs: np.ndarray
    perm: np.ndarray
    gauss: np.ndarray
    scale: np.ndarray


@dataclass(frozen=True)
class FastfoodStack:
    """Enough independent blocks to cover ``basis_count`` implicit rows."""

    blocks: tuple[FastfoodBlock, ...]
    padded_dim: int
    basis_count: int
    sigma: float
    seed: int


def build_stack(
    sigma: float, d: int, basis_count: int, seed: int
) -> FastfoodStack:
    """Build ceil(L / d') independent blocks for inputs of dimension d."""
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    if basis_count < 1:
        raise ValidationError(f"basis_count must be >= 1, got {basis_count}")
    if not sigma > 0:
        raise ValidationError(f"sigma must be positive, got {sigma}")
    padded = 1 << max(0, (d - 1).bit_length())
    n_blocks = -(-basis_count // padded)
    blocks = []
    for b in range(n_blocks):
        # Keyed per (seed, domain tag, block) so blocks are independent and
        # may be built in parallel.
        ss = np.random.SeedSequence(entropy=(seed & (2**64 - 1), 1, b))
        rng = np.random.Generator(np.random.Philox(ss))
        signs = rng.integers(0, 2, size=padded).astype(np.float64) * 2.0 - 1.0
        gauss = rng.standard_normal(padded)
        perm = rng.permutation(padded)
        norms = np.sqrt(rng.chisquare(padded, size=padded))
        scale = norms / math.sqrt(float(gauss @ gauss))
        blocks.append(FastfoodBlock(signs, perm, gauss, scale))
    return FastfoodStack(tuple(blocks), padded, basis_count, sigma, seed)


def _project_block(
    block: FastfoodBlock, padded_rows: np.ndarray, sigma: float
) -> np.ndarray:
    d_pad = padded_rows.shape[1]
    t = _fwht_rows(padded_rows * block.signs)
    t = t[:, block.perm] * block.gauss
    t = _fwht_rows(t)
    t *= block.scale / (sigma * math.sqrt(d_pad))
    return t


def fastfood_project(stack: FastfoodStack, x: np.ndarray) -> np.ndarray:
    """Implicit projections w_k'x for one d-vector; returns length L."""
    x = np.asarray(x, dtype=np.float64).ravel()
    return project_rows(stack, x[None, :])[0]


def project_rows(stack: FastfoodStack, x: np.ndarray) -> np.ndarray:
    """Implicit projections for an (N, d) block of samples; returns (N, L)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    d = x.shape[1]
    if d > stack.padded_dim:
        raise ValidationError(
            f"data dimension {d} exceeds padded dimension {stack.padded_dim}"
        )
    padded = np.zeros((x.shape[0], stack.padded_dim))
    padded[:, :d] = x
    cols = [_project_block(block, padded, stack.sigma) for block in stack.blocks]
    return np.hstack(cols)[:, : stack.basis_count]


def materialize_bank(stack: FastfoodStack) -> FrequencyBank:
    """Assemble the implicit rows into an explicit FrequencyBank.

    Rows have ``padded_dim`` columns; slice to the data dimension as
    needed.  Intended for diagnostics and tests; projecting through the
    bank costs the dense O(L d) that the stack exists to avoid.
    """
    basis = np.eye(stack.padded_dim)
    omegas = project_rows(stack, basis).T
    return FrequencyBank(omegas, seed=stack.seed, provenance="fastfood")


def fastmmd_fastfood(
    s: SampleSet,
    k: ShiftInvariantKernel,
    basis_count: int,
    seed: int,
    threads: int = 1,
) -> tuple[MmdEstimate, MmdEstimate | None]:
    """(biased, unbiased) estimates with Fastfood-structured frequencies.

    Gaussian kernels only: the construction targets the spherically
    invariant spectral law, so other families are rejected.
    """
    if k.family != "gaussian":
        raise ValidationError(
            "fastfood acceleration supports the gaussian family only; "
            f"got {k.family!r}"
        )
    stack = build_stack(k.sigma, s.d, basis_count, seed)
    c1, s1_, c2, s2_ = class_sinusoid_means(
        s.data,
        s.idx1,
        s.idx2,
        lambda rows: project_rows(stack, rows),
        basis_count,
        threads,
    )
    return estimates_from_class_means(
        c1, s1_, c2, s2_, k.k0, s.n1, s.n2, method="fastfood", seed=seed
    )
