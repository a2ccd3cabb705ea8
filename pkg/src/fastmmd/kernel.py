"""Shift-invariant kernels and sampling from their spectral measures.

A bounded shift-invariant positive definite kernel is the Fourier
transform of a non-negative finite measure (Bochner), so K(x, y) =
K(0) * E_w[cos(w'(x - y))] with w drawn from the normalized transform.
This module evaluates the supported kernel families and draws frequency
banks from their spectral laws:

  gaussian   K(D) = k0 * exp(-|D|^2 / (2 sigma^2)),  w ~ N(0, I / sigma^2)
  laplacian  K(D) = k0 * exp(-|D|_1 / sigma),        w_j ~ Cauchy(0, 1/sigma)

Sampling runs through a counter-based generator (Philox) keyed by
(seed, block index), so banks are reproducible and block-parallelizable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ValidationError

Family = Literal["gaussian", "laplacian"]

# Values drawn per independently keyed block of the spectral stream.
_STREAM_BLOCK = 8192

# Row chunk for pairwise kernel sums; bounds peak memory at ~chunk * N floats.
_PAIR_CHUNK = 1024


@dataclass(frozen=True)
class ShiftInvariantKernel:
    """Kernel family descriptor: family, bandwidth sigma, and value at zero."""

    family: Family
    sigma: float
    k0: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in ("gaussian", "laplacian"):
            raise ValidationError(f"unknown kernel family {self.family!r}")
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}")
        if not self.k0 > 0:
            raise ValidationError(f"k0 must be positive, got {self.k0}")


def gaussian(sigma: float, k0: float = 1.0) -> ShiftInvariantKernel:
    return ShiftInvariantKernel("gaussian", sigma, k0)


def laplacian(sigma: float, k0: float = 1.0) -> ShiftInvariantKernel:
    return ShiftInvariantKernel("laplacian", sigma, k0)


@dataclass(frozen=True)
class FrequencyBank:
    """L sampled frequency rows with their provenance and seed.

    omegas     : (L, d) array of frequency vectors.
    seed       : integer that reproduces the bank.
    provenance : 'iid-spectral' for direct draws from the spectral law,
                 'fastfood' for rows materialized from a structured stack.
    """

    omegas: np.ndarray
    seed: int
    provenance: Literal["iid-spectral", "fastfood"] = "iid-spectral"

    def __post_init__(self) -> None:
        omegas = np.ascontiguousarray(self.omegas, dtype=np.float64)
        if omegas.ndim != 2 or omegas.shape[0] < 1:
            raise ValidationError(f"omegas must be (L, d) with L >= 1, got {omegas.shape}")
        if not np.isfinite(omegas).all():
            raise ValidationError("frequency bank contains non-finite entries")
        omegas.setflags(write=False)
        object.__setattr__(self, "omegas", omegas)

    @property
    def basis_count(self) -> int:
        return self.omegas.shape[0]

    @property
    def d(self) -> int:
        return self.omegas.shape[1]


# ---------------------------------------------------------------------------
# Kernel evaluation
# ---------------------------------------------------------------------------


def evaluate(kernel: ShiftInvariantKernel, x: np.ndarray, y: np.ndarray) -> float:
    """Kernel value K(x, y) for two d-vectors."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValidationError(f"dimension mismatch: {x.shape} vs {y.shape}")
    delta = x - y
    if kernel.family == "gaussian":
        return kernel.k0 * math.exp(-float(delta @ delta) / (2.0 * kernel.sigma**2))
    return kernel.k0 * math.exp(-float(np.abs(delta).sum()) / kernel.sigma)


def gram(
    kernel: ShiftInvariantKernel, x: np.ndarray, y: np.ndarray | None = None
) -> np.ndarray:
    """Materialized kernel matrix K[i, j] = K(x_i, y_j); y defaults to x."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = x if y is None else np.atleast_2d(np.asarray(y, dtype=np.float64))
    if x.shape[1] != y.shape[1]:
        raise ValidationError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    if kernel.family == "gaussian":
        d2 = _sq_dists(x, y)
        return kernel.k0 * np.exp(-d2 / (2.0 * kernel.sigma**2))
    d1 = np.abs(x[:, None, :] - y[None, :, :]).sum(axis=2)
    return kernel.k0 * np.exp(-d1 / kernel.sigma)


def pair_sum(
    kernel: ShiftInvariantKernel, x: np.ndarray, y: np.ndarray
) -> float:
    """Sum of K(x_i, y_j) over all pairs, accumulated in row chunks.

    Chunk boundaries are fixed, so the reduction order (and hence the
    result) does not depend on how the work is scheduled.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if x.shape[1] != y.shape[1]:
        raise ValidationError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    total = 0.0
    for start in range(0, x.shape[0], _PAIR_CHUNK):
        block = x[start : start + _PAIR_CHUNK]
        total += float(gram(kernel, block, y).sum())
    return total


def _sq_dists(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    xx = np.einsum("ij,ij->i", x, x)[:, None]
    yy = np.einsum("ij,ij->i", y, y)[None, :]
    return np.clip(xx + yy - 2.0 * (x @ y.T), 0.0, None)


# ---------------------------------------------------------------------------
# Spectral sampling
# ---------------------------------------------------------------------------


def _stream_uniforms(seed: int, block_index: int, n: int) -> np.ndarray:
    """n uniforms in [0, 1) from the counter-based stream block."""
    ss = np.random.SeedSequence(entropy=(seed & (2**64 - 1), block_index))
    return np.random.Generator(np.random.Philox(ss)).random(n)


def _normal_stream(seed: int, n: int) -> np.ndarray:
    """n standard normals via the Box-Muller transform on the uniform stream."""
    out = np.empty(n)
    pos = 0
    block = 0
    while pos < n:
        take = min(_STREAM_BLOCK, n - pos)
        pairs = (take + 1) // 2
        u = _stream_uniforms(seed, block, 2 * pairs)
        radius = np.sqrt(-2.0 * np.log1p(-u[:pairs]))  # u in [0,1) keeps the log finite
        angle = 2.0 * np.pi * u[pairs:]
        z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
        out[pos : pos + take] = z[:take]
        pos += take
        block += 1
    return out


def _cauchy_stream(seed: int, n: int) -> np.ndarray:
    """n standard Cauchy draws via inverse CDF on the uniform stream."""
    out = np.empty(n)
    pos = 0
    block = 0
    while pos < n:
        take = min(_STREAM_BLOCK, n - pos)
        u = _stream_uniforms(seed, block, take)
        out[pos : pos + take] = np.tan(np.pi * (u - 0.5))
        pos += take
        block += 1
    return out


def sample_spectral(
    kernel: ShiftInvariantKernel, basis_count: int, d: int, seed: int
) -> FrequencyBank:
    """Draw a FrequencyBank of ``basis_count`` rows from the kernel's spectral law."""
    if basis_count < 1:
        raise ValidationError(f"basis_count must be >= 1, got {basis_count}")
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    n = basis_count * d
    if kernel.family == "gaussian":
        values = _normal_stream(seed, n)
    else:
        values = _cauchy_stream(seed, n)
    omegas = values.reshape(basis_count, d) / kernel.sigma
    return FrequencyBank(omegas, seed=seed, provenance="iid-spectral")


def spectral_second_moment(kernel: ShiftInvariantKernel, d: int) -> float:
    """E[w'w] under the spectral law: d / sigma^2 for gaussian, inf for laplacian."""
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    if kernel.family == "gaussian":
        return d / kernel.sigma**2
    return math.inf
