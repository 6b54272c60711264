"""Cosine/sine projection masks and the pseudo-complete random basis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .wht import OrthoMatrix, basis_mask

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class ProjectionMask:
    index: int
    kind: str                      # "cos" | "sin"
    entries: np.ndarray = field(repr=False)


def _uniform_mask(d: int) -> np.ndarray:
    return np.full((d, d), 1.0 / d)


def cos_mask(j: int, H: OrthoMatrix) -> ProjectionMask:
    """(M_j + M_0)/sqrt(2): a 0 / sqrt(2)/sqrt(N) amplitude mask.

    j = 0 gives the unnormalized uniform mask sqrt(2) * M_0; it is kept
    in the scan because the reconstruction is insensitive to the
    reference mode.
    """
    M = basis_mask(j, H)
    return ProjectionMask(index=j, kind="cos", entries=(M + _uniform_mask(H.dim)) / SQRT2)


def sin_mask(j: int, H: OrthoMatrix) -> ProjectionMask:
    """(M_j + i M_0)/sqrt(2): entries (+-1 + i)/(sqrt(2) sqrt(N))."""
    M = basis_mask(j, H)
    return ProjectionMask(index=j, kind="sin", entries=(M + 1j * _uniform_mask(H.dim)) / SQRT2)


@dataclass(frozen=True)
class RandomBasis:
    """N = d*d random +-1/sqrt(N) masks; index 0 is the uniform reference.

    Each mask is drawn from a counter-based generator keyed by
    (seed, index), so any mask can be generated independently of the
    others and the set is reproducible regardless of generation order.
    """

    seed: int
    dim: int
    masks: np.ndarray = field(repr=False)   # (N, d, d)

    @property
    def size(self) -> int:
        return self.dim * self.dim


def _random_mask(seed: int, j: int, d: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, j], dtype=np.uint64)))
    bits = rng.integers(0, 2, size=(d, d))
    return (2.0 * bits - 1.0) / d


def random_basis(N: int, d: int, seed: int) -> RandomBasis:
    if N != d * d:
        raise ValueError(f"random basis needs N = d^2, got N={N}, d={d}")
    masks = np.empty((N, d, d))
    masks[0] = _uniform_mask(d)
    for j in range(1, N):
        masks[j] = _random_mask(seed, j, d)
    return RandomBasis(seed=seed, dim=d, masks=masks)


def export_mask_symbols(mask: np.ndarray, kind: str) -> np.ndarray:
    """Integer-symbol view of a mask for hardware export.

    basis: +-1 grid; cos: 0/1 grid; sin: +1 for the 1+i state, -1 for 1-i.
    """
    if kind == "basis":
        return np.where(mask.real > 0, 1, -1).astype(int)
    if kind == "cos":
        return (mask.real > 1e-12).astype(int)
    if kind == "sin":
        return np.where(mask.real > 0, 1, -1).astype(int)
    raise ValueError(f"unknown mask kind {kind!r}")
