"""Coincidence measurement series: exact probabilities and Poisson counts."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .scene import SpectralDecomposition
from .wht import DimensionError, OrthoMatrix, fwht2
from .projections import RandomBasis

SQRT2 = np.sqrt(2.0)

Basis = Union[OrthoMatrix, RandomBasis]


@dataclass(frozen=True)
class MeasurementSeries:
    """Per-mask detection values for one projection channel.

    ``values[j]`` is |<T_j|O>|^2 in exact mode, or a Poisson count after
    sampling.  ``flux`` is None for exact probabilities.
    """

    kind: str                       # "cos" | "sin"
    dim: int
    basis: str                      # e.g. "hadamard:natural" or "random:42"
    values: np.ndarray = field(repr=False)
    flux: Optional[float] = None
    seed: Optional[int] = None

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def exact(self) -> bool:
        return self.flux is None


def basis_descriptor(basis: Basis) -> str:
    if isinstance(basis, OrthoMatrix):
        return f"hadamard:{basis.ordering}"
    return f"random:{basis.seed}"


def mask_overlaps(obj: np.ndarray, basis: Basis) -> np.ndarray:
    """All N inner products <M_j|O> as a flat complex vector.

    Hadamard bases go through the fast transform; random bases use
    direct per-mask sums.
    """
    if isinstance(basis, OrthoMatrix):
        if obj.shape != (basis.dim, basis.dim):
            raise DimensionError(f"object shape {obj.shape} does not match d={basis.dim}")
        return fwht2(obj, basis).ravel()
    if obj.shape != (basis.dim, basis.dim):
        raise DimensionError(f"object shape {obj.shape} does not match d={basis.dim}")
    return np.einsum("jxy,xy->j", basis.masks, obj)


def projection_values(overlaps: np.ndarray, kind: str) -> np.ndarray:
    """|<T_j|O>|^2 from the basis overlaps (reference overlap at index 0)."""
    c0 = overlaps[0]
    if kind == "cos":
        t = (overlaps + c0) / SQRT2
    elif kind == "sin":
        t = (overlaps - 1j * c0) / SQRT2
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    return np.abs(t) ** 2


def measure_exact(obj: np.ndarray, basis: Basis, kind: str) -> MeasurementSeries:
    """Exact detection probabilities v_j = |<T_j|O>|^2 for every mask."""
    overlaps = mask_overlaps(obj, basis)
    return MeasurementSeries(
        kind=kind,
        dim=basis.dim,
        basis=basis_descriptor(basis),
        values=projection_values(overlaps, kind),
    )


# Convention knobs for the closed-form probability expansion.  The
# implemented set is delta_sign="minus" (phase differences relative to
# the reference), cross_sign="minus" for the sine channel, and
# sin_coeff="half" (p_j/2 in both channels).
CONVENTIONS = {
    "delta_sign": ("minus", "plus"),
    "cross_sign": ("minus", "plus"),
    "sin_coeff": ("half", "full"),
}


def closed_form_values(
    dec: SpectralDecomposition,
    kind: str,
    delta_sign: str = "minus",
    cross_sign: str = "minus",
    sin_coeff: str = "half",
) -> np.ndarray:
    """Term-by-term prediction of the detection probabilities."""
    p = dec.probabilities
    p0 = dec.reference_probability
    a0 = dec.reference_phase
    delta = dec.phases - a0 if delta_sign == "minus" else dec.phases + a0
    cross = np.sqrt(p0 * p)
    if kind == "cos":
        return p0 / 2 + p / 2 + cross * np.cos(delta)
    coeff = 0.5 if sin_coeff == "half" else 1.0
    sign = -1.0 if cross_sign == "minus" else 1.0
    return p0 / 2 + coeff * p + sign * cross * np.sin(delta)


def decompose_probability(
    series: MeasurementSeries,
    dec: SpectralDecomposition,
    delta_sign: str = "minus",
    cross_sign: str = "minus",
    sin_coeff: str = "half",
) -> float:
    """Max absolute residual of the series against the closed-form expansion.

    Arbiter of the sign conventions: only the implemented convention set
    drives the residual to zero for exact series.
    """
    if not series.exact:
        raise ValueError("closed-form check needs an exact-mode series")
    predicted = closed_form_values(dec, series.kind, delta_sign, cross_sign, sin_coeff)
    return float(np.max(np.abs(series.values - predicted)))


def sample_counts(series: MeasurementSeries, total_flux: float, seed: int) -> MeasurementSeries:
    """Poisson-sampled coincidence counts at a finite photon budget.

    Counts are drawn independently per mask with mean
    total_flux * v_j / sum(v), from a counter-based generator keyed by
    (seed, channel, j) so results do not depend on evaluation order.
    """
    if not series.exact:
        raise ValueError("can only sample from an exact-mode series")
    if total_flux <= 0:
        raise ValueError(f"total flux must be positive, got {total_flux}")
    means = total_flux * series.values / series.values.sum()
    kind_bit = 0 if series.kind == "cos" else 1
    counts = np.empty_like(means)
    for j, mu in enumerate(means):
        rng = np.random.Generator(
            np.random.Philox(key=np.array([seed, 2 * j + kind_bit], dtype=np.uint64))
        )
        counts[j] = rng.poisson(mu)
    return replace(series, values=counts, flux=float(total_flux), seed=int(seed))
