"""Cross-sections and phase error metrics against ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .reconstruction import PhaseImage
from .scene import grid_center


def wrap(angles: np.ndarray) -> np.ndarray:
    """Wrap to (-pi, pi]."""
    w = np.angle(np.exp(1j * np.asarray(angles, dtype=float)))
    return np.where(w == -np.pi, np.pi, w)


@dataclass(frozen=True)
class CrossSection:
    kind: str                        # "horizontal" | "azimuthal"
    coordinates: np.ndarray = field(repr=False)   # pixel index or azimuth radians
    values: np.ndarray = field(repr=False)        # wrapped phase

    def unwrapped(self) -> np.ndarray:
        return np.unwrap(self.values)


def cross_section_horizontal(phase: PhaseImage, row: int) -> CrossSection:
    """Phase trace along one row, restricted to valid support pixels."""
    valid = phase.support[row]
    if not valid.any():
        raise ValueError(f"row {row} has no valid support pixels")
    cols = np.flatnonzero(valid)
    return CrossSection(kind="horizontal", coordinates=cols.astype(float),
                        values=phase.entries[row, cols])


def cross_section_azimuthal(phase: PhaseImage, radius: float, samples: int = 64) -> CrossSection:
    """Nearest-pixel phase samples on a centered circle of the given radius."""
    d = phase.entries.shape[0]
    c = grid_center(d)
    if radius < 0 or radius > d / 2:
        raise ValueError(f"radius {radius} outside the grid")
    theta = 2 * np.pi * np.arange(samples) / samples
    xs = np.clip(np.round(c + radius * np.cos(theta)).astype(int), 0, d - 1)
    ys = np.clip(np.round(c + radius * np.sin(theta)).astype(int), 0, d - 1)
    return CrossSection(kind="azimuthal", coordinates=theta, values=phase.entries[ys, xs])


def phase_rmse(recovered: PhaseImage, truth: PhaseImage) -> float:
    """Circular RMSE on the support intersection, best global offset removed.

    The offset is the circular mean of the wrapped differences, which is
    well defined across the branch cut (a linear mean is not).
    """
    both = recovered.support & truth.support
    if not both.any():
        raise ValueError("empty support intersection")
    diff = recovered.entries[both] - truth.entries[both]
    offset = np.angle(np.mean(np.exp(1j * diff)))
    residual = wrap(diff - offset)
    return float(np.sqrt(np.mean(residual ** 2)))


def phase_pearson(a: PhaseImage, b: PhaseImage) -> float:
    """Pearson correlation of two phase maps on their joint support.

    The second map is re-branched pixelwise onto the sheet nearest the
    first before correlating, so a pixel at +pi in one map and -pi in the
    other counts as agreement rather than a 2*pi outlier.
    """
    both = a.support & b.support
    if not both.any():
        raise ValueError("empty support intersection")
    x = a.entries[both]
    y = x + wrap(b.entries[both] - x)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return 1.0 if np.allclose(x, y) else 0.0
    return float(np.corrcoef(x, y)[0, 1])


def azimuthal_slope(trace: CrossSection) -> float:
    """Least-squares slope of the unwrapped azimuthal trace vs angle."""
    th = trace.coordinates
    un = trace.unwrapped()
    A = np.vstack([th, np.ones_like(th)]).T
    return float(np.linalg.lstsq(A, un, rcond=None)[0][0])
