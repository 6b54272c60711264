"""Shared oracles: naive brute-force counterparts of the fast paths."""

import numpy as np
import pytest

from ghostphase import ObjectSpec, basis_mask, hadamard_matrix, make_object


def naive_transform(X, H):
    """Triple-loop H X H^T, the oracle for fwht2."""
    d = H.dim
    out = np.zeros((d, d), dtype=complex)
    for n in range(d):
        for m in range(d):
            acc = 0.0 + 0.0j
            for x in range(d):
                for y in range(d):
                    acc += H.entries[n, x] * X[x, y] * H.entries[m, y]
            out[n, m] = acc
    return out


def naive_overlap(mask, obj):
    """Pixel-sum <mask|obj> with explicit conjugation."""
    return complex(np.sum(np.conj(mask) * obj))


def naive_mask_series(obj, H, kind):
    """Per-mask |<T_j|obj>|^2 without any transform."""
    d = H.dim
    uniform = np.full((d, d), 1.0 / d)
    values = np.empty(d * d)
    for j in range(d * d):
        M = basis_mask(j, H)
        T = (M + uniform) / np.sqrt(2) if kind == "cos" else (M + 1j * uniform) / np.sqrt(2)
        values[j] = abs(naive_overlap(T, obj)) ** 2
    return values


def disc_pixel_count(d, radius):
    """Direct rasterization of the centered disc."""
    c = d / 2 - 0.5
    count = 0
    for y in range(d):
        for x in range(d):
            if (x - c) ** 2 + (y - c) ** 2 <= radius ** 2:
                count += 1
    return count


def random_complex_object(d, seed):
    rng = np.random.default_rng(seed)
    obj = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return obj / np.linalg.norm(obj)


@pytest.fixture
def H8():
    return hadamard_matrix(8)


@pytest.fixture
def slit16():
    return make_object(ObjectSpec(kind="pi-slit-phase"), 16)
