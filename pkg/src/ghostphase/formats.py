"""Bit-exact file formats: field binaries, series CSVs, PGM rasters."""

from __future__ import annotations

import io
from typing import Optional, Tuple

import numpy as np

from .acquisition import MeasurementSeries

MAGIC = b"GCF1"
FIELD_KINDS = ("complex", "real", "phase")


class DataError(ValueError):
    """Malformed or inconsistent file content."""


def write_field(path, data: np.ndarray, kind: str) -> None:
    """Write a d x d field: magic, 'd=<int> kind=<..>' header, raw LE float64.

    Complex fields interleave (re, im) per pixel; round trips are
    bit-exact.
    """
    if kind not in FIELD_KINDS:
        raise DataError(f"unknown field kind {kind!r}")
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[0] != data.shape[1]:
        raise DataError(f"field must be square, got shape {data.shape}")
    d = data.shape[0]
    with open(path, "wb") as fh:
        fh.write(MAGIC + b"\n")
        fh.write(f"d={d} kind={kind}\n".encode())
        if kind == "complex":
            payload = np.empty((d, d, 2))
            payload[..., 0] = data.real
            payload[..., 1] = data.imag
        else:
            if np.iscomplexobj(data):
                raise DataError(f"{kind} field cannot hold complex data")
            payload = data
        fh.write(payload.astype("<f8").tobytes())


def read_field(path) -> Tuple[np.ndarray, str]:
    with open(path, "rb") as fh:
        if fh.read(5) != MAGIC + b"\n":
            raise DataError(f"{path}: not a GCF1 field file")
        header = fh.readline().decode().strip()
        try:
            fields = dict(item.split("=", 1) for item in header.split())
            d = int(fields["d"])
            kind = fields["kind"]
        except (ValueError, KeyError) as exc:
            raise DataError(f"{path}: bad field header {header!r}") from exc
        if kind not in FIELD_KINDS:
            raise DataError(f"{path}: unknown field kind {kind!r}")
        words = 2 if kind == "complex" else 1
        payload = fh.read()
    expected = d * d * words * 8
    if len(payload) != expected:
        raise DataError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    flat = np.frombuffer(payload, dtype="<f8")
    if kind == "complex":
        grid = flat.reshape(d, d, 2)
        return grid[..., 0] + 1j * grid[..., 1], kind
    return flat.reshape(d, d).copy(), kind


def write_series(path, series: MeasurementSeries) -> None:
    """One 'j,value' row per mask, headed by '# key=value' comment lines."""
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# d={series.dim} basis={series.basis} kind={series.kind}"
                 f" flux={'exact' if series.exact else series.flux}"
                 f" seed={'none' if series.seed is None else series.seed}\n")
        for j, v in enumerate(series.values):
            fh.write(f"{j},{float(v)!r}\n")


def read_series(path) -> MeasurementSeries:
    meta = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                meta.update(item.split("=", 1) for item in line[1:].split())
                continue
            j_str, v_str = line.split(",")
            rows.append((int(j_str), float(v_str)))
    try:
        d = int(meta["d"])
        kind = meta["kind"]
        basis = meta["basis"]
    except KeyError as exc:
        raise DataError(f"{path}: missing series header field {exc}") from exc
    if [j for j, _ in rows] != list(range(d * d)):
        raise DataError(f"{path}: expected rows j=0..{d * d - 1} in order")
    values = np.array([v for _, v in rows])
    if not np.all(np.isfinite(values)) or (values < 0).any():
        raise DataError(f"{path}: series values must be finite and nonnegative")
    flux = None if meta.get("flux", "exact") == "exact" else float(meta["flux"])
    seed = None if meta.get("seed", "none") == "none" else int(meta["seed"])
    return MeasurementSeries(kind=kind, dim=d, basis=basis, values=values, flux=flux, seed=seed)


def write_pgm(path, data: np.ndarray, lo: Optional[float] = None, hi: Optional[float] = None,
              invalid: Optional[np.ndarray] = None) -> None:
    """16-bit binary PGM (P5, maxval 65535), values mapped linearly to [lo, hi].

    Invalid pixels are written as 0.  PGM stores 16-bit samples
    big-endian.
    """
    data = np.asarray(data, dtype=float)
    lo = float(np.min(data) if lo is None else lo)
    hi = float(np.max(data) if hi is None else hi)
    span = hi - lo if hi > lo else 1.0
    scaled = np.clip((data - lo) / span, 0.0, 1.0)
    pixels = np.round(scaled * 65535).astype(">u2")
    if invalid is not None:
        pixels[invalid] = 0
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode())
        fh.write(pixels.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    stream = io.BytesIO(raw)
    if stream.readline().strip() != b"P5":
        raise DataError(f"{path}: not a binary PGM")
    w, h = (int(t) for t in stream.readline().split())
    maxval = int(stream.readline())
    if maxval != 65535:
        raise DataError(f"{path}: expected 16-bit PGM, maxval={maxval}")
    return np.frombuffer(stream.read(w * h * 2), dtype=">u2").reshape(h, w).astype(int)


def write_mask_text(path, symbols: np.ndarray, kind: str, index: int) -> None:
    """Integer-symbol mask grid for inspection or SLM playback.

    basis masks use -1/1, cos masks 0/1, sin masks -1/1 standing for the
    1-i / 1+i phase states.
    """
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# kind={kind} j={index} d={symbols.shape[0]}\n")
        for row in symbols:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def write_metrics(path, metrics: dict) -> None:
    """Plain 'key: value' report."""
    with open(path, "w", newline="\n") as fh:
        for key, value in metrics.items():
            fh.write(f"{key}: {value}\n")


def write_cross_section_csv(path, trace) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# kind={trace.kind}\n")
        for c, v in zip(trace.coordinates, trace.values):
            fh.write(f"{float(c)!r},{float(v)!r}\n")
