"""Run configuration: YAML document with strict key checking."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import yaml

from .scene import KINDS, ObjectSpec


class ConfigError(ValueError):
    pass


_OBJECT_KEYS = {"kind", "slit_width", "slit_gap", "annulus_radii", "petals",
                "bands", "phase_depth", "path"}
_ANALYSIS_KEYS = {"row", "radius", "samples"}
_TOP_KEYS = {"d", "object", "illumination_radius", "basis", "ordering", "basis_seed",
             "flux", "acquisition_seed", "artifact_mode", "denoise_window",
             "output_dir", "analysis"}


@dataclass
class RunConfig:
    d: int = 32
    object_kind: str = "pi-slit-phase"
    slit_width: Optional[int] = None
    slit_gap: Optional[int] = None
    annulus_radii: Optional[Tuple[float, float]] = None
    petals: int = 6
    bands: int = 3
    phase_depth: float = 3.141592653589793
    object_path: Optional[str] = None
    illumination_radius: Optional[float] = None
    basis: str = "hadamard"            # "hadamard" | "random"
    ordering: str = "natural"          # "natural" | "sequency"
    basis_seed: int = 0
    flux: Optional[float] = None       # None = exact probabilities
    acquisition_seed: int = 0
    artifact_mode: str = "heuristic"   # "analytic" | "heuristic"
    denoise_window: int = 1
    output_dir: str = "out"
    analysis_row: Optional[int] = None
    analysis_radius: Optional[float] = None
    analysis_samples: int = 64

    def validate(self) -> "RunConfig":
        if self.object_kind not in KINDS:
            raise ConfigError(f"object.kind: unknown kind {self.object_kind!r}")
        if self.basis not in ("hadamard", "random"):
            raise ConfigError(f"basis: must be 'hadamard' or 'random', got {self.basis!r}")
        if self.ordering not in ("natural", "sequency"):
            raise ConfigError(f"ordering: must be 'natural' or 'sequency', got {self.ordering!r}")
        if self.artifact_mode not in ("analytic", "heuristic"):
            raise ConfigError(f"artifact_mode: must be 'analytic' or 'heuristic', got {self.artifact_mode!r}")
        if self.d < 1 or (self.d & (self.d - 1)) and self.basis == "hadamard":
            raise ConfigError(f"d: hadamard basis needs a power of two, got {self.d}")
        if self.flux is not None and self.flux <= 0:
            raise ConfigError(f"flux: must be positive, got {self.flux}")
        if self.denoise_window % 2 == 0:
            raise ConfigError(f"denoise_window: must be odd, got {self.denoise_window}")
        return self

    def object_spec(self) -> ObjectSpec:
        radii = tuple(self.annulus_radii) if self.annulus_radii is not None else None
        return ObjectSpec(
            kind=self.object_kind,
            slit_width=self.slit_width,
            slit_gap=self.slit_gap,
            annulus_radii=radii,
            petals=self.petals,
            bands=self.bands,
            phase_depth=self.phase_depth,
            illumination_radius=self.illumination_radius,
            path=self.object_path,
        )

    def to_document(self) -> dict:
        doc = {
            "d": self.d,
            "object": {
                "kind": self.object_kind,
                "slit_width": self.slit_width,
                "slit_gap": self.slit_gap,
                "annulus_radii": list(self.annulus_radii) if self.annulus_radii else None,
                "petals": self.petals,
                "bands": self.bands,
                "phase_depth": self.phase_depth,
                "path": self.object_path,
            },
            "illumination_radius": self.illumination_radius,
            "basis": self.basis,
            "ordering": self.ordering,
            "basis_seed": self.basis_seed,
            "flux": self.flux,
            "acquisition_seed": self.acquisition_seed,
            "artifact_mode": self.artifact_mode,
            "denoise_window": self.denoise_window,
            # output_dir is deliberately omitted: the document should not
            # depend on where it is written, so runs stay byte-reproducible
            "analysis": {
                "row": self.analysis_row,
                "radius": self.analysis_radius,
                "samples": self.analysis_samples,
            },
        }
        return doc

    def dump(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            yaml.safe_dump(self.to_document(), fh, sort_keys=True)


def _check_keys(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(sorted(unknown))}")


def load_config(path) -> RunConfig:
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    return config_from_document(doc)


def config_from_document(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    _check_keys(doc, _TOP_KEYS, "config")
    cfg = RunConfig()
    obj = doc.get("object", {}) or {}
    _check_keys(obj, _OBJECT_KEYS, "object")
    ana = doc.get("analysis", {}) or {}
    _check_keys(ana, _ANALYSIS_KEYS, "analysis")

    for key in ("d", "illumination_radius", "basis", "ordering", "basis_seed",
                "flux", "acquisition_seed", "artifact_mode", "denoise_window",
                "output_dir"):
        if key in doc and doc[key] is not None:
            setattr(cfg, key, doc[key])
    for src, dst in (("kind", "object_kind"), ("slit_width", "slit_width"),
                     ("slit_gap", "slit_gap"), ("petals", "petals"), ("bands", "bands"),
                     ("phase_depth", "phase_depth"), ("path", "object_path")):
        if src in obj and obj[src] is not None:
            setattr(cfg, dst, obj[src])
    if obj.get("annulus_radii") is not None:
        cfg.annulus_radii = tuple(obj["annulus_radii"])
    for src, dst in (("row", "analysis_row"), ("radius", "analysis_radius"),
                     ("samples", "analysis_samples")):
        if src in ana and ana[src] is not None:
            setattr(cfg, dst, ana[src])
    return cfg.validate()
