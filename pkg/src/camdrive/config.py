"""Run configuration: one JSON file drives every CLI command.

Parsing is strict: unknown keys anywhere in the file are rejected so a typo
cannot silently fall back to a default. Command-line flags override file
values. The resolved configuration carries a content hash so output metadata
pins the exact inputs of a run.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .geometry import TransmissionSpec
from .mechanics import LoadCase, Material, builtin_materials, find_material, load_materials
from .optimize import DesignSpace

FORMATS = ("csv", "json", "svg")


@dataclass(frozen=True)
class MechanismConfig:
    pitch_mm: float = 50.0
    eta: float = 0.18
    roller_radius_mm: float = 4.0
    contact_width_mm: float = 10.0
    lobes: int = 1
    cam_count: int = 2


@dataclass(frozen=True)
class LoadConfig:
    torque_nmm: float = 1200.0
    speed_rpm: float | None = None


@dataclass(frozen=True)
class MaterialsConfig:
    cam: str = "improved steel"
    roller: str = "improved steel"
    catalog_file: str | None = None


@dataclass(frozen=True)
class ProfileConfig:
    resolution: int = 2048


@dataclass(frozen=True)
class SensitivityConfig:
    samples: int = 256
    rms_nodes: int = 1025
    include_torque: bool = False


@dataclass(frozen=True)
class SpaceConfig:
    d_cs_mm: tuple[float, float] = (0.0, 30.0)
    r_mm: tuple[float, float] = (4.0, 10.5)
    L_mm: tuple[float, float | None] = (1.0, None)
    m: tuple[int, ...] = (2, 3)
    resolution: int = 64
    pitch_mm: float = 20.0
    mu_cap_deg: float = 30.0
    p_cap_mpa: float = 800.0
    s_cap_mm: float = 90.0
    workers: int = 1


@dataclass(frozen=True)
class ContourConfig:
    m: int = 2
    s_m_mm: float = 60.0
    resolution: int = 64
    mu_levels_deg: tuple[float, ...] = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    p_levels_mpa: tuple[float, ...] = (500.0, 550.0, 600.0, 650.0, 700.0, 750.0, 800.0)
    dashed_pressure: bool = True


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple[str, ...] = FORMATS


@dataclass(frozen=True)
class RunConfig:
    mechanism: MechanismConfig = MechanismConfig()
    load: LoadConfig = LoadConfig()
    materials: MaterialsConfig = MaterialsConfig()
    profile: ProfileConfig = ProfileConfig()
    sensitivity: SensitivityConfig = SensitivityConfig()
    design_space: SpaceConfig = SpaceConfig()
    contour: ContourConfig = ContourConfig()
    output: OutputConfig = OutputConfig()
    seed: int | None = None

    # --- model objects -----------------------------------------------------

    def spec(self) -> TransmissionSpec:
        mech = self.mechanism
        return TransmissionSpec(p=mech.pitch_mm, eta=mech.eta,
                                r=mech.roller_radius_mm, n=mech.lobes,
                                m=mech.cam_count, L=mech.contact_width_mm)

    def load_case(self) -> LoadCase:
        return LoadCase(torque=self.load.torque_nmm, speed_rpm=self.load.speed_rpm)

    def catalog(self) -> tuple[Material, ...]:
        if self.materials.catalog_file:
            return load_materials(self.materials.catalog_file)
        return builtin_materials()

    def material_pair(self) -> tuple[Material, Material]:
        catalog = self.catalog()
        return (find_material(self.materials.cam, catalog),
                find_material(self.materials.roller, catalog))

    def space(self) -> DesignSpace:
        sc = self.design_space
        cam, roller = self.material_pair()
        return DesignSpace(
            d_cs_range=sc.d_cs_mm, r_range=sc.r_mm, L_range=sc.L_mm,
            m_values=sc.m, resolution=sc.resolution, pitch=sc.pitch_mm,
            lobes=self.mechanism.lobes, load=self.load_case(),
            cam_material=cam, roller_material=roller,
            mu_cap=math.radians(sc.mu_cap_deg), P_cap=sc.p_cap_mpa,
            S_cap=sc.s_cap_mm, workers=sc.workers,
        )

    # --- serialisation -----------------------------------------------------

    def to_dict(self) -> dict:
        def section(obj):
            out = {}
            for f in fields(obj):
                v = getattr(obj, f.name)
                out[f.name] = list(v) if isinstance(v, tuple) else v
            return out

        return {
            "mechanism": section(self.mechanism),
            "load": section(self.load),
            "materials": section(self.materials),
            "profile": section(self.profile),
            "sensitivity": section(self.sensitivity),
            "design_space": section(self.design_space),
            "contour": section(self.contour),
            "output": section(self.output),
            "seed": self.seed,
        }

    def content_hash(self) -> str:
        """Hash of the model-relevant sections; where outputs land is excluded."""
        d = self.to_dict()
        d.pop("output", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode("utf-8")
        return hashlib.sha1(blob).hexdigest()


_SECTIONS = {
    "mechanism": MechanismConfig,
    "load": LoadConfig,
    "materials": MaterialsConfig,
    "profile": ProfileConfig,
    "sensitivity": SensitivityConfig,
    "design_space": SpaceConfig,
    "contour": ContourConfig,
    "output": OutputConfig,
}

_TUPLE_KEYS = {
    ("design_space", "d_cs_mm"), ("design_space", "r_mm"),
    ("design_space", "L_mm"), ("design_space", "m"),
    ("contour", "mu_levels_deg"), ("contour", "p_levels_mpa"),
    ("output", "formats"),
}


def _parse_section(name: str, cls, raw: dict):
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown keys in section {name!r}: {sorted(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if (name, key) in _TUPLE_KEYS:
            if not isinstance(value, list):
                raise ConfigError(f"{name}.{key} must be a list")
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid section {name!r}: {exc}") from exc


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a JSON object")
    unknown = set(data) - set(_SECTIONS) - {"seed"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        if name in data:
            kwargs[name] = _parse_section(name, cls, data[name])
    if "seed" in data:
        seed = data["seed"]
        if seed is not None and not isinstance(seed, int):
            raise ConfigError(f"seed must be an integer or null, got {seed!r}")
        kwargs["seed"] = seed
    cfg = RunConfig(**kwargs)
    _validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
    return parse_config(data)


def _validate(cfg: RunConfig) -> None:
    out = cfg.output
    bad = [f for f in out.formats if f not in FORMATS and f != "all"]
    if bad:
        raise ConfigError(f"unknown output formats {bad}; allowed: {FORMATS} or 'all'")
    sc = cfg.design_space
    for label, pair in (("d_cs_mm", sc.d_cs_mm), ("r_mm", sc.r_mm)):
        if len(pair) != 2 or pair[0] > pair[1]:
            raise ConfigError(f"design_space.{label} must be [low, high], got {pair}")
    if len(sc.L_mm) != 2:
        raise ConfigError(f"design_space.L_mm must be [low, high|null], got {sc.L_mm}")
    if sc.L_mm[0] <= 0.0:
        raise ConfigError("design_space.L_mm lower bound must be positive")
    if any(int(m) != m for m in sc.m):
        raise ConfigError(f"design_space.m must hold integers, got {sc.m}")
    if cfg.contour.m < 2:
        raise ConfigError(f"contour.m must be at least 2, got {cfg.contour.m}")


def apply_overrides(cfg: RunConfig, command: str, *, out=None, resolution=None,
                    fmt=None, mat=None, seed=None) -> RunConfig:
    """Apply CLI flag overrides on top of the file configuration."""
    if out is not None:
        cfg = replace(cfg, output=replace(cfg.output, directory=str(out)))
    if fmt is not None:
        formats = FORMATS if fmt == "all" else (fmt,)
        cfg = replace(cfg, output=replace(cfg.output, formats=formats))
    if mat is not None:
        cfg = replace(cfg, materials=replace(cfg.materials, cam=mat, roller=mat))
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if resolution is not None:
        if resolution < 1:
            raise ConfigError(f"resolution must be positive, got {resolution}")
        if command == "profile":
            cfg = replace(cfg, profile=replace(cfg.profile, resolution=resolution))
        elif command == "sensitivity":
            cfg = replace(cfg, sensitivity=replace(cfg.sensitivity, samples=resolution))
        elif command == "pareto":
            cfg = replace(cfg, design_space=replace(cfg.design_space,
                                                    resolution=resolution))
        elif command == "contour":
            cfg = replace(cfg, contour=replace(cfg.contour, resolution=resolution))
    return cfg
