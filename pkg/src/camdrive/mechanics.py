"""Performance metrics of a candidate transmission.

Pressure angle over the arc where a cam drives the roller, torque-derived
contact force, Hertz line-contact pressure and overall mechanism size.
Units: mm, N, N*mm, MPa, radians.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    DegenerateContact,
    ForceSingular,
    InfeasibleCamCount,
    InfeasibleProfile,
    InvalidSpec,
    PressureAngleSingular,
)
from .geometry import (
    TAU,
    TransmissionSpec,
    _cam_curvature_radius_arr,
    driving_window,
    extended_angle,
    pitch_curvature,
)

SEGMENT_SCAN_SAMPLES = 4096

# fatigue design rule: allowable running pressure is 40% of the static one
FATIGUE_FRACTION = 0.4

HIGH_SPEED_RPM = 50.0


@dataclass(frozen=True)
class Material:
    """Elastic constants and allowable Hertz pressures of a contact body.

    Catalog rows published as ranges keep both bounds; constraint checks use
    the upper bound. E in MPa, pressures in MPa.
    """

    name: str
    E: float
    nu: float
    p_stat: tuple[float, float]
    p_allow: tuple[float, float]

    def __post_init__(self):
        if self.E <= 0.0:
            raise InvalidSpec(f"Young modulus must be positive, got {self.E}")
        if not 0.0 <= self.nu < 0.5:
            raise InvalidSpec(f"Poisson ratio must lie in [0, 0.5), got {self.nu}")

    @property
    def P_stat(self) -> float:
        """Allowable static pressure, upper bound of the published range."""
        return self.p_stat[1]

    @property
    def P_allow(self) -> float:
        """Allowable fatigue pressure, upper bound of the published range."""
        return self.p_allow[1]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "young_modulus_mpa": self.E,
            "poisson_ratio": self.nu,
            "static_pressure_mpa": list(self.p_stat),
            "allowable_pressure_mpa": list(self.p_allow),
        }


def _as_range(value) -> tuple[float, float]:
    if isinstance(value, (tuple, list)):
        lo, hi = float(value[0]), float(value[1])
    else:
        lo = hi = float(value)
    if lo > hi:
        lo, hi = hi, lo
    return lo, hi


def material(name, E, nu, p_stat, p_allow=None) -> Material:
    """Build a Material; p_allow defaults to the 40% fatigue rule."""
    stat = _as_range(p_stat)
    if p_allow is None:
        allow = (FATIGUE_FRACTION * stat[0], FATIGUE_FRACTION * stat[1])
    else:
        allow = _as_range(p_allow)
    return Material(name=name, E=E, nu=nu, p_stat=stat, p_allow=allow)


def builtin_materials() -> tuple[Material, ...]:
    """Catalog of allowable contact pressures for common cam/roller stock.

    Elastic constants are standard handbook values; the pressure columns are
    the published static and 40%-fatigue allowables.
    """
    return (
        material("stainless steel", 193000.0, 0.30, 650.0, 260.0),
        material("improved steel", 210000.0, 0.30, (1600.0, 2000.0), (640.0, 800.0)),
        material("grey cast iron", 110000.0, 0.26, (400.0, 700.0), (160.0, 280.0)),
        material("aluminum", 70000.0, 0.33, 62.5, (25.0, 150.0)),
        material("polyamide", 3000.0, 0.40, 25.0, 10.0),
    )


def find_material(name: str, catalog=None) -> Material:
    catalog = builtin_materials() if catalog is None else catalog
    key = name.strip().lower()
    for mat in catalog:
        if mat.name.lower() == key:
            return mat
    known = ", ".join(m.name for m in catalog)
    raise ConfigError(f"unknown material {name!r}; known: {known}")


_MATERIAL_KEYS = {"name", "young_modulus_mpa", "poisson_ratio",
                  "static_pressure_mpa", "allowable_pressure_mpa"}


def load_materials(path) -> tuple[Material, ...]:
    """Load a material catalog from a JSON file (same schema as the builtin).

    The file holds a list of objects with keys name, young_modulus_mpa,
    poisson_ratio, static_pressure_mpa and optionally allowable_pressure_mpa
    (scalar or [low, high]); unknown keys are rejected.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ConfigError(f"material catalog must be a JSON list, got {type(raw).__name__}")
    out = []
    for i, row in enumerate(raw):
        if not isinstance(row, dict):
            raise ConfigError(f"material row {i} is not an object")
        unknown = set(row) - _MATERIAL_KEYS
        if unknown:
            raise ConfigError(f"material row {i} has unknown keys: {sorted(unknown)}")
        for req in ("name", "young_modulus_mpa", "poisson_ratio", "static_pressure_mpa"):
            if req not in row:
                raise ConfigError(f"material row {i} is missing {req!r}")
        out.append(material(
            row["name"], float(row["young_modulus_mpa"]), float(row["poisson_ratio"]),
            row["static_pressure_mpa"], row.get("allowable_pressure_mpa"),
        ))
    return tuple(out)


@dataclass(frozen=True)
class LoadCase:
    """Input torque on the camshaft, N*mm; optional cam speed for advisories."""

    torque: float
    speed_rpm: float | None = None

    def __post_init__(self):
        if self.torque <= 0.0:
            raise InvalidSpec(f"torque must be positive, got {self.torque}")

    @property
    def high_speed(self) -> bool:
        """Above this speed a pressure angle under 30 degrees is recommended."""
        return self.speed_rpm is not None and self.speed_rpm > HIGH_SPEED_RPM


@dataclass(frozen=True)
class ActiveSegment:
    """Arc of cam rotation during which one conjugate cam drives the follower."""

    psi_start: float
    psi_end: float

    @property
    def length(self) -> float:
        return self.psi_end - self.psi_start

    def grid(self, samples: int = SEGMENT_SCAN_SAMPLES) -> np.ndarray:
        return np.linspace(self.psi_start, self.psi_end, samples)


def active_segment(spec: TransmissionSpec, delta: float) -> ActiveSegment:
    """Driving arc of one cam among m conjugates, right-anchored at 2*pi/n - delta.

    Both the pressure angle and the Hertz pressure peak at its left end; for
    m = 2 that end is pi/n - delta.
    """
    if spec.m < 2:
        raise InfeasibleCamCount(
            f"a single cam cannot drive the follower positively (m={spec.m})")
    a, b = driving_window(spec, delta)
    return ActiveSegment(a, b)


def pressure_angle(psi, eta, n: int = 1):
    """Signed pressure angle, radians.

    The angle between the contact normal and the follower velocity; its sign
    tells which way the cam pushes, magnitude is what design limits cap.
    """
    denom = n * psi - math.pi
    if abs(denom) < 1e-12:
        raise PressureAngleSingular(
            f"pressure angle is +/-90 degrees at n*psi = pi (psi={psi!r})")
    return math.atan(n * (1.0 - TAU * eta) / denom)


def pressure_angle_series(psi, eta, n: int = 1) -> np.ndarray:
    """Vectorised signed pressure angle; no guard at the mid-stroke pole."""
    psi = np.asarray(psi, dtype=float)
    return np.arctan(n * (1.0 - TAU * eta) / (n * psi - math.pi))


def max_pressure_angle(spec: TransmissionSpec) -> float:
    """Largest |pressure angle| on the active segment, radians.

    Found by dense scan rather than assumed at an endpoint, although the
    monotone angle always puts it there.
    """
    delta = extended_angle(spec)
    seg = active_segment(spec, delta)
    mus = pressure_angle_series(seg.grid(), spec.eta, spec.n)
    return float(np.abs(mus).max())


def contact_force(psi, load: LoadCase, spec: TransmissionSpec) -> float:
    """Normal contact force, N, from the power balance at constant ratio.

    The follower-axis component F*cos(mu) carries the axial load
    2*pi*C_t/p implied by the transmission ratio p/(2*pi).
    """
    mu = pressure_angle(psi, spec.eta, spec.n)
    c = math.cos(mu)
    if c < 1e-9:
        raise ForceSingular("contact force diverges as |mu| approaches 90 degrees")
    return TAU * load.torque / (spec.p * c)


def material_coefficient(mat: Material) -> float:
    """Hertz compliance coefficient (1 - nu^2)/(pi*E), 1/MPa."""
    return (1.0 - mat.nu ** 2) / (math.pi * mat.E)


def equivalent_radius(r, rho_c) -> float:
    """Harmonic combination r*rho_c/(r + rho_c) of the two contact radii, mm."""
    if rho_c <= -r:
        raise DegenerateContact(
            f"cam curvature radius {rho_c!r} at or below -r ({-r!r})")
    if r + rho_c == 0.0:
        raise DegenerateContact("r + rho_c vanishes")
    return r * rho_c / (r + rho_c)


def hertz_band_width(F, K1, K2, R_equ, L) -> float:
    """Half-plane contact band width B, mm, for a line contact under load F."""
    if F < 0.0:
        raise InvalidSpec(f"load must be non-negative, got {F}")
    if L <= 0.0 or R_equ <= 0.0:
        raise InvalidSpec(f"need L > 0 and R_equ > 0, got L={L}, R_equ={R_equ}")
    return math.sqrt(16.0 * F * (K1 + K2) * R_equ / L)


def hertz_pressure(F, L, B) -> float:
    """Peak line-contact pressure 4F/(L*pi*B), MPa; zero load gives zero."""
    if F == 0.0:
        return 0.0
    if L <= 0.0 or B <= 0.0:
        raise InvalidSpec(f"need L > 0 and B > 0, got L={L}, B={B}")
    return 4.0 * F / (L * math.pi * B)


def hertz_pressure_series(psi: np.ndarray, spec: TransmissionSpec, load: LoadCase,
                          cam_mat: Material, roller_mat: Material) -> np.ndarray:
    """Hertz pressure at each psi; NaN where the profile radius is non-positive."""
    psi = np.asarray(psi, dtype=float)
    mu = pressure_angle_series(psi, spec.eta, spec.n)
    F = TAU * load.torque / (spec.p * np.cos(mu))
    kp = pitch_curvature(psi, spec.p, spec.eta)
    rho_c = _cam_curvature_radius_arr(kp, spec.r)
    K = material_coefficient(cam_mat) + material_coefficient(roller_mat)
    with np.errstate(divide="ignore", invalid="ignore"):
        R = spec.r * rho_c / (spec.r + rho_c)
        P = (1.0 / math.pi) * np.sqrt(F / (spec.L * K * R))
    return np.where(rho_c > 0.0, P, np.nan)


def max_hertz_pressure(spec: TransmissionSpec, load: LoadCase,
                       cam_mat: Material, roller_mat: Material,
                       samples: int = SEGMENT_SCAN_SAMPLES) -> tuple[float, float]:
    """Peak Hertz pressure on the active segment and the angle where it occurs.

    Whenever the profile curvature radius grows monotonically across the
    segment the peak sits exactly at the segment start (pi/n - delta for two
    conjugate cams). For small closure angles the radius can dip inside the
    segment instead, which pulls the peak slightly in; the dense scan finds it
    either way. Raises InfeasibleProfile if the curvature radius is
    non-positive anywhere on the segment.
    """
    delta = extended_angle(spec)
    seg = active_segment(spec, delta)
    psis = seg.grid(samples)
    P = hertz_pressure_series(psis, spec, load, cam_mat, roller_mat)
    if np.isnan(P).any():
        raise InfeasibleProfile(
            "cam curvature radius is non-positive on the driving arc; "
            "the Hertz model does not apply")
    i = int(np.argmax(P))
    return float(P[i]), float(psis[i])


def mechanism_size(m: int, L: float) -> float:
    """Axial size of the mechanism: m cams of width L, mm."""
    if m < 2:
        raise InfeasibleCamCount(
            f"a single cam cannot drive the follower positively (m={m})")
    if L <= 0.0:
        raise InvalidSpec(f"contact width must be positive, got {L}")
    return m * L
