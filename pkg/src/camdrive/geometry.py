"""Cam profile, pitch curve and curvature geometry.

The mechanism converts a uniform camshaft rotation into a uniform follower
translation through pure-rolling contact between conjugate cams and rollers.
Angles are in radians, lengths in millimetres, curvatures in 1/mm.

All functions are pure; profile points and curvatures accept numpy arrays
for the rotation angle and broadcast elementwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EtaSingular, InvalidSpec, NoRootFound, RollerBlocksCam

TAU = 2.0 * math.pi

# eta within this distance of 1/(2*pi) makes the coefficient equations blow up
ETA_SINGULAR_TOL = 1e-9

# closure-angle root find: scan subdivisions on [-pi, 0), then bisection width
ROOT_SCAN_NODES = 1025
ROOT_BISECT_TOL = 1e-12

DEFAULT_PROFILE_RESOLUTION = 2048
MIN_PROFILE_RESOLUTION = 16


@dataclass(frozen=True)
class TransmissionSpec:
    """One candidate transmission.

    p    pitch (follower travel per cam turn), mm
    eta  eccentricity ratio e/p, dimensionless
    r    roller radius, mm
    n    lobes per cam
    m    conjugate cams on the camshaft
    L    cam/roller contact width, mm
    """

    p: float
    eta: float
    r: float
    n: int = 1
    m: int = 2
    L: float = 10.0

    def __post_init__(self):
        if self.p <= 0.0:
            raise InvalidSpec(f"pitch must be positive, got {self.p}")
        if self.r <= 0.0:
            raise InvalidSpec(f"roller radius must be positive, got {self.r}")
        if self.L <= 0.0:
            raise InvalidSpec(f"contact width must be positive, got {self.L}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidSpec(f"lobe count must be a positive integer, got {self.n}")
        if int(self.m) != self.m or self.m < 1:
            raise InvalidSpec(f"cam count must be a positive integer, got {self.m}")
        if self.e <= self.r:
            raise InvalidSpec(
                f"eccentricity e={self.e:.6g} must exceed roller radius r={self.r:.6g} "
                "(camshaft diameter would be non-positive)"
            )

    @property
    def e(self) -> float:
        """Eccentricity: distance from cam axis to the roller-centre line, mm."""
        return self.eta * self.p

    @property
    def d_cs(self) -> float:
        """Camshaft diameter, twice the radial clearance e - r, mm."""
        return 2.0 * (self.e - self.r)


@dataclass(frozen=True)
class FeasibilityReport:
    """Feasibility and convexity classification of one spec.

    Infeasibility is data, not an error: every spec gets a report.
    """

    eta_valid: bool
    profile_feasible: bool
    fully_convex: bool
    blocking: bool
    delta: float | None = None
    psi_min: float | None = None
    rho_c_min: float | None = None
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.eta_valid and self.profile_feasible and not self.blocking


@dataclass(frozen=True)
class CamProfile:
    """Sampled cam profile and pitch curve over one closed lobe.

    psi spans [delta, 2*pi - delta] inclusive; the profile ordinate v_c
    vanishes at both ends, which is what closes the curve.
    """

    spec: TransmissionSpec
    delta: float
    psi: np.ndarray = field(repr=False)
    u_c: np.ndarray = field(repr=False)
    v_c: np.ndarray = field(repr=False)
    u_p: np.ndarray = field(repr=False)
    v_p: np.ndarray = field(repr=False)
    kappa_p: np.ndarray = field(repr=False)
    rho_c: np.ndarray = field(repr=False)

    @property
    def resolution(self) -> int:
        return len(self.psi)

    def rows(self):
        """Yield per-sample tuples (psi, u_c, v_c, u_p, v_p, kappa_p, rho_c)."""
        yield from zip(self.psi, self.u_c, self.v_c, self.u_p, self.v_p,
                       self.kappa_p, self.rho_c)


def follower_displacement(psi, p):
    """Follower position for cam angle psi; rises by exactly p per turn."""
    return p * psi / TAU - p / 2.0


def _check_eta(eta):
    if abs(TAU * eta - 1.0) < ETA_SINGULAR_TOL:
        raise EtaSingular(
            f"eta={eta!r} is within {ETA_SINGULAR_TOL} of 1/(2*pi); "
            "profile coefficients are singular there"
        )


def profile_coefficients(psi, p, eta):
    """Polar-form coefficients (b1, b2, delta_angle) of the contact point.

    b2 is non-negative and delta_angle uses the principal arctangent branch,
    so the sign of (2*pi*eta - 1) is carried by the angle's argument.
    """
    _check_eta(eta)
    q = TAU * eta - 1.0
    w = np.asarray(psi, dtype=float) - math.pi
    b1 = p / TAU
    b2 = b1 * np.hypot(q, w)
    delta_angle = np.arctan(w / q)
    if np.ndim(psi) == 0:
        return b1, float(b2), float(delta_angle)
    return b1, b2, delta_angle


def cam_profile_point(psi, spec: TransmissionSpec):
    """Contact point C in the cam-fixed frame: (u_c, v_c), mm."""
    b1, b2, d = profile_coefficients(psi, spec.p, spec.eta)
    u_c = b1 * np.cos(psi) + (b2 - spec.r) * np.cos(d - psi)
    v_c = -b1 * np.sin(psi) + (b2 - spec.r) * np.sin(d - psi)
    return u_c, v_c


def pitch_curve_point(psi, spec: TransmissionSpec):
    """Roller-centre trajectory in the cam-fixed frame: (u_p, v_p), mm."""
    s = follower_displacement(psi, spec.p)
    u_p = spec.e * np.cos(psi) + s * np.sin(psi)
    v_p = -spec.e * np.sin(psi) + s * np.cos(psi)
    return u_p, v_p


def pitch_curvature(psi, p, eta):
    """Analytic curvature of the pitch curve, 1/mm.

    Sign convention: positive where the profile is locally convex on the
    driving side; at mid-stroke (psi = pi) the value is negative whenever
    eta < 1/pi, which is the non-convex nose of the cam.
    """
    _check_eta(eta)
    q = TAU * eta - 1.0
    w = psi - math.pi
    num = w * w + 2.0 * q * (math.pi * eta - 1.0)
    den = (w * w + q * q) ** 1.5
    return (TAU / p) * num / den


def cam_curvature(kappa_p, r):
    """Cam-profile curvature from pitch curvature: offset by the roller radius.

    Satisfies rho_p = rho_c + r for the signed curvature radii.
    """
    denom = 1.0 - r * kappa_p
    if abs(denom) < 1e-9:
        raise RollerBlocksCam(
            f"1 - r*kappa_p = {denom:.3e}: curvature radius of the cam passes "
            "through zero (roller radius equals the pitch radius of curvature)"
        )
    return kappa_p / denom


def _cam_curvature_radius_arr(kappa_p: np.ndarray, r: float) -> np.ndarray:
    """Vectorised signed rho_c = (1 - r*kappa_p)/kappa_p; +/-inf at kappa_p=0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return (1.0 - r * kappa_p) / kappa_p


def _vc_scalar(psi: float, b1: float, q: float, r: float) -> float:
    w = psi - math.pi
    b2 = b1 * math.hypot(q, w)
    d = math.atan(w / q)
    return -b1 * math.sin(psi) + (b2 - r) * math.sin(d - psi)


def extended_angle(spec: TransmissionSpec) -> float:
    """Negative root of v_c(psi) = 0 nearest zero: the profile closure angle.

    A sign scan over [-pi, 0) brackets the root, bisection polishes it to
    1e-12; bisection is unconditionally convergent on the smooth v_c.
    """
    _check_eta(spec.eta)
    b1 = spec.p / TAU
    q = TAU * spec.eta - 1.0
    nodes = np.linspace(-math.pi, 0.0, ROOT_SCAN_NODES)
    w = nodes - math.pi
    b2 = b1 * np.sqrt(q * q + w * w)
    d = np.arctan(w / q)
    vals = -b1 * np.sin(nodes) + (b2 - spec.r) * np.sin(d - nodes)
    prod = vals[:-1] * vals[1:]
    change = np.flatnonzero(prod <= 0.0)
    if change.size == 0:
        raise NoRootFound(
            f"v_c has no sign change on [-pi, 0) for p={spec.p}, eta={spec.eta}, "
            f"r={spec.r}: the profile does not close"
        )
    i = int(change[-1])  # nearest zero
    a, b = float(nodes[i]), float(nodes[i + 1])
    fa = _vc_scalar(a, b1, q, spec.r)
    if fa == 0.0:
        return a
    while b - a > ROOT_BISECT_TOL:
        mid = 0.5 * (a + b)
        fm = _vc_scalar(mid, b1, q, spec.r)
        if fm == 0.0:
            return mid
        if fa * fm < 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def driving_window(spec: TransmissionSpec, delta: float) -> tuple[float, float]:
    """Rotation arc over which this cam drives the roller.

    Right-anchored at 2*pi/n - delta with length 2*pi/(n*m), so the
    maximum-pressure end pi/n - delta is the left endpoint when m = 2.
    """
    end = TAU / spec.n - delta
    return end - TAU / (spec.n * spec.m), end


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, a, b, tol=1e-10):
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def min_profile_radius(spec: TransmissionSpec, samples: int = 4096) -> tuple[float, float]:
    """Angle and value of the smallest cam curvature radius on the driving arc.

    Grid minimum refined by golden section; no usable closed form exists for
    this angle, so the location is always found numerically. For two
    conjugate cams with a monotone radius the minimum sits at the arc start.
    """
    delta = extended_angle(spec)
    a, b = driving_window(spec, delta)
    psis = np.linspace(a, b, samples)
    kp = pitch_curvature(psis, spec.p, spec.eta)
    rho = _cam_curvature_radius_arr(kp, spec.r)
    i = int(np.argmin(rho))

    def rho_at(x):
        return float(_cam_curvature_radius_arr(
            np.asarray(pitch_curvature(x, spec.p, spec.eta)), spec.r))

    lo = psis[max(i - 1, 0)]
    hi = psis[min(i + 1, samples - 1)]
    psi_min, rho_min = _golden_min(rho_at, float(lo), float(hi))
    # golden section cannot leave the bracket, but the grid node may be better
    if rho[i] < rho_min:
        psi_min, rho_min = float(psis[i]), float(rho[i])
    return psi_min, rho_min


BLOCKING_REL_TOL = 1e-6


def feasibility_check(spec: TransmissionSpec) -> FeasibilityReport:
    """Classify a spec: eta validity, driving-arc feasibility, convexity.

    Never raises; every failure mode is reported as flags plus a note.
    """
    q = TAU * spec.eta - 1.0
    if q < ETA_SINGULAR_TOL:
        return FeasibilityReport(
            eta_valid=False, profile_feasible=False, fully_convex=False,
            blocking=False,
            notes=("eta must exceed 1/(2*pi) ~= 0.15915 for a valid profile",),
        )
    fully_convex = math.pi * spec.eta - 1.0 > 0.0
    try:
        delta = extended_angle(spec)
    except NoRootFound:
        return FeasibilityReport(
            eta_valid=True, profile_feasible=False, fully_convex=fully_convex,
            blocking=False, notes=("profile does not close: no root of v_c on [-pi, 0)",),
        )
    psi_min, rho_min = min_profile_radius(spec)
    blocking = abs(rho_min) <= BLOCKING_REL_TOL * spec.r
    feasible = rho_min > 0.0 and not blocking
    notes = ()
    if blocking:
        notes = ("cam curvature radius vanishes on the driving arc: roller blocks the cam",)
    elif not feasible:
        notes = ("cam curvature radius is negative on the driving arc",)
    return FeasibilityReport(
        eta_valid=True, profile_feasible=feasible, fully_convex=fully_convex,
        blocking=blocking, delta=delta, psi_min=psi_min, rho_c_min=rho_min,
        notes=notes,
    )


def sample_profile(spec: TransmissionSpec,
                   resolution: int = DEFAULT_PROFILE_RESOLUTION) -> CamProfile:
    """Sample profile, pitch curve and curvatures on a uniform psi grid.

    The grid spans [delta, 2*pi - delta] inclusive, so the first and last
    samples sit on the closure (v_c = 0 there up to root tolerance).
    """
    if resolution < MIN_PROFILE_RESOLUTION:
        raise InvalidSpec(
            f"resolution must be at least {MIN_PROFILE_RESOLUTION}, got {resolution}")
    delta = extended_angle(spec)
    psi = np.linspace(delta, TAU - delta, resolution)
    u_c, v_c = cam_profile_point(psi, spec)
    u_p, v_p = pitch_curve_point(psi, spec)
    kappa_p = pitch_curvature(psi, spec.p, spec.eta)
    rho_c = _cam_curvature_radius_arr(kappa_p, spec.r)
    for arr in (psi, u_c, v_c, u_p, v_p, kappa_p, rho_c):
        arr.setflags(write=False)
    return CamProfile(spec=spec, delta=delta, psi=psi, u_c=u_c, v_c=v_c,
                      u_p=u_p, v_p=v_p, kappa_p=kappa_p, rho_c=rho_c)
