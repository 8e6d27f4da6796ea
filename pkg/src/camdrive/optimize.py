"""Constrained three-objective design-space exploration.

Design vector x = [d_cs, r, L, m]; objectives (mu_max, P_max, S_M) are all
minimised subject to caps on each. The search is an exhaustive grid: the
evaluations are cheap, deterministic and oracle-checkable, and the space has
only three continuous axes plus the cam count.
"""
from __future__ import annotations

import bisect
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InfeasibleCamCount,
    InvalidSpec,
    ModelError,
)
from .geometry import (
    ETA_SINGULAR_TOL,
    ROOT_SCAN_NODES,
    TAU,
    TransmissionSpec,
    extended_angle,
    feasibility_check,
)
from .mechanics import (
    LoadCase,
    Material,
    find_material,
    material_coefficient,
    max_hertz_pressure,
    max_pressure_angle,
    mechanism_size,
)

_DEFAULT_STEEL = find_material("improved steel")

SCAN_SAMPLES = 4096
_PAIR_CHUNK = 256

VIOLATION_GEOMETRY = "geometry"
VIOLATION_PRESSURE_ANGLE = "pressure-angle"
VIOLATION_HERTZ = "hertz-pressure"
VIOLATION_SIZE = "size"


def eta_from_design(d_cs: float, r: float, pitch: float) -> float:
    """Eccentricity ratio from the design variables: e = r + d_cs/2."""
    return (r + d_cs / 2.0) / pitch


@dataclass(frozen=True)
class DesignSpace:
    """Bounds, context and caps of the design study.

    L upper bound of None means the size cap divided by the cam count, which
    is also always enforced. The d_cs lower bound of zero is kept in the grid
    even though that first column is geometrically infeasible (e = r); those
    candidates come back flagged, not dropped.
    """

    d_cs_range: tuple[float, float] = (0.0, 30.0)
    r_range: tuple[float, float] = (4.0, 10.5)
    L_range: tuple[float, float | None] = (1.0, None)
    m_values: tuple[int, ...] = (2, 3)
    resolution: int = 64
    pitch: float = 20.0
    lobes: int = 1
    load: LoadCase = LoadCase(1200.0)
    cam_material: Material = _DEFAULT_STEEL
    roller_material: Material = _DEFAULT_STEEL
    mu_cap: float = math.radians(30.0)
    P_cap: float = 800.0
    S_cap: float = 90.0
    scan_samples: int = SCAN_SAMPLES
    workers: int = 1

    def L_bounds(self, m: int) -> tuple[float, float]:
        lo, hi = self.L_range
        cap = self.S_cap / m
        return lo, cap if hi is None else min(hi, cap)

    def axes(self, m: int):
        d = np.linspace(self.d_cs_range[0], self.d_cs_range[1], self.resolution)
        r = np.linspace(self.r_range[0], self.r_range[1], self.resolution)
        lo, hi = self.L_bounds(m)
        L = np.linspace(lo, hi, self.resolution)
        return d, r, L

    def to_dict(self) -> dict:
        return {
            "d_cs_mm": list(self.d_cs_range),
            "r_mm": list(self.r_range),
            "L_mm": [self.L_range[0], self.L_range[1]],
            "m": list(self.m_values),
            "resolution": self.resolution,
            "pitch_mm": self.pitch,
            "lobes": self.lobes,
            "torque_nmm": self.load.torque,
            "cam_material": self.cam_material.name,
            "roller_material": self.roller_material.name,
            "mu_cap_deg": math.degrees(self.mu_cap),
            "p_cap_mpa": self.P_cap,
            "s_cap_mm": self.S_cap,
            "scan_samples": self.scan_samples,
            "workers": self.workers,
        }


@dataclass(frozen=True)
class DesignCandidate:
    """One evaluated design with objectives and a feasibility verdict."""

    d_cs: float
    r: float
    L: float
    m: int
    mu_max: float  # rad; NaN when geometry failed
    P_max: float   # MPa; NaN when geometry failed
    S_M: float     # mm
    feasible: bool
    violations: tuple[str, ...] = ()
    convex_profile: bool = False

    @property
    def x(self) -> tuple[float, float, float, int]:
        return (self.d_cs, self.r, self.L, self.m)

    @property
    def objectives(self) -> tuple[float, float, float]:
        return (self.mu_max, self.P_max, self.S_M)


def evaluate_candidate(x, space: DesignSpace) -> DesignCandidate:
    """Evaluate one design vector; infeasibility comes back as flags.

    The scalar model path is used (profile closure, segment scans), so this is
    the reference evaluation the vectorised sweep must agree with.
    """
    d_cs, r, L, m = float(x[0]), float(x[1]), float(x[2]), int(x[3])
    eta = eta_from_design(d_cs, r, space.pitch)
    violations: list[str] = []
    mu_max = P_max = float("nan")
    convex = math.pi * eta > 1.0
    S_M = m * L
    spec = None
    if m < 2:
        violations.append(VIOLATION_GEOMETRY)
    else:
        try:
            spec = TransmissionSpec(p=space.pitch, eta=eta, r=r, n=space.lobes,
                                    m=m, L=L)
        except InvalidSpec:
            violations.append(VIOLATION_GEOMETRY)
    if spec is not None:
        report = feasibility_check(spec)
        if not report.ok:
            violations.append(VIOLATION_GEOMETRY)
        else:
            mu_max = max_pressure_angle(spec)
            try:
                P_max, _ = max_hertz_pressure(
                    spec, space.load, space.cam_material, space.roller_material,
                    samples=space.scan_samples)
            except ModelError:
                violations.append(VIOLATION_GEOMETRY)
    if not math.isnan(mu_max) and mu_max > space.mu_cap:
        violations.append(VIOLATION_PRESSURE_ANGLE)
    if not math.isnan(P_max) and P_max > space.P_cap:
        violations.append(VIOLATION_HERTZ)
    if S_M > space.S_cap:
        violations.append(VIOLATION_SIZE)
    ordered = tuple(dict.fromkeys(violations))
    return DesignCandidate(
        d_cs=d_cs, r=r, L=L, m=m, mu_max=mu_max, P_max=P_max, S_M=S_M,
        feasible=not ordered, violations=ordered, convex_profile=convex,
    )


def dominates(a: DesignCandidate, b: DesignCandidate) -> bool:
    """True iff a is no worse in all three objectives and better in one."""
    ao, bo = a.objectives, b.objectives
    return all(x <= y for x, y in zip(ao, bo)) and any(x < y for x, y in zip(ao, bo))


def nondominated_mask(objectives) -> np.ndarray:
    """Boolean mask of the maximal nondominated subset (minimisation).

    Accepts an (N, 2) or (N, 3) array. Equal rows are all retained. Sort-based
    staircase filter, O(N log N); the brute-force O(N^2) filter is kept in the
    test suite as its oracle.
    """
    F = np.asarray(objectives, dtype=float)
    if F.ndim != 2 or F.shape[1] not in (2, 3):
        raise InvalidSpec(f"objectives must be (N, 2) or (N, 3), got {F.shape}")
    n = len(F)
    if n == 0:
        return np.zeros(0, dtype=bool)
    if not np.isfinite(F).all():
        raise InvalidSpec("objectives must be finite to compare designs")
    if F.shape[1] == 2:
        F = np.column_stack([F, np.zeros(n)])
    uniq, inv = np.unique(F, axis=0, return_inverse=True)
    inv = np.asarray(inv).reshape(-1)
    keep = np.ones(len(uniq), dtype=bool)
    xs: list[float] = []  # staircase envelope over earlier f0 groups
    ys: list[float] = []

    def covered(f1: float, f2: float) -> bool:
        i = bisect.bisect_right(xs, f1) - 1
        return i >= 0 and ys[i] <= f2

    def insert(f1: float, f2: float) -> None:
        j = bisect.bisect_left(xs, f1)
        left = ys[j - 1] if j > 0 else math.inf
        if f2 >= left:
            return
        k = j
        while k < len(xs) and ys[k] >= f2:
            k += 1
        xs[j:k] = [f1]
        ys[j:k] = [f2]

    i = 0
    u = len(uniq)
    while i < u:
        j = i
        f0 = uniq[i, 0]
        while j < u and uniq[j, 0] == f0:
            j += 1
        group = range(i, j)
        for g in group:
            if covered(uniq[g, 1], uniq[g, 2]):
                keep[g] = False
        best = math.inf
        for g in group:  # lex order within group: f1 asc, f2 asc
            if keep[g] and uniq[g, 2] >= best:
                keep[g] = False
            best = min(best, uniq[g, 2])
        for g in group:
            if keep[g]:
                insert(uniq[g, 1], uniq[g, 2])
        i = j
    return keep[inv]


def _candidate_sort_key(c: DesignCandidate):
    return (c.mu_max, c.P_max, c.S_M, c.m, c.d_cs, c.r, c.L)


def pareto_front(candidates) -> list[DesignCandidate]:
    """Maximal set of feasible, mutually nondominated candidates.

    Output is ordered lexicographically by objectives so identical inputs
    always serialise identically.
    """
    feas = [c for c in candidates if c.feasible]
    if not feas:
        return []
    mask = nondominated_mask(np.array([c.objectives for c in feas]))
    return sorted((c for c, k in zip(feas, mask) if k), key=_candidate_sort_key)


# --- vectorised grid evaluation ------------------------------------------

def _closure_angles(pitch: float, eta: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Vectorised closure-angle root find; NaN where no bracket exists."""
    b1 = pitch / TAU
    q = TAU * eta - 1.0
    nodes = np.linspace(-math.pi, 0.0, ROOT_SCAN_NODES)
    w = nodes[None, :] - math.pi
    b2 = b1 * np.sqrt(q[:, None] ** 2 + w ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        dang = np.arctan(w / q[:, None])
    V = -b1 * np.sin(nodes)[None, :] + (b2 - r[:, None]) * np.sin(dang - nodes[None, :])
    change = V[:, :-1] * V[:, 1:] <= 0.0
    has = change.any(axis=1)
    # rightmost bracket = root nearest zero
    idx = change.shape[1] - 1 - np.argmax(change[:, ::-1], axis=1)
    idx = np.where(has, idx, 0)
    lo = nodes[idx]
    hi = nodes[idx + 1]

    def vc(psi):
        ww = psi - math.pi
        bb2 = b1 * np.sqrt(q * q + ww * ww)
        dd = np.arctan(ww / q)
        return -b1 * np.sin(psi) + (bb2 - r) * np.sin(dd - psi)

    flo = vc(lo)
    for _ in range(52):
        mid = 0.5 * (lo + hi)
        fm = vc(mid)
        sel = flo * fm <= 0.0
        hi = np.where(sel, mid, hi)
        lo = np.where(sel, lo, mid)
        flo = np.where(sel, flo, fm)
    return np.where(has, 0.5 * (lo + hi), np.nan)


def _scan_pairs(args):
    """Per-(eta, r) segment scan: mu_max, unit-width peak pressure, min radius.

    Unit-width means evaluated at L = 1 mm; the true pressure is that value
    divided by sqrt(L), which lets one scan serve the whole L axis.
    """
    pitch, torque, K_sum, n, m, samples, eta, r = args
    delta = _closure_angles(pitch, eta, r)
    end = TAU / n - delta
    start = end - TAU / (n * m)
    t = np.linspace(0.0, 1.0, samples)
    psi = start[:, None] + t[None, :] * (end - start)[:, None]
    q = TAU * eta[:, None] - 1.0
    w = psi - math.pi
    mu = np.arctan(-n * q / (n * psi - math.pi))
    F = TAU * torque / (pitch * np.cos(mu))
    num = w * w + 2.0 * q * (math.pi * eta[:, None] - 1.0)
    den = (w * w + q * q) ** 1.5
    kp = (TAU / pitch) * num / den
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = (1.0 - r[:, None] * kp) / kp
        R = r[:, None] * rho / (r[:, None] + rho)
        P_unit = (1.0 / math.pi) * np.sqrt(F / (K_sum * R))
    mu_max = np.abs(mu).max(axis=1)
    rho_min = rho.min(axis=1)
    ok = np.isfinite(delta) & (rho_min > 0.0)
    P_unit = np.where(rho > 0.0, P_unit, np.nan)
    P_unit_max = np.where(ok, np.nanmax(np.where(np.isnan(P_unit), -np.inf, P_unit),
                                        axis=1), np.nan)
    arg = np.argmax(np.where(np.isnan(P_unit), -np.inf, P_unit), axis=1)
    psi_at = psi[np.arange(len(eta)), arg]
    return delta, mu_max, P_unit_max, rho_min, ok, psi_at


def _pair_metrics(space: DesignSpace, m: int, eta: np.ndarray, r: np.ndarray):
    chunks = []
    for s in range(0, len(eta), _PAIR_CHUNK):
        chunks.append((space.pitch, space.load.torque,
                       material_coefficient(space.cam_material)
                       + material_coefficient(space.roller_material),
                       space.lobes, m, space.scan_samples,
                       eta[s:s + _PAIR_CHUNK], r[s:s + _PAIR_CHUNK]))
    if space.workers > 1:
        with ProcessPoolExecutor(max_workers=space.workers) as pool:
            parts = list(pool.map(_scan_pairs, chunks))
    else:
        parts = [_scan_pairs(c) for c in chunks]
    return [np.concatenate([p[i] for p in parts]) for i in range(6)]


@dataclass(frozen=True)
class GridData:
    """Flattened per-m evaluation of the full (d_cs, r, L) grid."""

    m: int
    d_cs: np.ndarray
    r: np.ndarray
    L: np.ndarray
    mu_max: np.ndarray
    P_max: np.ndarray
    S_M: np.ndarray
    feasible: np.ndarray
    geometry_ok: np.ndarray

    def __len__(self) -> int:
        return len(self.d_cs)

    def objectives(self) -> np.ndarray:
        return np.column_stack([self.mu_max, self.P_max, self.S_M])

    def candidate(self, i: int, space: DesignSpace) -> DesignCandidate:
        violations = []
        if not self.geometry_ok[i]:
            violations.append(VIOLATION_GEOMETRY)
        else:
            if self.mu_max[i] > space.mu_cap:
                violations.append(VIOLATION_PRESSURE_ANGLE)
            if self.P_max[i] > space.P_cap:
                violations.append(VIOLATION_HERTZ)
        if self.S_M[i] > space.S_cap:
            violations.append(VIOLATION_SIZE)
        eta = eta_from_design(self.d_cs[i], self.r[i], space.pitch)
        return DesignCandidate(
            d_cs=float(self.d_cs[i]), r=float(self.r[i]), L=float(self.L[i]),
            m=self.m, mu_max=float(self.mu_max[i]), P_max=float(self.P_max[i]),
            S_M=float(self.S_M[i]), feasible=bool(self.feasible[i]),
            violations=tuple(violations), convex_profile=bool(math.pi * eta > 1.0),
        )


@dataclass(frozen=True)
class SweepResult:
    """Full-grid evaluation with merged and per-m Pareto fronts."""

    space: DesignSpace
    grids: dict = field(repr=False)
    front: list = field(repr=False)
    per_m_fronts: dict = field(repr=False)

    @property
    def evaluated(self) -> int:
        return sum(len(g) for g in self.grids.values())


def _evaluate_grid(space: DesignSpace, m: int) -> GridData:
    d_axis, r_axis, L_axis = space.axes(m)
    D, R = np.meshgrid(d_axis, r_axis, indexing="ij")
    D, R = D.ravel(), R.ravel()
    eta = eta_from_design(D, R, space.pitch)
    pair_valid = (D > 0.0) & (TAU * eta - 1.0 >= ETA_SINGULAR_TOL)
    delta, mu_max, P_unit, rho_min, scan_ok, _ = _pair_metrics(space, m, eta, R)
    geom_pair = pair_valid & scan_ok
    nL = len(L_axis)
    L = np.tile(L_axis, len(D))
    dd = np.repeat(D, nL)
    rr = np.repeat(R, nL)
    mu = np.repeat(mu_max, nL)
    P = np.repeat(P_unit, nL) / np.sqrt(L)
    S = m * L
    geom = np.repeat(geom_pair, nL)
    mu = np.where(geom, mu, np.nan)
    P = np.where(geom, P, np.nan)
    with np.errstate(invalid="ignore"):
        feas = geom & (mu <= space.mu_cap) & (P <= space.P_cap) & (S <= space.S_cap)
    return GridData(m=m, d_cs=dd, r=rr, L=L, mu_max=mu, P_max=P, S_M=S,
                    feasible=feas, geometry_ok=geom)


def sweep(space: DesignSpace) -> SweepResult:
    """Evaluate the full grid for every cam count and extract Pareto fronts.

    The merged front is the front of the union of the per-m fronts, which
    equals the front over all evaluated feasible candidates.
    """
    if space.resolution < 16:
        raise InvalidSpec(f"resolution must be at least 16, got {space.resolution}")
    grids = {}
    per_m_front_idx = {}
    for m in space.m_values:
        if m < 2:
            raise InfeasibleCamCount(f"cam count {m} in the design space")
        g = _evaluate_grid(space, m)
        grids[m] = g
        feas_idx = np.flatnonzero(g.feasible)
        if feas_idx.size:
            mask = nondominated_mask(g.objectives()[feas_idx])
            per_m_front_idx[m] = feas_idx[mask]
        else:
            per_m_front_idx[m] = feas_idx
    per_m_fronts = {
        m: sorted((grids[m].candidate(int(i), space) for i in per_m_front_idx[m]),
                  key=_candidate_sort_key)
        for m in space.m_values
    }
    union = [c for m in space.m_values for c in per_m_fronts[m]]
    front = pareto_front(union)
    return SweepResult(space=space, grids=grids, front=front,
                       per_m_fronts=per_m_fronts)


# --- fixed-size contour slices --------------------------------------------

@dataclass(frozen=True)
class ContourSlice:
    """mu_max and P_max over the (d_cs, r) plane at fixed size and cam count."""

    m: int
    S_M: float
    L: float
    d_axis: np.ndarray
    r_axis: np.ndarray
    mu_grid: np.ndarray       # radians, NaN where geometry fails
    P_grid: np.ndarray        # MPa, NaN where geometry fails
    feasible: np.ndarray      # caps applied
    locus: list               # DesignCandidate list, the 2-objective front
    mu_levels: tuple
    P_levels: tuple
    mu_isolines: dict = field(repr=False)
    P_isolines: dict = field(repr=False)


def marching_squares(x_axis, y_axis, Z, level) -> list:
    """Iso-line segments of Z(x, y) at a level, by linear cell interpolation.

    Z is indexed [i, j] for (x_axis[i], y_axis[j]); cells touching NaN are
    skipped. Returns a list of ((x1, y1), (x2, y2)) segments.
    """
    Z = np.asarray(Z, dtype=float)
    segs = []

    def interp(pa, pb, va, vb):
        t = (level - va) / (vb - va)
        return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))

    for i in range(len(x_axis) - 1):
        for j in range(len(y_axis) - 1):
            corners = (
                ((x_axis[i], y_axis[j]), Z[i, j]),
                ((x_axis[i + 1], y_axis[j]), Z[i + 1, j]),
                ((x_axis[i + 1], y_axis[j + 1]), Z[i + 1, j + 1]),
                ((x_axis[i], y_axis[j + 1]), Z[i, j + 1]),
            )
            vals = [v for _, v in corners]
            if any(math.isnan(v) for v in vals):
                continue
            crossings = []
            for k in range(4):
                (pa, va), (pb, vb) = corners[k], corners[(k + 1) % 4]
                if (va < level) != (vb < level):
                    crossings.append(interp(pa, pb, va, vb))
            if len(crossings) == 2:
                segs.append((crossings[0], crossings[1]))
            elif len(crossings) == 4:  # saddle: pair edges in order
                segs.append((crossings[0], crossings[1]))
                segs.append((crossings[2], crossings[3]))
    return segs


def contour_slice(space: DesignSpace, m: int, S_M: float,
                  resolution: int | None = None,
                  mu_levels_deg=(5.0, 10.0, 15.0, 20.0, 25.0, 30.0),
                  P_levels=(500.0, 550.0, 600.0, 650.0, 700.0, 750.0, 800.0)) -> ContourSlice:
    """Objective contours over (d_cs, r) at fixed mechanism size.

    The locus is the two-objective (mu_max, P_max) Pareto set of the feasible
    grid points in the slice.
    """
    if m < 2:
        raise InfeasibleCamCount(f"cam count {m} in a contour slice")
    L = S_M / m
    lo, hi = space.L_bounds(m)
    if not lo <= L <= hi:
        raise InvalidSpec(
            f"S_M={S_M} gives L={L} outside the allowed range [{lo}, {hi}] for m={m}")
    res = space.resolution if resolution is None else resolution
    d_axis = np.linspace(space.d_cs_range[0], space.d_cs_range[1], res)
    r_axis = np.linspace(space.r_range[0], space.r_range[1], res)
    D, R = np.meshgrid(d_axis, r_axis, indexing="ij")
    D, R = D.ravel(), R.ravel()
    eta = eta_from_design(D, R, space.pitch)
    pair_valid = (D > 0.0) & (TAU * eta - 1.0 >= ETA_SINGULAR_TOL)
    delta, mu_max, P_unit, rho_min, scan_ok, _ = _pair_metrics(space, m, eta, R)
    geom = pair_valid & scan_ok
    mu = np.where(geom, mu_max, np.nan)
    P = np.where(geom, P_unit / math.sqrt(L), np.nan)
    with np.errstate(invalid="ignore"):
        feas = geom & (mu <= space.mu_cap) & (P <= space.P_cap) & (S_M <= space.S_cap)
    locus = []
    idx = np.flatnonzero(feas)
    if idx.size:
        mask = nondominated_mask(np.column_stack([mu[idx], P[idx]]))
        for i in idx[mask]:
            locus.append(DesignCandidate(
                d_cs=float(D[i]), r=float(R[i]), L=L, m=m,
                mu_max=float(mu[i]), P_max=float(P[i]), S_M=S_M, feasible=True,
                violations=(), convex_profile=bool(math.pi * eta[i] > 1.0)))
        locus.sort(key=_candidate_sort_key)
    mu_grid = mu.reshape(res, res)
    P_grid = P.reshape(res, res)
    mu_iso = {lev: marching_squares(d_axis, r_axis, np.degrees(mu_grid), lev)
              for lev in mu_levels_deg}
    P_iso = {lev: marching_squares(d_axis, r_axis, P_grid, lev) for lev in P_levels}
    return ContourSlice(m=m, S_M=S_M, L=L, d_axis=d_axis, r_axis=r_axis,
                        mu_grid=mu_grid, P_grid=P_grid,
                        feasible=feas.reshape(res, res), locus=locus,
                        mu_levels=tuple(mu_levels_deg), P_levels=tuple(P_levels),
                        mu_isolines=mu_iso, P_isolines=P_iso)


# --- front quality ---------------------------------------------------------

def hypervolume(objectives, ref) -> float:
    """Dominated hypervolume of a 3-objective minimisation set w.r.t. ref.

    Points not strictly better than the reference in every coordinate
    contribute nothing. Slicing algorithm, O(n^2 log n): fine for the front
    sizes this package produces.
    """
    F = np.asarray(objectives, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if F.ndim != 2 or F.shape[1] != 3:
        raise InvalidSpec(f"hypervolume needs an (N, 3) array, got {F.shape}")
    F = F[np.all(F < ref, axis=1)]
    if len(F) == 0:
        return 0.0

    def area2d(xy: np.ndarray) -> float:
        mask = nondominated_mask(xy)
        pts = xy[mask]
        order = np.argsort(pts[:, 0], kind="stable")
        pts = pts[order]
        area = 0.0
        y_prev = ref[1]
        for x, y in pts:
            if y < y_prev:
                area += (ref[0] - x) * (y_prev - y)
                y_prev = y
        return area

    zs = np.unique(F[:, 2])
    total = 0.0
    for k, z in enumerate(zs):
        z_next = zs[k + 1] if k + 1 < len(zs) else ref[2]
        active = F[F[:, 2] <= z]
        total += area2d(active[:, :2]) * (z_next - z)
    return float(total)
