"""Command-line entry points and file exporters.

Subcommands: profile, metrics, sensitivity, pareto, contour. Each one reads
an optional JSON config, applies flag overrides, computes and writes CSV /
JSON / SVG artifacts into the output directory.

Exit codes: 0 success, 1 configuration error, 2 infeasible model.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import geometry, mechanics, optimize, sensitivity
from .config import RunConfig, apply_overrides, load_config
from .errors import ConfigError, EtaSingular, InfeasibleCamCount, ModelError
from .svgplot import Canvas, padded_range

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # flag misuse is a config error, exit 1
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="camdrive",
                     description="Cam-roller transmission design studies")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("profile", "sample the cam profile and pitch curve"),
        ("metrics", "pressure angle, Hertz pressure and size of one design"),
        ("sensitivity", "pressure sensitivity to r, eta, p, L"),
        ("pareto", "full design-space sweep and Pareto fronts"),
        ("contour", "objective contours over (d_cs, r) at fixed size"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None,
                       help="JSON run configuration")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (overrides config)")
        p.add_argument("--resolution", type=int, default=None,
                       help="sampling / grid resolution (overrides config)")
        p.add_argument("--format", choices=["csv", "json", "svg", "all"],
                       default=None, help="restrict output formats")
        p.add_argument("--material", default=None,
                       help="use this material for both cam and roller")
        p.add_argument("--seed", type=int, default=None,
                       help="recorded in metadata for randomized harnesses")
    return parser


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return apply_overrides(cfg, args.command, out=args.out,
                           resolution=args.resolution, fmt=args.format,
                           mat=args.material, seed=args.seed)


def _outdir(cfg: RunConfig) -> Path:
    d = Path(cfg.output.directory)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _wants(cfg: RunConfig, fmt: str) -> bool:
    return fmt in cfg.output.formats or "all" in cfg.output.formats


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _meta(cfg: RunConfig) -> dict:
    return {"config": cfg.to_dict(), "config_hash": cfg.content_hash()}


def _print_report(report) -> None:
    print("feasibility report:", file=sys.stderr)
    print(f"  eta_valid        {report.eta_valid}", file=sys.stderr)
    print(f"  profile_feasible {report.profile_feasible}", file=sys.stderr)
    print(f"  fully_convex     {report.fully_convex}", file=sys.stderr)
    print(f"  blocking         {report.blocking}", file=sys.stderr)
    if report.delta is not None:
        print(f"  delta            {report.delta:.6f} rad", file=sys.stderr)
    if report.rho_c_min is not None:
        print(f"  rho_c_min        {report.rho_c_min:.6f} mm", file=sys.stderr)
    for note in report.notes:
        print(f"  note: {note}", file=sys.stderr)


# --- profile ----------------------------------------------------------------

def cmd_profile(cfg: RunConfig) -> int:
    try:
        spec = cfg.spec()
    except ModelError as exc:
        print(f"infeasible mechanism: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    report = geometry.feasibility_check(spec)
    if not report.ok:
        if not report.eta_valid:
            print("infeasible mechanism: eta is at or below the singular value "
                  "1/(2*pi)", file=sys.stderr)
        _print_report(report)
        return EXIT_INFEASIBLE
    try:
        prof = geometry.sample_profile(spec, cfg.profile.resolution)
    except EtaSingular as exc:
        print(f"infeasible mechanism: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = _outdir(cfg)
    if _wants(cfg, "csv"):
        _write_csv(out / "profile.csv",
                   ["psi_rad", "u_c_mm", "v_c_mm", "u_p_mm", "v_p_mm",
                    "kappa_p_per_mm", "rho_c_mm"],
                   prof.rows())
    if _wants(cfg, "json"):
        _write_json(out / "profile.json", {
            **_meta(cfg),
            "delta_rad": prof.delta,
            "resolution": prof.resolution,
            "spec": {"pitch_mm": spec.p, "eta": spec.eta, "roller_radius_mm": spec.r,
                     "lobes": spec.n, "cam_count": spec.m,
                     "contact_width_mm": spec.L, "eccentricity_mm": spec.e,
                     "camshaft_diameter_mm": spec.d_cs},
            "feasibility": {"eta_valid": report.eta_valid,
                            "profile_feasible": report.profile_feasible,
                            "fully_convex": report.fully_convex,
                            "blocking": report.blocking,
                            "rho_c_min_mm": report.rho_c_min,
                            "psi_min_rad": report.psi_min},
        })
    if _wants(cfg, "svg"):
        _profile_svg(out / "profile.svg", prof, spec)
    print(f"profile: delta = {prof.delta:.6f} rad, {prof.resolution} samples -> {out}")
    return EXIT_OK


def _profile_svg(path: Path, prof, spec) -> None:
    all_x = np.concatenate([prof.u_c, prof.u_p])
    all_y = np.concatenate([prof.v_c, prof.v_p])
    lo = min(all_x.min(), all_y.min())
    hi = max(all_x.max(), all_y.max())
    canvas = Canvas(padded_range(lo, hi), padded_range(lo, hi),
                    width=560, height=560, margin=48)
    canvas.axes("u [mm]", "v [mm]")
    canvas.polyline(prof.u_c, prof.v_c, stroke="#000000", width=1.4)
    canvas.polyline(prof.u_p, prof.v_p, stroke="#777777", width=1.0, dashed=True)
    canvas.data_circle(0.0, 0.0, spec.d_cs / 2.0, stroke="#2255aa")
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        i = int(frac * (prof.resolution - 1))
        canvas.data_circle(prof.u_p[i], prof.v_p[i], spec.r, stroke="#aa3322")
    canvas.page_text(14, 18, "cam profile (solid), pitch curve (dashed), "
                             "rollers and camshaft circles")
    canvas.write(path)


# --- metrics ----------------------------------------------------------------

def cmd_metrics(cfg: RunConfig) -> int:
    try:
        spec = cfg.spec()
        load = cfg.load_case()
        cam_mat, roller_mat = cfg.material_pair()
    except ConfigError:
        raise
    except ModelError as exc:
        print(f"infeasible mechanism: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if spec.m < 2:
        print("infeasible mechanism: a single cam cannot drive the follower "
              "positively (m must be at least 2)", file=sys.stderr)
        return EXIT_INFEASIBLE
    report = geometry.feasibility_check(spec)
    if not report.ok:
        _print_report(report)
        return EXIT_INFEASIBLE
    delta = report.delta
    seg = mechanics.active_segment(spec, delta)
    psis = seg.grid()
    mus = np.abs(mechanics.pressure_angle_series(psis, spec.eta, spec.n))
    i_mu = int(np.argmax(mus))
    mu_max = float(mus[i_mu])
    try:
        P_max, psi_P = mechanics.max_hertz_pressure(spec, load, cam_mat, roller_mat)
    except ModelError as exc:
        print(f"infeasible mechanism: {exc}", file=sys.stderr)
        _print_report(report)
        return EXIT_INFEASIBLE
    S_M = mechanics.mechanism_size(spec.m, spec.L)
    allowable = P_max <= cam_mat.P_allow and P_max <= roller_mat.P_allow
    angle_ok = (not load.high_speed) or mu_max <= math.radians(30.0)
    payload = {
        **_meta(cfg),
        "delta_rad": delta,
        "mu_max_deg": math.degrees(mu_max),
        "psi_at_mu_max_rad": float(psis[i_mu]),
        "p_max_mpa": P_max,
        "psi_at_p_max_rad": psi_P,
        "size_mm": S_M,
        "segment_rad": [seg.psi_start, seg.psi_end],
        "fully_convex": report.fully_convex,
        "profile_feasible": report.profile_feasible,
        "blocking": report.blocking,
        "rho_c_min_mm": report.rho_c_min,
        "allowable_pressure_ok": bool(allowable),
        "cam_material": cam_mat.name,
        "roller_material": roller_mat.name,
        "allowable_pressure_mpa": min(cam_mat.P_allow, roller_mat.P_allow),
        "high_speed": load.high_speed,
        "pressure_angle_recommended_ok": bool(angle_ok),
    }
    out = _outdir(cfg)
    if _wants(cfg, "json"):
        _write_json(out / "metrics.json", payload)
    if _wants(cfg, "csv"):
        _write_csv(out / "metrics.csv",
                   ["mu_max_deg", "psi_at_mu_max_rad", "p_max_mpa",
                    "psi_at_p_max_rad", "size_mm", "fully_convex",
                    "profile_feasible", "allowable_pressure_ok"],
                   [[math.degrees(mu_max), float(psis[i_mu]), P_max, psi_P, S_M,
                     report.fully_convex, report.profile_feasible, allowable]])
    print(f"mu_max   = {math.degrees(mu_max):.4f} deg at psi = {float(psis[i_mu]):.4f} rad")
    print(f"P_max    = {P_max:.4f} MPa at psi = {psi_P:.4f} rad")
    print(f"S_M      = {S_M:.4f} mm")
    print(f"convex   = {report.fully_convex}, feasible = {report.profile_feasible}")
    print(f"P_allow  = {min(cam_mat.P_allow, roller_mat.P_allow):.1f} MPa "
          f"({'ok' if allowable else 'exceeded'})")
    if load.high_speed:
        print(f"high-speed run: pressure angle {'within' if angle_ok else 'ABOVE'} "
              "the 30 deg recommendation")
    return EXIT_OK


# --- sensitivity -------------------------------------------------------------

def cmd_sensitivity(cfg: RunConfig) -> int:
    try:
        spec = cfg.spec()
        load = cfg.load_case()
        mats = cfg.material_pair()
    except ConfigError:
        raise
    except ModelError as exc:
        print(f"infeasible nominal design: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    try:
        rep = sensitivity.sensitivity_report(
            spec, load, mats, samples=cfg.sensitivity.samples,
            rms_nodes=cfg.sensitivity.rms_nodes,
            include_torque=cfg.sensitivity.include_torque)
    except ModelError as exc:
        print(f"infeasible nominal design: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = _outdir(cfg)
    names = list(rep.pointwise.keys())
    if _wants(cfg, "csv"):
        _write_csv(out / "sensitivity_profile.csv",
                   ["psi_rad"] + [f"dP_d{n}_norm_mpa" for n in names],
                   ([psi] + [rep.pointwise[n][k] for n in names]
                    for k, psi in enumerate(rep.psi)))
        _write_csv(out / "sensitivity_tables.csv",
                   ["mode", "r", "eta", "p", "L", "ranking"],
                   [["at_max"] + [rep.at_max[n] for n in sensitivity.PARAMS]
                    + [" ".join(rep.at_max_ranking)],
                    ["rms"] + [rep.rms[n] for n in sensitivity.PARAMS]
                    + [" ".join(rep.rms_ranking)]])
    if _wants(cfg, "json"):
        _write_json(out / "sensitivity.json", {
            **_meta(cfg),
            "nominal": rep.nominal,
            "delta_rad": rep.delta,
            "segment_rad": [rep.segment.psi_start, rep.segment.psi_end],
            "at_max": rep.at_max,
            "at_max_ranking": list(rep.at_max_ranking),
            "rms": rep.rms,
            "rms_ranking": list(rep.rms_ranking),
        })
    if _wants(cfg, "svg"):
        _sensitivity_svg(out / "sensitivity.svg", rep)
    print("at-max ranking:", ", ".join(rep.at_max_ranking))
    print("rms ranking:   ", ", ".join(rep.rms_ranking))
    return EXIT_OK


_SERIES_COLORS = {"r": "#aa3322", "eta": "#2255aa", "p": "#228833",
                  "L": "#aa7700", "torque": "#774499"}


def _sensitivity_svg(path: Path, rep) -> None:
    lo = min(float(s.min()) for s in rep.pointwise.values())
    hi = max(float(s.max()) for s in rep.pointwise.values())
    canvas = Canvas(padded_range(float(rep.psi[0]), float(rep.psi[-1])),
                    padded_range(lo, hi))
    canvas.axes("psi [rad]", "dP/dq * q0 [MPa]")
    if lo < 0.0 < hi:
        canvas.polyline([rep.psi[0], rep.psi[-1]], [0.0, 0.0],
                        stroke="#bbbbbb", width=0.8)
    y = 18
    for name, series in rep.pointwise.items():
        color = _SERIES_COLORS.get(name, "#000000")
        canvas.polyline(rep.psi, series, stroke=color, width=1.3)
        canvas.page_text(canvas.width - 130, y, f"w.r.t. {name}", color=color)
        y += 16
    canvas.write(path)


# --- pareto -------------------------------------------------------------------

_FRONT_HEADER = ["m", "d_cs_mm", "r_mm", "L_mm", "mu_max_deg", "p_max_mpa",
                 "s_m_mm", "feasible", "convex_profile"]


def _front_rows(front):
    for c in front:
        yield [c.m, c.d_cs, c.r, c.L, math.degrees(c.mu_max), c.P_max, c.S_M,
               c.feasible, c.convex_profile]


def cmd_pareto(cfg: RunConfig) -> int:
    try:
        space = cfg.space()
        result = optimize.sweep(space)
    except ModelError as exc:
        print(f"invalid design space: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _outdir(cfg)
    if _wants(cfg, "csv"):
        _write_csv(out / "pareto_front.csv", _FRONT_HEADER, _front_rows(result.front))
        for m, front in result.per_m_fronts.items():
            _write_csv(out / f"pareto_front_m{m}.csv", _FRONT_HEADER,
                       _front_rows(front))
    if _wants(cfg, "json"):
        _write_json(out / "pareto.json", {
            **_meta(cfg),
            "design_space": space.to_dict(),
            "evaluated": result.evaluated,
            "front_size": len(result.front),
            "per_m_front_size": {str(m): len(f)
                                 for m, f in result.per_m_fronts.items()},
            "front": [
                {"m": c.m, "d_cs_mm": c.d_cs, "r_mm": c.r, "L_mm": c.L,
                 "mu_max_deg": math.degrees(c.mu_max), "p_max_mpa": c.P_max,
                 "s_m_mm": c.S_M, "convex_profile": c.convex_profile}
                for c in result.front
            ],
        })
    if _wants(cfg, "svg"):
        _pareto_svgs(out, result)
    print(f"sweep: {result.evaluated} candidates, merged front {len(result.front)}, "
          + ", ".join(f"m={m}: {len(f)}" for m, f in result.per_m_fronts.items()))
    return EXIT_OK


_M_COLORS = {2: "#aa3322", 3: "#2255aa"}


def _pareto_svgs(out: Path, result) -> None:
    fronts = result.per_m_fronts
    axes = {
        "pareto_mu_sm.svg": (lambda c: math.degrees(c.mu_max), lambda c: c.S_M,
                             "mu_max [deg]", "S_M [mm]"),
        "pareto_p_mu.svg": (lambda c: math.degrees(c.mu_max), lambda c: c.P_max,
                            "mu_max [deg]", "P_max [MPa]"),
        "pareto_p_sm.svg": (lambda c: c.S_M, lambda c: c.P_max,
                            "S_M [mm]", "P_max [MPa]"),
    }
    allc = [c for front in fronts.values() for c in front]
    if not allc:
        return
    for name, (fx, fy, xl, yl) in axes.items():
        xs = [fx(c) for c in allc]
        ys = [fy(c) for c in allc]
        canvas = Canvas(padded_range(min(xs), max(xs)),
                        padded_range(min(ys), max(ys)))
        canvas.axes(xl, yl)
        y = 18
        for m, front in fronts.items():
            color = _M_COLORS.get(m, "#000000")
            for c in front:
                canvas.circle(fx(c), fy(c), 2.2, stroke=color)
            canvas.page_text(canvas.width - 150, y, f"{m} conjugate cams",
                             color=color)
            y += 16
        canvas.write(out / name)
    # isometric 3D scatter of the merged front
    front = result.front
    mus = [math.degrees(c.mu_max) for c in front]
    ps = [c.P_max for c in front]
    sms = [c.S_M for c in front]

    def norm(vals):
        lo, hi = min(vals), max(vals)
        return [(v - lo) / (hi - lo) if hi > lo else 0.5 for v in vals]

    nx, ny, nz = norm(mus), norm(sms), norm(ps)
    ca, cb = math.cos(math.radians(30)), math.sin(math.radians(30))
    px = [(x - y) * ca for x, y, z in zip(nx, ny, nz)]
    py = [(x + y) * cb + z for x, y, z in zip(nx, ny, nz)]
    canvas = Canvas(padded_range(min(px), max(px)), padded_range(min(py), max(py)))
    for c, x, y in zip(front, px, py):
        canvas.circle(x, y, 2.2, stroke=_M_COLORS.get(c.m, "#000000"))
    canvas.page_text(14, 18, "merged front, isometric axes: mu_max, S_M, P_max")
    canvas.write(out / "pareto_3d.svg")


# --- contour ------------------------------------------------------------------

def cmd_contour(cfg: RunConfig) -> int:
    try:
        space = cfg.space()
        cc = cfg.contour
        sl = optimize.contour_slice(space, cc.m, cc.s_m_mm,
                                    resolution=cc.resolution,
                                    mu_levels_deg=cc.mu_levels_deg,
                                    P_levels=cc.p_levels_mpa)
    except InfeasibleCamCount as exc:
        print(f"infeasible contour request: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ModelError as exc:
        print(f"invalid contour request: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _outdir(cfg)
    if _wants(cfg, "csv"):
        res = len(sl.d_axis)
        _write_csv(out / "contour_grid.csv",
                   ["d_cs_mm", "r_mm", "mu_max_deg", "p_max_mpa", "feasible"],
                   ([sl.d_axis[i], sl.r_axis[j],
                     math.degrees(sl.mu_grid[i, j]), sl.P_grid[i, j],
                     bool(sl.feasible[i, j])]
                    for i in range(res) for j in range(res)))
        _write_csv(out / "contour_locus.csv", _FRONT_HEADER, _front_rows(sl.locus))
    if _wants(cfg, "json"):
        _write_json(out / "contour.json", {
            **_meta(cfg),
            "m": sl.m, "s_m_mm": sl.S_M, "L_mm": sl.L,
            "mu_levels_deg": list(sl.mu_levels),
            "p_levels_mpa": list(sl.P_levels),
            "locus_size": len(sl.locus),
        })
    if _wants(cfg, "svg"):
        _contour_svg(out / "contour.svg", sl, cfg.contour.dashed_pressure)
    print(f"contour: m={sl.m}, S_M={sl.S_M} mm, locus {len(sl.locus)} points -> {out}")
    return EXIT_OK


def _contour_svg(path: Path, sl, dashed_pressure: bool) -> None:
    canvas = Canvas(padded_range(float(sl.d_axis[0]), float(sl.d_axis[-1])),
                    padded_range(float(sl.r_axis[0]), float(sl.r_axis[-1])))
    canvas.axes("d_cs [mm]", "r [mm]")
    for lev, segs in sl.mu_isolines.items():
        for (x1, y1), (x2, y2) in segs:
            canvas.segment(x1, y1, x2, y2, stroke="#228833",
                           dashed=not dashed_pressure)
    for lev, segs in sl.P_isolines.items():
        for (x1, y1), (x2, y2) in segs:
            canvas.segment(x1, y1, x2, y2, stroke="#aa3322",
                           dashed=dashed_pressure)
    for c in sl.locus:
        canvas.circle(c.d_cs, c.r, 2.4, stroke="#000000", fill="#000000")
    canvas.page_text(14, 18, "pressure-angle contours (green), "
                             "Hertz-pressure contours (red), optimal locus (dots)")
    canvas.write(path)


# --- entry point ----------------------------------------------------------------

_COMMANDS = {
    "profile": cmd_profile,
    "metrics": cmd_metrics,
    "sensitivity": cmd_sensitivity,
    "pareto": cmd_pareto,
    "contour": cmd_contour,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _resolve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
