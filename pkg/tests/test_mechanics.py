import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import camdrive as cd
from camdrive.errors import (
    ConfigError,
    DegenerateContact,
    InfeasibleCamCount,
    InfeasibleProfile,
    InvalidSpec,
    PressureAngleSingular,
)
from camdrive.geometry import TAU
from camdrive.mechanics import pressure_angle_series

import oracles

K_STEEL = 1.3793428401297596e-06          # (1 - 0.3^2) / (pi * 210000)
MU_AT_SEGMENT_START = 0.10084913109049841  # arctan(0.13097.../1.2943)
B_REFERENCE = 0.0706538219773              # sqrt(16*377*2.7586e-6*3/10)
P_REFERENCE = 679.3847734371351            # 4*377/(10*pi*B)


def spec50(**over):
    base = dict(p=50.0, eta=0.18, r=4.0, n=1, m=2, L=10.0)
    base.update(over)
    return cd.TransmissionSpec(**base)


class TestMaterials:
    def test_builtin_table(self):
        cat = cd.builtin_materials()
        stainless = cd.find_material("stainless steel", cat)
        assert stainless.P_stat == 650.0 and stainless.P_allow == 260.0
        improved = cd.find_material("improved steel", cat)
        assert improved.p_stat == (1600.0, 2000.0)
        assert improved.p_allow == (640.0, 800.0)
        poly = cd.find_material("polyamide", cat)
        assert poly.P_allow == pytest.approx(0.4 * poly.P_stat)

    def test_constraint_bound_is_range_upper(self):
        assert cd.find_material("improved steel").P_allow == 800.0

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            cd.find_material("unobtainium")

    def test_catalog_roundtrip(self, tmp_path):
        path = tmp_path / "mats.json"
        path.write_text(json.dumps([m.to_dict() for m in cd.builtin_materials()]))
        loaded = cd.load_materials(path)
        assert loaded == cd.builtin_materials()

    def test_catalog_rejects_unknown_keys(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps([{
            "name": "x", "young_modulus_mpa": 1000.0, "poisson_ratio": 0.3,
            "static_pressure_mpa": 100.0, "hardness": 42}]))
        with pytest.raises(ConfigError):
            cd.load_materials(path)

    def test_fatigue_rule_default(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps([{
            "name": "x", "young_modulus_mpa": 1000.0, "poisson_ratio": 0.3,
            "static_pressure_mpa": 100.0}]))
        (mat,) = cd.load_materials(path)
        assert mat.P_allow == pytest.approx(40.0)

    def test_invalid_constants(self):
        with pytest.raises(InvalidSpec):
            cd.Material("bad", -1.0, 0.3, (1.0, 1.0), (1.0, 1.0))
        with pytest.raises(InvalidSpec):
            cd.Material("bad", 1000.0, 0.5, (1.0, 1.0), (1.0, 1.0))


class TestMaterialCoefficient:
    def test_steel_value(self, steel):
        assert cd.material_coefficient(steel) == pytest.approx(K_STEEL, rel=1e-12)

    def test_zero_poisson(self):
        m = cd.Material("rigid", 1000.0, 0.0, (1.0, 1.0), (1.0, 1.0))
        assert cd.material_coefficient(m) == pytest.approx(1.0 / (math.pi * 1000.0))

    def test_identical_bodies_symmetric(self, steel):
        assert cd.material_coefficient(steel) == cd.material_coefficient(steel)


class TestEquivalentRadius:
    def test_equal_radii_halve(self):
        assert cd.equivalent_radius(4.0, 4.0) == pytest.approx(2.0)

    def test_flat_counter_surface_limit(self):
        assert cd.equivalent_radius(4.0, 1e12) == pytest.approx(4.0, rel=1e-9)

    def test_reference_value(self):
        assert cd.equivalent_radius(4.0, 12.0) == pytest.approx(3.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateContact):
            cd.equivalent_radius(4.0, -5.0)


class TestHertz:
    def test_no_load_no_band(self, steel):
        K = cd.material_coefficient(steel)
        assert cd.hertz_band_width(0.0, K, K, 3.0, 10.0) == 0.0

    def test_band_square_root_scaling(self):
        b1 = cd.hertz_band_width(100.0, 1e-6, 1e-6, 3.0, 10.0)
        b4 = cd.hertz_band_width(400.0, 1e-6, 1e-6, 3.0, 10.0)
        assert b4 == pytest.approx(2.0 * b1, rel=1e-14)

    def test_reference_band_and_pressure(self):
        B = cd.hertz_band_width(377.0, 1.3793e-6, 1.3793e-6, 3.0, 10.0)
        assert B == pytest.approx(B_REFERENCE, rel=1e-9)
        assert cd.hertz_pressure(377.0, 10.0, B) == pytest.approx(P_REFERENCE, rel=1e-9)

    def test_zero_load_pressure_convention(self):
        assert cd.hertz_pressure(0.0, 10.0, 0.0) == 0.0

    def test_pressure_scaling_with_recomputed_band(self):
        K = 1.4e-6
        B1 = cd.hertz_band_width(100.0, K, K, 3.0, 10.0)
        B4 = cd.hertz_band_width(400.0, K, K, 3.0, 10.0)
        assert cd.hertz_pressure(400.0, 10.0, B4) == pytest.approx(
            2.0 * cd.hertz_pressure(100.0, 10.0, B1), rel=1e-12)


class TestPressureAngle:
    def test_reference_value(self):
        mu = cd.pressure_angle(math.pi + 1.2943, 0.18)
        assert abs(mu) == pytest.approx(MU_AT_SEGMENT_START, rel=1e-12)
        assert math.degrees(abs(mu)) == pytest.approx(5.778, abs=1e-3)

    def test_vanishes_far_from_mid_stroke(self):
        assert abs(cd.pressure_angle(1e9, 0.18)) < 1e-8

    def test_mid_stroke_singular(self):
        with pytest.raises(PressureAngleSingular):
            cd.pressure_angle(math.pi, 0.18)

    def test_decreases_with_lower_eta(self):
        psi = math.pi + 1.2943
        lo = abs(cd.pressure_angle(psi, 0.17))
        hi = abs(cd.pressure_angle(psi, 0.20))
        assert lo < hi


class TestActiveSegment:
    def test_two_cam_reference_ends(self):
        seg = cd.active_segment(spec50(), -1.2943)
        assert seg.psi_start == pytest.approx(4.435892653589793, rel=1e-12)
        assert seg.psi_end == pytest.approx(7.577485307179587, rel=1e-12)
        assert seg.length == pytest.approx(math.pi)

    def test_three_cam_reference_ends(self):
        seg = cd.active_segment(spec50(m=3), -1.2943)
        assert seg.psi_start == pytest.approx(5.483090204786391, rel=1e-12)
        assert seg.psi_end == pytest.approx(7.577485307179587, rel=1e-12)
        assert seg.length == pytest.approx(TAU / 3.0)

    def test_single_cam_rejected(self):
        with pytest.raises(InfeasibleCamCount):
            cd.active_segment(spec50(m=1), -1.2943)

    def test_segment_inside_profile_range(self, rng):
        for params in oracles.random_valid_specs(rng, 20):
            s = cd.TransmissionSpec(p=params["p"], eta=params["eta"],
                                    r=params["r"], m=params["m"], L=params["L"])
            delta = cd.extended_angle(s)
            seg = cd.active_segment(s, delta)
            assert delta <= seg.psi_start < seg.psi_end <= TAU - delta + 1e-12
            assert seg.length == pytest.approx(TAU / (s.n * s.m))


class TestMaxPressureAngle:
    def test_baseline_at_segment_start(self):
        s = spec50()
        delta = cd.extended_angle(s)
        mu_max = cd.max_pressure_angle(s)
        assert mu_max == pytest.approx(abs(cd.pressure_angle(math.pi - delta, s.eta)),
                                       rel=1e-12)

    def test_three_cams_reduce_the_angle(self):
        assert cd.max_pressure_angle(spec50(m=3)) < cd.max_pressure_angle(spec50(m=2))

    def test_scan_max_equals_endpoint_max(self, rng):
        for params in oracles.random_valid_specs(rng, 20):
            s = cd.TransmissionSpec(p=params["p"], eta=params["eta"],
                                    r=params["r"], m=params["m"], L=params["L"])
            delta = cd.extended_angle(s)
            seg = cd.active_segment(s, delta)
            endpoint = max(abs(cd.pressure_angle(seg.psi_start, s.eta)),
                           abs(cd.pressure_angle(seg.psi_end, s.eta)))
            assert cd.max_pressure_angle(s) == pytest.approx(endpoint, rel=1e-12)


class TestContactForce:
    def test_power_balance_identity(self, load):
        s = spec50()
        delta = cd.extended_angle(s)
        seg = cd.active_segment(s, delta)
        for psi in np.linspace(seg.psi_start, seg.psi_end, 7):
            F = cd.contact_force(float(psi), load, s)
            mu = cd.pressure_angle(float(psi), s.eta)
            assert F * math.cos(mu) * s.p / TAU == pytest.approx(load.torque,
                                                                 rel=1e-12)

    def test_pure_ratio_at_vanishing_angle(self, load):
        s = spec50(p=20.0, eta=0.18, r=3.0)
        F = cd.contact_force(1e9, load, s)
        assert F == pytest.approx(TAU * 1200.0 / 20.0, rel=1e-9)

    def test_sixty_degree_angle_doubles_force(self, load):
        # psi placed so that |mu| = 60 degrees exactly
        s = spec50(p=20.0, eta=0.18, r=3.0)
        q = TAU * s.eta - 1.0
        psi = math.pi - q / math.tan(math.pi / 3.0)
        assert abs(cd.pressure_angle(psi, s.eta)) == pytest.approx(math.pi / 3.0)
        assert cd.contact_force(psi, load, s) == pytest.approx(
            2.0 * TAU * 1200.0 / 20.0, rel=1e-9)


class TestMaxHertzPressure:
    def test_baseline_peak_location_and_composition(self, load, steel_pair):
        s = spec50()
        delta = cd.extended_angle(s)
        P_max, psi_at = cd.max_hertz_pressure(s, load, *steel_pair)
        assert psi_at == pytest.approx(math.pi - delta, abs=1e-9)
        # recompose independently from the scalar operations
        F = cd.contact_force(psi_at, load, s)
        rho_c = 1.0 / cd.cam_curvature(cd.pitch_curvature(psi_at, s.p, s.eta), s.r)
        K = cd.material_coefficient(steel_pair[0])
        B = cd.hertz_band_width(F, K, K, cd.equivalent_radius(s.r, rho_c), s.L)
        assert P_max == pytest.approx(cd.hertz_pressure(F, s.L, B), rel=1e-12)

    def test_wider_contact_lowers_pressure(self, load, steel_pair):
        P1, _ = cd.max_hertz_pressure(spec50(L=10.0), load, *steel_pair)
        P2, _ = cd.max_hertz_pressure(spec50(L=20.0), load, *steel_pair)
        assert P2 == pytest.approx(P1 / math.sqrt(2.0), rel=1e-9)

    def test_material_swap_leaves_pressure_unchanged(self, load):
        cast = cd.find_material("grey cast iron")
        steel = cd.find_material("improved steel")
        P_ab, _ = cd.max_hertz_pressure(spec50(), load, steel, cast)
        P_ba, _ = cd.max_hertz_pressure(spec50(), load, cast, steel)
        assert P_ab == pytest.approx(P_ba, rel=1e-14)

    def test_concave_driving_arc_rejected(self, load, steel_pair):
        # a two-lobe window crosses the concave nose at this eta
        s = spec50(n=2)
        with pytest.raises(InfeasibleProfile):
            cd.max_hertz_pressure(s, load, *steel_pair)


class TestMechanismSize:
    def test_values(self):
        assert cd.mechanism_size(2, 30.0) == 60.0
        assert cd.mechanism_size(3, 30.0) == 90.0

    def test_single_cam_rejected(self):
        with pytest.raises(InfeasibleCamCount):
            cd.mechanism_size(1, 30.0)


class TestLoadCase:
    def test_torque_positive(self):
        with pytest.raises(InvalidSpec):
            cd.LoadCase(0.0)

    def test_high_speed_flag(self):
        assert not cd.LoadCase(1200.0).high_speed
        assert not cd.LoadCase(1200.0, speed_rpm=50.0).high_speed
        assert cd.LoadCase(1200.0, speed_rpm=51.0).high_speed


class TestEndpointExtremality:
    def test_pressure_and_angle_peak_at_segment_start(self, rng, load, steel_pair):
        # the angle peak is always at the start; the pressure peak is exactly
        # there whenever rho_c grows across the segment (|delta|^2 >= t*, with
        # t* = 2(2*pi*eta - 1)(2 - pi*eta) the curvature-turnover abscissa),
        # and only slightly inside otherwise
        from camdrive.mechanics import hertz_pressure_series
        checked = off_endpoint = 0
        for params in oracles.random_valid_specs(rng, 100):
            s = cd.TransmissionSpec(p=params["p"], eta=params["eta"],
                                    r=params["r"], m=params["m"], L=params["L"])
            rep = cd.feasibility_check(s)
            if not rep.ok:
                continue
            delta = cd.extended_angle(s)
            seg = cd.active_segment(s, delta)
            psis = seg.grid(2048)
            mus = np.abs(pressure_angle_series(psis, s.eta, s.n))
            assert int(np.argmax(mus)) == 0
            P = hertz_pressure_series(psis, s, load, *steel_pair)
            if np.isnan(P).any():
                continue
            i = int(np.argmax(P))
            q = TAU * s.eta - 1.0
            w0 = seg.psi_start - math.pi
            monotone = w0 * w0 >= 2.0 * q * (2.0 - math.pi * s.eta)
            if monotone:
                assert i <= 1
            elif i > 1:
                off_endpoint += 1
                assert i <= 0.12 * len(psis)
                assert (P[i] - P[0]) / P[0] <= 0.08
            checked += 1
        assert checked >= 80


class TestMonotoneTrends:
    def test_trends_at_random_base_points(self, rng, load, steel_pair):
        bases = oracles.random_valid_specs(rng, 20)
        for params in bases:
            p, eta, r, L = params["p"], params["eta"], params["r"], params["L"]
            if r >= 0.85 * eta * p:
                r = 0.85 * eta * p
            s2 = cd.TransmissionSpec(p=p, eta=eta, r=r, m=2, L=L)
            s3 = cd.TransmissionSpec(p=p, eta=eta, r=r, m=3, L=L)
            # more conjugate cams: lower pressure angle
            assert cd.max_pressure_angle(s3) < cd.max_pressure_angle(s2)
            # higher eta: angle does not decrease
            s2b = cd.TransmissionSpec(p=p, eta=eta * 1.05, r=r, m=2, L=L)
            assert cd.max_pressure_angle(s2b) >= cd.max_pressure_angle(s2) - 1e-12
            if not cd.feasibility_check(s2).ok:
                continue
            P2, _ = cd.max_hertz_pressure(s2, load, *steel_pair)
            # wider contact: lower pressure
            wide = cd.TransmissionSpec(p=p, eta=eta, r=r, m=2, L=L * 1.5)
            P2w, _ = cd.max_hertz_pressure(wide, load, *steel_pair)
            assert P2w < P2
            # more cams at equal width: pressure does not increase
            if cd.feasibility_check(s3).ok:
                P3, _ = cd.max_hertz_pressure(s3, load, *steel_pair)
                assert P3 <= P2 + 1e-9
            # size strictly increases in both m and L
            assert cd.mechanism_size(3, L) > cd.mechanism_size(2, L)
            assert cd.mechanism_size(2, L * 1.5) > cd.mechanism_size(2, L)


@settings(max_examples=40)
@given(st.floats(0.18, 0.55), st.floats(25.0, 60.0))
def test_property_pressure_angle_series_matches_scalar(eta, p):
    psis = np.linspace(math.pi + 0.5, math.pi + 4.0, 9)
    series = pressure_angle_series(psis, eta)
    for psi, mu in zip(psis, series):
        assert mu == pytest.approx(cd.pressure_angle(float(psi), eta), rel=1e-14)
