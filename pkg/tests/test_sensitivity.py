import math

import numpy as np
import pytest

import camdrive as cd
from camdrive.errors import InvalidSpec, PerturbationInfeasible
from camdrive.geometry import TAU
from camdrive.sensitivity import PARAMS, _simpson, pressure_at

# regression values of the normalised sensitivities at the nominal design
# (r=4, eta=0.18, p=50, L=10, torque=1200, steel on steel)
AT_MAX_NOMINAL = {"r": 103.714, "eta": 82.329, "p": 361.327, "L": 232.520}
RMS_NOMINAL = {"r": 156.655, "eta": 20.010, "p": 261.672, "L": 207.750}


@pytest.fixture()
def nominal():
    return cd.TransmissionSpec(p=50.0, eta=0.18, r=4.0, n=1, m=2, L=10.0)


def segment_points(spec, k=5):
    delta = cd.extended_angle(spec)
    seg = cd.active_segment(spec, delta)
    return np.linspace(seg.psi_start, seg.psi_end, k)


class TestPressurePartials:
    def test_width_partial_matches_closed_form(self, nominal, load, steel_pair):
        # P scales as 1/sqrt(L), so dP/dL = -P/(2L) identically
        for psi in segment_points(nominal):
            c = cd.pressure_partials(nominal, load, steel_pair, float(psi))
            P = pressure_at(nominal, load, steel_pair, float(psi))
            assert c[3] < 0.0
            assert c[3] == pytest.approx(-P / (2.0 * nominal.L), rel=1e-4)

    def test_pitch_partial_matches_closed_form(self, nominal, load, steel_pair):
        # dP/dp = -(P/2p)(1 + r/rho_c) at fixed psi
        psi = float(segment_points(nominal)[0])
        c = cd.pressure_partials(nominal, load, steel_pair, psi)
        P = pressure_at(nominal, load, steel_pair, psi)
        kp = cd.pitch_curvature(psi, nominal.p, nominal.eta)
        rho_c = 1.0 / cd.cam_curvature(kp, nominal.r)
        expected = -(P / (2.0 * nominal.p)) * (1.0 + nominal.r / rho_c)
        assert c[2] == pytest.approx(expected, rel=1e-4)

    def test_roller_partial_matches_closed_form(self, nominal, load, steel_pair):
        # dP/dr = -(P/2)(rho_c - r)/(r*rho_c) at fixed psi
        psi = float(segment_points(nominal)[0])
        c = cd.pressure_partials(nominal, load, steel_pair, psi)
        P = pressure_at(nominal, load, steel_pair, psi)
        kp = cd.pitch_curvature(psi, nominal.p, nominal.eta)
        rho_c = 1.0 / cd.cam_curvature(kp, nominal.r)
        expected = -(P / 2.0) * (rho_c - nominal.r) / (nominal.r * rho_c)
        assert c[0] == pytest.approx(expected, rel=1e-4)

    def test_eccentricity_partial_matches_closed_form(self, nominal, load,
                                                      steel_pair):
        # chain rule through the force (via the pressure angle) and through
        # the equivalent radius (via the pitch curvature)
        psi = float(segment_points(nominal)[0])
        spec = nominal
        q = TAU * spec.eta - 1.0
        w = psi - math.pi
        u = -q / w
        dmu_deta = (-TAU / w) / (1.0 + u * u)
        dlnF = u * dmu_deta                      # F ~ 1/cos(mu)
        num = w * w + 2.0 * q * (math.pi * spec.eta - 1.0)
        D = w * w + q * q
        dnum = 2.0 * math.pi * (4.0 * math.pi * spec.eta - 3.0)
        dden = 1.5 * math.sqrt(D) * (4.0 * math.pi * q)
        dkp = (TAU / spec.p) * (dnum * D ** 1.5 - num * dden) / D ** 3
        kp = cd.pitch_curvature(psi, spec.p, spec.eta)
        rho_c = 1.0 / cd.cam_curvature(kp, spec.r)
        rho_p = rho_c + spec.r
        drho = -dkp / (kp * kp)
        R = cd.equivalent_radius(spec.r, rho_c)
        dR = (spec.r / rho_p) ** 2 * drho
        P = pressure_at(spec, load, steel_pair, psi)
        expected = 0.5 * P * (dlnF - dR / R)
        c = cd.pressure_partials(nominal, load, steel_pair, psi)
        assert c[1] == pytest.approx(expected, rel=1e-4)

    def test_step_halving_stability(self, nominal, load, steel_pair):
        psi = float(segment_points(nominal)[0])
        c = cd.pressure_partials(nominal, load, steel_pair, psi)

        def fd(name, rel):
            q0 = getattr(nominal, name)
            h = rel * q0
            from dataclasses import replace
            hi = pressure_at(replace(nominal, **{name: q0 + h}), load, steel_pair, psi)
            lo = pressure_at(replace(nominal, **{name: q0 - h}), load, steel_pair, psi)
            return (hi - lo) / (2.0 * h)

        for i, name in enumerate(PARAMS):
            full = fd(name, 1e-6)
            half = fd(name, 5e-7)
            assert half == pytest.approx(full, rel=1e-6)
            assert c[i] == pytest.approx(full, rel=1e-9)

    def test_torque_partial(self, nominal, load, steel_pair):
        psi = float(segment_points(nominal)[0])
        c = cd.pressure_partials(nominal, load, steel_pair, psi, include_torque=True)
        P = pressure_at(nominal, load, steel_pair, psi)
        assert len(c) == 5
        # P scales as sqrt(torque): normalised torque sensitivity is P/2
        assert c[4] * load.torque == pytest.approx(P / 2.0, rel=1e-5)

    def test_probe_across_feasibility_boundary(self, load, steel_pair):
        r = 4.0
        spec = cd.TransmissionSpec(p=50.0, eta=(r + 1e-7) / 50.0, r=r, L=10.0)
        psi = float(segment_points(spec)[0])
        with pytest.raises(PerturbationInfeasible):
            cd.pressure_partials(spec, load, steel_pair, psi)


class TestSensitivityProfile:
    def test_series_span_segment(self, nominal, load, steel_pair):
        delta = cd.extended_angle(nominal)
        psis, series = cd.sensitivity_profile(nominal, load, steel_pair, 128)
        assert psis[0] == pytest.approx(math.pi - delta)
        assert psis[-1] == pytest.approx(TAU - delta)
        assert set(series) == set(PARAMS)

    def test_width_series_all_negative(self, nominal, load, steel_pair):
        _, series = cd.sensitivity_profile(nominal, load, steel_pair, 128)
        assert np.all(series["L"] < 0.0)

    def test_minimum_sample_count(self, nominal, load, steel_pair):
        with pytest.raises(InvalidSpec):
            cd.sensitivity_profile(nominal, load, steel_pair, 32)

    def test_optional_torque_series(self, nominal, load, steel_pair):
        _, series = cd.sensitivity_profile(nominal, load, steel_pair, 64,
                                           include_torque=True)
        assert "torque" in series and np.all(series["torque"] > 0.0)


class TestRankings:
    def test_at_max_ranking_and_values(self, nominal, load, steel_pair):
        values, ranking = cd.rank_at_max(nominal, load, steel_pair)
        assert ranking == ("p", "L", "r", "eta")
        for name, ref in AT_MAX_NOMINAL.items():
            assert values[name] == pytest.approx(ref, rel=1e-3)

    def test_rms_ranking_and_values(self, nominal, load, steel_pair):
        values, ranking = cd.rank_rms(nominal, load, steel_pair)
        assert ranking == ("p", "L", "r", "eta")
        for name, ref in RMS_NOMINAL.items():
            assert values[name] == pytest.approx(ref, rel=1e-3)

    def test_rms_node_doubling(self, nominal, load, steel_pair):
        v1, _ = cd.rank_rms(nominal, load, steel_pair, nodes=1025)
        v2, _ = cd.rank_rms(nominal, load, steel_pair, nodes=2049)
        for name in PARAMS:
            assert v2[name] == pytest.approx(v1[name], rel=1e-6)

    def test_rms_node_floor(self, nominal, load, steel_pair):
        with pytest.raises(InvalidSpec):
            cd.rank_rms(nominal, load, steel_pair, nodes=513)

    def test_simpson_reversal_invariance(self):
        rng = np.random.default_rng(7)
        y = rng.uniform(0.5, 2.0, 1025)
        assert _simpson(y, 0.01) == pytest.approx(_simpson(y[::-1], 0.01), rel=1e-12)

    def test_both_modes_agree_on_order(self, load, steel_pair, rng):
        # the two aggregation modes rank the parameters identically
        for _ in range(3):
            eta = float(rng.uniform(0.17, 0.22))
            spec = cd.TransmissionSpec(p=50.0, eta=eta, r=4.0, m=2, L=10.0)
            _, r1 = cd.rank_at_max(spec, load, steel_pair)
            _, r2 = cd.rank_rms(spec, load, steel_pair)
            assert r1 == r2


class TestReport:
    def test_full_report(self, nominal, load, steel_pair):
        rep = cd.sensitivity_report(nominal, load, steel_pair, samples=64)
        assert rep.at_max_ranking == rep.rms_ranking == ("p", "L", "r", "eta")
        assert rep.nominal["p"] == 50.0
        assert rep.segment.psi_start == pytest.approx(math.pi - rep.delta)
        assert len(rep.psi) == 64
