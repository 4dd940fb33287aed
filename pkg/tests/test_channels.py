import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as o
from qswitch import channels as ch
from qswitch import linalg as la

unit = st.floats(0, 1)
phys_p = st.floats(0.5, 1)
phases = st.floats(-20, 20)
axes = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: np.linalg.norm(v) > 0.1
).map(ch.as_axis)
bloch = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(lambda v: np.linalg.norm(v) <= 1)


def params(p, g):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ch.UnphysicalTemperatureWarning)
        return ch.ThermalNoiseParams(p, g)


class TestParams:
    @pytest.mark.parametrize("p,g", [(-0.1, 0.5), (1.1, 0.5), (0.7, -0.01), (0.7, 1.5), (math.nan, 0.5)])
    def test_out_of_range(self, p, g):
        with pytest.raises(la.InvalidInput):
            ch.ThermalNoiseParams(p, g)

    def test_low_p_warns_but_is_accepted(self):
        with pytest.warns(ch.UnphysicalTemperatureWarning):
            n = ch.ThermalNoiseParams(0.3, 0.5)
        assert n.p == 0.3

    def test_effective_temperature(self):
        assert ch.ThermalNoiseParams(1.0, 0.2).t_p == 0.0
        assert ch.ThermalNoiseParams(0.5, 0.2).t_p == 1.0
        assert ch.ThermalNoiseParams.from_effective_temperature(0.5, 0.2).p == 0.75
        with pytest.raises(la.InvalidInput):
            ch.p_from_effective_temperature(2.5)

    def test_unitary_params(self):
        u = ch.UnitaryParams(ch.E_X, -math.pi / 2)
        assert u.xi == pytest.approx(1.5 * math.pi)
        assert not u.is_z and ch.UnitaryParams().is_z
        with pytest.raises(la.InvalidInput):
            ch.UnitaryParams((1, 1, 0), 0.1)
        with pytest.raises(la.InvalidInput):
            ch.UnitaryParams(ch.E_Z, math.inf)

    @given(phases)
    def test_wrap_phase_range(self, xi):
        w = ch.wrap_phase(xi)
        assert 0 <= w < 2 * math.pi
        assert math.cos(w) == pytest.approx(math.cos(xi), abs=1e-9)

    def test_exact_sin_cos(self):
        assert ch.phase_sin_cos(math.pi) == (0.0, -1.0)
        assert ch.phase_sin_cos(0.0) == (0.0, 1.0)
        assert ch.phase_sin_cos(1.5 * math.pi) == (-1.0, 0.0)
        assert ch.phase_sin_cos(0.3) == (math.sin(0.3), math.cos(0.3))


class TestThermal:
    @given(unit, unit)
    def test_kraus_matches_definition(self, p, g):
        ops = ch.thermal_kraus(params(p, g)).ops
        assert len(ops) == 4
        assert np.allclose(ops, o.thermal_ops(p, g), atol=1e-15)

    @given(unit, unit)
    def test_completeness(self, p, g):
        assert ch.completeness_defect(ch.thermal_kraus(params(p, g)).ops) < 1e-12

    @given(unit, unit, unit, st.floats(0, 1), st.floats(0, 2 * math.pi))
    def test_entrywise_output(self, p, g, r00, frac, phi):
        r01 = frac * math.sqrt(r00 * (1 - r00)) * np.exp(1j * phi)
        rho = o.diag_state(r00, r01)
        via_kraus = ch.apply_kraus(ch.thermal_kraus(params(p, g)).ops, rho)
        assert np.allclose(via_kraus, ch.thermal_output(params(p, g), r00, r01), atol=1e-14)

    def test_fixed_point_is_thermal_state(self):
        n = ch.ThermalNoiseParams(0.8, 1.0)
        out = ch.apply_channel(ch.thermal_kraus(n), la.qubit_state(0.1, 0.2))
        assert np.allclose(out.mat, np.diag([0.8, 0.2]), atol=1e-15)

    @given(unit, unit, bloch)
    def test_affine_map(self, p, g, r):
        n = params(p, g)
        out = ch.apply_channel(ch.thermal_kraus(n), la.density_from_bloch(r))
        assert np.allclose(la.bloch_from_density(out), ch.bloch_affine_of_thermal(n)(r), atol=1e-14)


class TestRotations:
    @given(axes, phases)
    def test_unitary_matches_exponential(self, n, xi):
        u = ch.unitary(ch.UnitaryParams(n, xi))
        assert np.allclose(u, o.rotation_unitary(n, ch.wrap_phase(xi)), atol=1e-12)

    @given(axes, phases, bloch)
    def test_rotation_matrix_matches_conjugation(self, n, xi, r):
        up = ch.UnitaryParams(n, xi)
        u = ch.unitary(up)
        rho = la.density_from_bloch(r).mat
        rotated = la.bloch_from_density(u @ rho @ u.conj().T)
        assert np.allclose(ch.rotation_matrix(up) @ np.asarray(r), rotated, atol=1e-12)

    @given(unit, unit, axes, phases, bloch)
    def test_noisy_channel_commutes_with_bloch_map(self, p, g, n, xi, r):
        noise, up = params(p, g), ch.UnitaryParams(n, xi)
        kraus = ch.noisy_unitary_channel(noise, up)
        assert ch.completeness_defect(kraus.ops) < 1e-12
        out = kraus(la.density_from_bloch(r))
        assert np.allclose(la.bloch_from_density(out), ch.noisy_unitary_affine(noise, up)(r), atol=1e-12)

    def test_kraus_order_is_noise_after_rotation(self):
        noise, up = ch.ThermalNoiseParams(0.9, 0.4), ch.UnitaryParams(ch.E_X, 0.7)
        ops = ch.noisy_unitary_channel(noise, up).ops
        assert np.allclose(ops, o.noisy_ops(0.9, 0.4, ch.E_X, 0.7), atol=1e-13)

    def test_affine_compose(self):
        a = ch.AffineBlochMap(np.diag([1, 2, 3]), [1, 0, 0])
        b = ch.AffineBlochMap(np.eye(3) * 2, [0, 1, 0])
        r = np.array([0.1, 0.2, 0.3])
        assert np.allclose(a.compose(b)(r), a(b(r)))


class TestChannelObject:
    def test_incomplete_rejected(self):
        with pytest.raises(la.InvalidInput):
            ch.KrausChannel([np.eye(2) * 0.5])

    def test_protocol(self):
        c = ch.identity_channel()
        assert c.dim == 2 and len(c) == 1 and len(list(c)) == 1
        assert not c.ops.flags.writeable
        rho = la.qubit_state(0.3, 0.1)
        assert np.allclose(c(rho).mat, rho.mat)
        u = ch.unitary_channel(o.SX)
        assert np.allclose(u(rho).mat, o.SX @ rho.mat @ o.SX)

    def test_dimension_mismatch(self):
        with pytest.raises(la.InvalidInput):
            ch.apply_channel(ch.identity_channel(2), np.eye(4) / 4)

    @given(unit, unit, axes, phases, bloch)
    def test_outputs_are_states(self, p, g, n, xi, r):
        out = ch.apply_channel(ch.noisy_unitary_channel(params(p, g), ch.UnitaryParams(n, xi)), la.density_from_bloch(r))
        assert la.eigvalsh(out.mat)[0] > -1e-12


class TestConversions:
    def test_boltzmann(self):
        assert ch.p_from_temperature(1.0, 0.0) == 1.0
        assert ch.p_from_temperature(1.0, 1e12) == pytest.approx(0.5)
        assert ch.p_from_temperature(2.0, 1.0) == pytest.approx(1 / (1 + math.exp(-2)))
        with pytest.raises(la.InvalidInput):
            ch.p_from_temperature(0.0, 1.0)
        with pytest.raises(la.InvalidInput):
            ch.p_from_temperature(1.0, -1.0)

    def test_temperature_monotone(self):
        kt = np.linspace(0, 20, 200)
        p = np.array([ch.p_from_temperature(1.0, x) for x in kt])
        tp = np.array([ch.effective_temperature(x) for x in p])
        assert np.all(np.diff(p) <= 0) and np.all(np.diff(tp) >= 0)
        assert p[0] == 1 and p[-1] > 0.5 and tp[-1] < 1

    def test_gamma_from_time(self):
        assert ch.gamma_from_time(0.0, 1.0) == 0.0
        assert ch.gamma_from_time(1.0, 1.0) == pytest.approx(1 - math.exp(-1))
        assert ch.gamma_from_time(1e-20, 1.0) == pytest.approx(1e-20)
        with pytest.raises(la.InvalidInput):
            ch.gamma_from_time(-1, 1)
        with pytest.raises(la.InvalidInput):
            ch.gamma_from_time(1, 0)

    def test_as_axis(self):
        assert ch.as_axis([0, 0, 5]) == ch.E_Z
        with pytest.raises(la.InvalidInput):
            ch.as_axis([0, 0, 0])
