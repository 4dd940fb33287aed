import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qswitch import linalg as la

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def hermitian(d):
    return st.tuples(arrays(float, (d, d), elements=finite), arrays(float, (d, d), elements=finite)).map(
        lambda t: 0.5 * ((t[0] + 1j * t[1]) + (t[0] + 1j * t[1]).conj().T)
    )


@st.composite
def densities(draw, d=2):
    g = draw(arrays(float, (2, d, d), elements=st.floats(-1, 1)))
    m = (g[0] + 1j * g[1]) @ (g[0] + 1j * g[1]).conj().T
    tr = np.trace(m).real
    if tr < 1e-6:
        return np.eye(d, dtype=complex) / d
    return m / tr


bloch_vectors = arrays(float, 3, elements=st.floats(-1, 1)).filter(lambda r: np.linalg.norm(r) <= 1)


class TestEigensolver:
    @given(st.sampled_from([2, 3, 4]).flatmap(hermitian))
    def test_reconstruction_and_orthonormality(self, h):
        w, v = la.hermitian_eig(h)
        scale = max(1.0, np.max(np.abs(h)))
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h)) < 1e-12 * scale * h.shape[0]
        assert np.max(np.abs(v.conj().T @ v - np.eye(h.shape[0]))) < 1e-12

    @given(st.sampled_from([2, 3, 4]).flatmap(hermitian))
    def test_eigenvalues_match_numpy(self, h):
        scale = max(1.0, np.max(np.abs(h)))
        assert np.allclose(la.eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-12 * scale * h.shape[0])

    def test_batched_stack(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(50, 4, 4)) + 1j * rng.normal(size=(50, 4, 4))
        h = x + np.conj(np.swapaxes(x, -1, -2))
        w, _ = la.hermitian_eig(h)
        assert w.shape == (50, 4)
        assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-12)

    def test_diagonal_and_zero_input(self):
        w, v = la.hermitian_eig(np.diag([3.0, -1.0, 2.0, 0.0]))
        assert list(w) == [-1.0, 0.0, 2.0, 3.0]
        assert np.allclose(np.abs(v), np.eye(4)[:, [1, 3, 2, 0]])
        w, _ = la.hermitian_eig(np.zeros((4, 4)))
        assert np.all(w == 0)

    def test_subnormal_offdiagonal_stays_finite(self):
        m = np.eye(4, dtype=complex) * 0.25
        m[2, 3], m[3, 2] = 5e-324j, -5e-324j
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            w, v = la.hermitian_eig(m)
        assert np.all(np.isfinite(w)) and np.all(np.isfinite(v))

    def test_rejects_non_hermitian(self):
        with pytest.raises(la.InvalidInput):
            la.hermitian_eig(np.array([[0, 1], [0, 0]]))

    def test_rejects_bad_shape_and_nan(self):
        with pytest.raises(la.InvalidInput):
            la.hermitian_eig(np.zeros((2, 3)))
        with pytest.raises(la.InvalidInput):
            la.hermitian_eig(np.eye(5))
        with pytest.raises(la.InvalidInput):
            la.hermitian_eig(np.array([[np.nan, 0], [0, 1]]))


class TestBasicOps:
    def test_elementwise_wrappers(self):
        a = np.array([[1, 2j], [3, 4]])
        b = np.eye(2)
        assert np.array_equal(la.add(a, b), a + b)
        assert np.array_equal(la.multiply(a, b), a)
        assert np.array_equal(la.scale(2j, a), 2j * a)
        assert np.array_equal(la.adjoint(a), a.conj().T)
        assert la.trace(a) == 5
        assert la.hermitian_defect(a) > 0

    def test_dimension_mismatch(self):
        with pytest.raises(la.InvalidInput):
            la.add(np.eye(2), np.eye(4))
        with pytest.raises(la.InvalidInput):
            la.multiply(np.eye(2), np.eye(3))


class TestBipartite:
    def test_kron_ordering(self):
        probe = np.array([[1, 2], [3, 4]])
        ctrl = np.array([[0, 1], [0, 0]])
        k = la.kron(probe, ctrl)
        # control-major: block (0, 1) holds the probe operator
        assert np.array_equal(k[:2, 2:], probe)
        assert np.all(k[:2, :2] == 0) and np.all(k[2:, :] == 0)

    @given(densities(2), densities(2))
    def test_partial_traces_of_product(self, rp, rc):
        j = la.kron(rp, rc)
        assert np.allclose(la.partial_trace(j, "probe"), rp, atol=1e-14)
        assert np.allclose(la.partial_trace(j, "control"), rc, atol=1e-14)

    @given(densities(4))
    def test_partial_traces_valid(self, j):
        for keep in ("probe", "control"):
            la.DensityOperator(la.partial_trace(j, keep))

    def test_partial_trace_matches_loops(self):
        rng = np.random.default_rng(0)
        j = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        probe = np.array([[sum(j[2 * a + i, 2 * a + k] for a in range(2)) for k in range(2)] for i in range(2)])
        ctrl = np.array([[sum(j[2 * a + i, 2 * b + i] for i in range(2)) for b in range(2)] for a in range(2)])
        assert np.allclose(la.partial_trace(j, "probe"), probe)
        assert np.allclose(la.partial_trace(j, "control"), ctrl)

    def test_partial_trace_bad_keep(self):
        with pytest.raises(la.InvalidInput):
            la.partial_trace(np.eye(4) / 4, "both")

    def test_probe_major_roundtrip(self):
        probe = np.array([[1, 2], [3, 4]])
        ctrl = np.array([[5, 6], [7, 8]])
        assert np.array_equal(la.to_probe_major(la.kron(probe, ctrl)), np.kron(probe, ctrl))
        m = np.arange(16).reshape(4, 4)
        assert np.array_equal(la.from_probe_major(la.to_probe_major(m)), m)

    def test_block_matrix(self):
        blocks = [np.full((2, 2), v) for v in range(4)]
        m = la.block_matrix(*blocks)
        assert m[0, 0] == 0 and m[0, 3] == 1 and m[3, 0] == 2 and m[3, 3] == 3


class TestStates:
    @given(densities(2))
    def test_valid_density_accepted_and_frozen(self, m):
        rho = la.DensityOperator(m)
        assert not rho.mat.flags.writeable

    @pytest.mark.parametrize(
        "m",
        [
            np.array([[1, 1], [0, 0]]),  # not Hermitian
            np.array([[0.6, 0], [0, 0.6]]),  # trace
            np.array([[1.5, 0], [0, -0.5]]),  # negative eigenvalue
            np.array([[0.5, 0.6], [0.6, 0.5]]),
        ],
    )
    def test_invalid_density_rejected(self, m):
        with pytest.raises(la.InvalidInput):
            la.DensityOperator(m)

    def test_tolerance_window(self):
        m = np.array([[1 + 5e-11, 0], [0, 0]])
        la.DensityOperator(m)
        with pytest.raises(la.InvalidInput):
            la.DensityOperator(m, tol=1e-12)

    @given(bloch_vectors)
    def test_bloch_roundtrip(self, r):
        back = la.bloch_from_density(la.density_from_bloch(r))
        assert np.max(np.abs(back - r)) < 1e-14

    def test_bloch_conventions(self):
        assert np.allclose(la.bloch_from_density(la.pure_state([1, 0])), [0, 0, 1])
        assert np.allclose(la.bloch_from_density(la.pure_state([1, 1])), [1, 0, 0])
        assert np.allclose(la.bloch_from_density(la.pure_state([1, 1j])), [0, 1, 0])

    def test_bloch_outside_ball(self):
        with pytest.raises(la.InvalidInput):
            la.density_from_bloch([1, 1, 0])
        with pytest.raises(la.InvalidInput):
            la.bloch_from_density(np.eye(4) / 4)

    def test_qubit_state(self):
        rho = la.qubit_state(0.3, 0.1 + 0.2j)
        assert rho.mat[1, 0] == 0.1 - 0.2j and rho.mat[1, 1] == pytest.approx(0.7)
        with pytest.raises(la.InvalidInput):
            la.qubit_state(0.5, 0.6)
