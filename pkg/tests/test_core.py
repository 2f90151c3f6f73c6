import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from conftest import rand_density
from qcent.core import (
    binary_entropy,
    check_state,
    entropy_of_spectrum,
    extended_shannon_entropy,
    g_function,
    hermitian_eigh,
    ket_to_dm,
    maximally_mixed,
    partial_trace,
    trace_distance,
    von_neumann_entropy,
)
from qcent.errors import (
    DimensionMismatch,
    InvalidState,
    NegativeWeight,
    NonHermitian,
    OutOfRange,
)

LN2 = math.log(2.0)


def entropy_logm(rho):
    # oracle: -Tr rho log rho through the matrix logarithm, full rank only
    return float(-np.trace(rho @ scipy.linalg.logm(rho)).real)


class TestEigh:
    def test_identity(self):
        w, _ = hermitian_eigh(np.eye(3))
        np.testing.assert_allclose(w, [1, 1, 1])

    def test_diagonal_descending(self):
        w, u = hermitian_eigh(np.diag([-1.0, 2.0]))
        np.testing.assert_allclose(w, [2, -1])
        np.testing.assert_allclose(np.abs(u), [[0, 1], [1, 0]])

    def test_pauli_x(self):
        w, _ = hermitian_eigh(np.array([[0, 1], [1, 0]]))
        np.testing.assert_allclose(w, [1, -1])

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitian):
            hermitian_eigh(np.array([[0, 1], [0, 0]]))

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionMismatch):
            hermitian_eigh(np.zeros((2, 3)))

    @pytest.mark.parametrize("d", [2, 5, 17, 64])
    def test_reconstruction(self, rng, d):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        m = g + g.conj().T
        w, u = hermitian_eigh(m)
        assert np.all(np.diff(w) <= 0)
        assert np.linalg.norm(u @ np.diag(w) @ u.conj().T - m) <= 1e-9 * np.linalg.norm(m)
        assert np.linalg.norm(u.conj().T @ u - np.eye(d)) <= 1e-9


class TestEntropy:
    def test_qubit_maximally_mixed(self):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(LN2, abs=1e-12)

    def test_pure_is_zero(self, rng):
        psi = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        assert von_neumann_entropy(ket_to_dm(psi / np.linalg.norm(psi))) == pytest.approx(0, abs=1e-12)

    def test_subnormalized(self):
        assert von_neumann_entropy(np.diag([0.25, 0.25])) == pytest.approx(0.5 * LN2, abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 6])
    def test_matches_logm_oracle(self, rng, d):
        rho = rand_density(rng, d)
        assert von_neumann_entropy(rho) == pytest.approx(entropy_logm(rho), abs=1e-10)

    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidState):
            von_neumann_entropy(np.eye(2))

    def test_rejects_negative(self):
        with pytest.raises(InvalidState):
            von_neumann_entropy(np.diag([1.2, -0.2]))

    def test_tiny_negative_eigenvalue_clamped(self):
        assert entropy_of_spectrum([1.0, -1e-12]) == pytest.approx(0.0, abs=1e-15)

    def test_check_state_returns_hermitian_part(self):
        a = np.array([[0.5, 1e-13j], [0, 0.5]])
        h = check_state(a)
        np.testing.assert_allclose(h, h.conj().T)

    @settings(max_examples=60, deadline=None)
    @given(c=st.floats(0.01, 1.0), seed=st.integers(0, 2**32 - 1), d=st.integers(2, 6))
    def test_homogeneity(self, c, seed, d):
        rho = rand_density(np.random.default_rng(seed), d)
        assert von_neumann_entropy(c * rho) == pytest.approx(c * von_neumann_entropy(rho), abs=1e-8)

    @settings(max_examples=60, deadline=None)
    @given(p=st.floats(0.0, 1.0), seed=st.integers(0, 2**32 - 1), d=st.integers(2, 6))
    def test_concavity_two_sided(self, p, seed, d):
        rng = np.random.default_rng(seed)
        r, s = rand_density(rng, d), rand_density(rng, d, rank=1)
        mix = von_neumann_entropy(p * r + (1 - p) * s)
        avg = p * von_neumann_entropy(r) + (1 - p) * von_neumann_entropy(s)
        assert avg - 1e-8 <= mix <= avg + binary_entropy(p) + 1e-8

    def test_orthogonal_supports_equality(self, rng):
        a = 0.3 * rand_density(rng, 2)
        b = 0.5 * rand_density(rng, 3)
        total = scipy.linalg.block_diag(a, b)
        pa = scipy.linalg.block_diag(a, np.zeros((3, 3)))
        pb = scipy.linalg.block_diag(np.zeros((2, 2)), b)
        rhs = von_neumann_entropy(pa) + von_neumann_entropy(pb) + extended_shannon_entropy([0.3, 0.5])
        assert von_neumann_entropy(total) == pytest.approx(rhs, abs=1e-10)


class TestScalarFunctions:
    @pytest.mark.parametrize("x, expected", [
        ((0.5, 0.5), LN2),
        ((1.0,), 0.0),
        ((0.25, 0.25), 0.5 * LN2),
    ])
    def test_extended_shannon(self, x, expected):
        assert extended_shannon_entropy(x) == pytest.approx(expected, abs=1e-12)

    def test_extended_shannon_negative(self):
        with pytest.raises(NegativeWeight):
            extended_shannon_entropy([0.5, -0.1])

    @pytest.mark.parametrize("p, expected", [(0.5, LN2), (0.0, 0.0), (1.0, 0.0), (0.25, 0.5623351446188083)])
    def test_binary_entropy(self, p, expected):
        assert binary_entropy(p) == pytest.approx(expected, abs=1e-12)

    def test_binary_entropy_range(self):
        with pytest.raises(OutOfRange):
            binary_entropy(1.5)

    def test_binary_entropy_symmetric_concave(self):
        p = np.linspace(0, 1, 201)
        h = np.array([binary_entropy(x) for x in p])
        np.testing.assert_allclose(h, h[::-1], atol=1e-14)
        assert np.all(np.diff(h, 2) <= 1e-12)

    def test_g_values(self):
        assert g_function(0.0) == 0.0
        assert g_function(1.0) == pytest.approx(2 * LN2, abs=1e-14)
        assert g_function(0.5) == pytest.approx(1.5 * binary_entropy(1 / 3), abs=1e-14)
        assert g_function(0.5) == pytest.approx(0.9548, abs=1e-4)

    def test_g_increasing(self):
        x = np.linspace(0, 5, 400)
        g = np.array([g_function(v) for v in x])
        assert np.all(np.diff(g) > 0)

    def test_g_negative(self):
        with pytest.raises(OutOfRange):
            g_function(-0.1)


class TestTraceDistance:
    def test_equal(self, rng):
        r = rand_density(rng, 3)
        assert trace_distance(r, r) == pytest.approx(0, abs=1e-14)

    def test_orthogonal_pure(self):
        assert trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1.0)

    def test_half(self):
        assert trace_distance(np.diag([1.0, 0]), np.eye(2) / 2) == pytest.approx(0.5)

    def test_svd_oracle_and_symmetry(self, rng):
        r, s = rand_density(rng, 4), rand_density(rng, 4, 2)
        oracle = 0.5 * np.linalg.svd(r - s, compute_uv=False).sum()
        assert trace_distance(r, s) == pytest.approx(oracle, abs=1e-12)
        assert trace_distance(s, r) == pytest.approx(oracle, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            trace_distance(np.eye(2) / 2, np.eye(3) / 3)


class TestPartialTrace:
    def test_product(self, rng):
        a, b = rand_density(rng, 2), rand_density(rng, 3)
        np.testing.assert_allclose(partial_trace(np.kron(a, b), (2, 3), 0), a, atol=1e-14)
        np.testing.assert_allclose(partial_trace(np.kron(a, b), (2, 3), 1), b, atol=1e-14)

    def test_three_parties(self, rng):
        a, b, c = rand_density(rng, 2), rand_density(rng, 2), rand_density(rng, 3)
        out = partial_trace(np.kron(np.kron(a, b), c), (2, 2, 3), [0, 2])
        np.testing.assert_allclose(out, np.kron(a, c), atol=1e-14)

    def test_maximally_mixed(self):
        assert von_neumann_entropy(maximally_mixed(5)) == pytest.approx(math.log(5), abs=1e-12)


def test_eigendecomposition_alias():
    from qcent.core import hermitian_eigendecomposition
    w, u = hermitian_eigendecomposition(np.diag([1.0, 3.0]))
    np.testing.assert_allclose(w, [3.0, 1.0])
