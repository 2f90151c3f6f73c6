import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rand_density
from qcent import channels as ch
from qcent.core import extended_shannon_entropy, ket_to_dm, partial_trace, von_neumann_entropy
from qcent.errors import DimensionMismatch, InvalidState
from qcent.sampling import random_channel, random_pure

LN2 = math.log(2.0)
Z = np.diag([1.0, -1.0])


def rand_chan(seed, d_in=None, d_out=None):
    rng = np.random.default_rng(seed)
    d_in = d_in or int(rng.integers(2, 5))
    d_out = d_out or int(rng.integers(2, 5))
    m = int(rng.integers(max(1, math.ceil(d_in / d_out)), 5))
    return random_channel(d_in, d_out, m, rng)


class TestConstruction:
    def test_zero_operators_dropped(self):
        c = ch.KrausChannel([np.eye(2), np.zeros((2, 2))])
        assert c.n_kraus == 1

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            ch.KrausChannel([np.zeros((2, 2))])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ch.KrausChannel([np.eye(2), np.eye(3)])

    def test_immutable(self):
        c = ch.identity_channel(2)
        with pytest.raises(ValueError):
            c.kraus[0][0, 0] = 3.0


class TestValidate:
    def test_unitary(self):
        r = ch.validate(ch.unitary_channel(np.array([[0, 1], [1, 0]])))
        assert r.passed and r.deviation == pytest.approx(0, abs=1e-15)

    def test_dephasing_pair(self):
        assert ch.validate(ch.qubit_dephasing(0.3)).passed

    def test_double_identity_fails(self):
        r = ch.validate(ch.KrausChannel([np.eye(2), np.eye(2)]))
        assert not r.passed and r.deviation == pytest.approx(1.0)

    def test_operation_kind(self):
        op = ch.KrausChannel([np.sqrt(0.5) * np.eye(2)], kind="operation")
        assert ch.validate(op).passed
        assert not ch.validate(ch.KrausChannel([np.sqrt(1.5) * np.eye(2)], kind="operation")).passed


class TestApply:
    def test_identity(self, rng):
        r = rand_density(rng, 3)
        np.testing.assert_allclose(ch.apply(ch.identity_channel(3), r), r, atol=1e-15)

    def test_dephasing_plus_state(self):
        plus = np.ones(2) / math.sqrt(2)
        np.testing.assert_allclose(ch.apply(ch.dephasing(2), ket_to_dm(plus)), np.eye(2) / 2, atol=1e-15)

    def test_depolarize_to_sigma(self, rng):
        sigma = rand_density(rng, 3)
        out = ch.apply(ch.depolarize_to(sigma, 2), rand_density(rng, 2))
        np.testing.assert_allclose(out, sigma, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ch.apply(ch.identity_channel(2), np.eye(3) / 3)

    def test_trace_preserved(self, rng):
        c = rand_chan(1)
        out = ch.apply(c, rand_density(rng, c.input_dim))
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)


class TestEntropies:
    def test_unitary_pure_zero(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        psi = random_pure(3, rng)
        assert ch.output_entropy(ch.unitary_channel(q), ket_to_dm(psi)) == pytest.approx(0, abs=1e-12)

    def test_depolarize_to_maximally_mixed(self, rng):
        out = ch.output_entropy(ch.depolarize_to(np.eye(4) / 4, 3), rand_density(rng, 3))
        assert out == pytest.approx(math.log(4), abs=1e-12)

    def test_mix_with_orthogonal_pure(self):
        phi = np.array([0, 1.0])
        c = ch.mix_with_pure(2, 0.5)
        assert ch.output_entropy(c, ket_to_dm(phi)) == pytest.approx(LN2, abs=1e-12)

    def test_complementary_unitary(self, rng):
        r = 0.7 * rand_density(rng, 2)
        np.testing.assert_allclose(ch.complementary_state(ch.identity_channel(2), r), [[0.7]], atol=1e-14)

    def test_complementary_dephasing(self):
        w = ch.complementary_state(ch.qubit_dephasing(0.3), np.eye(2) / 2)
        np.testing.assert_allclose(w, np.diag([0.7, 0.3]), atol=1e-14)

    def test_complementary_pinching(self, rng):
        r = rand_density(rng, 3)
        w = ch.complementary_state(ch.dephasing(3), r)
        np.testing.assert_allclose(w, np.diag(np.diag(r)), atol=1e-14)

    def test_entropy_exchange_half_dephasing(self):
        c = ch.KrausChannel([math.sqrt(0.5) * np.eye(2), math.sqrt(0.5) * Z])
        assert ch.entropy_exchange(c, np.eye(2) / 2) == pytest.approx(LN2, abs=1e-12)

    def test_entropy_exchange_unitary(self, rng):
        assert ch.entropy_exchange(ch.identity_channel(3), rand_density(rng, 3)) == pytest.approx(0, abs=1e-12)

    def test_complementary_matches_stinespring(self, rng):
        # oracle: build the isometry explicitly and trace out the output
        c = rand_chan(7)
        v = np.concatenate([np.kron(k, np.eye(1)) for k in c.kraus])  # (m*d_out, d_in), env-major
        r = rand_density(rng, c.input_dim)
        big = v @ r @ v.conj().T
        env = partial_trace(big, (c.n_kraus, c.output_dim), 0)
        np.testing.assert_allclose(ch.complementary_state(c, r), env, atol=1e-12)
        out = partial_trace(big, (c.n_kraus, c.output_dim), 1)
        np.testing.assert_allclose(ch.apply(c, r), out, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_pure_state_coincidence(self, seed):
        c = rand_chan(seed)
        psi = random_pure(c.input_dim, np.random.default_rng(seed + 1))
        rho = ket_to_dm(psi)
        assert abs(ch.output_entropy(c, rho) - ch.entropy_exchange(c, rho)) <= 1e-8
        assert ch.pure_output_entropy(c, psi) == pytest.approx(ch.output_entropy(c, rho), abs=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_subadditivity_witness(self, seed):
        c = rand_chan(seed)
        rho = rand_density(np.random.default_rng(seed + 2), c.input_dim)
        assert von_neumann_entropy(rho) <= ch.output_entropy(c, rho) + ch.entropy_exchange(c, rho) + 1e-8

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_kraus_norm_bound(self, seed):
        c = rand_chan(seed)
        psi = random_pure(c.input_dim, np.random.default_rng(seed + 3))
        w = np.sum(np.abs(c.stacked() @ psi) ** 2, axis=1)
        assert ch.pure_output_entropy(c, psi) <= extended_shannon_entropy(w) + 1e-8

    def test_output_entropy_with_pure_sup_upper(self, rng):
        for seed in range(20):
            c = rand_chan(seed)
            rho = rand_density(rng, c.input_dim)
            upper = math.log(ch.choi_rank(c))
            assert ch.output_entropy(c, rho) <= von_neumann_entropy(rho) + upper + 1e-8


class TestComposition:
    def test_identity_compose(self, rng):
        c = rand_chan(3)
        r = rand_density(rng, c.input_dim)
        comp = ch.compose(ch.identity_channel(c.output_dim), c)
        np.testing.assert_allclose(ch.apply(comp, r), ch.apply(c, r), atol=1e-12)

    def test_unitaries(self, rng):
        u, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        w, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        comp = ch.compose(ch.unitary_channel(w), ch.unitary_channel(u))
        r = rand_density(rng, 3)
        np.testing.assert_allclose(ch.apply(comp, r), (w @ u) @ r @ (w @ u).conj().T, atol=1e-12)

    def test_dephasing_idempotent(self, rng):
        d = ch.dephasing(4)
        r = rand_density(rng, 4)
        np.testing.assert_allclose(ch.apply(ch.compose(d, d), r), ch.apply(d, r), atol=1e-14)

    def test_compose_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ch.compose(ch.identity_channel(3), ch.identity_channel(2))

    def test_tensor_product_action(self, rng):
        a, b = rand_chan(4), rand_chan(5)
        r, s = rand_density(rng, a.input_dim), rand_density(rng, b.input_dim)
        lhs = ch.apply(ch.tensor(a, b), np.kron(r, s))
        np.testing.assert_allclose(lhs, np.kron(ch.apply(a, r), ch.apply(b, s)), atol=1e-12)
        assert ch.validate(ch.tensor(a, b)).passed

    def test_tensor_additive_entropy(self, rng):
        a, b = rand_chan(8), rand_chan(9)
        r, s = rand_density(rng, a.input_dim), rand_density(rng, b.input_dim)
        total = ch.output_entropy(ch.tensor(a, b), np.kron(r, s))
        assert total == pytest.approx(ch.output_entropy(a, r) + ch.output_entropy(b, s), abs=1e-10)

    def test_identity_tensor_identity(self, rng):
        r = rand_density(rng, 6)
        np.testing.assert_allclose(
            ch.apply(ch.tensor(ch.identity_channel(2), ch.identity_channel(3)), r), r, atol=1e-14)


class TestChoi:
    def test_unitary_rank_one(self):
        assert ch.choi_rank(ch.unitary_channel(np.array([[0, 1], [1, 0]]))) == 1

    def test_dephasing_rank_two(self):
        assert ch.choi_rank(ch.qubit_dephasing(0.3)) == 2

    def test_depolarizing_full(self):
        assert ch.choi_rank(ch.depolarize_to(np.eye(3) / 3, 3)) == 9

    def test_redundant_kraus_list(self):
        c = ch.KrausChannel([np.sqrt(0.5) * np.eye(2), np.sqrt(0.5) * np.eye(2)])
        assert c.n_kraus == 2 and ch.choi_rank(c) == 1

    def test_rank_oracle(self):
        for seed in range(10):
            c = rand_chan(seed)
            assert ch.choi_rank(c) == np.linalg.matrix_rank(ch.choi_matrix(c), tol=1e-8)

    def test_tensor_multiplicative(self):
        for seed in range(10):
            a, b = rand_chan(seed, d_in=2), rand_chan(seed + 100, d_in=2)
            assert ch.choi_rank(ch.tensor(a, b)) == ch.choi_rank(a) * ch.choi_rank(b)

    def test_choi_partial_trace_is_identity(self):
        c = rand_chan(11)
        tr_out = partial_trace(ch.choi_matrix(c), (c.input_dim, c.output_dim), 0)
        np.testing.assert_allclose(tr_out, np.eye(c.input_dim), atol=1e-12)


class TestPurify:
    def test_pure(self, rng):
        psi = random_pure(3, rng)
        vec = ch.purify(ket_to_dm(psi))
        red = partial_trace(np.outer(vec, vec.conj()), (3, 3), 0)
        np.testing.assert_allclose(red, ket_to_dm(psi), atol=1e-12)

    def test_bell_from_maximally_mixed(self):
        vec = ch.purify(np.eye(2) / 2)
        schmidt = np.linalg.svd(vec.reshape(2, 2), compute_uv=False)
        np.testing.assert_allclose(schmidt, [1 / math.sqrt(2)] * 2, atol=1e-14)

    def test_schmidt_coefficients(self):
        vec = ch.purify(np.diag([0.9, 0.1]))
        schmidt = np.linalg.svd(vec.reshape(2, 2), compute_uv=False)
        np.testing.assert_allclose(schmidt, [math.sqrt(0.9), math.sqrt(0.1)], atol=1e-14)

    def test_random(self, rng):
        r = rand_density(rng, 4)
        vec = ch.purify(r)
        np.testing.assert_allclose(partial_trace(np.outer(vec, vec.conj()), (4, 4), 0), r, atol=1e-12)

    def test_needs_unit_trace(self):
        with pytest.raises(InvalidState):
            ch.purify(np.eye(2) / 4)


class TestGenerators:
    def test_example1_truncation(self):
        c = ch.example1_pinching(0.5, 10)
        assert ch.validate(c).passed
        assert c.n_kraus == 11
        np.testing.assert_allclose(ch.example1_coefficients(0.5, 3), 0.5 / np.log([2, 3, 4]))

    def test_example1_alpha_range(self):
        with pytest.raises(ValueError):
            ch.example1_pinching(0.9, 4)

    def test_partial_trace_channel(self, rng):
        r = rand_density(rng, 6)
        np.testing.assert_allclose(ch.apply(ch.partial_trace_channel(2, 3), r),
                                   partial_trace(r, (2, 3), 0), atol=1e-14)

    def test_mix_with_pure_action(self, rng):
        r = rand_density(rng, 3)
        out = ch.apply(ch.mix_with_pure(3, 0.3), r)
        expected = 0.7 * r + 0.3 * np.diag([1.0, 0, 0])
        np.testing.assert_allclose(out, expected, atol=1e-14)
