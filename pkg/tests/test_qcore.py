import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from djnmr.qcore import (
    HADAMARD,
    I2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    apply,
    basis_state,
    global_phase_equal,
    hadamard_n,
    is_unitary,
    kron,
    kron_all,
)

PAULIS = [I2, SIGMA_X, SIGMA_Y, SIGMA_Z]


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(I2, I2), np.eye(4))

    def test_zz(self):
        np.testing.assert_array_equal(kron(SIGMA_Z, SIGMA_Z), np.diag([1, -1, -1, 1]))

    def test_hh_on_00(self):
        # 4x4 matrix times basis vector: first column of H (x) H
        hh = kron(HADAMARD, HADAMARD)
        np.testing.assert_allclose(hh @ basis_state(0, 2), [0.5, 0.5, 0.5, 0.5], atol=1e-15)

    def test_left_factor_is_qubit_one(self):
        # sigma_z on qubit 1 flips the sign of |10> (index 2)
        out = apply(kron(SIGMA_Z, I2), basis_state(2, 2))
        np.testing.assert_array_equal(out, -basis_state(2, 2))

    def test_assembly_order_is_left_to_right(self):
        a, b, c = SIGMA_X, SIGMA_Y, SIGMA_Z
        np.testing.assert_array_equal(kron_all([a, b, c]), kron(kron(a, b), c))

    @pytest.mark.parametrize("a", range(4))
    @pytest.mark.parametrize("b", range(4))
    @pytest.mark.parametrize("c", range(4))
    def test_associative_exact_on_paulis(self, a, b, c):
        pa, pb, pc = PAULIS[a], PAULIS[b], PAULIS[c]
        np.testing.assert_array_equal(kron(kron(pa, pb), pc), kron(pa, kron(pb, pc)))

    def test_associative_generic(self):
        rng = np.random.default_rng(7)
        a, b, c = (random_unitary(rng, 2) for _ in range(3))
        lhs = kron(kron(a, b), c)
        assert lhs.shape == (8, 8)
        np.testing.assert_allclose(lhs, kron(a, kron(b, c)), rtol=0, atol=1e-15)


class TestHadamard:
    def test_one_qubit(self):
        np.testing.assert_allclose(hadamard_n(1), np.array([[1, 1], [1, -1]]) / np.sqrt(2))

    def test_self_inverse(self):
        h = hadamard_n(1)
        np.testing.assert_allclose(h @ h, np.eye(2), atol=1e-15)

    def test_two_qubit_entry(self):
        # row |01>, column |11>: (-1)^(0*1 + 1*1) / 2
        assert hadamard_n(2)[0b01, 0b11] == pytest.approx(-0.5)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_unitary_and_involutory(self, n):
        h = hadamard_n(n)
        assert np.max(np.abs(h @ h - np.eye(2**n))) <= 1e-12
        assert np.max(np.abs(h.conj().T @ h - np.eye(2**n))) <= 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_bitwise_sign_formula(self, n):
        dim = 2**n
        expected = np.array(
            [[(-1) ** bin(x & y).count("1") for y in range(dim)] for x in range(dim)]
        ) / np.sqrt(dim)
        np.testing.assert_allclose(hadamard_n(n), expected, atol=1e-15)

    @pytest.mark.parametrize("n", [0, 5, -1])
    def test_out_of_range(self, n):
        with pytest.raises(ValueError):
            hadamard_n(n)


class TestGlobalPhase:
    def test_reflexive(self):
        u = hadamard_n(2)
        res = global_phase_equal(u, u)
        assert res.equal and res.fidelity == pytest.approx(1.0)

    def test_negation(self):
        u = kron(SIGMA_Z, SIGMA_X)
        res = global_phase_equal(u, -u)
        assert res.equal and res.fidelity == pytest.approx(1.0)

    def test_orthogonal(self):
        res = global_phase_equal(SIGMA_Z, SIGMA_X)
        assert not res.equal and res.fidelity == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            global_phase_equal(I2, np.eye(4))

    def test_equivalence_at_zero_tol(self):
        ops = [kron(p, q) for p in PAULIS for q in PAULIS]
        for u in ops:
            assert global_phase_equal(u, u, tol=0).equal
            assert global_phase_equal(u, 1j * u, tol=0).equal
            assert global_phase_equal(1j * u, u, tol=0).equal

    def test_transitivity_at_half_tol(self):
        rng = np.random.default_rng(3)
        tol = 1e-9
        u = random_unitary(rng, 4)
        v = np.exp(0.4j) * u
        w = np.exp(-1.3j) * v
        assert global_phase_equal(u, v, tol / 2) and global_phase_equal(v, w, tol / 2)
        assert global_phase_equal(u, w, tol)


class TestApply:
    def test_identity(self):
        psi = np.array([0.6, 0.8j])
        np.testing.assert_array_equal(apply(I2, psi), psi)

    def test_hadamard_on_zero(self):
        np.testing.assert_allclose(apply(HADAMARD, basis_state(0, 1)), np.ones(2) / np.sqrt(2))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply(np.eye(4), np.ones(2))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4))
    def test_norm_preserved(self, seed, n):
        rng = np.random.default_rng(seed)
        u = random_unitary(rng, 2**n)
        assert is_unitary(u)
        psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        psi /= np.linalg.norm(psi)
        assert abs(np.linalg.norm(apply(u, psi)) - 1) <= 1e-10
