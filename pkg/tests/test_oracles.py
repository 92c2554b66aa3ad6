from math import comb

import numpy as np
import pytest

from djnmr.oracles import (
    BooleanFunction,
    Classification,
    NeitherError,
    algebraic_normal_form,
    anf_degree,
    build_ancilla_oracle,
    build_phase_oracle,
    canonical_operator,
    canonical_operators,
    classify,
    enumerate_functions,
    resolve_function,
    run_dj,
)
from djnmr.qcore import SIGMA_Z, kron_all, I2

C, B, N = Classification.CONSTANT, Classification.BALANCED, Classification.NEITHER

U6_FUNCTION = BooleanFunction.from_callable(3, lambda a, b, c: a ^ (b & c))
# signs of the U9 expression evaluated entrywise over x = 000..111
U9_SIGNS = (1, -1, 1, 1, 1, -1, -1, -1)


class TestClassify:
    @pytest.mark.parametrize(
        "table,expected",
        [("0000", C), ("0110", B), ("0001", N), ("1111", C), ("1", None)],
    )
    def test_examples(self, table, expected):
        if expected is None:
            with pytest.raises(ValueError):
                BooleanFunction(2, tuple(map(int, table)))
            return
        assert classify(BooleanFunction(2, tuple(map(int, table)))) is expected

    def test_key_is_big_endian(self):
        f = BooleanFunction.from_key(2, 1)
        assert f.bitstring == "0001"
        assert f.key == 1
        assert BooleanFunction.from_key(3, 30) == U6_FUNCTION


class TestEnumerate:
    @pytest.mark.parametrize("n,count", [(1, 4), (2, 8), (3, 72)])
    def test_counts(self, n, count):
        funcs = enumerate_functions(n)
        assert len(funcs) == count == comb(2**n, 2 ** (n - 1)) + 2
        assert len({f.table for f in funcs}) == count

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_brute_force(self, n):
        size = 2**n
        brute = [k for k in range(2**size) if bin(k).count("1") in (0, size // 2, size)]
        assert [f.key for f in enumerate_functions(n)] == brute

    @pytest.mark.parametrize("n", [0, 4])
    def test_out_of_range(self, n):
        with pytest.raises(ValueError):
            enumerate_functions(n)


class TestPhaseOracle:
    def test_zero_function(self):
        assert build_phase_oracle(BooleanFunction(1, (0, 0))).signs == (1, 1)

    def test_identity_function_is_sigma_z(self):
        np.testing.assert_array_equal(build_phase_oracle(BooleanFunction(1, (0, 1))).matrix, SIGMA_Z)

    def test_u6_function_matches_operator_expression(self):
        z = lambda *q: kron_all([SIGMA_Z if k in q else I2 for k in (1, 2, 3)])  # noqa: E731
        e = z()
        expr = 0.5 * z(1) @ (e + z(2) + z(3) - z(2, 3))
        np.testing.assert_array_equal(build_phase_oracle(U6_FUNCTION).matrix, expr)

    def test_rejects_neither(self):
        with pytest.raises(NeitherError):
            build_phase_oracle(BooleanFunction(2, (0, 0, 0, 1)))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_hermitian_unitary_involutory(self, n):
        for f in enumerate_functions(n):
            u = build_phase_oracle(f).matrix
            np.testing.assert_array_equal(u, u.conj().T)
            np.testing.assert_array_equal(u @ u, np.eye(2**n))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_action_on_basis_states(self, n):
        for f in enumerate_functions(n):
            u = build_phase_oracle(f).matrix
            for x in range(2**n):
                e = np.zeros(2**n)
                e[x] = 1
                np.testing.assert_array_equal(u @ e, (-1) ** f(x) * e)


class TestAncillaOracle:
    def test_zero_function_is_identity(self):
        np.testing.assert_array_equal(build_ancilla_oracle(BooleanFunction(2, (0,) * 4)), np.eye(8))

    def test_flip(self):
        u = build_ancilla_oracle(BooleanFunction(1, (0, 1)))
        # |1>|0> (index 2) -> |1>|1> (index 3)
        assert u[3, 2] == 1 and u[2, 2] == 0

    def test_is_permutation(self):
        for f in enumerate_functions(3):
            u = build_ancilla_oracle(f).real
            assert set(np.unique(u)) <= {0.0, 1.0}
            np.testing.assert_array_equal(u.sum(axis=0), 1)
            np.testing.assert_array_equal(u.sum(axis=1), 1)

    def test_too_many_qubits(self):
        with pytest.raises(ValueError):
            build_ancilla_oracle(BooleanFunction(4, (0,) * 16))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_phase_kickback(self, n):
        minus = np.array([1, -1]) / np.sqrt(2)
        for f in enumerate_functions(n):
            u = build_ancilla_oracle(f)
            for x in range(2**n):
                ex = np.zeros(2**n)
                ex[x] = 1
                out = u @ np.kron(ex, minus)
                assert np.max(np.abs(out - (-1) ** f(x) * np.kron(ex, minus))) <= 1e-12


class TestANF:
    def brute_eval(self, monomials, n, x):
        bits = [(x >> (n - 1 - k)) & 1 for k in range(n)]
        return sum(all(bits[q - 1] for q in m) for m in monomials) % 2

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_round_trip(self, n):
        for key in range(2 ** (2**n)):
            f = BooleanFunction.from_key(n, key)
            anf = algebraic_normal_form(f)
            assert all(self.brute_eval(anf, n, x) == f(x) for x in range(2**n))

    def test_u6(self):
        assert algebraic_normal_form(U6_FUNCTION) == [(1,), (2, 3)]

    def test_no_balanced_three_bit_function_is_cubic(self):
        assert max(anf_degree(f) for f in enumerate_functions(3)) == 2
        assert anf_degree(BooleanFunction.from_key(3, 1)) == 3


class TestRunDJ:
    def test_constant_zero(self):
        final, v = run_dj(BooleanFunction(3, (0,) * 8))
        assert v.kind is C
        assert v.zero_state_amplitude == pytest.approx(1.0)

    def test_first_bit(self):
        final, v = run_dj(BooleanFunction.from_callable(3, lambda a, b, c: a))
        assert v.kind is B
        assert abs(v.zero_state_amplitude) < 1e-12
        assert abs(abs(final[0b100]) - 1) < 1e-12

    def test_u6(self):
        assert sum((-1) ** b for b in U6_FUNCTION.table) == 0
        _, v = run_dj(U6_FUNCTION)
        assert v.kind is B and abs(v.zero_state_amplitude) < 1e-12

    def test_rejects_neither(self):
        with pytest.raises(NeitherError):
            run_dj(BooleanFunction(2, (0, 0, 0, 1)))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exhaustive(self, n):
        for f in enumerate_functions(n):
            _, v = run_dj(f)
            amp = abs(v.zero_state_amplitude)
            # brute force: <0|H U H|0> = sum_x (-1)^f(x) / 2^n
            expected = abs(sum((-1) ** b for b in f.table)) / 2**n
            assert abs(amp - expected) <= 1e-10
            assert min(abs(amp), abs(amp - 1)) <= 1e-10
            assert v.kind is classify(f)


class TestCanonical:
    @pytest.mark.parametrize("n,count", [(1, 4), (2, 8), (3, 9)])
    def test_counts(self, n, count):
        assert len(canonical_operators(n)) == count

    def test_two_bit_u4(self):
        assert canonical_operator(2, "U4").oracle.signs == (1, -1, -1, 1)

    def test_two_bit_u5_is_negated_u1(self):
        u5 = canonical_operator(2, "U5")
        assert u5.oracle.signs == (-1, -1, -1, -1)
        assert u5.global_sign == -1

    def test_u9_signs(self):
        assert canonical_operator(3, "U9").oracle.signs == U9_SIGNS

    def test_u6_is_x1_xor_x2_and_x3(self):
        assert canonical_operator(3, "U6").function == U6_FUNCTION

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_labels_match_classification(self, n):
        for op in canonical_operators(n):
            assert classify(op.function) is op.label

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            canonical_operators(4)

    def test_resolve(self):
        assert resolve_function(3, "U6") == U6_FUNCTION
        assert resolve_function(3, "30") == U6_FUNCTION
        with pytest.raises(KeyError):
            resolve_function(2, "U9")
        with pytest.raises(ValueError):
            resolve_function(2, "banana")
