import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm
from scipy.stats import unitary_group

from jumpcodes.codes import codeword_ket, jump_code, product_code_basis, projector
from jumpcodes.gates import (
    GateHamiltonian,
    LeakageError,
    SynthesisError,
    ThetaMatrix,
    commutator_formula_target,
    e_op,
    ent_unitary,
    f_op,
    gate_theta_matrix,
    gell_mann_matrices,
    h_ent,
    is_primitive_diagonal,
    leakage_certificate,
    lie_closure,
    lie_closure_dimension,
    logical_matrix,
    phase_aligned_distance,
    program_from_json,
    program_logical_unitary,
    program_to_json,
    program_unitary,
    schmidt_rank,
    span_residual,
    su3_generators,
    sum_formula_target,
    symmetric_to_gate_hamiltonian,
    synthesize_qutrit,
    table1_matrices,
    trotter_commutator,
    trotter_sum,
    v_gate,
)
from jumpcodes.states import (
    Ket,
    NUMBER,
    SIGMA_X,
    LocalOperator,
    OperatorSum,
    apply_local,
    basis_ket,
    sum_to_dense,
)

TABLE1 = {
    "E12": np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float),
    "E23": np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=float),
    "E13": np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float),
    "F12": np.diag([1.0, 0.0, 0.0]),
    "F13": np.diag([0.0, 1.0, 0.0]),
    "F23": np.diag([0.0, 0.0, 1.0]),
}


def rand_herm3(rng):
    M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return 0.5 * (M + M.conj().T)


class TestPairOperators:
    def test_swap_fixes_equal_bits(self):
        out = apply_local(e_op(1, 2), basis_ket("0011"))
        assert np.allclose(out.amplitudes, basis_ket("0011").amplitudes)

    def test_swap_exchanges_bits(self):
        out = apply_local(e_op(1, 2), basis_ket("0101"))
        assert np.allclose(out.amplitudes, basis_ket("0110").amplitudes)

    def test_projector_kills_unequal_bits(self):
        out = apply_local(f_op(1, 2), basis_ket("0110"))
        assert np.all(out.amplitudes == 0)
        kept = apply_local(f_op(1, 2), basis_ket("0011"))
        assert np.allclose(kept.amplitudes, basis_ket("0011").amplitudes)

    def test_equal_indices_rejected(self):
        with pytest.raises(ValueError):
            e_op(2, 2)


class TestLogicalMatrix:
    def test_table1_exact(self):
        got = table1_matrices(0.0)
        for name, expected in TABLE1.items():
            assert np.abs(got[name] - expected).max() < 1e-12, name

    def test_leakage_raises(self):
        basis = [codeword_ket(jump_code(4, 0.0), i) for i in range(3)]
        flip = OperatorSum((LocalOperator((1,), SIGMA_X),))  # changes excitation count
        with pytest.raises(LeakageError):
            logical_matrix(flip, basis)

    def test_all_pair_hamiltonians_leave_code_invariant(self):
        code = jump_code(4, 0.0)
        P = projector(code)
        one = np.eye(16)
        for name, gh in [
            (k, GateHamiltonian(((k[0], (int(k[1]), int(k[2])), 1.0),)))
            for k in TABLE1
        ]:
            H = gh.matrix(4)
            assert np.linalg.norm((one - P) @ H @ P, 2) < 1e-12, name


class TestSU3Generators:
    def test_c12_plus_matrix(self):
        gens = {g.name: g for g in su3_generators()}
        assert np.allclose(
            gens["C12+"].logical, [[0, 1, 0], [1, 0, 0], [0, 0, 0]], atol=1e-12
        )

    def test_c12_minus_pattern(self):
        gens = {g.name: g for g in su3_generators()}
        M = gens["C12-"].logical
        assert np.linalg.norm(M - M.conj().T) < 1e-12
        nonzero = np.abs(M) > 1e-12
        assert np.all(np.isclose(np.abs(M[nonzero]), 1.0))
        assert np.all(np.isclose(M[nonzero].real, 0.0))

    def test_all_hermitian_with_realizations(self):
        for g in su3_generators():
            assert np.linalg.norm(g.logical - g.logical.conj().T) < 1e-12
            assert (g.hamiltonian is not None) != (g.commutator_of is not None)

    def test_commutator_realizations_consistent(self):
        gens = {g.name: g for g in su3_generators()}
        for name in ("C12-", "C13-", "C23-"):
            a, b = gens[name].commutator_of
            A, B = gens[a].logical, gens[b].logical
            assert np.allclose(gens[name].logical, 1j * (A @ B - B @ A))


class TestLieClosure:
    def test_paper_generators_close_to_u3(self):
        gens = [g.logical for g in su3_generators()]
        assert lie_closure_dimension(gens) == (9, 8)

    def test_single_diagonal_is_abelian(self):
        assert lie_closure_dimension([np.diag([1.0, -1.0, 0.0])]) == (1, 1)

    def test_gell_mann_closure(self):
        assert lie_closure_dimension(gell_mann_matrices()) == (8, 8)

    def test_traceless_part_contains_gell_mann(self):
        closure = lie_closure([g.logical for g in su3_generators()])
        traceless = [M - np.trace(M) / 3.0 * np.eye(3) for M in closure.basis]
        for gm in gell_mann_matrices():
            assert span_residual(traceless, gm) < 1e-10


class TestTrotterFormulas:
    def test_commuting_pair_exact(self):
        d1 = np.diag([0.3, -1.0, 0.7]).astype(complex)
        d2 = np.diag([1.1, 0.2, -0.4]).astype(complex)
        target = sum_formula_target(d1, d2, 1.3, 0.8)
        for n in (1, 3, 10):
            prog = trotter_sum(d1, d2, 1.3, 0.8, n)
            assert np.linalg.norm(program_unitary(prog) - target) < 1e-12

    def test_sum_formula_error_halves(self):
        rng = np.random.default_rng(20)
        for _ in range(5):
            H1, H2 = rand_herm3(rng), rand_herm3(rng)
            target = sum_formula_target(H1, H2, 1.0, 1.0)
            errs = []
            for n in (64, 128):
                U = program_unitary(trotter_sum(H1, H2, 1.0, 1.0, n))
                errs.append(np.linalg.norm(U - target, 2))
            ratio = errs[0] / errs[1]
            assert 1.6 <= ratio <= 2.4, ratio

    def test_commutator_formula_sqrt_scaling(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            H1, H2 = rand_herm3(rng), rand_herm3(rng)
            target = commutator_formula_target(H1, H2, 1.0, 1.0)
            errs = []
            for n in (256, 512):
                U = program_unitary(trotter_commutator(H1, H2, 1.0, 1.0, n))
                errs.append(np.linalg.norm(U - target, 2))
            ratio = errs[0] / errs[1]
            assert np.sqrt(2.0) * 0.8 <= ratio <= np.sqrt(2.0) * 1.2, ratio

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            trotter_sum(np.eye(3), np.eye(3), 1.0, 1.0, 0)


class TestSynthesis:
    def setup_method(self):
        self.code = jump_code(4, 0.0)
        self.basis = [codeword_ket(self.code, i) for i in range(3)]

    def test_identity_target_empty_program(self):
        prog = synthesize_qutrit(np.eye(3), self.code, 1e-2)
        assert prog.segments == []
        assert prog.achieved_error == 0.0

    def test_real_symmetric_target_single_segment(self):
        tau = np.pi / 3.0
        target = expm(-1j * tau * TABLE1["E12"])
        prog = synthesize_qutrit(target, self.code, 1e-2)
        assert len(prog.segments) == 1
        assert prog.achieved_error < 1e-10
        U = program_logical_unitary(prog, self.basis)
        assert phase_aligned_distance(U, target) < 1e-10

    def test_random_targets_reach_tolerance(self):
        for k in range(4):
            U = unitary_group.rvs(3, random_state=300 + k)
            prog = synthesize_qutrit(U, self.code, 1e-2)
            assert prog.achieved_error <= 1e-2
            got = program_logical_unitary(prog, self.basis)
            assert phase_aligned_distance(got, U) <= 1e-2
            assert leakage_certificate(prog, self.code) <= 1e-12

    def test_soundness_against_physical_product(self):
        U = unitary_group.rvs(3, random_state=77)
        prog = synthesize_qutrit(U, self.code, 1e-2)
        full = program_unitary(prog, n_qubits=4)
        C = np.column_stack([b.amplitudes for b in self.basis])
        restricted = C.conj().T @ full @ C
        assert phase_aligned_distance(restricted, U) <= 1e-2

    def test_unreachable_epsilon_raises_with_partial_program(self):
        U = unitary_group.rvs(3, random_state=42)
        with pytest.raises(SynthesisError) as exc:
            synthesize_qutrit(U, self.code, 1e-12, n_cap=8)
        assert exc.value.program.segments
        assert exc.value.achieved_error > 1e-12

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            synthesize_qutrit(np.ones((3, 3)), self.code, 1e-2)

    def test_symmetric_expansion_unique_and_exact(self):
        rng = np.random.default_rng(31)
        S = rng.normal(size=(3, 3))
        S = 0.5 * (S + S.T)
        gh = symmetric_to_gate_hamiltonian(S)
        got = logical_matrix(gh, self.basis)
        assert np.abs(got - S).max() < 1e-12


class TestEntanglementGate:
    def setup_method(self):
        self.code4 = jump_code(4, 0.0)
        self.states = product_code_basis(self.code4, self.code4)
        self.C9 = np.column_stack([s.amplitudes for s in self.states])

    def test_h_ent_eigenvalues(self):
        H = h_ent().matrix(8)
        for label in ("00110011", "11001100", "00111100", "11000011"):
            v = basis_ket(label).amplitudes
            assert np.allclose(H @ v, v)
        plus = (basis_ket("01100110").amplitudes + basis_ket("10011001").amplitudes) / np.sqrt(2)
        minus = (basis_ket("01101001").amplitudes + basis_ket("10010110").amplitudes) / np.sqrt(2)
        assert np.allclose(H @ plus, 2.0 * plus)
        assert np.linalg.norm(H @ minus) < 1e-14

    def test_h_ent_hermitian_and_number_conserving(self):
        H = h_ent().matrix(8)
        assert np.linalg.norm(H - H.conj().T) < 1e-14
        N_op = sum_to_dense(
            OperatorSum(tuple(LocalOperator((a,), NUMBER) for a in range(1, 9))), 8
        )
        assert np.linalg.norm(H @ N_op - N_op @ H) < 1e-12

    def test_h_ent_leaves_35_word_code_invariant(self):
        H = h_ent().matrix(8)
        P35 = projector(jump_code(8, 0.0))
        assert np.linalg.norm((np.eye(256) - P35) @ H @ P35, 2) < 1e-12

    def test_no_leakage_on_tau_grid(self):
        P35 = projector(jump_code(8, 0.0))
        P9 = self.C9 @ self.C9.conj().T
        one = np.eye(256)
        for tau in (0.0, np.pi / 7.0, np.pi / 2.0, np.pi, 2.0 * np.pi):
            U = ent_unitary(tau)
            assert np.linalg.norm((one - P35) @ U @ P9, 2) < 1e-12

    def test_v_gate_diagonal_action(self):
        V = v_gate()
        logical = self.C9.conj().T @ V @ self.C9
        assert np.abs(logical - np.diag([1.0] * 8 + [-1.0])).max() < 1e-10

    def test_v_gate_entangles_uniform_product(self):
        V = v_gate()
        uniform = self.C9.sum(axis=1) / 3.0
        assert schmidt_rank(Ket(8, uniform), 4) == 1
        assert schmidt_rank(Ket(8, V @ uniform), 4) == 2


class TestPrimitivity:
    def test_v_gate_theta_fails_criterion(self):
        theta = gate_theta_matrix(
            v_gate(), product_code_basis(jump_code(4, 0.0), jump_code(4, 0.0)), 3
        )
        primitive, witness = is_primitive_diagonal(theta)
        assert not primitive
        assert witness is not None
        j, k, p, q = witness
        th = theta.theta
        delta = th[j, k] + th[p, q] - th[j, q] - th[p, k]
        assert abs(np.mod(delta + np.pi, 2 * np.pi) - np.pi) > 1e-8
        # the named inequality: theta_11 + theta_22 = pi while theta_12 + theta_21 = 0
        assert abs((th[1, 1] + th[2, 2]) - np.pi) < 1e-9
        assert abs(th[1, 2] + th[2, 1]) < 1e-9

    @given(
        st.lists(st.floats(0, 2 * np.pi), min_size=3, max_size=3),
        st.lists(st.floats(0, 2 * np.pi), min_size=3, max_size=3),
    )
    def test_separable_phases_primitive(self, a, b):
        theta = ThetaMatrix(np.add.outer(np.array(a), np.array(b)))
        primitive, witness = is_primitive_diagonal(theta)
        assert primitive and witness is None

    def test_zero_phases_primitive(self):
        assert is_primitive_diagonal(ThetaMatrix(np.zeros((3, 3))))[0]


class TestProgramSerialization:
    def test_round_trip(self):
        prog = synthesize_qutrit(
            unitary_group.rvs(3, random_state=5), jump_code(4, 0.0), 1e-2
        )
        data = program_to_json(prog)
        again = program_from_json(data)
        basis = [codeword_ket(jump_code(4, 0.0), i) for i in range(3)]
        U1 = program_logical_unitary(prog, basis)
        U2 = program_logical_unitary(again, basis)
        assert np.linalg.norm(U1 - U2) < 1e-12

    def test_wire_format(self):
        gh = GateHamiltonian((("F", (2, 6), 0.5),))
        from jumpcodes.gates import HamiltonianProgram, ProgramSegment

        data = program_to_json(HamiltonianProgram([ProgramSegment(gh, np.pi)]))
        assert data["segments"] == [{"terms": [["F", 2, 6, 0.5]], "duration": np.pi}]

    def test_abstract_programs_not_serializable(self):
        prog = trotter_sum(np.eye(3), np.eye(3), 1.0, 1.0, 1)
        with pytest.raises(ValueError):
            program_to_json(prog)
