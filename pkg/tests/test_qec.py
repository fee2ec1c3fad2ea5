import numpy as np
import pytest

from jumpcodes.codes import JumpCode, codeword_ket, dfs_basis, dfs_projector, encode, jump_code, projector
from jumpcodes.dynamics import KrausSet, memory_model, no_jump_kraus, run_trajectory
from jumpcodes.qec import (
    correct_trajectory,
    dfs_check,
    dfs_factorization_residual,
    kl_check,
    kl_report_to_json,
    kraus_equivalent,
    petz_recovery_exact,
    recovery_unitary,
)
from jumpcodes.states import LOWER, LocalOperator, local_to_dense


def jump_matrix(alpha: int, n: int, kappa: float = 1.0) -> np.ndarray:
    return np.sqrt(kappa) * local_to_dense(LocalOperator((alpha,), LOWER), n)


class TestKLCheck:
    def test_known_position_reversible(self):
        kappa = 1.0
        P = projector(jump_code(4, 0.0))
        for alpha in range(1, 5):
            r = kl_check(KrausSet((jump_matrix(alpha, 4, kappa),)), P)
            assert r.reversible
            assert abs(r.lam[0, 0] - kappa / 2.0) < 1e-12
            assert r.residual < 1e-12

    def test_unknown_position_pair_fails(self):
        P = projector(jump_code(4, 0.0))
        L1, L2 = jump_matrix(1, 4), jump_matrix(2, 4)
        r = kl_check(KrausSet((L1, L2)), P)
        assert not r.reversible
        # a code word maps into another's jump support: nonzero cross element
        assert np.abs(P @ L1.conj().T @ L2 @ P).max() > 0.1

    def test_identity_trivially_reversible(self):
        P = projector(jump_code(4, 0.3))
        r = kl_check(KrausSet((np.eye(16),)), P)
        assert r.reversible and abs(r.lam[0, 0] - 1.0) < 1e-12

    def test_zero_rank_projector_rejected(self):
        with pytest.raises(ValueError):
            kl_check(KrausSet((np.eye(4),)), np.zeros((4, 4)))


class TestDFSCheck:
    def test_no_jump_family_passes(self):
        kappa, t = 1.0, 0.8
        P = dfs_projector(dfs_basis(4, 2))
        K0 = no_jump_kraus(memory_model(4, kappa), t).matrix
        r = dfs_check(KrausSet((K0,)), P)
        assert r.passed
        assert abs(r.lambdas[0] - np.exp(-kappa * t)) < 1e-12
        assert r.residuals[0] < 1e-12

    def test_jump_operator_fails(self):
        P = dfs_projector(dfs_basis(4, 2))
        r = dfs_check(KrausSet((jump_matrix(1, 4),)), P)
        assert not r.passed

    def test_identity(self):
        P = dfs_projector(dfs_basis(3, 1))
        r = dfs_check(KrausSet((np.eye(8),)), P)
        assert r.passed and abs(r.lambdas[0] - 1.0) < 1e-12

    def test_factorization_when_dfs_holds(self):
        model = memory_model(4, 1.0)
        P = dfs_projector(dfs_basis(4, 2))
        ks = KrausSet((no_jump_kraus(model, 0.3).matrix, no_jump_kraus(model, 0.9).matrix))
        assert dfs_check(ks, P).passed
        assert dfs_factorization_residual(ks, P) < 1e-9


class TestKrausEquivalent:
    def test_same_set(self):
        ks = KrausSet((jump_matrix(1, 2), np.eye(4)))
        assert kraus_equivalent(ks, ks)

    def test_unitary_mixing_preserves_channel(self):
        rng = np.random.default_rng(3)
        kappa, t = 1.0, 0.5
        p = 1.0 - np.exp(-kappa * t)
        K0 = np.diag([1.0, np.sqrt(1.0 - p)]).astype(complex)
        K1 = np.sqrt(p) * LOWER
        # random 2x2 unitary from QR
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        Q, _ = np.linalg.qr(M)
        mixed = KrausSet((Q[0, 0] * K0 + Q[0, 1] * K1, Q[1, 0] * K0 + Q[1, 1] * K1))
        assert kraus_equivalent(KrausSet((K0, K1)), mixed)

    def test_damping_differs_from_identity(self):
        p = 0.3
        damp = KrausSet((np.diag([1.0, np.sqrt(1 - p)]), np.sqrt(p) * LOWER))
        ident = KrausSet((np.eye(2),))
        assert not kraus_equivalent(damp, ident)


class TestRecoveryUnitary:
    def test_unitary(self):
        U = recovery_unitary(jump_code(4, 0.0), 2)
        assert np.linalg.norm(U.conj().T @ U - np.eye(16)) < 1e-10

    def test_inverts_each_codeword_jump(self):
        code = jump_code(4, 0.0)
        for alpha in range(1, 5):
            U = recovery_unitary(code, alpha)
            L = jump_matrix(alpha, 4)
            for i in range(code.count):
                c = codeword_ket(code, i).amplitudes
                image = L @ c
                image /= np.linalg.norm(image)
                fid = abs(np.vdot(c, U @ image)) ** 2
                assert fid > 1.0 - 1e-10

    def test_preserves_logical_superpositions(self):
        code = jump_code(4, 0.0)
        U = recovery_unitary(code, 3)
        L = jump_matrix(3, 4)
        rng = np.random.default_rng(4)
        for _ in range(10):
            a = rng.normal(size=3) + 1j * rng.normal(size=3)
            a /= np.linalg.norm(a)
            psi = encode(code, a).amplitudes
            out = L @ psi
            out /= np.linalg.norm(out)
            assert abs(np.vdot(psi, U @ out)) ** 2 >= 1.0 - 1e-10

    def test_deterministic(self):
        code = jump_code(4, 0.0)
        assert np.array_equal(recovery_unitary(code, 1), recovery_unitary(code, 1))

    def test_kl_failure_raises(self):
        # deliberately non-complementary pairing: diagonal KL entries differ
        broken = JumpCode(4, 0.0, [("0011", "0101"), ("0110", "1001")])
        with pytest.raises(ValueError):
            recovery_unitary(broken, 1)


class TestCorrectTrajectory:
    def setup_method(self):
        self.code = jump_code(4, 0.0)
        self.model = memory_model(4, 1.0)
        rng = np.random.default_rng(8)
        self.logical = rng.normal(size=3) + 1j * rng.normal(size=3)
        self.logical /= np.linalg.norm(self.logical)
        self.psi = encode(self.code, self.logical)

    def test_zero_jump_full_fidelity(self):
        rec = run_trajectory(self.model, self.psi, 0.05, 2, trajectory_id=0)
        if not rec.jumps:
            _, fid = correct_trajectory(rec, self.code, self.logical)
            assert fid > 1.0 - 1e-12

    def test_every_trajectory_recovers(self):
        total_jumps = 0
        for traj in range(60):
            rec = run_trajectory(self.model, self.psi, 3.0, 5, trajectory_id=traj)
            _, fid = correct_trajectory(rec, self.code, self.logical)
            assert fid >= 1.0 - 1e-9, (traj, len(rec.jumps), fid)
            total_jumps += len(rec.jumps)
        assert total_jumps > 60  # multi-jump records exercised

    def test_record_code_mismatch(self):
        rec = run_trajectory(memory_model(2, 1.0), encode(jump_code(2), [1.0]), 1.0, 3)
        with pytest.raises(ValueError):
            correct_trajectory(rec, self.code, self.logical)


class TestBruteForceAgreement:
    """kl_check verdicts vs the independent transpose-channel recovery oracle."""

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_known_position_agrees(self, n):
        code = jump_code(n, 0.0)
        P = projector(code)
        for alpha in (1, n // 2, n):
            ks = KrausSet((jump_matrix(alpha, n),))
            verdict = kl_check(ks, P).reversible
            assert verdict == petz_recovery_exact(ks, P)
            assert verdict

    @pytest.mark.parametrize("n", [4, 6])
    def test_unknown_position_agrees(self, n):
        code = jump_code(n, 0.0)
        P = projector(code)
        ks = KrausSet((jump_matrix(1, n), jump_matrix(2, n)))
        verdict = kl_check(ks, P).reversible
        assert verdict == petz_recovery_exact(ks, P)
        assert not verdict

    def test_identity_agrees(self):
        P = projector(jump_code(4, 0.0))
        ks = KrausSet((np.eye(16),))
        assert kl_check(ks, P).reversible
        assert petz_recovery_exact(ks, P)


def test_report_json_shape():
    P = projector(jump_code(4, 0.0))
    report = kl_check(KrausSet((jump_matrix(1, 4),)), P)
    data = kl_report_to_json(report)
    assert data["verdict"] == "reversible"
    assert data["lambda"][0][0][0] == pytest.approx(0.5)
    assert data["residual"] < 1e-12
