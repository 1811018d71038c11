"""Kernel linear algebra: eigensolver contract, definiteness, roots, Schur."""

import numpy as np
import pytest

from contractcert import linalg
from contractcert.errors import DimensionMismatch, NotPositiveDefinite, SingularBlock


def lam_max_2x2(m):
    """Closed-form largest eigenvalue of a symmetric 2x2 matrix."""
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return 0.5 * (tr + np.sqrt(tr * tr - 4.0 * det))


def random_spd(rng, n):
    g = rng.standard_normal((n, n))
    return g @ g.T + 0.1 * np.eye(n)


class TestSymEig:
    def test_identity(self):
        w, v = linalg.sym_eig(np.eye(3))
        assert np.allclose(w, [1.0, 1.0, 1.0])
        assert np.allclose(v @ v.T, np.eye(3), atol=1e-12)

    def test_diagonal_sorted_ascending(self):
        w, _ = linalg.sym_eig(np.diag([5.0, -2.0]))
        assert np.allclose(w, [-2.0, 5.0])

    def test_skew_gram(self):
        # multiply the skew matrix by its transpose by hand: diag(16, 16)
        skew = np.array([[0.0, 4.0], [-4.0, 0.0]])
        gram = skew.T @ skew
        assert np.allclose(gram, np.diag([16.0, 16.0]))
        w, _ = linalg.sym_eig(gram)
        assert np.allclose(w, [16.0, 16.0])

    def test_reconstruction_tolerance(self):
        rng = np.random.default_rng(0)
        for n in (1, 3, 7, 16):
            m = random_spd(rng, n) - 2.0 * np.eye(n)
            w, v = linalg.sym_eig(m)
            recon = (v * w) @ v.T
            tol = 1e-10 * n * np.abs(m).max()
            assert np.max(np.abs(recon - m)) <= tol
            assert np.all(np.diff(w) >= 0)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            linalg.sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_symmetrize_averages_small_asymmetry(self):
        m = np.array([[1.0, 2.0], [2.0 + 1e-12, 1.0]])
        out = linalg.symmetrize(m)
        assert np.array_equal(out, out.T)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            linalg.symmetrize(np.zeros((2, 3)))


class TestIsNsd:
    def test_zeros(self):
        verdict, lam = linalg.is_nsd(np.zeros((2, 2)), tol=0.0)
        assert verdict and lam == 0.0

    def test_hand_checked_negative(self):
        # det = 4 - 1 = 3 > 0 and trace < 0, so both eigenvalues negative
        m = np.array([[-0.02, 1.0], [1.0, -200.0]])
        verdict, lam = linalg.is_nsd(m)
        assert verdict and lam < 0
        assert np.isclose(lam, lam_max_2x2(m))

    def test_positive_diagonal(self):
        verdict, lam = linalg.is_nsd(np.diag([6.7, 6.7]))
        assert not verdict
        assert np.isclose(lam, 6.7)

    def test_default_tolerance_scales_with_dim(self):
        m = np.diag([3e-9, -1.0])
        verdict, _ = linalg.is_nsd(m)  # tol = 1e-9 * 2
        assert not verdict
        verdict, _ = linalg.is_nsd(m, tol=1e-8)
        assert verdict

    def test_agrees_with_eigenvalues(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(1, 9))
            m = linalg.symmetrize(random_spd(rng, n) - rng.uniform(0, 4) * np.eye(n))
            verdict, lam = linalg.is_nsd(m, tol=0.0)
            evs = np.linalg.eigvalsh(m)
            assert verdict == (evs[-1] <= 0.0)
            assert np.isclose(lam, evs[-1])


class TestSpdSqrt:
    def test_identity(self):
        assert np.allclose(linalg.spd_sqrt(np.eye(2)), np.eye(2))

    def test_diagonal(self):
        assert np.allclose(linalg.spd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_round_trip_200_random(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            n = int(rng.integers(1, 17))
            a = linalg.symmetrize(random_spd(rng, n))
            aa = a @ a
            root = linalg.spd_sqrt(linalg.symmetrize(aa))
            tol = 1e-10 * n * max(1.0, np.abs(aa).max())
            assert np.max(np.abs(root @ root - aa)) <= 10 * tol
            assert np.max(np.abs(root - a)) <= 1e-6 * max(1.0, np.abs(a).max())

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.spd_sqrt(np.diag([1.0, -1e-6]))


class TestSchurComplement:
    def test_hand_computed(self):
        m = np.array([[-2.0, 1.0], [1.0, -2.0]])
        out = linalg.schur_complement(m, 1, eliminate="22")
        assert np.allclose(out, [[-1.5]])

    def test_block_diagonal(self):
        a = np.array([[3.0, 1.0], [1.0, 2.0]])
        m = np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), -np.eye(2)]])
        assert np.allclose(linalg.schur_complement(m, 2, eliminate="22"), a)

    def test_boundary_case(self):
        m = np.array([[-1.0, 2.0], [2.0, -4.0]])
        out = linalg.schur_complement(m, 1, eliminate="22")
        assert np.allclose(out, [[0.0]])

    def test_eliminate_11(self):
        m = np.array([[2.0, 1.0], [1.0, 3.0]])
        out = linalg.schur_complement(m, 1, eliminate="11")
        assert np.allclose(out, [[3.0 - 0.5]])

    def test_singular_block_rejected(self):
        m = np.block([[np.eye(2), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
        with pytest.raises(SingularBlock):
            linalg.schur_complement(m, 2, eliminate="22")

    def test_sign_law_random(self):
        # with D negative definite: M nsd iff (D nsd and A - B D^-1 B^T nsd)
        rng = np.random.default_rng(3)
        for _ in range(200):
            k = int(rng.integers(1, 5))
            j = int(rng.integers(1, 5))
            a = linalg.symmetrize(rng.standard_normal((k, k)) @ np.eye(k) - rng.uniform(0, 3) * np.eye(k))
            a = linalg.symmetrize(a + a.T)
            b = rng.standard_normal((k, j))
            d = -random_spd(rng, j)
            m = np.block([[a, b], [b.T, d]])
            whole, _ = linalg.is_nsd(m, tol=1e-11)
            comp, _ = linalg.is_nsd(linalg.schur_complement(m, k, eliminate="22"), tol=1e-11)
            assert whole == comp
