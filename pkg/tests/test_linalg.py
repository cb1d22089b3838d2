import numpy as np
import pytest
from numpy.testing import assert_allclose

from jumpstats import linalg

from oracles import (
    det_by_cofactors,
    eigenvalues_by_char_poly,
    expm_taylor,
    match_sorted,
)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


class TestKron:
    def test_identity(self):
        assert_allclose(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_sigma_x_pair(self):
        got = linalg.kron(SIGMA_X, SIGMA_X)
        expected = np.fliplr(np.eye(4))
        assert_allclose(got, expected)

    def test_matches_product_action(self):
        # (A kron B)(u kron v) = (A u) kron (B v)
        rng = np.random.default_rng(11)
        for _ in range(20):
            a, b = random_complex(rng, 2), random_complex(rng, 2)
            u = rng.normal(size=2) + 1j * rng.normal(size=2)
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            lhs = linalg.kron(a, b) @ np.kron(u, v)
            rhs = np.kron(a @ u, b @ v)
            assert_allclose(lhs, rhs, atol=1e-13)

    def test_associativity(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            a, b, c = (random_complex(rng, 2) for _ in range(3))
            left = linalg.kron(linalg.kron(a, b), c)
            right = linalg.kron(a, linalg.kron(b, c))
            assert np.max(np.abs(left - right)) <= 1e-14

    def test_shapes(self):
        a = np.ones((2, 3))
        b = np.ones((4, 5))
        assert linalg.kron(a, b).shape == (8, 15)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            linalg.kron(np.zeros((0, 2)), np.eye(2))


class TestExpm:
    def test_zero_matrix(self):
        assert_allclose(linalg.expm(np.zeros((3, 3)), 1.0), np.eye(3))

    def test_diagonal(self):
        lams = np.array([0.3 - 1.0j, -2.0 + 0.5j])
        got = linalg.expm(np.diag(lams), 0.7)
        assert_allclose(got, np.diag(np.exp(0.7 * lams)), rtol=1e-12)

    def test_against_taylor_series(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            a = random_complex(rng, 4)
            assert np.max(np.abs(linalg.expm(a, 1.0) - expm_taylor(a))) <= 1e-10

    def test_group_property(self):
        rng = np.random.default_rng(22)
        for _ in range(10):
            a = random_complex(rng, 4)
            a *= 2.0 / max(np.linalg.norm(a, 2), 1e-12)
            full = linalg.expm(a, 1.3)
            split = linalg.expm(a, 0.9) @ linalg.expm(a, 0.4)
            assert np.max(np.abs(full - split)) <= 1e-9

    def test_rejects_huge_norm(self):
        with pytest.raises(ValueError, match="exceeds"):
            linalg.expm(np.eye(2), 2.0e4)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            linalg.expm(np.ones((2, 3)), 1.0)

    def test_rejects_non_finite(self):
        bad = np.array([[np.inf, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            linalg.expm(bad, 1.0)


class TestEig:
    def test_pauli_x_spectrum(self):
        dec = linalg.eig(SIGMA_X)
        assert match_sorted(dec.eigenvalues, [1.0, -1.0]) <= 1e-14

    def test_diagonal_values(self):
        d = np.diag([2.0, 3.0j, -1.0, 0.0])
        dec = linalg.eig(d)
        assert match_sorted(dec.eigenvalues, [2.0, 3.0j, -1.0, 0.0]) <= 1e-14

    def test_matches_characteristic_quartic(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            a = random_complex(rng, 4)
            roots = eigenvalues_by_char_poly(a)
            assert match_sorted(linalg.eig(a).eigenvalues, roots) <= 1e-8

    @pytest.mark.parametrize("n", [2, 3, 4, 8, 16])
    def test_residual_invariant(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(8):
            a = random_complex(rng, n)
            dec = linalg.eig(a)
            norm_a = np.linalg.norm(a, 2)
            assert dec.residual_norms.max() <= 1e-10 * norm_a
            for i in range(n):
                r = dec.right_vectors[:, i]
                lam = dec.eigenvalues[i]
                assert abs(np.linalg.norm(r) - 1.0) <= 1e-12
                assert np.linalg.norm(a @ r - lam * r) <= 1e-10 * norm_a
                left = dec.left_vectors[:, i]
                res_left = np.linalg.norm(left.conj() @ a - lam * left.conj())
                assert res_left / np.linalg.norm(left) <= 1e-10 * norm_a

    def test_left_right_normalization(self):
        rng = np.random.default_rng(32)
        a = random_complex(rng, 4)
        dec = linalg.eig(a)
        assert not dec.degenerate_pairs.any()
        for i in range(4):
            overlap = dec.left_vectors[:, i].conj() @ dec.right_vectors[:, i]
            assert abs(overlap - 1.0) <= 1e-10

    def test_trace_and_determinant(self):
        rng = np.random.default_rng(33)
        for _ in range(15):
            a = random_complex(rng, 4)
            lam = linalg.eig(a).eigenvalues
            assert abs(lam.sum() - np.trace(a)) <= 1e-8
            assert abs(lam.prod() - det_by_cofactors(a)) <= 1e-8

    def test_similarity_invariance(self):
        rng = np.random.default_rng(34)
        for _ in range(10):
            a = random_complex(rng, 4)
            p = random_complex(rng, 4) + 2.0 * np.eye(4)
            b = p @ a @ np.linalg.inv(p)
            gap = match_sorted(linalg.eig(a).eigenvalues, linalg.eig(b).eigenvalues)
            assert gap <= 1e-8

    def test_repeated_eigenvalue_identity(self):
        dec = linalg.eig(np.eye(3))
        assert match_sorted(dec.eigenvalues, [1.0, 1.0, 1.0]) <= 1e-14
        assert dec.residual_norms.max() <= 1e-12

    def test_size_cap(self):
        with pytest.raises(ValueError, match="64"):
            linalg.eig(np.eye(65))

    def test_eigvals_matches_eig(self):
        rng = np.random.default_rng(35)
        a = random_complex(rng, 5)
        assert match_sorted(linalg.eigvals(a), linalg.eig(a).eigenvalues) <= 1e-10


class TestLeadingEigenpair:
    def test_diagonal(self):
        value, _, _ = linalg.leading_eigenpair(np.diag([-1.0, 0.0, -3.0]))
        assert abs(value) <= 1e-14

    def test_upper_triangular(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            t = np.triu(random_complex(rng, 5))
            value, _, _ = linalg.leading_eigenpair(t)
            expected = t.diagonal()[np.argmax(t.diagonal().real)]
            assert abs(value - expected) <= 1e-9

    def test_tie_broken_by_imaginary_part(self):
        a = np.diag([1.0 + 1.0j, 1.0, -2.0])
        value, _, _ = linalg.leading_eigenpair(a)
        assert abs(value - 1.0) <= 1e-12

    def test_vectors_satisfy_eigen_equations(self):
        rng = np.random.default_rng(42)
        a = random_complex(rng, 4)
        value, right, left = linalg.leading_eigenpair(a)
        assert np.linalg.norm(a @ right - value * right) <= 1e-10 * np.linalg.norm(a, 2)
        res = np.linalg.norm(left.conj() @ a - value * left.conj())
        assert res / np.linalg.norm(left) <= 1e-10 * np.linalg.norm(a, 2)
