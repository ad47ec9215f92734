"""Eigensolver contract, reconstruction cost, and the range-restricted solver."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dataset, random_orthogonal
from slce.dataset import center, centroid_matrix
from slce.linalg import (
    centroid_cost,
    eig_via_range,
    principal_angles,
    range_basis,
    sym_eig,
)


def random_symmetric(seed, d, scale=1.0):
    rng = np.random.default_rng(seed)
    A = rng.normal(scale=scale, size=(d, d))
    return A + A.T


class TestSymEig:
    def test_identity(self):
        eig = sym_eig(np.eye(3))
        assert np.allclose(eig.eigenvalues, [1.0, 1.0, 1.0])

    def test_diagonal_with_signs(self):
        eig = sym_eig(np.diag([3.0, -1.0]))
        assert np.allclose(eig.eigenvalues, [3.0, -1.0])
        assert np.allclose(np.abs(eig.eigenvectors), np.eye(2))
        # sign convention: the dominant entry of each eigenvector is positive
        assert eig.eigenvectors[0, 0] > 0 and eig.eigenvectors[1, 1] > 0

    def test_descending_order(self):
        eig = sym_eig(random_symmetric(0, 9))
        assert np.all(np.diff(eig.eigenvalues) <= 0)

    @given(seed=st.integers(0, 10_000), d=st.integers(2, 12))
    @settings(max_examples=30, deadline=None)
    def test_reconstruction_and_orthonormality(self, seed, d):
        S = random_symmetric(seed, d)
        eig = sym_eig(S)
        V, w = eig.eigenvectors, eig.eigenvalues
        norm = np.linalg.norm(S)
        assert np.linalg.norm(V.T @ V - np.eye(d)) <= 1e-8
        assert np.linalg.norm(S - V @ np.diag(w) @ V.T) <= 1e-10 * max(norm, 1.0)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_sign_convention(self, seed):
        eig = sym_eig(random_symmetric(seed, 7))
        for col in eig.eigenvectors.T:
            assert col[np.argmax(np.abs(col))] > 0

    def test_deterministic(self):
        S = random_symmetric(3, 10)
        a, b = sym_eig(S), sym_eig(S)
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert np.array_equal(a.eigenvectors, b.eigenvectors)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_similarity_invariance(self, seed):
        S = random_symmetric(seed, 6)
        Q = random_orthogonal(seed + 1, 6)
        rotated = sym_eig(Q @ S @ Q.T).eigenvalues
        original = sym_eig(S).eigenvalues
        assert np.max(np.abs(rotated - original)) <= 1e-8 * max(np.linalg.norm(S), 1.0)

    def test_near_symmetric_accepted(self):
        S = random_symmetric(5, 6)
        bumped = S.copy()
        bumped[0, 1] += 1e-12
        assert np.allclose(sym_eig(bumped).eigenvalues, sym_eig(S).eigenvalues)

    def test_asymmetric_rejected(self):
        S = random_symmetric(6, 4)
        S[0, 1] += 0.5
        with pytest.raises(ValueError, match="not symmetric"):
            sym_eig(S)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError, match="square"):
            sym_eig(np.zeros((2, 3)))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            sym_eig(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestCentroidCost:
    def test_empty_basis_gives_trace(self):
        ds = make_dataset(0, 3, 10, 2)
        centered, _ = center(ds)
        Ct = centroid_matrix(centered).data
        cost = centroid_cost(Ct, np.zeros((3, 0)), centered.data)
        assert cost == pytest.approx(np.linalg.norm(Ct) ** 2, rel=1e-12)

    def test_eigenvector_cost_identity(self):
        # cost of projecting onto an eigenvector with eigenvalue mu equals
        # trace(Ct^T Ct) - mu
        ds = make_dataset(1, 4, 30, 2)
        centered, _ = center(ds)
        Xc = centered.data
        Ct = centroid_matrix(centered).data
        S = Xc @ Ct.T + Ct @ Xc.T - Xc @ Xc.T
        eig = sym_eig(0.5 * (S + S.T))
        trace_ctc = float(np.linalg.norm(Ct) ** 2)
        for i in range(3):
            a = eig.eigenvectors[:, [i]]
            mu = eig.eigenvalues[i]
            expected = trace_ctc - mu
            assert centroid_cost(Ct, a, Xc) == pytest.approx(expected, rel=1e-8)

    def test_matches_elementwise_double_loop(self):
        # independent oracle: residual entries summed one by one in Python
        rng = np.random.default_rng(2)
        ds = make_dataset(2, 3, 10, 2)
        centered, _ = center(ds)
        Xc = centered.data
        Ct = centroid_matrix(centered).data
        a = rng.normal(size=3)
        a /= np.linalg.norm(a)

        total = 0.0
        for i in range(3):
            for j in range(10):
                proj = 0.0
                for f in range(3):
                    proj += a[f] * Xc[f, j]
                total += (Ct[i, j] - a[i] * proj) ** 2
        assert centroid_cost(Ct, a[:, None], Xc) == pytest.approx(total, rel=1e-12)

    @given(seed=st.integers(0, 5000))
    @settings(max_examples=20, deadline=None)
    def test_projector_rotation_invariance(self, seed):
        ds = make_dataset(seed, 5, 20, 3)
        centered, _ = center(ds)
        Ct = centroid_matrix(centered).data
        A = np.linalg.qr(np.random.default_rng(seed).normal(size=(5, 2)))[0]
        R = random_orthogonal(seed + 7, 2)
        c1 = centroid_cost(Ct, A, centered.data)
        c2 = centroid_cost(Ct, A @ R, centered.data)
        assert c2 == pytest.approx(c1, rel=1e-10, abs=1e-10)

    def test_nonnegative_and_zero_case(self):
        # singleton classes make Ct equal the data, so a full basis hits zero
        rng = np.random.default_rng(4)
        X = rng.normal(size=(3, 6))
        cost = centroid_cost(X, np.eye(3), X)
        assert cost == pytest.approx(0.0, abs=1e-18)
        assert centroid_cost(X, np.eye(3)[:, :1], X) >= 0.0

    def test_non_orthonormal_warns(self):
        ds = make_dataset(5, 3, 8, 2)
        A = np.ones((3, 1))
        with pytest.warns(UserWarning, match="not orthonormal"):
            value = centroid_cost(ds.data, A, ds.data)
        assert np.isfinite(value)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            centroid_cost(np.zeros((2, 3)), np.zeros((2, 1)), np.zeros((2, 4)))


class TestPrincipalAngles:
    def test_identical_spans(self):
        U = np.linalg.qr(np.random.default_rng(0).normal(size=(6, 2)))[0]
        R = random_orthogonal(1, 2)
        assert np.max(principal_angles(U, U @ R)) < 1e-10

    def test_orthogonal_spans(self):
        U = np.eye(4)[:, :2]
        V = np.eye(4)[:, 2:]
        assert np.min(principal_angles(U, V)) > np.pi / 2 - 1e-10


class TestEigViaRange:
    def test_matches_dense_on_low_rank_matrix(self):
        rng = np.random.default_rng(8)
        Q = np.linalg.qr(rng.normal(size=(12, 4)))[0]
        # positive definite restriction: the top-3 eigenpairs are unique, so
        # both routes must produce the same vectors (not just the same span)
        small = random_symmetric(9, 4) + 6.0 * np.eye(4)
        B = Q @ small @ Q.T
        dense = sym_eig(0.5 * (B + B.T))
        values, vectors, full = eig_via_range(Q, small, 3)
        assert np.allclose(values, dense.eigenvalues[:3], atol=1e-10)
        assert np.allclose(np.sort(full), np.sort(dense.eigenvalues), atol=1e-10)
        assert np.max(principal_angles(vectors, dense.eigenvectors[:, :3])) < 1e-8
        assert np.linalg.norm(vectors.T @ vectors - np.eye(3)) < 1e-10

    def test_zero_block_completion_is_orthonormal(self):
        rng = np.random.default_rng(10)
        Q = np.linalg.qr(rng.normal(size=(10, 2)))[0]
        small = np.diag([2.0, 1.0])
        values, vectors, full = eig_via_range(Q, small, 6)
        assert np.allclose(values, [2.0, 1.0, 0.0, 0.0, 0.0, 0.0], atol=1e-12)
        assert np.linalg.norm(vectors.T @ vectors - np.eye(6)) < 1e-10
        # padded columns live outside range(Q)
        assert np.linalg.norm(Q.T @ vectors[:, 2:]) < 1e-10
        assert full.shape == (10,)

    def test_deterministic_completion(self):
        rng = np.random.default_rng(11)
        Q = np.linalg.qr(rng.normal(size=(9, 3)))[0]
        small = random_symmetric(12, 3)
        a = eig_via_range(Q, small, 5)
        b = eig_via_range(Q, small, 5)
        assert np.array_equal(a[1], b[1])


class TestRangeBasis:
    def test_spans_columns(self):
        rng = np.random.default_rng(12)
        X = rng.normal(size=(8, 3)) @ rng.normal(size=(3, 20))
        Q = range_basis(X)
        assert Q.shape == (8, 3)
        assert np.linalg.norm(X - Q @ (Q.T @ X)) < 1e-10 * np.linalg.norm(X)

    def test_empty(self):
        assert range_basis(np.zeros((4, 0))).shape == (4, 0)
