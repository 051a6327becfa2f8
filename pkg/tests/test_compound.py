"""Compound/block algebra: index maps, conversion matrices, Kronecker
sums, second additive compounds, and the modular decomposition."""

import numpy as np
import pytest

from sg2c import (InvalidDimension, InvalidPartition, NonSquare,
                  NotSkewSymmetric, PartitionedMatrix, SkewIndexMap,
                  build_H, build_L, build_M, decompose, kron_sum,
                  permutation_to_compound, second_additive_compound,
                  vec_row, vec_skew)
from conftest import random_partitioned


def random_skew(rng, n):
    X = rng.standard_normal((n, n))
    return X - X.T


def eig_multiset_close(a, b, tol=1e-9):
    # greedy nearest matching; robust to sort-order flips of close values
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    if len(a) != len(b):
        return False
    for x in a:
        k = int(np.argmin([abs(x - y) for y in b]))
        if abs(x - b[k]) > tol:
            return False
        b.pop(k)
    return True


class TestSkewIndexMap:
    def test_pairs_are_lexicographic(self):
        m = SkewIndexMap(4)
        assert m.pairs == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))

    def test_index_formula_matches_enumeration(self):
        for n in range(2, 9):
            m = SkewIndexMap(n)
            for pos, (i, j) in enumerate(m.pairs):
                assert m.k(i, j) == pos + 1

    def test_too_small_dimension(self):
        with pytest.raises(InvalidDimension):
            SkewIndexMap(1)


class TestConversionMatrices:
    def test_structure(self):
        for n in range(2, 7):
            M, L = build_M(n), build_L(n)
            q = n * (n - 1) // 2
            assert M.shape == (n * n, q)
            assert L.shape == (q, n * n)
            assert np.array_equal(L @ M, np.eye(q))

    def test_vec_identities(self, rng):
        for n in (2, 3, 5):
            X = random_skew(rng, n)
            M, L = build_M(n), build_L(n)
            assert np.allclose(M @ vec_skew(X), vec_row(X))
            assert np.allclose(L @ vec_row(X), vec_skew(X))

    def test_rejects_small_n(self):
        with pytest.raises(InvalidDimension):
            build_M(1)
        with pytest.raises(InvalidDimension):
            build_L(0)

    def test_vec_skew_requires_skew(self, rng):
        with pytest.raises(NotSkewSymmetric):
            vec_skew(rng.standard_normal((3, 3)))

    def test_transpose_permutation(self, rng):
        for n1, n2 in ((1, 3), (2, 2), (3, 2)):
            X = rng.standard_normal((n1, n2))
            H = build_H(n1, n2)
            assert np.allclose(H @ vec_row(X), vec_row(X.T))


class TestKronSumAndCompound:
    def test_kron_sum_eigenvalues(self, rng):
        A = rng.standard_normal((3, 3))
        B = rng.standard_normal((4, 4))
        got = np.linalg.eigvals(kron_sum(A, B))
        want = [la + mu for la in np.linalg.eigvals(A)
                for mu in np.linalg.eigvals(B)]
        assert eig_multiset_close(got, want)

    def test_kron_sum_governs_sylvester_flow(self, rng):
        A = rng.standard_normal((3, 3))
        B = rng.standard_normal((2, 2))
        X = rng.standard_normal((3, 2))
        assert np.allclose(kron_sum(A, B) @ vec_row(X),
                           vec_row(A @ X + X @ B.T))

    def test_kron_sum_rejects_nonsquare(self, rng):
        with pytest.raises(NonSquare):
            kron_sum(rng.standard_normal((2, 3)), np.eye(2))

    def test_compound_eigenvalues_are_pair_sums(self, rng):
        for n in (2, 3, 4, 5, 6, 7):
            A = rng.standard_normal((n, n))
            lam = np.linalg.eigvals(A)
            want = [lam[i] + lam[j] for i in range(n) for j in range(i + 1, n)]
            got = np.linalg.eigvals(second_additive_compound(A))
            assert eig_multiset_close(got, want)

    def test_compound_governs_skew_flow(self, rng):
        n = 5
        A = rng.standard_normal((n, n))
        X = random_skew(rng, n)
        assert np.allclose(second_additive_compound(A) @ vec_skew(X),
                           vec_skew(A @ X + X @ A.T))


class TestPartitionedMatrix:
    def test_blocks(self, rng):
        A = rng.standard_normal((5, 5))
        p = PartitionedMatrix(A, 2, 3)
        assert np.array_equal(p.a11, A[:2, :2])
        assert np.array_equal(p.a12, A[:2, 2:])
        assert np.array_equal(p.a21, A[2:, :2])
        assert np.array_equal(p.a22, A[2:, 2:])

    def test_partition_must_match_size(self, rng):
        with pytest.raises(InvalidPartition):
            PartitionedMatrix(rng.standard_normal((4, 4)), 2, 3)

    def test_nonsquare_rejected(self, rng):
        with pytest.raises(NonSquare):
            PartitionedMatrix(rng.standard_normal((4, 3)), 2, 2)


class TestDecompose:
    def test_structural_equivalence_random(self, rng):
        for _ in range(10):
            n = int(rng.integers(4, 8))
            for n1 in range(1, n):
                A = random_partitioned(rng, n, n1)
                d = decompose(A)
                S = permutation_to_compound(d)
                A2 = second_additive_compound(A.entries)
                assert np.allclose(S.T @ A2 @ S, d.assembled(), atol=1e-12)

    def test_block_dynamics_match_skew_flow(self, rng):
        # stacked (x11, vec X12, x22) derivative equals the assembled
        # block matrix acting on the stacked state
        n1, n2 = 2, 3
        A = random_partitioned(rng, n1 + n2, n1)
        X = random_skew(rng, n1 + n2)
        d = decompose(A)
        S = permutation_to_compound(d)
        y = S.T @ vec_skew(X)
        ydot = S.T @ vec_skew(A.entries @ X + X @ A.entries.T)
        assert np.allclose(d.assembled() @ y, ydot)

    def test_cascade_blocks_vanish(self, rng):
        n1, n2 = 2, 2
        A = rng.standard_normal((4, 4))
        A[:n1, n1:] = 0.0
        d = decompose(PartitionedMatrix(A, n1, n2))
        assert not d.b1.any()
        assert not d.g2.any()

    def test_reverse_cascade_blocks_vanish(self, rng):
        n1, n2 = 2, 2
        A = rng.standard_normal((4, 4))
        A[n1:, :n1] = 0.0
        d = decompose(PartitionedMatrix(A, n1, n2))
        assert not d.b2.any()
        assert not d.g1.any()

    def test_minimum_size(self, rng):
        with pytest.raises(InvalidPartition):
            decompose(PartitionedMatrix(rng.standard_normal((2, 2)), 1, 1))

    def test_permutation_is_identity_on_blocks(self, rng):
        # S is a 0/1 permutation matrix
        d = decompose(random_partitioned(rng, 5, 2))
        S = permutation_to_compound(d)
        assert np.array_equal(S @ S.T, np.eye(S.shape[0]))
        assert set(np.unique(S)) <= {0.0, 1.0}
