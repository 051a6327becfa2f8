"""Vectorization operators, second additive compounds, and the block
decomposition of the compound variational dynamics.

All vectorization is ROW-major: vec(A X B^T) = (A kron B) vec(X).  Skew
states are ordered lexicographically (1,2),(1,3),...,(n-1,n).
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import InvalidDimension, InvalidPartition, NonSquare, NotSkewSymmetric

SKEW_TOL = 1e-10


def vec_row(X) -> np.ndarray:
    """Row-major vectorization of a rectangular matrix.

    Parameters
    ----------
    X : array_like, shape (m, n)

    Returns
    -------
    ndarray, shape (m*n,)
        Entries in row order, so vec_row(A X B^T) = kron(A, B) vec_row(X).
    """
    return np.asarray(X, dtype=float).reshape(-1)


class SkewIndexMap:
    """Lexicographic indexing of the C(n,2) independent entries of a skew
    matrix.

    ``pairs`` lists the 1-based pairs (i, j), i < j, in the order
    (1,2),(1,3),...,(n-1,n); ``k(i, j)`` returns the 1-based position of a
    pair, including transposed arguments.
    """

    def __init__(self, n: int):
        if n < 2:
            raise InvalidDimension(f"need n >= 2, got {n}")
        self.n = n
        self.pairs = tuple((i, j) for i in range(1, n + 1)
                           for j in range(i + 1, n + 1))

    def k(self, i: int, j: int) -> int:
        if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
            raise InvalidDimension(f"invalid pair ({i}, {j}) for n={self.n}")
        n = self.n
        return abs(i - j) + comb(n, 2) - comb(n + 1 - min(i, j), 2)

    def __len__(self) -> int:
        return comb(self.n, 2)


def vec_skew(X, tol: float = SKEW_TOL) -> np.ndarray:
    """Extract the ordered upper-triangle vector of a skew-symmetric matrix.

    Raises
    ------
    NotSkewSymmetric
        If ||X + X^T||_inf exceeds ``tol``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise NonSquare(f"expected square matrix, got shape {X.shape}")
    if X.shape[0] and np.abs(X + X.T).max() > tol:
        raise NotSkewSymmetric(f"||X + X^T||_inf = {np.abs(X + X.T).max():.3e} > {tol:.1e}")
    n = X.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    return X[iu, ju].copy()


def _build_M(n: int) -> np.ndarray:
    # Tolerates n < 2 (empty pair set) for degenerate partitions.
    q = comb(n, 2)
    M = np.zeros((n * n, q))
    col = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            M[(i - 1) * n + (j - 1), col] = 1.0
            M[(j - 1) * n + (i - 1), col] = -1.0
            col += 1
    return M


def _build_L(n: int) -> np.ndarray:
    q = comb(n, 2)
    L = np.zeros((q, n * n))
    row = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            L[row, (i - 1) * n + (j - 1)] = 1.0
            row += 1
    return L


def build_M(n: int) -> np.ndarray:
    """Matrix with vec_row(X) = M_n vec_skew(X) for every skew X.

    Shape (n^2, C(n,2)); each column holds one +1 and one -1.
    """
    if n < 2:
        raise InvalidDimension(f"need n >= 2, got {n}")
    return _build_M(n)


def build_L(n: int) -> np.ndarray:
    """Matrix with vec_skew(X) = L_n vec_row(X) for every skew X.

    Shape (C(n,2), n^2); satisfies L_n M_n = I.
    """
    if n < 2:
        raise InvalidDimension(f"need n >= 2, got {n}")
    return _build_L(n)


def build_H(n1: int, n2: int) -> np.ndarray:
    """Permutation with vec_row(X^T) = H vec_row(X) for every n1 x n2 X."""
    if n1 < 1 or n2 < 1:
        raise InvalidDimension(f"need positive dimensions, got ({n1}, {n2})")
    H = np.zeros((n1 * n2, n1 * n2))
    for i in range(1, n1 + 1):
        for j in range(1, n2 + 1):
            H[(j - 1) * n1 + (i - 1), (i - 1) * n2 + (j - 1)] = 1.0
    return H


def kron_sum(A, B) -> np.ndarray:
    """Kronecker sum A kron I + I kron B.

    Governs vec_row(A X + X B^T) = kron_sum(A, B) vec_row(X).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonSquare(f"A has shape {A.shape}")
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise NonSquare(f"B has shape {B.shape}")
    p, q = A.shape[0], B.shape[0]
    return np.kron(A, np.eye(q)) + np.kron(np.eye(p), B)


def second_additive_compound(A) -> np.ndarray:
    """Second additive compound A^[2] = L_n (A kron-sum A) M_n.

    The C(n,2) x C(n,2) matrix with vec_skew(A X + X A^T) =
    A^[2] vec_skew(X) for skew X; its spectrum is the pairwise
    eigenvalue sums {lambda_i + lambda_j, i < j}.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonSquare(f"A has shape {A.shape}")
    n = A.shape[0]
    if n < 2:
        raise InvalidDimension(f"need n >= 2, got {n}")
    return _build_L(n) @ kron_sum(A, A) @ _build_M(n)


@dataclass(frozen=True)
class PartitionedMatrix:
    """Square matrix with a declared 2-block partition (n1, n2)."""

    entries: np.ndarray
    n1: int
    n2: int

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise NonSquare(f"expected square matrix, got shape {entries.shape}")
        if self.n1 < 1 or self.n2 < 1 or self.n1 + self.n2 != entries.shape[0]:
            raise InvalidPartition(
                f"partition ({self.n1}, {self.n2}) does not tile a "
                f"{entries.shape[0]}x{entries.shape[0]} matrix"
            )

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def a11(self) -> np.ndarray:
        return self.entries[: self.n1, : self.n1]

    @property
    def a12(self) -> np.ndarray:
        return self.entries[: self.n1, self.n1:]

    @property
    def a21(self) -> np.ndarray:
        return self.entries[self.n1:, : self.n1]

    @property
    def a22(self) -> np.ndarray:
        return self.entries[self.n1:, self.n1:]


@dataclass(frozen=True)
class ModularDecomposition:
    """Blocks of the coupled compound dynamics for one partitioned matrix.

    The stacked state (x11, vec X12, x22) evolves under the block matrix

        [[a11c2, b1,   0   ],
         [g1,    ksum, g2  ],
         [0,     b2,   a22c2]]

    which is a permutation conjugate of the full second additive compound.
    ``perm`` maps stacked-state slots to positions in the lexicographic
    compound ordering.
    """

    a11c2: np.ndarray
    a22c2: np.ndarray
    ksum: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    perm: np.ndarray
    n1: int
    n2: int

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    def assembled(self) -> np.ndarray:
        """The full block matrix acting on (x11, vec X12, x22)."""
        q1 = self.a11c2.shape[0]
        q2 = self.a22c2.shape[0]
        r = self.ksum.shape[0]
        m = q1 + r + q2
        out = np.zeros((m, m))
        out[:q1, :q1] = self.a11c2
        out[:q1, q1:q1 + r] = self.b1
        out[q1:q1 + r, :q1] = self.g1
        out[q1:q1 + r, q1:q1 + r] = self.ksum
        out[q1:q1 + r, q1 + r:] = self.g2
        out[q1 + r:, q1:q1 + r] = self.b2
        out[q1 + r:, q1 + r:] = self.a22c2
        return out


def decompose(A: PartitionedMatrix) -> ModularDecomposition:
    """Split the compound dynamics of a partitioned matrix into subsystem
    compounds, the Kronecker-sum coupling block, and the interconnection
    maps.

    For skew X partitioned conformally, d/dt of (x11, vec X12, x22) under
    Xdot = A X + X A^T is governed by the assembled block matrix; the cross
    blocks act on vec X12 using X21 = -X12^T.

    Raises
    ------
    InvalidPartition
        If n1 + n2 < 3 (no nontrivial split of a compound exists below n=3).
    """
    n1, n2 = A.n1, A.n2
    if n1 + n2 < 3:
        raise InvalidPartition(f"need n1 + n2 >= 3, got ({n1}, {n2})")
    a11, a12, a21, a22 = A.a11, A.a12, A.a21, A.a22

    L1, M1 = _build_L(n1), _build_M(n1)
    L2, M2 = _build_L(n2), _build_M(n2)
    H12 = build_H(n1, n2)
    I1 = np.eye(n1)
    I2 = np.eye(n2)

    # d x11: A11 X11 + X11 A11^T + A12 X21 + (A12 X21)^T with X21 = -X12^T
    b1 = L1 @ (np.kron(I1, a12) - np.kron(a12, I1) @ H12)
    # d x22: A22 X22 + X22 A22^T + A21 X12 + (A21 X12)^T
    b2 = L2 @ (np.kron(a21, I2) - np.kron(I2, a21) @ H12)
    # d vec X12: A11 X12 + X12 A22^T + A12 X22 + A21-coupled X11 term
    g1 = np.kron(I1, a21) @ M1
    g2 = np.kron(a12, I2) @ M2

    return ModularDecomposition(
        a11c2=L1 @ kron_sum(a11, a11) @ M1,
        a22c2=L2 @ kron_sum(a22, a22) @ M2,
        ksum=kron_sum(a11, a22),
        b1=b1,
        b2=b2,
        g1=g1,
        g2=g2,
        perm=_stacked_to_compound_perm(n1, n2),
        n1=n1,
        n2=n2,
    )


def _stacked_to_compound_perm(n1: int, n2: int) -> np.ndarray:
    # Slot a of (x11, vec X12, x22) holds global pair g[a] in lex order.
    n = n1 + n2
    kmap = SkewIndexMap(n)
    g = []
    for i in range(1, n1 + 1):
        for j in range(i + 1, n1 + 1):
            g.append(kmap.k(i, j) - 1)
    for i in range(1, n1 + 1):
        for j in range(1, n2 + 1):
            g.append(kmap.k(i, n1 + j) - 1)
    for i in range(1, n2 + 1):
        for j in range(i + 1, n2 + 1):
            g.append(kmap.k(n1 + i, n1 + j) - 1)
    return np.array(g, dtype=np.intp)


def permutation_to_compound(d: ModularDecomposition) -> np.ndarray:
    """0/1 permutation S with S^T A^[2] S equal to the assembled blocks."""
    q = d.perm.size
    S = np.zeros((q, q))
    S[d.perm, np.arange(q)] = 1.0
    return S
