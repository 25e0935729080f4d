import itertools
import numpy as np
from sympy import Matrix, eye, isprime
from typing import List, Optional, Tuple


def mod_p(A: np.ndarray, p: int) -> np.ndarray:
    return np.asarray(A % p, dtype=np.int64)


def rref_mod(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """RREF over GF(p). Returns (RREF, pivot_cols)."""
    A = mod_p(np.array(A, dtype=np.int64, copy=True), p)
    m, n = A.shape
    inverses = [0] + [pow(a, -1, p) for a in range(1, p)]
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        rows = np.nonzero(A[r:, c])[0]
        if rows.size == 0:
            continue
        k = r + int(rows[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = (A[r] * inverses[int(A[r, c])]) % p
        # eliminate the pivot column from every other row at once
        factors = A[:, c].copy()
        factors[r] = 0
        nz = np.nonzero(factors)[0]
        if nz.size:
            A[nz] = (A[nz] - np.outer(factors[nz], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod(A: np.ndarray, p: int) -> int:
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    _, pivots = rref_mod(A, p)
    return len(pivots)


def nullspace_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Right nullspace basis of A over GF(p); columns form a basis."""
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    if m == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = rref_mod(A, p)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, j in enumerate(free):
        basis[j, k] = 1
        for row, pc in enumerate(pivots):
            basis[pc, k] = (-R[row, j]) % p
    return basis


def solve_mod(A: np.ndarray, b: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Solve A x = b over GF(p); one particular solution (free vars = 0), None if inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    m, n = A.shape
    if m == 0:
        return np.zeros(n, dtype=np.int64)
    R, pivots = rref_mod(np.concatenate([A, b], axis=1), p)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, pc in enumerate(pivots):
        x[pc] = R[row, n]
    return x


def column_space_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Independent columns spanning the column space of A."""
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=np.int64)
    R, pivots = rref_mod(A.T, p)
    return R[: len(pivots)].T.copy()


class QuotientSpace:
    """
    Coordinates on Z/B for subspaces B ⊆ Z ⊆ F_p^n given by spanning columns.

    The complement of B in Z is spanned by `representatives`; `coordinates(v)`
    returns the class of v in that basis and `in_subspace(v)` tests membership of Z.
    """

    def __init__(self, cycles: np.ndarray, boundaries: np.ndarray, p: int):
        self.p = p
        n = cycles.shape[0]
        self.boundaries = column_space_mod(boundaries, p) if boundaries.size else np.zeros((n, 0), dtype=np.int64)
        self.cycles = column_space_mod(cycles, p) if cycles.size else np.zeros((n, 0), dtype=np.int64)
        reps = []
        current = self.boundaries
        for k in range(self.cycles.shape[1]):
            col = self.cycles[:, k : k + 1]
            candidate = np.concatenate([current, col], axis=1)
            if rank_mod(candidate, p) > current.shape[1]:
                reps.append(col[:, 0])
                current = candidate
        self.representatives = np.stack(reps, axis=1) if reps else np.zeros((n, 0), dtype=np.int64)
        self._basis = np.concatenate([self.boundaries, self.representatives], axis=1)

    @property
    def dimension(self) -> int:
        return self.representatives.shape[1]

    @property
    def order(self) -> int:
        return self.p**self.dimension

    def coordinates(self, v: np.ndarray) -> Optional[Tuple[int, ...]]:
        x = solve_mod(self._basis, np.asarray(v, dtype=np.int64), self.p)
        if x is None:
            return None
        return tuple(int(c) for c in x[self.boundaries.shape[1] :])

    def in_subspace(self, v: np.ndarray) -> bool:
        return self.coordinates(v) is not None

    def vector(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        return mod_p(self.representatives @ coords, self.p)

    def elements(self):
        for coords in itertools.product(range(self.p), repeat=self.dimension):
            yield coords, self.vector(coords)


def smith_decomposition(A) -> Tuple[Matrix, Matrix, Matrix]:
    """
    Smith normal form over Z with transforms: returns (D, U, V) with U*A*V = D.

    U and V are unimodular; the diagonal of D is nonnegative and each entry
    divides the next.
    """
    D = Matrix(A)
    m, n = D.shape
    U = eye(m)
    V = eye(n)
    for s in range(min(m, n)):
        while True:
            entries = [(abs(D[i, j]), i, j) for i in range(s, m) for j in range(s, n) if D[i, j] != 0]
            if not entries:
                return D, U, V
            _, i, j = min(entries)
            D.row_swap(s, i)
            U.row_swap(s, i)
            D.col_swap(s, j)
            V.col_swap(s, j)
            clean = True
            for i in range(s + 1, m):
                q = D[i, s] // D[s, s]
                if q:
                    D[i, :] = D[i, :] - q * D[s, :]
                    U[i, :] = U[i, :] - q * U[s, :]
                clean = clean and D[i, s] == 0
            for j in range(s + 1, n):
                q = D[s, j] // D[s, s]
                if q:
                    D[:, j] = D[:, j] - q * D[:, s]
                    V[:, j] = V[:, j] - q * V[:, s]
                clean = clean and D[s, j] == 0
            if not clean:
                continue
            bad = [i for i in range(s + 1, m) for j in range(s + 1, n) if D[i, j] % D[s, s] != 0]
            if bad:
                D[s, :] = D[s, :] + D[bad[0], :]
                U[s, :] = U[s, :] + U[bad[0], :]
                continue
            break
        if D[s, s] < 0:
            D[s, :] = -D[s, :]
            U[s, :] = -U[s, :]
    return D, U, V


class AbelianQuotient:
    """
    The finite abelian group Z^k / L for a relation lattice L given by columns.

    Elements are tuples of residues modulo the nontrivial invariant factors.
    """

    def __init__(self, k: int, relations: List[List[int]]):
        self.k = k
        if relations:
            rel = Matrix(k, len(relations), lambda i, j: relations[j][i])
        else:
            rel = Matrix.zeros(k, 1)
        D, U, _ = smith_decomposition(rel)
        diag = [int(D[i, i]) if i < min(D.shape) else 0 for i in range(k)]
        if any(d == 0 for d in diag):
            raise ValueError("Relation lattice does not have full rank; quotient is infinite")
        self.U = U
        self.U_inv = U.inv()
        self.slots = [i for i, d in enumerate(diag) if d > 1]
        self.invariants = [diag[i] for i in self.slots]

    @property
    def order(self) -> int:
        return int(np.prod(self.invariants)) if self.invariants else 1

    def reduce(self, x) -> Tuple[int, ...]:
        y = self.U * Matrix(self.k, 1, list(x))
        return tuple(int(y[i]) % d for i, d in zip(self.slots, self.invariants))

    def lift(self, coords) -> List[int]:
        y = [0] * self.k
        for i, c in zip(self.slots, coords):
            y[i] = int(c)
        x = self.U_inv * Matrix(self.k, 1, y)
        return [int(v) for v in x]

    def elements(self):
        return list(itertools.product(*[range(d) for d in self.invariants]))


def integer_kernel(A) -> np.ndarray:
    """Z-basis of the integer right kernel of A, as columns."""
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if m == 0 or not A.any():
        return np.eye(n, dtype=np.int64)
    D, _, V = smith_decomposition(A.tolist())
    r = sum(1 for i in range(min(m, n)) if D[i, i] != 0)
    return np.array(V[:, r:].tolist(), dtype=np.int64).reshape(n, n - r)


def kernel_mod_n(A, n: int) -> np.ndarray:
    """Generators of {x : A x ≡ 0 mod n} (n = 0 meaning over Z), as columns."""
    A = np.asarray(A, dtype=np.int64)
    k = A.shape[1]
    if n == 0:
        return integer_kernel(A)
    if isprime(n):
        return nullspace_mod(A, n)
    widened = np.concatenate([A, n * np.eye(A.shape[0], dtype=np.int64)], axis=1)
    K = integer_kernel(widened)[:k] % n
    keep = [j for j in range(K.shape[1]) if K[:, j].any()]
    return K[:, keep]


def solve_integer(A, b, n: int = 0) -> Optional[np.ndarray]:
    """One solution of A x = b over Z (n = 0) or Z/n via Smith form, None if there is none."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    m, k = A.shape
    if n:
        A = np.concatenate([A, n * np.eye(m, dtype=np.int64)], axis=1)
    if A.shape[1] == 0 or not A.any():
        return np.zeros(k, dtype=np.int64) if not (b % n if n else b).any() else None
    D, U, V = smith_decomposition(A.tolist())
    c = U * Matrix(m, 1, [int(x) for x in b])
    y = [0] * A.shape[1]
    for i in range(m):
        d = D[i, i] if i < min(D.shape) else 0
        if d == 0:
            if c[i] != 0:
                return None
        elif c[i] % d:
            return None
        else:
            y[i] = c[i] // d
    x = V * Matrix(len(y), 1, y)
    x = np.array([int(v) for v in x[:k]], dtype=np.int64)
    return x % n if n else x
