import unittest
import numpy as np
from sympy import Matrix
from exal2.linalg import (
    AbelianQuotient,
    QuotientSpace,
    integer_kernel,
    kernel_mod_n,
    nullspace_mod,
    rank_mod,
    rref_mod,
    smith_decomposition,
    solve_integer,
    solve_mod,
)


class LinalgTestCase(unittest.TestCase):
    """Test suite for modular and integral linear algebra"""

    maxDiff = None

    def setUp(self):
        self.A = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.int64)

    def tearDown(self):
        pass

    def test_rref_mod(self):
        """Test rref_mod function"""
        R, pivots = rref_mod(self.A, 2)
        self.assertEqual(pivots, [0, 1])
        self.assertEqual(R.tolist(), [[1, 0, 1], [0, 1, 1]])

    def test_rank_mod(self):
        """Test rank_mod function"""
        self.assertEqual(rank_mod(np.array([[1, 1], [1, 1]]), 2), 1)
        self.assertEqual(rank_mod(np.array([[1, 2], [2, 1]]), 3), 1)
        self.assertEqual(rank_mod(np.array([[1, 2], [2, 1]]), 5), 2)
        self.assertEqual(rank_mod(np.zeros((0, 3)), 2), 0)

    def test_nullspace_mod(self):
        """Test nullspace_mod function"""
        N = nullspace_mod(self.A, 2)
        self.assertEqual(N.shape, (3, 1))
        self.assertFalse(((self.A @ N) % 2).any())
        self.assertEqual(nullspace_mod(np.zeros((0, 2), dtype=np.int64), 3).tolist(), [[1, 0], [0, 1]])

    def test_solve_mod(self):
        """Test solve_mod function"""
        x = solve_mod(self.A, np.array([1, 0]), 2)
        self.assertEqual(((self.A @ x) % 2).tolist(), [1, 0])
        self.assertIsNone(solve_mod(np.array([[1, 1], [1, 1]]), np.array([0, 1]), 2))

    def test_quotient_space(self):
        """Test QuotientSpace coordinates and membership"""
        cycles = np.eye(2, dtype=np.int64)
        boundaries = np.array([[1], [0]], dtype=np.int64)
        Q = QuotientSpace(cycles, boundaries, 2)
        self.assertEqual(Q.dimension, 1)
        self.assertEqual(Q.order, 2)
        self.assertEqual(Q.coordinates(np.array([1, 0])), (0,))
        self.assertEqual(Q.coordinates(np.array([1, 1])), (1,))
        self.assertEqual(len(list(Q.elements())), 2)

    def test_quotient_space_membership(self):
        """Test QuotientSpace rejects vectors outside the cycles"""
        Q = QuotientSpace(np.array([[1], [0]], dtype=np.int64), np.zeros((2, 0), dtype=np.int64), 2)
        self.assertTrue(Q.in_subspace(np.array([1, 0])))
        self.assertFalse(Q.in_subspace(np.array([0, 1])))
        self.assertIsNone(Q.coordinates(np.array([0, 1])))

    def test_smith_decomposition(self):
        """Test smith_decomposition function"""
        A = [[2, 4], [6, 8]]
        D, U, V = smith_decomposition(A)
        self.assertEqual(U * Matrix(A) * V, D)
        self.assertEqual((D[0, 0], D[1, 1]), (2, 4))
        self.assertEqual(abs(U.det()), 1)
        self.assertEqual(abs(V.det()), 1)

    def test_abelian_quotient(self):
        """Test AbelianQuotient order, reduce and lift"""
        G = AbelianQuotient(2, [[2, 0], [0, 3]])
        self.assertEqual(G.order, 6)
        self.assertEqual(G.reduce([2, 0]), G.reduce([0, 0]))
        self.assertEqual(G.reduce([0, 3]), G.reduce([0, 0]))
        for c in G.elements():
            self.assertEqual(G.reduce(G.lift(c)), c)

    def test_abelian_quotient_infinite(self):
        """Test AbelianQuotient refuses a lattice of deficient rank"""
        with self.assertRaises(ValueError):
            AbelianQuotient(2, [[1, 0]])

    def test_integer_kernel(self):
        """Test integer_kernel function"""
        K = integer_kernel([[1, 1]])
        self.assertEqual(K.shape, (2, 1))
        self.assertFalse((np.array([[1, 1]]) @ K).any())
        self.assertEqual(abs(int(K[0, 0])), 1)

    def test_kernel_mod_n(self):
        """Test kernel_mod_n function over composite and prime moduli"""
        self.assertEqual(kernel_mod_n([[2]], 4).tolist(), [[2]])
        K = kernel_mod_n(self.A, 2)
        self.assertFalse(((self.A @ K) % 2).any())

    def test_solve_integer(self):
        """Test solve_integer function"""
        self.assertEqual(solve_integer([[2]], [4]).tolist(), [2])
        self.assertIsNone(solve_integer([[2]], [3]))
        x = solve_integer([[2]], [1], n=3)
        self.assertEqual((2 * int(x[0]) - 1) % 3, 0)
        self.assertIsNone(solve_integer([[2]], [1], n=4))


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
