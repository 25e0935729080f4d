import unittest
from exal2.freealg import (
    TruncFreeAlgebra,
    constant_map,
    cover_sweep,
    equalizer_noncover_check,
    fiber_image_witness,
    fiber_set,
    kernel_dimension,
    kernel_witness_check,
    module_fiber_lift,
    monoid_fiber_lift,
    ring_fiber_cover_check,
    set_map,
)
from exal2.utils.errors import DegreeOverflow, NoMatch, NotSurjective, ShapeMismatch


class FreealgTestCase(unittest.TestCase):
    """Test suite for truncated free algebras and fiber products"""

    maxDiff = None

    def setUp(self):
        self.A = TruncFreeAlgebra(["x", "y"], 2)
        self.f = constant_map(["x", "y"], ["t"])
        self.g = constant_map(["x'", "y'"], ["t"])

    def tearDown(self):
        pass

    def test_algebra_arithmetic(self):
        """Test TruncFreeAlgebra add, mul and format"""
        A = self.A
        x, y = A.gen("x"), A.gen("y")
        self.assertEqual(A.mul(x, y), {(0, 1): 1})
        self.assertEqual(A.format(A.sub(x, y)), "x + -1*y")
        self.assertEqual(A.format(A.zero()), "0")
        self.assertEqual(A.mul(A.one(), x), x)

    def test_degree_overflow(self):
        """Test products above the bound raise DegreeOverflow"""
        A = self.A
        with self.assertRaises(DegreeOverflow):
            A.mul(A.monomial("x", "x"), A.gen("y"))

    def test_modulus(self):
        """Test coefficients reduce modulo the modulus"""
        A2 = TruncFreeAlgebra(["x"], 2, modulus=2)
        x = A2.gen("x")
        self.assertEqual(A2.add(x, x), {})
        self.assertEqual(A2.mul(A2.add(A2.one(), x), A2.add(A2.one(), x)), A2.add(A2.one(), A2.monomial("x", "x")))

    def test_set_map(self):
        """Test set_map and fiber_set functions"""
        h = set_map(["a", "b"], ["s"], {"a": "s", "b": "s"})
        self.assertTrue(h.surjective)
        with self.assertRaises(ShapeMismatch):
            set_map(["a", "b"], ["s"], {"a": "s"})
        labels, p1, p2 = fiber_set(self.f, self.g)
        self.assertEqual(len(labels), 4)
        self.assertEqual(p1.table, (0, 0, 1, 1))
        self.assertEqual(p2.table, (0, 1, 0, 1))

    def test_monoid_fiber_lift(self):
        """Test monoid_fiber_lift function"""
        f = set_map(["a", "b"], ["s", "u"], ["s", "u"])
        g = set_map(["c", "d"], ["s", "u"], ["u", "s"])
        self.assertEqual(monoid_fiber_lift([0, 1], [0, 1], f, g), (0, 1))
        with self.assertRaises(NoMatch):
            monoid_fiber_lift([0, 0], [0, 1], f, g)

    def test_module_fiber_lift(self):
        """Test module_fiber_lift projects back to its input"""
        lifted = module_fiber_lift({0: 1, 1: 2}, {0: 3}, self.f, self.g)
        back_x, back_y = {}, {}
        for (u, v), c in lifted.items():
            back_x[u] = back_x.get(u, 0) + c
            back_y[v] = back_y.get(v, 0) + c
        self.assertEqual({k: c for k, c in back_x.items() if c}, {0: 1, 1: 2})
        self.assertEqual({k: c for k, c in back_y.items() if c}, {0: 3})
        with self.assertRaises(NoMatch):
            module_fiber_lift({0: 1}, {0: 2}, self.f, self.g)

    def test_ring_fiber_cover_check(self):
        """Test ring_fiber_cover_check function"""
        report = ring_fiber_cover_check(self.f, self.g, 2)
        self.assertTrue(report.surjective)
        self.assertEqual([row["degree"] for row in report.rows], [0, 1, 2])
        missing = set_map(["a"], ["s", "u"], ["s"])
        with self.assertRaises(NotSurjective):
            ring_fiber_cover_check(missing, missing, 1)

    def test_cover_sweep(self):
        """Test cover_sweep over sets of size at most 3 in degree 3"""
        rows = cover_sweep(max_size=3, degree=3, modulus=4)
        self.assertEqual({(row["Q"], row["R"], row["S"]) for row in rows if row["S"] == 3}, {(3, 3, 3)})
        self.assertIn((3, 2, 2), {(row["Q"], row["R"], row["S"]) for row in rows})
        self.assertTrue(all(row["surjective"] for row in rows))

    def test_kernel_witness(self):
        """Test the comparison map has a kernel"""
        self.assertTrue(kernel_witness_check())
        self.assertTrue(kernel_witness_check(modulus=2))
        self.assertEqual(kernel_dimension(self.f, self.g, 1, 2), 1)
        self.assertEqual(kernel_dimension(self.f, self.g, 2, 2), 5)

    def test_fiber_image_witness(self):
        """Test fiber_image_witness with an empty first factor"""
        f = set_map([], ["t"], [])
        g = constant_map(["x", "y"], ["t"])
        a, b = fiber_image_witness(f, g)
        self.assertEqual(a, {})
        self.assertEqual(sorted(b.values()), [-1, 1])
        self.assertIsNone(fiber_image_witness(self.f, self.g))

    def test_equalizer_noncover_check(self):
        """Test the equalizer of identity and swap is not covered"""
        R, S = ["x", "y"], ["x", "y"]
        u = set_map(R, S, ["x", "y"])
        v = set_map(R, S, ["y", "x"])
        report = equalizer_noncover_check(u, v, 2)
        self.assertFalse(report.surjective)
        self.assertEqual(report.rows[0]["set_equalizer"], 0)
        self.assertEqual(report.rows[0]["witness"], "x + y")
        mod2 = equalizer_noncover_check(u, v, 2, modulus=2)
        self.assertEqual(mod2.rows[1]["equalizer_generators"], 2)
        with self.assertRaises(ShapeMismatch):
            equalizer_noncover_check(u, set_map(R, ["x"], ["x", "x"]), 1)


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
