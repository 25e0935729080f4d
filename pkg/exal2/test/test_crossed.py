import unittest
import numpy as np
from exal2.crossed import (
    base_change,
    crossed_from_ideal_pair,
    ideal_as_crossed,
    semidirect,
    square_zero_crossed,
    validate_crossed,
)
from exal2.finring import is_isomorphic, make_ideal, preset, ring_as_module, ring_homs, zmod
from exal2.utils.errors import CrossedViolation


class CrossedTestCase(unittest.TestCase):
    """Test suite for crossed rings"""

    maxDiff = None

    def setUp(self):
        self.Z2 = zmod(2)
        self.Z4 = zmod(4)
        self.X4 = preset("F2[x]/(x^4)")

    def tearDown(self):
        pass

    def test_ideal_as_crossed(self):
        """Test ideal_as_crossed function"""
        c = ideal_as_crossed(make_ideal(self.Z4, [0, 2]))
        self.assertEqual(c.order, 2)
        self.assertEqual(c.f.tolist(), [0, 2])
        self.assertEqual(c.nm(1, 1), 0)

    def test_validate_crossed_failure(self):
        """Test validate_crossed reports the crossed identity"""
        M = ring_as_module(self.Z2)
        with self.assertRaises(CrossedViolation) as ctx:
            validate_crossed(self.Z2, M, self.Z2.mul, [0, 0])
        self.assertEqual(ctx.exception.law, "crossed identity")

    def test_square_zero_semidirect(self):
        """Test semidirect ring of a square-zero crossed ring"""
        c = square_zero_crossed(self.Z2, ring_as_module(self.Z2))
        self.assertFalse(np.asarray(c.f).any())
        E = semidirect(self.Z2, c)
        self.assertEqual(E.order, 4)
        self.assertTrue(is_isomorphic(E, preset("F2[x]/(x^2)")))

    def test_base_change(self):
        """Test base_change of the ideal 2Z/4 along Z/4 -> Z/2"""
        h = ring_homs(self.Z4, self.Z2)[0]
        c = base_change(ideal_as_crossed(make_ideal(self.Z4, [0, 2])), h)
        self.assertIs(c.ring, self.Z2)
        self.assertEqual(c.order, 2)
        self.assertEqual(set(c.f.tolist()), {0})

    def test_crossed_from_ideal_pair(self):
        """Test crossed_from_ideal_pair function"""
        J = make_ideal(self.X4, [0, 4, 8, 12])
        L = make_ideal(self.X4, [0, 8])
        c, proj, members = crossed_from_ideal_pair(self.X4, J, L)
        self.assertEqual(c.order, 4)
        self.assertEqual(c.ring.order, 8)
        self.assertEqual(members, [0, 4, 8, 12])
        self.assertEqual(proj(8), proj(0))

    def test_crossed_from_ideal_pair_product(self):
        """Test crossed_from_ideal_pair refuses J·L != 0"""
        m = make_ideal(self.X4, range(0, 16, 2))
        with self.assertRaises(CrossedViolation):
            crossed_from_ideal_pair(self.X4, m, m)


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
