import unittest
from exal2.finring import is_isomorphic, preset, residue_module, ring_as_module, ring_homs, zmod
from exal2.tfunctors import (
    build_ls_complex,
    format_poly,
    parse_poly,
    preset_presentation,
    presentation,
    t_dimensions,
    t_functor,
)
from exal2.utils.errors import NotConfluent, NotFiniteDimensional, ShapeMismatch


class TfunctorsTestCase(unittest.TestCase):
    """Test suite for presentations and the cotangent T functors"""

    maxDiff = None

    def setUp(self):
        self.b8 = preset_presentation("F2[x,y]/(x^2,xy,y^2)")

    def tearDown(self):
        pass

    def _residue(self, P):
        B = P.ring()
        return residue_module(B, ring_homs(B, zmod(2))[0])

    def test_parse_and_format(self):
        """Test parse_poly and format_poly functions"""
        poly = parse_poly("x^2 + 3*x*y + 2", ["x", "y"], 2)
        self.assertEqual(poly, {(2, 0): 1, (1, 1): 1})
        self.assertEqual(format_poly(poly, ["x", "y"]), "x^2 + x*y")
        self.assertEqual(format_poly({}, ["x"]), "0")
        self.assertEqual(parse_poly("3", [], 2), {(): 1})

    def test_presentation_ring(self):
        """Test the tabulated ring of a presentation"""
        self.assertEqual(self.b8.ring().order, 8)
        self.assertTrue(is_isomorphic(self.b8.ring(), preset("F2[x,y]/(x^2,xy,y^2)")))
        F4 = preset_presentation("F4")
        self.assertTrue(is_isomorphic(F4.ring(), preset("F4")))
        x = parse_poly("x", ["x"], 2)
        self.assertEqual(F4.element(parse_poly("x^2", ["x"], 2)), F4.element(parse_poly("x + 1", ["x"], 2)))
        self.assertNotEqual(F4.element(x), F4.element({}))

    def test_presentation_errors(self):
        """Test presentation rejects bad rule sets"""
        with self.assertRaises(NotConfluent):
            presentation(2, ["x"], ["x -> x^2"])
        with self.assertRaises(NotConfluent):
            presentation(2, ["x", "y"], ["x^2 -> 0", "x*y -> x", "y^2 -> 0"])
        with self.assertRaises(NotConfluent):
            presentation(2, ["x"], ["x^3 -> 0"], relations=["x^2"])
        with self.assertRaises(NotFiniteDimensional):
            presentation(2, ["x", "y"], ["x^2 -> 0"])
        with self.assertRaises(ShapeMismatch):
            presentation(4, ["x"], ["x^2 -> 0"])
        with self.assertRaises(KeyError):
            preset_presentation("F3[x]")

    def test_ls_complex_ranks(self):
        """Test build_ls_complex ranks"""
        L = build_ls_complex(self.b8)
        s, m, n = L.ranks
        self.assertEqual((m, n), (3, 2))
        self.assertEqual(len(L.d2()), s)

    def test_t_dimensions(self):
        """Test t_dimensions with residue coefficients"""
        self.assertEqual(t_dimensions(build_ls_complex(self.b8), self._residue(self.b8)), (2, 3, 2))
        dual = preset_presentation("F2[x]/(x^2)")
        self.assertEqual(t_dimensions(build_ls_complex(dual), self._residue(dual)), (1, 1, 0))
        field = preset_presentation("F2")
        self.assertEqual(t_dimensions(build_ls_complex(field), ring_as_module(field.ring())), (0, 0, 0))

    def test_t_functor(self):
        """Test t_functor function"""
        dual = preset_presentation("F2[x]/(x^2)")
        self.assertEqual(t_functor(dual, self._residue(dual), 1), 1)
        with self.assertRaises(ShapeMismatch):
            t_functor(dual, self._residue(dual), 3)

    def test_t_dimensions_foreign_module(self):
        """Test t_dimensions refuses a module over another ring"""
        with self.assertRaises(ShapeMismatch):
            t_dimensions(build_ls_complex(self.b8), ring_as_module(zmod(2)))


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
