import unittest
from unittest.mock import patch
import numpy as np
from exal2.finring import (
    ElementaryCoordinates,
    check_exact,
    compose_homs,
    epi_pullback_is_pushout_check,
    fiber_product,
    find_isomorphism,
    identity_hom,
    ideal_generated,
    is_isomorphic,
    kernel,
    make_ideal,
    preset,
    product_ring,
    quotient,
    quotient_module,
    ring_as_module,
    ring_hom,
    ring_homs,
    square_zero_ring,
    structure_map,
    submodule,
    truncated_polynomial,
    validate_ring,
    verify_fiber_universal,
    zmod,
)
from exal2.utils.configs import config
from exal2.utils.errors import AxiomViolation, NotAnIdeal, NotSurjective, TargetMismatch, TooLarge


class FinringTestCase(unittest.TestCase):
    """Test suite for finite rings, ideals and modules"""

    maxDiff = None

    def setUp(self):
        self.Z2 = zmod(2)
        self.Z4 = zmod(4)
        self.D = preset("F2[x]/(x^2)")

    def tearDown(self):
        pass

    def test_zmod(self):
        """Test zmod function"""
        self.assertEqual(self.Z4.order, 4)
        self.assertEqual(self.Z4.characteristic, 4)
        self.assertEqual(self.Z4.m(3, 3), 1)
        self.assertEqual(self.Z4.sub(1, 3), 2)

    def test_truncated_polynomial_encoding(self):
        """Test base-p element encoding of F2[x]/(x^4)"""
        X4 = truncated_polynomial(2, 4)
        self.assertEqual(X4.order, 16)
        self.assertEqual(X4.characteristic, 2)
        self.assertEqual(X4.m(2, 2), 4)
        self.assertEqual(X4.m(2, 4), 8)
        self.assertEqual(X4.m(4, 4), 0)

    def test_square_zero_ring(self):
        """Test square_zero_ring function"""
        B8 = square_zero_ring(2, 2)
        self.assertEqual(B8.order, 8)
        for x in (2, 4, 6):
            for y in (2, 4, 6):
                self.assertEqual(B8.m(x, y), 0)

    def test_presets(self):
        """Test preset function"""
        self.assertEqual(preset("F4").order, 4)
        self.assertEqual(preset("Z4[x]/(x^2)").order, 16)
        with self.assertRaises(KeyError):
            preset("F9")

    def test_validate_ring_failure(self):
        """Test validate_ring names the failing law"""
        ar = np.arange(3)
        with self.assertRaises(AxiomViolation) as ctx:
            validate_ring((ar[:, None] + ar[None, :]) % 3, np.zeros((3, 3)), 0, 1)
        self.assertEqual(ctx.exception.law, "multiplicative identity")

    def test_ring_homs(self):
        """Test ring_homs function"""
        self.assertEqual(len(ring_homs(self.Z4, self.Z2)), 1)
        self.assertEqual(len(ring_homs(self.Z2, self.Z4)), 0)
        self.assertEqual(len(ring_homs(self.D, self.D)), 2)
        self.assertEqual(len(ring_homs(preset("F4"), preset("F4"))), 2)

    def test_ring_hom_rejects(self):
        """Test ring_hom refuses a non multiplicative table"""
        with self.assertRaises(AxiomViolation):
            ring_hom(self.Z2, self.Z4, [0, 1])

    def test_structure_map(self):
        """Test structure_map function"""
        h = structure_map(self.Z4, self.D)
        self.assertEqual(h.table.tolist(), [0, 1, 0, 1])
        with self.assertRaises(TargetMismatch):
            structure_map(self.D, self.Z2)

    def test_compose_homs(self):
        """Test compose_homs function"""
        h = ring_homs(self.Z4, self.Z2)[0]
        self.assertEqual(compose_homs(identity_hom(self.Z4), h).table.tolist(), h.table.tolist())

    def test_find_isomorphism(self):
        """Test find_isomorphism and is_isomorphic functions"""
        self.assertIsNotNone(find_isomorphism(preset("F2[t]/(t^2)"), self.D))
        self.assertFalse(is_isomorphic(self.Z4, self.D))
        self.assertFalse(is_isomorphic(preset("Z2xZ2"), preset("F4")))

    def test_make_ideal(self):
        """Test make_ideal and ideal_generated functions"""
        with self.assertRaises(NotAnIdeal):
            make_ideal(self.Z4, [0, 1])
        self.assertEqual(ideal_generated(self.Z4, [2]).members, frozenset({0, 2}))

    def test_quotient(self):
        """Test quotient function"""
        Q, proj = quotient(self.Z4, make_ideal(self.Z4, [0, 2]))
        self.assertEqual(Q.order, 2)
        self.assertEqual(proj(3), proj(1))
        self.assertEqual(kernel(proj).members, frozenset({0, 2}))

    def test_fiber_product(self):
        """Test fiber_product and its universal property"""
        h = ring_homs(self.Z4, self.Z2)[0]
        P, p1, p2 = fiber_product(h, h)
        self.assertEqual(P.order, 8)
        self.assertTrue(all(h(p1(x)) == h(p2(x)) for x in range(P.order)))
        self.assertTrue(verify_fiber_universal(h, h, P, p1, p2, self.Z4))
        with self.assertRaises(TargetMismatch):
            fiber_product(h, identity_hom(self.Z4))

    def test_check_exact(self):
        """Test check_exact function on 0 -> 2Z/4 -> Z/4 -> Z/2 -> 0"""
        M = ring_as_module(self.Z4)
        _, incl = submodule(M, [0, 2])
        _, proj = quotient_module(M, [0, 2])
        report = check_exact([incl, proj])
        self.assertTrue(report.exact)
        self.assertEqual(report.failures(), [])
        short = check_exact([incl], surjective_end=True)
        self.assertFalse(short.exact)

    def test_elementary_coordinates(self):
        """Test ElementaryCoordinates function"""
        B8 = square_zero_ring(2, 2)
        c = ElementaryCoordinates(B8)
        self.assertEqual(c.p, 2)
        self.assertEqual(c.dim, 3)
        for x in range(B8.order):
            self.assertEqual(c.element(c.coords(x)), x)
        with self.assertRaises(ValueError):
            ElementaryCoordinates(self.Z4)

    def test_epi_pullback_is_pushout_check(self):
        """Test epi_pullback_is_pushout_check function"""
        X, Y, Z = ["a", "b", "c"], [1, 2], ["u", "v"]
        fx = {"a": "u", "b": "u", "c": "v"}
        fy = {1: "u", 2: "v"}
        self.assertTrue(epi_pullback_is_pushout_check(X, Y, Z, fx, fy))
        with self.assertRaises(NotSurjective):
            epi_pullback_is_pushout_check(X, Y, Z, fx, {1: "u", 2: "u"})

    def test_product_ring(self):
        """Test product_ring function"""
        P = product_ring(self.Z2, self.Z4)
        self.assertEqual(P.order, 8)
        self.assertEqual(P.one, 5)
        self.assertEqual(P.labels[P.m(7, 6)], (1, 2))
        big = product_ring(zmod(32), zmod(32))
        self.assertEqual(big.order, 1024)
        self.assertEqual(big.m(big.one, 70), 70)
        self.assertEqual(big.labels[big.a(33, 33)], (2, 2))
        with patch.dict(config, {"max_product_order": 4}):
            with self.assertRaises(TooLarge):
                product_ring(self.Z2, self.Z4)


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
