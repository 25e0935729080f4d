import unittest
import numpy as np
from exal2.cochains import AffineSystem, FactorSetModel, Form, FunctionUnknown, cocycle_quotient, total
from exal2.finring import ElementaryCoordinates, preset, residue_module, ring_as_module, ring_homs, structure_map, zmod


class CochainsTestCase(unittest.TestCase):
    """Test suite for factor-set unknowns and affine systems"""

    maxDiff = None

    def setUp(self):
        self.F2 = zmod(2)
        self.D = preset("F2[x]/(x^2)")
        self.residue = residue_module(self.D, ring_homs(self.D, self.F2)[0])

    def tearDown(self):
        pass

    def test_form_arithmetic(self):
        """Test Form addition, negation and evaluation"""
        x = Form.unknown("x", 1)
        y = Form.unknown("y", 1)
        f = total([x, y, x, Form.constant([1], 1)], 1)
        values = {"x": np.array([1]), "y": np.array([0])}
        self.assertEqual(f.evaluate(values, 2).tolist(), [1])
        self.assertEqual((f - f).evaluate(values, 2).tolist(), [0])
        self.assertEqual(x.scale(3).evaluate(values, 5).tolist(), [3])

    def test_affine_system(self):
        """Test AffineSystem solve and nullspace"""
        system = AffineSystem(2, 1, ["x", "y"])
        system.require(Form.unknown("x", 1) + Form.unknown("y", 1) + Form.constant([1], 1))
        sol = system.solve()
        self.assertEqual(int(sol.sum()) % 2, 1)
        self.assertEqual(system.nullspace().shape, (2, 1))

    def test_affine_system_inconsistent(self):
        """Test AffineSystem detects a constant nonzero equation"""
        system = AffineSystem(2, 1, ["x"])
        system.require(Form.constant([1], 1))
        self.assertTrue(system.inconsistent)
        self.assertIsNone(system.solve())
        with self.assertRaises(KeyError):
            system.require(Form.unknown("z", 1))

    def test_function_unknown(self):
        """Test FunctionUnknown keeps fixed points at zero"""
        lam = FunctionUnknown("lam", 1, self.D, fixed=[self.D.one])
        self.assertEqual(len(lam.keys()), 2)
        self.assertEqual(lam(self.D.zero).terms, {})
        self.assertEqual(lam(self.D.one).terms, {})
        linear = FunctionUnknown("lam", 1, self.D, ElementaryCoordinates(self.D, first=[self.D.one]), fixed=[self.D.one])
        self.assertEqual(len(linear.keys()), 1)
        self.assertEqual(set(linear(3).terms), {("lam", 1)})

    def test_cocycle_quotient_dual_numbers(self):
        """Test cocycle_quotient of F2[x]/(x^2) with residue coefficients"""
        model = FactorSetModel(self.D, self.residue, structure_map(self.F2, self.D))
        self.assertTrue(model.linear)
        _, quotient = cocycle_quotient(model)
        self.assertEqual(quotient.order, 2)

    def test_cocycle_quotient_field(self):
        """Test cocycle_quotient vanishes over the prime field"""
        model = FactorSetModel(self.F2, ring_as_module(self.F2), structure_map(self.F2, self.F2))
        _, quotient = cocycle_quotient(model)
        self.assertEqual(quotient.order, 1)


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
