import unittest
from exal2.defm import (
    census_problems,
    check_transitivity_exactness,
    deformation_action,
    deformation_space,
    deformations,
    delta,
    der_base_invariance,
    gamma,
    is_deformation,
    make_frame,
    obstruction,
    obstruction_vanishes,
    preset_problem,
    pushout_base_extension,
    rho,
    square_zero_ideals,
    t_cubed_over_residue,
    trivial_problem,
    verify_deformation_theorem,
    z4_over_z2_dual_numbers,
)
from exal2.extn import derivations, exal_classify, splittings, trivial_extension
from exal2.finring import identity_hom, preset, residue_module, ring_homs, structure_map, zmod
from exal2.utils.errors import ShapeMismatch


class DefmTestCase(unittest.TestCase):
    """Test suite for deformations, obstructions and the transitivity sequence"""

    maxDiff = None

    def setUp(self):
        self.F2 = zmod(2)
        self.D = preset("F2[x]/(x^2)")
        self.res = residue_module(self.D, ring_homs(self.D, self.F2)[0])

    def tearDown(self):
        pass

    def test_unobstructed_problem(self):
        """Test deformations of the dual numbers over Z/4"""
        prob = z4_over_z2_dual_numbers()
        self.assertEqual(prob.Ap.order, 4)
        self.assertTrue(obstruction_vanishes(prob))
        S = deformation_space(prob)
        self.assertFalse(S.empty)
        self.assertEqual(S.order, exal_classify(prob.base, prob.M).order)
        for D in deformations(prob):
            self.assertTrue(is_deformation(prob, D.extension))
            self.assertEqual(D.Bp.order, 16)

    def test_obstructed_problem(self):
        """Test the cubic truncation over the residue field is obstructed"""
        prob = t_cubed_over_residue()
        self.assertFalse(obstruction_vanishes(prob))
        self.assertTrue(deformation_space(prob).empty)
        self.assertEqual(deformations(prob), [])
        self.assertIs(obstruction(prob).B, prob.B)

    def test_trivial_problem(self):
        """Test a square-zero ideal of zero leaves plain extensions"""
        prob = trivial_problem()
        S = deformation_space(prob)
        self.assertEqual(S.order, 2)
        for c in S.classes():
            self.assertEqual(S.class_of(S.representative(c)), c)
        self.assertEqual(pushout_base_extension(prob).M.order, prob.M.order)

    def test_verify_deformation_theorem(self):
        """Test verify_deformation_theorem on every frozen problem"""
        for name in ("z4_over_z2_dual_numbers", "t_cubed_over_residue", "trivial"):
            report = verify_deformation_theorem(preset_problem(name))
            self.assertTrue(report["existence_iff_vanishing"], name)
            self.assertTrue(report["torsor"], name)
            self.assertTrue(report["automorphisms"], name)
        obstructed = verify_deformation_theorem(t_cubed_over_residue())
        self.assertEqual((obstructed["exists"], obstructed["deformations"]), (False, 0))

    def test_deformation_action(self):
        """Test acting with Exal moves between deformation classes"""
        prob = trivial_problem()
        S = deformation_space(prob)
        D0 = S.representative(S.classes()[0])
        exal = exal_classify(prob.base, prob.M)
        reached = {S.class_of(deformation_action(D0, exal.representative(c))) for c in exal.classes()}
        self.assertEqual(len(reached), S.order)
        foreign = trivial_extension(structure_map(self.F2, self.F2), residue_module(self.F2, identity_hom(self.F2)))
        with self.assertRaises(ShapeMismatch):
            deformation_action(D0, foreign)

    def test_der_base_invariance(self):
        """Test derivations do not see the square-zero thickening of the base"""
        prob = z4_over_z2_dual_numbers()
        self.assertTrue(der_base_invariance(prob.omega, prob.base, prob.M))

    def test_preset_problem_unknown(self):
        """Test preset_problem function"""
        with self.assertRaises(KeyError):
            preset_problem("nonexistent")

    def test_make_frame(self):
        """Test make_frame refuses maps that do not compose"""
        u = identity_hom(self.F2)
        v = structure_map(self.F2, self.D)
        frame = make_frame(u, v, self.res)
        self.assertIs(frame.uv.target, self.D)
        with self.assertRaises(ShapeMismatch):
            make_frame(v, v, self.res)
        with self.assertRaises(ShapeMismatch):
            make_frame(u, v, residue_module(self.F2, identity_hom(self.F2)))

    def test_gamma_of_derivation(self):
        """Test gamma sends derivations to trivial extensions with twisted structure"""
        frame = make_frame(identity_hom(self.F2), structure_map(self.F2, self.D), self.res)
        for theta in derivations(frame.u, frame.M_B):
            self.assertTrue(splittings(gamma(frame, theta)))

    def test_transitivity_dual_over_field(self):
        """Test transitivity sequence of F2 -> F2 -> F2[x]/(x^2)"""
        frame = make_frame(identity_hom(self.F2), structure_map(self.F2, self.D), self.res)
        nodes = check_transitivity_exactness(frame)
        self.assertEqual(len(nodes), 6)
        self.assertTrue(all(node["ok"] for node in nodes), [n for n in nodes if not n["ok"]])

    def test_transitivity_dual_over_dual(self):
        """Test transitivity sequence of F2 -> F2[x]/(x^2) -> F2[x]/(x^2)"""
        u = structure_map(self.F2, self.D)
        frame = make_frame(u, identity_hom(self.D), self.res)
        nodes = check_transitivity_exactness(frame)
        self.assertTrue(all(node["ok"] for node in nodes), [n for n in nodes if not n["ok"]])

    def test_delta_and_rho(self):
        """Test delta carries a B-structure and rho replaces it"""
        frame = make_frame(structure_map(self.F2, self.D), identity_hom(self.D), self.res)
        zeta = exal_classify(frame.u, frame.M_B).representative((0,))
        xi = delta(frame, zeta)
        self.assertIsNotNone(xi.a_structure)
        self.assertIsNotNone(rho(xi).a_structure)
    def test_square_zero_ideals(self):
        """Test square_zero_ideals function"""
        self.assertEqual([sorted(I.members) for I in square_zero_ideals(zmod(4))], [[0, 2]])
        self.assertEqual(len(square_zero_ideals(preset("F2[x]/(x^3)"))), 1)
        self.assertEqual(square_zero_ideals(preset("F4")), [])

    def test_census_problems(self):
        """Test census_problems finds obstructed and unobstructed problems"""
        problems = list(census_problems(["Z4", "F2[x]/(x^3)", "F4"], 4, 2))
        self.assertEqual(sum(p.name.startswith("Z4/") for p in problems), 2)
        self.assertEqual(len(problems), 6)
        self.assertEqual(list(census_problems(["F2[x]/(x^3)"], 2, 2)), [])
        vanishing = [obstruction_vanishes(p) for p in problems]
        self.assertIn(False, vanishing)
        self.assertIn(True, vanishing)
        for prob in problems:
            report = verify_deformation_theorem(prob)
            self.assertTrue(report["existence_iff_vanishing"], prob.name)
            self.assertTrue(report["torsor"], prob.name)
            self.assertTrue(report["automorphisms"], prob.name)


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
