import unittest
from dataclasses import replace
from exal2.defm import obstruction, pushout_base_extension, t_cubed_over_residue
from exal2.ext2 import (
    act_on_butterfly,
    baer_sum_2ext,
    baer_sum_butterfly,
    butterfly_automorphism_to_extension,
    butterfly_automorphisms,
    butterfly_isomorphism,
    canonical_self_difference_splitting,
    chain_map_to_butterfly,
    check_exal2_group,
    complete_intersection_cover,
    compose,
    exal2_classify,
    ideal_2extension,
    identity_butterfly,
    invert,
    is_invertible,
    isomorphic_2ext,
    local_split_free_base,
    minimal_polynomial,
    negate_2ext,
    product_butterfly,
    pullback_2ext,
    pullback_chain_map,
    pushout_2ext,
    pushout_chain_map,
    restrictions,
    shearing_isomorphism,
    split_search,
    trivial_2ext_with_structure,
    trivial_2extension,
    validate_butterfly,
)
from exal2.extn import exal_classify, splittings, trivial_extension
from exal2.finring import (
    ElementaryCoordinates,
    direct_sum,
    make_ideal,
    module_hom,
    preset,
    residue_module,
    ring_as_module,
    ring_homs,
    structure_map,
    zmod,
)
from exal2.utils.errors import ButterflyViolation, NoSection, NotALift, NotInvertible, ShapeMismatch


class Ext2TestCase(unittest.TestCase):
    """Test suite for 2-extensions and butterflies"""

    maxDiff = None

    def setUp(self):
        self.F2 = zmod(2)
        self.D = preset("F2[x]/(x^2)")
        self.B8 = preset("F2[x,y]/(x^2,xy,y^2)")
        self.res = residue_module(self.D, ring_homs(self.D, self.F2)[0])
        self.trivial = trivial_2extension(self.D, self.res)
        X4 = preset("F2[x]/(x^4)")
        self.x4 = ideal_2extension(X4, make_ideal(X4, [0, 4, 8, 12]), make_ideal(X4, [0, 8]))

    def tearDown(self):
        pass

    def test_trivial_2extension(self):
        """Test trivial_2extension function"""
        self.assertEqual(self.trivial.R.order, 4)
        self.assertEqual(self.trivial.N.order, 2)
        self.assertIsNotNone(split_search(self.trivial))

    def test_ideal_2extension(self):
        """Test ideal_2extension shapes"""
        self.assertEqual(self.x4.R.order, 8)
        self.assertEqual(self.x4.B.order, 4)
        self.assertEqual(self.x4.N.order, 4)
        self.assertEqual(self.x4.M.order, 2)

    def test_identity_butterfly(self):
        """Test identity_butterfly, invert and compose functions"""
        Q = identity_butterfly(self.x4)
        self.assertTrue(is_invertible(Q))
        inv = invert(Q)
        self.assertIsNotNone(butterfly_isomorphism(compose(Q, inv), Q))
        self.assertIsNotNone(butterfly_isomorphism(compose(Q, Q), Q))

    def test_compose_mismatch(self):
        """Test compose refuses butterflies that do not meet"""
        with self.assertRaises(ShapeMismatch):
            compose(identity_butterfly(self.trivial), identity_butterfly(self.x4))

    def test_self_difference(self):
        """Test canonical_self_difference_splitting and isomorphic_2ext"""
        S = canonical_self_difference_splitting(self.x4)
        self.assertEqual(S.target.R.order, self.x4.B.order)
        self.assertTrue(isomorphic_2ext(self.x4, self.x4))
        self.assertIsNotNone(split_search(baer_sum_2ext(self.x4, negate_2ext(self.x4))))

    def test_square_zero_ideal_pair_splits(self):
        """Test split_search on 0 -> m -> m -> F2 -> F2 -> 0"""
        m = make_ideal(self.B8, [0, 2, 4, 6])
        xi = ideal_2extension(self.B8, m, m)
        self.assertIsNotNone(split_search(xi))

    def test_local_split_free_base(self):
        """Test local_split_free_base function"""
        S = local_split_free_base(self.trivial, [2], {2: 2})
        self.assertTrue(is_invertible(S))
        with self.assertRaises(NotALift):
            local_split_free_base(self.trivial, [2], {2: 0})
        with self.assertRaises(NoSection):
            local_split_free_base(self.trivial, [2], {})

    def test_automorphism_extension(self):
        """Test the identity self-butterfly gives the split extension"""
        zeta = butterfly_automorphism_to_extension(identity_butterfly(self.trivial))
        self.assertTrue(splittings(zeta))

    def test_complete_intersection_cover(self):
        """Test complete_intersection_cover function"""
        R, phi, gens = complete_intersection_cover(self.B8, 2)
        self.assertEqual(gens, [2, 4])
        self.assertEqual(R.order, 16)
        self.assertEqual(sorted(set(phi.table.tolist())), list(range(8)))
        Bc = ElementaryCoordinates(self.B8, first=[self.B8.one])
        self.assertEqual(minimal_polynomial(self.B8, Bc, 2), [0, 0, 1])

    def test_exal2_classify(self):
        """Test exal2_classify on rings of embedding dimension zero, one and two"""
        s8 = structure_map(self.F2, self.B8)
        res8 = residue_module(self.B8, ring_homs(self.B8, self.F2)[0])
        cls = exal2_classify(s8, res8)
        self.assertEqual(cls.order, 4)
        for coords, _ in cls.classes.elements():
            rep = cls.representative(coords)
            self.assertEqual(split_search(rep) is None, any(coords))
        self.assertEqual(exal2_classify(structure_map(self.F2, self.D), self.res).order, 1)
        F = structure_map(self.F2, self.F2)
        self.assertEqual(exal2_classify(F, ring_as_module(self.F2)).order, 1)

    def test_exal2_prime_field_only(self):
        """Test exal2_classify refuses a non prime ground ring"""
        s = structure_map(zmod(4), self.D)
        with self.assertRaises(ShapeMismatch):
            exal2_classify(s, self.res)
    def _twisted(self):
        """A self-butterfly of the trivial 2-extension acted on by the nonzero Exal class."""
        cls = exal_classify(structure_map(self.F2, self.D), self.res)
        zeta = next(cls.representative(c) for c in cls.classes() if any(c))
        return act_on_butterfly(identity_butterfly(self.trivial), zeta)

    def test_pullback_chain_map_butterfly(self):
        """Test the butterfly of a pullback along F2 -> F2[x]/(x^2)"""
        h = structure_map(self.F2, self.D)
        xi0 = pullback_2ext(self.trivial, h)
        self.assertEqual(xi0.R.order, 2)
        self.assertEqual(xi0.B.order, 2)
        Q = chain_map_to_butterfly(pullback_chain_map(self.trivial, h, xi0))
        self.assertEqual(Q.Q.order, 4)
        self.assertFalse(is_invertible(Q))
        _, onB = restrictions(Q)
        self.assertEqual(onB.tolist(), h.table.tolist())
        with self.assertRaises(NotInvertible):
            invert(Q)

    def test_pushout_chain_map_butterfly(self):
        """Test the butterfly of a pushout along an injective M -> M + M"""
        M = ring_as_module(self.F2)
        xi = trivial_2extension(self.F2, M)
        mu = module_hom(M, direct_sum(M, M), [0, 2])
        pushed = pushout_2ext(xi, mu)
        self.assertEqual(pushed.M.order, 4)
        self.assertEqual(pushed.N.order, 4)
        Q = chain_map_to_butterfly(pushout_chain_map(xi, mu))
        onM, _ = restrictions(Q)
        self.assertEqual(onM.tolist(), [0, 2])
        self.assertFalse(is_invertible(Q))
        with self.assertRaises(NotInvertible):
            invert(Q)

    def test_product_butterfly(self):
        """Test product_butterfly function on a 1024 element middle ring"""
        Q = identity_butterfly(self.x4)
        P = product_butterfly(Q, Q)
        self.assertEqual(P.Q.order, 1024)
        self.assertEqual(P.source.R.order, 64)
        self.assertTrue(is_invertible(P))

    def test_baer_sum_butterfly(self):
        """Test baer_sum_butterfly of identities is the identity of the sum"""
        Q = identity_butterfly(self.trivial)
        S = baer_sum_butterfly(Q, Q)
        self.assertTrue(is_invertible(S))
        self.assertEqual(S.source.R.order, 4)
        self.assertIsNotNone(butterfly_isomorphism(S, identity_butterfly(S.source)))

    def test_shearing_isomorphism(self):
        """Test shearing_isomorphism function"""
        h = shearing_isomorphism(self.x4)
        self.assertEqual(h.source.order, 16)
        self.assertEqual(len(set(h.table.tolist())), h.target.order)

    def test_butterfly_automorphisms(self):
        """Test 2-automorphisms of the identity butterfly against Exal"""
        Q = identity_butterfly(self.trivial)
        exal = exal_classify(structure_map(self.F2, self.D), self.res)
        self.assertEqual(exal.order, 2)
        self.assertEqual(len(butterfly_automorphisms(Q)), exal.order)

    def test_act_on_butterfly(self):
        """Test act_on_butterfly moves the identity exactly by nonzero classes"""
        Q = identity_butterfly(self.trivial)
        split = trivial_extension(structure_map(self.F2, self.D), self.res)
        self.assertIsNotNone(butterfly_isomorphism(act_on_butterfly(Q, split), Q))
        twisted = self._twisted()
        self.assertTrue(is_invertible(twisted))
        self.assertIsNone(butterfly_isomorphism(twisted, Q))
        self.assertFalse(splittings(butterfly_automorphism_to_extension(twisted)))

    def test_compose_associative(self):
        """Test compose is associative on non-identity butterflies"""
        T = self._twisted()
        left = compose(compose(T, T), T)
        right = compose(T, compose(T, T))
        self.assertIsNotNone(butterfly_isomorphism(left, right))
        self.assertIsNotNone(butterfly_isomorphism(compose(T, T), identity_butterfly(self.trivial)))
        self.assertIsNotNone(butterfly_isomorphism(left, T))

    def test_double_inverse(self):
        """Test invert applied twice gives the butterfly back"""
        T = self._twisted()
        self.assertIsNotNone(butterfly_isomorphism(invert(invert(T)), T))
        self.assertIsNotNone(butterfly_isomorphism(compose(T, invert(T)), identity_butterfly(self.trivial)))

    def test_commuting_triangle_rejected(self):
        """Test validate_butterfly rejects i' with the sign of a commuting triangle"""
        Z9 = zmod(9)
        xi = ideal_2extension(Z9, make_ideal(Z9, [0, 3, 6]), make_ideal(Z9, [0]))
        Q = identity_butterfly(xi)
        with self.assertRaises(ButterflyViolation) as ctx:
            validate_butterfly(xi, xi, Q.Q, Q.i, Q.Q.neg[Q.i2], Q.pi, Q.pi2, Q.alpha)
        self.assertEqual(ctx.exception.axiom, 1)

    def test_exal2_group(self):
        """Test check_exal2_group function"""
        s8 = structure_map(self.F2, self.B8)
        res8 = residue_module(self.B8, ring_homs(self.B8, self.F2)[0])
        cls = exal2_classify(s8, res8)
        self.assertEqual(check_exal2_group(cls), [])
        self.assertEqual(cls.bound, (4, 16))

    def test_structured_isomorphism(self):
        """Test isomorphic_2ext compares 2-extensions carrying A-structures"""
        prob = t_cubed_over_residue()
        ob = obstruction(prob)
        z = pushout_base_extension(prob)
        zero = trivial_2ext_with_structure(trivial_extension(z.structure, z.M), prob.base, prob.M)
        self.assertIsNotNone(split_search(zero))
        self.assertIsNone(split_search(ob))
        self.assertIsNotNone(negate_2ext(ob).a_structure)
        self.assertIsNotNone(baer_sum_2ext(ob, zero).a_structure)
        self.assertTrue(isomorphic_2ext(ob, ob))
        self.assertTrue(isomorphic_2ext(zero, zero))
        self.assertFalse(isomorphic_2ext(ob, zero))
        with self.assertRaises(ShapeMismatch):
            baer_sum_2ext(ob, replace(ob, a_structure=None))


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
