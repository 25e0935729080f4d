"""
Deformations of algebras along a square-zero thickening of the base.

A problem is a square-zero extension ω: 0 → I → A' → A → 0, an A-algebra
A → B, a B-module M and an A-linear φ: I → M. A deformation is an extension
0 → M → B' → B → 0 of A'-algebras whose structure map A' → B' sends I into
M through φ. Deformations exist exactly when the obstruction class (the
trivial 2-extension of B by M with the pushout φ⌣ω as A-structure) vanishes;
they then form a principal homogeneous set under Exal_A(B, M).

The same module holds the transitivity sequence of a frame A → B → C,

    Der_B(C,M) → Der_A(C,M) → Der_A(B,M) → Exal_B(C,M) → Exal_A(C,M) → Exal_A(B,M) → Exal²_B(C,M),

with every interior node checked by comparing images and kernels of explicit
representatives.
"""

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .cochains import AffineSystem, FactorSetModel, Form
from .ext2 import TwoExtension, a_structure_from_factorization, attach_a_structure, split_search, trivial_2ext_with_structure
from .extn import (
    Derivation,
    ExalClassification,
    SquareZeroExtension,
    automorphism_to_derivation,
    automorphisms,
    baer_sum,
    derivations,
    exal_classify,
    extension_from_cocycle,
    ideal_extension,
    pullback,
    pushout,
    restrict_ground,
    same_module,
    section_data,
    trivial_extension,
    validate_extension,
)
from .finring import (
    FiniteModule,
    ModuleHom,
    RingHom,
    _frozen,
    additive_maps,
    compose_homs,
    dual_numbers,
    ideal_generated,
    identity_hom,
    make_ideal,
    module_hom,
    preset,
    residue_module,
    restrict_scalars,
    ring_as_module,
    ring_homs,
    same_ring,
    structure_map,
    truncated_polynomial,
    zmod,
)
from .linalg import QuotientSpace
from .utils.configs import config
from .utils.errors import AxiomViolation, ShapeMismatch, TooLarge
from .utils.write import emit_log


@dataclass(frozen=True, eq=False)
class DeformationProblem:
    """
    Attributes:
        omega (SquareZeroExtension): 0 → I → A' → A → 0.
        base (RingHom): A → B.
        M (FiniteModule): A B-module.
        phi (ModuleHom): I → M regarded as an A-module.
        name (str): Display name.
    """

    omega: SquareZeroExtension
    base: RingHom
    M: FiniteModule
    phi: ModuleHom
    name: str = ""

    @property
    def Ap(self):
        return self.omega.Bp

    @property
    def A(self):
        return self.omega.B

    @property
    def B(self):
        return self.base.target

    @property
    def q(self) -> RingHom:
        return self.omega.p

    def ground(self) -> RingHom:
        """A' → B."""
        return compose_homs(self.q, self.base)


@dataclass(frozen=True, eq=False)
class Deformation:
    problem: DeformationProblem
    extension: SquareZeroExtension

    @property
    def Bp(self):
        return self.extension.Bp


def deformation_problem(omega: SquareZeroExtension, base: RingHom, M: FiniteModule, phi_table, name: str = "") -> DeformationProblem:
    """
    Raises:
        ShapeMismatch: If A → B does not start at the quotient of ω or M is not a B-module.
        AxiomViolation: If φ is not A-linear.
    """
    if not same_ring(base.source, omega.B):
        raise ShapeMismatch("A → B must start at the quotient ring of omega")
    if not same_ring(M.ring, base.target):
        raise ShapeMismatch("M must be a B-module")
    phi = module_hom(omega.M, restrict_scalars(M, base), phi_table)
    return DeformationProblem(omega, base, M, phi, name)


def is_deformation(prob: DeformationProblem, zeta: SquareZeroExtension) -> bool:
    """Whether ζ is an extension of A'-algebras completing the square of the problem."""
    if not same_ring(zeta.A, prob.Ap) or not same_ring(zeta.B, prob.B) or not same_module(zeta.M, prob.M):
        return False
    if not np.array_equal(zeta.structure.table, prob.ground().table):
        return False
    return all(zeta.alpha(int(prob.omega.e[i])) == int(zeta.e[prob.phi(i)]) for i in range(prob.omega.M.order))


def pushout_base_extension(prob: DeformationProblem) -> SquareZeroExtension:
    """φ⌣ω: the pushout of ω along φ, an extension of A by M."""
    return pushout(prob.omega, prob.phi)


def obstruction(prob: DeformationProblem) -> TwoExtension:
    """The trivial 2-extension of B by M carrying φ⌣ω as A-structure."""
    return trivial_2ext_with_structure(pushout_base_extension(prob), prob.base, prob.M)


def obstruction_vanishes(prob: DeformationProblem) -> bool:
    return split_search(obstruction(prob)) is not None


@dataclass
class DeformationSpace:
    """
    Deformations as solutions of an affine system modulo coboundaries.

    offset is one solution (None when the problem is obstructed); space holds
    the homogeneous solutions, which are the A-algebra extensions of B by M.
    """

    problem: DeformationProblem
    model: FactorSetModel
    system: AffineSystem
    offset: Optional[np.ndarray]
    space: QuotientSpace

    @property
    def empty(self) -> bool:
        return self.offset is None

    @property
    def order(self) -> int:
        return 0 if self.empty else self.space.order

    def representative(self, coords) -> Deformation:
        vec = (self.offset + self.space.vector(coords)) % self.model.p
        zeta = extension_from_cocycle(self.model, self.system.values(vec), f"Def{tuple(int(c) for c in coords)}")
        return Deformation(self.problem, zeta)

    def class_of(self, D: Deformation) -> Tuple[int, ...]:
        """
        Raises:
            ShapeMismatch: If D is not a deformation for this problem.
        """
        if self.empty or not is_deformation(self.problem, D.extension):
            raise ShapeMismatch("not a deformation of this problem")
        vec = self.system.vector(self.model.extract(section_data(self.model, D.extension)))
        coords = self.space.coordinates((vec - self.offset) % self.model.p)
        if coords is None:
            raise ShapeMismatch("factor set of the deformation is not a solution")
        return coords

    def classes(self) -> List[Tuple[int, ...]]:
        return [] if self.empty else [tuple(c) for c, _ in self.space.elements()]


def deformation_space(prob: DeformationProblem) -> DeformationSpace:
    """
    Raises:
        TooLarge: If there are more classes than config["max_table_enumeration"].
    """
    model = FactorSetModel(prob.B, prob.M, prob.ground(), tag="def")
    Mc, d = model.Mc, model.d
    system = AffineSystem(model.p, d, model.keys())
    model.add_conditions(system)
    for i in range(prob.omega.M.order):
        system.require(model.lam(int(prob.omega.e[i])) - Form.constant(Mc.coords(prob.phi(i)), d))
    offset = system.solve()
    Z = system.nullspace()
    if Z.size == 0:
        Z = np.zeros((system.width, 0), dtype=np.int64)
    D = model.coboundary_matrix(model.h_unknown())
    if D.size == 0:
        D = np.zeros((system.width, 0), dtype=np.int64)
    space = QuotientSpace(Z, D, model.p)
    if offset is not None and space.order > config["max_table_enumeration"]:
        raise TooLarge(f"{space.order} deformations exceed max_table_enumeration")
    emit_log("Solved deformation system", {"problem": prob.name, "obstructed": offset is None, "classes": 0 if offset is None else space.order}, severity="DEBUG")
    return DeformationSpace(prob, model, system, offset, space)


def deformations(prob: DeformationProblem) -> List[Deformation]:
    """One deformation per isomorphism class over the diagram."""
    S = deformation_space(prob)
    return [S.representative(c) for c in S.classes()]


def deformation_action(D: Deformation, zeta: SquareZeroExtension) -> Deformation:
    """D + ζ for ζ ∈ Exal_A(B, M): the Baer sum with ζ regarded over A'."""
    prob = D.problem
    if not np.array_equal(zeta.structure.table, prob.base.table) or not same_ring(zeta.A, prob.A):
        raise ShapeMismatch("the acting extension must be an A-algebra extension of B")
    return Deformation(prob, baer_sum(D.extension, restrict_ground(zeta, prob.q)))


def deformation_automorphisms(D: Deformation) -> List[RingHom]:
    return automorphisms(D.extension)


def der_base_invariance(omega: SquareZeroExtension, base: RingHom, M: FiniteModule) -> bool:
    """Der_A(B, M) = Der_A'(B, M) as sets of tables."""
    over_a = [d.key() for d in derivations(base, M)]
    over_ap = [d.key() for d in derivations(compose_homs(omega.p, base), M)]
    return over_a == over_ap


def verify_deformation_theorem(prob: DeformationProblem) -> Dict:
    """
    Checks the existence criterion, the torsor structure and Aut ≅ Der on one problem.

    Returns:
        dict: existence_iff_vanishing, torsor and automorphisms flags with the
        counts behind them; the last two hold vacuously without deformations.
    """
    S = deformation_space(prob)
    vanishes = obstruction_vanishes(prob)
    exists = not S.empty
    exal = exal_classify(prob.base, prob.M)
    report = {"vanishes": vanishes, "exists": exists, "deformations": S.order, "exal": exal.order, "existence_iff_vanishing": vanishes == exists}
    torsor = True
    auts_ok = True
    ders = {d.key() for d in derivations(prob.base, prob.M)}
    if exists:
        D0 = S.representative(S.classes()[0])
        reached = {S.class_of(deformation_action(D0, exal.representative(c))) for c in exal.classes()}
        torsor = len(reached) == exal.order == S.order
        for c in S.classes():
            D = S.representative(c)
            auts = deformation_automorphisms(D)
            keys = {automorphism_to_derivation(D.extension, u).key() for u in auts}
            auts_ok = auts_ok and len(auts) == len(ders) and keys == ders
    report["torsor"] = torsor
    report["automorphisms"] = auts_ok
    report["derivations"] = len(ders)
    emit_log("Checked deformation theorem", {"problem": prob.name, **report})
    return report


# transitivity


@dataclass(frozen=True, eq=False)
class Frame:
    """A → B → C with a C-module M."""

    u: RingHom
    v: RingHom
    M: FiniteModule

    @property
    def uv(self) -> RingHom:
        return compose_homs(self.u, self.v)

    @property
    def M_B(self) -> FiniteModule:
        return restrict_scalars(self.M, self.v)


def make_frame(u: RingHom, v: RingHom, M: FiniteModule) -> Frame:
    if not same_ring(u.target, v.source):
        raise ShapeMismatch("A → B and B → C do not compose")
    if not same_ring(M.ring, v.target):
        raise ShapeMismatch("M must be a C-module")
    return Frame(u, v, M)


def gamma(frame: Frame, theta: Derivation) -> SquareZeroExtension:
    """C + εM with B-structure b ↦ (v(b), θ(b)) for θ ∈ Der_A(B, M)."""
    zero = trivial_extension(frame.v, frame.M)
    Bp = zero.Bp
    B = frame.v.source
    alpha = RingHom(B, Bp, _frozen([Bp.index((frame.v(b), theta(b))) for b in range(B.order)]))
    return validate_extension(frame.v, frame.M, Bp, zero.e, zero.p, alpha)


def tau(frame: Frame, zeta: SquareZeroExtension) -> SquareZeroExtension:
    """An extension of B-algebras regarded as one of A-algebras."""
    return restrict_ground(zeta, frame.u)


def restrict_to_b(frame: Frame, zeta: SquareZeroExtension) -> SquareZeroExtension:
    """Exal_A(C, M) → Exal_A(B, M) by pulling back along B → C."""
    return pullback(zeta, frame.v, frame.u)


def delta(frame: Frame, zeta: SquareZeroExtension) -> TwoExtension:
    """The trivial 2-extension of C by M with ζ ∈ Exal_A(B, M) as B-structure."""
    return trivial_2ext_with_structure(zeta, frame.v, frame.M)


def rho(xi: TwoExtension) -> TwoExtension:
    """
    Forgets a B-structure: the same 2-extension with the A-structure coming
    from the ground map A → R.
    """
    bare = replace(xi, base=None, ground_to_base=None, a_structure=None)
    return attach_a_structure(bare, a_structure_from_factorization(bare, xi.ground))


def _node(name: str, image: set, kernel: set) -> Dict:
    diff = sorted(image ^ kernel)
    return {"node": name, "ok": not diff, "image": len(image), "kernel": len(kernel), "witness": diff[0] if diff else None}


def check_transitivity_exactness(frame: Frame) -> List[Dict]:
    """
    Exactness of the transitivity sequence of A → B → C at every node up to Exal_A(B, M).

    Returns:
        list: One record per node with the sizes of image and kernel and a
        witness in their symmetric difference.
    """
    u, v, uv, M, MB = frame.u, frame.v, frame.uv, frame.M, frame.M_B
    der_bc = derivations(v, M)
    der_ac = derivations(uv, M)
    der_ab = derivations(u, MB)
    ex_bc: ExalClassification = exal_classify(v, M)
    ex_ac: ExalClassification = exal_classify(uv, M)
    ex_ab: ExalClassification = exal_classify(u, MB)
    zero_bc = tuple([0] * ex_bc.dimension)
    zero_ac = tuple([0] * ex_ac.dimension)
    zero_ab = tuple([0] * ex_ab.dimension)
    zero_der = tuple([M.zero] * v.source.order)

    ac_keys = {d.key() for d in der_ac}
    inclusion = [d.key() for d in der_bc]
    nodes = [{"node": "Der_B(C,M)", "ok": len(set(inclusion)) == len(der_bc) and set(inclusion) <= ac_keys, "image": len(der_bc), "kernel": 1, "witness": None}]

    restricted = {d.key(): tuple(d(v(b)) for b in range(v.source.order)) for d in der_ac}
    nodes.append(_node("Der_A(C,M)", set(inclusion), {k for k, r in restricted.items() if r == zero_der}))

    gamma_class = {d.key(): ex_bc.class_of(gamma(frame, d)) for d in der_ab}
    nodes.append(_node("Der_A(B,M)", set(restricted.values()), {k for k, c in gamma_class.items() if c == zero_bc}))

    tau_class = {c: ex_ac.class_of(tau(frame, ex_bc.representative(c))) for c in ex_bc.classes()}
    nodes.append(_node("Exal_B(C,M)", set(gamma_class.values()), {c for c, t in tau_class.items() if t == zero_ac}))

    res_class = {c: ex_ab.class_of(restrict_to_b(frame, ex_ac.representative(c))) for c in ex_ac.classes()}
    nodes.append(_node("Exal_A(C,M)", set(tau_class.values()), {c for c, r in res_class.items() if r == zero_ab}))

    delta_split = {c for c in ex_ab.classes() if split_search(delta(frame, ex_ab.representative(c))) is not None}
    nodes.append(_node("Exal_A(B,M)", set(res_class.values()), delta_split))
    emit_log("Checked transitivity sequence", {"exact": all(n["ok"] for n in nodes), "failures": [n["node"] for n in nodes if not n["ok"]]})
    return nodes


# frozen problems


def z4_over_z2_dual_numbers() -> DeformationProblem:
    """Z/4 → Z/2, B = F2[x]/(x^2), M = B, φ(2) = 1; deformed by Z/4[x]/(x^2)."""
    Ap = zmod(4)
    omega = ideal_extension(Ap, make_ideal(Ap, [0, 2]), identity_hom(Ap))
    B = dual_numbers(zmod(2), "F2[x]/(x^2)")
    M = ring_as_module(B)
    base = structure_map(omega.B, B)
    return deformation_problem(omega, base, M, [M.zero, B.one], "z4_over_z2_dual_numbers")


def t_cubed_over_residue() -> DeformationProblem:
    """F2[t]/(t^3) → F2[t]/(t^2), B = F2 with t ↦ 0, M = F2, φ(t^2) = 1; obstructed."""
    Ap = truncated_polynomial(2, 3, "F2[t]/(t^3)")
    t = next(x for x in range(Ap.order) if Ap.power(x, 3) == Ap.zero and Ap.power(x, 2) != Ap.zero)
    omega = ideal_extension(Ap, make_ideal(Ap, [Ap.zero, Ap.power(t, 2)]), identity_hom(Ap))
    B = zmod(2)
    M = ring_as_module(B)
    base = ring_homs(omega.B, B)[0]
    return deformation_problem(omega, base, M, [M.zero, B.one], "t_cubed_over_residue")


def trivial_problem(B_name: str = "F2[x]/(x^2)") -> DeformationProblem:
    """A' = A = F2 (I = 0) with φ = 0."""
    Ap = zmod(2)
    omega = ideal_extension(Ap, make_ideal(Ap, [Ap.zero]), identity_hom(Ap))
    B = preset(B_name)
    base = structure_map(omega.B, B)
    M = residue_module(B, ring_homs(B, zmod(2))[0])
    return deformation_problem(omega, base, M, [M.zero], f"trivial_{B_name}")


PROBLEMS = {
    "z4_over_z2_dual_numbers": z4_over_z2_dual_numbers,
    "t_cubed_over_residue": t_cubed_over_residue,
    "trivial": trivial_problem,
}


def preset_problem(name: str) -> DeformationProblem:
    if name not in PROBLEMS:
        raise KeyError(f"Unknown deformation problem {name}")
    return PROBLEMS[name]()


def square_zero_ideals(R) -> List:
    """Distinct nonzero principal ideals (x) with x² = 0."""
    found = {}
    for x in range(R.order):
        if x != R.zero and R.m(x, x) == R.zero:
            I = ideal_generated(R, [x])
            found.setdefault(I.members, I)
    return [found[k] for k in sorted(found, key=sorted)]


def census_problems(names, max_b: int, max_m: int):
    """
    Deformation problems A' → A = A'/I → B within census bounds.

    A' runs over the named rings of order at most max_b·max_m and I over their
    square-zero principal ideals; B is A itself or a prime residue field of A,
    with |B| ≤ max_b; M is a residue module of B with |M| ≤ max_m; φ runs over
    every A-linear map I → M.

    Yields:
        DeformationProblem: Named "<A'>/(<x>) -> <B> | F<p>#<k> phi<t>".
    """
    primes = [p for p in (2, 3, 5, 7) if p <= max_m]
    for name in names:
        Ap = preset(name)
        if Ap.order > max_b * max_m:
            continue
        for I in square_zero_ideals(Ap):
            omega = ideal_extension(Ap, I, identity_hom(Ap))
            A = omega.B
            gen = Ap.label(min(x for x in I.members if x != Ap.zero))
            bases = [("A", identity_hom(A))]
            bases += [(f"F{p}", h) for p in primes if p < A.order for h in ring_homs(A, zmod(p))]
            for bname, base in bases:
                B = base.target
                if B.order > max_b:
                    continue
                for p in primes:
                    for k, h in enumerate(ring_homs(B, zmod(p))):
                        M = residue_module(B, h)
                        for t, table in enumerate(additive_maps(omega.M, restrict_scalars(M, base))):
                            try:
                                yield deformation_problem(omega, base, M, table, f"{name}/({gen}) -> {bname} | F{p}#{k} phi{t}")
                            except AxiomViolation:
                                continue
