"""
2-extensions 0 → M → N → R → B → 0 of rings and the butterflies between them.

A butterfly Q: ξ → η is a ring Q with wing maps i: N → Q, i': N' → Q,
π: Q → R and π': Q → R' such that π∘i = f, π'∘i' = −f', π'∘i = 0 and the
diagonal N' → Q → R is short exact. The other diagonal N → Q → R' is a
complex, and exact whenever Q restricts to isomorphisms on M and B.
Composition, inversion, Baer sums and splittings are all computed on explicit
tables and revalidated.
"""

import itertools
import sys
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .cochains import AffineSystem, FactorSetModel, Form, FunctionUnknown, SectionData
from .crossed import CrossedRing, crossed_from_ideal_pair, ideal_as_crossed, semidirect, square_zero_crossed, validate_crossed
from .extn import SquareZeroExtension, extension_from_cocycle, quotient_by_subgroup, same_module, validate_extension
from .finring import (
    ElementaryCoordinates,
    FiniteModule,
    FiniteRing,
    Ideal,
    ModuleHom,
    RingHom,
    _first_mismatch,
    _frozen,
    _multiplicative_on,
    additive_generators,
    additive_maps,
    fiber_product,
    identity_hom,
    is_additive,
    is_ring_hom,
    kernel,
    make_ideal,
    module_from_operations,
    polynomial_quotient,
    product_ring,
    quotient,
    quotient_module,
    restrict_scalars,
    ring_as_module,
    ring_from_operations,
    ring_hom,
    same_ring,
    structure_map,
    submodule,
    zmod,
)
from .linalg import QuotientSpace, mod_p, solve_mod
from .utils.configs import config
from .utils.errors import (
    ButterflyViolation,
    NoSection,
    NotAChainMap,
    NotALift,
    NotInvertible,
    ShapeMismatch,
    TooLarge,
    TwoExtViolation,
)
from .utils.write import emit_log


@dataclass(frozen=True, eq=False)
class TwoExtension:
    """
    0 → M → N → R → B → 0 with a ground ring G → R.

    base (A → B) and ground_to_base (G → A) describe the A-algebra frame;
    a_structure is a splitting of the pullback to A when one is attached.
    """

    M: FiniteModule
    N: CrossedRing
    e: np.ndarray
    g: RingHom
    ground: RingHom
    base: Optional[RingHom] = None
    ground_to_base: Optional[RingHom] = None
    a_structure: Optional["Butterfly"] = None
    name: str = ""

    @property
    def R(self) -> FiniteRing:
        return self.g.source

    @property
    def B(self) -> FiniteRing:
        return self.g.target

    @property
    def G(self) -> FiniteRing:
        return self.ground.source

    @property
    def f(self) -> np.ndarray:
        return self.N.f

    def structure(self) -> RingHom:
        """G → B."""
        return RingHom(self.G, self.B, _frozen(self.g.table[self.ground.table]))

    def frame(self) -> Tuple[RingHom, RingHom]:
        """(A → B, G → A), with A = G when no base was given."""
        if self.base is None:
            return self.structure(), identity_hom(self.G)
        return self.base, self.ground_to_base


@dataclass(frozen=True, eq=False)
class Butterfly:
    source: TwoExtension
    target: TwoExtension
    Q: FiniteRing
    i: np.ndarray
    i2: np.ndarray
    pi: np.ndarray
    pi2: np.ndarray
    alpha: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: TwoExtension
    target: TwoExtension
    cM: np.ndarray
    cN: np.ndarray
    cR: np.ndarray
    cB: np.ndarray


# 2-extensions


def validate_2extension(M, N: CrossedRing, e, g: RingHom, ground: RingHom, base=None, ground_to_base=None, a_structure=None, name="") -> TwoExtension:
    """
    Checks exactness, linearity of e and the zero product on M.

    Raises:
        TwoExtViolation: With the failing law and a witness.
    """
    R, B = g.source, g.target
    e = np.asarray(e, dtype=np.int64)
    if not is_ring_hom(R, B, g.table):
        raise TwoExtViolation("g ring map", None)
    missing = sorted(set(range(B.order)) - set(int(v) for v in g.table))
    if missing:
        raise TwoExtViolation("g surjective", missing[0])
    if not same_ring(N.ring, R):
        raise TwoExtViolation("N is crossed over R", N.module.name)
    if not same_ring(M.ring, B):
        raise TwoExtViolation("M is a B-module", M.name)
    if ground.target is not R and not same_ring(ground.target, R):
        raise TwoExtViolation("ground lands in R", ground.target.name)
    if not is_ring_hom(ground.source, R, ground.table):
        raise TwoExtViolation("ground ring map", None)
    Nm = N.module
    if e.shape != (M.order,) or not is_additive(M, Nm, e):
        raise TwoExtViolation("e additive", None)
    if len(set(e.tolist())) != M.order:
        raise TwoExtViolation("e injective", None)
    ker_f = {n for n in range(Nm.order) if N.f[n] == R.zero}
    if ker_f != set(e.tolist()):
        raise TwoExtViolation("image e = kernel f", sorted(ker_f ^ set(e.tolist()))[:1])
    ker_g = {r for r in range(R.order) if g(r) == B.zero}
    img_f = set(int(v) for v in N.f)
    if ker_g != img_f:
        raise TwoExtViolation("image f = kernel g", sorted(ker_g ^ img_f)[:1])
    for r in range(R.order):
        for m in range(M.order):
            if e[M.s(g(r), m)] != Nm.s(r, int(e[m])):
                raise TwoExtViolation("e R-linear", (r, m))
    for x, y in itertools.product(range(M.order), repeat=2):
        if N.nm(int(e[x]), int(e[y])) != Nm.zero:
            raise TwoExtViolation("product on M is zero", (x, y))
    if base is not None:
        if ground_to_base is None:
            raise TwoExtViolation("ground_to_base given with base", None)
        if not np.array_equal(base.table[ground_to_base.table], g.table[ground.table]):
            raise TwoExtViolation("base frame commutes", None)
    xi = TwoExtension(M, N, _frozen(e), g, ground, base, ground_to_base, None, name)
    if a_structure is not None:
        xi = attach_a_structure(xi, a_structure)
    return xi


def trivial_2extension(B: FiniteRing, M: FiniteModule, ground: Optional[RingHom] = None, base=None, ground_to_base=None) -> TwoExtension:
    """0 → M = M → 0 → B = B → 0."""
    if ground is None:
        ground = structure_map(_prime_ring_of(B), B)
    N = square_zero_crossed(B, M)
    return validate_2extension(M, N, np.arange(M.order), identity_hom(B), ground, base, ground_to_base, name=f"0({B.name},{M.name})")


def is_trivial_shape(xi: TwoExtension) -> bool:
    return xi.R.order == xi.B.order and xi.N.order == xi.M.order


def ideal_2extension(S: FiniteRing, J: Ideal, L: Ideal, ground: Optional[RingHom] = None) -> TwoExtension:
    """
    0 → L → J → S/L → S/J → 0 for ideals L ⊆ J of S with J·L = 0.
    """
    N, proj, members = crossed_from_ideal_pair(S, J, L)
    R = N.ring
    K = make_ideal(R, [proj(x) for x in J.members])
    B, g = quotient(R, K, f"{S.name}/J")
    pos = {x: i for i, x in enumerate(members)}
    lmembers = sorted(L.members)
    lpos = {x: i for i, x in enumerate(lmembers)}
    lift = {}
    for s in range(S.order):
        lift.setdefault(g(proj(s)), s)
    add = [[lpos[S.a(x, y)] for y in lmembers] for x in lmembers]
    act = [[lpos[S.m(lift[b], x)] for x in lmembers] for b in range(B.order)]
    M = FiniteModule(B, _frozen(add), _frozen(act), lpos[S.zero], tuple(S.label(x) for x in lmembers), "L")
    e = [pos[x] for x in lmembers]
    if ground is None:
        ground = structure_map(_prime_ring_of(S), R)
    return validate_2extension(M, N, e, g, ground, name=f"{S.name}:J/L")


def _prime_ring_of(R: FiniteRing) -> FiniteRing:
    return zmod(max(R.characteristic, 1))


def negate_2ext(xi: TwoExtension) -> TwoExtension:
    """The Baer inverse: e replaced by −e, and i' by −i' on an attached A-structure."""
    e = [int(xi.N.module.neg[xi.e[m]]) for m in range(xi.M.order)]
    neg = validate_2extension(xi.M, xi.N, e, xi.g, xi.ground, xi.base, xi.ground_to_base, name=f"-{xi.name}")
    S = xi.a_structure
    if S is None:
        return neg
    _check_structure_restrictions(S)
    T = validate_butterfly(restrict_to_base(neg), S.target, S.Q, S.i, S.Q.neg[S.i2], S.pi, S.pi2, S.alpha)
    return attach_a_structure(neg, T)


def _check_structure_restrictions(S: "Butterfly"):
    onM, onB = restrictions(S)
    if not (np.array_equal(onM, np.arange(onM.size)) and np.array_equal(onB, np.arange(onB.size))):
        raise ShapeMismatch("A-structure must restrict to the identity on M and A")


def _crossed_quotient(R: FiniteRing, labels, add_fn, act_fn, zero, nmul_fn, f_fn, killed, name=""):
    big = module_from_operations(R, labels, add_fn, act_fn, zero, name)
    Nq, proj = quotient_module(big, [big.index(k) for k in killed])
    pairs = Nq.labels
    nmul = [[proj(big.index(nmul_fn(pairs[x], pairs[y]))) for y in range(Nq.order)] for x in range(Nq.order)]
    f = [f_fn(pairs[x]) for x in range(Nq.order)]
    return validate_crossed(R, Nq, nmul, f), proj, big


def _check_exal2_frame(xi: TwoExtension, eta: TwoExtension):
    if not (same_ring(xi.B, eta.B) and same_module(xi.M, eta.M) and same_ring(xi.G, eta.G)):
        raise ShapeMismatch("2-extensions live over different (B, M, G)")
    if not np.array_equal(xi.structure().table, eta.structure().table):
        raise ShapeMismatch("different structure maps G → B")


def baer_sum_2ext(xi: TwoExtension, eta: TwoExtension) -> TwoExtension:
    """
    R ×_B R̃ with middle (N × Ñ)/{(e m, −ẽ m)}.

    A-structures S, S̃ are summed to (S ×_A S̃)/{(i' m, −ĩ' m)}.

    Raises:
        ShapeMismatch: If the frames differ or only one summand carries an A-structure.
    """
    _check_exal2_frame(xi, eta)
    if (xi.a_structure is None) != (eta.a_structure is None):
        raise ShapeMismatch("both summands or neither must carry an A-structure")
    if xi.a_structure is not None:
        (b1, t1), (b2, t2) = xi.frame(), eta.frame()
        if not (same_ring(b1.source, b2.source) and np.array_equal(b1.table, b2.table) and np.array_equal(t1.table, t2.table)):
            raise ShapeMismatch("A-structures over different frames G → A → B")
    P, p1, p2 = fiber_product(xi.g, eta.g)
    N1, N2 = xi.N, eta.N
    M1, M2 = N1.module, N2.module
    labels = [(x, y) for x in range(M1.order) for y in range(M2.order)]
    N, proj, big = _crossed_quotient(
        P,
        labels,
        lambda u, v: (M1.a(u[0], v[0]), M2.a(u[1], v[1])),
        lambda r, u: (M1.s(p1(r), u[0]), M2.s(p2(r), u[1])),
        (M1.zero, M2.zero),
        lambda u, v: (N1.nm(u[0], v[0]), N2.nm(u[1], v[1])),
        lambda u: P.index((N1.fmap(u[0]), N2.fmap(u[1]))),
        [(int(xi.e[m]), int(M2.neg[eta.e[m]])) for m in range(xi.M.order)],
        f"{M1.name}+{M2.name}",
    )
    e = [proj(big.index((int(xi.e[m]), M2.zero))) for m in range(xi.M.order)]
    g = RingHom(P, xi.B, _frozen(xi.g.table[p1.table]))
    ground = RingHom(xi.G, P, _frozen([P.index((xi.ground(t), eta.ground(t))) for t in range(xi.G.order)]))
    total = validate_2extension(xi.M, N, e, g, ground, xi.base, xi.ground_to_base, name=f"({xi.name}+{eta.name})")
    if xi.a_structure is None:
        return total
    return attach_a_structure(total, _sum_a_structures(total, xi.a_structure, eta.a_structure))


def _sum_a_structures(total: TwoExtension, S: "Butterfly", St: "Butterfly") -> "Butterfly":
    """The A-structure of ξ + ξ̃ from those of the summands."""
    _check_structure_restrictions(S)
    _check_structure_restrictions(St)
    xa, xat = S.source, St.source
    A = S.target.B
    P, p1, p2 = fiber_product(
        RingHom(S.Q, A, _frozen(xa.g.table[S.pi])),
        RingHom(St.Q, A, _frozen(xat.g.table[St.pi])),
    )
    anti = [P.index((int(S.i2[m]), int(St.Q.neg[St.i2[m]]))) for m in range(S.target.M.order)]
    C, proj = quotient_by_subgroup(P, anti, f"{S.Q.name}+{St.Q.name}")
    sa = restrict_to_base(total)
    i = [proj(P.index((int(S.i[n]), int(St.i[nt])))) for n, nt in total.N.module.labels]
    i2 = [proj(P.index((int(S.i2[m]), St.Q.zero))) for m in range(S.target.N.order)]
    pi = np.zeros(C.order, dtype=np.int64)
    pi2 = np.zeros(C.order, dtype=np.int64)
    for x, (q, qt) in enumerate(P.labels):
        (r, a), (rt, _) = xa.R.labels[S.pi[q]], xat.R.labels[St.pi[qt]]
        pi[proj(x)] = sa.R.index((total.R.index((r, rt)), a))
        pi2[proj(x)] = S.pi2[q]
    alpha = [proj(P.index((int(S.alpha[t]), int(St.alpha[t])))) for t in range(total.G.order)]
    return validate_butterfly(sa, S.target, C, i, i2, pi, pi2, alpha)


def product_2ext(xi: TwoExtension, eta: TwoExtension) -> TwoExtension:
    """The componentwise product ξ × η over B × B̃."""
    if not same_ring(xi.G, eta.G):
        raise ShapeMismatch("product needs a common ground ring")
    R = product_ring(xi.R, eta.R)
    B = product_ring(xi.B, eta.B)
    M1, M2 = xi.M, eta.M
    M = module_from_operations(
        B,
        [(x, y) for x in range(M1.order) for y in range(M2.order)],
        lambda u, v: (M1.a(u[0], v[0]), M2.a(u[1], v[1])),
        lambda b, u: (M1.s(B.labels[b][0], u[0]), M2.s(B.labels[b][1], u[1])),
        (M1.zero, M2.zero),
        f"{M1.name}x{M2.name}",
    )
    N1, N2 = xi.N, eta.N
    Nm = module_from_operations(
        R,
        [(x, y) for x in range(N1.order) for y in range(N2.order)],
        lambda u, v: (N1.module.a(u[0], v[0]), N2.module.a(u[1], v[1])),
        lambda r, u: (N1.module.s(R.labels[r][0], u[0]), N2.module.s(R.labels[r][1], u[1])),
        (N1.module.zero, N2.module.zero),
        f"{N1.module.name}x{N2.module.name}",
    )
    nmul = [[Nm.index((N1.nm(u[0], v[0]), N2.nm(u[1], v[1]))) for v in Nm.labels] for u in Nm.labels]
    f = [R.index((N1.fmap(u[0]), N2.fmap(u[1]))) for u in Nm.labels]
    N = validate_crossed(R, Nm, nmul, f)
    e = [Nm.index((int(xi.e[u[0]]), int(eta.e[u[1]]))) for u in M.labels]
    g = ring_hom(R, B, [B.index((xi.g(u[0]), eta.g(u[1]))) for u in R.labels])
    ground = RingHom(xi.G, R, _frozen([R.index((xi.ground(t), eta.ground(t))) for t in range(xi.G.order)]))
    return validate_2extension(M, N, e, g, ground, name=f"({xi.name}x{eta.name})")


def pullback_2ext(xi: TwoExtension, h: RingHom, ground0: Optional[RingHom] = None) -> TwoExtension:
    """
    ξ pulled back along h: B₀ → B, with middle R ×_B B₀.

    Args:
        ground0 (RingHom): G → B₀ compatible with h; derived from the unit
            when G is some Z/n.
    """
    if not same_ring(h.target, xi.B):
        raise ShapeMismatch(f"{h} does not land in {xi.B.name}")
    B0 = h.source
    if ground0 is None:
        ground0 = structure_map(xi.G, B0)
    if not np.array_equal(h.table[ground0.table], xi.structure().table):
        raise ShapeMismatch("ground0 is not compatible with h")
    P, p1, p2 = fiber_product(xi.g, h)
    module = restrict_scalars(xi.N.module, p1)
    f = [P.index((xi.N.fmap(n), B0.zero)) for n in range(module.order)]
    N = validate_crossed(P, module, xi.N.nmul, f)
    ground = RingHom(xi.G, P, _frozen([P.index((xi.ground(t), ground0(t))) for t in range(xi.G.order)]))
    return validate_2extension(restrict_scalars(xi.M, h), N, xi.e, p2, ground, name=f"{xi.name}|{B0.name}")


def pullback_chain_map(xi: TwoExtension, h: RingHom, xi0: TwoExtension) -> ChainMap:
    """The chain map ξ|_{B₀} → ξ given by the first projection."""
    first = [lab[0] for lab in xi0.R.labels]
    return validate_chain_map(xi0, xi, np.arange(xi.M.order), np.arange(xi.N.order), first, h.table)


def _pushout(xi: TwoExtension, mu: ModuleHom):
    if not same_module(mu.source, xi.M):
        raise ShapeMismatch("mu does not start at M")
    Mp, N0, R = mu.target, xi.N, xi.R
    MpR = restrict_scalars(Mp, xi.g)
    labels = [(n, m) for n in range(N0.order) for m in range(Mp.order)]
    N, proj, big = _crossed_quotient(
        R,
        labels,
        lambda u, v: (N0.module.a(u[0], v[0]), Mp.a(u[1], v[1])),
        lambda r, u: (N0.module.s(r, u[0]), MpR.s(r, u[1])),
        (N0.module.zero, Mp.zero),
        lambda u, v: (N0.nm(u[0], v[0]), Mp.zero),
        lambda u: N0.fmap(u[0]),
        [(int(xi.e[m]), int(Mp.neg[mu(m)])) for m in range(xi.M.order)],
        f"{N0.module.name}u{Mp.name}",
    )
    e = [proj(big.index((N0.module.zero, m))) for m in range(Mp.order)]
    pushed = validate_2extension(Mp, N, e, xi.g, xi.ground, xi.base, xi.ground_to_base, name=f"{xi.name}u{Mp.name}")
    cN = [proj(big.index((n, Mp.zero))) for n in range(N0.order)]
    return pushed, cN


def pushout_2ext(xi: TwoExtension, mu: ModuleHom) -> TwoExtension:
    """ξ pushed out along μ: M → M', with middle (N ⊕ M')/{(e m, −μ m)}."""
    return _pushout(xi, mu)[0]


def pushout_chain_map(xi: TwoExtension, mu: ModuleHom) -> ChainMap:
    """The chain map ξ → μ_*ξ, n ↦ [(n, 0)]."""
    pushed, cN = _pushout(xi, mu)
    return validate_chain_map(xi, pushed, mu.table, cN, np.arange(xi.R.order), np.arange(xi.B.order))


# chain maps and butterflies


def validate_chain_map(source: TwoExtension, target: TwoExtension, cM, cN, cR, cB) -> ChainMap:
    """
    Raises:
        NotAChainMap: If a square fails to commute or a component is not multiplicative.
    """
    try:
        cM, cN, cR, cB = (np.asarray(t, dtype=np.int64) for t in (cM, cN, cR, cB))
    except (TypeError, ValueError) as e:
        raise NotAChainMap(f"incomplete component table: {e}")
    xi, eta = source, target
    if not is_ring_hom(xi.R, eta.R, cR) or not is_ring_hom(xi.B, eta.B, cB):
        raise NotAChainMap("R and B components must be ring maps")
    if not is_additive(xi.M, eta.M, cM) or not is_additive(xi.N.module, eta.N.module, cN):
        raise NotAChainMap("M and N components must be additive")
    squares = [
        ("e", cN[xi.e], eta.e[cM]),
        ("f", cR[xi.f], eta.f[cN]),
        ("g", cB[xi.g.table], eta.g.table[cR]),
        ("ground", cR[xi.ground.table], eta.ground.table),
    ]
    for name, left, right in squares:
        if not np.array_equal(left, right):
            raise NotAChainMap(f"square at {name} does not commute")
    witness = _first_mismatch(cN[xi.N.nmul], eta.N.nmul[cN[:, None], cN[None, :]])
    if witness is not None:
        raise NotAChainMap(f"N component not multiplicative at {witness}")
    witness = _first_mismatch(cN[xi.N.module.act], eta.N.module.act[cR[:, None], cN[None, :]])
    if witness is not None:
        raise NotAChainMap(f"N component not equivariant at {witness}")
    witness = _first_mismatch(cM[xi.M.act], eta.M.act[cB[:, None], cM[None, :]])
    if witness is not None:
        raise NotAChainMap(f"M component not equivariant at {witness}")
    return ChainMap(xi, eta, _frozen(cM), _frozen(cN), _frozen(cR), _frozen(cB))


def identity_chain_map(xi: TwoExtension) -> ChainMap:
    return validate_chain_map(xi, xi, np.arange(xi.M.order), np.arange(xi.N.order), np.arange(xi.R.order), np.arange(xi.B.order))


def validate_butterfly(source: TwoExtension, target: TwoExtension, Q: FiniteRing, i, i2, pi, pi2, alpha=None) -> Butterfly:
    """
    Checks the butterfly axioms, numbered as follows:

        1. π∘i = f and π'∘i' = −f'
        2. 0 → N' → Q → R → 0 exact
        3. π, π' ring maps; i, i' additive, equivariant and (anti)multiplicative;
           the ground structure compatible with both sides
        4. π'∘i = 0, so N → Q → R' is a complex
        5. 0 → N → Q → R' → 0 exact, checked when the butterfly restricts
           to isomorphisms M ≅ M' and B ≅ B'

    Raises:
        ButterflyViolation: With the axiom number and a witness.
    """
    xi, eta = source, target
    if not same_ring(xi.G, eta.G):
        raise ShapeMismatch("butterfly ends have different ground rings")
    I, I2, P, P2 = (np.asarray(t, dtype=np.int64) for t in (i, i2, pi, pi2))
    N, N2 = xi.N, eta.N
    if I.shape != (N.order,) or I2.shape != (N2.order,) or P.shape != (Q.order,) or P2.shape != (Q.order,):
        raise ButterflyViolation(3, "wing map shapes")

    bad = np.nonzero(P[I] != N.f)[0]
    if bad.size:
        raise ButterflyViolation(1, ("pi∘i", int(bad[0])))
    bad = np.nonzero(P2[I2] != eta.R.neg[N2.f])[0]
    if bad.size:
        raise ButterflyViolation(1, ("pi'∘i'", int(bad[0])))

    if not is_ring_hom(Q, xi.R, P):
        raise ButterflyViolation(3, "pi ring map")
    if not is_ring_hom(Q, eta.R, P2):
        raise ButterflyViolation(3, "pi' ring map")
    if not is_additive(N.module, Q, I) or not is_additive(N2.module, Q, I2):
        raise ButterflyViolation(3, "i, i' additive")
    qs = np.arange(Q.order)
    witness = _first_mismatch(I[N.module.act[P[:, None], np.arange(N.order)[None, :]]], Q.mul[qs[:, None], I[None, :]])
    if witness is not None:
        raise ButterflyViolation(3, ("i equivariant", witness))
    witness = _first_mismatch(I2[N2.module.act[P2[:, None], np.arange(N2.order)[None, :]]], Q.mul[qs[:, None], I2[None, :]])
    if witness is not None:
        raise ButterflyViolation(3, ("i' equivariant", witness))
    witness = _first_mismatch(I[N.nmul], Q.mul[I[:, None], I[None, :]])
    if witness is not None:
        raise ButterflyViolation(3, ("i multiplicative", witness))
    witness = _first_mismatch(I2[N2.nmul], Q.neg[Q.mul[I2[:, None], I2[None, :]]])
    if witness is not None:
        raise ButterflyViolation(3, ("i' anti-multiplicative", witness))
    if alpha is not None:
        al = np.asarray(alpha, dtype=np.int64)
        if not is_ring_hom(xi.G, Q, al) or not np.array_equal(P[al], xi.ground.table) or not np.array_equal(P2[al], eta.ground.table):
            raise ButterflyViolation(3, "ground structure")

    bad = np.nonzero(P2[I] != eta.R.zero)[0]
    if bad.size:
        raise ButterflyViolation(4, int(bad[0]))

    _check_diagonal(2, I2, P, xi.R)
    Qb = Butterfly(xi, eta, Q, _frozen(I), _frozen(I2), _frozen(P), _frozen(P2), None if alpha is None else _frozen(alpha))
    if is_invertible(Qb):
        _check_diagonal(5, I, P2, eta.R)
    return Qb


def _check_diagonal(axiom: int, inj: np.ndarray, proj: np.ndarray, R: FiniteRing):
    """0 → N → Q → R → 0 exact along inj, proj."""
    if len(set(inj.tolist())) != inj.size:
        raise ButterflyViolation(axiom, "not injective")
    ker = set(np.nonzero(proj == R.zero)[0].tolist())
    img = set(inj.tolist())
    if ker != img:
        raise ButterflyViolation(axiom, ("image != kernel", sorted(ker ^ img)[0]))
    missing = sorted(set(range(R.order)) - set(proj.tolist()))
    if missing:
        raise ButterflyViolation(axiom, ("not surjective", missing[0]))


def restrictions(Q: Butterfly) -> Tuple[np.ndarray, np.ndarray]:
    """The induced maps M → M' and B → B'."""
    xi, eta = Q.source, Q.target
    i2_inv = {int(q): n for n, q in enumerate(Q.i2)}
    e2_inv = {int(n): m for m, n in enumerate(eta.e)}
    onM = np.array([e2_inv[i2_inv[int(Q.i[xi.e[m]])]] for m in range(xi.M.order)], dtype=np.int64)
    onB = np.full(xi.B.order, -1, dtype=np.int64)
    for q in range(Q.Q.order):
        onB[xi.g(int(Q.pi[q]))] = eta.g(int(Q.pi2[q]))
    return onM, onB


def is_invertible(Q: Butterfly) -> bool:
    onM, onB = restrictions(Q)
    return len(set(onM.tolist())) == onM.size == Q.target.M.order and len(set(onB.tolist())) == onB.size == Q.target.B.order


def chain_map_to_butterfly(c: ChainMap) -> Butterfly:
    """Q = R + N' with i(n) = (f n, −c n), i'(n') = (0, −n'), π' = c_R + f'."""
    xi, eta = c.source, c.target
    R, N2 = xi.R, eta.N
    module = restrict_scalars(N2.module, RingHom(R, eta.R, c.cR))
    Q = semidirect(R, module, N2.nmul, name=f"{R.name}+{N2.module.name}")
    i = [Q.index((int(xi.f[n]), int(N2.module.neg[c.cN[n]]))) for n in range(xi.N.order)]
    i2 = [Q.index((R.zero, int(N2.module.neg[n]))) for n in range(N2.order)]
    pi = [lab[0] for lab in Q.labels]
    pi2 = [eta.R.a(int(c.cR[r]), int(N2.f[n])) for r, n in Q.labels]
    alpha = [Q.index((xi.ground(t), N2.module.zero)) for t in range(xi.G.order)]
    return validate_butterfly(xi, eta, Q, i, i2, pi, pi2, alpha)


def identity_butterfly(xi: TwoExtension) -> Butterfly:
    return chain_map_to_butterfly(identity_chain_map(xi))


def invert(Q: Butterfly) -> Butterfly:
    """
    The same middle ring upside down: i ← −i', i' ← −i, π ↔ π'.

    Raises:
        NotInvertible: If the restrictions to M and B are not bijective.
    """
    if not is_invertible(Q):
        raise NotInvertible("restrictions to M and B must be isomorphisms")
    neg = Q.Q.neg
    return validate_butterfly(Q.target, Q.source, Q.Q, neg[Q.i2], neg[Q.i], Q.pi2, Q.pi, Q.alpha)


def _same_end(xi: TwoExtension, eta: TwoExtension) -> bool:
    return xi is eta or (same_ring(xi.R, eta.R) and same_ring(xi.B, eta.B) and xi.N.order == eta.N.order and np.array_equal(xi.N.module.add, eta.N.module.add) and np.array_equal(xi.f, eta.f))


def compose(Q1: Butterfly, Q2: Butterfly) -> Butterfly:
    """
    (Q1 ×_{R'} Q2)/{(i'₁ n', −i₂ n')}.

    Raises:
        ShapeMismatch: If the target of Q1 is not the source of Q2.
    """
    if not _same_end(Q1.target, Q2.source):
        raise ShapeMismatch("target of the first butterfly is not the source of the second")
    mid = Q1.target
    P, p1, p2 = fiber_product(RingHom(Q1.Q, mid.R, Q1.pi2), RingHom(Q2.Q, mid.R, Q2.pi))
    anti = [P.index((int(Q1.i2[n]), int(Q2.Q.neg[Q2.i[n]]))) for n in range(mid.N.order)]
    C, proj = quotient_by_subgroup(P, anti, f"{Q1.Q.name}*{Q2.Q.name}")
    i = [proj(P.index((int(Q1.i[n]), Q2.Q.zero))) for n in range(Q1.source.N.order)]
    i2 = [proj(P.index((Q1.Q.zero, int(Q2.i2[n])))) for n in range(Q2.target.N.order)]
    pi = np.zeros(C.order, dtype=np.int64)
    pi2 = np.zeros(C.order, dtype=np.int64)
    for x in range(P.order):
        pi[proj(x)] = Q1.pi[p1(x)]
        pi2[proj(x)] = Q2.pi2[p2(x)]
    alpha = None
    if Q1.alpha is not None and Q2.alpha is not None:
        alpha = [proj(P.index((int(Q1.alpha[t]), int(Q2.alpha[t])))) for t in range(mid.G.order)]
    return validate_butterfly(Q1.source, Q2.target, C, i, i2, pi, pi2, alpha)


def _butterfly_maps(Q1: Butterfly, Q2: Butterfly, limit=None):
    """Ring isomorphisms Q1.Q → Q2.Q commuting with all wing maps and ground structures."""
    A, B = Q1.Q, Q2.Q
    if A.order != B.order or Q1.i.size != Q2.i.size or Q1.i2.size != Q2.i2.size:
        return
    forced = {A.one: B.one}
    pairs = list(zip(Q1.i, Q2.i)) + list(zip(Q1.i2, Q2.i2))
    if Q1.alpha is not None and Q2.alpha is not None:
        pairs += list(zip(Q1.alpha, Q2.alpha))
    for x, y in pairs:
        x, y = int(x), int(y)
        if forced.setdefault(x, y) != y:
            return
    fibers: Dict[Tuple[int, int], List[int]] = {}
    for q in range(B.order):
        fibers.setdefault((int(Q2.pi[q]), int(Q2.pi2[q])), []).append(q)
    gens = additive_generators(A, first=sorted(forced))

    def options(g):
        return [forced[g]] if g in forced else fibers.get((int(Q1.pi[g]), int(Q1.pi2[g])), [])

    def accept(tb):
        if len(set(tb.values())) != len(tb):
            return False
        if any(tb[x] != y for x, y in forced.items() if x in tb):
            return False
        return _multiplicative_on(A, B, tb)

    for t in additive_maps(A, B, gens, options, accept, limit):
        if (
            len(set(t.tolist())) == B.order
            and is_ring_hom(A, B, t)
            and np.array_equal(t[Q1.i], Q2.i)
            and np.array_equal(t[Q1.i2], Q2.i2)
            and np.array_equal(Q2.pi[t], Q1.pi)
            and np.array_equal(Q2.pi2[t], Q1.pi2)
        ):
            yield RingHom(A, B, _frozen(t))


def butterfly_isomorphism(Q1: Butterfly, Q2: Butterfly) -> Optional[RingHom]:
    """A 2-cell Q1 ⇒ Q2, or None."""
    if not (_same_end(Q1.source, Q2.source) and _same_end(Q1.target, Q2.target)):
        raise ShapeMismatch("butterflies have different ends")
    return next(_butterfly_maps(Q1, Q2, limit=1), None)


def butterfly_automorphisms(Q: Butterfly) -> List[RingHom]:
    return list(_butterfly_maps(Q, Q))


def product_butterfly(Q: Butterfly, Qt: Butterfly) -> Butterfly:
    """Q × Q̃ : ξ × ξ̃ → η × η̃."""
    src = product_2ext(Q.source, Qt.source)
    tgt = product_2ext(Q.target, Qt.target)
    P = product_ring(Q.Q, Qt.Q)
    i = [P.index((int(Q.i[u[0]]), int(Qt.i[u[1]]))) for u in src.N.module.labels]
    i2 = [P.index((int(Q.i2[u[0]]), int(Qt.i2[u[1]]))) for u in tgt.N.module.labels]
    pi = [src.R.index((int(Q.pi[u[0]]), int(Qt.pi[u[1]]))) for u in P.labels]
    pi2 = [tgt.R.index((int(Q.pi2[u[0]]), int(Qt.pi2[u[1]]))) for u in P.labels]
    alpha = None
    if Q.alpha is not None and Qt.alpha is not None:
        alpha = [P.index((int(Q.alpha[t]), int(Qt.alpha[t]))) for t in range(src.G.order)]
    return validate_butterfly(src, tgt, P, i, i2, pi, pi2, alpha)


def baer_sum_butterfly(Q: Butterfly, Qt: Butterfly) -> Butterfly:
    """Q + Q̃ : ξ + ξ̃ → η + η̃ with middle (Q ×_B Q̃)/{(i e m, −ĩ ẽ m)}."""
    xi, xit, eta, etat = Q.source, Qt.source, Q.target, Qt.target
    src = baer_sum_2ext(xi, xit)
    tgt = baer_sum_2ext(eta, etat)
    B = xi.B
    P, p1, p2 = fiber_product(
        RingHom(Q.Q, B, _frozen(xi.g.table[Q.pi])),
        RingHom(Qt.Q, B, _frozen(xit.g.table[Qt.pi])),
    )
    anti = [P.index((int(Q.i[xi.e[m]]), int(Qt.Q.neg[Qt.i[xit.e[m]]]))) for m in range(xi.M.order)]
    C, proj = quotient_by_subgroup(P, anti, f"{Q.Q.name}+{Qt.Q.name}")
    i = [proj(P.index((int(Q.i[n]), int(Qt.i[nt])))) for n, nt in src.N.module.labels]
    i2 = [proj(P.index((int(Q.i2[n]), int(Qt.i2[nt])))) for n, nt in tgt.N.module.labels]
    pi = np.zeros(C.order, dtype=np.int64)
    pi2 = np.zeros(C.order, dtype=np.int64)
    for x, (q, qt) in enumerate(P.labels):
        pi[proj(x)] = src.R.index((int(Q.pi[q]), int(Qt.pi[qt])))
        pi2[proj(x)] = tgt.R.index((int(Q.pi2[q]), int(Qt.pi2[qt])))
    alpha = None
    if Q.alpha is not None and Qt.alpha is not None:
        alpha = [proj(P.index((int(Q.alpha[t]), int(Qt.alpha[t])))) for t in range(xi.G.order)]
    return validate_butterfly(src, tgt, C, i, i2, pi, pi2, alpha)


def shearing_isomorphism(xi: TwoExtension) -> RingHom:
    """R ×_B R ≅ R + P for P = ker g, (r, r') ↦ (r, r − r')."""
    R = xi.R
    P, _, _ = fiber_product(xi.g, xi.g)
    crossed = ideal_as_crossed(kernel(xi.g))
    RP = semidirect(R, crossed, name=f"{R.name}+P")
    pos = {int(x): k for k, x in enumerate(crossed.f)}
    table = [RP.index((r, pos[R.sub(r, r2)])) for r, r2 in P.labels]
    h = ring_hom(P, RP, table)
    if len(set(h.table.tolist())) != RP.order:
        raise TwoExtViolation("shearing map bijective", None)
    return h


def canonical_self_difference_splitting(xi: TwoExtension) -> Butterfly:
    """
    The splitting ξ − ξ ≃ 0̄ with middle R + N.

    π(r, n) = (r + f n, r), i[(n₁, n₂)] = (f n₂, n₁ − n₂), i'(m) = (0, e m),
    π'(r, n) = g(r).
    """
    D = baer_sum_2ext(xi, negate_2ext(xi))
    R, N = xi.R, xi.N
    Q = semidirect(R, N, name=f"{R.name}+{N.module.name}")
    pi = [D.R.index((R.a(r, N.fmap(n)), r)) for r, n in Q.labels]
    i = [Q.index((N.fmap(n2), N.module.sub(n1, n2))) for n1, n2 in D.N.module.labels]
    i2 = [Q.index((R.zero, int(xi.e[m]))) for m in range(xi.M.order)]
    pi2 = [xi.g(r) for r, _ in Q.labels]
    alpha = [Q.index((xi.ground(t), N.module.zero)) for t in range(xi.G.order)]
    zero = trivial_2extension(xi.B, xi.M, xi.structure())
    return validate_butterfly(D, zero, Q, i, i2, pi, pi2, alpha)


def difference_extension(Q1: Butterfly, Q2: Butterfly) -> SquareZeroExtension:
    """
    For butterflies with the same ends, the extension of B by M
    (Q1 ×_{R×R'} Q2)/{(i₁n + i'₁n', i₂n + i'₂n')}.
    """
    if not (_same_end(Q1.source, Q2.source) and _same_end(Q1.target, Q2.target)):
        raise ShapeMismatch("butterflies have different ends")
    xi, eta = Q1.source, Q1.target
    A, C = Q1.Q, Q2.Q
    labels = [(q1, q2) for q1 in range(A.order) for q2 in range(C.order) if Q1.pi[q1] == Q2.pi[q2] and Q1.pi2[q1] == Q2.pi2[q2]]
    F = ring_from_operations(
        labels,
        lambda u, v: (A.a(u[0], v[0]), C.a(u[1], v[1])),
        lambda u, v: (A.m(u[0], v[0]), C.m(u[1], v[1])),
        (A.zero, C.zero),
        (A.one, C.one),
        f"{A.name}x{C.name}",
        check=False,
    )
    killed = set()
    for n in range(xi.N.order):
        for n2 in range(eta.N.order):
            killed.add(F.index((A.a(int(Q1.i[n]), int(Q1.i2[n2])), C.a(int(Q2.i[n]), int(Q2.i2[n2])))))
    E, proj = quotient_by_subgroup(F, killed, f"D({A.name},{C.name})")
    e = [proj(F.index((int(Q1.i2[eta.e[m]]), C.zero))) for m in range(eta.M.order)]
    ptab = np.zeros(E.order, dtype=np.int64)
    for x, (q1, _) in enumerate(F.labels):
        ptab[proj(x)] = xi.g(int(Q1.pi[q1]))
    structure = xi.structure()
    if Q1.alpha is None or Q2.alpha is None:
        alpha = None
    else:
        alpha = RingHom(xi.G, E, _frozen([proj(F.index((int(Q1.alpha[t]), int(Q2.alpha[t])))) for t in range(xi.G.order)]))
    return validate_extension(structure, eta.M, E, e, RingHom(E, xi.B, _frozen(ptab)), alpha)


def butterfly_automorphism_to_extension(Q: Butterfly) -> SquareZeroExtension:
    """The extension class of a self-butterfly ξ ≃ ξ, measured against the identity."""
    if not _same_end(Q.source, Q.target):
        raise ShapeMismatch("not a self-butterfly")
    return difference_extension(Q, identity_butterfly(Q.source))


def act_on_butterfly(Q: Butterfly, zeta: SquareZeroExtension) -> Butterfly:
    """Q·ζ = (Q ×_B B')/{(i e m, −e_ζ m)} with the same ends."""
    xi = Q.source
    B = xi.B
    if not same_ring(zeta.B, B) or not same_module(zeta.M, xi.M):
        raise ShapeMismatch("extension is not over (B, M) of the butterfly")
    P, p1, _ = fiber_product(RingHom(Q.Q, B, _frozen(xi.g.table[Q.pi])), zeta.p)
    anti = [P.index((int(Q.i[xi.e[m]]), int(zeta.Bp.neg[zeta.e[m]]))) for m in range(xi.M.order)]
    C, proj = quotient_by_subgroup(P, anti, f"{Q.Q.name}.{zeta.Bp.name}")
    i = [proj(P.index((int(Q.i[n]), zeta.Bp.zero))) for n in range(xi.N.order)]
    i2 = [proj(P.index((int(Q.i2[n]), zeta.Bp.zero))) for n in range(Q.target.N.order)]
    pi = np.zeros(C.order, dtype=np.int64)
    pi2 = np.zeros(C.order, dtype=np.int64)
    for x in range(P.order):
        pi[proj(x)] = Q.pi[p1(x)]
        pi2[proj(x)] = Q.pi2[p1(x)]
    alpha = None
    if Q.alpha is not None:
        alpha = [proj(P.index((int(Q.alpha[t]), zeta.alpha(t)))) for t in range(xi.G.order)]
    return validate_butterfly(xi, Q.target, C, i, i2, pi, pi2, alpha)


# A-algebra structures


def restrict_to_base(xi: TwoExtension) -> TwoExtension:
    """ξ|_A: 0 → M → N → R ×_B A → A → 0."""
    base, gtb = xi.frame()
    A = base.source
    P, p1, p2 = fiber_product(xi.g, base)
    module = restrict_scalars(xi.N.module, p1)
    f = [P.index((xi.N.fmap(n), A.zero)) for n in range(module.order)]
    N = validate_crossed(P, module, xi.N.nmul, f)
    ground = RingHom(xi.G, P, _frozen([P.index((xi.ground(t), gtb(t))) for t in range(xi.G.order)]))
    return validate_2extension(restrict_scalars(xi.M, base), N, xi.e, p2, ground, name=f"{xi.name}|A")


def attach_a_structure(xi: TwoExtension, S: Butterfly) -> TwoExtension:
    """
    Raises:
        ShapeMismatch: If S is not a splitting of ξ|_A with a ground structure.
    """
    xa = restrict_to_base(xi)
    if not _same_end(S.source, xa):
        raise ShapeMismatch("A-structure must start at the pullback of ξ to A")
    if not is_trivial_shape(S.target) or not same_ring(S.target.B, xa.B):
        raise ShapeMismatch("A-structure must end at the trivial 2-extension over A")
    if S.alpha is None:
        raise ShapeMismatch("A-structure needs a ground structure on its middle ring")
    return replace(xi, a_structure=S)


def a_structure_from_factorization(xi: TwoExtension, alpha: RingHom) -> Butterfly:
    """
    The splitting of ξ|_A induced by a factorization α: A → R.

    Raises:
        NotALift: If g∘α is not the structure map A → B or α is not over G.
    """
    base, gtb = xi.frame()
    A = base.source
    if not is_ring_hom(A, xi.R, alpha.table) or not np.array_equal(xi.g.table[alpha.table], base.table):
        raise NotALift("alpha does not lift A → B")
    if not np.array_equal(alpha.table[gtb.table], xi.ground.table):
        raise NotALift("alpha is not compatible with the ground ring")
    xa = restrict_to_base(xi)
    zero = trivial_2extension(A, xa.M, gtb)
    cR = [xa.R.index((alpha(a), a)) for a in range(A.order)]
    c = validate_chain_map(zero, xa, np.arange(xa.M.order), xi.e, cR, np.arange(A.order))
    return invert(chain_map_to_butterfly(c))


def trivial_2ext_with_structure(zeta: SquareZeroExtension, base: RingHom, M: FiniteModule) -> TwoExtension:
    """
    0̄(C, M) over the frame G → A → C carrying an extension ζ of A by M|_A (over G) as A-structure.

    Args:
        zeta (SquareZeroExtension): Extension of A by M restricted to A,
            with ground G.
        base (RingHom): A → C.
        M (FiniteModule): The C-module.
    """
    A, C = base.source, base.target
    if not same_ring(zeta.B, A):
        raise ShapeMismatch("structure extension must extend the base ring")
    gtb = zeta.structure
    G = gtb.source
    ground = RingHom(G, C, _frozen(base.table[gtb.table]))
    xi = trivial_2extension(C, M, ground, base, gtb)
    xa = restrict_to_base(xi)
    Q = zeta.Bp
    pi = [xa.R.index((base(zeta.p(q)), zeta.p(q))) for q in range(Q.order)]
    emb = [int(zeta.e[m]) for m in range(M.order)]
    target = trivial_2extension(A, xa.M, gtb)
    S = validate_butterfly(xa, target, Q, emb, emb, pi, zeta.p.table, zeta.alpha.table)
    return attach_a_structure(xi, S)


def local_split_free_base(xi: TwoExtension, generators: Sequence[int], lifts: Dict[int, int]) -> Butterfly:
    """
    Splits ξ from lifts of algebra generators of B along g.

    The lifts extend to a ring section B → R when they respect the relations
    of B; the section gives a chain map 0̄ → ξ whose butterfly is inverted.

    Raises:
        NoSection: If a generator has no lift or the lifts define no section.
        NotALift: If a lift does not map to its generator.
    """
    R, B, g = xi.R, xi.B, xi.g
    for x in generators:
        if x not in lifts:
            raise NoSection(f"no lift supplied for generator {x}")
        if g(lifts[x]) != x:
            raise NotALift(f"lift of {x} maps to {g(lifts[x])}")
    section = {}

    def put(b, r):
        if section.setdefault(b, r) != r:
            raise NoSection(f"lifts violate a relation of {B.name} at {b}")

    for t in range(xi.G.order):
        put(g(xi.ground(t)), xi.ground(t))
    for x in generators:
        put(x, lifts[x])
    frontier = list(section.items())
    while frontier:
        nxt = []
        for b, r in frontier:
            for b2, r2 in list(section.items()):
                for bb, rr in ((B.a(b, b2), R.a(r, r2)), (B.m(b, b2), R.m(r, r2))):
                    if bb not in section:
                        section[bb] = rr
                        nxt.append((bb, rr))
                    elif section[bb] != rr:
                        raise NoSection(f"lifts violate a relation of {B.name} at {bb}")
        frontier = nxt
    if len(section) != B.order:
        raise NoSection("generators do not generate B")
    sigma = [section[b] for b in range(B.order)]
    zero = trivial_2extension(B, xi.M, xi.structure())
    c = validate_chain_map(zero, xi, np.arange(xi.M.order), xi.e, sigma, np.arange(B.order))
    return invert(chain_map_to_butterfly(c))


# splitting search


def split_search(xi: TwoExtension) -> Optional[Butterfly]:
    """
    A splitting ξ ≃ 0̄ (compatible with the A-structure when attached), or None.

    The middle ring is an extension Q of R by M over the ground ring; its
    factor sets, the correction μ: N → M with i(n) = σ(f n) + μ(n) and, with
    an A-structure S, a 2-cell h: R_A → M comparing Q|_A with S are the
    unknowns of one affine system over F_p.

    Raises:
        TooLarge: If the system exceeds config["max_candidates"].
    """
    R, g, N = xi.R, xi.g, xi.N
    MR = restrict_scalars(xi.M, g)
    model = FactorSetModel(R, MR, xi.ground)
    d, p, Mc, mats = model.d, model.p, model.Mc, model.mats
    Nc = ElementaryCoordinates(N.module) if model.linear else None
    mu = FunctionUnknown("mu", d, N.module, Nc)
    keys = model.keys() + mu.keys()
    S = xi.a_structure
    if S is not None:
        xa = S.source
        RA = xa.R
        RAc = ElementaryCoordinates(RA, first=[RA.one]) if model.linear else None
        h = FunctionUnknown("h", d, RA, RAc, fixed=[RA.one])
        keys = keys + h.keys()
    if len(keys) * d > config["max_candidates"]:
        raise TooLarge("splitting system exceeds max_candidates")
    system = AffineSystem(p, d, keys)
    model.add_conditions(system)

    rpts = model.ring_points()
    npts = list(Nc.basis) if model.linear else list(range(N.order))
    mpts = list(Mc.basis) if model.linear else list(range(xi.M.order))
    if not model.linear:
        for n, n2 in itertools.product(npts, repeat=2):
            system.require(mu(N.module.a(n, n2)) - mu(n) - mu(n2) - model.plus(N.fmap(n), N.fmap(n2)))
    for r in rpts:
        for n in npts:
            system.require(mu(N.module.s(r, n)) - mu(n).act(mats[r]) - model.times(r, N.fmap(n)))
    for m in mpts:
        system.require(mu(int(xi.e[m])) - Form.constant(Mc.coords(m), d))

    if S is not None:
        pr = [lab[0] for lab in RA.labels]
        data = SectionData(S.Q, RingHom(S.Q, RA, S.pi), S.i2, Mc, RAc, RingHom(xi.G, S.Q, S.alpha))
        apts = list(RAc.basis) if model.linear else list(range(RA.order))
        for x, y in itertools.product(apts, repeat=2):
            if not model.linear:
                system.require(model.plus(pr[x], pr[y]) - Form.constant(data.cp(x, y), d) - (h(x) + h(y) - h(RA.a(x, y))))
            system.require(
                model.times(pr[x], pr[y])
                - Form.constant(data.cm(x, y), d)
                - (h(y).act(mats[pr[x]]) + h(x).act(mats[pr[y]]) - h(RA.m(x, y)))
            )
        for n in npts:
            fa = xa.N.fmap(n)
            system.require(Form.constant(data.defect(int(S.i[n]), fa), d) - mu(n) - h(fa))
        for t in model.ground_points():
            st = xa.ground(t)
            system.require(Form.constant(data.lam(t, xa.ground), d) - model.lam(t) - h(st))

    solution = system.solve()
    emit_log("Splitting search", {"xi": xi.name, "unknowns": len(keys) * d, "found": solution is not None}, severity="DEBUG")
    if solution is None:
        return None
    values = system.values(solution)
    ext = extension_from_cocycle(model, values, f"Q({xi.name})")
    Q = ext.Bp
    i = [Q.index((N.fmap(n), Mc.element(mu(n).evaluate(values, p)))) for n in range(N.order)]
    i2 = [int(ext.e[m]) for m in range(xi.M.order)]
    pi = ext.p.table
    pi2 = g.table[ext.p.table]
    target = trivial_2extension(xi.B, xi.M, xi.structure())
    return validate_butterfly(xi, target, Q, i, i2, pi, pi2, ext.alpha.table)


def isomorphic_2ext(xi: TwoExtension, eta: TwoExtension) -> bool:
    """Whether ξ − η splits."""
    return split_search(baer_sum_2ext(xi, negate_2ext(eta))) is not None


# classification over a prime field


def _subalgebra(B: FiniteRing, gens: Sequence[int]) -> set:
    elems = set(B.span([B.one] + list(gens)))
    while True:
        products = {B.m(x, y) for x in elems for y in elems}
        grown = set(B.span(sorted(elems | products)))
        if grown == elems:
            return elems
        elems = grown


def algebra_generators(B: FiniteRing) -> List[int]:
    """Greedy algebra generators over the prime field, least index first."""
    gens = []
    covered = _subalgebra(B, gens)
    for x in range(B.order):
        if len(covered) == B.order:
            break
        if x not in covered:
            gens.append(x)
            covered = _subalgebra(B, gens)
    return gens


def minimal_polynomial(B: FiniteRing, Bc: ElementaryCoordinates, x: int) -> List[int]:
    """Monic minimal polynomial of x over F_p, coefficients low to high."""
    p = Bc.p
    powers = [B.one]
    while True:
        nxt = B.m(powers[-1], x)
        cols = np.array([Bc.coords(y) for y in powers], dtype=np.int64).T
        sol = solve_mod(cols, Bc.coords(nxt), p)
        if sol is not None:
            return [int(-c) % p for c in sol] + [1]
        powers.append(nxt)


def complete_intersection_cover(B: FiniteRing, p: int) -> Tuple[FiniteRing, RingHom, List[int]]:
    """
    R = ⊗ F_p[X_i]/(P_i) → B sending X_i to the i-th algebra generator.

    Returns:
        tuple: (R, the surjection R → B, the generators).
    """
    Bc = ElementaryCoordinates(B, first=[B.one])
    gens = algebra_generators(B)
    polys = [minimal_polynomial(B, Bc, x) for x in gens]
    R = polynomial_quotient(p, polys, f"CI({B.name})")
    degs = [len(poly) - 1 for poly in polys]
    monos = [tuple(reversed(e)) for e in itertools.product(*[range(d) for d in reversed(degs)])]
    values = [B.product(B.power(x, k) for x, k in zip(gens, mono)) for mono in monos]
    table = [B.total(B.times(int(c), v) for c, v in zip(R.labels[r], values)) for r in range(R.order)]
    return R, ring_hom(R, B, table), gens


@dataclass
class Exal2Classification:
    """
    Exal²_{F_p}(B, M) as crossed extensions of K = ker(R → B) by M over a
    complete-intersection cover R, modulo those that split.

    Every class is realised with |N| and |R| at most bound; completeness holds
    relative to that bound only.
    """

    cover: RingHom
    candidates: QuotientSpace
    kernel: List[Tuple[int, ...]]
    classes: QuotientSpace
    build: object
    bound: Tuple[int, int] = (0, 0)

    @property
    def order(self) -> int:
        return self.classes.order

    @property
    def dimension(self) -> int:
        return self.classes.dimension

    def representative(self, coords) -> TwoExtension:
        vec = self.classes.vector(coords)
        return self.build(tuple(int(c) for c in vec))

    def class_of(self, xi: TwoExtension) -> Tuple[int, ...]:
        for coords, _ in self.classes.elements():
            if isomorphic_2ext(xi, self.representative(coords)):
                return tuple(int(c) for c in coords)
        raise TwoExtViolation("class not found among representatives", xi.name)


def exal2_classify(structure: RingHom, M: FiniteModule) -> Exal2Classification:
    """
    Exal²_A(B, M) for A = F_p.

    Every class is represented by a crossed extension N = K ⊕ M of the
    kernel K of a complete-intersection cover R → B, with action
    r.(k, m) = (rk, r̄m + β(r, k)); the classes are the β modulo changes of
    splitting, divided by those whose 2-extension splits.

    Raises:
        ShapeMismatch: If A is not a prime field.
        TooLarge: If there are more than config["max_table_enumeration"] candidates.
    """
    A, B = structure.source, structure.target
    Mc0 = ElementaryCoordinates(M)
    p = Mc0.p if M.order > 1 else A.order
    if A.order != p or A.characteristic != p:
        raise ShapeMismatch("exal2_classify is implemented over prime fields F_p only")
    R, phi, _ = complete_intersection_cover(B, p)
    K = kernel(phi)
    Kmod, inc = submodule(ring_as_module(R), K.members)
    kmembers = [int(x) for x in inc.table]
    kpos = {x: i for i, x in enumerate(kmembers)}
    Kc = ElementaryCoordinates(Kmod)
    Rc = ElementaryCoordinates(R, first=[R.one])
    MR = restrict_scalars(M, phi)
    Mc = ElementaryCoordinates(MR)
    d = Mc.dim
    mats = [Mc.action_matrix(r) for r in range(R.order)]
    rbasis = [k for k, b in enumerate(Rc.basis) if b != R.one]
    kbasis = list(range(Kc.dim))
    keys = [("beta", i, j) for i in rbasis for j in kbasis]
    eta_keys = [("eta", j) for j in kbasis]

    def beta(r, k):
        vr, vk = Rc.coords(r), Kc.coords(kpos[k])
        terms = {}
        for i in rbasis:
            for j in kbasis:
                c = int(vr[i]) * int(vk[j])
                if c:
                    terms[("beta", i, j)] = c * np.eye(d, dtype=np.int64)
        return Form(d, terms)

    def eta(k):
        vk = Kc.coords(kpos[k])
        return Form(d, {("eta", j): int(vk[j]) * np.eye(d, dtype=np.int64) for j in kbasis if vk[j]})

    system = AffineSystem(p, d, keys)
    kb = [kmembers[Kc.basis[j]] for j in kbasis]
    for r, r2 in itertools.product(Rc.basis, repeat=2):
        for k in kb:
            system.require(beta(R.m(r, r2), k) - beta(r2, k).act(mats[r]) - beta(r, R.m(r2, k)))
    for k, k2 in itertools.product(kb, repeat=2):
        system.require(beta(k, k2) - beta(k2, k))
    Z = system.nullspace() if system.width else np.zeros((0, 0), dtype=np.int64)
    D = np.zeros((system.width, len(eta_keys) * d), dtype=np.int64)
    ecol = {key: n for n, key in enumerate(eta_keys)}
    for i in rbasis:
        for j in kbasis:
            r, k = Rc.basis[i], kb[j]
            form = eta(k).act(mats[r]) - eta(R.m(r, k))
            row = system.column[("beta", i, j)] * d
            for key, mat in form.terms.items():
                D[row : row + d, ecol[key] * d : ecol[key] * d + d] += mat
    D = mod_p(D, p)
    if Z.size == 0:
        Z = np.zeros((system.width, 0), dtype=np.int64)
    candidates = QuotientSpace(Z, D, p)
    if candidates.order > config["max_table_enumeration"]:
        raise TooLarge(f"{candidates.order} crossed candidates exceed max_table_enumeration")
    ground = structure_map(A, R)

    def build(coords) -> TwoExtension:
        values = system.values(candidates.vector(coords))
        btab = {(r, k): Mc.element(beta(r, k).evaluate(values, p)) for r in range(R.order) for k in kmembers}
        labels = [(k, m) for k in range(len(kmembers)) for m in range(M.order)]
        module = module_from_operations(
            R,
            labels,
            lambda u, v: (Kmod.a(u[0], v[0]), M.a(u[1], v[1])),
            lambda r, u: (kpos[R.m(r, kmembers[u[0]])], M.a(MR.s(r, u[1]), btab[(r, kmembers[u[0]])])),
            (Kmod.zero, M.zero),
            f"K+M{tuple(coords)}",
        )
        nmul = [[module.index((kpos[R.m(kmembers[u[0]], kmembers[v[0]])], btab[(kmembers[u[0]], kmembers[v[0]])])) for v in labels] for u in labels]
        f = [kmembers[u[0]] for u in labels]
        N = validate_crossed(R, module, nmul, f)
        e = [module.index((Kmod.zero, m)) for m in range(M.order)]
        return validate_2extension(M, N, e, phi, ground, name=f"xi{tuple(coords)}")

    iterator = candidates.elements()
    if config["progress"]:
        iterator = tqdm(list(iterator), desc="exal2 candidates", file=sys.stderr)
    kernel_coords = []
    for coords, _ in iterator:
        coords = tuple(int(c) for c in coords)
        if split_search(build(coords)) is not None:
            kernel_coords.append(coords)
    dim = candidates.dimension
    kmat = np.array(kernel_coords, dtype=np.int64).T if kernel_coords else np.zeros((dim, 0), dtype=np.int64)
    classes = QuotientSpace(np.eye(dim, dtype=np.int64), kmat, p)
    bound = (Kmod.order * M.order, R.order)
    emit_log(
        "Classified 2-extensions",
        {"B": B.name, "M": M.name, "cover": R.name, "candidates": candidates.order, "order": classes.order, "bound": bound},
        severity="DEBUG",
    )
    return Exal2Classification(phi, candidates, kernel_coords, classes, build, bound)


def check_exal2_group(cls: Exal2Classification) -> List[Dict]:
    """
    Verifies that the Baer sum of 2-extensions adds class coordinates.

    Returns:
        list: One record per failing law (empty when the group law holds).
    """
    p = cls.classes.p
    keys = [tuple(int(c) for c in coords) for coords, _ in cls.classes.elements()]
    reps = {c: cls.representative(c) for c in keys}
    failures = []
    zero = tuple([0] * cls.dimension)
    if split_search(reps[zero]) is None:
        failures.append({"law": "zero class", "witness": zero})
    for a, b in itertools.combinations_with_replacement(sorted(reps), 2):
        expected = tuple((x + y) % p for x, y in zip(a, b))
        if not isomorphic_2ext(baer_sum_2ext(reps[a], reps[b]), reps[expected]):
            failures.append({"law": "baer sum", "witness": (a, b)})
    for a in reps:
        if split_search(baer_sum_2ext(reps[a], negate_2ext(reps[a]))) is None:
            failures.append({"law": "inverse", "witness": a})
    return failures
