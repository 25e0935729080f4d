"""
Square-zero extensions 0 → M → B' → B → 0 of A-algebras.

An extension is stored with its structure map A → B, the coefficient module M
over B, the middle ring B', the embedding e: M → B' as an index table, the
projection p: B' → B and the A-algebra structure α: A → B'.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .cochains import AffineSystem, FactorSetModel, SectionData, cocycle_quotient
from .crossed import semidirect
from .finring import (
    FiniteModule,
    FiniteRing,
    Ideal,
    ModuleHom,
    RingHom,
    _frozen,
    _multiplicative_on,
    additive_generators,
    additive_maps,
    compose_homs,
    fiber_product,
    is_ring_hom,
    make_ideal,
    quotient,
    restrict_scalars,
    ring_from_operations,
    ring_homs,
    same_ring,
    structure_map,
)
from .linalg import QuotientSpace
from .utils.configs import config
from .utils.errors import ExtensionViolation, NotAnAutomorphism, ShapeMismatch, TooLarge
from .utils.write import emit_log


@dataclass(frozen=True, eq=False)
class SquareZeroExtension:
    structure: RingHom
    M: FiniteModule
    Bp: FiniteRing
    e: np.ndarray
    p: RingHom
    alpha: RingHom

    @property
    def A(self) -> FiniteRing:
        return self.structure.source

    @property
    def B(self) -> FiniteRing:
        return self.structure.target

    def e_inv(self) -> Dict[int, int]:
        return {int(x): m for m, x in enumerate(self.e)}

    def lift(self, b: int) -> int:
        """Least-index preimage of b."""
        return int(np.nonzero(self.p.table == b)[0][0])


@dataclass(frozen=True, eq=False)
class Derivation:
    structure: RingHom
    M: FiniteModule
    table: np.ndarray

    def __call__(self, b: int) -> int:
        return int(self.table[b])

    def key(self) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.table)


def same_module(M: FiniteModule, N: FiniteModule) -> bool:
    return same_ring(M.ring, N.ring) and M.order == N.order and np.array_equal(M.add, N.add) and np.array_equal(M.act, N.act)


def validate_extension(structure: RingHom, M: FiniteModule, Bp: FiniteRing, e, p: RingHom, alpha: Optional[RingHom] = None) -> SquareZeroExtension:
    """
    Checks all extension laws and returns the validated extension.

    When alpha is omitted an A-structure lifting the structure map is
    searched for among all ring maps A → B'.

    Raises:
        ExtensionViolation: With the failing law and a witness.
    """
    B = structure.target
    e = np.asarray(e, dtype=np.int64)
    if not same_ring(M.ring, B):
        raise ExtensionViolation("M is a B-module", M.name)
    if not is_ring_hom(Bp, B, p.table):
        raise ExtensionViolation("p ring map", None)
    missing = sorted(set(range(B.order)) - set(int(v) for v in p.table))
    if missing:
        raise ExtensionViolation("p surjective", missing[0])
    if e.shape != (M.order,):
        raise ExtensionViolation("e total on M", e.shape)
    for x, y in itertools.product(range(M.order), repeat=2):
        if e[M.a(x, y)] != Bp.a(int(e[x]), int(e[y])):
            raise ExtensionViolation("e additive", (x, y))
    if len(set(e.tolist())) != M.order:
        raise ExtensionViolation("e injective", None)
    kernel = {x for x in range(Bp.order) if p(x) == B.zero}
    if kernel != set(e.tolist()):
        raise ExtensionViolation("image of e = kernel of p", sorted(kernel ^ set(e.tolist()))[:1])
    for x, y in itertools.product(range(M.order), repeat=2):
        if Bp.m(int(e[x]), int(e[y])) != Bp.zero:
            raise ExtensionViolation("M squares to zero", (x, y))
    for q in range(Bp.order):
        b = p(q)
        for m in range(M.order):
            if Bp.m(q, int(e[m])) != e[M.s(b, m)]:
                raise ExtensionViolation("induced action", (q, m))
    A = structure.source
    if alpha is None:
        fibers = _fibers(p, B)
        found = [h for h in ring_homs(A, Bp, candidates=lambda t: fibers[structure(t)]) if np.array_equal(p.table[h.table], structure.table)]
        if not found:
            raise ExtensionViolation("no A-structure", A.name)
        alpha = found[0]
    else:
        if not is_ring_hom(A, Bp, alpha.table):
            raise ExtensionViolation("alpha ring map", None)
        bad = [t for t in range(A.order) if p(alpha(t)) != structure(t)]
        if bad:
            raise ExtensionViolation("p∘alpha = structure", bad[0])
    return SquareZeroExtension(structure, M, Bp, _frozen(e), RingHom(Bp, B, p.table), alpha)


def _fibers(p: RingHom, B: FiniteRing) -> Dict[int, List[int]]:
    fibers = {b: [] for b in range(B.order)}
    for q in range(p.source.order):
        fibers[p(q)].append(q)
    return fibers


def trivial_extension(structure: RingHom, M: FiniteModule) -> SquareZeroExtension:
    """B + εM with A-structure t ↦ (s(t), 0)."""
    B = structure.target
    Bp = semidirect(B, M, name=f"{B.name}+e{M.name}")
    e = [Bp.index((B.zero, m)) for m in range(M.order)]
    p = RingHom(Bp, B, _frozen([lab[0] for lab in Bp.labels]))
    alpha = RingHom(structure.source, Bp, _frozen([Bp.index((structure(t), M.zero)) for t in range(structure.source.order)]))
    return validate_extension(structure, M, Bp, e, p, alpha)


def ideal_extension(S: FiniteRing, L: Ideal, alpha: RingHom) -> SquareZeroExtension:
    """
    0 → L → S → S/L → 0 for a square-zero ideal L, as an extension of A-algebras through alpha: A → S.
    """
    B, proj = quotient(S, L, f"{S.name}/L")
    members = sorted(L.members)
    pos = {x: i for i, x in enumerate(members)}
    lift = {}
    for s in range(S.order):
        lift.setdefault(proj(s), s)
    add = [[pos[S.a(x, y)] for y in members] for x in members]
    try:
        act = [[pos[S.m(lift[b], x)] for x in members] for b in range(B.order)]
    except KeyError as e:
        raise ExtensionViolation("L is an ideal", str(e))
    M = FiniteModule(B, _frozen(add), _frozen(act), pos[S.zero], tuple(S.label(x) for x in members), "L")
    structure = compose_homs(alpha, proj)
    return validate_extension(structure, M, S, members, proj, alpha)


def model_for(structure: RingHom, M: FiniteModule, linear: Optional[bool] = None) -> FactorSetModel:
    return FactorSetModel(structure.target, M, structure, linear)


def section_data(model: FactorSetModel, zeta: SquareZeroExtension) -> SectionData:
    return model.section_data(zeta.Bp, zeta.p, zeta.e, zeta.alpha)


def factor_set(zeta: SquareZeroExtension, model: Optional[FactorSetModel] = None) -> Dict:
    """
    Normalized factor sets of ζ read through its least-index section.

    Returns:
        dict: Unknown key ↦ coordinate vector in M, for the additive and
        multiplicative factor sets and the A-structure defect.
    """
    model = model or model_for(zeta.structure, zeta.M)
    return model.extract(section_data(model, zeta))


def extension_from_cocycle(model: FactorSetModel, values: Dict, name: str = "") -> SquareZeroExtension:
    """Rebuilds B' on the set B × M from factor-set values."""
    B, M = model.R, model.M
    cp, cm, lam = model.tables(values)
    labels = [(b, m) for b in range(B.order) for m in range(M.order)]

    def add(u, v):
        return (B.a(u[0], v[0]), M.total([u[1], v[1], int(cp[u[0], v[0]])]))

    def mul(u, v):
        return (B.m(u[0], v[0]), M.total([M.s(u[0], v[1]), M.s(v[0], u[1]), int(cm[u[0], v[0]])]))

    Bp = ring_from_operations(labels, add, mul, (B.zero, M.zero), (B.one, M.zero), name or f"{B.name}~{M.name}")
    e = [Bp.index((B.zero, m)) for m in range(M.order)]
    p = RingHom(Bp, B, _frozen([lab[0] for lab in Bp.labels]))
    s = model.ground
    alpha = RingHom(s.source, Bp, _frozen([Bp.index((s(t), int(lam[t]))) for t in range(s.source.order)]))
    return validate_extension(s, M, Bp, e, p, alpha)


@dataclass
class ExalClassification:
    """Exal_A(B, M) as cocycles modulo coboundaries, with representatives."""

    model: FactorSetModel
    system: AffineSystem
    space: QuotientSpace

    @property
    def order(self) -> int:
        return self.space.order

    @property
    def dimension(self) -> int:
        return self.space.dimension

    @property
    def p(self) -> int:
        return self.model.p

    def representative(self, coords) -> SquareZeroExtension:
        values = self.system.values(self.space.vector(coords))
        return extension_from_cocycle(self.model, values, f"Exal{tuple(int(c) for c in coords)}")

    def class_of(self, zeta: SquareZeroExtension) -> Tuple[int, ...]:
        if not same_ring(zeta.B, self.model.R) or not same_module(zeta.M, self.model.M):
            raise ShapeMismatch("extension is not over the classified (B, M)")
        vec = self.system.vector(self.model.extract(section_data(self.model, zeta)))
        coords = self.space.coordinates(vec)
        if coords is None:
            raise ExtensionViolation("factor set is a cocycle", None)
        return coords

    def classes(self) -> List[Tuple[int, ...]]:
        return [tuple(c) for c, _ in self.space.elements()]


def exal_classify(structure: RingHom, M: FiniteModule) -> ExalClassification:
    """
    Exal_A(B, M) by solving the cocycle system and dividing out coboundaries.

    Raises:
        TooLarge: If the group has more elements than config["max_table_enumeration"].
    """
    model = model_for(structure, M)
    system, space = cocycle_quotient(model)
    if space.order > config["max_table_enumeration"]:
        raise TooLarge(f"Exal of order {space.order} exceeds max_table_enumeration")
    emit_log(
        "Classified extensions",
        {"A": structure.source.name, "B": structure.target.name, "M": M.name, "order": space.order, "linear": model.linear},
        severity="DEBUG",
    )
    return ExalClassification(model, system, space)


def splittings(zeta: SquareZeroExtension) -> List[RingHom]:
    """All A-algebra sections s: B → B' of p."""
    B = zeta.B
    fibers = _fibers(zeta.p, B)
    out = []
    for s in ring_homs(B, zeta.Bp, candidates=lambda b: fibers[b]):
        if np.array_equal(zeta.p.table[s.table], np.arange(B.order)) and np.array_equal(s.table[zeta.structure.table], zeta.alpha.table):
            out.append(s)
    return out


def _leibniz_on(B: FiniteRing, M: FiniteModule, table: Dict[int, int]) -> bool:
    keys = list(table)
    for i, x in enumerate(keys):
        for y in keys[i:]:
            xy = B.m(x, y)
            if xy in table and table[xy] != M.a(M.s(x, table[y]), M.s(y, table[x])):
                return False
    return True


def is_derivation(structure: RingHom, M: FiniteModule, table) -> bool:
    B = structure.target
    t = {b: int(v) for b, v in enumerate(table)}
    if len(t) != B.order or not _leibniz_on(B, M, t):
        return False
    if any(t[B.a(x, y)] != M.a(t[x], t[y]) for x in range(B.order) for y in range(B.order)):
        return False
    return all(t[structure(a)] == M.zero for a in range(structure.source.order))


def derivations(structure: RingHom, M: FiniteModule) -> List[Derivation]:
    """Der_A(B, M), enumerated through additive maps with Leibniz pruning."""
    B = structure.target
    killed = set(structure(a) for a in range(structure.source.order))

    def accept(tb):
        return all(tb[x] == M.zero for x in killed if x in tb) and _leibniz_on(B, M, tb)

    found = []
    for t in additive_maps(B, M, accept=accept):
        if is_derivation(structure, M, t):
            found.append(Derivation(structure, M, _frozen(t)))
    return sorted(found, key=lambda d: d.key())


def add_derivations(d1: Derivation, d2: Derivation) -> Derivation:
    M = d1.M
    return Derivation(d1.structure, M, _frozen([M.a(int(x), int(y)) for x, y in zip(d1.table, d2.table)]))


def _is_automorphism(zeta: SquareZeroExtension, table) -> bool:
    Bp = zeta.Bp
    t = np.asarray(table, dtype=np.int64)
    if len(set(t.tolist())) != Bp.order or not is_ring_hom(Bp, Bp, t):
        return False
    if not np.array_equal(t[zeta.e], zeta.e):
        return False
    if not np.array_equal(zeta.p.table[t], zeta.p.table):
        return False
    return bool(np.array_equal(t[zeta.alpha.table], zeta.alpha.table))


def automorphisms(zeta: SquareZeroExtension) -> List[RingHom]:
    """Ring automorphisms of B' fixing e, p and α."""
    Bp = zeta.Bp
    forced = {Bp.one: Bp.one}
    for x in zeta.e:
        forced[int(x)] = int(x)
    for x in zeta.alpha.table:
        forced[int(x)] = int(x)
    fibers = _fibers(zeta.p, zeta.B)
    gens = additive_generators(Bp, first=sorted(forced))

    def options(g):
        return [forced[g]] if g in forced else fibers[zeta.p(g)]

    def accept(tb):
        return all(tb[x] == y for x, y in forced.items() if x in tb) and _multiplicative_on(Bp, Bp, tb)

    return [RingHom(Bp, Bp, _frozen(t)) for t in additive_maps(Bp, Bp, gens, options, accept) if _is_automorphism(zeta, t)]


def automorphism_to_derivation(zeta: SquareZeroExtension, u: RingHom) -> Derivation:
    """
    d(b) = e⁻¹(u(b̃) − b̃), checked on every lift b̃ of b.

    Raises:
        NotAnAutomorphism: If u does not fix the extension data.
    """
    if not _is_automorphism(zeta, u.table):
        raise NotAnAutomorphism("u must be a ring automorphism commuting with e, p and alpha")
    Bp, e_inv = zeta.Bp, zeta.e_inv()
    table = np.full(zeta.B.order, -1, dtype=np.int64)
    for q in range(Bp.order):
        m = e_inv[Bp.sub(u(q), q)]
        b = zeta.p(q)
        if table[b] >= 0 and table[b] != m:
            raise NotAnAutomorphism(f"difference depends on the lift of {b}")
        table[b] = m
    if not is_derivation(zeta.structure, zeta.M, table):
        raise NotAnAutomorphism("difference is not a derivation")
    return Derivation(zeta.structure, zeta.M, _frozen(table))


def derivation_to_automorphism(zeta: SquareZeroExtension, d: Derivation) -> RingHom:
    """u(x) = x + e(d(p(x)))."""
    Bp = zeta.Bp
    table = [Bp.a(q, int(zeta.e[d(zeta.p(q))])) for q in range(Bp.order)]
    if not _is_automorphism(zeta, table):
        raise NotAnAutomorphism("derivation does not give an automorphism")
    return RingHom(Bp, Bp, _frozen(table))


def _check_same_frame(zeta1: SquareZeroExtension, zeta2: SquareZeroExtension):
    if not (same_ring(zeta1.A, zeta2.A) and same_ring(zeta1.B, zeta2.B) and same_module(zeta1.M, zeta2.M)):
        raise ShapeMismatch("extensions live over different (A, B, M)")
    if not np.array_equal(zeta1.structure.table, zeta2.structure.table):
        raise ShapeMismatch("different structure maps A → B")


def quotient_by_subgroup(P: FiniteRing, members, name: str = "") -> Tuple[FiniteRing, RingHom]:
    return quotient(P, make_ideal(P, members), name)


def baer_sum(zeta1: SquareZeroExtension, zeta2: SquareZeroExtension) -> SquareZeroExtension:
    """(B'1 ×_B B'2)/{(e1 m, −e2 m)}."""
    _check_same_frame(zeta1, zeta2)
    P, p1, _ = fiber_product(zeta1.p, zeta2.p)
    B2 = zeta2.Bp
    M = zeta1.M
    anti = [P.index((int(zeta1.e[m]), int(B2.neg[zeta2.e[m]]))) for m in range(M.order)]
    Q, proj = quotient_by_subgroup(P, anti, f"{zeta1.Bp.name}+{zeta2.Bp.name}")
    e = [proj(P.index((int(zeta1.e[m]), B2.zero))) for m in range(M.order)]
    ptab = np.zeros(Q.order, dtype=np.int64)
    for x in range(P.order):
        ptab[proj(x)] = zeta1.p(p1(x))
    A = zeta1.A
    alpha = RingHom(A, Q, _frozen([proj(P.index((zeta1.alpha(t), zeta2.alpha(t)))) for t in range(A.order)]))
    return validate_extension(zeta1.structure, M, Q, e, RingHom(Q, zeta1.B, _frozen(ptab)), alpha)


def negate(zeta: SquareZeroExtension) -> SquareZeroExtension:
    """The Baer inverse: the same ring with e replaced by −e."""
    M = zeta.M
    return validate_extension(zeta.structure, M, zeta.Bp, [int(zeta.e[M.neg[m]]) for m in range(M.order)], zeta.p, zeta.alpha)


def pullback(zeta: SquareZeroExtension, h: RingHom, structure0: Optional[RingHom] = None) -> SquareZeroExtension:
    """
    B' ×_B B₀ as an extension of B₀ by M restricted along h.

    Args:
        structure0 (RingHom): A → B₀ with h∘structure0 = structure; derived
            from the unit when A is some Z/n.
    """
    if not same_ring(h.target, zeta.B):
        raise ShapeMismatch(f"{h} does not land in {zeta.B.name}")
    B0 = h.source
    if structure0 is None:
        structure0 = structure_map(zeta.A, B0)
    if not np.array_equal(h.table[structure0.table], zeta.structure.table):
        raise ShapeMismatch("structure0 is not compatible with h")
    P, _, p2 = fiber_product(zeta.p, h)
    M0 = restrict_scalars(zeta.M, h)
    e = [P.index((int(zeta.e[m]), B0.zero)) for m in range(M0.order)]
    alpha = RingHom(zeta.A, P, _frozen([P.index((zeta.alpha(t), structure0(t))) for t in range(zeta.A.order)]))
    return validate_extension(structure0, M0, P, e, p2, alpha)


def pushout(zeta: SquareZeroExtension, mu: ModuleHom) -> SquareZeroExtension:
    """(B' + M')/{(e m, −μ m)} for a B-linear μ: M → M'."""
    if not same_module(mu.source, zeta.M):
        raise ShapeMismatch("mu does not start at M")
    Mp = mu.target
    Bp = zeta.Bp
    S = semidirect(Bp, restrict_scalars(Mp, zeta.p), name=f"{Bp.name}+{Mp.name}", check=False)
    anti = [S.index((int(zeta.e[m]), int(Mp.neg[mu(m)]))) for m in range(zeta.M.order)]
    Q, proj = quotient_by_subgroup(S, anti, f"{Bp.name}u{Mp.name}")
    e = [proj(S.index((Bp.zero, m))) for m in range(Mp.order)]
    ptab = np.zeros(Q.order, dtype=np.int64)
    for x, (q, _) in enumerate(S.labels):
        ptab[proj(x)] = zeta.p(q)
    alpha = RingHom(zeta.A, Q, _frozen([proj(S.index((zeta.alpha(t), Mp.zero))) for t in range(zeta.A.order)]))
    return validate_extension(zeta.structure, Mp, Q, e, RingHom(Q, zeta.B, _frozen(ptab)), alpha)


def restrict_ground(zeta: SquareZeroExtension, q: RingHom) -> SquareZeroExtension:
    """The same extension regarded over A' through q: A' → A."""
    return SquareZeroExtension(compose_homs(q, zeta.structure), zeta.M, zeta.Bp, zeta.e, zeta.p, compose_homs(q, zeta.alpha))


def check_baer_group(cls: ExalClassification) -> List[Dict]:
    """
    Verifies that Baer sum of representatives adds class coordinates.

    Returns:
        list: One record per failing pair (empty when the group law holds).
    """
    p = cls.p
    reps = {c: cls.representative(c) for c in cls.classes()}
    failures = []
    zero = tuple([0] * cls.dimension)
    if cls.class_of(reps[zero]) != zero:
        failures.append({"law": "zero class", "witness": zero})
    for a, b in itertools.combinations_with_replacement(sorted(reps), 2):
        expected = tuple((x + y) % p for x, y in zip(a, b))
        got = cls.class_of(baer_sum(reps[a], reps[b]))
        if got != expected:
            failures.append({"law": "baer sum", "witness": (a, b, got)})
    for a in reps:
        if cls.class_of(negate(reps[a])) != tuple((-x) % p for x in a):
            failures.append({"law": "inverse", "witness": a})
    return failures
