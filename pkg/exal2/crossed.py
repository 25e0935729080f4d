"""
Crossed rings: an R-module N with a commutative non-unital multiplication and a
structural map f: N → R satisfying n·n' = f(n).n'.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .finring import (
    FiniteModule,
    FiniteRing,
    Ideal,
    RingHom,
    _first_mismatch,
    _frozen,
    additive_generators,
    quotient,
    ring_as_module,
    ring_from_operations,
    submodule,
)
from .linalg import AbelianQuotient
from .utils.errors import CrossedViolation


@dataclass(frozen=True, eq=False)
class CrossedRing:
    ring: FiniteRing
    module: FiniteModule
    nmul: np.ndarray
    f: np.ndarray

    @property
    def order(self) -> int:
        return self.module.order

    def nm(self, x: int, y: int) -> int:
        return int(self.nmul[x, y])

    def fmap(self, x: int) -> int:
        return int(self.f[x])


def validate_crossed(R: FiniteRing, N: FiniteModule, nmul, f) -> CrossedRing:
    """
    Checks the crossed-ring laws on all pairs.

    Args:
        R (FiniteRing): The ring acting on N.
        N (FiniteModule): A validated R-module.
        nmul: Candidate multiplication table of N.
        f: Structural map N → R as an index table.

    Returns:
        CrossedRing: The verified crossed ring.

    Raises:
        CrossedViolation: With the failing law and a witness pair.
    """
    P = np.asarray(nmul, dtype=np.int64)
    F = np.asarray(f, dtype=np.int64)
    m = N.order
    ar = np.arange(m)
    rr = np.arange(R.order)
    checks = [
        ("crossed identity", P, N.act[F[:, None], ar[None, :]]),
        ("f additive", F[N.add], R.add[F[:, None], F[None, :]]),
        ("f R-linear", F[N.act], R.mul[rr[:, None], F[None, :]]),
        ("f multiplicative", F[P], R.mul[F[:, None], F[None, :]]),
        ("symmetry", N.act[F[:, None], ar[None, :]], N.act[F[None, :], ar[:, None]]),
    ]
    for law, left, right in checks:
        witness = _first_mismatch(left, right)
        if witness is not None:
            raise CrossedViolation(law, witness)
    return CrossedRing(R, N, _frozen(P), _frozen(F))


def ideal_as_crossed(K: Ideal) -> CrossedRing:
    """An ideal with the inherited multiplication and the inclusion as structural map."""
    R = K.ambient
    N, inc = submodule(ring_as_module(R), K.members)
    members = inc.table
    pos = {int(x): i for i, x in enumerate(members)}
    nmul = [[pos[R.m(int(x), int(y))] for y in members] for x in members]
    return validate_crossed(R, N, nmul, members)


def square_zero_crossed(R: FiniteRing, M: FiniteModule) -> CrossedRing:
    """M with zero multiplication and zero structural map."""
    m = M.order
    return validate_crossed(R, M, np.full((m, m), M.zero), np.full(m, R.zero))


def additive_words(G, gens: List[int]) -> Dict[int, np.ndarray]:
    """Integer coefficient vectors over gens, one per element, along a spanning tree."""
    words = {G.zero: np.zeros(len(gens), dtype=np.int64)}
    frontier = [G.zero]
    while frontier:
        nxt = []
        for x in frontier:
            for k, g in enumerate(gens):
                y = G.a(x, g)
                if y not in words:
                    w = words[x].copy()
                    w[k] += 1
                    words[y] = w
                    nxt.append(y)
        frontier = nxt
    return words


def _cycle_relations(G, gens, words) -> List[np.ndarray]:
    rels = []
    for x in range(G.order):
        for k, g in enumerate(gens):
            rel = words[x].copy()
            rel[k] += 1
            rel -= words[G.a(x, g)]
            if rel.any():
                rels.append(rel)
    return rels


def base_change(c: CrossedRing, h: RingHom) -> CrossedRing:
    """
    N ⊗_R S with structural map n⊗s ↦ h(f(n))·s and multiplication (n⊗s)(n'⊗s') = nn'⊗ss'.

    The tensor product is the quotient of the free abelian group on pairs of
    additive generators by the relations of both factors and the balancing
    relations, reduced with a Smith decomposition.
    """
    R, N, S = c.ring, c.module, h.target
    gn = additive_generators(N)
    gs = additive_generators(S)
    wn = additive_words(N, gn)
    ws = additive_words(S, gs)
    a, b = len(gn), len(gs)
    k = a * b

    def pure(x, s):
        return np.outer(wn[x], ws[s]).reshape(k) if k else np.zeros(0, dtype=np.int64)

    relations = []
    for rel in _cycle_relations(N, gn, wn):
        for j in range(b):
            relations.append(np.outer(rel, np.eye(b, dtype=np.int64)[j]).reshape(k))
    for rel in _cycle_relations(S, gs, ws):
        for i in range(a):
            relations.append(np.outer(np.eye(a, dtype=np.int64)[i], rel).reshape(k))
    for r in additive_generators(R):
        for i, g in enumerate(gn):
            for j, s in enumerate(gs):
                relations.append(pure(N.s(r, g), s) - pure(g, S.m(h(r), s)))
    exponent = max(N.order, 1) * max(S.order, 1)
    relations.extend(exponent * np.eye(k, dtype=np.int64))
    T = AbelianQuotient(k, [list(map(int, rel)) for rel in relations]) if k else None
    elements = T.elements() if T else [()]
    index = {e: i for i, e in enumerate(elements)}

    def reduce(vec):
        return index[T.reduce(vec)] if T else 0

    def expand(e):
        return np.array(T.lift(e), dtype=np.int64).reshape(a, b) if T else np.zeros((a, b), dtype=np.int64)

    def act(s2, e):
        v = expand(elements[e])
        return reduce(sum((v[i, j] * pure(gn[i], S.m(s2, gs[j])) for i in range(a) for j in range(b)), np.zeros(k, dtype=np.int64)))

    def fmap(e):
        v = expand(elements[e])
        return S.total(S.times(int(v[i, j]), S.m(h(c.fmap(gn[i])), gs[j])) for i in range(a) for j in range(b))

    def mult(e1, e2):
        v, w = expand(elements[e1]), expand(elements[e2])
        total = np.zeros(k, dtype=np.int64)
        for i in range(a):
            for j in range(b):
                if not v[i, j]:
                    continue
                for i2 in range(a):
                    for j2 in range(b):
                        if w[i2, j2]:
                            total += v[i, j] * w[i2, j2] * pure(c.nm(gn[i], gn[i2]), S.m(gs[j], gs[j2]))
        return reduce(total)

    n = len(elements)
    add = [[reduce(np.array(T.lift(elements[x])) + np.array(T.lift(elements[y]))) if T else 0 for y in range(n)] for x in range(n)]
    action = [[act(s2, e) for e in range(n)] for s2 in range(S.order)]
    module = FiniteModule(S, _frozen(add), _frozen(action), index[elements[0]] if T else 0, tuple(elements), f"{N.name}(x){S.name}")
    nmul = [[mult(x, y) for y in range(n)] for x in range(n)]
    return validate_crossed(S, module, nmul, [fmap(e) for e in range(n)])


def semidirect(R: FiniteRing, N, nmul=None, name: str = "", check=None) -> FiniteRing:
    """
    The ring R + N on R ⊕ N with (r, n)(r', n') = (rr', r.n' + r'.n + nn').

    Args:
        R (FiniteRing): The ring.
        N: A CrossedRing over R, or a FiniteModule with an optional
            multiplication table (zero multiplication when omitted).
        nmul: Multiplication of N when N is a plain module.
        name (str): Display name.

    Returns:
        FiniteRing: Labels are pairs (r, n).

    Raises:
        AxiomViolation: If the data does not give a ring.
    """
    if isinstance(N, CrossedRing):
        nmul = N.nmul
        N = N.module
    if nmul is None:
        nmul = np.full((N.order, N.order), N.zero)
    labels = [(r, n) for r in range(R.order) for n in range(N.order)]
    return ring_from_operations(
        labels,
        lambda u, v: (R.a(u[0], v[0]), N.a(u[1], v[1])),
        lambda u, v: (R.m(u[0], v[0]), N.total([N.s(u[0], v[1]), N.s(v[0], u[1]), int(nmul[u[1], v[1]])])),
        (R.zero, N.zero),
        (R.one, N.zero),
        name or f"{R.name}+{N.name}",
        check=check,
    )


def crossed_from_ideal_pair(S: FiniteRing, J: Ideal, L: Ideal):
    """
    For ideals L ⊆ J of S with J·L = 0: J as a crossed ring over S/L.

    Returns:
        tuple: (crossed ring over S/L, projection S → S/L, positions of J in S).
    """
    for x in J.members:
        for y in L.members:
            if S.m(x, y) != S.zero:
                raise CrossedViolation("J·L = 0", (x, y))
    R, proj = quotient(S, L, f"{S.name}/L")
    members = sorted(J.members)
    pos = {x: i for i, x in enumerate(members)}
    lift = {}
    for s in range(S.order):
        lift.setdefault(proj(s), s)
    add = [[pos[S.a(x, y)] for y in members] for x in members]
    act = [[pos[S.m(lift[r], x)] for x in members] for r in range(R.order)]
    N = FiniteModule(R, _frozen(add), _frozen(act), pos[S.zero], tuple(members), "J")
    nmul = [[pos[S.m(x, y)] for y in members] for x in members]
    f = [proj(x) for x in members]
    return validate_crossed(R, N, nmul, f), proj, members
