"""
Table-driven finite commutative rings, homomorphisms, ideals and modules.

Elements are dense indices 0..n-1. Rings and modules keep full operation tables
as read-only numpy arrays, which lets every ring law be verified exhaustively by
broadcasting over all element tuples.
"""

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .utils.configs import config
from .utils.errors import (
    AxiomViolation,
    NotAnIdeal,
    NotComposable,
    NotSurjective,
    TargetMismatch,
    TooLarge,
)
from .utils.write import emit_log


def _frozen(table) -> np.ndarray:
    arr = np.array(table, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def _first_mismatch(left: np.ndarray, right: np.ndarray):
    bad = np.argwhere(left != right)
    return None if bad.size == 0 else tuple(int(i) for i in bad[0])


class _AdditiveGroup:
    """Shared additive-group helpers for rings and modules."""

    @property
    def order(self) -> int:
        return self.add.shape[0]

    @cached_property
    def neg(self) -> np.ndarray:
        return _frozen(np.argmax(self.add == self.zero, axis=1))

    def a(self, x: int, y: int) -> int:
        return int(self.add[x, y])

    def sub(self, x: int, y: int) -> int:
        return int(self.add[x, self.neg[y]])

    def times(self, k: int, x: int) -> int:
        """k·x for an integer k."""
        if k < 0:
            return self.times(-k, int(self.neg[x]))
        out = self.zero
        for _ in range(k):
            out = int(self.add[out, x])
        return out

    def total(self, xs) -> int:
        out = self.zero
        for x in xs:
            out = int(self.add[out, x])
        return out

    def additive_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.zero:
            y = int(self.add[y, x])
            k += 1
        return k

    def span(self, gens: Sequence[int]) -> List[int]:
        """Elements of the additive subgroup generated by gens."""
        seen = {self.zero}
        frontier = [self.zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.add[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def label(self, x: int):
        return self.labels[x] if self.labels is not None else x

    @cached_property
    def _label_index(self) -> Dict[Hashable, int]:
        if self.labels is None:
            return {i: i for i in range(self.order)}
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label) -> int:
        return self._label_index[label]


@dataclass(frozen=True, eq=False)
class FiniteRing(_AdditiveGroup):
    """A finite commutative unital ring given by operation tables."""

    add: np.ndarray
    mul: np.ndarray
    zero: int
    one: int
    labels: Optional[Tuple] = None
    name: str = ""

    def m(self, x: int, y: int) -> int:
        return int(self.mul[x, y])

    def product(self, xs) -> int:
        out = self.one
        for x in xs:
            out = int(self.mul[out, x])
        return out

    def power(self, x: int, k: int) -> int:
        return self.product([x] * k)

    def scalar(self, k: int) -> int:
        return self.times(k, self.one)

    @cached_property
    def characteristic(self) -> int:
        return self.additive_order(self.one) if self.order > 1 else 1

    def __repr__(self):
        return f"FiniteRing({self.name or '?'}, order={self.order})"


@dataclass(frozen=True, eq=False)
class RingHom:
    source: FiniteRing
    target: FiniteRing
    table: np.ndarray

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def __repr__(self):
        return f"RingHom({self.source.name} -> {self.target.name})"


@dataclass(frozen=True, eq=False)
class FiniteModule(_AdditiveGroup):
    """A finite module over `ring`; act[r, x] is r.x."""

    ring: FiniteRing
    add: np.ndarray
    act: np.ndarray
    zero: int
    labels: Optional[Tuple] = None
    name: str = ""

    def s(self, r: int, x: int) -> int:
        return int(self.act[r, x])

    def __repr__(self):
        return f"FiniteModule({self.name or '?'} over {self.ring.name}, order={self.order})"


@dataclass(frozen=True, eq=False)
class ModuleHom:
    """Additive map between modules, equivariant along ring_map (identity when None)."""

    source: FiniteModule
    target: FiniteModule
    table: np.ndarray
    ring_map: Optional[RingHom] = None

    def __call__(self, x: int) -> int:
        return int(self.table[x])


@dataclass(frozen=True, eq=False)
class Ideal:
    ambient: FiniteRing
    members: frozenset

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, x) -> bool:
        return x in self.members


# validation


def validate_ring(add, mul, zero: int, one: int, labels=None, name: str = "") -> FiniteRing:
    """
    Builds a FiniteRing after verifying every ring law on every element tuple.

    Args:
        add: n×n addition table of element indices.
        mul: n×n multiplication table of element indices.
        zero (int): Index of the additive identity.
        one (int): Index of the multiplicative identity.
        labels: Optional element labels, one per index.
        name (str): Display name.

    Returns:
        FiniteRing: The checked ring.

    Raises:
        AxiomViolation: Naming the first failing law and a witness tuple.
    """
    A = np.array(add, dtype=np.int64)
    M = np.array(mul, dtype=np.int64)
    n = A.shape[0] if A.ndim == 2 else -1
    if A.shape != (n, n) or M.shape != (n, n) or n < 1:
        raise AxiomViolation("shape", (A.shape, M.shape))
    for tag, T in (("additive closure", A), ("multiplicative closure", M)):
        if T.min() < 0 or T.max() >= n:
            raise AxiomViolation(tag, _first_mismatch(T, np.clip(T, 0, n - 1)))
    if not (0 <= zero < n and 0 <= one < n):
        raise AxiomViolation("identities", (zero, one))
    ar = np.arange(n)
    checks = [
        ("additive identity", A[zero], ar),
        ("additive commutativity", A, A.T),
        ("additive inverses", (A == zero).sum(axis=1), np.ones(n, dtype=np.int64)),
        ("additive associativity", A[A[:, :, None], ar[None, None, :]], A[ar[:, None, None], A[None, :, :]]),
        ("multiplicative commutativity", M, M.T),
        ("multiplicative identity", M[one], ar),
        ("multiplicative associativity", M[M[:, :, None], ar[None, None, :]], M[ar[:, None, None], M[None, :, :]]),
        ("distributivity", M[ar[:, None, None], A[None, :, :]], A[M[:, :, None], M[:, None, :]]),
    ]
    for law, left, right in checks:
        witness = _first_mismatch(left, right)
        if witness is not None:
            raise AxiomViolation(law, witness)
    return FiniteRing(_frozen(A), _frozen(M), int(zero), int(one), tuple(labels) if labels is not None else None, name)


def validate_module(ring: FiniteRing, add, act, zero: int, labels=None, name: str = "") -> FiniteModule:
    """Builds a FiniteModule after checking the group and action laws exhaustively."""
    A = np.array(add, dtype=np.int64)
    S = np.array(act, dtype=np.int64)
    m = A.shape[0]
    if A.shape != (m, m) or S.shape != (ring.order, m):
        raise AxiomViolation("shape", (A.shape, S.shape))
    if A.min() < 0 or A.max() >= m or S.min() < 0 or S.max() >= m:
        raise AxiomViolation("closure", None)
    ar = np.arange(m)
    rr = np.arange(ring.order)
    checks = [
        ("additive identity", A[zero], ar),
        ("additive commutativity", A, A.T),
        ("additive inverses", (A == zero).sum(axis=1), np.ones(m, dtype=np.int64)),
        ("additive associativity", A[A[:, :, None], ar[None, None, :]], A[ar[:, None, None], A[None, :, :]]),
        ("unital action", S[ring.one], ar),
        ("action additive in module", S[rr[:, None, None], A[None, :, :]], A[S[:, :, None], S[:, None, :]]),
        ("action additive in ring", S[ring.add[:, :, None], ar[None, None, :]], A[S[:, None, :], S[None, :, :]]),
        ("action associativity", S[ring.mul[:, :, None], ar[None, None, :]], S[rr[:, None, None], S[None, :, :]]),
    ]
    for law, left, right in checks:
        witness = _first_mismatch(left, right)
        if witness is not None:
            raise AxiomViolation(law, witness)
    return FiniteModule(ring, _frozen(A), _frozen(S), int(zero), tuple(labels) if labels is not None else None, name)


def is_ring_hom(source: FiniteRing, target: FiniteRing, table) -> bool:
    t = np.asarray(table, dtype=np.int64)
    if t.shape != (source.order,) or t[source.one] != target.one:
        return False
    if not np.array_equal(t[source.add], target.add[t[:, None], t[None, :]]):
        return False
    return bool(np.array_equal(t[source.mul], target.mul[t[:, None], t[None, :]]))


def ring_hom(source: FiniteRing, target: FiniteRing, table) -> RingHom:
    if not is_ring_hom(source, target, table):
        raise AxiomViolation("ring homomorphism", (source.name, target.name))
    return RingHom(source, target, _frozen(table))


def is_additive(source, target, table) -> bool:
    t = np.asarray(table, dtype=np.int64)
    return t.shape == (source.order,) and bool(np.array_equal(t[source.add], target.add[t[:, None], t[None, :]]))


def module_hom(source: FiniteModule, target: FiniteModule, table, ring_map: Optional[RingHom] = None) -> ModuleHom:
    """Checked ModuleHom; ring_map links the two base rings when they differ."""
    t = np.asarray(table, dtype=np.int64)
    if not is_additive(source, target, t):
        raise AxiomViolation("module map additivity", None)
    if ring_map is None:
        if not same_ring(source.ring, target.ring):
            raise TargetMismatch("modules over different rings need an explicit ring map")
        rm = np.arange(source.ring.order)
    else:
        rm = ring_map.table
    left = t[source.act]
    right = target.act[rm[:, None], t[None, :]]
    witness = _first_mismatch(left, right)
    if witness is not None:
        raise AxiomViolation("module map equivariance", witness)
    return ModuleHom(source, target, _frozen(t), ring_map)


def same_ring(R, S) -> bool:
    if R is S:
        return True
    return (
        R.order == S.order
        and R.zero == S.zero
        and np.array_equal(R.add, S.add)
        and (not hasattr(R, "mul") or (np.array_equal(R.mul, S.mul) and R.one == S.one))
    )


# constructors


def ring_from_operations(labels, add_fn, mul_fn, zero, one, name="", check=None) -> FiniteRing:
    """
    Tabulates a ring from Python operations on hashable element labels.

    Args:
        labels (list): The elements; index i is labels[i].
        add_fn, mul_fn: Binary operations on labels.
        zero, one: Labels of the identities.
        name (str): Display name.
        check (bool): Verify the ring laws; by default only when the order is
            at most config["max_exhaustive_order"].

    Returns:
        FiniteRing: The tabulated ring.
    """
    labels = list(labels)
    n = len(labels)
    if n > config["max_ring_order"]:
        raise TooLarge(f"ring {name} of order {n} exceeds max_ring_order {config['max_ring_order']}")
    index = {lab: i for i, lab in enumerate(labels)}
    add = np.empty((n, n), dtype=np.int64)
    mul = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(labels):
        for j in range(i, n):
            y = labels[j]
            add[i, j] = add[j, i] = index[add_fn(x, y)]
            mul[i, j] = mul[j, i] = index[mul_fn(x, y)]
    if check is None:
        check = n <= config["max_exhaustive_order"]
    if check:
        return validate_ring(add, mul, index[zero], index[one], labels, name)
    emit_log(f"Skipping law check for {name}", f"order {n}", severity="DEBUG")
    return FiniteRing(_frozen(add), _frozen(mul), index[zero], index[one], tuple(labels), name)


def module_from_operations(ring: FiniteRing, labels, add_fn, act_fn, zero, name="", check=True) -> FiniteModule:
    labels = list(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    m = len(labels)
    add = np.array([[index[add_fn(x, y)] for y in labels] for x in labels], dtype=np.int64).reshape(m, m)
    act = np.array([[index[act_fn(r, x)] for x in labels] for r in range(ring.order)], dtype=np.int64).reshape(ring.order, m)
    if check:
        return validate_module(ring, add, act, index[zero], labels, name)
    return FiniteModule(ring, _frozen(add), _frozen(act), index[zero], tuple(labels), name)


def zmod(n: int) -> FiniteRing:
    ar = np.arange(n)
    return validate_ring((ar[:, None] + ar[None, :]) % n, (ar[:, None] * ar[None, :]) % n, 0, 1 % n, name=f"Z/{n}")


def algebra_from_structure(p: int, structure: np.ndarray, name: str = "", labels=None) -> FiniteRing:
    """
    Commutative F_p-algebra with basis e_0 = 1, ..., e_{d-1}.

    Element indices encode coefficient vectors in base p (coefficient of e_k is
    digit k). structure[i, j] is the coefficient vector of e_i·e_j.
    """
    T = np.asarray(structure, dtype=np.int64) % p
    d = T.shape[0]
    n = p**d
    if n > config["max_ring_order"]:
        raise TooLarge(f"algebra {name} of order {n} exceeds max_ring_order")
    weights = p ** np.arange(d)
    E = (np.arange(n)[:, None] // weights[None, :]) % p
    add = ((E[:, None, :] + E[None, :, :]) % p) @ weights
    prod = np.einsum("xi,yj,ijk->xyk", E, E, T) % p
    mul = prod @ weights
    if labels is None:
        labels = [tuple(int(c) for c in row) for row in E]
    check = n <= config["max_exhaustive_order"]
    if check:
        return validate_ring(add, mul, 0, 1, labels, name)
    return FiniteRing(_frozen(add), _frozen(mul), 0, 1, tuple(labels), name)


def _monomial_powers(p: int, poly: Sequence[int]) -> np.ndarray:
    """Coefficient vectors of x^e mod the monic poly (low-to-high coefficients), e < 2·deg."""
    d = len(poly) - 1
    rows = []
    vec = np.zeros(d, dtype=np.int64)
    vec[0] = 1
    for _ in range(2 * d - 1):
        rows.append(vec.copy())
        top = vec[-1]
        shifted = np.concatenate([[0], vec[:-1]])
        vec = (shifted - top * np.asarray(poly[:-1], dtype=np.int64)) % p
    return np.array(rows)


def polynomial_quotient(p: int, polys: Sequence[Sequence[int]], name: str = "") -> FiniteRing:
    """
    F_p[X_1..X_k]/(P_1(X_1), ..., P_k(X_k)) for monic P_i given low-to-high.

    Basis monomials are exponent vectors with e_i < deg P_i, ordered with the
    first variable varying fastest.
    """
    degs = [len(poly) - 1 for poly in polys]
    monos = [tuple(reversed(e)) for e in itertools.product(*[range(d) for d in reversed(degs)])]
    index = {m: i for i, m in enumerate(monos)}
    pows = [_monomial_powers(p, poly) for poly in polys]
    T = np.zeros((len(monos), len(monos), len(monos)), dtype=np.int64)
    for i, a in enumerate(monos):
        for j, b in enumerate(monos):
            vec = {(): 1}
            for v, (ea, eb) in enumerate(zip(a, b)):
                factor = pows[v][ea + eb]
                vec = {k + (e,): c * int(factor[e]) for k, c in vec.items() for e in range(degs[v]) if factor[e]}
            for mono, c in vec.items():
                T[i, j, index[mono]] = (T[i, j, index[mono]] + c) % p
    return algebra_from_structure(p, T, name or f"F{p}[X]/(P)")


def truncated_polynomial(p: int, k: int, name: str = "") -> FiniteRing:
    return polynomial_quotient(p, [[0] * k + [1]], name or f"F{p}[x]/(x^{k})")


def square_zero_ring(p: int, r: int, name: str = "") -> FiniteRing:
    """F_p[x_1..x_r]/(x_1..x_r)^2."""
    T = np.zeros((r + 1, r + 1, r + 1), dtype=np.int64)
    for i in range(r + 1):
        T[0, i, i] = T[i, 0, i] = 1
    return algebra_from_structure(p, T, name or f"F{p}[x1..x{r}]/m^2")


def product_ring(R: FiniteRing, S: FiniteRing, name: str = "") -> FiniteRing:
    """
    R × S, element (x, y) at index x·|S| + y.

    Both factors are already validated, so the order is bounded by
    config["max_product_order"] instead of max_ring_order and the law check
    only runs on small products.

    Raises:
        TooLarge: If |R|·|S| exceeds config["max_product_order"].
    """
    name = name or f"{R.name}x{S.name}"
    n, k = R.order * S.order, S.order
    if n > config["max_product_order"]:
        raise TooLarge(f"product {name} of order {n} exceeds max_product_order {config['max_product_order']}")
    xs, ys = np.divmod(np.arange(n), k)

    def table(a, b):
        return a[xs[:, None], xs[None, :]] * k + b[ys[:, None], ys[None, :]]

    add, mul = table(R.add, S.add), table(R.mul, S.mul)
    labels = tuple(zip(xs.tolist(), ys.tolist()))
    zero, one = R.zero * k + S.zero, R.one * k + S.one
    if n <= config["max_exhaustive_order"]:
        return validate_ring(add, mul, zero, one, labels, name)
    return FiniteRing(_frozen(add), _frozen(mul), zero, one, labels, name)


def dual_numbers(R: FiniteRing, name: str = "") -> FiniteRing:
    """R[ε]/(ε²)."""
    labels = [(x, y) for x in range(R.order) for y in range(R.order)]
    return ring_from_operations(
        labels,
        lambda u, v: (R.a(u[0], v[0]), R.a(u[1], v[1])),
        lambda u, v: (R.m(u[0], v[0]), R.a(R.m(u[0], v[1]), R.m(u[1], v[0]))),
        (R.zero, R.zero),
        (R.one, R.zero),
        name or f"{R.name}[e]",
    )


def zero_ring() -> FiniteRing:
    return validate_ring([[0]], [[0]], 0, 0, name="0")


def finite_field_4() -> FiniteRing:
    return polynomial_quotient(2, [[1, 1, 1]], "F4")


PRESETS: Dict[str, Callable[[], FiniteRing]] = {
    "0": zero_ring,
    "Z2": lambda: zmod(2),
    "Z3": lambda: zmod(3),
    "Z4": lambda: zmod(4),
    "Z8": lambda: zmod(8),
    "Z2xZ2": lambda: product_ring(zmod(2), zmod(2), "Z2xZ2"),
    "F4": finite_field_4,
    "F2[x]/(x^2)": lambda: truncated_polynomial(2, 2, "F2[x]/(x^2)"),
    "F2[x]/(x^3)": lambda: truncated_polynomial(2, 3, "F2[x]/(x^3)"),
    "F2[x]/(x^4)": lambda: truncated_polynomial(2, 4, "F2[x]/(x^4)"),
    "F2[t]/(t^2)": lambda: truncated_polynomial(2, 2, "F2[t]/(t^2)"),
    "F2[t]/(t^3)": lambda: truncated_polynomial(2, 3, "F2[t]/(t^3)"),
    "F2[x,y]/(x^2,xy,y^2)": lambda: square_zero_ring(2, 2, "F2[x,y]/(x^2,xy,y^2)"),
    "F2[x,y]/(x^2,y^2)": lambda: polynomial_quotient(2, [[0, 0, 1], [0, 0, 1]], "F2[x,y]/(x^2,y^2)"),
    "Z4[x]/(x^2)": lambda: dual_numbers(zmod(4), "Z4[x]/(x^2)"),
}


def preset(name: str) -> FiniteRing:
    if name not in PRESETS:
        raise KeyError(f"Unknown ring preset {name}")
    return PRESETS[name]()


# homomorphisms


def identity_hom(R: FiniteRing) -> RingHom:
    return RingHom(R, R, _frozen(np.arange(R.order)))


def compose_homs(first, second):
    """second ∘ first for ring or module maps."""
    if not same_ring(first.target, second.source):
        raise NotComposable(f"{first} then {second}")
    table = _frozen(second.table[first.table])
    if isinstance(first, RingHom):
        return RingHom(first.source, second.target, table)
    ring_map = None
    if first.ring_map is not None or second.ring_map is not None:
        r1 = first.ring_map.table if first.ring_map is not None else np.arange(first.source.ring.order)
        r2 = second.ring_map.table if second.ring_map is not None else np.arange(second.source.ring.order)
        ring_map = RingHom(first.source.ring, second.target.ring, _frozen(r2[r1]))
    return ModuleHom(first.source, second.target, table, ring_map)


def structure_map(source: FiniteRing, target: FiniteRing) -> RingHom:
    """The ring map from a ring generated additively by 1 (some Z/n)."""
    if len(source.span([source.one])) != source.order:
        raise TargetMismatch(f"{source.name} is not generated by 1")
    table = np.zeros(source.order, dtype=np.int64)
    x, y = source.zero, target.zero
    for _ in range(source.order):
        table[x] = y
        x, y = source.a(x, source.one), target.a(y, target.one)
    return ring_hom(source, target, table)


def additive_generators(G, first: Sequence[int] = ()) -> List[int]:
    """Greedy generating set of the additive group, starting from `first`."""
    gens = []
    covered = {G.zero}
    for x in list(first) + list(range(G.order)):
        if x not in covered:
            gens.append(x)
            covered = set(G.span(gens))
        if len(covered) == G.order:
            break
    return gens


def _extend(G, H, table: Dict[int, int], g: int, h: int) -> Optional[Dict[int, int]]:
    """Extend an additive map defined on a subgroup by g ↦ h; None if inconsistent."""
    table = dict(table)
    layer = list(table.items())
    while True:
        nxt = []
        closed = True
        for x, fx in layer:
            y = int(G.add[x, g])
            fy = int(H.add[fx, h])
            if y in table:
                if table[y] != fy:
                    return None
            else:
                closed = False
                table[y] = fy
                nxt.append((y, fy))
        if closed:
            return table
        layer = nxt


def additive_maps(G, H, gens=None, candidates=None, accept=None, limit=None):
    """
    Enumerates additive maps G → H by choosing images of additive generators.

    Args:
        G, H: Additive groups (rings or modules).
        gens (list): Generators of G, by default additive_generators(G).
        candidates (callable): gen ↦ iterable of allowed images (all of H by default).
        accept (callable): Partial-table predicate used for pruning; called
            after each generator with the dict built so far.
        limit (int): Stop after this many maps.

    Yields:
        numpy.ndarray: Complete tables.

    Raises:
        TooLarge: When the search visits more than config["max_candidates"] nodes.
    """
    gens = additive_generators(G) if gens is None else list(gens)
    budget = [config["max_candidates"]]
    found = [0]

    def search(k, table):
        budget[0] -= 1
        if budget[0] < 0:
            raise TooLarge(f"additive map search exceeded max_candidates={config['max_candidates']}")
        if k == len(gens):
            found[0] += 1
            out = np.zeros(G.order, dtype=np.int64)
            for x, y in table.items():
                out[x] = y
            yield out
            return
        options = range(H.order) if candidates is None else candidates(gens[k])
        for h in options:
            ext = _extend(G, H, table, gens[k], h)
            if ext is None or (accept is not None and not accept(ext)):
                continue
            yield from search(k + 1, ext)
            if limit is not None and found[0] >= limit:
                return

    yield from search(0, {G.zero: H.zero})


def _multiplicative_on(R: FiniteRing, S: FiniteRing, table: Dict[int, int]) -> bool:
    keys = list(table)
    for i, x in enumerate(keys):
        for y in keys[i:]:
            xy = int(R.mul[x, y])
            if xy in table and table[xy] != S.m(table[x], table[y]):
                return False
    return True


def ring_homs(R: FiniteRing, S: FiniteRing, candidates=None, limit=None) -> List[RingHom]:
    """All ring homomorphisms R → S (optionally with restricted generator images)."""
    if R.order == 1:
        return [RingHom(R, S, _frozen([S.zero]))] if S.order == 1 else []
    gens = additive_generators(R, first=[R.one])

    def options(g):
        if g == R.one:
            return [S.one]
        return range(S.order) if candidates is None else candidates(g)

    homs = []
    for t in additive_maps(R, S, gens, options, lambda tb: _multiplicative_on(R, S, tb), limit):
        if is_ring_hom(R, S, t):
            homs.append(RingHom(R, S, _frozen(t)))
    return homs


def _profile(R: FiniteRing, x: int):
    nil = R.power(x, R.order) == R.zero
    return (R.additive_order(x), R.m(x, x) == x, nil)


def find_isomorphism(R: FiniteRing, S: FiniteRing) -> Optional[RingHom]:
    """A ring isomorphism R → S found by backtracking over generator images, or None."""
    if R.order != S.order:
        return None
    profiles = {}
    for y in range(S.order):
        profiles.setdefault(_profile(S, y), []).append(y)
    gens = additive_generators(R, first=[R.one])

    def options(g):
        return [S.one] if g == R.one else profiles.get(_profile(R, g), [])

    def accept(tb):
        return len(set(tb.values())) == len(tb) and _multiplicative_on(R, S, tb)

    for t in additive_maps(R, S, gens, options, accept):
        if len(set(t.tolist())) == S.order and is_ring_hom(R, S, t):
            return RingHom(R, S, _frozen(t))
    return None


def is_isomorphic(R: FiniteRing, S: FiniteRing) -> bool:
    return find_isomorphism(R, S) is not None


# kernels, images, quotients


def kernel(h):
    """Kernel of a RingHom (an Ideal) or of a ModuleHom (a submodule with its inclusion)."""
    members = [x for x in range(h.source.order) if h.table[x] == h.target.zero]
    if isinstance(h, RingHom):
        return make_ideal(h.source, members)
    return submodule(h.source, members)


def image(h) -> List[int]:
    return sorted(set(int(v) for v in h.table))


def make_ideal(R: FiniteRing, members) -> Ideal:
    members = frozenset(int(x) for x in members)
    if R.zero not in members:
        raise NotAnIdeal("ideal must contain zero")
    for x in members:
        for y in members:
            if R.a(x, y) not in members:
                raise NotAnIdeal(f"not closed under addition at {(x, y)}")
        for r in range(R.order):
            if R.m(r, x) not in members:
                raise NotAnIdeal(f"does not absorb multiplication at {(r, x)}")
    return Ideal(R, members)


def ideal_generated(R: FiniteRing, gens: Sequence[int]) -> Ideal:
    return make_ideal(R, R.span([R.m(r, g) for g in gens for r in range(R.order)]))


def quotient(R: FiniteRing, K: Ideal, name: str = "") -> Tuple[FiniteRing, RingHom]:
    """
    Coset ring R/K together with the projection.

    Raises:
        NotAnIdeal: If K is not an ideal of R.
    """
    K = make_ideal(R, K.members)
    rep = np.full(R.order, -1, dtype=np.int64)
    reps = []
    for x in range(R.order):
        if rep[x] < 0:
            for k in K.members:
                rep[R.a(x, k)] = len(reps)
            reps.append(x)
    q = len(reps)
    add = np.array([[rep[R.a(reps[i], reps[j])] for j in range(q)] for i in range(q)], dtype=np.int64).reshape(q, q)
    mul = np.array([[rep[R.m(reps[i], reps[j])] for j in range(q)] for i in range(q)], dtype=np.int64).reshape(q, q)
    labels = [R.label(x) for x in reps]
    Q = FiniteRing(_frozen(add), _frozen(mul), int(rep[R.zero]), int(rep[R.one]), tuple(labels), name or f"{R.name}/K")
    return Q, RingHom(R, Q, _frozen(rep))


def factor_through_quotient(h: RingHom) -> RingHom:
    """The injective map R/ker(h) → target induced by h (first isomorphism theorem)."""
    Q, proj = quotient(h.source, kernel(h))
    table = np.zeros(Q.order, dtype=np.int64)
    for x in range(h.source.order):
        table[proj(x)] = h(x)
    return ring_hom(Q, h.target, table)


def fiber_product(f: RingHom, g: RingHom, name: str = "") -> Tuple[FiniteRing, RingHom, RingHom]:
    """
    C ×_E D = {(c, d) : f(c) = g(d)} with componentwise operations and both projections.

    Raises:
        TargetMismatch: If f and g do not share a target.
    """
    if not same_ring(f.target, g.target):
        raise TargetMismatch(f"{f.target.name} vs {g.target.name}")
    C, D = f.source, g.source
    labels = [(c, d) for c in range(C.order) for d in range(D.order) if f(c) == g(d)]
    P = ring_from_operations(
        labels,
        lambda u, v: (C.a(u[0], v[0]), D.a(u[1], v[1])),
        lambda u, v: (C.m(u[0], v[0]), D.m(u[1], v[1])),
        (C.zero, D.zero),
        (C.one, D.one),
        name or f"{C.name}x_{f.target.name}{D.name}",
        check=False,
    )
    p1 = RingHom(P, C, _frozen([lab[0] for lab in labels]))
    p2 = RingHom(P, D, _frozen([lab[1] for lab in labels]))
    return P, p1, p2


def verify_fiber_universal(f: RingHom, g: RingHom, P, p1, p2, T: FiniteRing) -> bool:
    """Every compatible pair of maps from T factors uniquely through the fiber product."""
    for a in ring_homs(T, f.source):
        for b in ring_homs(T, g.source):
            if any(f(a(t)) != g(b(t)) for t in range(T.order)):
                continue
            factors = [u for u in ring_homs(T, P) if np.array_equal(p1.table[u.table], a.table) and np.array_equal(p2.table[u.table], b.table)]
            if len(factors) != 1:
                return False
    return True


# modules


def ring_as_module(R: FiniteRing) -> FiniteModule:
    return FiniteModule(R, R.add, R.mul, R.zero, R.labels, f"{R.name} regular")


def restrict_scalars(M: FiniteModule, h: RingHom) -> FiniteModule:
    """M viewed as a module over h.source."""
    return FiniteModule(h.source, M.add, _frozen(M.act[h.table]), M.zero, M.labels, M.name)


def zero_module(R: FiniteRing) -> FiniteModule:
    return FiniteModule(R, _frozen([[0]]), _frozen(np.zeros((R.order, 1))), 0, None, "0")


def residue_module(R: FiniteRing, h: RingHom) -> FiniteModule:
    """The target ring of h regarded as an R-module (e.g. the residue field)."""
    return restrict_scalars(ring_as_module(h.target), h)


def submodule(M: FiniteModule, members) -> Tuple[FiniteModule, ModuleHom]:
    members = sorted(set(int(x) for x in members))
    pos = {x: i for i, x in enumerate(members)}
    try:
        add = [[pos[M.a(x, y)] for y in members] for x in members]
        act = [[pos[M.s(r, x)] for x in members] for r in range(M.ring.order)]
    except KeyError as e:
        raise NotAnIdeal(f"subset not closed: {e}")
    sub = FiniteModule(M.ring, _frozen(add), _frozen(act), pos[M.zero], tuple(M.label(x) for x in members), f"sub({M.name})")
    return sub, ModuleHom(sub, M, _frozen(members))


def quotient_module(M: FiniteModule, members) -> Tuple[FiniteModule, ModuleHom]:
    members = set(int(x) for x in members)
    rep = np.full(M.order, -1, dtype=np.int64)
    reps = []
    for x in range(M.order):
        if rep[x] < 0:
            for k in members:
                rep[M.a(x, k)] = len(reps)
            reps.append(x)
    q = len(reps)
    add = [[int(rep[M.a(reps[i], reps[j])]) for j in range(q)] for i in range(q)]
    act = [[int(rep[M.s(r, reps[i])]) for i in range(q)] for r in range(M.ring.order)]
    Q = FiniteModule(M.ring, _frozen(add), _frozen(act), int(rep[M.zero]), tuple(M.label(x) for x in reps), f"{M.name}/sub")
    return Q, ModuleHom(M, Q, _frozen(rep))


def direct_sum(M1: FiniteModule, M2: FiniteModule) -> FiniteModule:
    labels = [(x, y) for x in range(M1.order) for y in range(M2.order)]
    return module_from_operations(
        M1.ring,
        labels,
        lambda u, v: (M1.a(u[0], v[0]), M2.a(u[1], v[1])),
        lambda r, u: (M1.s(r, u[0]), M2.s(r, u[1])),
        (M1.zero, M2.zero),
        f"{M1.name}+{M2.name}",
        check=False,
    )


class ElementaryCoordinates:
    """
    F_p-coordinates on an elementary abelian p-group (ring or module).

    Attributes:
        p (int): The prime.
        basis (list): Element indices of the chosen basis.
        vectors (numpy.ndarray): Row x is the coordinate vector of element x.
    """

    def __init__(self, G, first: Sequence[int] = ()):
        self.group = G
        if G.order == 1:
            self.p = 2
        else:
            self.p = min(G.additive_order(x) for x in range(G.order) if x != G.zero)
        if any(G.times(self.p, x) != G.zero for x in range(G.order)):
            raise ValueError(f"{G.name} is not elementary abelian")
        self.basis = additive_generators(G, first)
        d = len(self.basis)
        self.vectors = np.zeros((G.order, d), dtype=np.int64)
        self.lookup = np.zeros(self.p**d, dtype=np.int64)
        self.weights = self.p ** np.arange(d)
        for coeffs in itertools.product(range(self.p), repeat=d):
            x = G.total(G.times(c, b) for c, b in zip(coeffs, self.basis))
            self.vectors[x] = coeffs
            self.lookup[int(np.dot(coeffs, self.weights))] = x

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, x: int) -> np.ndarray:
        return self.vectors[x]

    def element(self, vec) -> int:
        vec = np.asarray(vec, dtype=np.int64) % self.p
        return int(self.lookup[int(np.dot(vec, self.weights))])

    def action_matrix(self, r: int) -> np.ndarray:
        """Matrix of x ↦ r.x for a module (columns are images of basis vectors)."""
        G = self.group
        cols = [self.vectors[G.s(r, b)] for b in self.basis]
        return np.array(cols, dtype=np.int64).reshape(self.dim, self.dim).T if self.dim else np.zeros((0, 0), dtype=np.int64)


# exactness


@dataclass
class ExactnessReport:
    nodes: List[Dict] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return all(node["ok"] for node in self.nodes)

    def failures(self) -> List[Dict]:
        return [node for node in self.nodes if not node["ok"]]


def check_exact(seq, injective_start: bool = True, surjective_end: bool = True) -> ExactnessReport:
    """
    Checks 0 → G_0 → G_1 → ... → G_k → 0 for a list of additive maps.

    Raises:
        NotComposable: If consecutive maps do not share their middle group.
    """
    for first, second in zip(seq, seq[1:]):
        if not same_ring(first.target, second.source):
            raise NotComposable(f"map {first} does not land in the source of {second}")
    report = ExactnessReport()
    if injective_start and seq:
        h = seq[0]
        ker = [x for x in range(h.source.order) if h.table[x] == h.target.zero]
        report.nodes.append({"node": 0, "kind": "injective", "ok": len(ker) == 1, "witness": ker[1:2] or None})
    for k, (first, second) in enumerate(zip(seq, seq[1:]), start=1):
        img = set(int(v) for v in first.table)
        ker = {x for x in range(second.source.order) if second.table[x] == second.target.zero}
        diff = sorted(img ^ ker)
        report.nodes.append({"node": k, "kind": "image=kernel", "ok": not diff, "witness": diff[:1] or None, "image": len(img), "kernel": len(ker)})
    if surjective_end and seq:
        h = seq[-1]
        missing = sorted(set(range(h.target.order)) - set(int(v) for v in h.table))
        report.nodes.append({"node": len(seq), "kind": "surjective", "ok": not missing, "witness": missing[:1] or None})
    return report


# finite sets


def epi_pullback_is_pushout_check(X: Sequence, Y: Sequence, Z: Sequence, fx: Dict, fy: Dict) -> bool:
    """
    Whether the pullback square of two surjections X → Z ← Y is also a pushout.

    Uses the descent criterion: Z must be the quotient of X ⊔ Y by the
    equivalence relation generated by the pairs of X ×_Z Y.

    Raises:
        NotSurjective: If either map misses a point of Z.
    """
    for name, src, fn in (("X", X, fx), ("Y", Y, fy)):
        if set(fn[s] for s in src) != set(Z):
            raise NotSurjective(f"{name} → Z is not surjective")
    nodes = [("X", x) for x in X] + [("Y", y) for y in Y]
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for x in X:
        for y in Y:
            if fx[x] == fy[y]:
                parent[find(("X", x))] = find(("Y", y))
    classes = {}
    for v in nodes:
        z = fx[v[1]] if v[0] == "X" else fy[v[1]]
        classes.setdefault(find(v), set()).add(z)
    return all(len(zs) == 1 for zs in classes.values()) and len(classes) == len(set(Z))
