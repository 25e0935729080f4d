"""
Degree-truncated free commutative algebras A[T] over A = Z or Z/n, and the
comparison map A[Q ×_S R] → A[Q] ×_{A[S]} A[R] for maps of finite sets.

Elements are dicts from monomials (sorted tuples of generator indices) to
coefficients; the coefficient ring is fixed by `modulus` (0 for the integers).
"""

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .linalg import kernel_mod_n, solve_integer
from .utils.configs import config
from .utils.errors import DegreeOverflow, NoMatch, NotSurjective, ShapeMismatch, TooLarge
from .utils.write import emit_log

Monomial = Tuple[int, ...]
Element = Dict[Monomial, int]


@dataclass(frozen=True)
class FiniteSetMap:
    """A total map of finite sets, elements named by hashable labels."""

    source: Tuple[Hashable, ...]
    target: Tuple[Hashable, ...]
    table: Tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.table[x]

    @property
    def surjective(self) -> bool:
        return set(self.table) == set(range(len(self.target)))

    def fiber(self, z: int) -> List[int]:
        return [x for x, v in enumerate(self.table) if v == z]


def set_map(source: Sequence[Hashable], target: Sequence[Hashable], assignment) -> FiniteSetMap:
    """
    Builds a FiniteSetMap from a dict or a list of target labels.

    Raises:
        ShapeMismatch: If the assignment is not total or leaves the target.
    """
    source, target = tuple(source), tuple(target)
    index = {t: i for i, t in enumerate(target)}
    if isinstance(assignment, dict):
        values = [assignment.get(s) for s in source]
    else:
        values = list(assignment)
    if len(values) != len(source) or any(v not in index for v in values):
        raise ShapeMismatch(f"map from {source} to {target} is not total")
    return FiniteSetMap(source, target, tuple(index[v] for v in values))


def constant_map(source: Sequence[Hashable], target: Sequence[Hashable]) -> FiniteSetMap:
    return set_map(source, target, [target[0]] * len(source))


def fiber_set(f: FiniteSetMap, g: FiniteSetMap) -> Tuple[Tuple[Tuple[Hashable, Hashable], ...], FiniteSetMap, FiniteSetMap]:
    """Q ×_S R with both projections; elements are labelled by pairs of labels."""
    if f.target != g.target:
        raise ShapeMismatch("maps do not share a target")
    pairs = [(x, y) for x in range(len(f.source)) for y in range(len(g.source)) if f(x) == g(y)]
    labels = tuple((f.source[x], g.source[y]) for x, y in pairs)
    p1 = FiniteSetMap(labels, f.source, tuple(x for x, _ in pairs))
    p2 = FiniteSetMap(labels, g.source, tuple(y for _, y in pairs))
    return labels, p1, p2


class TruncFreeAlgebra:
    """
    The free commutative algebra on `generators` over Z/modulus, truncated at `degree`.

    Products of degree above the bound raise DegreeOverflow instead of being dropped.
    """

    def __init__(self, generators: Sequence[Hashable], degree: int, modulus: int = 0, name: str = ""):
        self.generators = tuple(generators)
        self.degree = degree
        self.modulus = modulus
        self.name = name or f"A[{','.join(str(g) for g in self.generators)}]"
        self._index = {g: i for i, g in enumerate(self.generators)}

    def monomials(self, d: int) -> List[Monomial]:
        return list(itertools.combinations_with_replacement(range(len(self.generators)), d))

    def basis(self) -> List[Monomial]:
        return [m for d in range(self.degree + 1) for m in self.monomials(d)]

    def _reduce(self, c: int) -> int:
        return c % self.modulus if self.modulus else c

    def element(self, terms) -> Element:
        out: Element = defaultdict(int)
        for mono, c in dict(terms).items():
            mono = tuple(sorted(mono))
            if len(mono) > self.degree:
                raise DegreeOverflow(f"monomial of degree {len(mono)} above bound {self.degree}")
            out[mono] += c
        return {m: self._reduce(c) for m, c in sorted(out.items()) if self._reduce(c)}

    def zero(self) -> Element:
        return {}

    def one(self) -> Element:
        return self.element({(): 1})

    def gen(self, name: Hashable) -> Element:
        return self.element({(self._index[name],): 1})

    def monomial(self, *names) -> Element:
        return self.element({tuple(self._index[n] for n in names): 1})

    def add(self, a: Element, b: Element) -> Element:
        terms = defaultdict(int)
        for src in (a, b):
            for m, c in src.items():
                terms[m] += c
        return self.element(terms)

    def scale(self, k: int, a: Element) -> Element:
        return self.element({m: k * c for m, c in a.items()})

    def sub(self, a: Element, b: Element) -> Element:
        return self.add(a, self.scale(-1, b))

    def mul(self, a: Element, b: Element) -> Element:
        terms = defaultdict(int)
        for (m1, c1), (m2, c2) in itertools.product(a.items(), b.items()):
            terms[m1 + m2] += c1 * c2
        return self.element(terms)

    def homogeneous(self, a: Element, d: int) -> Element:
        return {m: c for m, c in a.items() if len(m) == d}

    def vector(self, a: Element, d: int) -> np.ndarray:
        index = {m: i for i, m in enumerate(self.monomials(d))}
        vec = np.zeros(len(index), dtype=np.int64)
        for m, c in self.homogeneous(a, d).items():
            vec[index[m]] = c
        return vec

    def from_vector(self, vec, d: int) -> Element:
        return self.element({m: int(c) for m, c in zip(self.monomials(d), vec)})

    def pushforward(self, a: Element, h: FiniteSetMap, target: "TruncFreeAlgebra") -> Element:
        """The algebra map induced by h on generators."""
        terms = defaultdict(int)
        for m, c in a.items():
            terms[tuple(sorted(h(i) for i in m))] += c
        return target.element(terms)

    def matrix(self, h: FiniteSetMap, target: "TruncFreeAlgebra", d: int) -> np.ndarray:
        """Matrix of the degree-d part of the pushforward."""
        cols = [target.vector(self.pushforward({m: 1}, h, target), d) for m in self.monomials(d)]
        return np.array(cols, dtype=np.int64).T.reshape(len(target.monomials(d)), len(cols))

    def format(self, a: Element) -> str:
        if not a:
            return "0"
        parts = []
        for m, c in a.items():
            word = "*".join(str(self.generators[i]) for i in m) or "1"
            parts.append(word if c == 1 else f"{c}*{word}")
        return " + ".join(parts)


def _monomial_map(f: FiniteSetMap, d: int) -> FiniteSetMap:
    """The induced map on degree-d monomials."""
    src = list(itertools.combinations_with_replacement(range(len(f.source)), d))
    tgt = list(itertools.combinations_with_replacement(range(len(f.target)), d))
    index = {m: i for i, m in enumerate(tgt)}
    return FiniteSetMap(tuple(src), tuple(tgt), tuple(index[tuple(sorted(f(x) for x in m))] for m in src))


def monoid_fiber_lift(qs: Sequence[int], rs: Sequence[int], f: FiniteSetMap, g: FiniteSetMap) -> Monomial:
    """
    A monomial of (Q ×_S R)^N over the pair (∏ q_i, ∏ r_i).

    After sorting both factors by their image in S the i-th factors match up.

    Raises:
        NoMatch: If the images in S^N differ.
    """
    if sorted(f(q) for q in qs) != sorted(g(r) for r in rs):
        raise NoMatch("monomials have different images in S")
    labels, p1, p2 = fiber_set(f, g)
    index = {(p1(k), p2(k)): k for k in range(len(labels))}
    pending = defaultdict(list)
    for r in sorted(rs):
        pending[g(r)].append(r)
    lifted = [index[(q, pending[f(q)].pop(0))] for q in sorted(qs)]
    return tuple(sorted(lifted))


def module_fiber_lift(x: Dict[int, int], y: Dict[int, int], f: FiniteSetMap, g: FiniteSetMap, modulus: int = 0) -> Dict[Tuple[int, int], int]:
    """
    A preimage in A(X ×_Z Y) of (x, y) ∈ A(X) ×_{A(Z)} A(Y).

    The Y-part is lifted along least-index preimages q(z) first, which leaves
    (x', 0) with f_* x' = 0; that is lifted as Σ x'_u [(u, r(f u)) − (q(f u), r(f u))].

    Raises:
        NotSurjective: If f or g is not surjective.
        NoMatch: If (x, y) is not in the fiber product.
    """
    if not f.surjective or not g.surjective:
        raise NotSurjective("lifting along A(-) needs surjections onto the common target")

    def red(c):
        return c % modulus if modulus else c

    fx, gy = defaultdict(int), defaultdict(int)
    for u, c in x.items():
        fx[f(u)] += c
    for v, c in y.items():
        gy[g(v)] += c
    if any(red(fx[z] - gy[z]) for z in set(fx) | set(gy)):
        raise NoMatch("element is not in the fiber product")
    q_of = {z: min(f.fiber(z)) for z in range(len(f.target))}
    r_of = {z: min(g.fiber(z)) for z in range(len(g.target))}
    out = defaultdict(int)
    rest = defaultdict(int, x)
    for v, c in y.items():
        out[(q_of[g(v)], v)] += c
        rest[q_of[g(v)]] -= c
    for u, c in rest.items():
        r = r_of[f(u)]
        out[(u, r)] += c
        out[(q_of[f(u)], r)] -= c
    lifted = {k: red(c) for k, c in sorted(out.items()) if red(c)}
    back_x, back_y = defaultdict(int), defaultdict(int)
    for (u, v), c in lifted.items():
        back_x[u] += c
        back_y[v] += c
    if any(red(back_x[u] - x.get(u, 0)) for u in set(back_x) | set(x)) or any(red(back_y[v] - y.get(v, 0)) for v in set(back_y) | set(y)):
        raise NoMatch("lift does not project back")
    return lifted


@dataclass
class CoverReport:
    """Degreewise surjectivity of A[Q ×_S R] → A[Q] ×_{A[S]} A[R]."""

    f: FiniteSetMap
    g: FiniteSetMap
    modulus: int
    degree: int
    rows: List[Dict] = field(default_factory=list)

    @property
    def surjective(self) -> bool:
        return all(row["surjective"] for row in self.rows)

    def algebras(self):
        labels, _, _ = fiber_set(self.f, self.g)
        A_Q = TruncFreeAlgebra(self.f.source, self.degree, self.modulus)
        A_R = TruncFreeAlgebra(self.g.source, self.degree, self.modulus)
        A_P = TruncFreeAlgebra(labels, self.degree, self.modulus)
        return A_P, A_Q, A_R

    def lift(self, a: Element, b: Element) -> Element:
        """
        A preimage of (a, b), composed degreewise from the module and monoid lifts.

        Raises:
            DegreeOverflow: If a or b has terms above the degree bound.
        """
        A_P, A_Q, A_R = self.algebras()
        a, b = A_Q.element(a), A_R.element(b)
        out = {}
        for d in range(self.degree + 1):
            fd, gd = _monomial_map(self.f, d), _monomial_map(self.g, d)
            qindex = {m: i for i, m in enumerate(fd.source)}
            rindex = {m: i for i, m in enumerate(gd.source)}
            x = {qindex[m]: c for m, c in A_Q.homogeneous(a, d).items()}
            y = {rindex[m]: c for m, c in A_R.homogeneous(b, d).items()}
            if not x and not y:
                continue
            pairs = module_fiber_lift(x, y, fd, gd, self.modulus)
            terms = {}
            for (u, v), c in pairs.items():
                mono = monoid_fiber_lift(fd.source[u], gd.source[v], self.f, self.g)
                terms[mono] = terms.get(mono, 0) + c
            out = A_P.add(out, A_P.element(terms))
        _, p1, p2 = fiber_set(self.f, self.g)
        if A_P.pushforward(out, p1, A_Q) != a or A_P.pushforward(out, p2, A_R) != b:
            raise NoMatch("lift does not project back")
        return out


def _fiber_generators(fd: FiniteSetMap, gd: FiniteSetMap):
    """Generators of A(X) ×_{A(Z)} A(Y) for surjections onto Z."""
    for u in range(len(fd.source)):
        for v in gd.fiber(fd(u)):
            yield {u: 1}, {v: 1}
    for z in range(len(fd.target)):
        fib = fd.fiber(z)
        for u in fib[1:]:
            yield {u: 1, fib[0]: -1}, {}
        fib = gd.fiber(z)
        for v in fib[1:]:
            yield {}, {v: 1, fib[0]: -1}


def ring_fiber_cover_check(f: FiniteSetMap, g: FiniteSetMap, degree: int, modulus: int = 0) -> CoverReport:
    """
    Verifies degreewise that A[Q ×_S R] → A[Q] ×_{A[S]} A[R] is onto by lifting
    generators of the fiber product and checking both projections.

    Raises:
        NotSurjective: If Q → S or R → S is not surjective.
        TooLarge: If some degree has more than config["max_candidates"] monomials.
    """
    if not f.surjective or not g.surjective:
        raise NotSurjective("both maps to S must be surjective")
    report = CoverReport(f, g, modulus, degree)
    A_P, A_Q, A_R = report.algebras()
    for d in range(degree + 1):
        fd, gd = _monomial_map(f, d), _monomial_map(g, d)
        if len(fd.source) * len(gd.source) > config["max_candidates"]:
            raise TooLarge(f"degree {d} has too many monomial pairs")
        count = 0
        for x, y in _fiber_generators(fd, gd):
            a = A_Q.element({fd.source[u]: c for u, c in x.items()})
            b = A_R.element({gd.source[v]: c for v, c in y.items()})
            report.lift(a, b)
            count += 1
        report.rows.append({"degree": d, "generators": count, "surjective": True})
    emit_log("Cover check", {"Q": len(f.source), "R": len(g.source), "S": len(f.target), "degree": degree}, severity="DEBUG")
    return report


def surjections(n: int, k: int) -> List[Tuple[int, ...]]:
    return [t for t in itertools.product(range(k), repeat=n) if set(t) == set(range(k))]


def cover_sweep(max_size: int = 3, degree: int = 3, modulus: int = 4) -> List[Dict]:
    """ring_fiber_cover_check over every pair of surjections Q, R → S with sets of size ≤ max_size."""
    rows = []
    for s in range(1, max_size + 1):
        S = tuple(f"s{i}" for i in range(s))
        for nq, nr in itertools.product(range(s, max_size + 1), repeat=2):
            Q = tuple(f"q{i}" for i in range(nq))
            R = tuple(f"r{i}" for i in range(nr))
            for tq in surjections(nq, s):
                for tr in surjections(nr, s):
                    f, g = FiniteSetMap(Q, S, tq), FiniteSetMap(R, S, tr)
                    report = ring_fiber_cover_check(f, g, degree, modulus)
                    rows.append({"Q": nq, "R": nr, "S": s, "f": tq, "g": tr, "surjective": report.surjective})
    return rows


def comparison_matrix(f: FiniteSetMap, g: FiniteSetMap, d: int, modulus: int = 0) -> np.ndarray:
    """Degree-d matrix of A[Q ×_S R] → A[Q] ⊕ A[R]."""
    labels, p1, p2 = fiber_set(f, g)
    A_P = TruncFreeAlgebra(labels, d, modulus)
    A_Q = TruncFreeAlgebra(f.source, d, modulus)
    A_R = TruncFreeAlgebra(g.source, d, modulus)
    return np.concatenate([A_P.matrix(p1, A_Q, d), A_P.matrix(p2, A_R, d)], axis=0)


def kernel_dimension(f: FiniteSetMap, g: FiniteSetMap, d: int, p: int) -> int:
    """F_p-dimension of the kernel of the degree-d comparison map."""
    return kernel_mod_n(comparison_matrix(f, g, d, p), p).shape[1]


def kernel_witness_check(Q=("x", "y"), R=("x'", "y'"), S=("t",), modulus: int = 0) -> bool:
    """
    Whether (x, x')(y, y') − (x, y')(y, x') is a nonzero element of
    A[Q ×_S R] mapping to zero in A[Q] ×_{A[S]} A[R], for Q, R → S constant.
    """
    f, g = constant_map(Q, S), constant_map(R, S)
    labels, p1, p2 = fiber_set(f, g)
    A_P = TruncFreeAlgebra(labels, 2, modulus)
    x, y = Q[0], Q[1]
    x2, y2 = R[0], R[1]
    w = A_P.sub(A_P.monomial((x, x2), (y, y2)), A_P.monomial((x, y2), (y, x2)))
    A_Q = TruncFreeAlgebra(Q, 2, modulus)
    A_R = TruncFreeAlgebra(R, 2, modulus)
    maps_to_zero = not A_P.pushforward(w, p1, A_Q) and not A_P.pushforward(w, p2, A_R)
    return bool(w) and maps_to_zero


def fiber_image_witness(f: FiniteSetMap, g: FiniteSetMap, d: int = 1, modulus: int = 0) -> Optional[Tuple[Element, Element]]:
    """
    An element of A[Q] ×_{A[S]} A[R] in degree d outside the image of A[Q ×_S R], or None.

    Works without surjectivity hypotheses, e.g. for Q empty.
    """
    A_Q = TruncFreeAlgebra(f.source, d, modulus)
    A_R = TruncFreeAlgebra(g.source, d, modulus)
    fd, gd = _monomial_map(f, d), _monomial_map(g, d)
    A_S = TruncFreeAlgebra(f.target, d, modulus)
    psi = np.concatenate([A_Q.matrix(f, A_S, d), -A_R.matrix(g, A_S, d)], axis=1)
    phi = comparison_matrix(f, g, d, modulus)
    T = kernel_mod_n(psi, modulus)
    nq = len(fd.source)
    for j in range(T.shape[1]):
        col = T[:, j]
        if solve_integer(phi, col, modulus) is None:
            return A_Q.from_vector(col[:nq], d), A_R.from_vector(col[nq:], d)
    return None


@dataclass
class EqualizerReport:
    rows: List[Dict] = field(default_factory=list)

    @property
    def surjective(self) -> bool:
        return all(row["surjective"] for row in self.rows)


def equalizer_noncover_check(u: FiniteSetMap, v: FiniteSetMap, degree: int, modulus: int = 0) -> EqualizerReport:
    """
    Compares A[Q] for the set equalizer Q of u, v: R ⇉ S with the equalizer of
    A[R] ⇉ A[S], degree by degree, recording a witness when A[Q] does not cover.
    """
    if u.source != v.source or u.target != v.target:
        raise ShapeMismatch("parallel maps must share source and target")
    R = u.source
    Q = [r for r in range(len(R)) if u(r) == v(r)]
    A_R = TruncFreeAlgebra(R, degree, modulus)
    A_S = TruncFreeAlgebra(u.target, degree, modulus)
    report = EqualizerReport()
    for d in range(1, degree + 1):
        diff = A_R.matrix(u, A_S, d) - A_R.matrix(v, A_S, d)
        K = kernel_mod_n(diff, modulus)
        monos = A_R.monomials(d)
        image = np.array([[1 if m == n else 0 for n in monos] for m in monos if all(i in Q for i in m)], dtype=np.int64).T.reshape(len(monos), -1)
        witness = None
        for j in range(K.shape[1]):
            col = K[:, j]
            if solve_integer(image, col, modulus) is None:
                if not modulus and col[np.nonzero(col)[0][0]] < 0:
                    col = -col
                witness = A_R.format(A_R.from_vector(col, d))
                break
        report.rows.append(
            {
                "degree": d,
                "set_equalizer": len(Q),
                "equalizer_generators": int(K.shape[1]),
                "equalizer": [A_R.format(A_R.from_vector(K[:, j], d)) for j in range(K.shape[1])],
                "image_generators": int(image.shape[1]),
                "surjective": witness is None,
                "witness": witness,
            }
        )
    return report
