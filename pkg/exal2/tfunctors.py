"""
Presented algebras B = F_p[x_1..x_n]/I and the three-term Lichtenbaum-Schlessinger
complex L₂ → L₁ → L₀ with T⁰, T¹, T² as cohomology of Hom_B(L, M).

I is given by a user-supplied rewrite system (a Gröbner basis in graded
lexicographic order). L₀ = Ω_P ⊗ B, L₁ = F ⊗ B for F free on the rules, and
L₂ = U/U₀ for the syzygies U of the rules and the Koszul syzygies U₀. U is
generated by the S-pair syzygies; Hom_B(L₂, M) is read off that generating set
subject to the second syzygies found up to the degree bound.
"""

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from .finring import ElementaryCoordinates, FiniteModule, FiniteRing, algebra_from_structure, same_ring
from .linalg import mod_p, nullspace_mod, rank_mod, solve_mod
from .utils.configs import config
from .utils.errors import AxiomViolation, DegreeOverflow, NotConfluent, NotFiniteDimensional, ShapeMismatch, TooLarge
from .utils.write import emit_log

Exps = Tuple[int, ...]
Poly = Dict[Exps, int]


def _clean(poly, p: int) -> Poly:
    return {m: c % p for m, c in sorted(poly.items()) if c % p}


def _add(a: Poly, b: Poly, p: int, k: int = 1) -> Poly:
    out = defaultdict(int, a)
    for m, c in b.items():
        out[m] += k * c
    return _clean(out, p)


def _shift(a: Poly, mono: Exps, c: int, p: int) -> Poly:
    return _clean({tuple(x + y for x, y in zip(m, mono)): c * v for m, v in a.items()}, p)


def _mul(a: Poly, b: Poly, p: int) -> Poly:
    out: Poly = {}
    for m, c in b.items():
        out = _add(out, _shift(a, m, c, p), p)
    return out


def _divides(m: Exps, n: Exps) -> bool:
    return all(x <= y for x, y in zip(m, n))


def _grlex(m: Exps):
    return (sum(m), m)


def _lcm(m: Exps, n: Exps) -> Exps:
    return tuple(max(x, y) for x, y in zip(m, n))


def _quo(n: Exps, m: Exps) -> Exps:
    return tuple(y - x for x, y in zip(m, n))


@dataclass
class PresentedAlgebra:
    """
    F_p[generators]/(rules), with rules lhs → rhs and lhs the grlex-leading monomial.

    Attributes:
        relations (list): Further polynomials of the ideal; each must reduce to zero.
        degree_bound (int): Degree up to which second syzygies are searched.
    """

    p: int
    generators: Tuple[str, ...]
    rules: List[Tuple[Exps, Poly]]
    relations: List[Poly] = field(default_factory=list)
    degree_bound: int = 4
    name: str = ""
    _ring: Optional[FiniteRing] = field(default=None, init=False, repr=False)
    _monos: List[Exps] = field(default_factory=list, init=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.generators)

    def rule_polys(self) -> List[Poly]:
        return [_add({lhs: 1}, rhs, self.p, -1) for lhs, rhs in self.rules]

    def reduce(self, poly: Poly) -> Tuple[Poly, List[Poly]]:
        """Normal form and quotients: poly = Σ q_j g_j + normal form."""
        p = self.p
        g = self.rule_polys()
        poly = _clean(poly, p)
        quotients: List[Poly] = [{} for _ in self.rules]
        normal: Poly = {}
        while poly:
            lead = max(poly, key=_grlex)
            c = poly[lead]
            for j, (lhs, _) in enumerate(self.rules):
                if _divides(lhs, lead):
                    q = _quo(lead, lhs)
                    quotients[j] = _add(quotients[j], {q: c}, p)
                    poly = _add(poly, _shift(g[j], q, c, p), p, -1)
                    break
            else:
                normal[lead] = c
                del poly[lead]
        return _clean(normal, p), quotients

    def normal_form(self, poly: Poly) -> Poly:
        return self.reduce(poly)[0]

    def standard_monomials(self) -> List[Exps]:
        bounds = []
        for i in range(self.n):
            powers = [lhs[i] for lhs, _ in self.rules if sum(lhs) == lhs[i] and lhs[i] > 0]
            bounds.append(min(powers))
        monos = [m for m in itertools.product(*[range(b) for b in bounds]) if not any(_divides(lhs, m) for lhs, _ in self.rules)]
        return sorted(monos, key=_grlex)

    def ring(self) -> FiniteRing:
        """B as a tabulated F_p-algebra on the standard monomials."""
        if self._ring is None:
            monos = self.standard_monomials()
            index = {m: i for i, m in enumerate(monos)}
            T = np.zeros((len(monos),) * 3, dtype=np.int64)
            for (i, a), (j, b) in itertools.product(enumerate(monos), repeat=2):
                for m, c in self.normal_form({tuple(x + y for x, y in zip(a, b)): 1}).items():
                    T[i, j, index[m]] = c
            labels = [format_poly({m: 1}, self.generators) for m in monos]
            self._ring = algebra_from_structure(self.p, T, self.name or "B", labels)
            self._monos = monos
        return self._ring

    def element(self, poly: Poly) -> int:
        """Index in ring() of the class of poly."""
        self.ring()
        nf = self.normal_form(poly)
        return int(sum(nf.get(m, 0) * self.p**k for k, m in enumerate(self._monos)))


def format_poly(poly: Poly, names: Sequence[str]) -> str:
    if not poly:
        return "0"
    parts = []
    for m, c in sorted(poly.items(), key=lambda t: _grlex(t[0]), reverse=True):
        word = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e) or "1"
        parts.append(word if c == 1 else f"{c}*{word}")
    return " + ".join(parts)


def parse_poly(text: str, generators: Sequence[str], p: int) -> Poly:
    """Parses a polynomial with sympy, reducing coefficients mod p."""
    expr = sympy.sympify(text.replace("^", "**"))
    if not generators:
        return _clean({(): int(expr)}, p)
    poly = sympy.Poly(expr, *sympy.symbols(list(generators)))
    return _clean({tuple(int(e) for e in m): int(c) for m, c in poly.terms()}, p)


def presentation(p: int, generators: Sequence[str], rules: Sequence[str], relations: Sequence[str] = (), degree_bound: int = 4, name: str = "") -> PresentedAlgebra:
    """
    Builds and verifies a presentation from rules written "lhs -> rhs".

    Raises:
        NotConfluent: If a rule is not oriented, an S-pair does not reduce to
            zero or a relation is not in the ideal.
        NotFiniteDimensional: If some generator has no pure-power rule.
    """
    if not sympy.isprime(p):
        raise ShapeMismatch("presentations are over prime fields")
    generators = tuple(generators)
    parsed = []
    for text in rules:
        left, right = (s.strip() for s in text.split("->"))
        lhs = parse_poly(left, generators, p)
        if len(lhs) != 1 or list(lhs.values())[0] != 1:
            raise NotConfluent(f"left side of {text} must be a monic monomial")
        lead = next(iter(lhs))
        rhs = parse_poly(right, generators, p)
        if any(_grlex(m) >= _grlex(lead) for m in rhs):
            raise NotConfluent(f"rule {text} is not oriented by grlex")
        parsed.append((lead, rhs))
    P = PresentedAlgebra(p, generators, parsed, [parse_poly(r, generators, p) for r in relations], degree_bound, name)
    verify_presentation(P)
    return P


def verify_presentation(P: PresentedAlgebra):
    for i in range(P.n):
        if not any(sum(lhs) == lhs[i] > 0 for lhs, _ in P.rules):
            raise NotFiniteDimensional(f"no pure-power rule for {P.generators[i]}")
    for s_poly, (j, k) in _s_pairs(P):
        if P.normal_form(s_poly):
            raise NotConfluent(f"overlap of rules {j} and {k} does not resolve")
    for rel in P.relations:
        if P.normal_form(rel):
            raise NotConfluent(f"relation {format_poly(rel, P.generators)} does not reduce to zero")


def _s_pairs(P: PresentedAlgebra):
    g = P.rule_polys()
    for j, k in itertools.combinations(range(len(P.rules)), 2):
        lj, lk = P.rules[j][0], P.rules[k][0]
        L = _lcm(lj, lk)
        yield _add(_shift(g[j], _quo(L, lj), 1, P.p), _shift(g[k], _quo(L, lk), 1, P.p), P.p, -1), (j, k)


# vectors of polynomials (elements of F = P^m)

Vec = List[Poly]


def _monomials_upto(n: int, d: int) -> List[Exps]:
    return sorted((m for m in itertools.product(range(d + 1), repeat=n) if sum(m) <= d), key=_grlex)


def _span_coefficients(P: PresentedAlgebra, gens: Sequence[Vec], target: Optional[Vec], degree: int):
    """
    Linear algebra over F_p for Σ c_a gens_a (= target, or = 0 when target is None)
    with deg c_a ≤ degree. Returns the solution space as lists of coefficient polynomials.
    """
    p = P.p
    monos = _monomials_upto(P.n, degree)
    unknowns = [(a, mono) for a in range(len(gens)) for mono in monos]
    if len(unknowns) > config["max_candidates"]:
        raise TooLarge("second syzygy search exceeds max_candidates")
    rows: Dict[Tuple[int, Exps], int] = {}
    cols = []
    for a, mono in unknowns:
        col = {}
        for j, comp in enumerate(gens[a]):
            for m, c in _shift(comp, mono, 1, p).items():
                col[(j, m)] = c
                rows.setdefault((j, m), len(rows))
        cols.append(col)
    if target is not None:
        for j, comp in enumerate(target):
            for m in comp:
                rows.setdefault((j, m), len(rows))
    A = np.zeros((len(rows), len(unknowns)), dtype=np.int64)
    for k, col in enumerate(cols):
        for key, c in col.items():
            A[rows[key], k] = c

    def unpack(vec):
        coeffs: List[Poly] = [{} for _ in gens]
        for (a, mono), c in zip(unknowns, vec):
            if c % p:
                coeffs[a] = _add(coeffs[a], {mono: int(c)}, p)
        return coeffs

    if target is None:
        K = nullspace_mod(A, p) if A.size else np.eye(len(unknowns), dtype=np.int64)
        return [unpack(K[:, k]) for k in range(K.shape[1])]
    b = np.zeros(len(rows), dtype=np.int64)
    for j, comp in enumerate(target):
        for m, c in comp.items():
            b[rows[(j, m)]] = c
    x = solve_mod(A, b, p) if A.size else (np.zeros(len(unknowns), dtype=np.int64) if not b.any() else None)
    return None if x is None else unpack(x)


@dataclass
class LSComplex:
    """
    L₂ → L₁ → L₀ for a presentation, with the choices that define it.

    Attributes:
        jacobian (list): jacobian[j][i] is ∂g_j/∂x_i in B (element indices).
        syzygies (list): S-pair syzygies generating U, as vectors in P^m.
        koszul (list): Koszul syzygies generating U₀.
        relations (list): Rows of B-coefficients c with Σ c_a φ(σ_a) = 0 for every
            φ ∈ Hom_B(L₂, M): second syzygies and Koszul expressions.
    """

    presentation: PresentedAlgebra
    B: FiniteRing
    jacobian: List[List[int]]
    syzygies: List[Vec]
    koszul: List[Vec]
    relations: List[List[int]]

    @property
    def ranks(self) -> Tuple[int, int, int]:
        return len(self.syzygies), len(self.presentation.rules), self.presentation.n

    def d2(self) -> List[List[int]]:
        """d₂ as B-entries: row a is the image of σ_a in F ⊗ B."""
        P = self.presentation
        return [[P.element(comp) for comp in sigma] for sigma in self.syzygies]


def _derivative(poly: Poly, i: int, p: int) -> Poly:
    out = {}
    for m, c in poly.items():
        if m[i]:
            out[tuple(e - (k == i) for k, e in enumerate(m))] = c * m[i]
    return _clean(out, p)


def build_ls_complex(P: PresentedAlgebra) -> LSComplex:
    """
    Raises:
        AxiomViolation: If d₁∘d₂ ≠ 0.
    """
    verify_presentation(P)
    p, B = P.p, P.ring()
    g = P.rule_polys()
    m = len(g)
    jacobian = [[P.element(_derivative(gj, i, p)) for i in range(P.n)] for gj in g]
    syzygies = []
    for s_poly, (j, k) in _s_pairs(P):
        _, quotients = P.reduce(s_poly)
        L = _lcm(P.rules[j][0], P.rules[k][0])
        sigma = [_add({}, q, p, -1) for q in quotients]
        sigma[j] = _add(sigma[j], {_quo(L, P.rules[j][0]): 1}, p)
        sigma[k] = _add(sigma[k], {_quo(L, P.rules[k][0]): 1}, p, -1)
        syzygies.append(sigma)
    koszul = []
    for j, k in itertools.combinations(range(m), 2):
        kappa: Vec = [{} for _ in range(m)]
        kappa[j] = g[k]
        kappa[k] = _add({}, g[j], p, -1)
        koszul.append(kappa)
    relations = []
    if syzygies:
        for coeffs in _span_coefficients(P, syzygies, None, P.degree_bound):
            relations.append([P.element(c) for c in coeffs])
        for kappa in koszul:
            coeffs = _span_coefficients(P, syzygies, kappa, P.degree_bound)
            if coeffs is None:
                raise DegreeOverflow("Koszul syzygy not reached within the degree bound")
            relations.append([P.element(c) for c in coeffs])
    complex_ = LSComplex(P, B, jacobian, syzygies, koszul, relations)
    for a, row in enumerate(complex_.d2()):
        for i in range(P.n):
            total = B.total(B.m(row[j], jacobian[j][i]) for j in range(m))
            if total != B.zero:
                raise AxiomViolation("d1 after d2 is zero", (a, i))
    emit_log("Built LS complex", {"algebra": B.name, "ranks": complex_.ranks, "relations": len(relations)}, severity="DEBUG")
    return complex_


def _block(mats, rows: List[List[int]]) -> np.ndarray:
    """Block matrix of B-entries acting on M through the action matrices."""
    if not rows or not rows[0]:
        return np.zeros((0, 0), dtype=np.int64)
    return np.block([[mats[b] for b in row] for row in rows])


def t_dimensions(L: LSComplex, M: FiniteModule) -> Tuple[int, int, int]:
    """F_p-dimensions of T⁰, T¹, T² with coefficients in M."""
    if not same_ring(M.ring, L.B):
        raise ShapeMismatch("M must be a module over the presented algebra")
    Mc = ElementaryCoordinates(M)
    p, d = L.presentation.p, Mc.dim
    if M.order > 1 and Mc.p != p:
        raise ShapeMismatch("M must be an F_p-vector space")
    mats = [Mc.action_matrix(b) for b in range(L.B.order)]
    s, m, n = L.ranks
    # Hom(L0, M) = M^n → Hom(L1, M) = M^m → Hom(L2, M) ⊆ M^s
    d1 = _block(mats, L.jacobian) if m and n else np.zeros((m * d, n * d), dtype=np.int64)
    d2 = _block(mats, L.d2()) if s and m else np.zeros((s * d, m * d), dtype=np.int64)
    C = _block(mats, L.relations) if L.relations and s else np.zeros((0, s * d), dtype=np.int64)
    r1 = rank_mod(d1, p)
    r2 = rank_mod(d2, p)
    hom2 = s * d - rank_mod(C, p)
    if C.size and d2.size and mod_p(C @ d2, p).any():
        raise AxiomViolation("image of d2 satisfies the L2 relations", None)
    return int(n * d - r1), int(m * d - r2 - r1), int(hom2 - r2)


def t_functor(P: PresentedAlgebra, M: FiniteModule, degree: int) -> int:
    """
    dim T^degree(B/F_p, M) for degree 0, 1 or 2.

    Raises:
        ShapeMismatch: For other degrees.
    """
    if degree not in (0, 1, 2):
        raise ShapeMismatch("only T0, T1 and T2 are computed")
    return t_dimensions(build_ls_complex(P), M)[degree]


PRESENTATIONS = {
    "F2": lambda: presentation(2, [], [], name="F2"),
    "F2[x]/(x^2)": lambda: presentation(2, ["x"], ["x^2 -> 0"], name="F2[x]/(x^2)"),
    "F2[x]/(x^3)": lambda: presentation(2, ["x"], ["x^3 -> 0"], name="F2[x]/(x^3)"),
    "F2[x,y]/(x^2,xy,y^2)": lambda: presentation(2, ["x", "y"], ["x^2 -> 0", "x*y -> 0", "y^2 -> 0"], name="F2[x,y]/(x^2,xy,y^2)"),
    "F2[x,y]/(x^2,y^2)": lambda: presentation(2, ["x", "y"], ["x^2 -> 0", "y^2 -> 0"], name="F2[x,y]/(x^2,y^2)"),
    "F4": lambda: presentation(2, ["x"], ["x^2 -> x + 1"], name="F4"),
}


def preset_presentation(name: str) -> PresentedAlgebra:
    if name not in PRESENTATIONS:
        raise KeyError(f"Unknown presentation {name}")
    return PRESENTATIONS[name]()
