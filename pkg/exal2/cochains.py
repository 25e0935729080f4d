"""
Factor sets of square-zero extensions as F_p-linear unknowns.

An extension 0 → M → E → R → 0 of G-algebras is written on R × M through a
normalized section σ (σ(0) = 0, σ(1) = 1):

    (r, m) + (r', m') = (r + r', m + m' + c+(r, r'))
    (r, m)(r', m')    = (rr', r.m' + r'.m + c×(r, r'))
    G-structure       t ↦ (s(t), λ(t))

With M elementary abelian every condition on (c+, c×, λ) is F_p-affine, so
classification reduces to solving affine systems over F_p. Two regimes exist:
the general one keeps one unknown per element (pair), and the linear one,
valid when the ground ring has prime characteristic, takes σ F_p-linear on a
basis starting with 1, which forces c+ = 0 and c× bilinear.
"""

import itertools
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

import numpy as np

from .finring import ElementaryCoordinates, FiniteModule, FiniteRing, RingHom
from .linalg import QuotientSpace, column_space_mod, mod_p, nullspace_mod, solve_mod
from .utils.configs import config
from .utils.errors import TooLarge


class Form:
    """An M-valued affine expression: Σ matrix·unknown + constant."""

    __slots__ = ("d", "terms", "const")

    def __init__(self, d: int, terms: Optional[Dict[Hashable, np.ndarray]] = None, const: Optional[np.ndarray] = None):
        self.d = d
        self.terms = terms or {}
        self.const = const if const is not None else np.zeros(d, dtype=np.int64)

    @classmethod
    def unknown(cls, key, d: int) -> "Form":
        return cls(d, {key: np.eye(d, dtype=np.int64)})

    @classmethod
    def constant(cls, vec, d: int) -> "Form":
        return cls(d, None, np.asarray(vec, dtype=np.int64).reshape(d))

    def __add__(self, other: "Form") -> "Form":
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return Form(self.d, terms, self.const + other.const)

    def __neg__(self) -> "Form":
        return Form(self.d, {k: -v for k, v in self.terms.items()}, -self.const)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, k: int) -> "Form":
        if k == 1:
            return self
        return Form(self.d, {key: k * v for key, v in self.terms.items()}, k * self.const)

    def act(self, mat: np.ndarray) -> "Form":
        return Form(self.d, {k: mat @ v for k, v in self.terms.items()}, mat @ self.const)

    def evaluate(self, values: Dict[Hashable, np.ndarray], p: int) -> np.ndarray:
        out = self.const.copy()
        for k, v in self.terms.items():
            out = out + v @ values[k]
        return mod_p(out, p)


def total(forms: Iterable[Form], d: int) -> Form:
    out = Form(d)
    for f in forms:
        out = out + f
    return out


class AffineSystem:
    """
    Equations Σ A_k x_k + c = 0 over F_p in M-valued unknowns x_k.

    Columns are laid out in the order of `keys`, d coordinates per key.
    """

    def __init__(self, p: int, d: int, keys: List[Hashable]):
        self.p = p
        self.d = d
        self.keys = list(keys)
        self.column = {k: i for i, k in enumerate(self.keys)}
        self.rows: List[Form] = []
        self.inconsistent = False

    def require(self, form: Form):
        """Adds form == 0."""
        terms = {k: mod_p(v, self.p) for k, v in form.terms.items()}
        terms = {k: v for k, v in terms.items() if v.any()}
        const = mod_p(form.const, self.p)
        if not terms:
            if const.any():
                self.inconsistent = True
            return
        for k in terms:
            if k not in self.column:
                raise KeyError(f"unknown {k} was not declared")
        self.rows.append(Form(self.d, terms, const))

    @property
    def width(self) -> int:
        return len(self.keys) * self.d

    def matrix(self) -> Tuple[np.ndarray, np.ndarray]:
        d = self.d
        A = np.zeros((len(self.rows) * d, self.width), dtype=np.int64)
        b = np.zeros(len(self.rows) * d, dtype=np.int64)
        for r, form in enumerate(self.rows):
            for k, v in form.terms.items():
                c = self.column[k] * d
                A[r * d : (r + 1) * d, c : c + d] = v
            b[r * d : (r + 1) * d] = -form.const
        return mod_p(A, self.p), mod_p(b, self.p)

    def values(self, vector: np.ndarray) -> Dict[Hashable, np.ndarray]:
        d = self.d
        return {k: vector[i * d : (i + 1) * d] for i, k in enumerate(self.keys)}

    def vector(self, values: Dict[Hashable, np.ndarray]) -> np.ndarray:
        out = np.zeros(self.width, dtype=np.int64)
        for i, k in enumerate(self.keys):
            if k in values:
                out[i * self.d : (i + 1) * self.d] = values[k]
        return out

    def solve(self) -> Optional[np.ndarray]:
        """One solution vector, or None when the system is inconsistent."""
        if self.inconsistent:
            return None
        if self.width == 0:
            return np.zeros(0, dtype=np.int64)
        A, b = self.matrix()
        if A.shape[0] == 0:
            return np.zeros(self.width, dtype=np.int64)
        return solve_mod(A, b, self.p)

    def nullspace(self) -> np.ndarray:
        """Basis (columns) of the homogeneous solution space."""
        if self.width == 0:
            return np.zeros((0, 0), dtype=np.int64)
        A, _ = self.matrix()
        if A.shape[0] == 0:
            return np.eye(self.width, dtype=np.int64)
        return nullspace_mod(A, self.p)


class FunctionUnknown:
    """
    An M-valued unknown function on an additive group, zero on `fixed`.

    With coordinates the function is F_p-linear and keyed by basis index;
    otherwise it has one key per element.
    """

    def __init__(self, tag: str, d: int, group, coords: Optional[ElementaryCoordinates] = None, fixed: Iterable[int] = ()):
        self.tag = tag
        self.d = d
        self.group = group
        self.coords = coords
        fixed = set(fixed) | {group.zero}
        if coords is None:
            self._points = [((tag, x), x) for x in range(group.order) if x not in fixed]
        else:
            self._points = [((tag, k), b) for k, b in enumerate(coords.basis) if b not in fixed]
        self._keyed = {key: x for key, x in self._points}

    def keys(self) -> List[Hashable]:
        return [key for key, _ in self._points]

    def points(self) -> List[Tuple[Hashable, int]]:
        return list(self._points)

    def __call__(self, x: int) -> Form:
        if self.coords is None:
            key = (self.tag, x)
            return Form.unknown(key, self.d) if key in self._keyed else Form(self.d)
        vec = self.coords.coords(x)
        terms = {}
        for k, c in enumerate(vec):
            key = (self.tag, k)
            if c and key in self._keyed:
                terms[key] = int(c) * np.eye(self.d, dtype=np.int64)
        return Form(self.d, terms)


class PairUnknown:
    """Symmetric M-valued unknown on pairs of ring elements, zero when either argument is fixed."""

    def __init__(self, tag: str, d: int, ring: FiniteRing, coords: Optional[ElementaryCoordinates] = None, fixed: Iterable[int] = ()):
        self.tag = tag
        self.d = d
        self.ring = ring
        self.coords = coords
        fixed = set(fixed) | {ring.zero}
        if coords is None:
            free = [x for x in range(ring.order) if x not in fixed]
            self._points = [((tag, x, y), (x, y)) for i, x in enumerate(free) for y in free[i:]]
        else:
            free = [k for k, b in enumerate(coords.basis) if b not in fixed]
            self._points = [((tag, i, j), (coords.basis[i], coords.basis[j])) for n, i in enumerate(free) for j in free[n:]]
        self._keyed = {key for key, _ in self._points}

    def keys(self) -> List[Hashable]:
        return [key for key, _ in self._points]

    def points(self):
        return list(self._points)

    def __call__(self, x: int, y: int) -> Form:
        if self.coords is None:
            key = (self.tag, min(x, y), max(x, y))
            return Form.unknown(key, self.d) if key in self._keyed else Form(self.d)
        vx, vy = self.coords.coords(x), self.coords.coords(y)
        terms = {}
        for i in np.nonzero(vx)[0]:
            for j in np.nonzero(vy)[0]:
                key = (self.tag, min(i, j), max(i, j))
                if key in self._keyed:
                    coef = int(vx[i]) * int(vy[j])
                    terms[key] = terms.get(key, 0) + coef * np.eye(self.d, dtype=np.int64)
        return Form(self.d, terms)


class SectionData:
    """
    Factor-set data of a concrete extension read through a normalized section.

    Args:
        E (FiniteRing): The middle ring.
        proj (RingHom): E → R, surjective.
        emb (numpy.ndarray): Table M → E, injective onto the kernel of proj.
        Mc (ElementaryCoordinates): Coordinates on M.
        Rc (ElementaryCoordinates): Coordinates on R for a linear section, or None.
        alpha (RingHom): Optional ground structure G → E.
    """

    def __init__(self, E: FiniteRing, proj: RingHom, emb, Mc: ElementaryCoordinates, Rc: Optional[ElementaryCoordinates] = None, alpha: Optional[RingHom] = None):
        self.E = E
        self.proj = proj
        self.Mc = Mc
        self.alpha = alpha
        R = proj.target
        self.e_inv = {int(q): m for m, q in enumerate(emb)}
        lifts = {}
        for q in range(E.order):
            lifts.setdefault(proj(q), q)
        lifts[R.zero] = E.zero
        lifts[R.one] = E.one
        if Rc is None:
            self.section = np.array([lifts[r] for r in range(R.order)], dtype=np.int64)
        else:
            images = [lifts[b] for b in Rc.basis]
            images[0] = E.one if Rc.basis[0] == R.one else images[0]
            self.section = np.array(
                [E.total(E.times(int(c), q) for c, q in zip(Rc.coords(r), images)) for r in range(R.order)],
                dtype=np.int64,
            )

    def sigma(self, r: int) -> int:
        return int(self.section[r])

    def defect(self, q: int, r: int) -> np.ndarray:
        """Coordinates of q − σ(r), which must lie in M."""
        return self.Mc.coords(self.e_inv[self.E.sub(q, self.sigma(r))])

    def cp(self, x: int, y: int) -> np.ndarray:
        E, R = self.E, self.proj.target
        return self.defect(E.a(self.sigma(x), self.sigma(y)), R.a(x, y))

    def cm(self, x: int, y: int) -> np.ndarray:
        E, R = self.E, self.proj.target
        return self.defect(E.m(self.sigma(x), self.sigma(y)), R.m(x, y))

    def lam(self, t: int, s: RingHom) -> np.ndarray:
        return self.defect(self.alpha(t), s(t))


class FactorSetModel:
    """
    Unknown factor sets of extensions of R by an R-module M over a ground map G → R.

    Args:
        R (FiniteRing): The ring being extended.
        M (FiniteModule): An elementary abelian R-module.
        ground (RingHom): The structure map G → R, or None for plain rings.
        linear (bool): Use the F_p-linear regime; by default chosen when G
            has prime characteristic.
        tag (str): Prefix distinguishing several models in one system.
    """

    def __init__(self, R: FiniteRing, M: FiniteModule, ground: Optional[RingHom] = None, linear: Optional[bool] = None, tag: str = ""):
        self.R = R
        self.M = M
        self.ground = ground
        self.Mc = ElementaryCoordinates(M)
        self.p = self.Mc.p
        self.d = self.Mc.dim
        if linear is None:
            linear = ground is not None and ground.source.characteristic == self.p
        self.linear = linear
        self.Rc = ElementaryCoordinates(R, first=[R.one]) if linear else None
        G = ground.source if ground is not None else None
        self.Gc = ElementaryCoordinates(G, first=[G.one]) if (linear and G is not None) else None
        self.mats = [self.Mc.action_matrix(r) for r in range(R.order)]
        d = self.d
        self.cp = None if linear else PairUnknown(tag + "c+", d, R, None)
        self.cm = PairUnknown(tag + "cx", d, R, self.Rc, fixed=[R.one])
        self.lam = FunctionUnknown(tag + "lam", d, G, self.Gc, fixed=[G.one]) if G is not None else None
        n_keys = len(self.keys())
        if n_keys * d > config["max_candidates"]:
            raise TooLarge(f"factor-set model with {n_keys} unknown blocks exceeds max_candidates")

    def keys(self) -> List[Hashable]:
        keys = [] if self.cp is None else self.cp.keys()
        keys = keys + self.cm.keys()
        if self.lam is not None:
            keys = keys + self.lam.keys()
        return keys

    def plus(self, x: int, y: int) -> Form:
        return Form(self.d) if self.cp is None else self.cp(x, y)

    def times(self, x: int, y: int) -> Form:
        return self.cm(x, y)

    def h_unknown(self, tag: str = "h") -> FunctionUnknown:
        return FunctionUnknown(tag, self.d, self.R, self.Rc, fixed=[self.R.one])

    def ring_points(self) -> List[int]:
        return list(self.Rc.basis) if self.linear else list(range(self.R.order))

    def ground_points(self) -> List[int]:
        if self.ground is None:
            return []
        G = self.ground.source
        return list(self.Gc.basis) if self.linear else list(range(G.order))

    def add_conditions(self, system: AffineSystem):
        """Associativity, distributivity and the ground-structure laws."""
        R, mats = self.R, self.mats
        pts = self.ring_points()
        for x, y, z in itertools.product(pts, repeat=3):
            xy, yz = R.m(x, y), R.m(y, z)
            system.require(self.times(x, y).act(mats[z]) + self.times(xy, z) - self.times(y, z).act(mats[x]) - self.times(x, yz))
            if self.linear:
                continue
            system.require(self.plus(x, y) + self.plus(R.a(x, y), z) - self.plus(y, z) - self.plus(x, R.a(y, z)))
            system.require(
                self.plus(x, y).act(mats[z])
                + self.times(R.a(x, y), z)
                - self.times(x, z)
                - self.times(y, z)
                - self.plus(R.m(x, z), R.m(y, z))
            )
        if self.ground is None:
            return
        G, s = self.ground.source, self.ground
        gpts = self.ground_points()
        for t, u in itertools.product(gpts, repeat=2):
            st, su = s(t), s(u)
            if not self.linear:
                system.require(self.lam(G.a(t, u)) - self.lam(t) - self.lam(u) - self.plus(st, su))
            system.require(self.lam(G.m(t, u)) - self.lam(u).act(mats[st]) - self.lam(t).act(mats[su]) - self.times(st, su))

    def coboundaries(self, h: FunctionUnknown) -> Dict[Hashable, Form]:
        """The change of every factor-set unknown under σ ↦ σ + h, as forms in h."""
        R, mats = self.R, self.mats
        out = {}
        if self.cp is not None:
            for key, (x, y) in self.cp.points():
                out[key] = h(x) + h(y) - h(R.a(x, y))
        for key, (x, y) in self.cm.points():
            out[key] = h(y).act(mats[x]) + h(x).act(mats[y]) - h(R.m(x, y))
        if self.lam is not None:
            for key, t in self.lam.points():
                out[key] = -h(self.ground(t))
        return out

    def coboundary_matrix(self, h: FunctionUnknown) -> np.ndarray:
        """Columns span the coboundaries inside the factor-set coordinates."""
        keys = self.keys()
        system = AffineSystem(self.p, self.d, keys)
        hcol = {k: i for i, k in enumerate(h.keys())}
        D = np.zeros((system.width, len(hcol) * self.d), dtype=np.int64)
        for key, form in self.coboundaries(h).items():
            r = system.column[key] * self.d
            for hk, mat in form.terms.items():
                c = hcol[hk] * self.d
                D[r : r + self.d, c : c + self.d] += mat
        return mod_p(D, self.p)

    def section_data(self, E: FiniteRing, proj: RingHom, emb, alpha: Optional[RingHom] = None) -> SectionData:
        return SectionData(E, proj, emb, self.Mc, self.Rc, alpha)

    def extract(self, data: SectionData) -> Dict[Hashable, np.ndarray]:
        """Factor-set values of a concrete extension at this model's unknowns."""
        values = {}
        if self.cp is not None:
            for key, (x, y) in self.cp.points():
                values[key] = data.cp(x, y)
        for key, (x, y) in self.cm.points():
            values[key] = data.cm(x, y)
        if self.lam is not None:
            for key, t in self.lam.points():
                values[key] = data.lam(t, self.ground)
        return values

    def tables(self, values: Dict[Hashable, np.ndarray]):
        """Full c+, c× tables (M indices) and λ table for given unknown values."""
        R, p, Mc = self.R, self.p, self.Mc
        n = R.order
        cp = np.zeros((n, n), dtype=np.int64)
        cm = np.zeros((n, n), dtype=np.int64)
        for x in range(n):
            for y in range(x, n):
                cp[x, y] = cp[y, x] = Mc.element(self.plus(x, y).evaluate(values, p))
                cm[x, y] = cm[y, x] = Mc.element(self.times(x, y).evaluate(values, p))
        lam = None
        if self.ground is not None:
            lam = np.array([Mc.element(self.lam(t).evaluate(values, p)) for t in range(self.ground.source.order)], dtype=np.int64)
        return cp, cm, lam


def cocycle_quotient(model: FactorSetModel, extra=None) -> Tuple[AffineSystem, QuotientSpace]:
    """
    Cocycles modulo coboundaries of a model as a QuotientSpace.

    Args:
        model (FactorSetModel): The unknown factor sets.
        extra (callable): Adds further homogeneous conditions to the system.
    """
    system = AffineSystem(model.p, model.d, model.keys())
    model.add_conditions(system)
    if extra is not None:
        extra(system)
    Z = system.nullspace()
    D = model.coboundary_matrix(model.h_unknown())
    if Z.size == 0:
        Z = np.zeros((system.width, 0), dtype=np.int64)
    if D.size == 0:
        D = np.zeros((system.width, 0), dtype=np.int64)
    return system, QuotientSpace(Z, D, model.p)
