"""Semifree DG modules, tensor complexes N (x)_B X, graded homs and homotopies.

A coefficient *target* X is anything with a right and left B-action and a
differential: B itself, the enveloping algebra, the diagonal ideal, or the
differential module.  Elements of N (x)_B X are stored as ``{basis index:
element of X}``, one tensor factor ``e_lambda (x) y`` per basis element, so a
module element of N is just an element of N (x)_B B.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

from . import expr as _expr
from .gca import AlgebraElement, DgAlgebra, ValidationReport
from .linalg import KeyedSystem, rank
from .scalars import ModP, format_scalar


def sgn(k: int) -> int:
    return -1 if k & 1 else 1


class Target:
    """Interface for coefficient complexes X used in N (x)_B X.

    Subclasses define how B acts on both sides, the differential, a scalar
    basis of each graded piece and coordinates in an ambient basis.
    """

    name = "X"
    #: True when the left and right B-actions agree up to the Koszul sign.
    symmetric = True

    def __init__(self, B: DgAlgebra):
        self.B = B
        self.field = B.field

    def zero(self):
        raise NotImplementedError

    def d(self, y):
        raise NotImplementedError

    def left(self, b: AlgebraElement, y):
        raise NotImplementedError

    def right(self, y, b: AlgebraElement):
        raise NotImplementedError

    def act(self, y, w):
        """Right action of an element of the enveloping algebra."""
        raise NotImplementedError

    def basis(self, k: int) -> list:
        raise NotImplementedError

    def coords(self, y) -> dict:
        raise NotImplementedError

    def parts(self, y) -> dict:
        raise NotImplementedError

    def fmt(self, y) -> str:
        return str(y)

    def fmt_key(self, key) -> str:
        return str(key)

    def dim(self, k: int) -> int:
        return len(self.basis(k))

    def degree(self, y) -> int | None:
        ps = self.parts(y)
        if not ps:
            return None
        if len(ps) > 1:
            raise ValueError("inhomogeneous element")
        return next(iter(ps))

    def star(self, b: AlgebraElement, y):
        """The B-module action used on derivation and Hom spaces: ``(-1)^{|b||y|} y.b``."""
        out = self.zero()
        for db, bp in b.homogeneous_parts().items():
            for dy, yp in self.parts(y).items():
                t = self.right(yp, bp)
                out = out - t if (db * dy) & 1 else out + t
        return out


class AlgebraTarget(Target):
    """Shared behaviour for targets whose elements are algebra elements."""

    def __init__(self, B: DgAlgebra, alg: DgAlgebra):
        super().__init__(B)
        self.alg = alg

    def zero(self):
        return self.alg.zero()

    def d(self, y):
        return y.d()

    def coords(self, y) -> dict:
        return dict(y.terms)

    def parts(self, y) -> dict:
        return y.homogeneous_parts()

    def fmt_key(self, key) -> str:
        return self.alg.format_mono(key)


class BTarget(AlgebraTarget):
    """X = B with its multiplication."""

    name = "B"

    def __init__(self, B: DgAlgebra, env=None):
        super().__init__(B, B)
        self.env = env

    def left(self, b, y):
        return b * y

    def right(self, y, b):
        return y * b

    def act(self, y, w):
        if self.env is None:
            raise ValueError("no enveloping algebra attached")
        return y * self.env.pi(w)

    def basis(self, k):
        return [self.B.monomial(m) for m in self.B.monomial_basis(k)]

    def dim(self, k):
        return len(self.B.monomial_basis(k))


# modules ------------------------------------------------------------------


class SemifreeModule:
    """A finite-rank semifree DG module over B.

    ``basis`` lists ``(name, degree)`` in filtration order.  ``differential``
    maps a basis name to its image, given as a ``{name: coefficient}`` dict or
    as an expression string such as ``"e0*x*y"``.  Coefficients may be algebra
    elements, expression strings or scalars.
    """

    def __init__(self, B: DgAlgebra, basis: Sequence[tuple], differential: dict | None = None, *, name: str = "N"):
        self.B = B
        self.name = name
        self.names = tuple(b[0] for b in basis)
        self.degrees = tuple(int(b[1]) for b in basis)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate basis names")
        overlap = set(self.names) & set(B.names)
        if overlap:
            raise ValueError(f"basis names clash with generators: {sorted(overlap)}")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.rank = len(self.names)
        self.space = TensorSpace(self, BTarget(B))
        #: ``b[lam][mu]`` is the coefficient of ``e_mu`` in the differential of ``e_lam``.
        self.b: list[dict] = [dict() for _ in self.names]
        for lname, val in (differential or {}).items():
            lam = self.index[lname]
            if isinstance(val, str):
                val = self.parse(val)
            if isinstance(val, TensorElement):
                col = dict(val.comps)
            else:
                col = {self.index[k] if isinstance(k, str) else k: B.coerce(v) for k, v in val.items()}
            self.b[lam] = {mu: c for mu, c in col.items() if c}

    # construction -------------------------------------------------------

    def zero(self) -> "TensorElement":
        return self.space.zero()

    def element(self, lam: int | str, c=1) -> "TensorElement":
        lam = self.index[lam] if isinstance(lam, str) else lam
        return self.space.tensor(lam, self.B.coerce(c))

    def basis_element(self, lam: int | str) -> "TensorElement":
        return self.element(lam, 1)

    def parse(self, text: str) -> "TensorElement":
        return parse_module_expr(self, text)

    def coefficient(self, mu: int, lam: int) -> AlgebraElement:
        return self.b[lam].get(mu, self.B.zero())

    def diff_image(self, lam: int) -> "TensorElement":
        return TensorElement(self.space, dict(self.b[lam]))

    @property
    def is_free(self) -> bool:
        return all(not col for col in self.b)

    def d(self, m: "TensorElement") -> "TensorElement":
        return self.space.d(m)

    def basis(self, k: int) -> list["TensorElement"]:
        return self.space.basis(k)

    def __repr__(self):
        return f"SemifreeModule({self.name}: {', '.join(f'{n}:{d}' for n, d in zip(self.names, self.degrees))})"


def parse_module_expr(N: SemifreeModule, text: str) -> "TensorElement":
    """Evaluate an expression that is linear in the basis of ``N``.

    Every product must contain exactly one bare basis factor; algebra factors
    to its left are moved to the right with the Koszul sign.
    """
    tree = _expr.parse_expr(text)
    return _eval_module_tree(N, tree)


class ModuleExprError(ValueError):
    pass


def _eval_module_tree(N: SemifreeModule, tree) -> "TensorElement":
    B = N.B
    if tree[0] == "sum":
        out = N.zero()
        for sign, term in tree[1]:
            v = _eval_module_tree(N, term)
            out = out - v if sign < 0 else out + v
        return out
    if tree[0] == "paren":
        return _eval_module_tree(N, tree[1])
    factors = tree[1] if tree[0] == "prod" else (tree,)
    pos = [i for i, f in enumerate(factors) if f[0] == "var" and f[1] in N.index]
    for i, f in enumerate(factors):
        if i not in pos and any(n in N.index for n in _expr.names_in(f)):
            raise ModuleExprError("basis elements may only appear as bare factors")
    if len(pos) != 1:
        raise ModuleExprError("each term needs exactly one basis element")
    p = pos[0]
    if factors[p][2] != 1:
        raise ModuleExprError("basis elements cannot be raised to a power")
    lam = N.index[factors[p][1]]

    def ev(fs):
        val = B.one()
        for f in fs:
            val = val * _expr.evaluate(f, B.gen, lambda a, b: a * b, B.one(), B.scalar)
        return val

    left, right = ev(factors[:p]), ev(factors[p + 1:])
    out = N.zero()
    for dl, lp in left.homogeneous_parts().items():
        c = lp * right
        if (dl * N.degrees[lam]) & 1:
            c = -c
        out = out + N.space.tensor(lam, c)
    return out


# tensor complexes --------------------------------------------------------------


class TensorSpace:
    """The complex N (x)_B X for a semifree N and a target X."""

    def __init__(self, N: SemifreeModule, X: Target):
        self.N = N
        self.X = X
        self.field = N.B.field
        self._basis_cache: dict = {}

    def zero(self) -> "TensorElement":
        return TensorElement(self, {})

    def tensor(self, lam: int, y) -> "TensorElement":
        if not y:
            return self.zero()
        return TensorElement(self, {lam: y})

    def tensor_module(self, n: "TensorElement", y) -> "TensorElement":
        """``n (x) y`` for an element ``n`` of N and ``y`` of X."""
        out = {}
        for lam, c in n.comps.items():
            v = self.X.left(c, y)
            if v:
                out[lam] = v
        return TensorElement(self, out)

    def right(self, z: "TensorElement", b: AlgebraElement) -> "TensorElement":
        out = {}
        for lam, y in z.comps.items():
            v = self.X.right(y, b)
            if v:
                out[lam] = v
        return TensorElement(self, out)

    def d(self, z: "TensorElement") -> "TensorElement":
        X, N = self.X, self.N
        acc: dict = {}

        def add(lam, v):
            if not v:
                return
            old = acc.get(lam)
            nv = v if old is None else old + v
            if nv:
                acc[lam] = nv
            else:
                acc.pop(lam, None)

        for lam, y in z.comps.items():
            for mu, b in N.b[lam].items():
                add(mu, X.left(b, y))
            dy = X.d(y)
            add(lam, -dy if N.degrees[lam] & 1 else dy)
        return TensorElement(self, acc)

    def basis(self, k: int) -> list["TensorElement"]:
        hit = self._basis_cache.get(k)
        if hit is None:
            hit = []
            for lam, e in enumerate(self.N.degrees):
                for y in self.X.basis(k - e):
                    hit.append(TensorElement(self, {lam: y}))
            self._basis_cache[k] = hit
        return hit

    def dim(self, k: int) -> int:
        return sum(self.X.dim(k - e) for e in self.N.degrees)

    def coords(self, z: "TensorElement") -> dict:
        out = {}
        for lam, y in z.comps.items():
            for key, v in self.X.coords(y).items():
                out[(lam, key)] = v
        return out

    def fmt_key(self, key) -> str:
        lam, k = key
        inner = self.X.fmt_key(k)
        if isinstance(self.X, BTarget):
            return self.N.names[lam] if inner == "1" else f"{self.N.names[lam]}*{inner}"
        return f"{self.N.names[lam]}⊗{inner}"

    def slice(self, lo: int, hi: int) -> "ComplexSlice":
        dims, maps = {}, {}
        for k in range(lo, hi + 1):
            bs = self.basis(k)
            dims[k] = len(bs)
            maps[k] = [self.coords(self.d(z)) for z in bs]
        return ComplexSlice(lo, hi, dims, maps, self.field)


class TensorElement:
    """Element of N (x)_B X: ``{basis index: nonzero element of X}``."""

    __slots__ = ("space", "comps")

    def __init__(self, space: TensorSpace, comps: dict):
        self.space = space
        self.comps = comps

    def _merge(self, other, neg=False):
        if other.space.N is not self.space.N:
            raise ValueError("mismatched modules")
        out = dict(self.comps)
        for lam, y in other.comps.items():
            if neg:
                y = -y
            old = out.get(lam)
            nv = y if old is None else old + y
            if nv:
                out[lam] = nv
            else:
                out.pop(lam, None)
        return TensorElement(self.space, out)

    def __add__(self, other):
        return self._merge(other)

    def __sub__(self, other):
        return self._merge(other, neg=True)

    def __neg__(self):
        return TensorElement(self.space, {lam: -y for lam, y in self.comps.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.space.right(self, other)
        if isinstance(other, (int, Fraction, ModP)):
            c = self.space.field(other)
            if not c:
                return self.space.zero()
            return TensorElement(self.space, {lam: y * c for lam, y in self.comps.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, ModP)):
            return self * other
        return NotImplemented

    def __bool__(self):
        return bool(self.comps)

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return other.space.N is self.space.N and other.comps == self.comps

    def __hash__(self):
        return hash(tuple(sorted(self.comps)))

    def d(self) -> "TensorElement":
        return self.space.d(self)

    def parts(self) -> dict[int, "TensorElement"]:
        out: dict[int, dict] = {}
        for lam, y in self.comps.items():
            for dy, yp in self.space.X.parts(y).items():
                out.setdefault(self.space.N.degrees[lam] + dy, {})[lam] = yp
        return {k: TensorElement(self.space, v) for k, v in out.items()}

    @property
    def degree(self) -> int | None:
        ps = self.parts()
        if not ps:
            return None
        if len(ps) > 1:
            raise ValueError("inhomogeneous element")
        return next(iter(ps))

    def coords(self) -> dict:
        return self.space.coords(self)

    def __str__(self):
        if not self.comps:
            return "0"
        N, X = self.space.N, self.space.X
        is_module = isinstance(X, BTarget)
        out = []
        for lam in sorted(self.comps):
            y = self.comps[lam]
            ys = X.fmt(y)
            name = N.names[lam]
            if is_module:
                if ys == "1":
                    out.append(name)
                elif ys == "-1":
                    out.append("-" + name)
                else:
                    out.append(f"{name}*({ys})")
            else:
                out.append(f"{name}⊗({ys})")
        s = " + ".join(out)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"<{self.space.N.name}⊗{self.space.X.name}: {self}>"


ModuleElement = TensorElement


def module_differential(N: SemifreeModule, m: TensorElement) -> TensorElement:
    return N.d(m)


def validate_module(N: SemifreeModule) -> ValidationReport:
    rep = ValidationReport()
    B = N.B
    for lam, col in enumerate(N.b):
        lname = N.names[lam]
        for mu, c in col.items():
            mname = N.names[mu]
            if mu >= lam:
                rep.fail("triangularity", lname, f"d({lname}) involves {mname}, which is not earlier in the basis")
            if not c.is_homogeneous:
                rep.fail("homogeneity", lname, f"coefficient of {mname} in d({lname}) is not homogeneous")
                continue
            want = N.degrees[lam] - N.degrees[mu] - 1
            if c.degree != want:
                rep.fail("degree", lname, f"coefficient of {mname} in d({lname}) has degree {c.degree}, expected {want}")
    if not rep.valid:
        return rep
    for lam in range(N.rank):
        dd = N.d(N.diff_image(lam))
        if dd:
            rep.fail("d-squared", N.names[lam], f"d(d({N.names[lam]})) = {dd} != 0")
    if rep.valid:
        rep.passed(f"{N.name}: degrees, triangularity and d^2 = 0 on {N.rank} basis elements")
    return rep


# graded homs -------------------------------------------------------------------


class GradedHom:
    """A right B-linear map of degree ``n`` from N to a tensor complex.

    ``images[lam]`` is the image of ``e_lam``; missing entries are zero.
    Linearity is ``f(x b) = f(x) b`` with no sign.
    """

    def __init__(self, source: SemifreeModule, target: TensorSpace, degree: int, images: dict | None = None):
        self.source = source
        self.target = target
        self.degree = degree
        self.images = {lam: z for lam, z in (images or {}).items() if z}

    def image(self, lam: int) -> TensorElement:
        return self.images.get(lam, self.target.zero())

    def apply(self, x: TensorElement) -> TensorElement:
        out = self.target.zero()
        for lam, c in x.comps.items():
            z = self.images.get(lam)
            if z:
                out = out + self.target.right(z, c)
        return out

    __call__ = apply

    def differential(self) -> "GradedHom":
        return hom_differential(self)

    def _combine(self, other: "GradedHom", neg: bool) -> "GradedHom":
        if other.degree != self.degree or other.source is not self.source:
            raise ValueError("incompatible graded homs")
        imgs = dict(self.images)
        for lam, z in other.images.items():
            if neg:
                z = -z
            imgs[lam] = imgs[lam] + z if lam in imgs else z
        return GradedHom(self.source, self.target, self.degree, imgs)

    def __add__(self, other):
        return self._combine(other, False)

    def __sub__(self, other):
        return self._combine(other, True)

    def __neg__(self):
        return GradedHom(self.source, self.target, self.degree, {k: -v for k, v in self.images.items()})

    def __mul__(self, c):
        return GradedHom(self.source, self.target, self.degree, {k: v * c for k, v in self.images.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.images)

    def __eq__(self, other):
        if not isinstance(other, GradedHom):
            return NotImplemented
        return self.degree == other.degree and self.images == other.images

    def to_json(self) -> dict:
        N = self.source
        return {N.names[lam]: str(self.image(lam)) for lam in range(N.rank)}

    def __str__(self):
        return "{" + ", ".join(f"{k}: {v}" for k, v in self.to_json().items()) + "}"


def hom_differential(f: GradedHom) -> GradedHom:
    """``d o f - (-1)^n f o d`` evaluated on the basis."""
    N, T = f.source, f.target
    imgs = {}
    s = sgn(f.degree)
    for lam in range(N.rank):
        v = T.d(f.image(lam)) if lam in f.images else T.zero()
        w = f.apply(N.diff_image(lam))
        v = v - w if s > 0 else v + w
        if v:
            imgs[lam] = v
    return GradedHom(N, T, f.degree - 1, imgs)


def hom_basis(source: SemifreeModule, target: TensorSpace, n: int) -> list[GradedHom]:
    out = []
    for lam, e in enumerate(source.degrees):
        for z in target.basis(e + n):
            out.append(GradedHom(source, target, n, {lam: z}))
    return out


def hom_dim(source: SemifreeModule, target: TensorSpace, n: int) -> int:
    return sum(target.dim(e + n) for e in source.degrees)


def identity_hom(N: SemifreeModule) -> GradedHom:
    return GradedHom(N, N.space, 0, {lam: N.basis_element(lam) for lam in range(N.rank)})


@dataclass
class NoSolution:
    """Exact proof that ``d(h) = g`` has no solution.

    ``certificate`` maps equation labels ``(basis index, coordinate key)`` to
    scalars; the combination annihilates every unknown but pairs to 1 with
    the right-hand side.
    """

    certificate: dict
    n_unknowns: int
    n_equations: int
    labels: dict = dc_field(default_factory=dict)

    def __bool__(self):
        return False

    def to_json(self) -> dict:
        return {
            "unknowns": self.n_unknowns,
            "equations": self.n_equations,
            "row": {self.labels.get(k, str(k)): format_scalar(v) for k, v in self.certificate.items()},
        }


def homotopy_system(g: GradedHom) -> tuple[KeyedSystem, list]:
    """Linear system for ``h`` of degree ``n + 1`` with ``d(h) = g``.

    Unknowns are scalar coordinates of ``h(e_lam)``; the equation for basis
    element ``e_lam`` reads ``d(h(e_lam)) - (-1)^(n+1) sum_mu h(e_mu) b_mu_lam = g(e_lam)``.
    """
    N, T = g.source, g.target
    n = g.degree
    s = sgn(n + 1)
    sysm = KeyedSystem(N.B.field)
    unknowns = []
    users: dict[int, list] = {}
    for lam, col in enumerate(N.b):
        for mu, b in col.items():
            users.setdefault(mu, []).append((lam, b))
    for lam, e in enumerate(N.degrees):
        for z in T.basis(e + n + 1):
            img = {}
            for key, v in T.coords(T.d(z)).items():
                img[(lam, key)] = v
            for nu, b in users.get(lam, ()):
                w = T.right(z, b)
                for key, v in T.coords(w).items():
                    k2 = (nu, key)
                    nv = img.get(k2, N.B.field.zero) + (-v if s > 0 else v)
                    img[k2] = nv
            sysm.add_unknown((lam, z), img)
            unknowns.append((lam, z))
    for lam in range(N.rank):
        sysm.add_rhs({(lam, key): v for key, v in T.coords(g.image(lam)).items()})
    return sysm, unknowns


def solve_null_homotopy(g: GradedHom) -> GradedHom | NoSolution:
    """A homotopy ``h`` with ``hom_differential(h) == g``, or an exact NoSolution."""
    N, T = g.source, g.target
    if not g.images:
        return GradedHom(N, T, g.degree + 1)
    for lam, z in g.images.items():
        if z.degree != N.degrees[lam] + g.degree:
            raise ValueError(f"image of {N.names[lam]} has the wrong degree")
    sysm, unknowns = homotopy_system(g)
    sol = sysm.solve()
    if sol is None:
        cert = sysm.certificate()
        labels = {k: f"{N.names[k[0]]} @ {T.fmt_key(k[1])}" for k in cert}
        return NoSolution(cert, len(unknowns), sysm.n_equations, labels)
    imgs: dict = {}
    for j, v in sol.items():
        lam, z = unknowns[j]
        imgs[lam] = imgs[lam] + z * v if lam in imgs else z * v
    h = GradedHom(N, T, g.degree + 1, imgs)
    if hom_differential(h) != g:
        raise ArithmeticError("null-homotopy verification failed")
    return h


# shift and homology --------------------------------------------------------


def shift(M: SemifreeModule, n: int) -> SemifreeModule:
    """``M(n)``: degrees lowered by ``n`` and the differential multiplied by ``(-1)^n``."""
    s = sgn(n)
    diff = {M.names[lam]: {M.names[mu]: (c if s > 0 else -c) for mu, c in col.items()} for lam, col in enumerate(M.b) if col}
    return SemifreeModule(M.B, [(nm, d - n) for nm, d in zip(M.names, M.degrees)], diff, name=M.name)


@dataclass
class ComplexSlice:
    """Finite window of a complex.

    ``maps[k]`` lists, for each basis vector of degree ``k``, the ambient
    coordinates of its differential in degree ``k - 1``.
    """

    lo: int
    hi: int
    dims: dict
    maps: dict
    field: object

    def rank_at(self, k: int) -> int:
        rows = self.maps.get(k, [])
        keys: dict = {}
        out = []
        for r in rows:
            out.append({keys.setdefault(c, len(keys)): v for c, v in r.items()})
        return rank(out, self.field)


def homology_dimension(sl: ComplexSlice, k: int) -> int:
    if not (sl.lo <= k and k + 1 <= sl.hi):
        raise ValueError(f"degree {k} needs degrees {k}..{k + 1} inside the window [{sl.lo}, {sl.hi}]")
    return sl.dims[k] - sl.rank_at(k) - sl.rank_at(k + 1)
