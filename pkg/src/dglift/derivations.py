"""A-linear derivations from a free extension B into a coefficient complex.

A derivation is stored by its values on the adjoined generators and
evaluated through the signed Leibniz rule
``D(b1 b2) = D(b1) b2 + (-1)^{|D||b1|} b1 D(b2)`` on canonical monomials.

When the left and right B-actions on the target differ (B^e, J) the values
cannot be chosen freely: they must respect the graded commutativity of the
generators.  ``der_basis`` solves for that subspace.
"""
from __future__ import annotations

from typing import NamedTuple

from .dgmod import BTarget, Target, sgn
from .enveloping import (
    CrossCheckError,
    DiagonalTarget,
    EnvelopingAlgebra,
    Omega,
)
from .gca import AlgebraElement, DgAlgebra
from .linalg import KeyedSystem, rank


class Derivation:
    """A homogeneous A-derivation ``B -> X`` of degree ``degree``.

    ``images`` maps extension-generator indices of B to elements of X;
    missing entries are zero.
    """

    def __init__(self, B: DgAlgebra, target: Target, degree: int, images: dict | None = None, *, check: bool = True):
        self.B = B
        self.target = target
        self.degree = degree
        self.images = {}
        for i, y in (images or {}).items():
            i = B.index[i] if isinstance(i, str) else i
            if B.is_base[i]:
                if y:
                    raise ValueError(f"derivations vanish on the base generator {B.names[i]}")
                continue
            if isinstance(y, str) and isinstance(target, BTarget):
                y = B.parse(y)
            if y:
                if check:
                    dg = target.degree(y)
                    if dg != degree + B.degrees[i]:
                        raise ValueError(
                            f"image of {B.names[i]} has degree {dg}, expected {degree + B.degrees[i]}"
                        )
                self.images[i] = y
        self._cache: dict = {}

    def image(self, i: int):
        return self.images.get(i, self.target.zero())

    # evaluation ------------------------------------------------------------

    def _mono(self, m: tuple):
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        B, X, n = self.B, self.target, self.degree
        out = X.zero()
        pdeg = 0
        for i, e in enumerate(m):
            if not e:
                continue
            y = self.images.get(i)
            if y is not None:
                for k in range(e):
                    pre = m[:i] + (k,) + (0,) * (B.ngens - i - 1)
                    suf = (0,) * i + (e - 1 - k,) + m[i + 1:]
                    v = X.left(B.monomial(pre), X.right(y, B.monomial(suf)))
                    out = out - v if (n * B.mono_degree(pre)) & 1 else out + v
            pdeg += e * B.degrees[i]
        self._cache[m] = out
        return out

    def __call__(self, p: AlgebraElement):
        out = self.target.zero()
        for m, c in p.terms.items():
            v = self._mono(m)
            if v:
                out = out + v * c
        return out

    evaluate = __call__

    def on_word(self, word) -> object:
        """Leibniz value on an ordered product of generators (not necessarily canonical)."""
        B, X, n = self.B, self.target, self.degree
        word = [B.index[w] if isinstance(w, str) else w for w in word]
        out = X.zero()
        for p, i in enumerate(word):
            y = self.images.get(i)
            if y is None:
                continue
            pre = B.one()
            for w in word[:p]:
                pre = pre * B.gen(w)
            suf = B.one()
            for w in word[p + 1:]:
                suf = suf * B.gen(w)
            pdeg = sum(B.degrees[w] for w in word[:p])
            v = X.left(pre, X.right(y, suf))
            out = out - v if (n * pdeg) & 1 else out + v
        return out

    # algebra -----------------------------------------------------------------

    def _like(self, degree, images):
        return Derivation(self.B, self.target, degree, images, check=False)

    def __add__(self, other: "Derivation"):
        if other.degree != self.degree and self.images and other.images:
            raise ValueError("derivations are only added degreewise")
        imgs = dict(self.images)
        for i, y in other.images.items():
            imgs[i] = imgs[i] + y if i in imgs else y
        return self._like(self.degree if self.images else other.degree, {i: y for i, y in imgs.items() if y})

    def __neg__(self):
        return self._like(self.degree, {i: -y for i, y in self.images.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return self._like(self.degree, {i: y * c for i, y in self.images.items() if y * c})

    __rmul__ = __mul__

    def scale(self, b: AlgebraElement) -> "Derivation":
        """``b D`` with ``(bD)(x) = (-1)^{|b||D(x)|} D(x) b``; b must be homogeneous."""
        db = b.degree
        if db is None:
            return self._like(self.degree, {})
        X = self.target
        imgs = {i: X.star(b, y) for i, y in self.images.items()}
        return self._like(self.degree + db, {i: y for i, y in imgs.items() if y})

    def __bool__(self):
        return bool(self.images)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        if not self.images and not other.images:
            return True
        return self.degree == other.degree and self.images == other.images

    def coords(self) -> dict:
        out = {}
        for i, y in self.images.items():
            for k, v in self.target.coords(y).items():
                out[(i, k)] = v
        return out

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "images": {self.B.names[i]: self.target.fmt(self.image(i)) for i in self.B.extension_indices},
        }

    def __str__(self):
        return f"Der[{self.degree}]" + str(self.to_json()["images"])

    __repr__ = __str__


def make_derivation(B: DgAlgebra, degree: int, images: dict, target: Target | None = None) -> Derivation:
    return Derivation(B, target or BTarget(B), degree, images)


def der_differential(D: Derivation) -> Derivation:
    """``d_X o D - (-1)^{|D|} D o d_B``, recorded on generators."""
    X, B = D.target, D.B
    imgs = {}
    s = sgn(D.degree)
    for i in B.extension_indices:
        v = X.d(D.image(i)) if i in D.images else X.zero()
        w = D(B.dimage(i))
        v = v - w if s > 0 else v + w
        if v:
            imgs[i] = v
    return D._like(D.degree - 1, imgs)


def bracket(D1: Derivation, D2: Derivation) -> Derivation:
    """Graded commutator of two derivations of B into itself."""
    if not (isinstance(D1.target, BTarget) and isinstance(D2.target, BTarget)):
        raise ValueError("the bracket is only defined for derivations into B")
    B = D1.B
    imgs = {}
    s = sgn(D1.degree * D2.degree)
    for i in B.extension_indices:
        v = D1(D2.image(i)) - D2(D1.image(i)) * s
        if v:
            imgs[i] = v
    return D1._like(D1.degree + D2.degree, imgs)


class EulerResult(NamedTuple):
    derivation: Derivation
    exact: bool


def euler_derivation(B: DgAlgebra) -> EulerResult:
    """The grading derivation ``X_i -> |X_i| X_i``.

    It is the Euler derivation ``b -> |b| b`` only if A sits in degree 0; for
    connected algebras that means A has no generators.  ``exact`` reports
    which case applies.
    """
    imgs = {i: B.gen(i) * B.degrees[i] for i in B.extension_indices}
    return EulerResult(Derivation(B, BTarget(B), 0, imgs), not B.base_indices)


def dual_basis(B: DgAlgebra) -> list[Derivation]:
    """The derivations ``d/dX_lam`` of degree ``-|X_lam|`` with ``d/dX_lam (X_mu) = [lam == mu]``."""
    T = BTarget(B)
    return [Derivation(B, T, -B.degrees[i], {i: B.one()}) for i in B.extension_indices]


# derivation spaces -------------------------------------------------------------


def relation_pairs(B: DgAlgebra) -> list[tuple[int, int]]:
    ext = B.extension_indices
    out = []
    for a, i in enumerate(ext):
        if B.degrees[i] % 2:
            out.append((i, i))
        for j in ext[a + 1:]:
            out.append((i, j))
    return out


def relation_defect(D: Derivation, i: int, j: int):
    """Value of D on the relation ``X_i X_j - (-1)^{|X_i||X_j|} X_j X_i`` (or ``X_i^2`` for odd ``i = j``)."""
    B = D.B
    if i == j:
        return D.on_word([i, i])
    v = D.on_word([i, j])
    w = D.on_word([j, i])
    return v + w if (B.degrees[i] * B.degrees[j]) & 1 else v - w


def der_basis(B: DgAlgebra, target: Target, n: int) -> list[Derivation]:
    """Scalar basis of Der_A(B, X)_n."""
    ext = B.extension_indices
    cand = []
    for i in ext:
        for y in target.basis(n + B.degrees[i]):
            cand.append(Derivation(B, target, n, {i: y}, check=False))
    if target.symmetric or not cand:
        return cand
    sysm = KeyedSystem(B.field)
    pairs = relation_pairs(B)
    for D in cand:
        img = {}
        for i, j in pairs:
            for k, v in target.coords(relation_defect(D, i, j)).items():
                img[(i, j, k)] = v
        sysm.add_unknown(D, img)
    out = []
    for vec in sysm.nullspace():
        acc = None
        for c, v in vec.items():
            t = cand[c] * v
            acc = t if acc is None else acc + t
        out.append(acc._like(n, acc.images))
    return out


def is_well_defined(D: Derivation) -> bool:
    return all(not relation_defect(D, i, j) for i, j in relation_pairs(D.B))


class DerivationComplexSlice:
    """Bases of Der_A(B, X)_n for n in a window and the matrices of the differential."""

    def __init__(self, B: DgAlgebra, target: Target, lo: int, hi: int):
        self.B, self.target, self.lo, self.hi = B, target, lo, hi
        self.bases = {n: der_basis(B, target, n) for n in range(lo, hi + 1)}
        self.maps = {n: [der_differential(D).coords() for D in self.bases[n]] for n in range(lo, hi + 1)}

    def dim(self, n: int) -> int:
        return len(self.bases[n])

    def rank_at(self, n: int) -> int:
        keys: dict = {}
        rows = [{keys.setdefault(k, len(keys)): v for k, v in r.items()} for r in self.maps[n]]
        return rank(rows, self.B.field)

    def homology_dimension(self, n: int) -> int:
        if not (self.lo <= n < self.hi):
            raise ValueError("degree outside window")
        return self.dim(n) - self.rank_at(n) - self.rank_at(n + 1)

    def check_d_squared(self) -> bool:
        return all(not der_differential(der_differential(D)) for n in self.bases for D in self.bases[n])


# canonical derivations -----------------------------------------------------------


def delta_derivation(env: EnvelopingAlgebra, target: DiagonalTarget | None = None) -> Derivation:
    """The universal derivation as an element of Der_A(B, J)_0."""
    B = env.B
    T = target or DiagonalTarget(env)
    return Derivation(B, T, 0, {i: env.delta(B.gen(i)) for i in B.extension_indices})


def delta_bar_derivation(om: Omega) -> Derivation:
    """``b -> class of delta(b)`` in Omega."""
    B = om.B
    return Derivation(B, om.target, 0, {i: om.u(i) for i in B.extension_indices})


def omega_hom(D: Derivation, om: Omega):
    """The B-linear map ``Omega -> X`` with ``u_lam -> D(X_lam)``, as a function on Omega elements."""
    X = D.target

    def g(w):
        out = X.zero()
        for k, c in w.comps.items():
            i = om.ext[k]
            y = D.images.get(i)
            if y is not None:
                out = out + X.right(y, c)
        return out

    return g


class JMap:
    """A B^e-linear map ``J -> X`` of degree ``n``, evaluated in t-coordinates.

    A monomial of J is split as ``t_i * q`` at one of its t-factors and sent
    to ``D(X_i) . q``.  Independence of the split (first versus last
    t-factor) is verified on a basis of every degree the map is applied in.
    """

    def __init__(self, D: Derivation, env: EnvelopingAlgebra):
        self.D = D
        self.env = env
        self.degree = D.degree
        self.target = D.target
        self._checked: set = set()

    def _eval(self, j: AlgebraElement, last: bool):
        env, X = self.env, self.target
        out = X.zero()
        for i, q in env.split_first_t(env.to_t(j), last=last).items():
            y = self.D.images.get(i)
            if y is None:
                continue
            out = out + X.act(y, env.from_t(q))
        return out

    def check_degree(self, k: int) -> None:
        if k in self._checked:
            return
        for v in self.env.J_basis(k):
            if self._eval(v, False) != self._eval(v, True):
                raise CrossCheckError(f"map on J depends on the chosen expression in degree {k}")
        self._checked.add(k)

    def __call__(self, j: AlgebraElement):
        if not j:
            return self.target.zero()
        for k in j.degrees:
            self.check_degree(k)
        return self._eval(j, False)

    def differential_at(self, j: AlgebraElement):
        """``(d_X f - (-1)^n f d)(j)``."""
        v = self.target.d(self(j))
        w = self(j.d())
        return v - w if self.degree % 2 == 0 else v + w


def varpi_inverse(D: Derivation, env: EnvelopingAlgebra) -> JMap:
    return JMap(D, env)


def varpi(f: JMap, B: DgAlgebra) -> Derivation:
    """``f o delta``, recorded on generators."""
    env = f.env
    return Derivation(B, f.target, f.degree, {i: f(env.delta(B.gen(i))) for i in B.extension_indices})
