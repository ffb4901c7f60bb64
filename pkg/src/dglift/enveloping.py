"""The enveloping algebra B (x)_A B, the diagonal ideal J and Omega = J/J^2.

For a free extension B = A[X_1, ..., X_r] the enveloping algebra is the free
extension of A on doubled variables X_i (left copy) and X_i' (right copy).
Besides this model we keep the change of variables ``t_i = X_i - X_i'``: in
the algebra T = A[X_i, t_i] the diagonal ideal is the ideal generated by the
``t_i``, J^2 is everything of t-degree at least two, and J/J^2 is the
t-linear part.  The t-coordinates are used for membership, the projection to
Omega, and for evaluating maps defined on J through their values on
``delta(X_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .dgmod import (
    AlgebraTarget,
    SemifreeModule,
    Target,
    TensorElement,
    TensorSpace,
    sgn,
    validate_module,
)
from .gca import AlgebraElement, DgAlgebra, ValidationReport, partial_derivative, validate_dgca
from .linalg import nullspace, rank


class NotInIdealError(ValueError):
    pass


class CrossCheckError(ArithmeticError):
    """Two independent computations of the same object disagree."""


class EnvelopingAlgebra:
    """B^e = B (x)_A B for a validated free extension B of A."""

    def __init__(self, B: DgAlgebra):
        rep = validate_dgca(B)
        if not rep.valid:
            raise ValueError(f"invalid algebra: {rep.failures}")
        base, ext = B.base_indices, B.extension_indices
        if base and ext and max(base) > min(ext):
            raise ValueError("base generators must be declared before adjoined ones")
        self.B = B
        self.field = B.field
        self.base = base
        self.ext = ext
        nb, ne = len(base), len(ext)
        gens = [(B.names[i], B.degrees[i], True) for i in base]
        gens += [(B.names[i], B.degrees[i], False) for i in ext]
        gens += [(B.names[i] + "'", B.degrees[i], False) for i in ext]
        self.Be = DgAlgebra(B.field, gens, name="Be", ordered_extension=False)
        tg = [(B.names[i], B.degrees[i], True) for i in base]
        tg += [(B.names[i], B.degrees[i], False) for i in ext]
        tg += [(f"t[{B.names[i]}]", B.degrees[i], False) for i in ext]
        self.T = DgAlgebra(B.field, tg, name="T", ordered_extension=False)
        self.nb, self.ne = nb, ne
        # position of each B generator in the left / right copies
        self.left_pos = {i: k for k, i in enumerate(base)}
        self.left_pos.update({i: nb + k for k, i in enumerate(ext)})
        self.right_pos = {i: k for k, i in enumerate(base)}
        self.right_pos.update({i: nb + ne + k for k, i in enumerate(ext)})
        self.t_pos = {i: nb + ne + k for k, i in enumerate(ext)}
        self._L: dict = {}
        self._R: dict = {}
        self._pi: dict = {}
        self._phi: dict = {}
        self._psi: dict = {}
        for i in range(B.ngens):
            dg = B.dimage(i)
            if i in ext:
                self.Be.set_dimage(self.left_pos[i], self.L(dg))
                self.Be.set_dimage(self.right_pos[i], self.R(dg))
            else:
                self.Be.set_dimage(self.left_pos[i], self.L(dg))
        for i in range(B.ngens):
            dg = B.dimage(i)
            self.T.set_dimage(self.left_pos[i], self.to_t(self.L(dg)))
            if i in ext:
                self.T.set_dimage(self.t_pos[i], self.to_t(self.delta(dg)))
        self.B_target = None

    # the structure maps ------------------------------------------------------

    def _remap(self, p: AlgebraElement, pos: dict, cache: dict) -> AlgebraElement:
        out = {}
        n = self.Be.ngens
        for m, c in p.terms.items():
            mm = cache.get(m)
            if mm is None:
                v = [0] * n
                for i, e in enumerate(m):
                    if e:
                        v[pos[i]] = e
                mm = tuple(v)
                cache[m] = mm
            out[mm] = c
        return AlgebraElement(self.Be, out)

    def L(self, b: AlgebraElement) -> AlgebraElement:
        """Left inclusion ``b -> b (x) 1`` (declaration order is preserved, so no signs)."""
        return self._remap(b, self.left_pos, self._L)

    def R(self, b: AlgebraElement) -> AlgebraElement:
        """Right inclusion ``b -> 1 (x) b``."""
        return self._remap(b, self.right_pos, self._R)

    def pi(self, w: AlgebraElement) -> AlgebraElement:
        """Multiplication map B^e -> B."""
        B = self.B
        imgs = [None] * self.Be.ngens
        for i in range(B.ngens):
            imgs[self.left_pos[i]] = B.gen(i)
            if i in self.ext:
                imgs[self.right_pos[i]] = B.gen(i)
        return self.Be.substitute(w, imgs, B, self._pi)

    def delta(self, b: AlgebraElement) -> AlgebraElement:
        """The universal derivation ``b (x) 1 - 1 (x) b``."""
        return self.L(b) - self.R(b)

    def to_t(self, w: AlgebraElement) -> AlgebraElement:
        """Rewrite an element of B^e in the coordinates ``X_i, t_i = X_i - X_i'``."""
        T = self.T
        imgs = [None] * self.Be.ngens
        for i in range(self.B.ngens):
            imgs[self.left_pos[i]] = T.gen(self.left_pos[i])
            if i in self.ext:
                imgs[self.right_pos[i]] = T.gen(self.left_pos[i]) - T.gen(self.t_pos[i])
        return self.Be.substitute(w, imgs, T, self._phi)

    def from_t(self, p: AlgebraElement) -> AlgebraElement:
        Be = self.Be
        imgs = [None] * self.T.ngens
        for i in range(self.B.ngens):
            imgs[self.left_pos[i]] = Be.gen(self.left_pos[i])
            if i in self.ext:
                imgs[self.t_pos[i]] = Be.gen(self.left_pos[i]) - Be.gen(self.right_pos[i])
        return self.T.substitute(p, imgs, Be, self._psi)

    def t_degree(self, m: tuple) -> int:
        return sum(m[self.nb + self.ne:])

    def in_J(self, w: AlgebraElement) -> bool:
        return not self.pi(w)

    def validate(self) -> ValidationReport:
        rep = validate_dgca(self.Be)
        B = self.B
        for i in range(B.ngens):
            g = B.gen(i)
            if self.pi(self.L(g).d()) != g.d():
                rep.fail("chain-map", B.names[i], "pi o d != d o pi on the left copy")
            if self.pi(self.R(g).d()) != g.d():
                rep.fail("chain-map", B.names[i], "pi o d != d o pi on the right copy")
            if self.L(g.d()) != self.L(g).d() or self.R(g.d()) != self.R(g).d():
                rep.fail("chain-map", B.names[i], "an inclusion B -> B^e does not commute with d")
        if rep.valid:
            rep.passed("B^e: pi_B and both inclusions commute with the differentials")
        return rep

    # membership in J -----------------------------------------------------

    def split_first_t(self, p: AlgebraElement, last: bool = False) -> dict:
        """Write a t-coordinate element of J as ``sum_i t_i * q_i``.

        Each monomial is split at its first (or last) t-factor.  Returns
        ``{extension index: q_i}`` with ``q_i`` in T.
        """
        T = self.T
        out: dict = {}
        for m, c in p.terms.items():
            ts = [i for i in self.ext if m[self.t_pos[i]]]
            if not ts:
                raise NotInIdealError("element is not in the diagonal ideal")
            i = ts[-1] if last else ts[0]
            k = self.t_pos[i]
            rest = list(m)
            rest[k] -= 1
            rest = tuple(rest)
            unit = [0] * T.ngens
            unit[k] = 1
            s, _ = T.mono_mul(tuple(unit), rest)
            q = T.monomial(rest, c if s > 0 else -c)
            out[i] = out[i] + q if i in out else q
        return out

    def membership(self, j: AlgebraElement) -> dict:
        """Coefficients ``m_i`` in B^e with ``j = sum_i m_i * delta(X_i)``."""
        if not self.in_J(j):
            raise NotInIdealError(f"{j} is not in the diagonal ideal")
        parts = self.split_first_t(self.to_t(j))
        out = {}
        for i, q in parts.items():
            w = self.from_t(q)
            # delta_i * w = (-1)^{|w||X_i|} w * delta_i
            acc = self.Be.zero()
            for dw, wp in w.homogeneous_parts().items():
                acc = acc - wp if (dw * self.B.degrees[i]) & 1 else acc + wp
            out[i] = acc
        check = self.Be.zero()
        for i, m in out.items():
            check = check + m * self.delta(self.B.gen(i))
        if check != j:
            raise CrossCheckError("membership expansion does not reproduce the input")
        return out

    # graded pieces ----------------------------------------------------------

    def J_basis(self, k: int) -> list[AlgebraElement]:
        """Scalar basis of J_k as the kernel of pi_B on (B^e)_k."""
        cache = self.__dict__.setdefault("_jb", {})
        hit = cache.get(k)
        if hit is not None:
            return hit
        mons = self.Be.monomial_basis(k)
        bmons = {m: r for r, m in enumerate(self.B.monomial_basis(k))}
        rows: dict = {}
        for col, m in enumerate(mons):
            img = self.pi(self.Be.monomial(m))
            for bm, v in img.terms.items():
                rows.setdefault(bmons[bm], {})[col] = v
        ns = nullspace(list(rows.values()), len(mons), self.field)
        out = []
        for vec in ns:
            top = max(vec)
            scale = 1 / vec[top] if self.field.p is None else self.field.one / vec[top]
            out.append(AlgebraElement(self.Be, {mons[c]: v * scale for c, v in vec.items() if v}))
        cache[k] = out
        return out

    def J_basis_t(self, k: int) -> list[AlgebraElement]:
        """Independent basis of J_k: t-monomials of positive t-degree, pulled back to B^e."""
        return [self.from_t(self.T.monomial(m)) for m in self.T.monomial_basis(k) if self.t_degree(m) > 0]


def build_enveloping(B: DgAlgebra) -> EnvelopingAlgebra:
    env = EnvelopingAlgebra(B)
    rep = env.validate()
    if not rep.valid:
        raise ValueError(f"enveloping algebra failed validation: {rep.failures}")
    return env


def universal_derivation(env: EnvelopingAlgebra, b: AlgebraElement) -> AlgebraElement:
    return env.delta(b)


# targets -------------------------------------------------------------------


class EnvelopingTarget(AlgebraTarget):
    """X = B^e; B acts on the left through the left copy, on the right through the right copy."""

    name = "Be"
    symmetric = False

    def __init__(self, env: EnvelopingAlgebra):
        super().__init__(env.B, env.Be)
        self.env = env

    def left(self, b, y):
        return self.env.L(b) * y

    def right(self, y, b):
        return y * self.env.R(b)

    def act(self, y, w):
        return y * w

    def basis(self, k):
        return [self.alg.monomial(m) for m in self.alg.monomial_basis(k)]

    def dim(self, k):
        return len(self.alg.monomial_basis(k))


class DiagonalTarget(EnvelopingTarget):
    """X = J, the diagonal ideal."""

    name = "J"

    def basis(self, k):
        return self.env.J_basis(k)

    def dim(self, k):
        if k < 0:
            return 0
        return len(self.alg.monomial_basis(k)) - len(self.B.monomial_basis(k))


@dataclass
class DiagonalIdealSlice:
    bases: dict
    maps: dict
    lo: int
    hi: int

    def dim(self, k: int) -> int:
        return len(self.bases[k])


def diagonal_ideal_slice(env: EnvelopingAlgebra, lo: int, hi: int) -> DiagonalIdealSlice:
    """Bases of J_k for k in the window, with differentials; closure under d is checked."""
    bases, maps = {}, {}
    for k in range(max(lo, 0), hi + 1):
        bs = env.J_basis(k)
        expect = len(env.Be.monomial_basis(k)) - len(env.B.monomial_basis(k))
        if len(bs) != expect:
            raise CrossCheckError(f"dim J_{k} = {len(bs)}, expected {expect}")
        for v in bs:
            if not env.in_J(v):
                raise CrossCheckError("kernel basis vector not killed by pi_B")
            if not env.in_J(v.d()):
                raise CrossCheckError("J is not closed under the differential")
        bases[k] = bs
        maps[k] = [dict(v.d().terms) for v in bs]
    for k in range(lo, 0):
        bases[k], maps[k] = [], []
    return DiagonalIdealSlice(bases, maps, lo, hi)


# Omega ---------------------------------------------------------------------


class Omega:
    """The differential module J/J^2 as a semifree B-module on ``u_i``.

    ``c[(mu, lam)]`` is the coefficient of ``u_mu`` in the differential of
    ``u_lam``; it equals the dual-basis derivative of ``d(X_lam)`` along
    ``X_mu``.  Construction cross-checks this against projecting
    ``d(delta(X_lam))`` from J.
    """

    def __init__(self, env: EnvelopingAlgebra):
        self.env = env
        B = env.B
        self.B = B
        self.ext = env.ext
        self.pos = {i: k for k, i in enumerate(env.ext)}
        basis = [(f"u[{B.names[i]}]", B.degrees[i]) for i in env.ext]
        diff = {}
        self.c = {}
        for lam in env.ext:
            col = {}
            for mu in env.ext:
                v = partial_derivative(B, mu, B.dimage(lam))
                if v:
                    col[self.pos[mu]] = v
                    self.c[(self.pos[mu], self.pos[lam])] = v
            if col:
                diff[basis[self.pos[lam]][0]] = col
        self.module = SemifreeModule(B, basis, diff, name="Omega")
        rep = validate_module(self.module)
        if not rep.valid:
            raise ValueError(f"Omega is not semifree on the u-basis: {rep.failures}")
        for lam in env.ext:
            via_j = self.project(env.delta(B.gen(lam)).d())
            direct = self.module.d(self.u(lam))
            if via_j != direct:
                raise CrossCheckError(
                    f"differential of u[{B.names[lam]}]: {direct} from coefficients, {via_j} from J/J^2"
                )
        self.target = OmegaTarget(self)

    def u(self, i: int, c=1) -> TensorElement:
        """``u_i * c`` for an extension generator index ``i`` of B."""
        return self.module.element(self.pos[i], c)

    def project(self, j: AlgebraElement) -> TensorElement:
        """Class of ``j`` in J/J^2, written over the u-basis with B-coefficients."""
        env = self.env
        B = self.B
        nb_ne = env.nb + env.ne
        out = self.module.zero()
        comps: dict = {}
        for m, c in env.to_t(j).terms.items():
            td = env.t_degree(m)
            if td == 0:
                raise NotInIdealError(f"{j} is not in the diagonal ideal")
            if td > 1:
                continue
            i = next(i for i in env.ext if m[env.t_pos[i]])
            bm = m[:nb_ne]
            # m = bm * t_i  ->  bm * u_i = (-1)^{|bm||u_i|} u_i * bm
            v = c
            if (B.mono_degree(bm) * B.degrees[i]) & 1:
                v = -v
            lam = self.pos[i]
            term = B.monomial(bm, v)
            comps[lam] = comps[lam] + term if lam in comps else term
        comps = {k: v for k, v in comps.items() if v}
        return TensorElement(out.space, comps)

    def delta_bar(self, b: AlgebraElement) -> TensorElement:
        return self.project(self.env.delta(b))


class OmegaTarget(Target):
    name = "Omega"
    symmetric = True

    def __init__(self, om: Omega):
        super().__init__(om.B)
        self.om = om
        self.space = om.module.space

    def zero(self):
        return self.space.zero()

    def d(self, y):
        return self.space.d(y)

    def right(self, y, b):
        return self.space.right(y, b)

    def left(self, b, y):
        out = self.space.zero()
        for db, bp in b.homogeneous_parts().items():
            for dy, yp in y.parts().items():
                t = self.space.right(yp, bp)
                out = out - t if (db * dy) & 1 else out + t
        return out

    def act(self, y, w):
        return self.space.right(y, self.om.env.pi(w))

    def basis(self, k):
        return self.space.basis(k)

    def dim(self, k):
        return self.space.dim(k)

    def coords(self, y):
        return self.space.coords(y)

    def parts(self, y):
        return y.parts()

    def fmt(self, y):
        return str(y)

    def fmt_key(self, key):
        return self.space.fmt_key(key)


def build_omega(env: EnvelopingAlgebra) -> Omega:
    return Omega(env)


def project_J_to_omega(om: Omega, j: AlgebraElement) -> TensorElement:
    return om.project(j)


# tensor complexes ------------------------------------------------------------


def tensor_with(N: SemifreeModule, target: Target) -> TensorSpace:
    return TensorSpace(N, target)


def pi_N(N: SemifreeModule, env: EnvelopingAlgebra, z: TensorElement) -> TensorElement:
    """``N (x)_A B -> N``, ``e (x) w -> e * pi_B(w)``."""
    out = {}
    for lam, w in z.comps.items():
        v = env.pi(w)
        if v:
            out[lam] = v
    return TensorElement(N.space, out)


@dataclass
class ExactnessReport:
    degrees: dict
    valid: bool


def check_exact_sequence(N: SemifreeModule, env: EnvelopingAlgebra, lo: int, hi: int) -> ExactnessReport:
    """Degree-wise exactness of ``0 -> N (x)_B J -> N (x)_A B -> N -> 0``.

    For each degree records ``(dim N(x)J, dim N(x)B^e, dim N, rank pi_N)``;
    exactness means rank pi_N = dim N, the kernel has the dimension of N (x) J,
    and N (x) J is killed by pi_N.
    """
    SJ = TensorSpace(N, DiagonalTarget(env))
    SE = TensorSpace(N, EnvelopingTarget(env))
    out = {}
    ok = True
    for k in range(lo, hi + 1):
        dJ, dE, dN = SJ.dim(k), SE.dim(k), N.space.dim(k)
        rows = []
        keys: dict = {}
        for z in SE.basis(k):
            img = N.space.coords(pi_N(N, env, z))
            rows.append({keys.setdefault(c, len(keys)): v for c, v in img.items()})
        # rank of the map = rank of the transpose rows
        r = rank(rows, env.field)
        killed = all(not pi_N(N, env, z) for z in SJ.basis(k))
        good = r == dN and dE - r == dJ and killed
        ok = ok and good
        out[k] = {"dim_NJ": dJ, "dim_NBe": dE, "dim_N": dN, "rank_pi": r, "exact": good}
    return ExactnessReport(out, ok)
