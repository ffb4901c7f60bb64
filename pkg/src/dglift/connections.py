"""D-connections on a semifree module N with values in N (x)_B X.

A connection is stored as its derivation D together with its values on
the basis of N; on ``x = sum e_lam c_lam`` it acts as
``sum psi(e_lam) c_lam + (-1)^{|D||e_lam|} e_lam (x) D(c_lam)``.
The trivial connection has all basis values zero, and two D-connections
differ by a B-linear map, so (D, basis values) is a complete normal form.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Callable

from .dgmod import (
    BTarget,
    GradedHom,
    SemifreeModule,
    Target,
    TensorElement,
    TensorSpace,
    hom_dim,
    sgn,
)
from .derivations import (
    Derivation,
    bracket,
    der_basis,
    der_differential,
    is_well_defined,
)
from .gca import AlgebraElement
from .linalg import KeyedSystem, rank


class Connection:
    def __init__(self, N: SemifreeModule, space: TensorSpace, D: Derivation, corrections: dict | None = None):
        if space.N is not N or type(space.X) is not type(D.target):
            raise ValueError("tensor space does not match the module and derivation target")
        self.N = N
        self.space = space
        self.D = D
        self.corr = {lam: z for lam, z in (corrections or {}).items() if z}

    @property
    def degree(self) -> int:
        return self.D.degree

    def correction(self, lam: int) -> TensorElement:
        return self.corr.get(lam, self.space.zero())

    def apply(self, x: TensorElement) -> TensorElement:
        S, n = self.space, self.degree
        out = S.zero()
        for lam, c in x.comps.items():
            z = self.corr.get(lam)
            if z is not None:
                out = out + S.right(z, c)
            y = self.D(c)
            if y:
                t = S.tensor(lam, y)
                out = out - t if (n * self.N.degrees[lam]) & 1 else out + t
        return out

    __call__ = apply

    def _like(self, D, corr):
        return Connection(self.N, self.space, D, corr)

    def __add__(self, other: "Connection") -> "Connection":
        corr = dict(self.corr)
        for lam, z in other.corr.items():
            corr[lam] = corr[lam] + z if lam in corr else z
        return self._like(self.D + other.D, corr)

    def __neg__(self):
        return self._like(-self.D, {lam: -z for lam, z in self.corr.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, b: AlgebraElement) -> "Connection":
        """``b psi``: a ``bD``-connection, ``(b psi)(x) = (-1)^{|b||psi(x)|} psi(x) b``."""
        S = self.space
        corr = {}
        for lam, z in self.corr.items():
            v = S.zero()
            for db, bp in b.homogeneous_parts().items():
                for dz, zp in z.parts().items():
                    t = S.right(zp, bp)
                    v = v - t if (db * dz) & 1 else v + t
            corr[lam] = v
        return self._like(self.D.scale(b), corr)

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return self.D == other.D and self.corr == other.corr

    def is_linear(self) -> bool:
        return not self.D.images

    def as_hom(self) -> GradedHom:
        """The B-linear map underlying a connection whose derivation is zero."""
        if not self.is_linear():
            raise ValueError("connection is not B-linear")
        return GradedHom(self.N, self.space, self.degree, dict(self.corr))

    def to_json(self) -> dict:
        return {
            "derivation": self.D.to_json(),
            "correction": {self.N.names[lam]: str(self.correction(lam)) for lam in range(self.N.rank)},
        }


def tensor_space(N: SemifreeModule, X: Target) -> TensorSpace:
    cache = N.__dict__.setdefault("_spaces", {})
    sp = cache.get(id(X))
    if sp is None:
        sp = cache[id(X)] = (TensorSpace(N, X), X)
    return sp[0]


def trivial_connection(N: SemifreeModule, D: Derivation, space: TensorSpace | None = None) -> Connection:
    return Connection(N, space or tensor_space(N, D.target), D, {})


def iota(f: GradedHom, D_zero: Derivation) -> Connection:
    """A B-linear map viewed as a connection over the zero derivation of its degree."""
    return Connection(f.source, f.target, D_zero._like(f.degree, {}), dict(f.images))


def nu(psi: Connection) -> Derivation:
    return psi.D


def apply_connection(psi: Connection, x: TensorElement) -> TensorElement:
    return psi.apply(x)


def conn_differential(psi: Connection) -> Connection:
    """``d o psi - (-1)^{|psi|} psi o d``, a connection over the differential of D."""
    S, N = psi.space, psi.N
    corr = {}
    s = sgn(psi.degree)
    for lam in range(N.rank):
        v = S.d(psi.corr[lam]) if lam in psi.corr else S.zero()
        w = psi.apply(N.diff_image(lam))
        v = v - w if s > 0 else v + w
        if v:
            corr[lam] = v
    return Connection(N, S, der_differential(psi.D), corr)


def conn_bracket(p1: Connection, p2: Connection) -> Connection:
    """Graded commutator of two connections with values in N itself."""
    if not isinstance(p1.space.X, BTarget):
        raise ValueError("the bracket needs connections into N (x)_B B")
    corr = {}
    s = sgn(p1.degree * p2.degree)
    for lam in range(p1.N.rank):
        v = p1.apply(p2.correction(lam)) - p2.apply(p1.correction(lam)) * s
        if v:
            corr[lam] = v
    return Connection(p1.N, p1.space, bracket(p1.D, p2.D), corr)


def sum_scale_bracket(p1: Connection, p2: Connection | None = None, *, op: str = "+", b: AlgebraElement | None = None) -> Connection:
    if op == "+":
        return p1 + p2
    if op == "-":
        return p1 - p2
    if op == "scale":
        return p1.scale(b)
    if op == "bracket":
        return conn_bracket(p1, p2)
    raise ValueError(f"unknown operation {op!r}")


def random_module_element(N: SemifreeModule, rng: random.Random, degree: int, terms: int = 3) -> TensorElement:
    out = N.zero()
    for lam, e in enumerate(N.degrees):
        c = N.B.random_element(rng, degree - e, terms)
        if c:
            out = out + N.space.tensor(lam, c)
    return out


def check_connection_rule(psi: Connection, rng: random.Random, samples: int = 10, max_degree: int = 6) -> bool:
    """Spot-check ``psi(x b) = psi(x) b + (-1)^{|D||x|} x (x) D(b)`` on random homogeneous pairs."""
    N, S, B = psi.N, psi.space, psi.N.B
    if not N.rank:
        return True
    lo = min(N.degrees)
    for _ in range(samples):
        x = random_module_element(N, rng, rng.randint(lo, lo + max_degree))
        b = B.random_element(rng, rng.randint(0, max_degree))
        if not x or not b:
            continue
        lhs = psi.apply(x * b)
        t = S.tensor_module(x, psi.D(b))
        rhs = S.right(psi.apply(x), b)
        rhs = rhs - t if (psi.degree * x.degree) & 1 else rhs + t
        if lhs != rhs:
            return False
    return True


# L-connections -------------------------------------------------------------


class LConnection:
    """A rule ``D -> nabla_D`` assigning a D-connection to each derivation ``D`` in L."""

    def __init__(self, N: SemifreeModule, space: TensorSpace, rule: Callable[[Derivation], Connection]):
        self.N = N
        self.space = space
        self.rule = rule

    def __call__(self, D: Derivation) -> Connection:
        return self.rule(D)

    def check_axioms(self, derivations: list, scalars: list, rng: random.Random) -> dict:
        """Sampled checks of additivity, B-linearity, nu o nabla = id and compatibility with d."""
        out = {"additive": True, "linear": True, "section": True, "dg": True}
        B = self.N.B
        for D in derivations:
            c = self(D)
            if c.D != D:
                out["section"] = False
            if conn_differential(c) != self(der_differential(D)):
                out["dg"] = False
            b = rng.choice(scalars)
            if self(D.scale(b)) != c.scale(b):
                out["linear"] = False
            E = rng.choice([E for E in derivations if E.degree == D.degree])
            if self(D + E) != c + self(E):
                out["additive"] = False
        return out


def curvature(nabla: LConnection, D1: Derivation, D2: Derivation) -> GradedHom:
    """``[nabla_D1, nabla_D2] - nabla_[D1, D2]``, a B-linear map."""
    if not isinstance(nabla.space.X, BTarget):
        raise ValueError("curvature needs connections along B")
    R = conn_bracket(nabla(D1), nabla(D2)) - nabla(bracket(D1, D2))
    if R.D.images:
        raise ArithmeticError("curvature has a nonzero derivation part")
    return GradedHom(R.N, R.space, D1.degree + D2.degree, dict(R.corr))


def section_for_free(N: SemifreeModule, X: Target) -> LConnection:
    """The trivial connections ``D -> phi(D)`` on a module with zero differential."""
    if not N.is_free:
        raise ValueError("module has a nonzero differential")
    S = tensor_space(N, X)
    return LConnection(N, S, lambda D: trivial_connection(N, D, S))


# the fundamental exact sequence ------------------------------------------------


@dataclass
class FundamentalSequenceDegree:
    n: int
    dim_hom: int
    dim_der: int
    dim_conn: int
    dim_ker_nu: int
    rank_nu: int
    image_in_der: bool
    iota_in_kernel: bool

    @property
    def exact(self) -> bool:
        return (
            self.dim_conn == self.dim_hom + self.dim_der
            and self.dim_ker_nu == self.dim_hom
            and self.rank_nu == self.dim_der
            and self.image_in_der
            and self.iota_in_kernel
        )


@dataclass
class FundamentalSequenceReport:
    target: str
    degrees: list = dc_field(default_factory=list)

    @property
    def exact(self) -> bool:
        return all(d.exact for d in self.degrees)


def connection_window(N: SemifreeModule) -> int:
    """Top degree of N needed so that every connection relation is seen."""
    B = N.B
    ext = [B.degrees[i] for i in B.extension_indices]
    top = max(N.degrees)
    if ext:
        top = max(top, min(N.degrees) + 2 * max(ext))
    return top


def connection_system(N: SemifreeModule, X: Target, n: int, top: int | None = None):
    """Linear system whose solutions are the degree-``n`` D-connections on N.

    Unknowns are the values of psi on a scalar basis ``e_lam * m`` of N up
    to degree ``top`` and the values of D on the adjoined generators; the
    equations are ``psi(x g) = psi(x) g + (-1)^{n|x|} x (x) D(g)`` for all
    generators ``g`` of B.  This does not use the normal form of
    ``Connection``; it is the independent side of the exactness check.
    """
    B = N.B
    S = TensorSpace(N, X)
    if top is None:
        top = connection_window(N)
    F = B.field
    sysm = KeyedSystem(F)
    xs = []
    for lam, e in enumerate(N.degrees):
        for k in range(0, top - e + 1):
            for m in B.monomial_basis(k):
                xs.append((lam, m))
    xset = set(xs)
    deg = {(lam, m): N.degrees[lam] + B.mono_degree(m) for lam, m in xs}
    gens = list(range(B.ngens))
    unit = {}
    for g in gens:
        u = [0] * B.ngens
        u[g] = 1
        unit[g] = tuple(u)
    gen_el = {g: B.gen(g) for g in gens}
    psi_cols = []
    for lam, m in xs:
        dx = deg[(lam, m)]
        for z in S.basis(dx + n):
            img: dict = {}

            def add(key, coords, s):
                for k, v in coords.items():
                    kk = key + (k,)
                    img[kk] = img.get(kk, F.zero) + (v if s > 0 else -v)

            # as psi(x g) in the equation labelled by (lam, m - g, g)
            for g in gens:
                if m[g]:
                    prev = list(m)
                    prev[g] -= 1
                    prev = tuple(prev)
                    s, mm = B.mono_mul(prev, unit[g])
                    if s and mm == m and (lam, prev) in xset:
                        add(("eq", lam, prev, g), S.coords(z), s)
            # as psi(x) in the equations (lam, m, g)
            for g in gens:
                if dx + B.degrees[g] <= top:
                    add(("eq", lam, m, g), S.coords(S.right(z, gen_el[g])), -1)
            sysm.add_unknown(("psi", lam, m, z), img)
            psi_cols.append(len(sysm.unknowns) - 1)
    d_cols = []
    for i in B.extension_indices:
        for y in X.basis(n + B.degrees[i]):
            img = {}
            for lam, m in xs:
                dx = deg[(lam, m)]
                if dx + B.degrees[i] > top:
                    continue
                t = S.tensor_module(N.space.tensor(lam, B.monomial(m)), y)
                s = -sgn(n * dx)
                for k, v in S.coords(t).items():
                    kk = ("eq", lam, m, i, k)
                    img[kk] = img.get(kk, F.zero) + (v if s > 0 else -v)
            sysm.add_unknown(("D", i, y), img)
            d_cols.append(len(sysm.unknowns) - 1)
    return sysm, psi_cols, d_cols, xs


def fundamental_sequence_degree(N: SemifreeModule, X: Target, n: int) -> FundamentalSequenceDegree:
    B = N.B
    F = B.field
    der = der_basis(B, X, n)
    S = TensorSpace(N, X)
    if N.rank == 0:
        # Conn(0, 0) is computed on the free module of rank one, where Hom = X_n.
        R = SemifreeModule(B, [("r", 0)], name="R")
        sub = fundamental_sequence_degree(R, X, n)
        return FundamentalSequenceDegree(
            n, 0, len(der), sub.dim_conn - X.dim(n), 0, sub.rank_nu, sub.image_in_der, True
        )
    dim_hom = hom_dim(N, S, n)
    sysm, psi_cols, d_cols, xs = connection_system(N, X, n)
    ns = sysm.nullspace()
    dset = set(d_cols)
    proj_rows = []
    image_ok = True
    for vec in ns:
        row = {c: v for c, v in vec.items() if c in dset}
        proj_rows.append(row)
        if row:
            imgs = {}
            for c, v in row.items():
                _, i, y = sysm.unknowns[c]
                imgs[i] = imgs[i] + y * v if i in imgs else y * v
            D = Derivation(B, X, n, {i: y for i, y in imgs.items() if y}, check=False)
            if not is_well_defined(D):
                image_ok = False
    r_nu = rank(proj_rows, F)
    # iota(Hom) lies in the solution space with D = 0
    iota_ok = True
    index = {}
    for c in psi_cols:
        _, lam, m, z = sysm.unknowns[c]
        index.setdefault((lam, m), []).append((c, z))
    for lam, e in enumerate(N.degrees):
        for z in S.basis(e + n):
            x = {}
            for (lam2, m), cols in index.items():
                if lam2 != lam:
                    continue
                val = S.right(z, B.monomial(m))
                coords = S.coords(val)
                # express val in the unknown basis of psi(e_lam m)
                basis_coords = [(c, S.coords(zb)) for c, zb in cols]
                sol = _express(coords, basis_coords, F)
                if sol is None:
                    iota_ok = False
                    continue
                x.update(sol)
            if sysm.residual(x):
                iota_ok = False
    return FundamentalSequenceDegree(
        n, dim_hom, len(der), len(ns), len(ns) - r_nu, r_nu, image_ok, iota_ok
    )


def _express(target: dict, basis: list, F) -> dict | None:
    """Coordinates of ``target`` in a list of vectors given as ``(label, coords)``."""
    from .linalg import solve

    keys: dict = {}
    for _, cs in basis:
        for k in cs:
            keys.setdefault(k, len(keys))
    for k in target:
        if k not in keys:
            return None
    rows = [dict() for _ in keys]
    for j, (_, cs) in enumerate(basis):
        for k, v in cs.items():
            rows[keys[k]][j] = v
    rhs = [F.zero] * len(keys)
    for k, v in target.items():
        rhs[keys[k]] = v
    sol = solve(rows, rhs, len(basis), F)
    if sol is None:
        return None
    return {basis[j][0]: v for j, v in sol.items()}


def fundamental_sequence(N: SemifreeModule, X: Target, lo: int, hi: int) -> FundamentalSequenceReport:
    rep = FundamentalSequenceReport(X.name)
    for n in range(lo, hi + 1):
        rep.degrees.append(fundamental_sequence_degree(N, X, n))
    return rep
