"""Brute-force reference implementations used to cross-check the kernel.

Nothing here calls the kernel's arithmetic: elements are dictionaries from
sorted generator words to sympy rationals, products are normalized by
bubble sort with explicit sign counting, and the homotopy question is
solved densely over the whole of N (x) B^e with membership in N (x) J
imposed as extra equations.
"""
from __future__ import annotations

from itertools import combinations_with_replacement

from sympy import Rational
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix


class WordAlgebra:
    """Free graded-commutative algebra; an element is {sorted word: coefficient}."""

    def __init__(self, degrees, dimages=None):
        self.degrees = list(degrees)
        self.dimages = dimages or [dict() for _ in self.degrees]

    def deg(self, w) -> int:
        return sum(self.degrees[i] for i in w)

    def normalize(self, w):
        """Sort a word; returns (sign, sorted word) or (0, None) when an odd letter repeats."""
        w = list(w)
        sign = 1
        for i in range(len(w)):
            for j in range(len(w) - 1 - i):
                if w[j] > w[j + 1]:
                    if self.degrees[w[j]] % 2 and self.degrees[w[j + 1]] % 2:
                        sign = -sign
                    w[j], w[j + 1] = w[j + 1], w[j]
        for a, b in zip(w, w[1:]):
            if a == b and self.degrees[a] % 2:
                return 0, None
        return sign, tuple(w)

    def add_into(self, acc, w, c):
        if not c:
            return
        v = acc.get(w, 0) + c
        if v:
            acc[w] = v
        else:
            acc.pop(w, None)

    def mul(self, p, q):
        out = {}
        for a, ca in p.items():
            for b, cb in q.items():
                s, w = self.normalize(a + b)
                if s:
                    self.add_into(out, w, s * ca * cb)
        return out

    def add(self, p, q, c=1):
        out = dict(p)
        for w, v in q.items():
            self.add_into(out, w, c * v)
        return out

    def d(self, p):
        out = {}
        for w, c in p.items():
            for k, g in enumerate(w):
                sign = -1 if self.deg(w[:k]) % 2 else 1
                term = self.mul(self.mul({w[:k]: 1}, self.dimages[g]), {w[k + 1:]: 1})
                out = self.add(out, term, sign * c)
        return out

    def partial(self, lam, p):
        """Derivative along generator ``lam``: drop one occurrence, sign from the letters before it."""
        out = {}
        for w, c in p.items():
            for k, g in enumerate(w):
                if g != lam:
                    continue
                sign = -1 if (self.degrees[lam] * self.deg(w[:k])) % 2 else 1
                s, rest = self.normalize(w[:k] + w[k + 1:])
                self.add_into(out, rest, sign * c * s)
        return out

    def basis(self, n):
        """All sorted words of degree n."""
        if n < 0:
            return []
        out = []
        gens = range(len(self.degrees))
        top = n // min(self.degrees) if self.degrees else 0
        for length in range(top + 1):
            for w in combinations_with_replacement(gens, length):
                if self.deg(w) != n:
                    continue
                s, v = self.normalize(w)
                if s:
                    out.append(v)
        return sorted(set(out))


def word_of(exps) -> tuple:
    return tuple(i for i, e in enumerate(exps) for _ in range(e))


def from_kernel(elem) -> dict:
    """Kernel element -> word dictionary (exponent vectors are already in canonical order)."""
    return {word_of(m): Rational(c.numerator, c.denominator) for m, c in elem.terms.items()}


def word_algebra_of(B) -> WordAlgebra:
    W = WordAlgebra(B.degrees)
    W.dimages = [from_kernel(B.dimage(i)) for i in range(B.ngens)]
    return W


class EnvelopingOracle:
    """B^e on generators (all of B, then a primed copy of the adjoined ones)."""

    def __init__(self, B):
        self.B = B
        self.W = word_algebra_of(B)
        self.ext = list(B.extension_indices)
        n = B.ngens
        self.prime = {i: n + k for k, i in enumerate(self.ext)}
        degs = list(B.degrees) + [B.degrees[i] for i in self.ext]
        self.E = WordAlgebra(degs)
        dimg = [dict(p) for p in self.W.dimages] + [self.right(self.W.dimages[i]) for i in self.ext]
        self.E.dimages = dimg

    def left(self, p):
        return dict(p)

    def right(self, p):
        out = {}
        for w, c in p.items():
            ren = tuple(self.prime.get(g, g) for g in w)
            s, v = self.E.normalize(ren)
            if s:
                out[v] = out.get(v, 0) + s * c
        return {w: c for w, c in out.items() if c}

    def delta(self, p):
        return self.E.add(self.left(p), self.right(p), -1)

    def pi(self, p):
        back = {v: k for k, v in self.prime.items()}
        out = {}
        for w, c in p.items():
            s, v = self.W.normalize(tuple(back.get(g, g) for g in w))
            if s:
                self.W.add_into(out, v, s * c)
        return out


def dense_homotopy_verdict(N) -> bool:
    """Is the Atiyah map of N null-homotopic?  Dense solve over all of N (x) B^e.

    Unknowns: coefficients of h(e_lam) on e_mu (x) w for every B^e word w of the
    right degree.  Equations: d h(e_lam) - sum_nu h(e_nu) R(b_nu_lam) = alpha(e_lam),
    and pi(component of h(e_lam) at e_mu) = 0 so that h lands in N (x) J.
    """
    B = N.B
    env = EnvelopingOracle(B)
    E = env.E
    degs = N.degrees
    b = [{mu: from_kernel(c) for mu, c in col.items()} for col in N.b]
    unknowns = []
    for lam in range(N.rank):
        for mu in range(N.rank):
            for w in E.basis(degs[lam] - degs[mu]):
                unknowns.append((lam, mu, w))
    index = {u: k for k, u in enumerate(unknowns)}
    rows: dict = {}

    def put(key, col, v):
        r = rows.setdefault(key, {})
        r[col] = r.get(col, 0) + v

    rhs: dict = {}
    for lam in range(N.rank):
        for mu, c in b[lam].items():
            for w, v in env.delta(c).items():
                rhs[("eq", lam, mu, w)] = rhs.get(("eq", lam, mu, w), 0) + v
    for (lam, mu, w), col in index.items():
        # d(e_mu (x) w) = sum_nu e_nu (x) L(b_nu_mu) w + (-1)^{|e_mu|} e_mu (x) dw
        for nu, c in b[mu].items():
            for w2, v in E.mul(env.left(c), {w: 1}).items():
                put(("eq", lam, nu, w2), col, v)
        sgn = -1 if degs[mu] % 2 else 1
        for w2, v in E.d({w: 1}).items():
            put(("eq", lam, mu, w2), col, sgn * v)
        # - sum_nu h(e_nu) R(b_nu_lam): unknown (nu, mu, w) feeds equation lam' with b_nu_lam'
        for lam2 in range(N.rank):
            c = b[lam2].get(lam)
            if c is None:
                continue
            for w2, v in E.mul({w: 1}, env.right(c)).items():
                put(("eq", lam2, mu, w2), col, -v)
        for w2, v in env.pi({w: 1}).items():
            put(("pi", lam, mu, w2), col, v)
    keys = sorted(set(rows) | set(rhs), key=repr)
    n = len(unknowns)
    A = [[QQ(0)] * (n + 1) for _ in keys]
    for r, key in enumerate(keys):
        for col, v in rows.get(key, {}).items():
            A[r][col] += QQ.from_sympy(Rational(v))
        A[r][n] = QQ.from_sympy(Rational(rhs.get(key, 0)))
    if not keys:
        return True
    aug = DomainMatrix(A, (len(keys), n + 1), QQ)
    coef = DomainMatrix([row[:n] for row in A], (len(keys), n), QQ) if n else None
    rk_aug = aug.rank()
    rk = coef.rank() if coef is not None else 0
    return rk == rk_aug


def der_dimension_free_target(B, n: int, target_dim) -> int:
    """dim Der_A(B, X)_n when X is symmetric: values on the adjoined generators are free."""
    return sum(target_dim(n + B.degrees[i]) for i in B.extension_indices)
