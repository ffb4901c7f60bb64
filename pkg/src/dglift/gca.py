"""Free strongly commutative graded algebras with Koszul signs.

A monomial is an exponent vector over the declared generators.  Even
generators are polynomial, odd generators are exterior.  The canonical
factor order is declaration order, so the product of two canonical monomials
only costs the Koszul sign of sliding odd factors past each other.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

from . import expr as _expr
from .scalars import Field, ModP, QQ, format_scalar

Monomial = tuple


@dataclass
class ValidationReport:
    """Outcome of a structural check; failures are ``(kind, subject, message)``."""

    failures: list = dc_field(default_factory=list)
    checks: list = dc_field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures

    def fail(self, kind: str, subject: str, message: str) -> None:
        self.failures.append((kind, subject, message))

    def passed(self, what: str) -> None:
        self.checks.append(what)

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        self.failures.extend((k, prefix + s, m) for k, s, m in other.failures)
        self.checks.extend(prefix + c for c in other.checks)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "checks": list(self.checks),
            "failures": [{"kind": k, "subject": s, "message": m} for k, s, m in self.failures],
        }


class DgAlgebra:
    """A free strongly commutative DG algebra over a field.

    ``generators`` is a sequence of ``(name, degree, is_base)``.  Base
    generators span the subalgebra A; the others are the adjoined variables
    of the extension A -> B.  ``differential`` maps generator names to their
    images, given as elements of this algebra, expression strings, or
    scalars.
    """

    def __init__(
        self,
        field: Field,
        generators: Sequence[tuple],
        differential: dict | None = None,
        *,
        name: str = "B",
        ordered_extension: bool = True,
    ):
        self.field = field
        self.name = name
        self.names = tuple(g[0] for g in generators)
        self.degrees = tuple(int(g[1]) for g in generators)
        self.is_base = tuple(bool(g[2]) if len(g) > 2 else False for g in generators)
        self.ordered_extension = ordered_extension
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.ngens = len(self.names)
        self.odd = tuple(i for i, d in enumerate(self.degrees) if d % 2)
        self._odd_set = frozenset(self.odd)
        self.base_indices = tuple(i for i in range(self.ngens) if self.is_base[i])
        self.extension_indices = tuple(i for i in range(self.ngens) if not self.is_base[i])
        self.unit = (0,) * self.ngens
        self._mul_cache: dict = {}
        self._d_cache: dict = {}
        self._basis_cache: dict = {}
        self._deg_cache: dict = {}
        self._dimg = [self.zero()] * self.ngens
        for gname, val in (differential or {}).items():
            if gname not in self.index:
                raise KeyError(f"unknown generator {gname!r}")
            self._dimg[self.index[gname]] = self.coerce(val)

    # construction ---------------------------------------------------------

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, {self.unit: self.field.one})

    def scalar(self, c) -> "AlgebraElement":
        c = self.field(c)
        return AlgebraElement(self, {self.unit: c} if c else {})

    def gen(self, name: str | int) -> "AlgebraElement":
        i = self.index[name] if isinstance(name, str) else name
        m = [0] * self.ngens
        m[i] = 1
        return AlgebraElement(self, {tuple(m): self.field.one})

    def monomial(self, m: Monomial, c=1) -> "AlgebraElement":
        c = self.field(c)
        return AlgebraElement(self, {tuple(m): c} if c else {})

    def parse(self, text: str) -> "AlgebraElement":
        tree = _expr.parse_expr(text)
        for n in _expr.names_in(tree):
            if n not in self.index:
                raise KeyError(f"unknown generator {n!r}")
        return _expr.evaluate(tree, self.gen, lambda a, b: a * b, self.one(), self.scalar)

    def coerce(self, val) -> "AlgebraElement":
        if isinstance(val, AlgebraElement):
            if val.alg is not self:
                raise ValueError("element of a different algebra")
            return val
        if isinstance(val, str):
            return self.parse(val)
        if val is None:
            return self.zero()
        return self.scalar(val)

    def set_dimage(self, name: str | int, val) -> None:
        """Set a generator's differential; only meant for use while building an algebra."""
        i = self.index[name] if isinstance(name, str) else name
        self._dimg[i] = self.coerce(val)
        self._d_cache.clear()

    def dimage(self, name: str | int) -> "AlgebraElement":
        i = self.index[name] if isinstance(name, str) else name
        return self._dimg[i]

    # monomial arithmetic --------------------------------------------------

    def mono_degree(self, m: Monomial) -> int:
        d = self._deg_cache.get(m)
        if d is None:
            d = sum(e * g for e, g in zip(m, self.degrees))
            self._deg_cache[m] = d
        return d

    def mono_mul(self, a: Monomial, b: Monomial) -> tuple[int, Monomial | None]:
        """Product of canonical monomials as ``(sign, monomial)``; sign 0 means zero."""
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        sign = 1
        res = None
        for j in self.odd:
            if b[j]:
                if a[j]:
                    res = (0, None)
                    break
                cnt = 0
                for i in self.odd:
                    if i > j and a[i]:
                        cnt += 1
                if cnt & 1:
                    sign = -sign
        if res is None:
            res = (sign, tuple(x + y for x, y in zip(a, b)))
        self._mul_cache[key] = res
        return res

    def normalize(self, factors: Iterable[str | int]) -> tuple[int, Monomial | None]:
        """Reorder a word in the generators into canonical form.

        Returns ``(sign, monomial)``, or ``(0, None)`` when an odd generator repeats.
        """
        sign, cur = 1, self.unit
        for f in factors:
            i = self.index[f] if isinstance(f, str) else f
            if not isinstance(i, int) or not 0 <= i < self.ngens:
                raise KeyError(f"unknown generator {f!r}")
            m = [0] * self.ngens
            m[i] = 1
            s, cur2 = self.mono_mul(cur, tuple(m))
            if s == 0:
                return 0, None
            sign *= s
            cur = cur2
        return sign, cur

    def d_mono(self, m: Monomial) -> "AlgebraElement":
        hit = self._d_cache.get(m)
        if hit is not None:
            return hit
        res = self.zero()
        prefix_deg = 0
        for i, e in enumerate(m):
            if e == 0:
                continue
            g = self._dimg[i]
            if g:
                prefix = m[:i] + (0,) * (self.ngens - i)
                suffix = (0,) * (i + 1) + m[i + 1:]
                if i in self._odd_set:
                    core = g
                else:
                    rest = [0] * self.ngens
                    rest[i] = e - 1
                    core = self.monomial(tuple(rest), e) * g
                term = self.monomial(prefix) * core * self.monomial(suffix)
                res = res - term if prefix_deg & 1 else res + term
            prefix_deg += e * self.degrees[i]
        self._d_cache[m] = res
        return res

    def monomial_basis(self, n: int) -> list[Monomial]:
        """Canonical monomials of degree ``n``, ascending in exponent-vector order."""
        if n < 0:
            return []
        hit = self._basis_cache.get(n)
        if hit is not None:
            return hit
        if any(d <= 0 for d in self.degrees):
            raise ValueError("monomial bases need positively graded generators")
        out = []
        exps = [0] * self.ngens

        def rec(i, left):
            if i == self.ngens:
                if left == 0:
                    out.append(tuple(exps))
                return
            dg = self.degrees[i]
            top = 1 if dg % 2 else left // dg
            for e in range(min(top, left // dg) + 1):
                exps[i] = e
                rec(i + 1, left - e * dg)
            exps[i] = 0

        rec(0, n)
        out.sort()
        self._basis_cache[n] = out
        return out

    def format_mono(self, m: Monomial) -> str:
        parts = []
        for i, e in enumerate(m):
            if e == 1:
                parts.append(self.names[i])
            elif e > 1:
                parts.append(f"{self.names[i]}^{e}")
        return "*".join(parts) if parts else "1"

    def random_element(self, rng: random.Random, degree: int, terms: int = 3, coeffs=(-2, -1, 1, 2)) -> "AlgebraElement":
        basis = self.monomial_basis(degree)
        if not basis:
            return self.zero()
        out = self.zero()
        for _ in range(rng.randint(1, terms)):
            out = out + self.monomial(rng.choice(basis), rng.choice(coeffs))
        return out

    def substitute(self, p: "AlgebraElement", images: Sequence["AlgebraElement"], target: "DgAlgebra", cache: dict | None = None) -> "AlgebraElement":
        """Algebra map determined by generator images (which must respect parity)."""
        out = target.zero()
        for m, c in p.terms.items():
            img = cache.get(m) if cache is not None else None
            if img is None:
                img = target.one()
                for i, e in enumerate(m):
                    for _ in range(e):
                        img = img * images[i]
                if cache is not None:
                    cache[m] = img
            out = out + img * c
        return out

    def __repr__(self):
        gens = ", ".join(f"{n}:{d}{'*' if b else ''}" for n, d, b in zip(self.names, self.degrees, self.is_base))
        return f"DgAlgebra({self.name}; {gens})"


class AlgebraElement:
    """Finite linear combination of canonical monomials with nonzero coefficients."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: DgAlgebra, terms: dict):
        self.alg = alg
        self.terms = terms

    def _check(self, other: "AlgebraElement"):
        if other.alg is not self.alg:
            raise ValueError("mismatched algebras")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            other = self.alg.scalar(other)
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            v = c if v is None else v + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return AlgebraElement(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            other = self.alg.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        alg = self.alg
        if isinstance(other, AlgebraElement):
            self._check(other)
            out: dict = {}
            mm = alg.mono_mul
            for a, ca in self.terms.items():
                for b, cb in other.terms.items():
                    s, m = mm(a, b)
                    if not s:
                        continue
                    v = ca * cb
                    if s < 0:
                        v = -v
                    old = out.get(m)
                    if old is not None:
                        v = old + v
                        if not v:
                            del out[m]
                            continue
                    out[m] = v
            return AlgebraElement(alg, out)
        if isinstance(other, (int, Fraction, ModP)):
            c = alg.field(other)
            if not c:
                return alg.zero()
            return AlgebraElement(alg, {m: v * c for m, v in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, ModP)):
            return self * other
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return other.alg is self.alg and other.terms == self.terms
        if isinstance(other, (int, Fraction, ModP)):
            return self == self.alg.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @property
    def degrees(self) -> set[int]:
        return {self.alg.mono_degree(m) for m in self.terms}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees) <= 1

    @property
    def degree(self) -> int | None:
        """Degree of a nonzero homogeneous element; None for zero."""
        ds = self.degrees
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError(f"inhomogeneous element {self}")
        return next(iter(ds))

    def homogeneous_parts(self) -> dict[int, "AlgebraElement"]:
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.alg.mono_degree(m), {})[m] = c
        return {d: AlgebraElement(self.alg, t) for d, t in parts.items()}

    def d(self) -> "AlgebraElement":
        out = self.alg.zero()
        for m, c in self.terms.items():
            dm = self.alg.d_mono(m)
            if dm:
                out = out + dm * c
        return out

    def coefficient(self, m: Monomial):
        return self.terms.get(tuple(m), self.alg.field.zero)

    def sorted_terms(self) -> list[tuple[Monomial, object]]:
        alg = self.alg
        return sorted(self.terms.items(), key=lambda t: (alg.mono_degree(t[0]), t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for k, (m, c) in enumerate(self.sorted_terms()):
            neg = _is_negative(c)
            mag = -c if neg else c
            ms = self.alg.format_mono(m)
            if ms == "1":
                body = format_scalar(mag)
            elif mag == 1:
                body = ms
            else:
                body = f"{format_scalar(mag)}*{ms}"
            if k == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append(("- " if neg else "+ ") + body)
        return " ".join(out)

    def __repr__(self):
        return f"<{self.alg.name}: {self}>"


def _is_negative(c) -> bool:
    if isinstance(c, Fraction):
        return c < 0
    return False


# operations ---------------------------------------------------------------


def normalize_monomial(alg: DgAlgebra, factors: Iterable[str]) -> tuple[int, Monomial | None]:
    return alg.normalize(factors)


def mul(p: AlgebraElement, q: AlgebraElement) -> AlgebraElement:
    return p * q


def apply_differential(p: AlgebraElement) -> AlgebraElement:
    return p.d()


def monomial_basis(alg: DgAlgebra, n: int) -> list[Monomial]:
    return alg.monomial_basis(n)


def partial_derivative(alg: DgAlgebra, gen: str | int, p: AlgebraElement) -> AlgebraElement:
    """The dual-basis derivation for an adjoined variable, applied to ``p``.

    It has degree ``-|X|``; on a canonical monomial the only surviving
    Leibniz term removes one factor of ``X`` with sign ``(-1)^(|X| * |prefix|)``.
    """
    i = alg.index[gen] if isinstance(gen, str) else gen
    if alg.is_base[i]:
        raise ValueError(f"{alg.names[i]} is not an extension generator")
    odd = alg.degrees[i] % 2
    out = {}
    for m, c in p.terms.items():
        e = m[i]
        if not e:
            continue
        v = c * e
        if not v:
            continue
        if odd:
            pdeg = sum(m[k] * alg.degrees[k] for k in range(i))
            if pdeg & 1:
                v = -v
        r = list(m)
        r[i] -= 1
        r = tuple(r)
        old = out.get(r)
        if old is not None:
            v = old + v
        if v:
            out[r] = v
        else:
            out.pop(r, None)
    return AlgebraElement(alg, out)


def validate_dgca(alg: DgAlgebra) -> ValidationReport:
    rep = ValidationReport()
    prev_ext = None
    for i, name in enumerate(alg.names):
        deg = alg.degrees[i]
        if deg < 1:
            rep.fail("degree", name, f"generator degree {deg} < 1 (algebras are connected)")
            continue
        img = alg.dimage(i)
        if img:
            if not img.is_homogeneous:
                rep.fail("homogeneity", name, f"d({name}) = {img} is not homogeneous")
            elif img.degree != deg - 1:
                rep.fail("degree", name, f"d({name}) has degree {img.degree}, expected {deg - 1}")
            used = {k for m in img.terms for k, e in enumerate(m) if e}
            if any(k >= i for k in used):
                rep.fail("order", name, f"d({name}) refers to a generator not declared before it")
            if alg.is_base[i] and any(not alg.is_base[k] for k in used):
                rep.fail("base", name, f"d({name}) leaves the base algebra")
        if not alg.is_base[i]:
            if alg.ordered_extension and prev_ext is not None and deg < prev_ext:
                rep.fail("order", name, "adjoined generators must have weakly increasing degrees")
            prev_ext = deg
        if img and img.d():
            rep.fail("d-squared", name, f"d(d({name})) = {img.d()} != 0")
    if rep.valid:
        rep.passed(f"{alg.name}: degrees, homogeneity and d^2 = 0 on {alg.ngens} generators")
    return rep
