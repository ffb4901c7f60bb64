"""Line-oriented instance documents.

::

    field Q                      # or: field Fp 7
    algebra A
      gen y deg 1 d 0
    algebra B extends A
      gen x deg 2 d y
    module N over B
      basis e0 deg 0
      basis e1 deg 4
      d e1 = e0*x*y
    derivation D deg -2
      image x = 1

``#`` starts a comment.  Indentation is optional: ``gen``, ``basis``/``d``
and ``image`` lines attach to the most recent algebra, module or derivation.
An algebra without ``extends`` is a free extension of the ground field.
Parsing produces an :class:`InstanceDocument` of plain values; it is
elaborated into algebras and modules by :func:`elaborate`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field

from .. import expr as _expr
from ..dgmod import SemifreeModule, TensorElement, parse_module_expr
from ..derivations import Derivation
from ..dgmod import BTarget
from ..gca import DgAlgebra
from ..scalars import Field


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class GenDecl:
    name: str
    degree: int
    d: tuple | None  # expression AST, None for 0
    line: int = dc_field(default=0, compare=False)


@dataclass
class AlgebraDecl:
    name: str
    extends: str | None
    gens: list = dc_field(default_factory=list)
    line: int = dc_field(default=0, compare=False)


@dataclass
class ModuleDecl:
    name: str
    over: str
    basis: list = dc_field(default_factory=list)  # (name, degree)
    diffs: list = dc_field(default_factory=list)  # (name, AST or None)
    line: int = dc_field(default=0, compare=False)
    diff_lines: list = dc_field(default_factory=list, compare=False)


@dataclass
class DerivationDecl:
    name: str
    degree: int
    images: list = dc_field(default_factory=list)  # (gen, AST)
    line: int = dc_field(default=0, compare=False)
    image_lines: list = dc_field(default_factory=list, compare=False)


@dataclass
class InstanceDocument:
    field: tuple = ("Q", None)
    algebras: list = dc_field(default_factory=list)
    modules: list = dc_field(default_factory=list)
    derivations: list = dc_field(default_factory=list)

    def algebra(self, name: str) -> AlgebraDecl:
        for a in self.algebras:
            if a.name == name:
                return a
        raise KeyError(name)

    def module(self, name: str) -> ModuleDecl:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)


_IDENT = r"[A-Za-z][A-Za-z0-9_]*"
_INT = r"-?\d+"
_RE = {
    "field": re.compile(rf"^field\s+(Q|Fp\s+(\d+))$"),
    "algebra": re.compile(rf"^algebra\s+({_IDENT})(?:\s+extends\s+({_IDENT}))?$"),
    "gen": re.compile(rf"^gen\s+({_IDENT})\s+deg\s+({_INT})\s+d\s+(.+)$"),
    "module": re.compile(rf"^module\s+({_IDENT})\s+over\s+({_IDENT})$"),
    "basis": re.compile(rf"^basis\s+({_IDENT})\s+deg\s+({_INT})$"),
    "d": re.compile(rf"^d\s+({_IDENT})\s*=\s*(.+)$"),
    "derivation": re.compile(rf"^derivation\s+({_IDENT})\s+deg\s+({_INT})$"),
    "image": re.compile(rf"^image\s+({_IDENT})\s*=\s*(.+)$"),
}
_KEYWORDS = {"field", "algebra", "gen", "module", "basis", "d", "derivation", "image", "deg", "extends", "over"}


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def _parse_rhs(text: str, line: int, col: int):
    if text.strip() == "0":
        return None
    try:
        return _expr.parse_expr(text)
    except _expr.ExprSyntaxError as e:
        raise ParseError(str(e), line, col + e.column - 1) from None


def parse_document(text: str) -> InstanceDocument:
    """Syntax only: build the document tree without resolving names."""
    doc = InstanceDocument()
    seen_field = False
    current = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        indent = len(body) - len(body.lstrip())
        s = body.strip()
        word = s.split()[0]
        col = indent + 1
        if word == "field":
            m = _RE["field"].match(s)
            if not m:
                raise ParseError("expected 'field Q' or 'field Fp <prime>'", ln, col)
            if seen_field:
                raise ParseError("field declared twice", ln, col)
            if doc.algebras:
                raise ParseError("field must come before any algebra", ln, col)
            seen_field = True
            if m.group(2):
                p = int(m.group(2))
                if p == 2 or not _is_prime(p):
                    raise ParseError(f"{p} is not an odd prime", ln, col + s.index(m.group(2)))
                doc.field = ("Fp", p)
            continue
        if word == "algebra":
            m = _RE["algebra"].match(s)
            if not m:
                raise ParseError("expected 'algebra <name> [extends <name>]'", ln, col)
            current = AlgebraDecl(m.group(1), m.group(2), line=ln)
            doc.algebras.append(current)
            continue
        if word == "gen":
            m = _RE["gen"].match(s)
            if not m:
                raise ParseError("expected 'gen <id> deg <n> d <expr|0>'", ln, col)
            if not isinstance(current, AlgebraDecl):
                raise ParseError("'gen' outside an algebra block", ln, col)
            tree = _parse_rhs(m.group(3), ln, col + m.start(3))
            current.gens.append(GenDecl(m.group(1), int(m.group(2)), tree, line=ln))
            continue
        if word == "module":
            m = _RE["module"].match(s)
            if not m:
                raise ParseError("expected 'module <name> over <algebra>'", ln, col)
            current = ModuleDecl(m.group(1), m.group(2), line=ln)
            doc.modules.append(current)
            continue
        if word == "basis":
            m = _RE["basis"].match(s)
            if not m:
                raise ParseError("expected 'basis <id> deg <n>'", ln, col)
            if not isinstance(current, ModuleDecl):
                raise ParseError("'basis' outside a module block", ln, col)
            if current.diffs:
                raise ParseError("basis lines must precede differential lines", ln, col)
            current.basis.append((m.group(1), int(m.group(2))))
            continue
        if word == "d":
            m = _RE["d"].match(s)
            if not m:
                raise ParseError("expected 'd <id> = <expr|0>'", ln, col)
            if not isinstance(current, ModuleDecl):
                raise ParseError("'d' outside a module block", ln, col)
            tree = _parse_rhs(m.group(2), ln, col + m.start(2))
            current.diffs.append((m.group(1), tree))
            current.diff_lines.append(ln)
            continue
        if word == "derivation":
            m = _RE["derivation"].match(s)
            if not m:
                raise ParseError("expected 'derivation <name> deg <n>'", ln, col)
            current = DerivationDecl(m.group(1), int(m.group(2)), line=ln)
            doc.derivations.append(current)
            continue
        if word == "image":
            m = _RE["image"].match(s)
            if not m:
                raise ParseError("expected 'image <gen> = <expr>'", ln, col)
            if not isinstance(current, DerivationDecl):
                raise ParseError("'image' outside a derivation block", ln, col)
            tree = _parse_rhs(m.group(2), ln, col + m.start(2))
            current.images.append((m.group(1), tree))
            current.image_lines.append(ln)
            continue
        raise ParseError(f"unknown keyword {word!r}", ln, col)
    if not seen_field:
        raise ParseError("missing 'field' declaration", 1, 1)
    return doc


def format_document(doc: InstanceDocument) -> str:
    out = ["field Q" if doc.field[0] == "Q" else f"field Fp {doc.field[1]}"]
    for a in doc.algebras:
        out.append(f"algebra {a.name}" + (f" extends {a.extends}" if a.extends else ""))
        for g in a.gens:
            out.append(f"  gen {g.name} deg {g.degree} d {'0' if g.d is None else _expr.format_expr(g.d)}")
    for m in doc.modules:
        out.append(f"module {m.name} over {m.over}")
        for b, dg in m.basis:
            out.append(f"  basis {b} deg {dg}")
        for b, tree in m.diffs:
            out.append(f"  d {b} = {'0' if tree is None else _expr.format_expr(tree)}")
    for dv in doc.derivations:
        out.append(f"derivation {dv.name} deg {dv.degree}")
        for g, tree in dv.images:
            out.append(f"  image {g} = {'0' if tree is None else _expr.format_expr(tree)}")
    return "\n".join(out) + "\n"


# elaboration ---------------------------------------------------------------


@dataclass
class Instance:
    document: InstanceDocument
    field: Field
    algebras: dict
    modules: dict
    derivations: dict
    top: str | None

    def module(self, name: str | None = None) -> SemifreeModule:
        if name is None:
            if len(self.modules) != 1:
                raise KeyError("the document declares several modules; choose one")
            return next(iter(self.modules.values()))
        if name not in self.modules:
            raise KeyError(f"unknown module {name!r}")
        return self.modules[name]

    @property
    def B(self) -> DgAlgebra:
        return self.algebras[self.top]


def _chain(doc: InstanceDocument, name: str, line: int) -> list[AlgebraDecl]:
    seen = []
    cur = name
    while cur is not None:
        try:
            a = doc.algebra(cur)
        except KeyError:
            raise ParseError(f"unknown algebra {cur!r}", line) from None
        if a in seen:
            raise ParseError(f"cyclic 'extends' involving {cur!r}", a.line)
        seen.append(a)
        cur = a.extends
    return list(reversed(seen))


def _build_algebra(doc: InstanceDocument, F: Field, decl: AlgebraDecl) -> DgAlgebra:
    chain = _chain(doc, decl.name, decl.line)
    gens, diffs, lines = [], [], []
    for a in chain:
        for g in a.gens:
            if g.name in _KEYWORDS:
                raise ParseError(f"{g.name!r} is a keyword", g.line)
            if g.degree < 1:
                raise ParseError(f"generator {g.name} has degree {g.degree}; degrees must be at least 1", g.line)
            gens.append((g.name, g.degree, a is not decl))
            diffs.append(g)
    names = [g[0] for g in gens]
    if len(set(names)) != len(names):
        dup = next(n for n in names if names.count(n) > 1)
        raise ParseError(f"generator {dup!r} declared twice", decl.line)
    alg = DgAlgebra(F, gens, name=decl.name)
    for k, g in enumerate(diffs):
        if g.d is None:
            continue
        earlier = set(names[:k])
        for n in _expr.names_in(g.d):
            if n not in alg.index:
                raise ParseError(f"unknown name {n!r} in d({g.name})", g.line)
            if n not in earlier:
                raise ParseError(f"d({g.name}) refers to {n!r}, which is not declared before it", g.line)
        val = _expr.evaluate(g.d, alg.gen, lambda a, b: a * b, alg.one(), alg.scalar)
        if val and not val.is_homogeneous:
            raise ParseError(f"d({g.name}) is not homogeneous", g.line)
        if val and val.degree != g.degree - 1:
            raise ParseError(f"d({g.name}) has degree {val.degree}, expected {g.degree - 1}", g.line)
        alg.set_dimage(k, val)
    return alg


def elaborate(doc: InstanceDocument) -> Instance:
    F = Field() if doc.field[0] == "Q" else Field(doc.field[1])
    names = [a.name for a in doc.algebras]
    if len(set(names)) != len(names):
        raise ParseError("algebra declared twice", doc.algebras[-1].line)
    algebras = {a.name: _build_algebra(doc, F, a) for a in doc.algebras}
    top = doc.algebras[-1].name if doc.algebras else None
    modules = {}
    for m in doc.modules:
        if m.over not in algebras:
            raise ParseError(f"unknown algebra {m.over!r}", m.line)
        if m.over != top:
            raise ParseError(f"modules must be declared over the extension {top!r}", m.line)
        B = algebras[m.over]
        bnames = [b for b, _ in m.basis]
        if len(set(bnames)) != len(bnames):
            raise ParseError("basis element declared twice", m.line)
        for b in bnames:
            if b in B.index or b in _KEYWORDS:
                raise ParseError(f"basis name {b!r} clashes with a generator or keyword", m.line)
        N = SemifreeModule(B, m.basis, name=m.name)
        seen = set()
        for (b, tree), ln in zip(m.diffs, m.diff_lines or [m.line] * len(m.diffs)):
            if b not in N.index:
                raise ParseError(f"unknown basis element {b!r}", ln)
            if b in seen:
                raise ParseError(f"differential of {b} given twice", ln)
            seen.add(b)
            if tree is None:
                continue
            lam = N.index[b]
            for n in _expr.names_in(tree):
                if n in N.index:
                    if N.index[n] >= lam:
                        raise ParseError(f"d({b}) refers to {n!r}, which is not earlier in the basis", ln)
                elif n not in B.index:
                    raise ParseError(f"unknown name {n!r} in d({b})", ln)
            try:
                val = parse_module_expr(N, _expr.format_expr(tree))
            except ValueError as e:
                raise ParseError(str(e), ln) from None
            ps = val.parts()
            if len(ps) > 1:
                raise ParseError(f"d({b}) is not homogeneous", ln)
            if ps and next(iter(ps)) != N.degrees[lam] - 1:
                raise ParseError(f"d({b}) has degree {next(iter(ps))}, expected {N.degrees[lam] - 1}", ln)
            N.b[lam] = dict(val.comps)
        modules[m.name] = N
    derivations = {}
    for dv in doc.derivations:
        if top is None:
            raise ParseError("derivation declared without an algebra", dv.line)
        B = algebras[top]
        imgs = {}
        for (g, tree), ln in zip(dv.images, dv.image_lines or [dv.line] * len(dv.images)):
            if g not in B.index or B.is_base[B.index[g]]:
                raise ParseError(f"{g!r} is not an adjoined generator of {top}", ln)
            if tree is None:
                continue
            for n in _expr.names_in(tree):
                if n not in B.index:
                    raise ParseError(f"unknown name {n!r}", ln)
            val = _expr.evaluate(tree, B.gen, lambda a, b: a * b, B.one(), B.scalar)
            if val and (not val.is_homogeneous or val.degree != dv.degree + B.degrees[B.index[g]]):
                raise ParseError(f"image of {g} must be homogeneous of degree {dv.degree + B.degrees[B.index[g]]}", ln)
            imgs[B.index[g]] = val
        derivations[dv.name] = Derivation(B, BTarget(B), dv.degree, imgs)
    return Instance(doc, F, algebras, modules, derivations, top)


def parse_instance(text: str) -> InstanceDocument:
    """Parse and check a document: names, triangularity, degrees, homogeneity."""
    doc = parse_document(text)
    elaborate(doc)
    return doc


def load_instance(text: str) -> Instance:
    return elaborate(parse_document(text))
