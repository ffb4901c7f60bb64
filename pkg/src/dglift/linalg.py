"""Sparse exact linear algebra.

Rows are dicts ``column -> scalar``.  Elimination is Gauss-Jordan with
deterministic pivoting: columns are visited in increasing order and the pivot
is the unused row of smallest index with a nonzero entry there.  Over Q the
work is fraction-free (integer rows, content removed after every update);
over F_p it is ordinary modular elimination.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .scalars import Field, ModP

#: Upper bound on the number of unknowns in any assembled system.
MAX_UNKNOWNS = 250_000


class ResourceLimitError(RuntimeError):
    pass


def check_size(n_unknowns: int, what: str = "linear system") -> None:
    if n_unknowns > MAX_UNKNOWNS:
        raise ResourceLimitError(f"{what} has {n_unknowns} unknowns (limit {MAX_UNKNOWNS})")


def _to_int_row(row: dict) -> dict:
    den = 1
    for v in row.values():
        den = lcm(den, Fraction(v).denominator)
    out = {}
    g = 0
    for c, v in row.items():
        iv = int(Fraction(v) * den)
        if iv:
            out[c] = iv
            g = gcd(g, iv)
    if g > 1:
        out = {c: v // g for c, v in out.items()}
    return out


def _eliminate_int(rows: list[dict]) -> list[tuple[int, dict]]:
    rows = [r for r in rows]
    cols = sorted({c for r in rows for c in r})
    holders: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for c in r:
            holders.setdefault(c, set()).add(i)
    used = set()
    pivots = []
    for c in cols:
        cand = [i for i in holders.get(c, ()) if i not in used]
        if not cand:
            continue
        p = min(cand)
        used.add(p)
        prow = rows[p]
        pv = prow[c]
        for s in sorted(holders.get(c, ())):
            if s == p:
                continue
            srow = rows[s]
            f = srow[c]
            a, b = pv, f
            g = gcd(a, b)
            a //= g
            b //= g
            new = {k: a * v for k, v in srow.items()}
            for k, v in prow.items():
                nv = new.get(k, 0) - b * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            cg = 0
            for v in new.values():
                cg = gcd(cg, v)
                if cg == 1:
                    break
            if cg > 1:
                new = {k: v // cg for k, v in new.items()}
            for k in srow:
                if k not in new:
                    holders[k].discard(s)
            for k in new:
                if k not in srow:
                    holders.setdefault(k, set()).add(s)
            rows[s] = new
        pivots.append((c, p))
    return [(c, rows[p]) for c, p in pivots]


def _eliminate_modp(rows: list[dict], p: int) -> list[tuple[int, dict]]:
    rows = [dict(r) for r in rows]
    cols = sorted({c for r in rows for c in r})
    holders: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for c in r:
            holders.setdefault(c, set()).add(i)
    used = set()
    pivots = []
    for c in cols:
        cand = [i for i in holders.get(c, ()) if i not in used]
        if not cand:
            continue
        q = min(cand)
        used.add(q)
        inv = pow(rows[q][c], -1, p)
        prow = {k: (v * inv) % p for k, v in rows[q].items()}
        rows[q] = prow
        for s in sorted(holders.get(c, ())):
            if s == q:
                continue
            srow = rows[s]
            f = srow[c]
            new = dict(srow)
            for k, v in prow.items():
                nv = (new.get(k, 0) - f * v) % p
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            for k in srow:
                if k not in new:
                    holders[k].discard(s)
            for k in new:
                if k not in srow:
                    holders.setdefault(k, set()).add(s)
            rows[s] = new
        pivots.append((c, q))
    return [(c, rows[q]) for c, q in pivots]


def rref(rows: list[dict], field: Field) -> list[tuple[int, dict]]:
    """Reduced row echelon form as ``[(pivot_column, row)]`` with unit pivots."""
    rows = [r for r in rows if r]
    if field.p is None:
        red = _eliminate_int([_to_int_row(r) for r in rows])
        out = []
        for c, r in red:
            pv = r[c]
            out.append((c, {k: Fraction(v, pv) for k, v in r.items()}))
        return out
    p = field.p
    red = _eliminate_modp([{c: int(field(v).v) for c, v in r.items() if field(v)} for r in rows], p)
    return [(c, {k: ModP(v, p) for k, v in r.items()}) for c, r in red]


def rank(rows: list[dict], field: Field) -> int:
    rows = [r for r in rows if r]
    if not rows:
        return 0
    if field.p is None:
        return len(_eliminate_int([_to_int_row(r) for r in rows]))
    return len(rref(rows, field))


def nullspace(rows: list[dict], ncols: int, field: Field) -> list[dict]:
    """Basis of ``{x : A x = 0}`` for ``x`` indexed by ``range(ncols)``."""
    red = rref(rows, field)
    pivot_cols = {c for c, _ in red}
    basis = []
    for f in range(ncols):
        if f in pivot_cols:
            continue
        vec = {f: field.one}
        for c, r in red:
            v = r.get(f)
            if v:
                vec[c] = -v
        basis.append(vec)
    return basis


def solve(rows: list[dict], rhs: list, ncols: int, field: Field) -> dict | None:
    """A particular solution of ``A x = b`` (free variables zero), or None."""
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b:
            row[ncols] = b
        aug.append(row)
    red = rref(aug, field)
    sol = {}
    for c, r in red:
        if c == ncols:
            return None
        v = r.get(ncols)
        if v:
            sol[c] = v
    return sol


def certificate(rows: list[dict], rhs: list, ncols: int, field: Field) -> dict | None:
    """A vector ``y`` with ``y A = 0`` and ``y b = 1`` (exists iff ``A x = b`` is inconsistent)."""
    m = len(rows)
    trans: dict[int, dict] = {}
    for i, r in enumerate(rows):
        for c, v in r.items():
            if v:
                trans.setdefault(c, {})[i] = v
    eqs = [trans[c] for c in sorted(trans)]
    brow = {i: b for i, b in enumerate(rhs) if b}
    eqs.append(brow)
    rhs2 = [field.zero] * (len(eqs) - 1) + [field.one]
    return solve(eqs, rhs2, m, field)


def mat_vec(rows: list[dict], x: dict, field: Field) -> list:
    out = []
    for r in rows:
        s = field.zero
        for c, v in r.items():
            xv = x.get(c)
            if xv:
                s = s + v * xv
        out.append(s)
    return out


class KeyedSystem:
    """A sparse linear system whose unknowns and equations carry hashable labels.

    Each unknown is added together with its image, a dict ``equation key ->
    scalar``; the right-hand side is a dict of the same shape.
    """

    def __init__(self, field: Field):
        self.field = field
        self.unknowns: list = []
        self._cols: list[dict] = []
        self.rhs: dict = {}

    def add_unknown(self, label, image: dict) -> int:
        self.unknowns.append(label)
        self._cols.append({k: v for k, v in image.items() if v})
        check_size(len(self.unknowns))
        return len(self.unknowns) - 1

    def add_rhs(self, image: dict) -> None:
        for k, v in image.items():
            nv = self.rhs.get(k, self.field.zero) + v
            if nv:
                self.rhs[k] = nv
            else:
                self.rhs.pop(k, None)

    def _assemble(self):
        keys = {}
        for col in self._cols:
            for k in col:
                if k not in keys:
                    keys[k] = len(keys)
        for k in self.rhs:
            if k not in keys:
                keys[k] = len(keys)
        rows = [dict() for _ in keys]
        for j, col in enumerate(self._cols):
            for k, v in col.items():
                rows[keys[k]][j] = v
        rhs = [self.field.zero] * len(keys)
        for k, v in self.rhs.items():
            rhs[keys[k]] = v
        return list(keys), rows, rhs

    @property
    def n_equations(self) -> int:
        return len(self._assemble()[0])

    def solve(self) -> dict | None:
        _, rows, rhs = self._assemble()
        return solve(rows, rhs, len(self.unknowns), self.field)

    def certificate(self) -> dict | None:
        """Equation-keyed ``y`` with ``y A = 0`` and ``y b = 1``, or None if consistent."""
        keys, rows, rhs = self._assemble()
        y = certificate(rows, rhs, len(self.unknowns), self.field)
        if y is None:
            return None
        return {keys[i]: v for i, v in y.items() if v}

    def check_certificate(self, y: dict) -> bool:
        for col in self._cols:
            s = self.field.zero
            for k, v in col.items():
                if k in y:
                    s = s + y[k] * v
            if s:
                return False
        s = self.field.zero
        for k, v in self.rhs.items():
            if k in y:
                s = s + y[k] * v
        return s == self.field.one

    def nullspace(self) -> list[dict]:
        _, rows, _ = self._assemble()
        return nullspace(rows, len(self.unknowns), self.field)

    def rank(self) -> int:
        _, rows, _ = self._assemble()
        return rank(rows, self.field)

    def residual(self, x: dict) -> dict:
        """``A x - b`` as an equation-keyed dict (zero entries dropped)."""
        out: dict = {}
        for j, v in x.items():
            if not v:
                continue
            for k, a in self._cols[j].items():
                out[k] = out.get(k, self.field.zero) + a * v
        for k, v in self.rhs.items():
            out[k] = out.get(k, self.field.zero) - v
        return {k: v for k, v in out.items() if v}
