"""Seeded random instances for property suites and experiments."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .. import expr as _expr
from ..dgmod import SemifreeModule
from ..gca import DgAlgebra
from ..scalars import Field
from .document import AlgebraDecl, GenDecl, InstanceDocument, ModuleDecl, format_document


@dataclass(frozen=True)
class Profile:
    base_gens: int
    base_degree: int
    ext_gens: int
    ext_degree: int
    basis: int
    basis_degree: int
    coeffs: tuple = (-2, -1, 1, 2)
    terms: int = 2
    p_zero: float = 0.2  # chance of leaving a differential at zero on purpose
    tries: int = 20


PROFILES = {
    "tiny": Profile(base_gens=1, base_degree=2, ext_gens=2, ext_degree=3, basis=3, basis_degree=4),
    "acceptance": Profile(base_gens=1, base_degree=3, ext_gens=3, ext_degree=4, basis=4, basis_degree=6),
    "noext": Profile(base_gens=2, base_degree=3, ext_gens=0, ext_degree=0, basis=3, basis_degree=4),
}


@dataclass
class GenerationStats:
    """How often the d^2 = 0 rejection loop ran out of tries and fell back to zero."""

    fallbacks: int = 0
    rejections: int = 0


def _tree(text: str):
    return None if text == "0" else _expr.parse_expr(text)


def _gen_differentials(rng, F, specs, prof, stats):
    """Pick d for each generator in turn; ``specs`` is [(name, degree, is_base)]."""
    diffs = []
    for k, (name, deg, is_base) in enumerate(specs):
        # base generators only see earlier base generators
        pool = [s for s in specs[:k] if s[2] or not is_base]
        chosen = "0"
        if pool and rng.random() >= prof.p_zero:
            sub = DgAlgebra(F, [(n, d) for n, d, _ in pool], {n: v for (n, _, _), v in zip(specs, diffs) if n in {p[0] for p in pool}}, name="S")
            for _ in range(prof.tries):
                cand = sub.random_element(rng, deg - 1, prof.terms, prof.coeffs)
                if not cand:
                    break
                if not cand.d():
                    chosen = str(cand)
                    break
                stats.rejections += 1
            else:
                stats.fallbacks += 1
        diffs.append(chosen)
    return diffs


def _module_differentials(rng, B, basis, prof, stats):
    N = SemifreeModule(B, basis, name="N")
    out = []
    for lam, (name, deg) in enumerate(basis):
        chosen = "0"
        lower = [mu for mu in range(lam) if deg - 1 - basis[mu][1] >= 0]
        if lower and rng.random() >= prof.p_zero:
            for _ in range(prof.tries):
                col = {}
                for mu in rng.sample(lower, rng.randint(1, min(2, len(lower)))):
                    c = B.random_element(rng, deg - 1 - basis[mu][1], prof.terms, prof.coeffs) if deg - 1 - basis[mu][1] > 0 else B.scalar(rng.choice(prof.coeffs))
                    if c:
                        col[mu] = c
                if not col:
                    break
                N.b[lam] = col
                if not N.d(N.diff_image(lam)):
                    chosen = " + ".join(f"{basis[mu][0]}*({c})" for mu, c in sorted(col.items()))
                    break
                N.b[lam] = {}
                stats.rejections += 1
            else:
                stats.fallbacks += 1
        out.append(chosen)
    return out


def generate_random_instance(seed: int, profile: str = "tiny", stats: GenerationStats | None = None) -> InstanceDocument:
    """A random valid document; identical (seed, profile) give identical documents.

    Differentials are rejection-sampled until d^2 = 0 (and the module square
    vanishes); when the budget runs out the differential is set to zero, which
    is always valid, and ``stats.fallbacks`` is bumped.
    """
    if profile not in PROFILES:
        raise KeyError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
    prof = PROFILES[profile]
    stats = stats if stats is not None else GenerationStats()
    rng = random.Random(f"{profile}:{seed}")
    F = Field()
    nb = rng.randint(0, prof.base_gens)
    ne = rng.randint(1 if prof.ext_gens else 0, prof.ext_gens)
    bdeg = sorted(rng.randint(1, prof.base_degree) for _ in range(nb))
    edeg = sorted(rng.randint(1, prof.ext_degree) for _ in range(ne))
    specs = [(f"y{i + 1}", d, True) for i, d in enumerate(bdeg)]
    specs += [(f"x{i + 1}", d, False) for i, d in enumerate(edeg)]
    diffs = _gen_differentials(rng, F, specs, prof, stats)
    B = DgAlgebra(F, specs, {n: d for (n, _, _), d in zip(specs, diffs)}, name="B")
    nbasis = rng.randint(1, prof.basis)
    degs = sorted(rng.sample(range(prof.basis_degree + 1), nbasis))
    basis = [(f"e{i}", d) for i, d in enumerate(degs)]
    mdiffs = _module_differentials(rng, B, basis, prof, stats)

    doc = InstanceDocument(field=("Q", None))
    A = AlgebraDecl("A", None)
    Bd = AlgebraDecl("B", "A")
    for (n, d, is_base), dd in zip(specs, diffs):
        (A if is_base else Bd).gens.append(GenDecl(n, d, _tree(dd)))
    doc.algebras = [A, Bd]
    doc.modules = [ModuleDecl("N", "B", basis=list(basis), diffs=[(n, _tree(t)) for (n, _), t in zip(basis, mdiffs) if t != "0"])]
    return doc


def generate_random_text(seed: int, profile: str = "tiny") -> str:
    return format_document(generate_random_instance(seed, profile))
