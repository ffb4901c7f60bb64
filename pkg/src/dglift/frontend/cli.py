"""Command line entry point: ``dglift <verb> DOCUMENT [options]``.

Exit codes: 0 success, 1 validation failure, 2 parse or usage error,
3 resource limit.  Verdicts such as "not-liftable" are successful runs.
"""
from __future__ import annotations

import argparse
import json
import sys

from ..dgmod import validate_module
from ..enveloping import CrossCheckError, check_exact_sequence
from ..gca import ValidationReport, validate_dgca
from ..linalg import ResourceLimitError
from .document import ParseError, load_instance
from .generate import PROFILES, generate_random_text

VERBS = ("validate", "atiyah", "lift", "ks", "fesox", "exactseq", "h0nu", "omega", "random")


class UsageError(ValueError):
    pass


class ValidationFailure(ValueError):
    def __init__(self, report: dict):
        super().__init__("validation failed")
        self.report = report


def _window(text: str | None, default=(-6, 6)) -> tuple[int, int]:
    if text is None:
        return default
    try:
        lo, hi = (int(s) for s in text.split(".."))
    except ValueError:
        raise UsageError(f"--degrees expects LO..HI, got {text!r}") from None
    if lo > hi:
        raise UsageError(f"empty degree window {text!r}")
    return lo, hi


def _validation(inst) -> ValidationReport:
    rep = ValidationReport()
    for name, alg in inst.algebras.items():
        rep.extend(validate_dgca(alg))
    for name, N in inst.modules.items():
        rep.extend(validate_module(N))
    return rep


def _module(inst, name):
    try:
        return inst.module(name)
    except KeyError as e:
        raise UsageError(e.args[0]) from None


def _valid_or_fail(inst):
    rep = _validation(inst)
    if not rep.valid:
        raise ValidationFailure(rep.to_json())


# verbs ---------------------------------------------------------------------


def cmd_validate(inst, args) -> dict:
    rep = _validation(inst).to_json()
    if not rep["valid"]:
        raise ValidationFailure(rep)
    return rep


def cmd_atiyah(inst, args) -> dict:
    from ..lifting import atiyah_map, check_atiyah_identity, classical_atiyah, setting_for

    N = _module(inst, args.module)
    st = setting_for(N.B)
    alpha = atiyah_map(N, st)
    abar = classical_atiyah(N, st)
    return {
        "module": N.name,
        "alpha": alpha.to_json(),
        "alpha_bar": abar.to_json(),
        "zero": not alpha,
        "checks": [{"name": "alpha = -d(phi(delta))", "ok": check_atiyah_identity(N, st)}],
    }


def cmd_lift(inst, args) -> dict:
    from ..lifting import decide_naive_lifting

    N = _module(inst, args.module)
    rep = decide_naive_lifting(N, seed=args.seed).to_json()
    if args.witness:
        with open(args.witness, "w") as fh:
            json.dump({k: rep[k] for k in ("verdict", "witness_f", "witness_psi", "certificate")}, fh, indent=2)
    return rep


def cmd_ks(inst, args) -> dict:
    from ..derivations import dual_basis
    from ..lifting import kodaira_spencer

    N = _module(inst, args.module)
    if inst.derivations:
        ders = list(inst.derivations.items())
    else:
        ders = [(f"d/d{N.B.names[i]}", D) for i, D in zip(N.B.extension_indices, dual_basis(N.B))]
    return {"module": N.name, "values": {name: kodaira_spencer(N, D).to_json() for name, D in ders}}


def cmd_fesox(inst, args) -> dict:
    from ..lifting import decide_fesox, fesox_experiment

    if args.experiment:
        prof = args.profile or "acceptance"
        seeds = range(args.seed, args.seed + args.experiment)
        corpus = ((f"{prof}:{s}", load_instance(generate_random_text(s, prof)).module()) for s in seeds)
        return fesox_experiment(corpus, seed=args.seed)
    N = _module(inst, args.module)
    rep = decide_fesox(N, seed=args.seed)
    out = rep.to_json()
    if args.witness:
        with open(args.witness, "w") as fh:
            json.dump({k: out[k] for k in ("verdict", "witness_f", "witness_psi", "witness_h", "certificate")}, fh, indent=2)
    return out


def cmd_exactseq(inst, args) -> dict:
    from ..connections import fundamental_sequence
    from ..lifting import setting_for

    N = _module(inst, args.module)
    lo, hi = _window(args.degrees)
    st = setting_for(N.B)
    along = args.along or "J"
    try:
        X = st.target(along)
    except ValueError as e:
        raise UsageError(str(e)) from None
    rep = fundamental_sequence(N, X, lo, hi)
    diag = check_exact_sequence(N, st.env, lo, hi)
    return {
        "module": N.name,
        "along": along,
        "window": [lo, hi],
        "exact": rep.exact,
        "degrees": [
            {"n": d.n, "dim_hom": d.dim_hom, "dim_der": d.dim_der, "dim_conn": d.dim_conn,
             "dim_ker_nu": d.dim_ker_nu, "rank_nu": d.rank_nu, "exact": d.exact}
            for d in rep.degrees
        ],
        "diagonal_sequence": {"exact": diag.valid, "degrees": [{"n": k, **v} for k, v in diag.degrees.items()]},
    }


def cmd_h0nu(inst, args) -> dict:
    from ..lifting import h0_nu_surjective

    N = _module(inst, args.module)
    return h0_nu_surjective(N).to_json()


def cmd_omega(inst, args) -> dict:
    from ..lifting import setting_for

    om = setting_for(inst.B).omega
    M = om.module
    B = inst.B
    return {
        "basis": [{"name": n, "degree": d} for n, d in zip(M.names, M.degrees)],
        "differential": {n: str(M.diff_image(k)) for k, n in enumerate(M.names)},
        "c": {f"{M.names[mu]},{M.names[lam]}": str(v) for (mu, lam), v in sorted(om.c.items())},
        "delta_bar": {B.names[i]: str(om.delta_bar(B.gen(i))) for i in B.extension_indices},
        "checks": [{"name": "coefficients agree with the projection of d(delta(X))", "ok": True}],
    }


def cmd_random(args) -> dict:
    prof = args.profile or "tiny"
    if prof not in PROFILES:
        raise UsageError(f"unknown profile {prof!r}; choose from {sorted(PROFILES)}")
    return {"seed": args.seed, "profile": prof, "document": generate_random_text(args.seed, prof)}


COMMANDS = {
    "validate": cmd_validate,
    "atiyah": cmd_atiyah,
    "lift": cmd_lift,
    "ks": cmd_ks,
    "fesox": cmd_fesox,
    "exactseq": cmd_exactseq,
    "h0nu": cmd_h0nu,
    "omega": cmd_omega,
}


# output --------------------------------------------------------------------


def _render(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    out = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                out.append(f"{pad}{k}:")
                out.extend(_render(v, indent + 1))
            else:
                out.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, dict) and set(v) == {"name", "ok"}:
                out.append(f"{pad}[{'ok' if v['ok'] else 'FAIL'}] {v['name']}")
            elif isinstance(v, dict) and not any(isinstance(w, (dict, list)) for w in v.values()):
                out.append(pad + "  ".join(f"{k}={_scalar(w)}" for k, w in v.items()))
            elif isinstance(v, (dict, list)):
                out.append(f"{pad}-")
                out.extend(_render(v, indent + 1))
            else:
                out.append(f"{pad}- {_scalar(v)}")
    else:
        out.append(pad + _scalar(value))
    return out


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)


def _emit(result: dict, as_json: bool, stream) -> None:
    if as_json:
        json.dump(result, stream, indent=2)
        stream.write("\n")
    else:
        stream.write("\n".join(_render(result)) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dglift", description="Naive lifting of DG modules along free extensions.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("document", nargs="?", help="instance document ('-' for stdin); not used by 'random'")
    p.add_argument("--module", help="module name when the document declares several")
    p.add_argument("--along", choices=("B", "J", "Omega"), help="target for exactseq (default J)")
    p.add_argument("--degrees", help="degree window LO..HI for exactseq (default -6..6); write --degrees=-2..2 for a negative LO")
    p.add_argument("--witness", help="write witness or certificate JSON to this path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", help=f"random profile: {', '.join(PROFILES)}")
    p.add_argument("--experiment", type=int, metavar="N", help="fesox: cross-tabulate N random instances")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")
    return p


def run_command(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.verb == "random":
            result = cmd_random(args)
            if args.json:
                _emit(result, True, stdout)
            else:
                stdout.write(result["document"])
            return 0
        if args.verb == "fesox" and args.experiment:
            _emit(cmd_fesox(None, args), args.json, stdout)
            return 0
        if not args.document:
            raise UsageError(f"'{args.verb}' needs a document")
        if args.document == "-":
            text = sys.stdin.read()
        else:
            with open(args.document, encoding="utf-8") as fh:
                text = fh.read()
        inst = load_instance(text)
        if args.verb != "validate":
            _valid_or_fail(inst)
        _emit(COMMANDS[args.verb](inst, args), args.json, stdout)
        return 0
    except ParseError as e:
        _emit({"error": "parse", "message": e.message, "line": e.line, "column": e.column}, args.json, stderr)
        return 2
    except (UsageError, OSError) as e:
        _emit({"error": "usage", "message": str(e)}, args.json, stderr)
        return 2
    except ValidationFailure as e:
        _emit(e.report, args.json, stdout)
        return 1
    except CrossCheckError as e:
        _emit({"error": "validation", "message": str(e)}, args.json, stderr)
        return 1
    except ResourceLimitError as e:
        _emit({"error": "resource-limit", "message": str(e)}, args.json, stderr)
        return 3


def main() -> None:
    sys.exit(run_command())


__all__ = ["run_command", "main", "build_parser"]
