"""Walk through the two small Koszul-type examples.

Run with ``python demos/walkthrough.py``.  Over B = Q[x] the module with
d(e1) = e0*x does not lift; after adjoining y with d(x) = y over A = Q[y]
the module with d(e1) = e0*x*y does, and we print the homotopy.
"""
from pathlib import Path

from dglift import load_instance
from dglift.lifting import (
    atiyah_map,
    classical_atiyah,
    decide_fesox,
    decide_naive_lifting,
    h0_nu_surjective,
)

HERE = Path(__file__).parent / "instances"


def show(name):
    inst = load_instance((HERE / f"{name}.dg").read_text())
    N = inst.module()
    print(f"== {name}: B generated by {', '.join(inst.B.names)}")
    print("alpha     ", atiyah_map(N).to_json())
    print("alpha bar ", classical_atiyah(N).to_json())

    rep = decide_naive_lifting(N)
    print("verdict   ", rep.verdict)
    if rep.liftable:
        print("f         ", rep.witness_f.to_json())
    else:
        # a row combination of the homotopy equations that reads 0 = 1
        print("certificate", rep.certificate.to_json()["row"])
    for label, ok in rep.checks:
        print(f"  [{'ok' if ok else 'FAIL'}] {label}")

    fx = decide_fesox(N)
    print("(i) / (ix)", fx.condition_i, fx.condition_ix)
    h0 = h0_nu_surjective(N, lifting=rep.verdict)
    print("H0(nu) onto", h0.surjective)
    print()


for name in ("K1", "K2", "base-change"):
    show(name)
