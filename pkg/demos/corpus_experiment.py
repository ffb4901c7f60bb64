"""Tally lifting verdicts on a seeded random corpus.

    python demos/corpus_experiment.py [SIZE] [PROFILE]

For every generated instance we decide naive liftability, compare the two
independent solvers for conditions (i) and (ix), and record whether H_0(nu)
is onto.  The last column should never read "onto" next to "not-liftable".
"""
import sys
from collections import Counter

from dglift import load_instance
from dglift.frontend import generate_random_text
from dglift.lifting import decide_fesox, decide_naive_lifting, h0_nu_surjective

size = int(sys.argv[1]) if len(sys.argv) > 1 else 40
profile = sys.argv[2] if len(sys.argv) > 2 else "acceptance"

tally = Counter()
for seed in range(size):
    N = load_instance(generate_random_text(seed, profile)).module()
    lift = decide_naive_lifting(N)
    fx = decide_fesox(N)
    h0 = h0_nu_surjective(N, lifting=lift.verdict)
    tally[lift.verdict] += 1
    tally["solvers agree" if fx.agree else "solvers DISAGREE"] += 1
    if h0.surjective:
        tally[f"onto / {lift.verdict}"] += 1
    if not (lift.verified and fx.verified):
        tally["failed checks"] += 1
    print(f"{seed:4d}  basis {list(N.degrees)!s:16} {lift.verdict:13} (i)={fx.condition_i!s:5} onto={h0.surjective}")

print()
for key, n in sorted(tally.items()):
    print(f"{key:24} {n}")
