"""The ladder of exact LP values and a tighter relaxation for assortments.

For any instance, OPT^S <= OPT^x <= OPT^f: assortments are the deterministic
mechanisms, and every IC mechanism embeds into the monotone-set-function
relaxation.  A weaker LP with per-item inclusion variables also contains the
mechanism polytope, which makes the mechanism LP the tighter relaxation of
assortment optimization; its deterministic points are exactly assortments.
"""

import random
from fractions import Fraction

from fixedprice import (
    Instance,
    ListDistribution,
    build_mechanism_lp,
    containment_witness,
    optimal_assortment,
    solve_bm_lp,
    solve_lp,
    solve_mechanism_lp,
    solve_set_function_lp,
)
from fixedprice.mechanism_lp import mechanism_from_solution

lists = [("B", "A"), ("C", "A"), ("D", "A"), ("C", "B"), ("D", "B"), ("D", "C")]
inst = Instance(
    "ABCD", {"A": 2, "B": 1, "C": 1, "D": 1},
    ListDistribution([(l, Fraction(1, 6)) for l in lists]),
)

_, opt_s = optimal_assortment(inst)
opt_x, _ = solve_mechanism_lp(inst)
opt_f, f_star = solve_set_function_lp(inst)
opt_bm, _ = solve_bm_lp(inst)
print(f"OPT^S = {opt_s}, OPT^x = {opt_x}, OPT^f = {opt_f}, inclusion LP = {opt_bm}")
print("set-function vertex is 0/1:",
      all(v in (Fraction(0), Fraction(1)) for v in f_star.values.values()))

# Exporting the LP for an external cross-check:
lp = build_mechanism_lp(inst)
print(f"\nmechanism LP: {lp.num_variables} variables, {lp.num_rows} rows")
print("\n".join(lp.to_text().splitlines()[:4]), "\n...")

# Any feasible mechanism (here: random-objective vertices) certifies into
# the inclusion LP by taking each item's best allocation over reports.
rng = random.Random(7)
for _ in range(3):
    lp.set_objective({v.name: Fraction(rng.randint(0, 5)) for v in lp.variables})
    mech = mechanism_from_solution(inst, solve_lp(lp))
    z = containment_witness(inst, mech)
    print("vertex certified; z =", {j: str(v) for j, v in sorted(z.items())})
