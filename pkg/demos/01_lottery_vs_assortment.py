"""When can a lottery out-earn every assortment?

Four items: A costs 2, the rest cost 1.  Every buyer ranks exactly two
items, and whenever the premium item A is wanted at all, some cheap item is
wanted more.  Offering {A, B} earns 7/6, and no subset does better -- the
cheap items cannibalize A.  A top-2 lottery (report up to two items, win one
with probability 1/2 each) keeps full market share while halving the
cannibalization, earning 5/4.
"""

from fractions import Fraction

from fixedprice import (
    BudgetAdditiveParams,
    Instance,
    ListDistribution,
    best_topk_lottery,
    budget_additive_mechanism,
    mechanism_revenue,
    optimal_assortment,
    solve_mechanism_lp,
    verify_ic,
)

lists = [("B", "A"), ("C", "A"), ("D", "A"), ("C", "B"), ("D", "B"), ("D", "C")]
inst = Instance(
    "ABCD",
    {"A": 2, "B": 1, "C": 1, "D": 1},
    ListDistribution([(l, Fraction(1, 6)) for l in lists]),
)

S, value = optimal_assortment(inst)
print(f"best assortment: {sorted(S)} earning {value}")

lottery = budget_additive_mechanism(
    inst, BudgetAdditiveParams({j: Fraction(1, 2) for j in inst.items}, 1)
)
print(f"top-2 lottery revenue: {mechanism_revenue(inst, lottery)}")
print(f"lottery is incentive-compatible: {verify_ic(inst, lottery).ok}")

k, S, best = best_topk_lottery(inst)
print(f"best top-k lottery: k={k}, items {sorted(S)}, revenue {best}")

opt_x, mech = solve_mechanism_lp(inst)
print(f"optimal IC mechanism (exact LP): {opt_x}")
print("sample allocation for the list (B, A):",
      {j: str(p) for j, p in mech.alloc[next(iter(mech.alloc))].items()})
