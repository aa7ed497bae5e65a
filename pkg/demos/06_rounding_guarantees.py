"""Rounding lotteries back to random assortments, and the price ladder.

A budget-additive lottery can be derandomized into a random assortment that
includes item j independently with probability 1 - exp(-w_j); the random
assortment keeps at least 1/e of the lottery's revenue.  With list length
capped at L, any IC mechanism rounds to a random assortment keeping 2/(eL).

The price-ladder family shows the gap is real: item j costs M^j, the
most expensive wanted item is j with probability M^-j, and one uniformly
cheaper item is always wanted more.  A top-2 lottery earns about n/2 while
every assortment lags behind.
"""

from fractions import Fraction

from fixedprice import (
    BudgetAdditiveParams,
    best_topk_lottery,
    gen_topk_gap_instance,
    optimal_assortment,
    round_bounded_length,
    round_budget_additive,
    solve_mechanism_lp,
)

inst = gen_topk_gap_instance(4, 100)
print("price ladder n=4, base 100")
print("prices:", {j: str(p) for j, p in inst.prices.items()})

k, S, top2 = best_topk_lottery(inst, k=2)
_, opt_s = optimal_assortment(inst)
print(f"top-2 lottery earns {float(top2):.4f}; best assortment {float(opt_s):.4f}")

params = BudgetAdditiveParams({j: Fraction(1, 2) for j in inst.items}, 1)
incl, report = round_budget_additive(inst, params)
print("\n1/e rounding of the uniform half-weight lottery:")
print("  inclusion probabilities:", {j: round(p, 5) for j, p in incl.probs.items()})
print(f"  random assortment {report.achieved:.4f} >= required {report.required:.4f}")

opt_x, mech = solve_mechanism_lp(inst)
incl2, report2 = round_bounded_length(inst, mech)
print("\n2/(eL) rounding of the optimal mechanism (L = 2 here):")
print(f"  achieved {report2.achieved:.4f} >= required {report2.required:.4f} "
      f"(factor {report2.factor:.4f} of {report2.source_revenue:.4f})")
