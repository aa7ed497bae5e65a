"""The history-monotone-futures condition, its witnesses, and tiers.

A distribution has history-monotone futures when, among realizable prefixes
ending at the same item, set-wise larger histories make every future sale
(of items untouched by either history) weakly more likely.  Distributions
with this property never benefit from lotteries; those without it might.
"""

from fractions import Fraction

from fixedprice import (
    Instance,
    ListDistribution,
    check_domination,
    check_history_monotone,
    s_adjusted_price,
    tier_adjusted_prices,
    tier_decomposition,
)

# The minimal violation: lists (B,A) and (C,B).  After seeing (C,B) the
# buyer never wants A; after just (B) they always do -- the longer history
# has the worse future.
bad = ListDistribution({("B", "A"): Fraction(1, 2), ("C", "B"): Fraction(1, 2)})
report = check_history_monotone(bad)
w = report.witness
print("minimal violation:", report.holds, "| witness: histories",
      w.prefix, "vs", w.other, "assortment", sorted(w.assortment), "item", w.item)

# A four-item tree that satisfies the condition.
good = ListDistribution({
    ("B",): Fraction(1, 3),
    ("C", "B", "A"): Fraction(1, 12), ("C", "B"): Fraction(1, 12),
    ("C", "D", "B", "A"): Fraction(1, 8), ("C", "D", "B"): Fraction(1, 24),
    ("D", "B", "A"): Fraction(1, 12), ("D", "B"): Fraction(1, 12),
    ("D", "C", "B", "A"): Fraction(1, 6),
})
print("tree satisfies the condition:", check_history_monotone(good).holds)

# Pairwise domination can also be asked directly.
print("(C,D,B) dominates (C,B):",
      check_domination(good, ("C", "D", "B"), ("C", "B")).holds)

# Same-endpoint prefixes group into containment-ordered tiers, along which
# the adjusted price (price minus cannibalized revenue of S={A}) never rises.
inst = Instance("ABCD", {"A": 2, "B": 1, "C": 1, "D": 1}, good)
tiers = tier_decomposition(good, {"A"}, "B")
print("tiers of prefixes ending at B, avoiding {A}:")
for tier, prices in zip(tiers.tiers, tier_adjusted_prices(inst, {"A"}, "B")):
    print("  ", [list(p) for p in tier.prefixes], tier.kind,
          "adjusted prices", [str(x) for x in prices])
print("adjusted price of (C,D,B):", s_adjusted_price(inst, {"A"}, ("C", "D", "B")))
