"""Two buyers, one copy of each item: allocation LPs and trading mechanisms.

With several buyers, the mechanism allocates per reported profile under a
matching constraint.  Truthfulness comes in a per-profile (dominant
strategy) or in-expectation (Bayesian) flavor.  On a small symmetric
instance both LPs reach the first-best bound 16/9, and a deterministic
endowment-trading mechanism attains it: endow each buyer with the item the
other is likelier to keep, and let them swap only if both agree.  The order
of endowments matters (14/9 when reversed), and letting one buyer pick
first caps revenue at 15/9.
"""

from fractions import Fraction

from fixedprice import (
    ListDistribution,
    MultiBuyerInstance,
    eval_endowment_ttc,
    eval_serial_dictatorship,
    solve_multibuyer_lp,
)

third = Fraction(1, 3)
inst = MultiBuyerInstance(
    "AB", {"A": 1, "B": 1},
    [
        ListDistribution({("A",): third, ("B",): third, ("A", "B"): third}),
        ListDistribution({("A",): third, ("B",): third, ("B", "A"): third}),
    ],
)

for mode in ("dsic", "bic"):
    value, _ = solve_multibuyer_lp(inst, mode)
    print(f"{mode.upper()} LP optimum: {value}")

print("trading with endowments buyer0<-B, buyer1<-A:",
      eval_endowment_ttc(inst, {0: "B", 1: "A"}))
print("trading with reversed endowments:",
      eval_endowment_ttc(inst, {0: "A", 1: "B"}))
print("serial dictatorship (either order):",
      eval_serial_dictatorship(inst, [0, 1]))
