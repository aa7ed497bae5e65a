"""Menus of randomized allocations when only the ranking law is known.

If the seller knows the distribution of buyer rankings but not the cardinal
utilities behind them, they can post a menu of randomized allocations and
let the buyer pick.  A buyer with a given ranking might justify any of its
"exposable" entries (those optimal under some consistent utility), so the
seller scores a menu by its worst case.  Posting the per-list allocations of
an IC mechanism recovers exactly that mechanism's revenue, and a cleverer
menu can beat the best mechanism outright.
"""

from fractions import Fraction

from fixedprice import (
    Instance,
    ListDistribution,
    Menu,
    MenuEntry,
    exposable_entries,
    mechanism_to_menu,
    robust_revenue,
    solve_mechanism_lp,
)

lists = {
    ("2", "1"): Fraction(1, 12), ("3", "1"): Fraction(1, 12),
    ("4", "1"): Fraction(1, 12), ("3", "2"): Fraction(1, 12),
    ("4", "2"): Fraction(1, 12), ("4", "3"): Fraction(1, 12),
    ("5",): Fraction(1, 4),
    ("2", "5", "1"): Fraction(1, 12), ("3", "5", "1"): Fraction(1, 12),
    ("4", "5", "1"): Fraction(1, 12),
}
inst = Instance(
    "12345", {"1": 2, "2": 1, "3": 1, "4": 1, "5": Fraction(3, 2)},
    ListDistribution(lists),
)

opt_x, mech = solve_mechanism_lp(inst)
print("optimal IC mechanism value:", opt_x)
print("menu built from it recovers:",
      robust_revenue(inst, mechanism_to_menu(inst, mech)))

h = Fraction(1, 2)
menu = Menu([
    MenuEntry({"1": h, "2": h}), MenuEntry({"1": h, "3": h}),
    MenuEntry({"1": h, "4": h}), MenuEntry({"2": h, "3": h}),
    MenuEntry({"2": h, "4": h}), MenuEntry({"3": h, "4": h}),
    MenuEntry({"5": 1}),
])
print("\nhand-built seven-entry menu (plus the zero entry):")
print("worst-case revenue:", robust_revenue(inst, menu), "> mechanism optimum")

for lst in [("2", "5", "1"), ("3", "5", "1"), ("4", "5", "1")]:
    entries = exposable_entries(inst, menu, lst)
    print(f"  list {lst}: {len(entries)} exposable entries, both worth 3/2:",
          [dict((j, str(p)) for j, p in e.alloc) for e in entries])
