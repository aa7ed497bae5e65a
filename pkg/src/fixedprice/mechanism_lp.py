"""IC mechanisms over ranked lists: the allocation LP, conversions, and checks.

A mechanism assigns each supported list a sub-probability allocation over the
items on that list.  Incentive compatibility means here that a truthful
report maximizes the probability of receiving one of the buyer's k favorite
items simultaneously for every k, which linearizes into the row family

    sum_{j in first k of l} x_j(l)  >=  sum_{j in (first k of l) ∩ l'} x_j(l')

for all supported lists l, positions k, and alternative reports l'.  This
module builds that LP, the monotone-set-function relaxation of its optimum,
and the weaker assortment LP used for comparisons, plus the conversions
between assortments, mechanisms, and monotone set functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .core import Instance, Item, RankedList
from .errors import (
    CapExceededError,
    ContainmentError,
    IdentityCheckError,
    InvalidMechanismError,
    SubmodularityError,
)
from .lp import LPSolution, RationalLP, solve_lp
from .rational import format_rational, parse_rational


def _var(lst: RankedList, j: Item) -> str:
    inner = ",".join(str(e) for e in lst.entries)
    return f"x[{inner}][{j}]"


@dataclass(frozen=True)
class Mechanism:
    """Per-list allocation probabilities over the items on that list."""

    alloc: Mapping[RankedList, Mapping[Item, Fraction]]

    def __init__(self, alloc, validate: bool = True):
        clean: Dict[RankedList, Dict[Item, Fraction]] = {}
        for lst, probs in dict(alloc).items():
            lst = lst if isinstance(lst, RankedList) else RankedList(tuple(lst))
            row = {j: parse_rational(p) for j, p in dict(probs).items()}
            if validate:
                off_list = set(row) - lst.as_set()
                if off_list:
                    raise InvalidMechanismError(
                        f"allocation to items {off_list} not on list {lst.entries}"
                    )
                if any(p < 0 for p in row.values()):
                    raise InvalidMechanismError(
                        f"negative allocation on list {lst.entries}"
                    )
                if sum(row.values(), Fraction(0)) > 1:
                    raise InvalidMechanismError(
                        f"allocations on list {lst.entries} exceed 1"
                    )
            clean[lst] = row
        object.__setattr__(self, "alloc", clean)

    def probability(self, lst, j: Item) -> Fraction:
        lst = lst if isinstance(lst, RankedList) else RankedList(tuple(lst))
        return self.alloc.get(lst, {}).get(j, Fraction(0))

    def lists(self) -> Iterable[RankedList]:
        return self.alloc.keys()


def mechanism_revenue(inst: Instance, mech: Mechanism) -> Fraction:
    total = Fraction(0)
    for lst, prob in inst.dist.support.items():
        row = mech.alloc.get(lst, {})
        for j, x in row.items():
            total += prob * inst.prices[j] * x
    return total


# ---------------------------------------------------------------------------
# The mechanism LP
# ---------------------------------------------------------------------------


def build_mechanism_lp(inst: Instance) -> RationalLP:
    """LP over allocation variables with IC, sum-to-one, and nonnegativity rows.

    IC rows are instantiated for every ordered (list, position, report)
    triple; exact-duplicate rows (including the vacuous self-report rows)
    collapse via hashing.
    """
    lp = RationalLP()
    support = list(inst.dist.support.keys())
    for lst in support:
        for j in lst.entries:
            lp.add_variable(_var(lst, j), lo=0)
    objective: Dict[str, Fraction] = {}
    for lst, prob in inst.dist.support.items():
        for j in lst.entries:
            name = _var(lst, j)
            objective[name] = objective.get(name, Fraction(0)) + prob * inst.prices[j]
    lp.set_objective(objective)

    for lst in support:
        if len(lst) > 0:
            lp.add_row(
                {_var(lst, j): 1 for j in lst.entries}, "<=", 1,
                label=f"one[{','.join(map(str, lst.entries))}]",
            )
        for k in range(1, len(lst) + 1):
            top = set(lst.entries[:k])
            for other in support:
                coefs: Dict[str, Fraction] = {}
                for j in lst.entries[:k]:
                    coefs[_var(lst, j)] = coefs.get(_var(lst, j), Fraction(0)) + 1
                for j in other.entries:
                    if j in top:
                        name = _var(other, j)
                        coefs[name] = coefs.get(name, Fraction(0)) - 1
                lp.add_row(coefs, ">=", 0)
    return lp


def mechanism_from_solution(inst: Instance, sol: LPSolution) -> Mechanism:
    alloc = {
        lst: {j: sol.assignment[_var(lst, j)] for j in lst.entries}
        for lst in inst.dist.support
    }
    return Mechanism(alloc)


def solve_mechanism_lp(inst: Instance) -> Tuple[Fraction, Mechanism]:
    """Optimal IC mechanism value and a vertex mechanism attaining it."""
    lp = build_mechanism_lp(inst)
    sol = solve_lp(lp)
    return sol.value, mechanism_from_solution(inst, sol)


@dataclass(frozen=True)
class ICViolation:
    kind: str  # "ic" | "sum" | "nonneg" | "missing" | "off-list"
    lst: Tuple[Item, ...]
    detail: str
    k: Optional[int] = None
    other: Optional[Tuple[Item, ...]] = None


@dataclass(frozen=True)
class ICReport:
    violations: Tuple[ICViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_ic(inst: Instance, mech: Mechanism) -> ICReport:
    """Exact check of every IC, sum-to-one, and nonnegativity constraint."""
    violations: List[ICViolation] = []
    support = list(inst.dist.support.keys())
    for lst in support:
        if lst not in mech.alloc:
            violations.append(
                ICViolation("missing", lst.entries, "no allocation for this list")
            )
            continue
        row = mech.alloc[lst]
        off_list = set(row) - lst.as_set()
        if off_list:
            violations.append(
                ICViolation(
                    "off-list", lst.entries, f"allocates off-list items {off_list}"
                )
            )
        for j, x in row.items():
            if x < 0:
                violations.append(
                    ICViolation("nonneg", lst.entries, f"x[{j!r}] = {x} < 0")
                )
        total = sum(row.values(), Fraction(0))
        if total > 1:
            violations.append(
                ICViolation(
                    "sum", lst.entries, f"allocations sum to {format_rational(total)}"
                )
            )
    for lst in support:
        if lst not in mech.alloc:
            continue
        for k in range(1, len(lst) + 1):
            top = set(lst.entries[:k])
            lhs = sum((mech.probability(lst, j) for j in lst.entries[:k]), Fraction(0))
            for other in support:
                if other not in mech.alloc:
                    continue
                rhs = sum(
                    (mech.probability(other, j) for j in other.entries if j in top),
                    Fraction(0),
                )
                if lhs < rhs:
                    violations.append(
                        ICViolation(
                            "ic",
                            lst.entries,
                            f"top-{k} probability {format_rational(lhs)} < "
                            f"{format_rational(rhs)} via report {other.entries}",
                            k=k,
                            other=other.entries,
                        )
                    )
    return ICReport(tuple(violations))


def assortment_to_mechanism(inst: Instance, S: Iterable[Item]) -> Mechanism:
    """The deterministic mechanism that grants the first on-list member of S."""
    S = inst.assortment(S)
    alloc: Dict[RankedList, Dict[Item, Fraction]] = {}
    for lst in inst.dist.support:
        row: Dict[Item, Fraction] = {}
        for j in lst.entries:
            if j in S:
                row[j] = Fraction(1)
                break
        alloc[lst] = row
    return Mechanism(alloc)


# ---------------------------------------------------------------------------
# Set functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SetFunction:
    """A [0,1]-valued set function with f(empty) = 0; checks are on demand."""

    values: Mapping[frozenset, Fraction]
    universe: Tuple[Item, ...]

    def __init__(self, values, universe):
        universe = tuple(universe)
        clean = {frozenset(S): parse_rational(v) for S, v in dict(values).items()}
        clean.setdefault(frozenset(), Fraction(0))
        if clean[frozenset()] != 0:
            raise InvalidMechanismError("set function must vanish on the empty set")
        for S, v in clean.items():
            if not S <= set(universe):
                raise InvalidMechanismError(f"value on unknown set {set(S)}")
            if not (0 <= v <= 1):
                raise InvalidMechanismError(f"value {v} outside [0, 1]")
        object.__setattr__(self, "values", clean)
        object.__setattr__(self, "universe", universe)

    def __call__(self, S: Iterable[Item]) -> Fraction:
        S = frozenset(S)
        if S not in self.values:
            raise KeyError(f"set function not defined on {set(S)}")
        return self.values[S]

    def is_complete(self) -> bool:
        return len(self.values) == 2 ** len(self.universe)

    def monotone_witness(self) -> Optional[Tuple[frozenset, Item]]:
        """A pair (S, j) with f(S) > f(S + j), or None if monotone."""
        for S, v in self.values.items():
            for j in self.universe:
                if j in S:
                    continue
                bigger = S | {j}
                if bigger in self.values and self.values[bigger] < v:
                    return (S, j)
        return None

    def submodular_witness(self) -> Optional[Tuple[frozenset, Item, Item]]:
        """A triple (S, j, j') violating the diminishing-increment test."""
        for S in self.values:
            rest = [j for j in self.universe if j not in S]
            for j, jp in combinations(rest, 2):
                needed = [S | {j}, S | {jp}, S | {j, jp}]
                if any(T not in self.values for T in needed):
                    continue
                lhs = self.values[S | {j}] - self.values[S]
                rhs = self.values[S | {j, jp}] - self.values[S | {jp}]
                if lhs < rhs:
                    return (S, j, jp)
        return None


def mechanism_to_set_function(inst: Instance, mech: Mechanism) -> SetFunction:
    """For each set S, the best probability any report gives of landing in S.

    Also asserts the telescoping identity (the allocation to a list's k-th
    item equals the increment of f along that list) and revenue equality;
    both fail only on non-IC input.
    """
    universe = tuple(inst.items)
    values: Dict[frozenset, Fraction] = {}
    n = len(universe)
    for size in range(n + 1):
        for combo in combinations(universe, size):
            S = frozenset(combo)
            best = Fraction(0)
            for lst in inst.dist.support:
                got = sum(
                    (mech.probability(lst, j) for j in lst.entries if j in S),
                    Fraction(0),
                )
                if got > best:
                    best = got
            values[S] = best
    f = SetFunction(values, universe)
    for lst in inst.dist.support:
        for k in range(1, len(lst) + 1):
            inc = f(lst.entries[:k]) - f(lst.entries[: k - 1])
            if inc != mech.probability(lst, lst.entries[k - 1]):
                raise IdentityCheckError(
                    f"allocation increment mismatch on {lst.entries} at position {k};"
                    " the mechanism is not IC"
                )
    rev_f = set_function_revenue(inst, f)
    rev_x = mechanism_revenue(inst, mech)
    if rev_f != rev_x:
        raise IdentityCheckError("set-function revenue differs from mechanism revenue")
    return f


def set_function_revenue(inst: Instance, f: SetFunction) -> Fraction:
    total = Fraction(0)
    for lst, prob in inst.dist.support.items():
        for k in range(1, len(lst) + 1):
            inc = f(lst.entries[:k]) - f(lst.entries[: k - 1])
            total += prob * inst.prices[lst.entries[k - 1]] * inc
    return total


def submodular_to_mechanism(inst: Instance, f: SetFunction) -> Mechanism:
    """Increments of a monotone submodular f along each list; always IC."""
    witness = f.monotone_witness()
    if witness is not None:
        raise SubmodularityError(witness + ("not monotone",))
    witness = f.submodular_witness()
    if witness is not None:
        raise SubmodularityError(witness)
    alloc: Dict[RankedList, Dict[Item, Fraction]] = {}
    for lst in inst.dist.support:
        row: Dict[Item, Fraction] = {}
        for k in range(1, len(lst) + 1):
            inc = f(lst.entries[:k]) - f(lst.entries[: k - 1])
            if inc != 0:
                row[lst.entries[k - 1]] = inc
        alloc[lst] = row
    mech = Mechanism(alloc)
    report = verify_ic(inst, mech)
    if not report.ok:
        raise IdentityCheckError(
            "submodular increments produced a non-IC mechanism (bug signal)"
        )
    return mech


# ---------------------------------------------------------------------------
# The set-function relaxation LP
# ---------------------------------------------------------------------------


SET_FUNCTION_LP_CAP = 12


def _set_var(S: Iterable[Item]) -> str:
    return "f[" + ",".join(str(j) for j in sorted(S, key=str)) + "]"


def build_set_function_lp(inst: Instance, cap: int = SET_FUNCTION_LP_CAP) -> RationalLP:
    """Relaxation over monotone [0,1] set functions of the prefix revenue.

    One variable per subset, pairwise monotonicity rows, and the objective
    collects r * Pr[prefix] increments per prefix set.  The constraint
    matrix is an interval/network matrix, so vertex optima are 0/1.
    """
    n = len(inst.items)
    if n > cap:
        raise CapExceededError("build_set_function_lp", n, cap, "2^n variables")
    lp = RationalLP()
    universe = tuple(sorted(inst.items, key=str))
    for size in range(n + 1):
        for combo in combinations(universe, size):
            if size == 0:
                lp.add_variable(_set_var(combo), lo=0, hi=0)
            else:
                lp.add_variable(_set_var(combo), lo=0, hi=1)
    for size in range(n):
        for combo in combinations(universe, size):
            S = frozenset(combo)
            for j in universe:
                if j in S:
                    continue
                lp.add_row(
                    {_set_var(S): 1, _set_var(S | {j}): -1}, "<=", 0,
                )
    objective: Dict[str, Fraction] = {}
    for prefix, prob in inst.dist.realizable_prefixes().items():
        price = inst.prices[prefix.endpoint]
        big = _set_var(prefix.as_set())
        small = _set_var(prefix.body.as_set())
        objective[big] = objective.get(big, Fraction(0)) + price * prob
        objective[small] = objective.get(small, Fraction(0)) - price * prob
    lp.set_objective(objective)
    return lp


def solve_set_function_lp(inst: Instance, cap: int = SET_FUNCTION_LP_CAP):
    """Optimal relaxation value with the attaining vertex set function."""
    lp = build_set_function_lp(inst, cap=cap)
    sol = solve_lp(lp)
    universe = tuple(sorted(inst.items, key=str))
    values = {}
    for size in range(len(universe) + 1):
        for combo in combinations(universe, size):
            values[frozenset(combo)] = sol.assignment[_set_var(combo)]
    return sol.value, SetFunction(values, universe)


# ---------------------------------------------------------------------------
# The assortment-relaxation LP with inclusion variables
# ---------------------------------------------------------------------------


def _z_var(j: Item) -> str:
    return f"z[{j}]"


def build_bm_lp(inst: Instance) -> RationalLP:
    """Weaker relaxation with per-item inclusion variables.

    Selling an item never exceeds its inclusion probability, and anything
    sold below position k on a list is capped by that position's exclusion;
    integer solutions are exactly assortments.
    """
    lp = RationalLP()
    support = list(inst.dist.support.keys())
    for lst in support:
        for j in lst.entries:
            lp.add_variable(_var(lst, j), lo=0)
    for j in inst.items:
        lp.add_variable(_z_var(j), lo=0, hi=1)
    objective: Dict[str, Fraction] = {}
    for lst, prob in inst.dist.support.items():
        for j in lst.entries:
            name = _var(lst, j)
            objective[name] = objective.get(name, Fraction(0)) + prob * inst.prices[j]
    lp.set_objective(objective)
    for lst in support:
        if len(lst) == 0:
            continue
        lp.add_row({_var(lst, j): 1 for j in lst.entries}, "<=", 1)
        for k in range(1, len(lst) + 1):
            jk = lst.entries[k - 1]
            lp.add_row({_var(lst, jk): 1, _z_var(jk): -1}, "<=", 0)
            coefs = {_var(lst, lst.entries[kp - 1]): Fraction(1)
                     for kp in range(k + 1, len(lst) + 1)}
            coefs[_z_var(jk)] = coefs.get(_z_var(jk), Fraction(0)) + 1
            lp.add_row(coefs, "<=", 1)
    return lp


def solve_bm_lp(inst: Instance) -> Tuple[Fraction, LPSolution]:
    lp = build_bm_lp(inst)
    sol = solve_lp(lp)
    return sol.value, sol


def containment_witness(inst: Instance, mech: Mechanism) -> Dict[Item, Fraction]:
    """Inclusion variables certifying an IC mechanism inside the weaker LP.

    Sets z_j to the mechanism's best allocation of j over reports and checks
    every row of the weaker LP exactly; a violation would contradict the LP
    containment and is raised as a bug signal.
    """
    z: Dict[Item, Fraction] = {}
    for j in inst.items:
        best = Fraction(0)
        for lst in inst.dist.support:
            got = mech.probability(lst, j)
            if got > best:
                best = got
        z[j] = best
    for lst in inst.dist.support:
        total = sum((mech.probability(lst, j) for j in lst.entries), Fraction(0))
        if total > 1:
            raise ContainmentError(f"allocations on {lst.entries} exceed 1")
        for k in range(1, len(lst) + 1):
            jk = lst.entries[k - 1]
            if mech.probability(lst, jk) > z[jk]:
                raise ContainmentError(
                    f"x <= z fails for item {jk!r} on list {lst.entries}"
                )
            below = sum(
                (mech.probability(lst, lst.entries[kp - 1])
                 for kp in range(k + 1, len(lst) + 1)),
                Fraction(0),
            )
            if below > 1 - z[jk]:
                raise ContainmentError(
                    f"exclusion cap fails at position {k} of list {lst.entries}"
                )
    return z


# ---------------------------------------------------------------------------
# Mechanism JSON interchange
# ---------------------------------------------------------------------------


def mechanism_to_json(mech: Mechanism) -> dict:
    entries = []
    for lst in sorted(mech.alloc, key=lambda l: (len(l.entries), tuple(map(str, l.entries)))):
        entries.append(
            {
                "list": list(lst.entries),
                "probs": {
                    str(j): format_rational(p) for j, p in sorted(
                        mech.alloc[lst].items(), key=lambda kv: str(kv[0])
                    )
                },
            }
        )
    return {"alloc": entries}


def mechanism_from_json(obj: dict, items: Optional[Iterable[Item]] = None,
                        validate: bool = True) -> Mechanism:
    if "alloc" not in obj:
        raise InvalidMechanismError('mechanism JSON needs an "alloc" key')
    key_map = {str(j): j for j in items} if items is not None else {}
    alloc = {}
    for entry in obj["alloc"]:
        lst = tuple(entry["list"])
        probs = {
            key_map.get(name, name): parse_rational(p)
            for name, p in entry.get("probs", {}).items()
        }
        alloc[lst] = probs
    return Mechanism(alloc, validate=validate)
