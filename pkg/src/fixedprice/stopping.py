"""Stopping policies on the prefix tree, the history-monotone-futures
condition, adjusted prices, and the tier decomposition.

A deterministic stopping policy walks the prefix tree of the buyer's list
and decides at each visited item whether to take it, seeing only the
unordered set of items passed so far.  Monotone policies (stop sets closed
upward in the history) bound IC-mechanism revenue from above; constant
policies are exactly assortments.  The history-monotone-futures condition on
a distribution makes the best monotone policy an assortment, and is checked
here exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from .choice_models import MarkovChainParams, _solve_linear
from .core import (
    Instance,
    Item,
    ListDistribution,
    Prefix,
    assortment_revenue,
    choice_probability,
)
from .errors import (
    CapExceededError,
    IdentityCheckError,
    InvalidInstanceError,
    MonotonicityViolationError,
    PrefixOverlapError,
    UnrealizablePrefixError,
)
from .rational import parse_rational

POLICY_ITEM_CAP = 4


@dataclass(frozen=True)
class MonotoneStoppingPolicy:
    """Per-item stop rules on unordered histories, stored by minimal sets.

    ``generators[j]`` is an antichain of history sets; the policy stops on
    item ``j`` after history ``H`` iff some generator is contained in ``H``.
    Upward closure in the history is structural in this representation.
    """

    generators: Mapping[Item, Tuple[FrozenSet[Item], ...]]

    def __init__(self, generators):
        clean: Dict[Item, Tuple[FrozenSet[Item], ...]] = {}
        for j, gens in dict(generators).items():
            gens = [frozenset(g) for g in gens]
            if any(j in g for g in gens):
                raise InvalidInstanceError(
                    f"stop rule for {j!r} references {j!r} in its own history"
                )
            minimal = tuple(
                sorted(
                    (g for g in gens if not any(h < g for h in gens)),
                    key=lambda g: (len(g), tuple(sorted(map(str, g)))),
                )
            )
            clean[j] = minimal
        object.__setattr__(self, "generators", clean)

    def stops(self, j: Item, history: Iterable[Item]) -> bool:
        history = frozenset(history)
        return any(g <= history for g in self.generators.get(j, ()))

    @classmethod
    def from_assortment(cls, items: Iterable[Item], S: Iterable[Item]):
        S = frozenset(S)
        return cls({j: ((frozenset(),) if j in S else ()) for j in items})

    @classmethod
    def from_table(cls, items: Iterable[Item], table: Mapping[Item, Mapping[FrozenSet[Item], bool]]):
        """Build from explicit truth tables, verifying monotonicity."""
        items = tuple(items)
        gens: Dict[Item, List[FrozenSet[Item]]] = {}
        for j in items:
            rows = {frozenset(H): bool(v) for H, v in dict(table.get(j, {})).items()}
            for H, v in rows.items():
                for Hp, vp in rows.items():
                    if H <= Hp and v and not vp:
                        raise MonotonicityViolationError(
                            f"stop rule for {j!r} is not monotone: "
                            f"{set(H)} stops but {set(Hp)} does not"
                        )
            gens[j] = [H for H, v in rows.items() if v]
        return cls(gens)

    def one_entry_count(self, items: Iterable[Item]) -> int:
        """Number of (item, history) pairs mapped to "stop" over the full domain."""
        items = tuple(items)
        total = 0
        for j in items:
            others = [k for k in items if k != j]
            for size in range(len(others) + 1):
                for combo in combinations(others, size):
                    if self.stops(j, combo):
                        total += 1
        return total


def stopping_rule_revenue(
    inst: Instance, rule: Callable[[Item, FrozenSet[Item]], bool]
) -> Fraction:
    """Expected reward of an arbitrary deterministic stop rule.

    Sums, over realizable prefixes, the prefix probability times its endpoint
    price when the rule stops there and nowhere earlier.  No monotonicity is
    assumed; use this to evaluate hand-built non-monotone rules.
    """
    total = Fraction(0)
    for prefix, prob in inst.dist.realizable_prefixes().items():
        entries = prefix.entries
        if not rule(entries[-1], frozenset(entries[:-1])):
            continue
        if any(rule(entries[k], frozenset(entries[:k])) for k in range(len(entries) - 1)):
            continue
        total += prob * inst.prices[entries[-1]]
    return total


def policy_revenue(inst: Instance, policy: MonotoneStoppingPolicy) -> Fraction:
    """Exact expected reward of a monotone stopping policy."""
    return stopping_rule_revenue(inst, policy.stops)


# ---------------------------------------------------------------------------
# Brute-force optimal monotone policy
# ---------------------------------------------------------------------------


def _monotone_masks(k: int) -> List[int]:
    """All monotone boolean functions on k ground elements, as bitmaps over
    the 2^k subsets (bit h = value on subset-with-bitmask h), ascending."""
    subsets = 1 << k
    masks = []
    for mask in range(1 << subsets):
        ok = True
        for h in range(subsets):
            if not (mask >> h) & 1:
                continue
            # every superset of h must also be 1
            rest = (~h) & (subsets - 1)
            sup = rest
            while ok:
                if not (mask >> (h | sup)) & 1:
                    ok = False
                if sup == 0:
                    break
                sup = (sup - 1) & rest
            if not ok:
                break
        if ok:
            masks.append(mask)
    return masks


def optimal_policy_bruteforce(
    inst: Instance, cap: int = POLICY_ITEM_CAP
) -> Tuple[MonotoneStoppingPolicy, Fraction]:
    """Exhaustive maximum over all tuples of monotone per-item stop rules.

    Ties prefer fewer stop entries, then the lexicographically smallest
    function bitmaps in item order.  The item cap reflects the doubly
    exponential growth of the count of monotone boolean functions (Dedekind
    numbers): 20 per item at n = 4, but 168 per item at n = 5.
    """
    items = tuple(sorted(inst.items, key=str))
    n = len(items)
    if n > cap:
        raise CapExceededError(
            "optimal_policy_bruteforce", n, cap,
            "Dedekind growth of monotone stop rules (168^n tuples beyond n=4)",
        )
    index = {j: i for i, j in enumerate(items)}
    others = {j: [k for k in items if k != j] for j in items}
    other_pos = {j: {k: p for p, k in enumerate(others[j])} for j in items}
    masks = _monotone_masks(n - 1)
    n_masks = len(masks)

    # Scale probabilities and prices to integers so revenue sums stay exact.
    prob_den = 1
    for p in inst.dist.support.values():
        prob_den = prob_den * p.denominator // gcd(prob_den, p.denominator)
    price_den = 1
    for r in inst.prices.values():
        price_den = price_den * r.denominator // gcd(price_den, r.denominator)
    scale = prob_den * price_den

    # bits[i][m, h] = stop decision of mask m for item i on history bitmap h.
    bits = {}
    for j in items:
        arr = np.zeros((n_masks, 1 << (n - 1)), dtype=np.int64)
        for mi, mask in enumerate(masks):
            for h in range(1 << (n - 1)):
                arr[mi, h] = (mask >> h) & 1
        bits[j] = arr

    bound = sum(
        int(p * prob_den) * max((int(r * price_den) for r in inst.prices.values()),
                                default=0)
        for p in inst.dist.support.values()
    )
    use_numpy = bound < 2**60

    def history_bitmap(j: Item, entries: Tuple[Item, ...]) -> int:
        h = 0
        for e in entries:
            h |= 1 << other_pos[j][e]
        return h

    if use_numpy:
        rev = np.zeros((n_masks,) * n, dtype=np.int64)
        for lst, prob in inst.dist.support.items():
            if len(lst) == 0:
                continue
            p_int = int(prob * prob_den)
            value = np.zeros((), dtype=np.int64)
            for k in range(len(lst) - 1, -1, -1):
                j = lst.entries[k]
                h = history_bitmap(j, lst.entries[:k])
                shape = [1] * n
                shape[index[j]] = n_masks
                b = bits[j][:, h].reshape(shape)
                r_int = int(inst.prices[j] * price_den)
                value = b * r_int + (1 - b) * value
            rev = rev + p_int * value
        best_flat = int(rev.max())
        winners = np.argwhere(rev == best_flat)
        best_value = Fraction(best_flat, scale)
    else:  # rare fallback for huge numerators: same search in pure Python
        queries = []
        for lst, prob in inst.dist.support.items():
            seq = [
                (index[j], history_bitmap(j, lst.entries[:k]),
                 prob * inst.prices[j])
                for k, j in enumerate(lst.entries)
            ]
            queries.append(seq)
        best_value = Fraction(-1)
        winners = []

        def rec(i: int, chosen: List[int]):
            nonlocal best_value, winners
            if i == n:
                total = Fraction(0)
                for seq in queries:
                    for vi, h, val in seq:
                        if (masks[chosen[vi]] >> h) & 1:
                            total += val
                            break
                if total > best_value:
                    best_value = total
                    winners = [tuple(chosen)]
                elif total == best_value:
                    winners.append(tuple(chosen))
                return
            for mi in range(n_masks):
                chosen.append(mi)
                rec(i + 1, chosen)
                chosen.pop()

        rec(0, [])
        winners = np.array(winners)

    def tally_ones(choice) -> int:
        return sum(bin(masks[mi]).count("1") for mi in choice)

    best_choice = min(
        (tuple(int(mi) for mi in row) for row in winners),
        key=lambda ch: (tally_ones(ch), tuple(masks[mi] for mi in ch)),
    )

    generators: Dict[Item, List[FrozenSet[Item]]] = {}
    for j in items:
        mask = masks[best_choice[index[j]]]
        gens = []
        for h in range(1 << (n - 1)):
            if not (mask >> h) & 1:
                continue
            H = frozenset(others[j][p] for p in range(n - 1) if (h >> p) & 1)
            gens.append(H)
        generators[j] = gens
    policy = MonotoneStoppingPolicy(generators)
    return policy, best_value


# ---------------------------------------------------------------------------
# Optimal stopping directly on a transition chain
# ---------------------------------------------------------------------------


def markov_stopping_assortment(
    params: MarkovChainParams, prices: Mapping[Item, object]
) -> Tuple[frozenset, Dict[Item, Fraction]]:
    """Stop set of the repeat-visit stopping problem on a transition chain.

    Solves V[j] = max(r_j, sum_j' sigma[j][j'] V[j']) by policy iteration
    over stop sets with exact linear solves, and returns the set where
    stopping is (weakly) preferred along with the value function.
    """
    items = tuple(sorted(params.arrivals.keys(), key=str))
    prices = {j: parse_rational(prices[j]) for j in items}

    def continue_values(V: Dict[Item, Fraction]) -> Dict[Item, Fraction]:
        return {
            j: sum(
                (params.transitions.get(j, {}).get(k, Fraction(0)) * V[k]
                 for k in items),
                Fraction(0),
            )
            for j in items
        }

    def solve_for(stop: frozenset) -> Dict[Item, Fraction]:
        go = [j for j in items if j not in stop]
        V = {j: prices[j] for j in stop}
        if go:
            n = len(go)
            matrix = [
                [
                    (1 if r == c else 0)
                    - params.transitions.get(go[r], {}).get(go[c], Fraction(0))
                    for c in range(n)
                ]
                for r in range(n)
            ]
            rhs = [
                sum(
                    (params.transitions.get(go[r], {}).get(s, Fraction(0)) * prices[s]
                     for s in stop),
                    Fraction(0),
                )
                for r in range(n)
            ]
            sol = _solve_linear([[Fraction(x) for x in row] for row in matrix], [rhs])[0]
            V.update({go[r]: sol[r] for r in range(n)})
        return V

    stop = frozenset(items)
    seen = set()
    while True:
        if stop in seen:
            raise MonotonicityViolationError(
                "policy iteration cycled; the chain is not absorbing (bug signal)"
            )
        seen.add(stop)
        V = solve_for(stop)
        cont = continue_values(V)
        new_stop = frozenset(j for j in items if prices[j] >= cont[j])
        if new_stop == stop:
            V = {j: max(prices[j], cont[j]) for j in items}
            # A zero-price stop earns nothing, so drop such ties from the set.
            return frozenset(j for j in stop if prices[j] > 0), V
        stop = new_stop


# ---------------------------------------------------------------------------
# Adjusted prices and the revenue-difference identity
# ---------------------------------------------------------------------------


def s_adjusted_price(inst: Instance, S: Iterable[Item], prefix) -> Fraction:
    """Endpoint price minus the revenue that offering S would still collect
    conditional on the buyer's list starting with this prefix."""
    S = inst.assortment(S)
    prefix = Prefix(prefix)
    if inst.dist.prefix_probability(prefix) == 0:
        raise UnrealizablePrefixError(f"prefix {prefix.entries} has probability 0")
    if S & prefix.as_set():
        raise PrefixOverlapError("the assortment intersects the prefix")
    adjust = sum(
        (inst.prices[j] * choice_probability(inst, S, j, given=prefix) for j in S),
        Fraction(0),
    )
    return inst.prices[prefix.endpoint] - adjust


def adjusted_revenue_identity(
    inst: Instance, S: Iterable[Item], policy: MonotoneStoppingPolicy
) -> Tuple[Fraction, Fraction]:
    """Both sides of the exact identity

        Rev[policy] - Rev[S] = sum over S-disjoint stopped prefixes of
                               adjusted price * prefix probability.

    Requires the policy to stop unconditionally on every item of S (the
    identity is false otherwise); raises on any mismatch.
    """
    S = inst.assortment(S)
    for j in S:
        if not policy.stops(j, frozenset()):
            raise InvalidInstanceError(
                f"policy must stop unconditionally on assortment item {j!r}"
            )
    lhs = policy_revenue(inst, policy) - assortment_revenue(inst, S)
    rhs = Fraction(0)
    for prefix, prob in inst.dist.realizable_prefixes().items():
        entries = prefix.entries
        if S & set(entries):
            continue
        if not policy.stops(entries[-1], frozenset(entries[:-1])):
            continue
        if any(
            policy.stops(entries[k], frozenset(entries[:k]))
            for k in range(len(entries) - 1)
        ):
            continue
        rhs += s_adjusted_price(inst, S, prefix) * prob
    if lhs != rhs:
        raise IdentityCheckError(
            f"adjusted-revenue identity failed: {lhs} != {rhs} (bug signal)"
        )
    return lhs, rhs


# ---------------------------------------------------------------------------
# Domination and the history-monotone-futures condition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DominationResult:
    holds: bool
    witness: Optional[Tuple[frozenset, Item]] = None  # (S, j) with a reversal


@dataclass(frozen=True)
class ConditionWitness:
    prefix: Tuple[Item, ...]
    other: Tuple[Item, ...]
    assortment: frozenset
    item: Item


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    witness: Optional[ConditionWitness] = None

    def to_json(self) -> dict:
        if self.holds:
            return {"holds": True, "witness": None}
        w = self.witness
        return {
            "holds": False,
            "witness": {
                "rho": list(w.prefix),
                "rho_prime": list(w.other),
                "S": sorted(map(str, w.assortment)),
                "j": str(w.item),
            },
        }


def _conditional_choice(dist, cache, prefix: Prefix, S: frozenset, j: Item) -> Fraction:
    key = (prefix.entries, S, j)
    if key not in cache:
        cache[key] = choice_probability(dist, S, j, given=prefix)
    return cache[key]


def _subsets_sorted(pool: List[Item]):
    for size in range(1, len(pool) + 1):
        for combo in combinations(pool, size):
            yield frozenset(combo)


def check_domination(
    dist: ListDistribution, prefix, other, tol=0
) -> DominationResult:
    """Does the future after ``prefix`` dominate the future after ``other``?

    Domination: for every assortment S avoiding both prefixes and every j in
    S, the conditional probability of selling j is at least as high from
    ``prefix``.  Returns the first reversal (smallest S, then item) found.
    """
    prefix, other = Prefix(prefix), Prefix(other)
    for p in (prefix, other):
        if dist.prefix_probability(p) == 0:
            raise UnrealizablePrefixError(f"prefix {p.entries} has probability 0")
    tol = parse_rational(tol) if not isinstance(tol, float) else Fraction(tol)
    cache: Dict = {}
    banned = prefix.as_set() | other.as_set()
    pool = sorted((j for j in dist.items if j not in banned), key=str)
    for S in _subsets_sorted(pool):
        for j in sorted(S, key=str):
            lhs = _conditional_choice(dist, cache, prefix, S, j)
            rhs = _conditional_choice(dist, cache, other, S, j)
            if lhs < rhs - tol:
                return DominationResult(False, (S, j))
    return DominationResult(True)


def _prefix_sort_key(entries: Tuple[Item, ...]):
    return (len(entries), tuple(map(str, entries)))


def check_history_monotone(dist: ListDistribution, tol=0) -> ConditionReport:
    """Check that set-wise larger same-endpoint histories dominate.

    For every ordered pair of realizable prefixes with equal endpoints where
    the first body is not contained in the second, the first future must
    dominate.  Comparisons are exact unless a tolerance is supplied for
    float-born distributions.  The witness is the first violation in the
    deterministic (prefix, prefix, assortment, item) order.
    """
    prefixes = sorted(
        (p.entries for p in dist.realizable_prefixes()), key=_prefix_sort_key
    )
    tol_f = Fraction(tol) if isinstance(tol, float) else parse_rational(tol)
    cache: Dict = {}
    by_endpoint: Dict[Item, List[Tuple[Item, ...]]] = {}
    for entries in prefixes:
        by_endpoint.setdefault(entries[-1], []).append(entries)
    for endpoint in sorted(by_endpoint, key=str):
        group = by_endpoint[endpoint]
        for rho in group:
            body_rho = frozenset(rho[:-1])
            for rho_p in group:
                if rho == rho_p:
                    continue
                if body_rho <= frozenset(rho_p[:-1]):
                    continue  # only non-contained bodies must dominate
                banned = frozenset(rho) | frozenset(rho_p)
                pool = sorted((j for j in dist.items if j not in banned), key=str)
                for S in _subsets_sorted(pool):
                    for j in sorted(S, key=str):
                        lhs = _conditional_choice(dist, cache, Prefix(rho), S, j)
                        rhs = _conditional_choice(dist, cache, Prefix(rho_p), S, j)
                        if lhs < rhs - tol_f:
                            return ConditionReport(
                                False, ConditionWitness(rho, rho_p, S, j)
                            )
    return ConditionReport(True)


# ---------------------------------------------------------------------------
# Tier decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tier:
    prefixes: Tuple[Tuple[Item, ...], ...]
    kind: str  # "incomparable-equal" | "setwise-identical"


@dataclass(frozen=True)
class TierDecomposition:
    tiers: Tuple[Tier, ...]

    def to_json(self) -> list:
        return [[list(p) for p in tier.prefixes] for tier in self.tiers]


def tier_decomposition(
    dist: ListDistribution, S: Iterable[Item], j: Item, tol=0
) -> TierDecomposition:
    """Containment-ordered grouping of the S-avoiding prefixes ending at j.

    Requires the distribution to have history-monotone futures.  Builds the
    incomparability graph on prefix bodies, merges connected components that
    contain one another into tiers, orders tiers by set containment, and
    verifies: equal conditional choice probabilities within a tier,
    containment plus dominating probabilities across tiers, and adjusted
    prices non-increasing from lower to higher tiers.
    """
    S = frozenset(S)
    if j in S:
        raise InvalidInstanceError("the endpoint item must lie outside the assortment")
    report = check_history_monotone(dist, tol=tol)
    if not report.holds:
        raise InvalidInstanceError(
            "distribution lacks history-monotone futures; no tier structure"
        )
    tol_f = Fraction(tol) if isinstance(tol, float) else parse_rational(tol)

    prefixes = [
        p.entries
        for p in dist.realizable_prefixes()
        if p.endpoint == j and not (S & p.as_set())
    ]
    prefixes.sort(key=_prefix_sort_key)
    if not prefixes:
        return TierDecomposition(())

    sets = {p: frozenset(p[:-1]) for p in prefixes}
    n = len(prefixes)
    adj: Dict[int, List[int]] = {i: [] for i in range(n)}
    for a in range(n):
        for b in range(a + 1, n):
            sa, sb = sets[prefixes[a]], sets[prefixes[b]]
            if not (sa <= sb) and not (sb <= sa):
                adj[a].append(b)
                adj[b].append(a)

    comp = [-1] * n
    n_comp = 0
    for start in range(n):
        if comp[start] != -1:
            continue
        stack = [start]
        comp[start] = n_comp
        while stack:
            cur = stack.pop()
            for nxt in adj[cur]:
                if comp[nxt] == -1:
                    comp[nxt] = n_comp
                    stack.append(nxt)
        n_comp += 1

    members: Dict[int, List[int]] = {c: [] for c in range(n_comp)}
    for i, c in enumerate(comp):
        members[c].append(i)
    reps = {c: sets[prefixes[members[c][0]]] for c in range(n_comp)}

    # Merge mutually containing components, then order by containment.
    classes: List[List[int]] = []
    for c in range(n_comp):
        placed = False
        for cls in classes:
            r = reps[cls[0]]
            if reps[c] <= r and r <= reps[c]:
                cls.append(c)
                placed = True
                break
        if not placed:
            classes.append([c])
    classes.sort(key=lambda cls: (len(reps[cls[0]]),
                                  tuple(sorted(map(str, reps[cls[0]])))))

    tiers: List[Tier] = []
    for cls in classes:
        idxs = sorted(
            (i for c in cls for i in members[c]),
            key=lambda i: _prefix_sort_key(prefixes[i]),
        )
        tier_prefixes = tuple(prefixes[i] for i in idxs)
        tier_sets = {sets[p] | {j} for p in tier_prefixes}
        if len(tier_sets) == 1:
            kind = "setwise-identical"
        else:
            kind = "incomparable-equal"
        tiers.append(Tier(tier_prefixes, kind))

    # Within-tier: equal conditional choice probabilities toward S for every
    # pair of prefixes that differ as sets.  Set-wise identical prefixes may
    # legitimately have different futures.  (A tier may also mix incomparable
    # and contained bodies when a chain of equal futures links them; the
    # distinct-set equality below is the property downstream arguments rely
    # on, so containment inside a tier is tolerated.)
    cache: Dict = {}
    for tier in tiers:
        for a_i in range(len(tier.prefixes)):
            for b_i in range(a_i + 1, len(tier.prefixes)):
                pa, pb = tier.prefixes[a_i], tier.prefixes[b_i]
                if frozenset(pa) == frozenset(pb):
                    continue
                for jp in sorted(S, key=str):
                    a = _conditional_choice(dist, cache, Prefix(pa), frozenset(S), jp)
                    b = _conditional_choice(dist, cache, Prefix(pb), frozenset(S), jp)
                    if abs(a - b) > tol_f:
                        raise IdentityCheckError(
                            f"unequal choice probabilities for distinct-set "
                            f"prefixes {pa} and {pb} in one tier (bug signal)"
                        )

    # Across tiers: strict containment, dominating probabilities, and
    # non-increasing adjusted prices.
    adjusted: Dict[Tuple[Item, ...], Fraction] = {}
    have_prices = False
    for t in range(len(tiers)):
        for tp in range(t + 1, len(tiers)):
            for lo in tiers[t].prefixes:
                for hi in tiers[tp].prefixes:
                    if not (sets[lo] | {j}) < (sets[hi] | {j}):
                        raise IdentityCheckError(
                            f"tier order broken: {hi} does not contain {lo} (bug signal)"
                        )
                    for jp in sorted(S, key=str):
                        a = _conditional_choice(dist, cache, Prefix(hi), frozenset(S), jp)
                        b = _conditional_choice(dist, cache, Prefix(lo), frozenset(S), jp)
                        if a < b - tol_f:
                            raise IdentityCheckError(
                                "higher tier fails to dominate (bug signal)"
                            )
    return TierDecomposition(tuple(tiers))


def tier_adjusted_prices(
    inst: Instance, S: Iterable[Item], j: Item, tol=0
) -> List[List[Fraction]]:
    """Adjusted prices arranged by tier; verifies they never increase with
    the tier and agree within distinct-set tiers up to the tolerance."""
    S = frozenset(S)
    decomposition = tier_decomposition(inst.dist, S, j, tol=tol)
    tol_f = Fraction(tol) if isinstance(tol, float) else parse_rational(tol)
    rows: List[List[Fraction]] = []
    for tier in decomposition.tiers:
        rows.append([s_adjusted_price(inst, S, p) for p in tier.prefixes])
    floor = None
    for tier, prices in zip(decomposition.tiers, rows):
        if floor is not None and max(prices) > floor + tol_f:
            raise IdentityCheckError("adjusted prices increased across tiers")
        # Equality inside a tier applies to distinct-set pairs only;
        # set-wise identical prefixes may carry different adjusted prices.
        per_set: Dict[frozenset, Fraction] = {}
        for p, price in zip(tier.prefixes, prices):
            per_set.setdefault(frozenset(p), price)
        vals = list(per_set.values())
        if len(vals) > 1 and max(vals) - min(vals) > tol_f:
            raise IdentityCheckError("unequal adjusted prices inside a tier")
        floor = min(prices)
    return rows
