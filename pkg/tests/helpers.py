"""Shared instance builders and seeded random generators for the test suite."""

from __future__ import annotations

import random
import string
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from fixedprice import (
    Instance,
    ListDistribution,
    MarkovChainParams,
    Menu,
    MenuEntry,
    MnlParams,
    MultiBuyerInstance,
    NestStructure,
    gen_elimination_by_aspects,
    gen_markov_chain,
    gen_mnl,
    mix_with_singletons,
)

ITEM_POOL = list(string.ascii_uppercase)


# ---------------------------------------------------------------------------
# Canonical worked instances
# ---------------------------------------------------------------------------


def four_item_clash() -> Instance:
    """One premium item always ranked behind a cheap one; lotteries win here."""
    lists = [("B", "A"), ("C", "A"), ("D", "A"), ("C", "B"), ("D", "B"), ("D", "C")]
    return Instance(
        "ABCD",
        {"A": 2, "B": 1, "C": 1, "D": 1},
        ListDistribution([(l, Fraction(1, 6)) for l in lists]),
    )


def condition_violation_minimal() -> Instance:
    """Smallest support where a longer history has a worse future."""
    return Instance(
        "ABC",
        {"A": 1, "B": 1, "C": 1},
        ListDistribution({("B", "A"): Fraction(1, 2), ("C", "B"): Fraction(1, 2)}),
    )


def history_monotone_tree() -> Instance:
    """Hand-built four-item tree satisfying history-monotone futures."""
    dist = ListDistribution(
        {
            ("B",): Fraction(1, 3),
            ("C", "B", "A"): Fraction(1, 12),
            ("C", "B"): Fraction(1, 12),
            ("C", "D", "B", "A"): Fraction(1, 8),
            ("C", "D", "B"): Fraction(1, 24),
            ("D", "B", "A"): Fraction(1, 12),
            ("D", "B"): Fraction(1, 12),
            ("D", "C", "B", "A"): Fraction(1, 6),
        }
    )
    return Instance("ABCD", {"A": 2, "B": 1, "C": 1, "D": 1}, dist)


def robust_menu_instance() -> Instance:
    """Five items incl. a 3/2-priced specialty; a menu can beat every mechanism."""
    lists = {
        ("2", "1"): Fraction(1, 12),
        ("3", "1"): Fraction(1, 12),
        ("4", "1"): Fraction(1, 12),
        ("3", "2"): Fraction(1, 12),
        ("4", "2"): Fraction(1, 12),
        ("4", "3"): Fraction(1, 12),
        ("5",): Fraction(1, 4),
        ("2", "5", "1"): Fraction(1, 12),
        ("3", "5", "1"): Fraction(1, 12),
        ("4", "5", "1"): Fraction(1, 12),
    }
    return Instance(
        "12345",
        {"1": 2, "2": 1, "3": 1, "4": 1, "5": Fraction(3, 2)},
        ListDistribution(lists),
    )


def seven_entry_menu() -> Menu:
    h = Fraction(1, 2)
    return Menu(
        [
            MenuEntry({"1": h, "2": h}),
            MenuEntry({"1": h, "3": h}),
            MenuEntry({"1": h, "4": h}),
            MenuEntry({"2": h, "3": h}),
            MenuEntry({"2": h, "4": h}),
            MenuEntry({"3": h, "4": h}),
            MenuEntry({"5": 1}),
        ]
    )


def two_buyer_two_item() -> MultiBuyerInstance:
    third = Fraction(1, 3)
    return MultiBuyerInstance(
        "AB",
        {"A": 1, "B": 1},
        [
            ListDistribution({("A",): third, ("B",): third, ("A", "B"): third}),
            ListDistribution({("A",): third, ("B",): third, ("B", "A"): third}),
        ],
    )


def singleton_mixture() -> Instance:
    """50-50 mix of a deterministic three-item list with one singleton."""
    return Instance(
        "ABC",
        {"A": 0, "B": 1, "C": 2},
        ListDistribution({("A", "B", "C"): Fraction(1, 2), ("B",): Fraction(1, 2)}),
    )


def equal_weight_chain_params(items=("A", "B", "C")) -> MarkovChainParams:
    """Uniform arrivals, uniform transitions among the others and to exit."""
    n = len(items)
    share = Fraction(1, n + 1)
    step = Fraction(1, n)
    return MarkovChainParams(
        {j: share for j in items},
        {j: {k: step for k in items if k != j} for j in items},
    )


# ---------------------------------------------------------------------------
# Seeded random generators
# ---------------------------------------------------------------------------


def random_instance(
    rng: random.Random,
    n_min: int = 2,
    n_max: int = 4,
    max_lists: int = 5,
    max_len: Optional[int] = None,
    max_price: int = 5,
    allow_empty: bool = True,
) -> Instance:
    """Arbitrary small instance with a common-denominator distribution."""
    n = rng.randint(n_min, n_max)
    items = ITEM_POOL[:n]
    cap_len = min(n, max_len if max_len is not None else n)
    lists = set()
    target = rng.randint(1, max_lists)
    guard = 0
    while len(lists) < target and guard < 100:
        guard += 1
        length = rng.randint(1, cap_len)
        lst = tuple(rng.sample(items, length))
        lists.add(lst)
    lists = sorted(lists)
    if allow_empty and rng.random() < 0.3:
        lists.append(())
    weights = [rng.randint(1, 6) for _ in lists]
    total = sum(weights)
    dist = ListDistribution(
        [(lst, Fraction(w, total)) for lst, w in zip(lists, weights)]
    )
    prices = {j: Fraction(rng.randint(0, max_price)) for j in items}
    if all(p == 0 for p in prices.values()):
        prices[items[0]] = Fraction(1)
    return Instance(items, prices, dist)


def random_bounded_length_instance(
    rng: random.Random, length: int, n_max: int = 6, max_lists: int = 6
) -> Instance:
    """Instance whose longest supported list has exactly the given length."""
    while True:
        inst = random_instance(
            rng, n_min=max(2, length), n_max=n_max, max_lists=max_lists,
            max_len=length, allow_empty=False,
        )
        if max(len(l) for l in inst.dist.support) == length:
            return inst


def random_sparse_chain(
    rng: random.Random, n: int, support_cap: int = 12
) -> Tuple[Instance, MarkovChainParams]:
    """Instance generated by a sparse (layered) absorbing chain.

    Transitions only run forward in a random item order, so the support
    stays small and absorption is automatic; resamples until the support
    fits under the cap.
    """
    items = ITEM_POOL[:n]
    while True:
        order = items[:]
        rng.shuffle(order)
        transitions: Dict[str, Dict[str, Fraction]] = {}
        for pos, j in enumerate(order):
            row: Dict[str, Fraction] = {}
            later = order[pos + 1:]
            rng.shuffle(later)
            for k in later[: rng.randint(0, 2)]:
                row[k] = Fraction(rng.randint(1, 3), 6)
            while sum(row.values()) > 1:
                row[rng.choice(list(row))] /= 2
            transitions[j] = row
        starters = rng.sample(items, rng.randint(1, 2))
        lam = Fraction(rng.randint(1, 3), 6)
        arrivals = {j: Fraction(0) for j in items}
        for j in starters:
            arrivals[j] = lam / len(starters)
        params = MarkovChainParams(arrivals, transitions)
        dist = gen_markov_chain(items, params)
        if len(dist.support) <= support_cap:
            prices = {j: Fraction(rng.randint(0, 5)) for j in items}
            if all(p == 0 for p in prices.values()):
                prices[items[0]] = Fraction(2)
            return Instance(items, prices, dist), params


def random_history_monotone_instance(rng: random.Random, n_max: int = 6) -> Instance:
    """Instance provably satisfying history-monotone futures.

    Draws from sparse chains, their singleton mixtures, small plain-urn
    models, and small nest-locked urns; all of these satisfy the condition.
    """
    kind = rng.random()
    if kind < 0.55:
        n = rng.randint(2, n_max)
        inst, _ = random_sparse_chain(rng, n)
        return inst
    if kind < 0.8:
        n = rng.randint(2, min(4, n_max))
        inst, _ = random_sparse_chain(rng, n)
        alpha = {}
        budget = Fraction(rng.randint(0, 3), 12)
        for j in rng.sample(list(inst.items), min(2, len(inst.items))):
            a = min(budget, Fraction(rng.randint(0, 2), 12))
            alpha[j] = a
            budget -= a
        dist = mix_with_singletons(inst.dist, alpha)
        return Instance(inst.items, inst.prices, dist)
    n = rng.randint(2, 3)
    items = ITEM_POOL[:n]
    weights = {j: Fraction(rng.randint(1, 4)) for j in items}
    params = MnlParams(weights, Fraction(rng.randint(1, 4)))
    if kind < 0.9 or n < 3:
        dist = gen_mnl(items, params)
    else:
        split = rng.randint(1, n - 1)
        nests = NestStructure([frozenset(items[:split]), frozenset(items[split:])])
        dist = gen_elimination_by_aspects(items, params, nests)
    prices = {j: Fraction(rng.randint(0, 5)) for j in items}
    if all(p == 0 for p in prices.values()):
        prices[items[0]] = Fraction(1)
    return Instance(items, prices, dist)


def random_monotone_generators(
    rng: random.Random, items, always_stop=frozenset()
) -> Dict[str, List[frozenset]]:
    """Random per-item upward-closed stop rules (as generator antichains)."""
    gens: Dict[str, List[frozenset]] = {}
    for j in items:
        if j in always_stop:
            gens[j] = [frozenset()]
            continue
        others = [k for k in items if k != j]
        out = []
        for _ in range(rng.randint(0, 2)):
            size = rng.randint(0, len(others))
            out.append(frozenset(rng.sample(others, size)))
        gens[j] = out
    return gens
