import random
from fractions import Fraction

import pytest

from fixedprice import (
    Instance,
    ListDistribution,
    MarkovChainParams,
    MonotoneStoppingPolicy,
    adjusted_revenue_identity,
    assortment_revenue,
    check_domination,
    check_history_monotone,
    gen_markov_chain,
    markov_stopping_assortment,
    optimal_assortment,
    optimal_policy_bruteforce,
    policy_revenue,
    s_adjusted_price,
    solve_mechanism_lp,
    solve_set_function_lp,
    stopping_rule_revenue,
    tier_adjusted_prices,
    tier_decomposition,
)
from fixedprice.errors import (
    CapExceededError,
    InvalidInstanceError,
    MonotonicityViolationError,
    PrefixOverlapError,
    UnrealizablePrefixError,
)

from .helpers import (
    condition_violation_minimal,
    equal_weight_chain_params,
    four_item_clash,
    history_monotone_tree,
    random_instance,
    random_monotone_generators,
    random_sparse_chain,
    singleton_mixture,
)


class TestPolicies:
    def test_constant_policy_is_assortment(self):
        rng = random.Random(4)
        for _ in range(10):
            inst = random_instance(rng)
            S = set(rng.sample(list(inst.items), rng.randint(0, len(inst.items))))
            policy = MonotoneStoppingPolicy.from_assortment(inst.items, S)
            assert policy_revenue(inst, policy) == assortment_revenue(inst, S)

    def test_zero_policy(self):
        inst = four_item_clash()
        policy = MonotoneStoppingPolicy.from_assortment(inst.items, set())
        assert policy_revenue(inst, policy) == 0

    def test_non_monotone_table_rejected(self):
        with pytest.raises(MonotonicityViolationError):
            MonotoneStoppingPolicy.from_table(
                "AB",
                {"A": {frozenset(): True, frozenset("B"): False}},
            )

    def test_minimal_generators_deduplicate(self):
        policy = MonotoneStoppingPolicy(
            {"A": [frozenset("B"), frozenset("BC")], "B": [], "C": []}
        )
        assert policy.generators["A"] == (frozenset("B"),)

    def test_hand_rule_on_mixture_instance(self):
        inst = singleton_mixture()
        rule = lambda j, H: (j == "B" and not H) or j == "C"
        assert stopping_rule_revenue(inst, rule) == Fraction(3, 2)


class TestBruteForce:
    def test_mixture_instance_monotone_optimum_is_one(self):
        policy, value = optimal_policy_bruteforce(singleton_mixture())
        assert value == 1

    def test_single_item(self):
        inst = Instance(
            ["1"],
            {"1": Fraction(2)},
            ListDistribution({("1",): Fraction(1, 3), (): Fraction(2, 3)}),
        )
        _, value = optimal_policy_bruteforce(inst)
        assert value == Fraction(2, 3)

    def test_cap_mentions_growth(self):
        rng = random.Random(6)
        inst = random_instance(rng, n_min=5, n_max=5, max_lists=4)
        with pytest.raises(CapExceededError, match="Dedekind"):
            optimal_policy_bruteforce(inst)

    def test_chain_instances_have_assortment_optima(self):
        rng = random.Random(10)
        for _ in range(8):
            inst, _ = random_sparse_chain(rng, rng.randint(2, 4))
            _, value = optimal_policy_bruteforce(inst)
            _, best = optimal_assortment(inst)
            assert value == best

    def test_chain_dominates_relaxations(self):
        inst = four_item_clash()
        _, value = optimal_policy_bruteforce(inst)
        opt_f, _ = solve_set_function_lp(inst)
        opt_x, _ = solve_mechanism_lp(inst)
        assert value >= opt_f >= opt_x >= Fraction(5, 4)

    def test_reported_value_matches_exact_reevaluation(self):
        rng = random.Random(15)
        for _ in range(10):
            inst = random_instance(rng, n_max=4)
            policy, value = optimal_policy_bruteforce(inst)
            assert policy_revenue(inst, policy) == value

    def test_huge_denominators_use_exact_fallback(self):
        # revenue numerators too large for the vectorized path; the pure
        # fraction search must agree with evaluating every policy directly
        eps = Fraction(1, 10**40)
        inst = Instance(
            "AB",
            {"A": 2 + eps, "B": 1 + eps},
            ListDistribution({("B", "A"): Fraction(1, 2), ("A",): Fraction(1, 2)}),
        )
        policy, value = optimal_policy_bruteforce(inst)
        assert policy_revenue(inst, policy) == value
        best = max(
            policy_revenue(inst, MonotoneStoppingPolicy({"A": ga, "B": gb}))
            for ga in ([], [frozenset()], [frozenset("B")])
            for gb in ([], [frozenset()], [frozenset("A")])
        )
        assert value == best == 2 + eps


class TestMarkovStopping:
    def test_no_transitions_keeps_priced_items(self):
        params = MarkovChainParams(
            {"1": Fraction(1, 2), "2": Fraction(1, 2)}, {"1": {}, "2": {}}
        )
        S, V = markov_stopping_assortment(params, {"1": 1, "2": 0})
        assert S == {"1"}
        assert V == {"1": 1, "2": 0}

    def test_single_state(self):
        params = MarkovChainParams({"1": Fraction(1)}, {"1": {}})
        S, V = markov_stopping_assortment(params, {"1": 1})
        assert S == {"1"} and V["1"] == 1

    def test_uniform_chain_stop_set_matches_enumeration(self):
        params = equal_weight_chain_params()
        prices = {"A": 2, "B": 1, "C": 1}
        S, _ = markov_stopping_assortment(params, prices)
        inst = Instance("ABC", prices, gen_markov_chain("ABC", params))
        _, best = optimal_assortment(inst)
        assert assortment_revenue(inst, S) == best

    def test_stop_set_revenue_is_optimal_on_random_chains(self):
        rng = random.Random(44)
        for _ in range(15):
            inst, params = random_sparse_chain(rng, rng.randint(2, 5))
            S, _ = markov_stopping_assortment(params, inst.prices)
            _, best = optimal_assortment(inst)
            assert assortment_revenue(inst, S) == best


class TestAdjustedPrices:
    def test_empty_assortment_returns_endpoint_price(self):
        inst = four_item_clash()
        assert s_adjusted_price(inst, set(), ("B",)) == 1
        assert s_adjusted_price(inst, set(), ("C", "A")) == 2

    def test_tree_instance_values(self):
        inst = history_monotone_tree()
        assert s_adjusted_price(inst, {"A"}, ("C", "D", "B")) == Fraction(-1, 2)
        assert s_adjusted_price(inst, {"A"}, ("D", "C", "B")) == -1

    def test_prefix_checks(self):
        inst = four_item_clash()
        with pytest.raises(UnrealizablePrefixError):
            s_adjusted_price(inst, set(), ("A", "B"))
        with pytest.raises(PrefixOverlapError):
            s_adjusted_price(inst, {"B"}, ("B",))


class TestRevenueIdentity:
    def test_assortment_policy_gives_zero_difference(self):
        inst = four_item_clash()
        policy = MonotoneStoppingPolicy.from_assortment(inst.items, {"A", "B"})
        assert adjusted_revenue_identity(inst, {"A", "B"}, policy) == (0, 0)

    def test_extra_stop_rule_example(self):
        inst = four_item_clash()
        policy = MonotoneStoppingPolicy(
            {"A": [frozenset()], "B": [frozenset()], "C": [frozenset("D")], "D": []}
        )
        lhs, rhs = adjusted_revenue_identity(inst, {"A", "B"}, policy)
        assert lhs == rhs == Fraction(1, 6)

    def test_fuzz_exact_equality(self):
        rng = random.Random(50)
        for _ in range(50):
            inst = random_instance(rng, n_max=4)
            items = list(inst.items)
            S = frozenset(rng.sample(items, rng.randint(0, len(items))))
            gens = random_monotone_generators(rng, items, always_stop=S)
            policy = MonotoneStoppingPolicy(gens)
            lhs, rhs = adjusted_revenue_identity(inst, S, policy)
            assert lhs == rhs

    def test_policy_must_cover_assortment(self):
        inst = four_item_clash()
        policy = MonotoneStoppingPolicy.from_assortment(inst.items, set())
        with pytest.raises(InvalidInstanceError):
            adjusted_revenue_identity(inst, {"A"}, policy)


class TestDomination:
    def _futures_pair(self):
        return ListDistribution(
            {
                ("X1", "A"): Fraction(1, 4), ("X1",): Fraction(1, 4),
                ("X2", "A"): Fraction(1, 4), ("X2", "B"): Fraction(1, 4),
            }
        )

    def test_branching_future_dominates_thin_one(self):
        assert check_domination(self._futures_pair(), ("X2",), ("X1",)).holds

    def test_serial_future_fails_against_thin_one(self):
        dist = ListDistribution(
            {
                ("X1", "A"): Fraction(1, 4), ("X1",): Fraction(1, 4),
                ("X3", "B", "A"): Fraction(1, 4), ("X3",): Fraction(1, 4),
            }
        )
        result = check_domination(dist, ("X3",), ("X1",))
        assert not result.holds
        assert result.witness == (frozenset({"A", "B"}), "A")

    def test_reflexive(self):
        dist = self._futures_pair()
        assert check_domination(dist, ("X1",), ("X1",)).holds

    def test_unrealizable_prefix_rejected(self):
        with pytest.raises(UnrealizablePrefixError):
            check_domination(self._futures_pair(), ("A",), ("X1",))


class TestConditionChecker:
    def test_minimal_violation_witness(self):
        report = check_history_monotone(condition_violation_minimal().dist)
        assert not report.holds
        w = report.witness
        assert (w.prefix, w.other, w.assortment, w.item) == (
            ("C", "B"), ("B",), frozenset({"A"}), "A"
        )

    def test_clash_instance_fails(self):
        assert not check_history_monotone(four_item_clash().dist).holds

    def test_tree_instance_passes(self):
        assert check_history_monotone(history_monotone_tree().dist).holds

    def test_chain_and_mixture_families_pass(self):
        rng = random.Random(60)
        for _ in range(25):
            from .helpers import random_history_monotone_instance

            inst = random_history_monotone_instance(rng, n_max=5)
            assert check_history_monotone(inst.dist).holds


class TestTiers:
    def test_tree_instance_decomposition(self):
        td = tier_decomposition(history_monotone_tree().dist, {"A"}, "B")
        assert td.to_json() == [
            [["B"]],
            [["C", "B"], ["D", "B"]],
            [["C", "D", "B"], ["D", "C", "B"]],
        ]
        assert [t.kind for t in td.tiers] == [
            "setwise-identical", "incomparable-equal", "setwise-identical"
        ]

    def test_single_prefix_single_tier(self):
        dist = ListDistribution({("C", "B"): Fraction(1, 2), ("A",): Fraction(1, 2)})
        td = tier_decomposition(dist, set(), "B")
        assert td.to_json() == [[["C", "B"]]]

    def test_requires_condition(self):
        with pytest.raises(InvalidInstanceError):
            tier_decomposition(condition_violation_minimal().dist, {"A"}, "B")

    def test_adjusted_prices_monotone_along_tiers(self):
        inst = history_monotone_tree()
        rows = tier_adjusted_prices(inst, {"A"}, "B")
        assert rows == [[1], [0, 0], [Fraction(-1, 2), -1]]

    def test_chain_instances_have_equal_probabilities_within_tiers(self):
        rng = random.Random(71)
        checked = 0
        for _ in range(10):
            inst, _ = random_sparse_chain(rng, rng.randint(3, 5))
            items = list(inst.items)
            j = rng.choice(items)
            S = frozenset(rng.sample([k for k in items if k != j], 1))
            try:
                td = tier_decomposition(inst.dist, S, j)
            except InvalidInstanceError:
                continue  # no realizable prefixes for this (S, j)
            checked += 1
        assert checked >= 5
