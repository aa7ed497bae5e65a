"""Revenue maximization over fixed-price randomized selling mechanisms.

A buyer's private type is a ranked list of the items they would purchase.
Given fixed prices and a finite distribution over such lists, this package
builds and solves (exactly, over rationals) the incentive-compatible
mechanism LP and its relaxations, enumerates optimal assortments and
lotteries, checks the history-monotone-futures condition under which plain
assortments are optimal, and evaluates the multi-buyer and robust-menu
extensions.

All public types are immutable values and all operations are pure functions
(any internal caches are confined to a single invocation), so shared inputs
may be used from multiple threads freely.
"""

from .core import (
    Assortment,
    Instance,
    ListDistribution,
    Prefix,
    RankedList,
    TreeDiagram,
    assortment_revenue,
    build_tree_diagram,
    choice_probability,
    dump_instance,
    instance_from_json,
    instance_to_json,
    load_instance,
    optimal_assortment,
    validate_distribution,
)
from .choice_models import (
    MarkovChainParams,
    MnlParams,
    NestStructure,
    SymmetricNlParams,
    gen_elimination_by_aspects,
    gen_markov_chain,
    gen_mnl,
    gen_nested_logit_3item,
    gen_nested_logit_4item_symmetric,
    mix_with_singletons,
    nested_logit_choice_prob,
    nl_markov_fit_gap,
)
from .lp import LPSolution, RationalLP, solve_lp
from .mechanism_lp import (
    Mechanism,
    SetFunction,
    assortment_to_mechanism,
    build_bm_lp,
    build_mechanism_lp,
    build_set_function_lp,
    containment_witness,
    mechanism_revenue,
    mechanism_to_set_function,
    solve_bm_lp,
    solve_mechanism_lp,
    solve_set_function_lp,
    submodular_to_mechanism,
    verify_ic,
)
from .lotteries import (
    BudgetAdditiveParams,
    InclusionProbabilities,
    best_topk_lottery,
    budget_additive_mechanism,
    gen_topk_gap_instance,
    independent_assortment_revenue,
    round_bounded_length,
    round_budget_additive,
    topk_lottery_value,
)
from .stopping import (
    MonotoneStoppingPolicy,
    adjusted_revenue_identity,
    check_domination,
    check_history_monotone,
    markov_stopping_assortment,
    optimal_policy_bruteforce,
    policy_revenue,
    s_adjusted_price,
    stopping_rule_revenue,
    tier_adjusted_prices,
    tier_decomposition,
)
from .extensions import (
    Menu,
    MenuEntry,
    MultiBuyerInstance,
    eval_endowment_ttc,
    eval_fixed_multibuyer_mechanism,
    eval_serial_dictatorship,
    exposable_entries,
    mechanism_to_menu,
    robust_revenue,
    solve_multibuyer_lp,
)

__version__ = "0.1.0"
