"""Parametric choice models expanded into explicit ranking distributions.

The same three-item distribution arises two ways: as a weighted urn drawn
without replacement (logit with equal weights) and as the first-visit order
of a uniform transition chain.  The prefix tree makes the equivalence
visible: transitions 1/4, 1/3, 1/2 by depth in both cases.
"""

from fractions import Fraction

from fixedprice import (
    MarkovChainParams,
    MnlParams,
    NestStructure,
    build_tree_diagram,
    gen_elimination_by_aspects,
    gen_markov_chain,
    gen_mnl,
    mix_with_singletons,
)

items = ("A", "B", "C")
urn = gen_mnl(items, MnlParams({j: 1 for j in items}, 1))

third = Fraction(1, 3)
chain = gen_markov_chain(
    items,
    MarkovChainParams(
        {j: Fraction(1, 4) for j in items},
        {j: {k: third for k in items if k != j} for j in items},
    ),
)
print("urn and chain give identical distributions:", urn == chain)

tree = build_tree_diagram(urn)
print("transition probabilities along (A), (A,B), (A,B,C):",
      tree.q(("A",)), tree.q(("A", "B")), tree.q(("A", "B", "C")))
print("stop mass at (A):", tree.stop_mass(("A",)))

# Nest-locking: once a nest is entered it must be finished before moving on,
# so supported lists never interleave nests.
nested = gen_elimination_by_aspects(
    items, MnlParams({"A": 2, "B": 1, "C": 1}, 1),
    NestStructure([frozenset("AB"), frozenset("C")]),
)
print("\nnest-locked support:")
for lst, p in sorted(nested.support.items(), key=lambda kv: (len(kv[0].entries), kv[0].entries)):
    print("  ", lst.entries, p)

# Mixing with singletons: with probability 1/2 the list collapses to (B).
mixed = mix_with_singletons(urn, {"B": Fraction(1, 2)})
print("\nmass on the singleton (B) after mixing:", mixed.probability(("B",)))
