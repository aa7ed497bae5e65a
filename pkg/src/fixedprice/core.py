"""Items, prices, ranked lists, distributions, prefix trees, and assortments.

The buyer's type is a strictly ordered list of the items they would purchase,
best first; everything below the no-purchase option is omitted.  A finite
distribution over such lists, together with fixed item prices, is the whole
input to every solver in this package.  All probabilities and prices are
exact rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import (
    CapExceededError,
    InvalidDistributionError,
    InvalidInstanceError,
    PrefixOverlapError,
    UnrealizablePrefixError,
)
from .rational import format_rational, parse_rational

Item = Union[str, int]
Assortment = frozenset


@dataclass(frozen=True)
class RankedList:
    """A strictly ordered subset of items, most-preferred first.  May be empty."""

    entries: Tuple[Item, ...]

    def __init__(self, entries: Iterable[Item] = ()):
        entries = tuple(entries)
        if len(set(entries)) != len(entries):
            raise InvalidDistributionError(f"repeated item in list {entries}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def as_set(self) -> frozenset:
        return frozenset(self.entries)

    def prefix(self, k: int) -> "Prefix":
        """The first ``k`` entries as a prefix (k >= 1)."""
        return Prefix(self.entries[:k])

    def prefixes(self) -> Iterable["Prefix"]:
        """All nonempty prefixes, shortest first."""
        for k in range(1, len(self.entries) + 1):
            yield Prefix(self.entries[:k])


@dataclass(frozen=True)
class Prefix:
    """An ordered initial segment of a list.

    ``endpoint`` is the last item; ``body`` is everything before it.
    """

    entries: Tuple[Item, ...]

    def __init__(self, entries: Iterable[Item] = ()):
        entries = tuple(
            entries.entries if isinstance(entries, (RankedList, Prefix)) else entries
        )
        if len(set(entries)) != len(entries):
            raise InvalidDistributionError(f"repeated item in prefix {entries}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def endpoint(self) -> Item:
        if not self.entries:
            raise ValueError("empty prefix has no endpoint")
        return self.entries[-1]

    @property
    def body(self) -> "Prefix":
        if not self.entries:
            raise ValueError("empty prefix has no body")
        return Prefix(self.entries[:-1])

    def as_set(self) -> frozenset:
        return frozenset(self.entries)

    def extend(self, item: Item) -> "Prefix":
        return Prefix(self.entries + (item,))


def _as_ranked_list(value) -> RankedList:
    if isinstance(value, RankedList):
        return value
    return RankedList(tuple(value))


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: Tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def messages(self) -> List[str]:
        return [issue.message for issue in self.issues]


def validate_distribution(
    pairs, items: Optional[Sequence[Item]] = None
) -> ValidationReport:
    """Validate raw (list, probability) data without raising.

    Checks: probabilities positive and summing to exactly 1, no duplicate
    lists, no repeated item within a list, and (when ``items`` is given)
    membership of every listed item in the universe.  Returns every
    violation found.
    """
    issues: List[ValidationIssue] = []
    if isinstance(pairs, ListDistribution):
        pairs = list(pairs.support.items())
    elif isinstance(pairs, Mapping):
        pairs = list(pairs.items())
    else:
        pairs = list(pairs)

    seen = {}
    total = Fraction(0)
    universe = set(items) if items is not None else None
    for raw_list, raw_prob in pairs:
        try:
            lst = _as_ranked_list(raw_list)
        except InvalidDistributionError as exc:
            issues.append(ValidationIssue("repeated-item", str(exc)))
            continue
        try:
            prob = parse_rational(raw_prob)
        except ValueError as exc:
            issues.append(ValidationIssue("bad-probability", str(exc)))
            continue
        if prob <= 0:
            issues.append(
                ValidationIssue(
                    "nonpositive-probability",
                    f"list {lst.entries} has probability {prob} <= 0",
                )
            )
        if lst.entries in seen:
            issues.append(
                ValidationIssue("duplicate-list", f"duplicate list {lst.entries}")
            )
        seen[lst.entries] = prob
        total += prob
        if universe is not None:
            for j in lst.entries:
                if j not in universe:
                    issues.append(
                        ValidationIssue(
                            "unknown-item", f"item {j!r} not in the item universe"
                        )
                    )
    if total != 1:
        issues.append(
            ValidationIssue(
                "bad-sum", f"probabilities sum to {format_rational(total)}, not 1"
            )
        )
    return ValidationReport(tuple(issues))


class ListDistribution:
    """A finite-support distribution over ranked lists with exact probabilities.

    Construction validates the data and raises ``InvalidDistributionError``
    on any violation; use :func:`validate_distribution` for a non-raising
    report.  Instances are immutable; treat ``support`` as read-only.
    """

    __slots__ = ("_support", "_prefix_probs", "_items")

    def __init__(self, pairs):
        if isinstance(pairs, ListDistribution):
            pairs = list(pairs.support.items())
        elif isinstance(pairs, Mapping):
            pairs = list(pairs.items())
        else:
            pairs = list(pairs)
        report = validate_distribution(pairs)
        if not report.ok:
            raise InvalidDistributionError("; ".join(report.messages()))
        support: Dict[RankedList, Fraction] = {}
        for raw_list, raw_prob in pairs:
            support[_as_ranked_list(raw_list)] = parse_rational(raw_prob)
        self._support = support
        items = sorted({j for lst in support for j in lst.entries}, key=str)
        self._items = tuple(items)
        prefix_probs: Dict[Tuple[Item, ...], Fraction] = {}
        for lst, prob in support.items():
            for k in range(1, len(lst) + 1):
                key = lst.entries[:k]
                prefix_probs[key] = prefix_probs.get(key, Fraction(0)) + prob
        self._prefix_probs = prefix_probs

    @property
    def support(self) -> Dict[RankedList, Fraction]:
        return self._support

    @property
    def items(self) -> Tuple[Item, ...]:
        """Sorted universe of items appearing on some supported list."""
        return self._items

    def probability(self, lst) -> Fraction:
        return self._support.get(_as_ranked_list(lst), Fraction(0))

    def prefix_probability(self, prefix) -> Fraction:
        """Probability that the random list begins with ``prefix``."""
        prefix = Prefix(prefix)
        if not prefix.entries:
            return Fraction(1)
        return self._prefix_probs.get(prefix.entries, Fraction(0))

    def realizable_prefixes(self) -> Dict[Prefix, Fraction]:
        """All nonempty prefixes with positive probability."""
        return {Prefix(key): p for key, p in self._prefix_probs.items()}

    def suffixes(self, prefix) -> Dict[Tuple[Item, ...], Fraction]:
        """Conditional distribution of list suffixes given a realizable prefix."""
        prefix = Prefix(prefix)
        total = self.prefix_probability(prefix)
        if total == 0:
            raise UnrealizablePrefixError(f"prefix {prefix.entries} has probability 0")
        k = len(prefix)
        out: Dict[Tuple[Item, ...], Fraction] = {}
        for lst, prob in self._support.items():
            if lst.entries[:k] == prefix.entries:
                suffix = lst.entries[k:]
                out[suffix] = out.get(suffix, Fraction(0)) + prob / total
        return out

    def __eq__(self, other):
        if not isinstance(other, ListDistribution):
            return NotImplemented
        return self._support == other._support

    def __hash__(self):
        return hash(frozenset(self._support.items()))

    def __repr__(self):
        inner = ", ".join(
            f"{lst.entries}: {format_rational(p)}" for lst, p in self._support.items()
        )
        return f"ListDistribution({{{inner}}})"


@dataclass(frozen=True)
class Instance:
    """An item universe with fixed prices plus a distribution over rankings."""

    items: Tuple[Item, ...]
    prices: Mapping[Item, Fraction]
    dist: ListDistribution

    def __init__(self, items, prices, dist):
        items = tuple(items)
        if len(set(items)) != len(items):
            raise InvalidInstanceError("duplicate item ids")
        prices = {j: parse_rational(p) for j, p in dict(prices).items()}
        for j in items:
            if j not in prices:
                raise InvalidInstanceError(f"missing price for item {j!r}")
            if prices[j] < 0:
                raise InvalidInstanceError(f"negative price for item {j!r}")
        if not isinstance(dist, ListDistribution):
            dist = ListDistribution(dist)
        unknown = set(dist.items) - set(items)
        if unknown:
            raise InvalidInstanceError(f"listed items missing from universe: {unknown}")
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "dist", dist)

    def price(self, j: Item) -> Fraction:
        return self.prices[j]

    def assortment(self, items: Iterable[Item]) -> Assortment:
        S = frozenset(items)
        unknown = S - set(self.items)
        if unknown:
            raise InvalidInstanceError(f"assortment contains unknown items {unknown}")
        return S

    def item_index(self) -> Dict[Item, int]:
        return {j: k for k, j in enumerate(self.items)}


def choice_probability(
    inst_or_dist,
    S: Iterable[Item],
    j: Item,
    given=None,
) -> Fraction:
    """Probability that ``j`` is the buyer's pick when assortment ``S`` is offered.

    This is the chance that ``j`` appears on the random list before any other
    member of ``S``.  With ``given`` set, the list is conditioned to start
    with that (realizable) prefix and the event is evaluated over the suffix
    only; ``S`` must then be disjoint from the prefix.
    """
    dist = inst_or_dist.dist if isinstance(inst_or_dist, Instance) else inst_or_dist
    S = frozenset(S)
    if j not in S:
        raise InvalidInstanceError(f"item {j!r} is not in the assortment")
    if given is None:
        total = Fraction(0)
        for lst, prob in dist.support.items():
            for entry in lst.entries:
                if entry in S:
                    if entry == j:
                        total += prob
                    break
        return total
    prefix = Prefix(given)
    overlap = S & prefix.as_set()
    if overlap:
        raise PrefixOverlapError(
            f"assortment intersects the conditioning prefix on {sorted(overlap, key=str)}"
        )
    total = Fraction(0)
    for suffix, prob in dist.suffixes(prefix).items():
        for entry in suffix:
            if entry in S:
                if entry == j:
                    total += prob
                break
    return total


def assortment_revenue(inst: Instance, S: Iterable[Item]) -> Fraction:
    """Expected revenue of offering ``S``: each buyer purchases their
    most-preferred member of ``S`` on their list, if any."""
    S = inst.assortment(S)
    total = Fraction(0)
    for lst, prob in inst.dist.support.items():
        for entry in lst.entries:
            if entry in S:
                total += prob * inst.prices[entry]
                break
    return total


def optimal_assortment(
    inst: Instance, cap: int = 20
) -> Tuple[Assortment, Fraction]:
    """Exhaustive maximum of assortment revenue over all subsets.

    Ties are broken toward the lexicographically smallest sorted item tuple.
    """
    n = len(inst.items)
    if n > cap:
        raise CapExceededError("optimal_assortment", n, cap, "2^n enumeration")
    best_value = Fraction(0)
    best_set: Tuple[Item, ...] = ()
    ordered = sorted(inst.items, key=str)
    for size in range(0, n + 1):
        for combo in combinations(ordered, size):
            value = assortment_revenue(inst, combo)
            if value > best_value or (
                value == best_value and tuple(map(str, combo)) < tuple(map(str, best_set))
            ):
                best_value = value
                best_set = combo
    return frozenset(best_set), best_value


@dataclass(frozen=True)
class TreeNode:
    probability: Fraction  # chance the random list begins with this prefix
    transition: Fraction  # chance of this step given the parent prefix


@dataclass(frozen=True)
class TreeDiagram:
    """The realizable-prefix tree of a distribution with transition probabilities.

    Each node is a realizable prefix; its transition probability is the
    conditional chance of its endpoint being the next item given its body.
    Outgoing transitions from a node sum to at most 1, with the slack being
    the chance the list stops there.
    """

    nodes: Mapping[Prefix, TreeNode]

    def q(self, prefix) -> Fraction:
        return self.nodes[Prefix(prefix)].transition

    def probability(self, prefix) -> Fraction:
        prefix = Prefix(prefix)
        if not prefix.entries:
            return Fraction(1)
        return self.nodes[prefix].probability

    def children(self, prefix) -> List[Prefix]:
        prefix = Prefix(prefix)
        k = len(prefix)
        return sorted(
            (
                node
                for node in self.nodes
                if len(node) == k + 1 and node.entries[:k] == prefix.entries
            ),
            key=lambda node: tuple(map(str, node.entries)),
        )

    def stop_mass(self, prefix) -> Fraction:
        """Conditional probability that the list terminates at this node."""
        prefix = Prefix(prefix)
        total = sum(
            (self.nodes[c].transition for c in self.children(prefix)), Fraction(0)
        )
        return 1 - total


def build_tree_diagram(dist: ListDistribution) -> TreeDiagram:
    """Build the prefix tree with exact node and transition probabilities."""
    nodes: Dict[Prefix, TreeNode] = {}
    for prefix, prob in dist.realizable_prefixes().items():
        parent = dist.prefix_probability(prefix.body)
        nodes[prefix] = TreeNode(probability=prob, transition=prob / parent)
    return TreeDiagram(nodes)


# ---------------------------------------------------------------------------
# Instance JSON interchange
# ---------------------------------------------------------------------------
#
# {"items": [{"id": "A", "price": "2"}, ...],
#  "lists": [{"items": ["B", "A"], "prob": "1/6"}, ...]}
#
# Rationals may be integers, decimal strings (parsed exactly), or "a/b".


def instance_to_json(inst: Instance) -> dict:
    """Canonical JSON object for an instance (sorted items and lists)."""
    items = [
        {"id": j, "price": format_rational(inst.prices[j])}
        for j in sorted(inst.items, key=str)
    ]
    lists = [
        {"items": list(lst.entries), "prob": format_rational(p)}
        for lst, p in sorted(
            inst.dist.support.items(),
            key=lambda kv: (len(kv[0].entries), tuple(map(str, kv[0].entries))),
        )
    ]
    return {"items": items, "lists": lists}


def instance_from_json(obj: dict) -> Instance:
    """Parse the instance interchange format, validating as it goes."""
    if not isinstance(obj, dict) or "items" not in obj or "lists" not in obj:
        raise InvalidInstanceError('instance JSON needs "items" and "lists" keys')
    items = []
    prices = {}
    for entry in obj["items"]:
        items.append(entry["id"])
        try:
            prices[entry["id"]] = parse_rational(entry["price"])
        except ValueError as exc:
            raise InvalidInstanceError(
                f"bad price for item {entry['id']!r}: {exc}"
            ) from exc
    pairs = []
    for entry in obj["lists"]:
        pairs.append((tuple(entry["items"]), entry["prob"]))
    report = validate_distribution(pairs, items=items)
    if not report.ok:
        raise InvalidInstanceError("; ".join(report.messages()))
    return Instance(items, prices, ListDistribution(pairs))


def dump_instance(inst: Instance) -> str:
    return json.dumps(instance_to_json(inst), indent=2, sort_keys=False) + "\n"


def load_instance(text: str) -> Instance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"malformed JSON: {exc}") from exc
    return instance_from_json(obj)
