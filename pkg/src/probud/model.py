"""Core data model: instances, approval profiles, budgets, and axiom ids.

Costs are normalized so the cheapest item costs exactly one unit; every
proportionality threshold in this package is stated in those units, which
keeps verdicts invariant under rescaling of the currency.  All numeric
comparisons use the single absolute tolerance ``TOL``.

Every type here is immutable after construction and safe to share across
threads; the module-level operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidBudget, InvalidCost, InvalidLimit, InvalidProfile

#: Absolute tolerance for every cost/limit comparison in the package.
TOL = 1e-9

AXIOM_FAMILIES = ("strong-bjr", "bjr", "strong-bpjr", "bpjr", "local-bpjr")
AXIOM_VARIANTS = ("l", "w")


@dataclass(frozen=True)
class Instance:
    """A set of items with normalized costs plus a spending limit.

    Items are addressed by dense indices ``0..m-1``; ``names`` holds the
    display names in the same order.  ``cost[i]`` is the normalized cost
    of item ``i`` (the minimum over all items is 1) and ``limit`` is the
    normalized spending limit.  Use :func:`normalize` to build an
    instance from raw, un-normalized costs.
    """

    names: tuple[str, ...]
    cost: tuple[float, ...]
    limit: float

    def __post_init__(self) -> None:
        if not self.names:
            raise InvalidCost("an instance needs at least one item")
        if len(self.names) != len(self.cost):
            raise InvalidCost("names and costs differ in length")
        for name, c in zip(self.names, self.cost):
            if not c > 0:
                raise InvalidCost(f"item {name!r} has non-positive cost {c}")
        if abs(min(self.cost) - 1.0) > TOL:
            raise InvalidCost("costs are not normalized: the cheapest item must cost 1")
        if self.limit < 0:
            raise InvalidLimit(f"limit must be non-negative, got {self.limit}")

    @property
    def num_items(self) -> int:
        return len(self.names)

    def weight(self, items: Iterable[int]) -> float:
        """Total cost of the given item indices."""
        return sum(self.cost[i] for i in items)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InvalidBudget(f"unknown item name {name!r}") from None


@dataclass(frozen=True)
class Profile:
    """One approval ballot (a set of item indices) per voter.

    Voters are addressed by dense indices ``0..n-1``.  Empty ballots are
    allowed and the voters still count toward group-size thresholds.
    """

    ballots: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, ballots: Iterable[Iterable[int]]) -> "Profile":
        return cls(tuple(frozenset(b) for b in ballots))

    @property
    def num_voters(self) -> int:
        return len(self.ballots)


@dataclass(frozen=True)
class Budget:
    """A selected set of item indices together with its total cost."""

    selected: frozenset[int]
    total_cost: float

    @classmethod
    def of(cls, inst: Instance, items: Iterable[int]) -> "Budget":
        """Build a budget over ``inst``, validating the item indices."""
        selected = frozenset(items)
        for i in selected:
            if not 0 <= i < inst.num_items:
                raise InvalidBudget(f"item index {i} out of range")
        return cls(selected, inst.weight(selected))


@dataclass(frozen=True, order=True)
class AxiomId:
    """One of the ten proportionality axioms: a family plus a variant.

    The variant selects the entitlement denominator: ``"l"`` measures
    group entitlements against the spending limit, ``"w"`` against the
    realized total cost of the budget under test.
    """

    family: str
    variant: str

    def __post_init__(self) -> None:
        if self.family not in AXIOM_FAMILIES:
            raise ValueError(f"unknown axiom family {self.family!r}")
        if self.variant not in AXIOM_VARIANTS:
            raise ValueError(f"unknown axiom variant {self.variant!r}")

    def __str__(self) -> str:
        return f"{self.family}-{self.variant}"

    @classmethod
    def parse(cls, text: str) -> "AxiomId":
        family, sep, variant = text.strip().lower().rpartition("-")
        if not sep:
            raise ValueError(f"cannot parse axiom id {text!r}")
        return cls(family, variant)


#: The ten axioms, in a fixed deterministic order.
ALL_AXIOMS: tuple[AxiomId, ...] = tuple(
    AxiomId(f, v) for f in AXIOM_FAMILIES for v in AXIOM_VARIANTS
)


def normalize(raw_costs, raw_limit: float) -> Instance:
    """Build an instance by dividing all costs and the limit by the
    cheapest raw cost.

    ``raw_costs`` is a mapping from item name to positive raw cost, or an
    iterable of ``(name, cost)`` pairs; item order is preserved.
    """
    if isinstance(raw_costs, Mapping):
        pairs = list(raw_costs.items())
    else:
        pairs = list(raw_costs)
    if not pairs:
        raise InvalidCost("an instance needs at least one item")
    for name, c in pairs:
        if not c > 0:
            raise InvalidCost(f"item {name!r} has non-positive cost {c}")
    if raw_limit < 0:
        raise InvalidLimit(f"limit must be non-negative, got {raw_limit}")
    scale = min(c for _, c in pairs)
    names = tuple(name for name, _ in pairs)
    cost = tuple(c / scale for _, c in pairs)
    return Instance(names, cost, raw_limit / scale)


def is_feasible(inst: Instance, budget: Budget) -> bool:
    """True iff the budget's total cost stays within the limit."""
    _require_budget(inst, budget)
    return budget.total_cost <= inst.limit + TOL


def is_exhaustive(inst: Instance, budget: Budget) -> bool:
    """True iff no further item can be added without exceeding the limit.

    The budget must be feasible.
    """
    if not is_feasible(inst, budget):
        raise InvalidBudget("exhaustiveness is only defined for feasible budgets")
    total = budget.total_cost
    for c in range(inst.num_items):
        if c not in budget.selected and total + inst.cost[c] <= inst.limit + TOL:
            return False
    return True


def _require_budget(inst: Instance, budget: Budget) -> None:
    for i in budget.selected:
        if not 0 <= i < inst.num_items:
            raise InvalidBudget(f"item index {i} out of range")


def _require_profile(inst: Instance, profile: Profile) -> None:
    for voter, ballot in enumerate(profile.ballots):
        for i in ballot:
            if not 0 <= i < inst.num_items:
                raise InvalidProfile(f"voter {voter} approves unknown item index {i}")
