"""Checkers for the ten proportionality axioms.

Each checker returns an :class:`AxiomReport`: a verdict plus, on
violation, an :class:`AxiomWitness` naming the under-represented voter
group, the entitlement level it reaches, and the bundle that proves the
deficit.  The BJR families admit a polynomial test; the BPJR families are
checked by an exact sweep over all cohesive voter groups, which is
exponential and therefore gated by hard size caps (``MAX_EXACT_VOTERS``
voters, ``MAX_EXACT_BUNDLE_ITEMS`` items per common-item set).

Entitlement conventions, shared by every checker:

* the level ``ell`` ranges over the real interval from 1 up to the
  variant's denominator (the limit for "l", the realized spend for "w");
* a group of ``k`` voters can claim levels up to ``k * denominator / n``;
* after cost normalization every item costs at least 1, so a nonempty
  common-item set always weighs at least 1.

Violation conditions are piecewise-constant in ``ell`` between achievable
bundle weights, so the sweeps evaluate only critical levels.  Checkers are
pure functions; verdicts are deterministic, and the reported witness is
the maximum-deficit violation with the lexicographically smallest voter
group.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from ._bits import MaskWeights, bits, mask_of
from .errors import InvalidBudget, TooLargeForExact
from .model import (
    ALL_AXIOMS,
    AXIOM_VARIANTS,
    TOL,
    AxiomId,
    Budget,
    Instance,
    Profile,
    _require_budget,
    _require_profile,
    is_feasible,
)

#: Hard cap on voters for the exponential (subset-sweep) checkers.
MAX_EXACT_VOTERS = 22
#: Hard cap on the number of items fed to the exact bundle maximizer.
MAX_EXACT_BUNDLE_ITEMS = 25

POLYNOMIAL = "polynomial"
BRUTE_FORCE = "bruteForce"

_BJR_FAMILIES = ("bjr", "strong-bjr")
_BRUTE_FAMILIES = ("strong-bpjr", "bpjr", "local-bpjr")


@dataclass(frozen=True)
class AxiomWitness:
    """Evidence that a voter group is under-represented.

    ``voters`` is the group, ``level`` the entitlement level it reaches,
    ``common_items`` the items every member approves, ``witness_bundle``
    the bundle proving the deficit, and the two weights are the sides of
    the violated inequality (represented strictly below required).
    """

    voters: frozenset[int]
    level: float
    common_items: frozenset[int]
    witness_bundle: frozenset[int]
    represented_weight: float
    required_weight: float


@dataclass(frozen=True)
class AxiomReport:
    """Verdict of one axiom check; carries a witness iff violated."""

    axiom: AxiomId
    satisfied: bool
    witness: AxiomWitness | None
    method: str


def max_bundle(costs: Mapping, cap: float) -> tuple[float, frozenset]:
    """Heaviest sub-bundle of ``costs`` that fits under ``cap``, plus one
    bundle achieving it.

    Exact via half-set enumeration, hence at most
    ``MAX_EXACT_BUNDLE_ITEMS`` items.  The empty bundle always fits, so
    the result is 0 when no single item does.
    """
    keys = list(costs)
    if len(keys) > MAX_EXACT_BUNDLE_ITEMS:
        raise TooLargeForExact(
            f"bundle maximizer supports at most {MAX_EXACT_BUNDLE_ITEMS} items, got {len(keys)}"
        )
    values = [costs[k] for k in keys]
    weight, mask = _max_bundle_over(values, range(len(keys)), cap)
    return weight, frozenset(keys[i] for i in bits(mask))


def max_bundle_weight(costs: Mapping, cap: float) -> float:
    """Weight of the heaviest sub-bundle of ``costs`` fitting under ``cap``."""
    return max_bundle(costs, cap)[0]


def _subset_pairs(values: Sequence[float], positions: Sequence[int]) -> list[tuple[float, int]]:
    # all (sum, bitmask-over-positions) pairs of one half
    out = [(0.0, 0)]
    for value, pos in zip(values, positions):
        bit = 1 << pos
        out.extend([(s + value, m | bit) for s, m in out])
    return out


def _max_bundle_over(values: Sequence[float], positions: Sequence[int], cap: float) -> tuple[float, int]:
    bound = cap + TOL
    if bound < 0 or not values:
        return 0.0, 0
    half = len(values) // 2
    left = _subset_pairs(values[:half], positions[:half])
    right = _subset_pairs(values[half:], positions[half:])
    right.sort()
    right_sums = [s for s, _ in right]
    best_weight, best_mask = 0.0, 0
    for s, m in left:
        if s > bound:
            continue
        i = bisect_right(right_sums, bound - s) - 1
        if i < 0:
            continue
        total = s + right_sums[i]
        if total > best_weight + 1e-12:
            best_weight, best_mask = total, m | right[i][1]
    return best_weight, best_mask


def _cohesive_groups(masks: Sequence[int]) -> Iterator[tuple[list[int], int, int]]:
    """All voter subsets whose ballots share at least one item.

    Yields ``(voters, intersection_mask, union_mask)``.  The ``voters``
    list is reused between yields; copy it before storing.  Subtrees
    rooted at an empty intersection are pruned, which is exact because
    adding voters only shrinks the intersection.
    """
    n = len(masks)
    chosen: list[int] = []

    def extend(start: int, inter: int, union: int):
        for j in range(start, n):
            inter2 = inter & masks[j]
            if not inter2:
                continue
            chosen.append(j)
            union2 = union | masks[j]
            yield chosen, inter2, union2
            yield from extend(j + 1, inter2, union2)
            chosen.pop()

    yield from extend(0, -1, 0)


class _BestWitness:
    """Accumulates violations, keeping the maximum-deficit one; ties go to
    the lexicographically smallest voter tuple, then the smallest bundle."""

    def __init__(self) -> None:
        self.deficit: float | None = None
        self.voters: tuple[int, ...] | None = None
        self.bundle: tuple[int, ...] | None = None
        self.payload = None

    def offer(self, deficit: float, voters: tuple[int, ...], bundle: tuple[int, ...], payload) -> None:
        if self.deficit is None or deficit > self.deficit + TOL:
            better = True
        elif deficit < self.deficit - TOL:
            better = False
        elif voters != self.voters:
            better = voters < self.voters
        else:
            better = bundle < self.bundle
        if better:
            self.deficit, self.voters, self.bundle, self.payload = deficit, voters, bundle, payload

    @property
    def found(self) -> bool:
        return self.deficit is not None


def _prepare(inst: Instance, profile: Profile, budget: Budget, *, brute: bool):
    _require_profile(inst, profile)
    _require_budget(inst, budget)
    if not is_feasible(inst, budget):
        raise InvalidBudget("axiom checks expect a feasible budget")
    if brute and profile.num_voters > MAX_EXACT_VOTERS:
        raise TooLargeForExact(
            f"exact subset sweep supports at most {MAX_EXACT_VOTERS} voters, got {profile.num_voters}"
        )


def _knapsack_cache(inst: Instance):
    cache: dict[tuple[int, float], tuple[float, int]] = {}

    def knap(inter_mask: int, cap: float) -> tuple[float, int]:
        key = (inter_mask, cap)
        hit = cache.get(key)
        if hit is not None:
            return hit
        if inter_mask.bit_count() > MAX_EXACT_BUNDLE_ITEMS:
            raise TooLargeForExact(
                f"common-item set exceeds {MAX_EXACT_BUNDLE_ITEMS} items"
            )
        positions = list(bits(inter_mask))
        values = [inst.cost[i] for i in positions]
        result = _max_bundle_over(values, positions, cap)
        cache[key] = result
        return result

    return knap


def check_bjr_poly(inst: Instance, profile: Profile, budget: Budget, axiom: AxiomId) -> AxiomReport:
    """Polynomial test of the BJR or Strong-BJR axiom (either variant).

    A violation is a group of wholly unrepresented voters, at least
    ``n / denominator`` strong, sharing a candidate item: any item for the
    strong family (normalization makes every shared item weigh at least
    one unit), an item of cost exactly 1 for plain BJR.
    """
    if axiom.family not in _BJR_FAMILIES:
        raise ValueError(f"check_bjr_poly handles {_BJR_FAMILIES}, got {axiom.family!r}")
    _prepare(inst, profile, budget, brute=False)
    n = profile.num_voters
    denom = inst.limit if axiom.variant == "l" else budget.total_cost
    if denom <= TOL or n == 0:
        return AxiomReport(axiom, True, None, POLYNOMIAL)

    selected = budget.selected
    unrepresented = [i for i, ballot in enumerate(profile.ballots) if not (ballot & selected)]
    if axiom.family == "bjr":
        candidates = [c for c in range(inst.num_items) if abs(inst.cost[c] - 1.0) <= TOL]
    else:
        candidates = list(range(inst.num_items))

    best = _BestWitness()
    need = n / denom
    for c in candidates:
        group = tuple(i for i in unrepresented if c in profile.ballots[i])
        if group and len(group) >= need - TOL:
            best.offer(1.0, group, (c,), c)
    if not best.found:
        return AxiomReport(axiom, True, None, POLYNOMIAL)

    voters = best.voters
    common = frozenset.intersection(*(profile.ballots[i] for i in voters))
    witness = AxiomWitness(
        voters=frozenset(voters),
        level=1.0,
        common_items=common,
        witness_bundle=frozenset((best.payload,)),
        represented_weight=0.0,
        required_weight=1.0,
    )
    return AxiomReport(axiom, False, witness, POLYNOMIAL)


def check_strong_bpjr(inst: Instance, profile: Profile, budget: Budget, variant: str = "l") -> AxiomReport:
    """Exact check of Strong-BPJR: every cohesive group whose size grants
    it level ``ell`` must see at least ``ell`` units of weight on items it
    collectively approves.

    For a fixed group the claimable levels form an interval, so it
    suffices to test the top one: ``min(size * denom / n, weight of the
    common items)``.
    """
    axiom = AxiomId("strong-bpjr", variant)
    _prepare(inst, profile, budget, brute=True)
    n = profile.num_voters
    denom = inst.limit if variant == "l" else budget.total_cost
    if denom <= TOL or n == 0:
        return AxiomReport(axiom, True, None, BRUTE_FORCE)

    ballot_masks = [mask_of(b) for b in profile.ballots]
    selected_mask = mask_of(budget.selected)
    weigh = MaskWeights(inst.cost)
    best = _BestWitness()
    for voters, inter, union in _cohesive_groups(ballot_masks):
        level = min(len(voters) * denom / n, weigh(inter))
        if level < 1.0 - TOL:
            continue
        represented = weigh(union & selected_mask)
        if represented < level - TOL:
            best.offer(level - represented, tuple(voters), tuple(bits(inter)),
                       (level, inter, represented))
    if not best.found:
        return AxiomReport(axiom, True, None, BRUTE_FORCE)

    level, inter, represented = best.payload
    common = frozenset(bits(inter))
    witness = AxiomWitness(
        voters=frozenset(best.voters),
        level=level,
        common_items=common,
        witness_bundle=common,
        represented_weight=represented,
        required_weight=level,
    )
    return AxiomReport(axiom, False, witness, BRUTE_FORCE)


def check_bpjr(inst: Instance, profile: Profile, budget: Budget, variant: str = "l") -> AxiomReport:
    """Exact check of BPJR: a cohesive group is owed the heaviest bundle
    of its common items that fits its entitlement cap.

    The cap is ``size * limit / n`` for the "l" variant and
    ``min(size * spend / n, spend)`` for the "w" variant, where bundles
    are capped by the level itself and the threshold is maximized over
    claimable levels; the bundle maximizer is monotone in the cap, so
    only the top level needs evaluating.
    """
    axiom = AxiomId("bpjr", variant)
    _prepare(inst, profile, budget, brute=True)
    n = profile.num_voters
    denom = inst.limit if variant == "l" else budget.total_cost
    if denom <= TOL or n == 0:
        return AxiomReport(axiom, True, None, BRUTE_FORCE)

    ballot_masks = [mask_of(b) for b in profile.ballots]
    selected_mask = mask_of(budget.selected)
    weigh = MaskWeights(inst.cost)
    knap = _knapsack_cache(inst)
    best = _BestWitness()
    for voters, inter, union in _cohesive_groups(ballot_masks):
        size = len(voters)
        share = size * denom / n
        inter_weight = weigh(inter)
        if min(share, inter_weight) < 1.0 - TOL:
            continue
        threshold, bundle_mask = knap(inter, min(share, denom))
        if threshold <= TOL:
            continue
        represented = weigh(union & selected_mask)
        if represented < threshold - TOL:
            level = min(share, inter_weight)
            best.offer(threshold - represented, tuple(voters), tuple(bits(bundle_mask)),
                       (level, inter, bundle_mask, represented, threshold))
    if not best.found:
        return AxiomReport(axiom, True, None, BRUTE_FORCE)

    level, inter, bundle_mask, represented, threshold = best.payload
    witness = AxiomWitness(
        voters=frozenset(best.voters),
        level=level,
        common_items=frozenset(bits(inter)),
        witness_bundle=frozenset(bits(bundle_mask)),
        represented_weight=represented,
        required_weight=threshold,
    )
    return AxiomReport(axiom, False, witness, BRUTE_FORCE)


def check_local_bpjr(
    inst: Instance,
    profile: Profile,
    budget: Budget,
    variant: str = "l",
    *,
    literal_level_range: bool = False,
) -> AxiomReport:
    """Exact check of Local-BPJR: no cohesive group may have its realized
    representation strictly extendable to a bundle maximizer within its
    entitlement.

    At a critical level ``ell`` (an achievable bundle weight) the
    maximizers are exactly the bundles of weight ``ell``, so a violation
    exists iff the group's representation, restricted to its common
    items, can be extended by at least one more common item without
    exceeding the group's level cap.  ``literal_level_range`` makes the
    "w" variant range levels up to the limit instead of the spend; the
    group-size constraint binds first either way, so verdicts coincide.
    """
    axiom = AxiomId("local-bpjr", variant)
    _prepare(inst, profile, budget, brute=True)
    n = profile.num_voters
    denom = inst.limit if variant == "l" else budget.total_cost
    if (variant == "w" and denom <= TOL) or n == 0:
        return AxiomReport(axiom, True, None, BRUTE_FORCE)

    ballot_masks = [mask_of(b) for b in profile.ballots]
    selected_mask = mask_of(budget.selected)
    weigh = MaskWeights(inst.cost)
    knap = _knapsack_cache(inst)
    best = _BestWitness()
    for voters, inter, union in _cohesive_groups(ballot_masks):
        if inter.bit_count() > MAX_EXACT_BUNDLE_ITEMS:
            raise TooLargeForExact(f"common-item set exceeds {MAX_EXACT_BUNDLE_ITEMS} items")
        represented_mask = union & selected_mask
        if represented_mask & ~inter:
            continue  # no bundle of common items can strictly contain it
        rest = inter & ~represented_mask
        if not rest:
            continue
        cap = len(voters) * denom / n
        if literal_level_range and variant == "w":
            cap = min(cap, inst.limit)
        represented = weigh(represented_mask)
        cheapest = min(inst.cost[i] for i in bits(rest))
        if represented + cheapest > cap + TOL:
            continue
        extension, ext_mask = knap(rest, cap - represented)
        level = represented + extension
        best.offer(extension, tuple(voters), tuple(bits(represented_mask | ext_mask)),
                   (level, inter, represented_mask | ext_mask, represented))
    if not best.found:
        return AxiomReport(axiom, True, None, BRUTE_FORCE)

    level, inter, extended_mask, represented = best.payload
    witness = AxiomWitness(
        voters=frozenset(best.voters),
        level=level,
        common_items=frozenset(bits(inter)),
        witness_bundle=frozenset(bits(extended_mask)),
        represented_weight=represented,
        required_weight=level,
    )
    return AxiomReport(axiom, False, witness, BRUTE_FORCE)


def check_axiom(inst: Instance, profile: Profile, budget: Budget, axiom: AxiomId) -> AxiomReport:
    """Dispatch to the appropriate checker for ``axiom``."""
    if axiom.family in _BJR_FAMILIES:
        return check_bjr_poly(inst, profile, budget, axiom)
    if axiom.family == "strong-bpjr":
        return check_strong_bpjr(inst, profile, budget, axiom.variant)
    if axiom.family == "bpjr":
        return check_bpjr(inst, profile, budget, axiom.variant)
    return check_local_bpjr(inst, profile, budget, axiom.variant)


def evaluate_axioms(inst: Instance, profile: Profile, budget: Budget) -> dict[AxiomId, bool]:
    """Satisfaction verdicts for all ten axioms at once.

    Equivalent to calling :func:`check_axiom` per axiom, but the six
    exponential families share a single sweep over cohesive groups, which
    matters when certifying many budgets.
    """
    out: dict[AxiomId, bool] = {}
    for family in _BJR_FAMILIES:
        for variant in AXIOM_VARIANTS:
            axiom = AxiomId(family, variant)
            out[axiom] = check_bjr_poly(inst, profile, budget, axiom).satisfied

    _prepare(inst, profile, budget, brute=True)
    n = profile.num_voters
    denominators = {"l": inst.limit, "w": budget.total_cost}
    pending: set[AxiomId] = set()
    for family in _BRUTE_FAMILIES:
        for variant in AXIOM_VARIANTS:
            axiom = AxiomId(family, variant)
            if denominators[variant] <= TOL or n == 0:
                out[axiom] = True
            else:
                pending.add(axiom)
    if not pending:
        return out

    ballot_masks = [mask_of(b) for b in profile.ballots]
    selected_mask = mask_of(budget.selected)
    weigh = MaskWeights(inst.cost)
    knap = _knapsack_cache(inst)
    for voters, inter, union in _cohesive_groups(ballot_masks):
        if not pending:
            break
        size = len(voters)
        inter_weight = weigh(inter)
        represented = weigh(union & selected_mask)
        for axiom in tuple(pending):
            denom = denominators[axiom.variant]
            share = size * denom / n
            violated = False
            if axiom.family == "strong-bpjr":
                level = min(share, inter_weight)
                violated = level >= 1.0 - TOL and represented < level - TOL
            elif axiom.family == "bpjr":
                if min(share, inter_weight) >= 1.0 - TOL:
                    threshold, _ = knap(inter, min(share, denom))
                    violated = threshold > TOL and represented < threshold - TOL
            else:
                represented_mask = union & selected_mask
                if not represented_mask & ~inter:
                    rest = inter & ~represented_mask
                    if rest:
                        rep_weight = weigh(represented_mask)
                        cheapest = min(inst.cost[i] for i in bits(rest))
                        violated = rep_weight + cheapest <= share + TOL
            if violated:
                out[axiom] = False
                pending.discard(axiom)
    for axiom in pending:
        out[axiom] = True
    return out


def _implication_edges() -> tuple[tuple[AxiomId, AxiomId], ...]:
    edges: list[tuple[AxiomId, AxiomId]] = []
    for v in AXIOM_VARIANTS:
        a = lambda family: AxiomId(family, v)  # noqa: E731
        edges += [
            (a("strong-bpjr"), a("bpjr")),
            (a("bpjr"), a("local-bpjr")),
            (a("local-bpjr"), a("bjr")),
            (a("strong-bpjr"), a("strong-bjr")),
            (a("strong-bjr"), a("bjr")),
        ]
    for family in ("strong-bpjr", "bpjr", "local-bpjr", "strong-bjr", "bjr"):
        edges.append((AxiomId(family, "l"), AxiomId(family, "w")))
    return tuple(edges)


#: Direct implication edges between axioms (stronger, weaker).
IMPLICATION_EDGES: tuple[tuple[AxiomId, AxiomId], ...] = _implication_edges()


def _transitive_closure() -> dict[AxiomId, frozenset[AxiomId]]:
    reach = {a: {a} for a in ALL_AXIOMS}
    changed = True
    while changed:
        changed = False
        for stronger, weaker in IMPLICATION_EDGES:
            add = reach[weaker] - reach[stronger]
            if add:
                reach[stronger] |= add
                changed = True
    return {a: frozenset(r) for a, r in reach.items()}


_IMPLIES: dict[AxiomId, frozenset[AxiomId]] = _transitive_closure()


def implied_by(a: AxiomId, b: AxiomId) -> bool:
    """True iff satisfying ``b`` always entails satisfying ``a``
    (transitively closed, reflexive)."""
    return a in _IMPLIES[b]


def recheck_witness(inst: Instance, profile: Profile, budget: Budget, report: AxiomReport) -> bool:
    """Re-verify a violation witness from scratch against the definition.

    Recomputes the group's common items, union, and representation from
    the ballots and re-evaluates the violated inequality; used to make
    every returned witness independently checkable.
    """
    witness = report.witness
    if report.satisfied or witness is None:
        return False
    voters = sorted(witness.voters)
    if not voters:
        return False
    n = profile.num_voters
    axiom = report.axiom
    denom = inst.limit if axiom.variant == "l" else budget.total_cost
    if denom <= TOL:
        return False
    common = frozenset.intersection(*(profile.ballots[i] for i in voters))
    union = frozenset.union(*(profile.ballots[i] for i in voters))
    represented = inst.weight(union & budget.selected)
    if abs(represented - witness.represented_weight) > TOL:
        return False
    if witness.common_items != common:
        return False
    if len(voters) < witness.level * n / denom - TOL:
        return False
    bundle = witness.witness_bundle
    if not bundle <= common:
        return False

    if axiom.family in _BJR_FAMILIES:
        if represented > TOL or len(bundle) != 1:
            return False
        (item,) = bundle
        if axiom.family == "bjr" and abs(inst.cost[item] - 1.0) > TOL:
            return False
        return len(voters) >= n / denom - TOL
    if axiom.family == "strong-bpjr":
        level = witness.level
        return (
            level >= 1.0 - TOL
            and inst.weight(common) >= level - TOL
            and represented < level - TOL
        )
    if axiom.family == "bpjr":
        cap = len(voters) * denom / n
        bundle_weight = inst.weight(bundle)
        return (
            abs(bundle_weight - witness.required_weight) <= TOL
            and bundle_weight <= min(cap, denom) + TOL
            and bundle_weight >= 1.0 - TOL
            and represented < bundle_weight - TOL
        )
    # local-bpjr: the bundle must be a strict superset of the realized
    # representation and a maximizer at its own weight level
    represented_items = union & budget.selected
    if not represented_items < bundle:
        return False
    level = witness.level
    if abs(inst.weight(bundle) - level) > TOL:
        return False
    if level > len(voters) * denom / n + TOL or level < 1.0 - TOL:
        return False
    backing = {i: inst.cost[i] for i in common}
    return inst.weight(bundle) >= max_bundle_weight(backing, level) - TOL
