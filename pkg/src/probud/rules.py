"""Budgeting procedures: greedy BJR-L, constructive BPJR-L, and the
sequential min-max-load rule.

The sequential rule repeatedly adds the affordable approved item whose
inclusion allows the smallest possible maximum per-voter cost load, where
the cost of every selected item is spread over its approvers and already
assigned loads may be redistributed.  The spread kernel
(:func:`min_max_load`) runs a binary search on the load cap with a
max-flow feasibility test.

All rules are deterministic: ties among items are broken by an explicit
policy (index order by default), and exhaustive fills always proceed
cheapest-first, then by index.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ._bits import bits
from .errors import InvalidBudget, InvalidProfile, NoApprover, TooLargeForExact
from .model import TOL, Budget, Instance, Profile, _require_profile

#: Recognized tie-breaking policies for the sequential rule.
TIE_POLICIES = ("lex", "cheapest", "most-approved")

#: Hard cap on items for the constructive BPJR-L procedure (it enumerates
#: bundles; memory grows as 2**m, so desk scale in practice is m <~ 20).
MAX_CONSTRUCT_ITEMS = 25

_FEASIBILITY_SLACK = 1e-11
_CAP_RESOLUTION = 1e-12
_MAX_BISECT_STEPS = 60


@dataclass(frozen=True)
class LoadAssignment:
    """A spread of selected items' costs over approving voters.

    ``spread`` maps ``(item, voter)`` to the share of the item's cost the
    voter carries (zero entries omitted); ``voter_load[i]`` is voter i's
    total share and ``max_load`` the largest of them.
    """

    spread: Mapping[tuple[int, int], float]
    voter_load: tuple[float, ...]
    max_load: float


@dataclass(frozen=True)
class SequentialStep:
    """One iteration of the sequential rule: every affordable approved
    candidate with its optimal max load, the tie set, and the pick."""

    chosen: int
    loads: Mapping[int, float]
    tie_set: frozenset[int]


@dataclass(frozen=True)
class RuleTrace:
    """Full record of a sequential run.

    ``filled`` lists unapproved items appended by the opt-in
    post-processing pass; replaying ``steps`` then ``filled`` reproduces
    ``final_budget``.  ``final_assignment`` spreads the approved part of
    the selection (fill items have no approvers to carry them).
    """

    steps: tuple[SequentialStep, ...]
    filled: tuple[int, ...]
    final_budget: Budget
    final_assignment: LoadAssignment | None


class _Dinic:
    """Max flow on a tiny graph with float capacities."""

    EPS = 1e-13

    def __init__(self, num_nodes: int):
        self.num_nodes = num_nodes
        self.to: list[int] = []
        self.cap: list[float] = []
        self.head: list[list[int]] = [[] for _ in range(num_nodes)]

    def add_edge(self, u: int, v: int, capacity: float) -> int:
        idx = len(self.to)
        self.to.append(v)
        self.cap.append(capacity)
        self.head[u].append(idx)
        self.to.append(u)
        self.cap.append(0.0)
        self.head[v].append(idx + 1)
        return idx

    def max_flow(self, source: int, sink: int) -> float:
        flow = 0.0
        while True:
            level = [-1] * self.num_nodes
            level[source] = 0
            queue = [source]
            for u in queue:
                for e in self.head[u]:
                    v = self.to[e]
                    if self.cap[e] > self.EPS and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[sink] < 0:
                return flow
            it = [0] * self.num_nodes

            def augment(u: int, pushed: float) -> float:
                if u == sink:
                    return pushed
                while it[u] < len(self.head[u]):
                    e = self.head[u][it[u]]
                    v = self.to[e]
                    if self.cap[e] > self.EPS and level[v] == level[u] + 1:
                        d = augment(v, min(pushed, self.cap[e]))
                        if d > self.EPS:
                            self.cap[e] -= d
                            self.cap[e ^ 1] += d
                            return d
                    it[u] += 1
                return 0.0

            while True:
                pushed = augment(source, math.inf)
                if pushed <= self.EPS:
                    break
                flow += pushed


def min_max_load(inst: Instance, profile: Profile, selected: Iterable[int]) -> LoadAssignment:
    """Spread the selected items' costs over their approvers so that the
    maximum per-voter load is minimal.

    Binary search on the load cap: a cap is feasible iff a flow from a
    source through items (capacity = item cost) and approval edges into
    voters (capacity = cap) saturates all items.  The search runs at most
    60 steps or until the bracket is below 1e-12, so the returned
    ``max_load`` is within 1e-9 of the optimum.
    """
    _require_profile(inst, profile)
    items = sorted(set(selected))
    for c in items:
        if not 0 <= c < inst.num_items:
            raise InvalidBudget(f"item index {c} out of range")
    n = profile.num_voters
    approvers = {c: [i for i, b in enumerate(profile.ballots) if c in b] for c in items}
    for c in items:
        if not approvers[c]:
            raise NoApprover(f"item {inst.names[c]!r} has no approving voter")
    if not items:
        return LoadAssignment({}, (0.0,) * n, 0.0)

    total = inst.weight(items)
    carriers = sorted({i for group in approvers.values() for i in group})
    low = max(
        total / len(carriers),
        max(inst.cost[c] / len(approvers[c]) for c in items),
    )

    # Greedy whole-item placement gives a feasible upper bound.
    loads = [0.0] * n
    for c in sorted(items, key=lambda c: (-inst.cost[c], c)):
        v = min(approvers[c], key=lambda i: (loads[i], i))
        loads[v] += inst.cost[c]
    high = max(loads)
    low = min(low, high)

    def build(cap: float) -> tuple[_Dinic, dict[tuple[int, int], int]]:
        # node layout: 0 source, 1..k items, k+1..k+len(carriers) voters, last sink
        k = len(items)
        voter_node = {v: 1 + k + j for j, v in enumerate(carriers)}
        sink = 1 + k + len(carriers)
        net = _Dinic(sink + 1)
        edge_ids: dict[tuple[int, int], int] = {}
        for pos, c in enumerate(items):
            net.add_edge(0, 1 + pos, inst.cost[c])
            for v in approvers[c]:
                edge_ids[(c, v)] = net.add_edge(1 + pos, voter_node[v], total)
        for v in carriers:
            net.add_edge(voter_node[v], sink, cap)
        return net, edge_ids

    def feasible(cap: float) -> bool:
        net, _ = build(cap)
        return net.max_flow(0, net.num_nodes - 1) >= total - _FEASIBILITY_SLACK

    for _ in range(_MAX_BISECT_STEPS):
        if high - low <= _CAP_RESOLUTION:
            break
        mid = (low + high) / 2.0
        if feasible(mid):
            high = mid
        else:
            low = mid

    net, edge_ids = build(high)
    net.max_flow(0, net.num_nodes - 1)
    spread: dict[tuple[int, int], float] = {}
    voter_load = [0.0] * n
    for (c, v), e in edge_ids.items():
        share = total - net.cap[e]
        if share > 1e-15:
            spread[(c, v)] = share
            voter_load[v] += share
    return LoadAssignment(spread, tuple(voter_load), max(voter_load))


def _tie_key(policy: str, inst: Instance, approval_count: Sequence[int]):
    if policy == "lex":
        return lambda c: c
    if policy == "cheapest":
        return lambda c: (inst.cost[c], c)
    if policy == "most-approved":
        return lambda c: (-approval_count[c], c)
    raise ValueError(f"unknown tie policy {policy!r}; expected one of {TIE_POLICIES}")


def gpseq(
    inst: Instance,
    profile: Profile,
    tie: str = "lex",
    fill_unapproved: bool = False,
) -> tuple[Budget, RuleTrace]:
    """Sequential min-max-load rule.

    While some approved item still fits, evaluate every affordable
    approved candidate by the optimal max load of the selection extended
    with it, and add a load-minimal candidate (ties resolved by
    ``tie``).  With ``fill_unapproved``, a post-processing pass then adds
    items nobody approves, cheapest first, while they fit.
    """
    _require_profile(inst, profile)
    if profile.num_voters == 0:
        raise InvalidProfile("the sequential rule needs at least one voter")
    approval_count = [0] * inst.num_items
    for ballot in profile.ballots:
        for c in ballot:
            approval_count[c] += 1
    key = _tie_key(tie, inst, approval_count)

    selected: set[int] = set()
    total = 0.0
    steps: list[SequentialStep] = []
    while True:
        candidates = [
            c
            for c in range(inst.num_items)
            if c not in selected
            and approval_count[c] > 0
            and total + inst.cost[c] <= inst.limit + TOL
        ]
        if not candidates:
            break
        loads = {
            c: min_max_load(inst, profile, selected | {c}).max_load for c in candidates
        }
        smallest = min(loads.values())
        tie_set = frozenset(c for c in candidates if loads[c] <= smallest + TOL)
        chosen = min(tie_set, key=key)
        steps.append(SequentialStep(chosen, loads, tie_set))
        selected.add(chosen)
        total += inst.cost[chosen]

    assignment = min_max_load(inst, profile, selected)
    filled: list[int] = []
    if fill_unapproved:
        for c in sorted(range(inst.num_items), key=lambda c: (inst.cost[c], c)):
            if c not in selected and approval_count[c] == 0 and total + inst.cost[c] <= inst.limit + TOL:
                selected.add(c)
                filled.append(c)
                total += inst.cost[c]

    budget = Budget.of(inst, selected)
    trace = RuleTrace(tuple(steps), tuple(filled), budget, assignment)
    return budget, trace


def _fill_exhaustive(inst: Instance, selected: set[int], total: float) -> tuple[set[int], float]:
    """Add items, cheapest first then by index, until nothing more fits."""
    for c in sorted(range(inst.num_items), key=lambda c: (inst.cost[c], c)):
        if c not in selected and total + inst.cost[c] <= inst.limit + TOL:
            selected.add(c)
            total += inst.cost[c]
    return selected, total


def greedy_bjr_l(inst: Instance, profile: Profile) -> Budget:
    """Greedy polynomial rule producing an exhaustive budget that
    satisfies BJR-L.

    If all unit-cost items fit, take them all.  Otherwise repeatedly add
    the unit-cost item approved by the most not-yet-represented voters,
    retiring represented voters, until the selection reaches the rounded
    limit; then fill to exhaustiveness.
    """
    _require_profile(inst, profile)
    if profile.num_voters == 0:
        raise InvalidProfile("greedy_bjr_l needs at least one voter")
    unit_items = [c for c in range(inst.num_items) if abs(inst.cost[c] - 1.0) <= TOL]
    selected: set[int] = set()
    total = 0.0
    if inst.weight(unit_items) <= inst.limit + TOL:
        for c in sorted(unit_items, key=lambda c: (inst.cost[c], c)):
            if total + inst.cost[c] <= inst.limit + TOL:
                selected.add(c)
                total += inst.cost[c]
    else:
        remaining = set(range(profile.num_voters))
        pool = set(unit_items)
        target = math.floor(inst.limit + TOL)
        while total < target - TOL and pool:
            best = min(
                pool,
                key=lambda c: (-sum(1 for i in remaining if c in profile.ballots[i]), c),
            )
            if total + inst.cost[best] > inst.limit + TOL:
                break
            selected.add(best)
            total += inst.cost[best]
            pool.remove(best)
            remaining -= {i for i in remaining if best in profile.ballots[i]}
    selected, total = _fill_exhaustive(inst, selected, total)
    return Budget.of(inst, selected)


def bpjr_construct(inst: Instance, profile: Profile) -> Budget:
    """Constructive procedure for an exhaustive BPJR-L budget.

    Walk achievable bundle weights downward.  At each level, among the
    not-yet-selected bundles of exactly that weight, take a bundle with
    maximal support among still-unserved voters whenever that support
    meets the level's group-size threshold, retiring the supporters;
    repeat at the same level until no bundle qualifies, then descend.
    Finally fill to exhaustiveness.  Exponential in the number of items
    (hard cap ``MAX_CONSTRUCT_ITEMS``).
    """
    _require_profile(inst, profile)
    if profile.num_voters == 0:
        raise InvalidProfile("bpjr_construct needs at least one voter")
    m = inst.num_items
    if m > MAX_CONSTRUCT_ITEMS:
        raise TooLargeForExact(
            f"bundle construction supports at most {MAX_CONSTRUCT_ITEMS} items, got {m}"
        )
    n = profile.num_voters

    pairs: list[tuple[float, int]] = [(0.0, 0)]
    for c in range(m):
        bit = 1 << c
        pairs.extend([(w + inst.cost[c], mask | bit) for w, mask in pairs])
    pairs.sort()
    weights = [w for w, _ in pairs]

    levels: list[float] = []
    for w in weights:
        if w < 1.0 - TOL or w > inst.limit + TOL:
            continue
        if not levels or w - levels[-1] > TOL:
            levels.append(w)
    levels.reverse()

    ballot_masks = [0] * n
    for i, ballot in enumerate(profile.ballots):
        for c in ballot:
            ballot_masks[i] |= 1 << c
    active = set(range(n))
    selected_mask = 0
    total = 0.0
    for level in levels:
        lo = bisect_left(weights, level - TOL)
        hi = bisect_right(weights, level + TOL)
        while total + level <= inst.limit + TOL:
            best_key = None
            best_mask = 0
            best_support = 0
            for idx in range(lo, hi):
                mask = pairs[idx][1]
                if mask & selected_mask:
                    continue
                support = sum(1 for i in active if mask & ~ballot_masks[i] == 0)
                key = (-support, mask.bit_count(), tuple(bits(mask)))
                if best_key is None or key < best_key:
                    best_key, best_mask, best_support = key, mask, support
            if best_key is None or best_support < level * n / inst.limit - TOL:
                break
            # gate on the bundle's true weight: clustered level values may
            # sit a tolerance away from it
            true_weight = sum(inst.cost[c] for c in bits(best_mask))
            if total + true_weight > inst.limit + TOL:
                break
            selected_mask |= best_mask
            total += true_weight
            active = {i for i in active if best_mask & ~ballot_masks[i] != 0}

    selected = set(bits(selected_mask))
    selected, total = _fill_exhaustive(inst, selected, total)
    return Budget.of(inst, selected)
