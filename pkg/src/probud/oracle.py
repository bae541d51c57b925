"""Brute-force ground truth for desk-scale instances.

Enumerates every feasible budget, certifies for which budgets an axiom
holds (in particular whether any satisfying budget exists at all), and
cross-checks the implication lattice between the ten axioms.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._bits import bits
from .axioms import check_axiom, evaluate_axioms, implied_by
from .errors import TooLargeForExact
from .model import ALL_AXIOMS, TOL, AxiomId, Budget, Instance, Profile

#: Hard cap on items for full budget enumeration.
MAX_ENUM_ITEMS = 20


@dataclass(frozen=True)
class ExistenceReport:
    """Outcome of sweeping an axiom checker over all (exhaustive) feasible
    budgets of one instance."""

    axiom: AxiomId
    exhaustive_only: bool
    exists: bool
    satisfying_budgets: tuple[Budget, ...]
    total_feasible: int


def enumerate_feasible(inst: Instance, exhaustive_only: bool = False) -> list[Budget]:
    """All feasible budgets, optionally restricted to exhaustive ones, in
    lexicographic order of their sorted index tuples."""
    m = inst.num_items
    if m > MAX_ENUM_ITEMS:
        raise TooLargeForExact(
            f"budget enumeration supports at most {MAX_ENUM_ITEMS} items, got {m}"
        )
    totals = [0.0] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        totals[mask] = totals[mask ^ low] + inst.cost[low.bit_length() - 1]

    budgets: list[tuple[tuple[int, ...], float]] = []
    limit = inst.limit
    for mask in range(1 << m):
        total = totals[mask]
        if total > limit + TOL:
            continue
        if exhaustive_only:
            exhaustive = True
            for c in range(m):
                if not (mask >> c) & 1 and total + inst.cost[c] <= limit + TOL:
                    exhaustive = False
                    break
            if not exhaustive:
                continue
        budgets.append((tuple(bits(mask)), total))
    budgets.sort()
    return [Budget(frozenset(indices), total) for indices, total in budgets]


def certify_existence(
    inst: Instance,
    profile: Profile,
    axiom: AxiomId,
    exhaustive_only: bool = False,
) -> ExistenceReport:
    """Run the axiom's checker over every (exhaustive) feasible budget and
    report all satisfiers."""
    budgets = enumerate_feasible(inst, exhaustive_only)
    satisfying = tuple(
        b for b in budgets if check_axiom(inst, profile, b, axiom).satisfied
    )
    return ExistenceReport(
        axiom=axiom,
        exhaustive_only=exhaustive_only,
        exists=bool(satisfying),
        satisfying_budgets=satisfying,
        total_feasible=len(budgets),
    )


def verify_implications(
    inst: Instance,
    profile: Profile,
    budgets: list[Budget],
) -> list[tuple[Budget, AxiomId, AxiomId]]:
    """Check every implication edge of the axiom lattice on every budget.

    Returns the (budget, stronger, weaker) triples where the stronger
    axiom holds but the implied weaker one does not; expected empty.
    """
    violations: list[tuple[Budget, AxiomId, AxiomId]] = []
    for budget in budgets:
        satisfied = evaluate_axioms(inst, profile, budget)
        for stronger in ALL_AXIOMS:
            if not satisfied[stronger]:
                continue
            for weaker in ALL_AXIOMS:
                if weaker != stronger and implied_by(weaker, stronger) and not satisfied[weaker]:
                    violations.append((budget, stronger, weaker))
    return violations


def replay_witnesses(
    inst: Instance,
    profile: Profile,
    axiom: AxiomId,
    exhaustive_only: bool = False,
) -> bool:
    """Re-prove a non-existence certificate by re-verifying, from scratch,
    the violation witness of every enumerated budget.

    Returns True iff every budget's checker reports a violation and every
    reported witness re-validates against the definition.
    """
    from .axioms import recheck_witness

    for budget in enumerate_feasible(inst, exhaustive_only):
        report = check_axiom(inst, profile, budget, axiom)
        if report.satisfied or not recheck_witness(inst, profile, budget, report):
            return False
    return True


__all__ = [
    "ExistenceReport",
    "MAX_ENUM_ITEMS",
    "certify_existence",
    "enumerate_feasible",
    "replay_witnesses",
    "verify_implications",
]
