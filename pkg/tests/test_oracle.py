import pytest

from probud.errors import TooLargeForExact
from probud.model import AxiomId, Instance, normalize
from probud.oracle import (
    certify_existence,
    enumerate_feasible,
    replay_witnesses,
    verify_implications,
)
from probud.rules import gpseq

from oracles import count_feasible
from suites import suite_instance, unit_instance


def test_enumerate_exhaustive_on_example_one(ex1):
    _, inst, _ = ex1
    budgets = enumerate_feasible(inst, exhaustive_only=True)
    assert [sorted(b.selected) for b in budgets] == [[0, 2], [1, 2]]


def test_enumerate_zero_limit():
    inst = normalize({"a": 1.0, "b": 2.0}, 0.0)
    budgets = enumerate_feasible(inst)
    assert [sorted(b.selected) for b in budgets] == [[]]


def test_enumerate_unit_costs_full_set_is_only_exhaustive():
    inst = Instance(("a", "b", "c"), (1.0, 1.0, 1.0), 3.0)
    budgets = enumerate_feasible(inst, exhaustive_only=True)
    assert [sorted(b.selected) for b in budgets] == [[0, 1, 2]]


def test_enumerate_is_sorted_lexicographically(ex2):
    _, inst, _ = ex2
    budgets = enumerate_feasible(inst)
    keys = [tuple(sorted(b.selected)) for b in budgets]
    assert keys == sorted(keys)


def test_enumerate_counts_match_recursive_generator():
    for seed in range(40):
        inst, _ = suite_instance(seed)
        for exhaustive_only in (False, True):
            got = len(enumerate_feasible(inst, exhaustive_only=exhaustive_only))
            expected = count_feasible(inst.cost, inst.limit, exhaustive_only=exhaustive_only)
            assert got == expected, f"seed {seed} exhaustive={exhaustive_only}"


def test_enumerate_item_cap():
    inst = Instance(tuple(f"c{j}" for j in range(21)), (1.0,) * 21, 3.0)
    with pytest.raises(TooLargeForExact):
        enumerate_feasible(inst)


def test_certify_nonexistence_on_example_one(ex1):
    _, inst, profile = ex1
    for family in ("strong-bjr", "strong-bpjr"):
        report = certify_existence(inst, profile, AxiomId(family, "l"))
        assert not report.exists
        assert report.satisfying_budgets == ()
        assert report.total_feasible == 6
    assert replay_witnesses(inst, profile, AxiomId("strong-bjr", "l"))
    assert replay_witnesses(inst, profile, AxiomId("strong-bpjr", "l"))


def test_certify_bpjr_exhaustive_exists_on_example_one(ex1):
    _, inst, profile = ex1
    report = certify_existence(inst, profile, AxiomId("bpjr", "l"), exhaustive_only=True)
    assert report.exists


def test_certified_satisfiers_repass_their_checker():
    from probud.axioms import check_axiom

    for seed in range(10):
        inst, profile = suite_instance(seed, max_voters=6, max_items=5)
        for axiom in (AxiomId("bpjr", "l"), AxiomId("local-bpjr", "w")):
            report = certify_existence(inst, profile, axiom)
            assert report.exists == bool(report.satisfying_budgets)
            for budget in report.satisfying_budgets:
                assert check_axiom(inst, profile, budget, axiom).satisfied


def test_certify_empty_budget_always_satisfies_w_variants(ex1):
    _, inst, profile = ex1
    report = certify_existence(inst, profile, AxiomId("bjr", "w"))
    assert report.exists
    assert any(not b.selected for b in report.satisfying_budgets)


def test_verify_implications_on_example_two(ex2):
    _, inst, profile = ex2
    budgets = enumerate_feasible(inst)
    assert verify_implications(inst, profile, budgets) == []


def test_example_two_satisfaction_pattern_is_lattice_consistent(ex2):
    # the sequential rule's output keeps local-bpjr-l while failing
    # bpjr-w; there is no lattice edge between those two
    from probud.axioms import evaluate_axioms
    from probud.model import Budget

    _, inst, profile = ex2
    verdicts = evaluate_axioms(inst, profile, Budget.of(inst, [1, 2]))
    assert verdicts[AxiomId("local-bpjr", "l")] is True
    assert verdicts[AxiomId("bpjr", "w")] is False


def test_implications_hold_on_small_random_suite():
    for seed in range(25):
        inst, profile = suite_instance(seed, max_voters=6, max_items=5)
        budgets = enumerate_feasible(inst)
        assert verify_implications(inst, profile, budgets) == [], f"seed {seed}"


def test_l_and_w_variants_coincide_when_spend_equals_limit():
    from probud.axioms import check_axiom

    for seed in range(20):
        inst, profile, k = unit_instance(seed, max_voters=6, max_items=5)
        full = [b for b in enumerate_feasible(inst) if abs(b.total_cost - inst.limit) < 1e-9]
        for budget in full[:5]:
            for family in ("strong-bjr", "bjr", "strong-bpjr", "bpjr", "local-bpjr"):
                left = check_axiom(inst, profile, budget, AxiomId(family, "l")).satisfied
                right = check_axiom(inst, profile, budget, AxiomId(family, "w")).satisfied
                assert left == right, f"seed {seed} family {family}"


def test_gpseq_output_listed_among_local_bpjr_satisfiers():
    for seed in range(15):
        inst, profile = suite_instance(seed, max_voters=8, max_items=6)
        budget, _ = gpseq(inst, profile)
        report = certify_existence(inst, profile, AxiomId("local-bpjr", "l"))
        assert budget in report.satisfying_budgets, f"seed {seed}"
