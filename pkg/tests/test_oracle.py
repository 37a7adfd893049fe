import pytest

from monodelta import formula as F
from monodelta.analysis import project
from monodelta.generation import check_unambiguity, enumerate_products, generate_variant
from monodelta.oracle import (
    Outcome,
    RandomSplSpec,
    canonicalize,
    check_equivalence,
    generate_random_spl,
    outcome_table,
)
from monodelta.syntax import parse_spl


def test_canonicalize_orders_classes_and_attributes():
    a = parse_spl("features A; base { class B extends Object { int m() { return 0; } int f; } class A extends Object { } } order ;").base
    b = parse_spl("features A; base { class A extends Object { } class B extends Object { int f; int m() { return 0; } } } order ;").base
    assert a != b
    assert canonicalize(a) == canonicalize(b)
    assert [c.name for c in canonicalize(a).classes] == ["A", "B"]
    assert [x.name for x in canonicalize(a).get("B").attrs] == ["f", "m"]


def test_reflexive_and_symmetric(epl):
    assert check_equivalence(epl, epl).equivalent
    other = project(epl, F.Not(F.Atom("Neg")))
    ab, ba = check_equivalence(epl, other), check_equivalence(other, epl)
    assert not ab.equivalent and not ba.equivalent
    assert {p for p, _ in ab.witnesses} == {p for p, _ in ba.witnesses}


def test_projection_witnesses_are_the_removed_products(epl):
    other = project(epl, F.Not(F.Atom("Neg")))
    verdict = check_equivalence(epl, other)
    assert len(verdict.witnesses) == 6
    assert all("Neg" in p for p, _ in verdict.witnesses)
    assert all("only in the first" in d for _, d in verdict.witnesses)
    assert verdict.to_dict()["equivalent"] is False
    assert verdict.to_text().startswith("not equivalent: 6")


def test_variant_difference_is_reported():
    a = parse_spl("features A; base { class C extends Object { int f; } } order ;")
    b = parse_spl("features A; base { class C extends Object { int g; } } order ;")
    verdict = check_equivalence(a, b)
    assert not verdict
    assert verdict.witnesses[0][1] == "C.f only in the first"


def test_errors_compare_by_kind_and_reference():
    a = parse_spl("features A; base { } delta D when A { removes C } order D;")
    b = parse_spl("features A; base { } delta E when A { removes C } order E;")
    c = parse_spl("features A; base { } delta D when A { removes X } order D;")
    assert check_equivalence(a, b).equivalent
    assert not check_equivalence(a, c).equivalent
    table = outcome_table(a)
    assert table[frozenset({"A"})] == Outcome(error=("remove-missing", "C"))


def test_precomputed_table_is_used(epl):
    table = outcome_table(epl)
    assert check_equivalence(epl, epl, table_a=table).equivalent
    assert len(table) == 12


@pytest.mark.parametrize("seed", range(25))
def test_random_spl_is_sound(seed):
    pl = generate_random_spl(RandomSplSpec(seed=seed))
    assert check_unambiguity(pl).ok
    products = enumerate_products(pl)
    assert products
    for p in products:
        generate_variant(pl, p)


def test_random_spl_is_deterministic():
    spec = RandomSplSpec(seed=42)
    assert generate_random_spl(spec) == generate_random_spl(spec)
    assert generate_random_spl(RandomSplSpec(seed=43)) != generate_random_spl(spec)


def test_random_spl_respects_bounds():
    spec = RandomSplSpec(seed=7, max_features=3, max_deltas=4, max_partitions=2)
    pl = generate_random_spl(spec)
    assert len(pl.features) <= 3 and len(pl.deltas) <= 4 and len(pl.order) <= 2


def test_zero_deltas_gives_base_only():
    pl = generate_random_spl(RandomSplSpec(seed=3, max_deltas=0))
    assert pl.deltas == () and pl.order == ()
