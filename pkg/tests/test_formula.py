from hypothesis import given, strategies as st

from monodelta import formula as F

A, B, C = F.Atom("A"), F.Atom("B"), F.Atom("C")


def test_operators_build_nodes():
    assert (A & B) == F.And(A, B)
    assert (A | ~B) == F.Or(A, F.Not(B))


def test_to_text_is_fully_parenthesized():
    assert F.to_text(F.And(A, F.Or(B, F.Not(C)))) == "(A && (B || !C))"
    assert F.to_text(F.TRUE) == "true"


def test_models_in_product_order():
    got = F.models(F.Or(A, B), ["A", "B"])
    assert got == (frozenset({"A"}), frozenset({"A", "B"}), frozenset({"B"}))


def test_false_has_no_models_and_true_has_all():
    assert F.models(F.FALSE, ["A", "B"]) == ()
    assert len(F.models(F.TRUE, ["A", "B", "C"])) == 8


def test_double_negation_equivalent():
    assert F.equivalent(F.Not(F.Not(A)), A)
    assert not F.equivalent(A, B)
    assert F.is_satisfiable(F.And(A, F.Not(B)), ["A", "B"])
    assert not F.is_satisfiable(F.And(A, F.Not(A)), ["A"])


formulas = st.recursive(
    st.sampled_from([A, B, C, F.TRUE, F.FALSE]),
    lambda sub: st.one_of(
        st.builds(F.Not, sub), st.builds(F.And, sub, sub), st.builds(F.Or, sub, sub)
    ),
    max_leaves=8,
)


@given(formulas, st.sets(st.sampled_from("ABC")))
def test_compiled_matches_evaluate(f, selected):
    assert F.compile_formula(f)(selected) == f.evaluate(selected)
