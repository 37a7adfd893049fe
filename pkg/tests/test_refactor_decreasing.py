from hypothesis import given, settings, strategies as st

from monodelta import formula as F
from monodelta.analysis import classify, count_ops, remove_empty_deltas
from monodelta.model import ADO, EXTENDS, Op, Ref
from monodelta.oracle import check_equivalence
from monodelta.refactor import ElementDecomposition, refactor_decreasing
from monodelta.syntax import attr_to_text, parse_spl

from conftest import random_spl


def test_epl_base_is_complete(epl):
    out = refactor_decreasing(epl)
    assert count_ops(out, Op.ADDS) == 0
    assert [c.name for c in out.base.classes] == ["Exp", "Lit", "Add", "Neg"]
    # the first evaluation variant lands in the base, the second is readded
    assert "(-1) * expr.eval()" in attr_to_text(out.base.lookup(Ref("Neg", "eval")))
    assert out.base.lookup(Ref("Neg", "toString")) is not None
    (readd,) = out.delta("DreaddNegEval_DNegEval2").ops
    assert readd.op is Op.READDS and readd.ref == Ref("Neg", "eval")
    assert attr_to_text(readd.data).startswith("Lit eval()")


def test_epl_condition_shapes(epl):
    out = refactor_decreasing(epl)
    assert out.activation["DreaddNeg_DNeg"] == F.Atom("Neg")
    assert out.activation["DremNeg_DNeg"] == F.Not(F.Atom("Neg"))
    assert out.delta("DremNeg_DNeg").ops == (ADO(Op.REMOVES, Ref("Neg")),)
    rem = out.activation["DremExpEval_DLitEval1_DLitEval2"]
    assert F.equivalent(rem, F.And(F.Not(F.Atom("Eval1")), F.Not(F.Atom("Eval2"))), out.features)
    idx = out.partition_index()
    assert idx["DreaddNeg_DNeg"] + 1 == idx["DNeg"]
    assert idx["DremNeg_DNeg"] < idx["DNeg"]


def test_epl_is_readd_pseudo_decreasing_and_equivalent(epl):
    out = refactor_decreasing(epl)
    report = classify(out)
    # DOptionalPrint wraps toString, so only the pseudo class holds
    assert report["readd-pseudo-decreasing"] and not report["readd-decreasing"]
    assert check_equivalence(epl, out).equivalent
    cleaned = remove_empty_deltas(out)
    assert check_equivalence(epl, cleaned).equivalent
    assert len(out.deltas) - len(cleaned.deltas) == 18


def test_no_adds_is_identity():
    pl = parse_spl("features A; base { class C extends Object { int f; } } delta D when A { removes C } order D;")
    assert refactor_decreasing(pl) == pl


def test_single_class_add_into_empty_base():
    pl = parse_spl("features A; base { } delta D when A { adds class C extends Object { int f; } } order D;")
    out = refactor_decreasing(pl)
    assert out.base == parse_spl("features A; base { class C extends Object { int f; } } order ;").base
    assert out.delta("D").ops == ()
    assert out.delta("DreaddC_D").ops == ()
    assert out.delta("DremC_D").ops == (ADO(Op.REMOVES, Ref("C")),)
    assert out.order == (("DremC_D",), ("DreaddC_D",), ("D",))
    assert check_equivalence(pl, out).equivalent


def test_element_decomposition_order():
    pl = parse_spl("features A; base { } delta D when A { adds class C extends Object { int f; int g() { return f; } } } order D;")
    dec = ElementDecomposition.of(pl.delta("D").ops[0])
    assert dec.refs() == (Ref("C"), Ref("C", "f"), Ref("C", "g"))
    assert len(dec) == 3


def test_class_readd_drops_stale_attributes():
    pl = parse_spl(
        "features A, B; base { class C extends Object { int f; int g; } }\n"
        "delta D0 when A { removes C }\n"
        "delta D1 when A && B { adds class C extends Object { int f; } }\n"
        "order D0 < D1;"
    )
    out = refactor_decreasing(pl)
    readd = out.delta("DreaddC_D1").ops
    assert ADO(Op.REMOVES, Ref("C", "g")) in readd
    assert any(o.op is Op.READDS and o.ref == Ref("C", "f") for o in readd)
    assert check_equivalence(pl, out).equivalent


def test_superclass_reset_when_it_differs():
    pl = parse_spl(
        "features A; base { class B extends Object { } class C extends Object { } }\n"
        "delta D0 when A { removes C }\n"
        "delta D1 when A { adds class C extends B { } }\n"
        "order D0 < D1;"
    )
    out = refactor_decreasing(pl)
    assert ADO(Op.MODIFIES, Ref("C", EXTENDS), "B") in out.delta("DreaddC_D1").ops
    assert check_equivalence(pl, out).equivalent


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=20_000))
def test_random_equivalent_and_adds_free(seed):
    pl = random_spl(seed)
    out = refactor_decreasing(pl)
    assert count_ops(out, Op.ADDS) == 0
    assert check_equivalence(pl, out).equivalent
    assert refactor_decreasing(out) == out
