from monodelta import formula as F
from monodelta.analysis import (
    CLASSES,
    before,
    classify,
    count_ops,
    linearize_down,
    linearize_up,
    project,
    remove_empty_deltas,
)
from monodelta.generation import enumerate_products
from monodelta.model import Op, Program, ProductLine
from monodelta.oracle import check_equivalence
from monodelta.refactor import refactor_decreasing, refactor_increasing
from monodelta.syntax import parse_spl

from conftest import random_spl


def test_linearize(epl):
    assert linearize_up(epl, {"DremAdd", "DNeg"}) == ["DNeg", "DremAdd"]
    assert linearize_down(epl, {"DremAdd", "DNeg"}) == ["DremAdd", "DNeg"]
    assert linearize_up(epl, set()) == []
    assert linearize_up(epl, {"DAddEval1", "DLitEval1", "DNegPrint"}) == ["DNegPrint", "DAddEval1", "DLitEval1"]


def test_before(epl):
    assert before(epl, "DremAdd") == set(epl.delta_names) - {"DremAdd"}
    assert before(epl, "DNeg") == set()
    single = parse_spl("features A; base { } delta D when A { } delta E when A { } order { D, E };")
    assert before(single, "E") == set()


def test_classify_epl_all_false(epl):
    report = classify(epl)
    assert not any(report[c] for c in CLASSES)
    assert "adds" in report.to_text()


def test_classify_after_increasing(epl):
    report = classify(refactor_increasing(epl))
    assert report["increasing"] and not report["strictly-increasing"]


def test_classify_empty_product_line():
    pl = ProductLine(("A",), F.TRUE, Program(()))
    assert all(classify(pl)[c] for c in CLASSES)


def test_implication_chains():
    chains = [
        ("strictly-increasing", "increasing", "pseudo-increasing"),
        ("strictly-decreasing", "decreasing", "pseudo-decreasing"),
        ("readd-strictly-decreasing", "readd-decreasing", "readd-pseudo-decreasing"),
    ]
    pairs = [("strictly-decreasing", "readd-strictly-decreasing"), ("decreasing", "readd-decreasing"),
             ("pseudo-decreasing", "readd-pseudo-decreasing")]
    for seed in range(60):
        pl = random_spl(seed)
        for out in (pl, refactor_increasing(pl), refactor_decreasing(pl)):
            r = classify(out)
            for chain in chains:
                for weak, strong in zip(chain[1:], chain[:-1]):
                    assert not r[strong] or r[weak]
            for plain, readd in pairs:
                assert not r[plain] or r[readd]


def test_project_examples(epl):
    no_neg = project(epl, F.Not(F.Atom("Neg")))
    # DNegEval1 and DNegEval2 need Neg as well, so they are dead too
    assert set(epl.delta_names) - set(no_neg.delta_names) == {
        "DNeg", "DNegPrint", "DOptionalPrint", "DNegEval1", "DNegEval2"
    }
    no_eval2 = project(epl, F.Not(F.Atom("Eval2")))
    assert set(epl.delta_names) - set(no_eval2.delta_names) == {"DLitEval2", "DAddEval2", "DNegEval2"}
    assert project(epl, F.TRUE) is epl
    assert len(no_neg.order) == 3 and no_neg.base == epl.base and no_neg.features == epl.features


def test_projection_keeps_surviving_variants(epl):
    keep = F.Not(F.Atom("Neg"))
    projected = project(epl, keep)
    verdict = check_equivalence(epl, projected)
    assert not verdict.equivalent
    missing = {p for p, _ in verdict.witnesses}
    assert missing == {p for p in enumerate_products(epl) if "Neg" in p}


def test_remove_empty_deltas(epl):
    dec = refactor_decreasing(epl)
    cleaned = remove_empty_deltas(dec)
    # 8 emptied originals plus 10 fresh modules that never received an operation
    assert len(dec.deltas) - len(cleaned.deltas) == 18
    assert check_equivalence(dec, cleaned).equivalent
    assert remove_empty_deltas(epl) is epl
    only_empty = parse_spl("features A; base { } delta D when A { } order D;")
    cleaned = remove_empty_deltas(only_empty)
    assert cleaned.deltas == () and cleaned.order == ()


def test_count_ops(epl):
    assert count_ops(epl) == 12
    assert count_ops(epl, Op.REMOVES) == 1
