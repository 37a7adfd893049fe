"""Measurements shared by the property and acceptance tests."""
from collections import Counter

from monodelta.analysis import count_ops, op_kind
from monodelta.model import ClassDecl, MethodDecl, Op, dom


def modify_kinds(pl):
    return [op_kind(o) for _, o in pl.all_ops() if o.op is Op.MODIFIES]


def expected_class(pl, direction):
    kinds = modify_kinds(pl)
    strict, plain, pseudo = (
        ("strictly-increasing", "increasing", "pseudo-increasing")
        if direction == "inc"
        else ("readd-strictly-decreasing", "readd-decreasing", "readd-pseudo-decreasing")
    )
    if not kinds:
        return strict
    neutral = "wraps" if direction == "inc" else "voids"
    return plain if all(k == neutral for k in kinds) else pseudo


def increasing_bound_holds(before, after):
    return count_ops(after) <= count_ops(before) + count_ops(before, Op.REMOVES)


def element_count(pl):
    """adds count one per element of their domain; every other op counts once."""
    return sum(len(dom(o)) if o.op is Op.ADDS else 1 for _, o in pl.all_ops())


def decreasing_bound_holds(before, after):
    return element_count(after) <= element_count(before)


def method_bodies(pl):
    seen = Counter()

    def visit(attr):
        if isinstance(attr, MethodDecl):
            seen[(attr.body, attr.result)] += 1

    for cls in pl.base.classes:
        for a in cls.attrs:
            visit(a)
    for _, o in pl.all_ops():
        if isinstance(o.data, ClassDecl):
            for a in o.data.attrs:
                visit(a)
        else:
            visit(o.data)
    return seen


def bodies_not_duplicated(before, after):
    """Every method body occurs in ``after`` at most as often as in ``before``."""
    old = method_bodies(before)
    return all(n <= old[body] for body, n in method_bodies(after).items())
