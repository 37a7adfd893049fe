"""Refactoring towards increasing monotonicity: eliminate every removes."""
from __future__ import annotations

from typing import Set

from .. import formula as F
from ..generation import apply_ado
from ..model import ADO, ClassDecl, Op, ProductLine, Ref, leq, validate
from .workspace import Workspace


def refactor_increasing(pl: ProductLine) -> ProductLine:
    """Return an equivalent product line without removes operations.

    Each removes of ``el`` in ``d1`` is cancelled: earlier operations on
    ``el`` move to fresh modules that only fire when ``d1`` does not, and a
    base declaration of ``el`` moves to a fresh module guarded by ``!d1``.
    """
    validate(pl)
    ws = Workspace(pl)
    for d1 in ws.up():
        if not ws.exists(d1):
            continue
        for ado1 in list(ws.modules[d1]):
            if ado1.op is Op.REMOVES:
                ws.remove_op(d1, ado1)
                manage_operation_inc(ws, d1, ado1)
    return ws.to_pl()


def _declares_inside(ado2: ADO, ref: Ref) -> bool:
    """Whether ``ado2`` introduces class ``C`` together with attribute ``ref = C.a``."""
    return (
        not ref.is_class
        and ado2.ref == Ref(ref.cls)
        and ado2.op in (Op.ADDS, Op.READDS)
        and ado2.data.attr(ref.attr) is not None
    )


def manage_operation_inc(ws: Workspace, d1: str, ado1: ADO) -> None:
    S: Set[str] = set()
    for d2 in ws.before_down(d1):
        for ado2 in list(ws.modules.get(d2, ())):
            if leq(ado1.ref, ado2.ref):
                merge_operations_inc(ws, d1, ado1, d2, ado2, S)
            elif _declares_inside(ado2, ado1.ref):
                split_class_add(ws, d1, ado1, d2, ado2, S)
    merge_to_base_inc(ws, d1, ado1, S)


def _guard(ws: Workspace, d2: str, d1: str) -> F.Formula:
    return F.And(ws.activation[d2], F.Not(ws.activation[d1]))


def merge_operations_inc(ws: Workspace, d1: str, ado1: ADO, d2: str, ado2: ADO, S: Set[str]) -> None:
    S.add(d2)
    ws.remove_op(d2, ado2)
    fresh = ws.add_module(f"{d2}_{d1}", [ado2], _guard(ws, d2, d1), partition=ws.index(d2))
    S.add(fresh)
    if not ws.modules[d2]:
        ws.delete(d2)


def split_class_add(ws: Workspace, d1: str, ado1: ADO, d2: str, ado2: ADO, S: Set[str]) -> None:
    """``ado1`` removes ``C.a`` while the earlier ``ado2`` adds class ``C``
    with ``a`` inside: only the attribute becomes conditional on ``!d1``.

    The attribute goes to a fresh module in a new partition right after
    ``d2`` so it is added once the class exists.
    """
    name = ado1.ref.attr
    cls: ClassDecl = ado2.data
    trimmed = ClassDecl(cls.name, cls.superclass, tuple(a for a in cls.attrs if a.name != name))
    ops = ws.modules[d2]
    ops[ops.index(ado2)] = ADO(ado2.op, ado2.ref, trimmed)
    moved = ADO(Op.ADDS, ado1.ref, cls.attr(name))
    fresh = ws.add_module(f"{d2}_{d1}", [moved], _guard(ws, d2, d1), insert_at=ws.index(d2) + 1)
    S.update((d2, fresh))


def merge_to_base_inc(ws: Workspace, d1: str, ado1: ADO, S: Set[str]) -> None:
    data = ws.base.lookup(ado1.ref)
    if data is None:
        return
    ws.base = apply_ado(ado1, ws.base)
    live = [ws.index(n) for n in S if ws.exists(n)]
    at = min(live) if live else 0
    ws.add_module(f"DNot{d1}", [ADO(Op.ADDS, ado1.ref, data)], F.Not(ws.activation[d1]), insert_at=at)
