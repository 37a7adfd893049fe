"""Refactoring towards decreasing monotonicity: eliminate every adds."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Set, Tuple

from .. import formula as F
from ..model import (
    ADO,
    EXTENDS,
    ClassDecl,
    Op,
    Payload,
    Program,
    ProductLine,
    Ref,
    SplError,
    decompose,
    validate,
)
from .workspace import Workspace


class RefactoringError(SplError):
    """Internal invariant broken while refactoring (input was not error-free)."""


@dataclass(frozen=True)
class ElementDecomposition:
    """Element-level view of one adds: the class shell first, then attributes."""

    elements: Tuple[Tuple[Ref, Payload], ...]

    @classmethod
    def of(cls, ado: ADO) -> "ElementDecomposition":
        return cls(decompose(ado))

    def refs(self) -> Tuple[Ref, ...]:
        return tuple(r for r, _ in self.elements)

    def __iter__(self) -> Iterator[Tuple[Ref, Payload]]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


def refactor_decreasing(pl: ProductLine) -> ProductLine:
    """Return an equivalent product line without adds operations.

    Everything added by a delta is merged into the base program; fresh
    modules re-add (readds) what the delta would have overwritten and remove
    what the delta would not have added.
    """
    validate(pl)
    ws = Workspace(pl)
    for d1 in ws.up():
        if not ws.exists(d1):
            continue
        for ado1 in list(ws.modules[d1]):
            if ado1.op is Op.ADDS:
                ws.remove_op(d1, ado1)
                manage_operation_dec(ws, d1, ado1)
    return ws.to_pl()


def _hint(ref: Ref) -> str:
    if ref.is_class:
        return ref.cls
    return ref.cls + ref.attr[:1].upper() + ref.attr[1:]


def _stale_attrs(base: Program, ado1: ADO) -> List[Ref]:
    """Attributes of a class that ``ado1`` adds again but does not redeclare."""
    if not (ado1.ref.is_class and base.get(ado1.ref.cls) is not None):
        return []
    keep = {a.name for a in ado1.data.attrs}
    old = base.get(ado1.ref.cls)
    return [Ref(old.name, a.name) for a in old.attrs if a.name not in keep]


def manage_operation_dec(ws: Workspace, d1: str, ado1: ADO) -> None:
    elements = ElementDecomposition.of(ado1)
    targets = set(elements.refs()) | set(_stale_attrs(ws.base, ado1))
    for d2 in ws.before_down(d1):
        for ado2 in list(ws.modules.get(d2, ())):
            if ado2.op is Op.REMOVES and ado2.ref in targets:
                merge_operations_dec(ws, d1, d2, ado2)
    merge_to_base_dec(ws, d1, ado1)


def merge_operations_dec(ws: Workspace, d1: str, d2: str, ado2: ADO) -> None:
    ws.remove_op(d2, ado2)
    cond = F.And(ws.activation[d2], F.Not(ws.activation[d1]))
    ws.add_module(f"{d2}_{d1}", [ado2], cond, partition=ws.index(d2))
    if not ws.modules[d2]:
        ws.delete(d2)


def _complete(base: Program, ref: Ref, payload: Payload) -> Program:
    if ref.is_class:
        return Program(base.classes + (payload,))
    cls = base.get(ref.cls)
    if cls is None:
        raise RefactoringError(f"cannot merge {ref} into the base: class {ref.cls} is never declared before it")
    grown = ClassDecl(cls.name, cls.superclass, cls.attrs + (payload,))
    return Program(tuple(grown if c.name == cls.name else c for c in base.classes))


def merge_to_base_dec(ws: Workspace, d1: str, ado1: ADO) -> None:
    """Complete the base with what ``ado1`` declares, then add the readd
    module (guarded by ``d1``) and the remove module (guarded by ``!d1``).

    When ``ado1`` adds a class the base already has, the readd module also
    drops the attributes the new class lacks and resets its superclass
    (when it differs from the base or an earlier module changes it), so the
    result matches a freshly added class.  The readd module sits in a new
    partition just before ``d1`` so the rest of ``d1`` still sees the
    elements it expects.  The remove module goes into a
    new first partition: the elements it removes are never present before
    ``d1`` in the original product line, and removing them up front keeps
    them out of the way of later class removals.
    """
    known = ws.base.refs()
    stale = _stale_attrs(ws.base, ado1)
    old_cls = ws.base.get(ado1.ref.cls)
    ext = Ref(ado1.ref.cls, EXTENDS)
    retargeted = any(o.ref == ext for n in ws.before_down(d1) for o in ws.modules[n])
    readd: List[ADO] = []
    remove: List[ADO] = []
    removed_classes: Set[str] = set()
    for ref, payload in ElementDecomposition.of(ado1):
        if ref in known:
            if not ref.is_class:
                readd.append(ADO(Op.READDS, ref, payload))
            elif retargeted or old_cls.superclass != payload.superclass:
                readd.append(ADO(Op.MODIFIES, ext, payload.superclass))
            continue
        ws.base = _complete(ws.base, ref, payload)
        if ref.is_class:
            removed_classes.add(ref.cls)
            remove.append(ADO(Op.REMOVES, ref))
        elif ref.cls not in removed_classes:
            remove.append(ADO(Op.REMOVES, ref))
    readd.extend(ADO(Op.REMOVES, r) for r in stale)
    hint = _hint(ado1.ref)
    ws.add_module(f"Dreadd{hint}_{d1}", readd, ws.activation[d1], insert_at=ws.index(d1))
    ws.add_module(f"Drem{hint}_{d1}", remove, F.Not(ws.activation[d1]), insert_at=0)
