"""Mutable working copy of a product line used by the refactoring passes."""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional

from .. import formula as F
from ..model import ADO, DeltaModule, Program, ProductLine


class FreshNamer:
    """Hands out delta names that never collide with taken or earlier ones."""

    def __init__(self, taken: Iterable[str] = ()):
        self.taken = set(taken)

    def fresh(self, stem: str) -> str:
        name, n = stem, 1
        while name in self.taken:
            n += 1
            name = f"{stem}_{n}"
        self.taken.add(name)
        return name


class Workspace:
    def __init__(self, pl: ProductLine):
        self.features = pl.features
        self.formula = pl.formula
        self.base: Program = pl.base
        self.modules: Dict[str, List[ADO]] = {d.name: list(d.ops) for d in pl.deltas}
        self.activation: Dict[str, F.Formula] = dict(pl.activation)
        self.order: List[List[str]] = [list(part) for part in pl.order]
        self.names = FreshNamer(self.modules)

    def exists(self, name: str) -> bool:
        return name in self.modules

    def index(self, name: str) -> int:
        for i, part in enumerate(self.order):
            if name in part:
                return i
        raise KeyError(name)

    def up(self) -> List[str]:
        return [n for part in self.order for n in sorted(part)]

    def before_down(self, name: str) -> List[str]:
        """Modules of earlier partitions, last partition first."""
        idx = self.index(name)
        return [n for part in reversed(self.order[:idx]) for n in sorted(part)]

    def remove_op(self, name: str, ado: ADO) -> None:
        self.modules[name].remove(ado)

    def delete(self, name: str) -> None:
        del self.modules[name]
        del self.activation[name]
        idx = self.index(name)
        self.order[idx].remove(name)
        if not self.order[idx]:
            del self.order[idx]

    def add_module(self, stem: str, ops: List[ADO], cond: F.Formula, *,
                   partition: Optional[int] = None, insert_at: Optional[int] = None) -> str:
        """Create a module either inside ``partition`` or in a new partition
        inserted at position ``insert_at``."""
        name = self.names.fresh(stem)
        self.modules[name] = list(ops)
        self.activation[name] = cond
        if partition is not None:
            self.order[partition].append(name)
        else:
            self.order.insert(insert_at, [name])
        return name

    def to_pl(self) -> ProductLine:
        return ProductLine(
            self.features,
            self.formula,
            self.base,
            tuple(DeltaModule(n, tuple(ops)) for n, ops in self.modules.items()),
            dict(self.activation),
            tuple(tuple(part) for part in self.order),
        )
