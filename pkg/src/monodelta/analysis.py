"""Order linearization, monotonicity classification, projection and cleanup."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Tuple

from . import formula as F
from .model import ADO, ModifyKind, Op, ProductLine, SplError, classify_method_modifies


class UnknownDeltaError(SplError, KeyError):
    def __str__(self):
        return f"unknown delta module {self.args[0]}"


def _positions(pl: ProductLine, names: Iterable[str]) -> List[Tuple[int, str]]:
    index = pl.partition_index()
    out = []
    for n in names:
        if n not in index:
            raise UnknownDeltaError(n)
        out.append((index[n], n))
    return out


def linearize_up(pl: ProductLine, names: Iterable[str]) -> List[str]:
    """Names sorted by partition, ties broken by name."""
    return [n for _, n in sorted(_positions(pl, names))]


def linearize_down(pl: ProductLine, names: Iterable[str]) -> List[str]:
    """Partitions in reverse, names still ascending inside a partition."""
    return [n for _, n in sorted(_positions(pl, names), key=lambda p: (-p[0], p[1]))]


def before(pl: ProductLine, name: str) -> set:
    """Delta names whose partition precedes the partition of ``name``."""
    (idx, _), = _positions(pl, [name])
    return {n for part in pl.order[:idx] for n in part}


# ---------------------------------------------------------------------------
# Monotonicity

CLASSES = (
    "strictly-increasing",
    "increasing",
    "pseudo-increasing",
    "strictly-decreasing",
    "decreasing",
    "pseudo-decreasing",
    "readd-strictly-decreasing",
    "readd-decreasing",
    "readd-pseudo-decreasing",
)


def op_kind(ado: ADO) -> str:
    """adds / removes / readds / wraps / voids / modifies (plain or extends)."""
    if ado.op is Op.MODIFIES:
        if ado.ref.attr is not None and isinstance(ado.data, str):
            return "modifies"
        kind = classify_method_modifies(ado)
        return "modifies" if kind is ModifyKind.PLAIN else kind.value
    return ado.op.value


_ALLOWED = {
    "strictly-increasing": {"adds"},
    "increasing": {"adds", "wraps"},
    "pseudo-increasing": {"adds", "wraps", "voids", "modifies", "readds"},
    "strictly-decreasing": {"removes"},
    "decreasing": {"removes", "voids"},
    "pseudo-decreasing": {"removes", "wraps", "voids", "modifies"},
    "readd-strictly-decreasing": {"removes", "readds"},
    "readd-decreasing": {"removes", "readds", "voids"},
    "readd-pseudo-decreasing": {"removes", "readds", "wraps", "voids", "modifies"},
}


@dataclass
class MonotonicityReport:
    flags: Dict[str, bool]
    violations: Dict[str, List[Tuple[str, ADO]]] = field(default_factory=dict)

    def __getitem__(self, name: str) -> bool:
        return self.flags[name]

    def holds(self) -> List[str]:
        return [c for c in CLASSES if self.flags[c]]

    def to_dict(self) -> dict:
        return {
            c: {
                "holds": self.flags[c],
                "violations": [
                    {"delta": d, "op": o.op.value, "ref": str(o.ref), "kind": op_kind(o)}
                    for d, o in self.violations.get(c, [])
                ],
            }
            for c in CLASSES
        }

    def to_text(self) -> str:
        lines = []
        for c in CLASSES:
            if self.flags[c]:
                lines.append(f"{c}: yes")
            else:
                first = self.violations[c][0]
                more = len(self.violations[c]) - 1
                extra = f" (+{more} more)" if more else ""
                lines.append(f"{c}: no, {op_kind(first[1])} {first[1].ref} in {first[0]}{extra}")
        return "\n".join(lines)


def classify(pl: ProductLine) -> MonotonicityReport:
    """Evaluate all nine monotonicity classes over every delta operation.

    ``readds`` is not a removes, so it does not by itself break
    pseudo-increasing monotonicity.
    """
    flags = {}
    violations: Dict[str, List[Tuple[str, ADO]]] = {}
    kinds = [(d, o, op_kind(o)) for d, o in pl.all_ops()]
    for c in CLASSES:
        bad = [(d, o) for d, o, k in kinds if k not in _ALLOWED[c]]
        flags[c] = not bad
        if bad:
            violations[c] = bad
    return MonotonicityReport(flags, violations)


# ---------------------------------------------------------------------------
# Projection and cleanup


def drop_deltas(pl: ProductLine, dropped: set) -> ProductLine:
    """Remove the named deltas with their activations and order entries."""
    if not dropped:
        return pl
    order = tuple(
        tuple(n for n in part if n not in dropped) for part in pl.order
    )
    return ProductLine(
        pl.features,
        pl.formula,
        pl.base,
        tuple(d for d in pl.deltas if d.name not in dropped),
        {n: f for n, f in pl.activation.items() if n not in dropped},
        tuple(p for p in order if p),
    )


def project(pl: ProductLine, keep: F.Formula) -> ProductLine:
    """Restrict to the products satisfying ``keep`` and drop dead deltas."""
    unknown = sorted(keep.atoms() - set(pl.features))
    if unknown:
        raise SplError(f"unknown feature {unknown[0]} in projection formula")
    if keep == F.TRUE:
        return pl
    formula = F.And(pl.formula, keep)
    products = F.models(formula, pl.features)
    dead = set()
    for d in pl.deltas:
        check = F.compile_formula(pl.activation[d.name])
        if not any(check(p) for p in products):
            dead.add(d.name)
    projected = drop_deltas(pl, dead)
    return ProductLine(
        projected.features, formula, projected.base, projected.deltas,
        projected.activation, projected.order,
    )


def remove_empty_deltas(pl: ProductLine) -> ProductLine:
    return drop_deltas(pl, {d.name for d in pl.deltas if not d.ops})


def count_ops(pl: ProductLine, op: Op = None) -> int:
    return sum(1 for _, o in pl.all_ops() if op is None or o.op is op)
