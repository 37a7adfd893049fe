"""Variant generation: products, delta activation and delta application."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import AbstractSet, FrozenSet, Iterable, List, Optional, Tuple

from . import formula as F
from .analysis import linearize_up
from .model import (
    ADO,
    EXTENDS,
    ClassDecl,
    Expr,
    ExprStmt,
    FieldAccess,
    FieldAssign,
    LocalDecl,
    MethodCall,
    MethodDecl,
    Op,
    OriginalCall,
    Program,
    ProductLine,
    Ref,
    SplError,
    Var,
    Cast,
    BinOp,
    aux_name,
    comparable,
    is_aux_of,
    superclass_cycle,
)

Product = FrozenSet[str]


class InvalidProductError(SplError):
    pass


class GenerationError(SplError):
    """A delta operation that cannot be applied to the current program."""

    KINDS = ("add-existing", "remove-missing", "modify-missing", "extends-cycle")

    def __init__(self, kind: str, ref: Ref, delta: Optional[str] = None, product: Optional[Product] = None):
        self.kind = kind
        self.ref = ref
        self.delta = delta
        self.product = product
        super().__init__(self._message())

    def _message(self) -> str:
        msg = f"{self.kind} at {self.ref}"
        if self.delta is not None:
            msg += f" in delta {self.delta}"
        if self.product is not None:
            msg += f" for product {{{', '.join(sorted(self.product))}}}"
        return msg

    def tagged(self, delta: str, product: Product) -> "GenerationError":
        return GenerationError(self.kind, self.ref, delta, product)

    @property
    def signature(self) -> Tuple[str, Ref]:
        """What two errors must share to count as the same behavior."""
        return (self.kind, self.ref)


@dataclass(frozen=True)
class Variant:
    program: Program
    product: Product


def enumerate_products(pl: ProductLine) -> List[Product]:
    return list(F.models(pl.formula, pl.features))


def is_product(pl: ProductLine, p: AbstractSet[str]) -> bool:
    return set(p) <= set(pl.features) and F.compile_formula(pl.formula)(p)


def activated_deltas(pl: ProductLine, p: AbstractSet[str]) -> List[str]:
    if not is_product(pl, p):
        raise InvalidProductError(f"{{{', '.join(sorted(p))}}} is not a product of this product line")
    active = [n for n in pl.delta_names if F.compile_formula(pl.activation[n])(p)]
    return linearize_up(pl, active)


# ---------------------------------------------------------------------------
# Applying operations


def _replace_class(prog: Program, new: ClassDecl) -> Program:
    return Program(tuple(new if c.name == new.name else c for c in prog.classes))


def _without_method(attrs: Tuple, name: str) -> Tuple:
    """Drop an attribute together with the auxiliary methods of its wraps."""
    return tuple(a for a in attrs if a.name != name and not is_aux_of(a.name, name))


def _rewrite_original(e: Expr, aux: str) -> Expr:
    if isinstance(e, OriginalCall):
        return MethodCall(Var("this"), aux, tuple(_rewrite_original(a, aux) for a in e.args))
    if isinstance(e, FieldAccess):
        return FieldAccess(_rewrite_original(e.target, aux), e.name)
    if isinstance(e, MethodCall):
        return MethodCall(_rewrite_original(e.target, aux), e.name, tuple(_rewrite_original(a, aux) for a in e.args))
    if isinstance(e, Cast):
        return Cast(e.cls, _rewrite_original(e.expr, aux))
    if isinstance(e, FieldAssign):
        return FieldAssign(_rewrite_original(e.target, aux), e.name, _rewrite_original(e.value, aux))
    if isinstance(e, BinOp):
        return BinOp(e.op, _rewrite_original(e.left, aux), _rewrite_original(e.right, aux))
    return e


def resolve_original(method: MethodDecl, aux: str) -> MethodDecl:
    body = tuple(
        LocalDecl(s.type, s.name, _rewrite_original(s.init, aux)) if isinstance(s, LocalDecl)
        else ExprStmt(_rewrite_original(s.expr, aux))
        for s in method.body
    )
    return MethodDecl(method.return_type, method.name, method.params, body, _rewrite_original(method.result, aux))


def _check_cycle(prog: Program, ref: Ref) -> Program:
    if superclass_cycle(prog) is not None:
        raise GenerationError("extends-cycle", ref)
    return prog


def apply_ado(ado: ADO, prog: Program) -> Program:
    """Apply one operation; raise :class:`GenerationError` when inapplicable.

    A wrapping modification keeps the previous body in an auxiliary method
    ``m$orig$k`` of the same class, with ``k`` one more than the number of
    auxiliaries ``m`` already has, and calls it in place of ``original``.
    Removing (or re-adding) a method discards its auxiliaries.
    """
    ref = ado.ref
    cls = prog.get(ref.cls)
    if ref.is_class:
        if ado.op is Op.ADDS:
            if cls is not None:
                raise GenerationError("add-existing", ref)
            return _check_cycle(Program(prog.classes + (ado.data,)), ref)
        if cls is None:
            raise GenerationError("remove-missing" if ado.op is Op.REMOVES else "modify-missing", ref)
        rest = tuple(c for c in prog.classes if c.name != ref.cls)
        if ado.op is Op.REMOVES:
            return Program(rest)
        if ado.op is Op.READDS:
            return _check_cycle(Program(rest + (ado.data,)), ref)
        raise GenerationError("modify-missing", ref)

    if cls is None:
        kind = "remove-missing" if ado.op is Op.REMOVES else "modify-missing"
        raise GenerationError(kind, Ref(ref.cls) if ado.op is Op.ADDS else ref)

    if ref.attr == EXTENDS:
        new = ClassDecl(cls.name, ado.data, cls.attrs)
        return _check_cycle(_replace_class(prog, new), ref)

    current = cls.attr(ref.attr)
    if ado.op is Op.ADDS:
        if current is not None:
            raise GenerationError("add-existing", ref)
        return _replace_class(prog, ClassDecl(cls.name, cls.superclass, cls.attrs + (ado.data,)))
    if ado.op is Op.REMOVES:
        if current is None:
            raise GenerationError("remove-missing", ref)
        return _replace_class(prog, ClassDecl(cls.name, cls.superclass, _without_method(cls.attrs, ref.attr)))
    if ado.op is Op.READDS:
        if current is None:
            raise GenerationError("remove-missing", ref)
        attrs = _without_method(cls.attrs, ref.attr) + (ado.data,)
        return _replace_class(prog, ClassDecl(cls.name, cls.superclass, attrs))
    # modifies a method
    if not isinstance(current, MethodDecl):
        raise GenerationError("modify-missing", ref)
    new_method: MethodDecl = ado.data
    attrs = cls.attrs
    if new_method.calls_original():
        k = 1 + sum(1 for a in attrs if is_aux_of(a.name, ref.attr))
        aux = aux_name(ref.attr, k)
        saved = MethodDecl(current.return_type, aux, current.params, current.body, current.result)
        new_method = resolve_original(new_method, aux)
        attrs = attrs + (saved,)
    attrs = tuple(new_method if a.name == ref.attr else a for a in attrs)
    return _replace_class(prog, ClassDecl(cls.name, cls.superclass, attrs))


def _group(ado: ADO) -> int:
    if ado.ref.is_class:
        return 0 if ado.op is Op.REMOVES else 1
    return 2


def application_sequence(ops: Iterable[ADO]) -> List[ADO]:
    """Intra-module order: class removals, class additions, then attributes."""
    return sorted(ops, key=lambda o: (_group(o), o.ref.sort_key()))


class Generator:
    """Precomputed per-product-line state for generating many variants."""

    def __init__(self, pl: ProductLine):
        self.pl = pl
        self._formula = F.compile_formula(pl.formula)
        names = linearize_up(pl, pl.delta_names)
        self._steps = [
            (n, F.compile_formula(pl.activation[n]), application_sequence(pl.delta(n).ops))
            for n in names
        ]

    def activated(self, p: AbstractSet[str]) -> List[str]:
        return [n for n, cond, _ in self._steps if cond(p)]

    def generate(self, p: AbstractSet[str]) -> Variant:
        p = frozenset(p)
        if not (p <= set(self.pl.features) and self._formula(p)):
            raise InvalidProductError(f"{{{', '.join(sorted(p))}}} is not a product of this product line")
        prog = self.pl.base
        for name, cond, ops in self._steps:
            if not cond(p):
                continue
            for o in ops:
                try:
                    prog = apply_ado(o, prog)
                except GenerationError as exc:
                    raise exc.tagged(name, p) from None
        return Variant(prog, p)


def generate_variant(pl: ProductLine, p: AbstractSet[str]) -> Variant:
    return Generator(pl).generate(p)


# ---------------------------------------------------------------------------
# Unambiguity


@dataclass(frozen=True)
class Conflict:
    partition: int
    first: str
    second: str
    refs: Tuple[Tuple[Ref, Ref], ...]

    def __str__(self):
        pairs = ", ".join(f"{a}/{b}" if a != b else str(a) for a, b in self.refs)
        return f"partition {self.partition}: {self.first} and {self.second} both touch {pairs}"


@dataclass
class AmbiguityReport:
    conflicts: List[Conflict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.conflicts

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {
            "unambiguous": self.ok,
            "conflicts": [
                {
                    "partition": c.partition,
                    "modules": [c.first, c.second],
                    "refs": [[str(a), str(b)] for a, b in c.refs],
                }
                for c in self.conflicts
            ],
        }


def check_unambiguity(pl: ProductLine) -> AmbiguityReport:
    """Modules of one partition that can be active together must not touch
    comparable references."""
    products = F.models(pl.formula, pl.features)
    active = {
        n: frozenset(i for i, p in enumerate(products) if F.compile_formula(pl.activation[n])(p))
        for n in pl.delta_names
    }
    report = AmbiguityReport()
    for idx, part in enumerate(pl.order):
        names = sorted(part)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                if not (active[a] & active[b]):
                    continue
                clashes = tuple(
                    (ra, rb)
                    for ra in pl.delta(a).refs()
                    for rb in pl.delta(b).refs()
                    if comparable(ra, rb)
                )
                if clashes:
                    report.conflicts.append(Conflict(idx, a, b, clashes))
    return report
