"""Data model: IFJ programs, references, abstract delta operations, product lines.

Every value here is immutable.  Collections are tuples so that structural
equality (``==``) is the comparison used throughout the package, in
particular by the round-trip and oracle checks.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, Mapping, Optional, Tuple, Union

from .formula import Formula

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

EXTENDS = "extends"
"""Attribute token standing for a class's ``extends`` clause in references."""

AUX_MARKER = "$orig$"
"""Infix of auxiliary methods holding the previous body of a wrapped method."""


class SplError(Exception):
    """Base class of every error raised by this package."""


class ValidationError(SplError):
    pass


class AbsentReferenceError(SplError, LookupError):
    pass


class MisuseError(SplError, ValueError):
    pass


# ---------------------------------------------------------------------------
# Expressions and statements


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class FieldAccess(Expr):
    target: Expr
    name: str


@dataclass(frozen=True)
class MethodCall(Expr):
    target: Expr
    name: str
    args: Tuple[Expr, ...] = ()


@dataclass(frozen=True)
class OriginalCall(Expr):
    args: Tuple[Expr, ...] = ()


@dataclass(frozen=True)
class New(Expr):
    cls: str


@dataclass(frozen=True)
class Cast(Expr):
    cls: str
    expr: Expr


@dataclass(frozen=True)
class FieldAssign(Expr):
    target: Expr
    name: str
    value: Expr


@dataclass(frozen=True)
class Null(Expr):
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class StrLit(Expr):
    value: str


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of "+", "-", "*"
    left: Expr
    right: Expr


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr


@dataclass(frozen=True)
class LocalDecl:
    type: str
    name: str
    init: Expr


Stmt = Union[ExprStmt, LocalDecl]


def subexpressions(expr: Expr) -> Iterator[Expr]:
    """Pre-order walk over ``expr`` and everything nested in it."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (FieldAccess,)):
            stack.append(node.target)
        elif isinstance(node, MethodCall):
            stack.append(node.target)
            stack.extend(node.args)
        elif isinstance(node, OriginalCall):
            stack.extend(node.args)
        elif isinstance(node, Cast):
            stack.append(node.expr)
        elif isinstance(node, FieldAssign):
            stack.append(node.target)
            stack.append(node.value)
        elif isinstance(node, BinOp):
            stack.append(node.left)
            stack.append(node.right)


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class FieldDecl:
    type: str
    name: str


@dataclass(frozen=True)
class MethodDecl:
    return_type: str
    name: str
    params: Tuple[Tuple[str, str], ...]
    body: Tuple[Stmt, ...]
    result: Expr

    def expressions(self) -> Iterator[Expr]:
        for stmt in self.body:
            yield from subexpressions(stmt.expr if isinstance(stmt, ExprStmt) else stmt.init)
        yield from subexpressions(self.result)

    def calls_original(self) -> bool:
        return any(isinstance(e, OriginalCall) for e in self.expressions())


AttrDecl = Union[FieldDecl, MethodDecl]


@dataclass(frozen=True)
class ClassDecl:
    name: str
    superclass: str
    attrs: Tuple[AttrDecl, ...] = ()

    def attr(self, name: str) -> Optional[AttrDecl]:
        for a in self.attrs:
            if a.name == name:
                return a
        return None

    def shell(self) -> "ClassDecl":
        return ClassDecl(self.name, self.superclass, ())


@dataclass(frozen=True)
class Program:
    classes: Tuple[ClassDecl, ...] = ()

    def get(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def lookup(self, ref: "Ref"):
        """Declaration payload at ``ref``, or ``None`` when undeclared.

        A class reference yields the whole class, an attribute reference the
        attribute declaration, and ``C.extends`` the superclass name.
        """
        cls = self.get(ref.cls)
        if cls is None or ref.attr is None:
            return cls
        if ref.attr == EXTENDS:
            return cls.superclass
        return cls.attr(ref.attr)

    def refs(self) -> FrozenSet["Ref"]:
        """References declared by the program (class names and attributes)."""
        out = set()
        for c in self.classes:
            out.add(Ref(c.name))
            out.update(Ref(c.name, a.name) for a in c.attrs)
        return frozenset(out)


# ---------------------------------------------------------------------------
# References and abstract delta operations


@dataclass(frozen=True, order=True)
class Ref:
    """A class name (``attr is None``) or a qualified attribute name."""

    cls: str
    attr: Optional[str] = None

    @property
    def is_class(self) -> bool:
        return self.attr is None

    def sort_key(self) -> Tuple[str, str]:
        return (self.cls, self.attr or "")

    def __str__(self) -> str:
        return self.cls if self.attr is None else f"{self.cls}.{self.attr}"


def leq(a: Ref, b: Ref) -> bool:
    """Prefix order on references: ``C <= C.a`` and ``r <= r``."""
    if a == b:
        return True
    return a.attr is None and b.attr is not None and a.cls == b.cls


def comparable(a: Ref, b: Ref) -> bool:
    return leq(a, b) or leq(b, a)


class Op(str, enum.Enum):
    ADDS = "adds"
    REMOVES = "removes"
    MODIFIES = "modifies"
    READDS = "readds"

    def __str__(self) -> str:
        return self.value


Payload = Union[ClassDecl, FieldDecl, MethodDecl, str, None]


@dataclass(frozen=True)
class ADO:
    op: Op
    ref: Ref
    data: Payload = None

    def __post_init__(self):
        check_ado(self)

    def __str__(self) -> str:
        return f"({self.op.value}, {self.ref})"


def check_ado(ado: ADO) -> None:
    """Raise :class:`ValidationError` when the payload does not fit (op, ref)."""
    op, ref, data = ado.op, ado.ref, ado.data
    if op is Op.REMOVES:
        if data is not None:
            raise ValidationError(f"removes {ref} carries a payload")
        if ref.attr == EXTENDS:
            raise ValidationError(f"cannot remove {ref}")
        return
    if op is Op.MODIFIES:
        if ref.is_class:
            raise ValidationError(f"modifies on class reference {ref}")
        if ref.attr == EXTENDS:
            if not isinstance(data, str):
                raise ValidationError(f"modifies {ref} needs a superclass name")
        elif not isinstance(data, MethodDecl) or data.name != ref.attr:
            raise ValidationError(f"modifies {ref} needs a method named {ref.attr}")
        return
    # adds / readds
    if ref.is_class:
        if not isinstance(data, ClassDecl) or data.name != ref.cls:
            raise ValidationError(f"{op.value} {ref} needs a class declaration named {ref.cls}")
    elif ref.attr == EXTENDS:
        raise ValidationError(f"{op.value} {ref} is not a valid operation")
    elif not isinstance(data, (FieldDecl, MethodDecl)) or data.name != ref.attr:
        raise ValidationError(f"{op.value} {ref} needs an attribute named {ref.attr}")


class ModifyKind(str, enum.Enum):
    WRAPS = "wraps"
    VOIDS = "voids"
    PLAIN = "plain"


def classify_method_modifies(ado: ADO) -> ModifyKind:
    """Tell wraps (calls ``original``), voids (``return null``) and plain apart."""
    if ado.op is not Op.MODIFIES or not isinstance(ado.data, MethodDecl):
        raise MisuseError(f"{ado} is not a method modification")
    method = ado.data
    if method.calls_original():
        return ModifyKind.WRAPS
    if not method.body and method.result == Null():
        return ModifyKind.VOIDS
    return ModifyKind.PLAIN


def dom(ado: ADO) -> Tuple[Ref, ...]:
    """References declared by ``ado``; class first, then attributes in order.

    A ``removes`` declares nothing, so its domain is empty.
    """
    if ado.op is Op.REMOVES:
        return ()
    if ado.ref.is_class and isinstance(ado.data, ClassDecl):
        c = ado.data
        return (Ref(c.name),) + tuple(Ref(c.name, a.name) for a in c.attrs)
    return (ado.ref,)


def data_at(ado: ADO, ref: Ref) -> Payload:
    """Declaration that ``ado`` provides for ``ref`` (a class yields its shell)."""
    if ref not in dom(ado):
        raise AbsentReferenceError(f"{ref} is not declared by {ado}")
    if ado.ref == ref:
        if isinstance(ado.data, ClassDecl):
            return ado.data.shell()
        return ado.data
    assert isinstance(ado.data, ClassDecl)
    return ado.data.attr(ref.attr)


def decompose(ado: ADO) -> Tuple[Tuple[Ref, Payload], ...]:
    """Element-level view of an adds: ``(ref, payload)`` for each declared ref."""
    return tuple((r, data_at(ado, r)) for r in dom(ado))


# ---------------------------------------------------------------------------
# Delta modules and product lines


@dataclass(frozen=True)
class DeltaModule:
    name: str
    ops: Tuple[ADO, ...] = ()

    def refs(self) -> Tuple[Ref, ...]:
        return tuple(o.ref for o in self.ops)


@dataclass(frozen=True)
class ProductLine:
    features: Tuple[str, ...]
    formula: Formula
    base: Program
    deltas: Tuple[DeltaModule, ...] = ()
    activation: Mapping[str, Formula] = field(default_factory=dict)
    order: Tuple[Tuple[str, ...], ...] = ()

    # activation is a dict, so instances are deliberately unhashable
    __hash__ = None  # type: ignore[assignment]

    def delta(self, name: str) -> DeltaModule:
        for d in self.deltas:
            if d.name == name:
                return d
        raise KeyError(name)

    @property
    def delta_names(self) -> Tuple[str, ...]:
        return tuple(d.name for d in self.deltas)

    def partition_index(self) -> Dict[str, int]:
        return {name: i for i, part in enumerate(self.order) for name in part}

    def all_ops(self) -> Iterator[Tuple[str, ADO]]:
        for d in self.deltas:
            for o in d.ops:
                yield d.name, o


def validate_program(program: Program, where: str = "program") -> None:
    seen = set()
    for c in program.classes:
        if c.name in seen:
            raise ValidationError(f"duplicate class {c.name} in {where}")
        seen.add(c.name)
        validate_class(c)
    check_acyclic(program)


def validate_class(c: ClassDecl) -> None:
    names = set()
    for a in c.attrs:
        if a.name in names:
            raise ValidationError(f"duplicate attribute {c.name}.{a.name}")
        names.add(a.name)


def superclass_cycle(program: Program) -> Optional[str]:
    """Name of a class on an ``extends`` cycle, or ``None``."""
    parent = {c.name: c.superclass for c in program.classes}
    for start in parent:
        seen = {start}
        cur = parent[start]
        while cur in parent:
            if cur in seen:
                return cur
            seen.add(cur)
            cur = parent[cur]
    return None


def check_acyclic(program: Program) -> None:
    culprit = superclass_cycle(program)
    if culprit is not None:
        raise ValidationError(f"cyclic extends relation through class {culprit}")


def validate(pl: ProductLine) -> None:
    """Check the product-line invariants that do not need product enumeration."""
    for name in pl.features:
        if not IDENT.match(name):
            raise ValidationError(f"bad feature name {name!r}")
    if len(set(pl.features)) != len(pl.features):
        raise ValidationError("duplicate feature name")
    declared = set(pl.features)
    _check_atoms(pl.formula, declared, "constraint")
    validate_program(pl.base, "base program")
    names = pl.delta_names
    if len(set(names)) != len(names):
        raise ValidationError("duplicate delta module name")
    for d in pl.deltas:
        refs = d.refs()
        if len(set(refs)) != len(refs):
            raise ValidationError(f"delta {d.name} targets a reference twice")
        if d.name not in pl.activation:
            raise ValidationError(f"delta {d.name} has no activation condition")
        _check_atoms(pl.activation[d.name], declared, f"activation of {d.name}")
    if set(pl.activation) != set(names):
        raise ValidationError("activation conditions for undeclared deltas")
    ordered = [n for part in pl.order for n in part]
    if any(not part for part in pl.order):
        raise ValidationError("empty partition in application order")
    if len(ordered) != len(set(ordered)) or set(ordered) != set(names):
        raise ValidationError("application order must cover each delta module exactly once")


def _check_atoms(formula: Formula, declared, where: str) -> None:
    unknown = sorted(formula.atoms() - declared)
    if unknown:
        raise ValidationError(f"unknown feature {unknown[0]} in {where}")


def aux_name(method: str, k: int) -> str:
    return f"{method}{AUX_MARKER}{k}"


def is_aux_of(attr_name: str, method: str) -> bool:
    return attr_name.startswith(method + AUX_MARKER)
