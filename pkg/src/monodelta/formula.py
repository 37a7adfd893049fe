"""Propositional formulas over feature names.

Formulas are immutable trees.  Satisfiability questions are answered by
exhaustive enumeration over the declared feature set, which is fine for the
desk-scale product lines this package targets (a couple of dozen features at
most).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import AbstractSet, Callable, FrozenSet, Iterable, Iterator, Sequence, Tuple, Union


class Formula:
    """Base class of formula nodes."""

    __slots__ = ()

    def evaluate(self, selected: AbstractSet[str]) -> bool:
        raise NotImplementedError

    def atoms(self) -> FrozenSet[str]:
        raise NotImplementedError

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def evaluate(self, selected):
        return self.value

    def atoms(self):
        return frozenset()


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def evaluate(self, selected):
        return self.name in selected

    def atoms(self):
        return frozenset((self.name,))


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula

    def evaluate(self, selected):
        return not self.operand.evaluate(selected)

    def atoms(self):
        return self.operand.atoms()


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def evaluate(self, selected):
        return self.left.evaluate(selected) and self.right.evaluate(selected)

    def atoms(self):
        return self.left.atoms() | self.right.atoms()


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def evaluate(self, selected):
        return self.left.evaluate(selected) or self.right.evaluate(selected)

    def atoms(self):
        return self.left.atoms() | self.right.atoms()


TRUE = Const(True)
FALSE = Const(False)

FormulaLike = Union[Formula, bool, str]


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction; ``TRUE`` for no operands."""
    if not parts:
        return TRUE
    result = parts[0]
    for part in parts[1:]:
        result = And(result, part)
    return result


def disj(*parts: Formula) -> Formula:
    if not parts:
        return FALSE
    result = parts[0]
    for part in parts[1:]:
        result = Or(result, part)
    return result


def to_text(formula: Formula) -> str:
    """Render fully parenthesized, in the concrete syntax of ``.spl`` files."""
    if isinstance(formula, Const):
        return "true" if formula.value else "false"
    if isinstance(formula, Atom):
        return formula.name
    if isinstance(formula, Not):
        return "!" + to_text(formula.operand)
    if isinstance(formula, And):
        return f"({to_text(formula.left)} && {to_text(formula.right)})"
    if isinstance(formula, Or):
        return f"({to_text(formula.left)} || {to_text(formula.right)})"
    raise TypeError(f"not a formula: {formula!r}")


def compile_formula(formula: Formula) -> Callable[[AbstractSet[str]], bool]:
    """Return a fast predicate equivalent to ``formula.evaluate``."""
    return _compile(formula)


@lru_cache(maxsize=4096)
def _compile(formula: Formula) -> Callable[[AbstractSet[str]], bool]:
    if isinstance(formula, Const):
        value = formula.value
        return lambda s: value
    if isinstance(formula, Atom):
        name = formula.name
        return lambda s: name in s
    if isinstance(formula, Not):
        inner = _compile(formula.operand)
        return lambda s: not inner(s)
    if isinstance(formula, And):
        left, right = _compile(formula.left), _compile(formula.right)
        return lambda s: left(s) and right(s)
    if isinstance(formula, Or):
        left, right = _compile(formula.left), _compile(formula.right)
        return lambda s: left(s) or right(s)
    raise TypeError(f"not a formula: {formula!r}")


def assignments(features: Iterable[str]) -> Iterator[FrozenSet[str]]:
    """Every subset of ``features``, smallest first."""
    names = sorted(set(features))
    for size in range(len(names) + 1):
        for combo in itertools.combinations(names, size):
            yield frozenset(combo)


def models(formula: Formula, features: Iterable[str]) -> Tuple[FrozenSet[str], ...]:
    """All subsets of ``features`` satisfying ``formula``, in product order."""
    return _models(formula, tuple(sorted(set(features))))


@lru_cache(maxsize=1024)
def _models(formula: Formula, features: Tuple[str, ...]) -> Tuple[FrozenSet[str], ...]:
    check = _compile(formula)
    found = [s for s in assignments(features) if check(s)]
    found.sort(key=product_key)
    return tuple(found)


def product_key(product: AbstractSet[str]) -> Tuple[str, ...]:
    """Sort key for products: lexicographic on the sorted feature names."""
    return tuple(sorted(product))


def is_satisfiable(formula: Formula, features: Iterable[str]) -> bool:
    check = _compile(formula)
    return any(check(s) for s in assignments(features))


def equivalent(a: Formula, b: Formula, features: Sequence[str] = ()) -> bool:
    """Truth-table equivalence over ``features`` plus the atoms of both sides."""
    universe = set(features) | a.atoms() | b.atoms()
    fa, fb = _compile(a), _compile(b)
    return all(fa(s) == fb(s) for s in assignments(universe))
