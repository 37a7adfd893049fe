"""Brute-force equivalence oracle and a random product-line generator."""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import formula as F
from .analysis import drop_deltas, linearize_up
from .generation import (
    GenerationError,
    Generator,
    Product,
    application_sequence,
    apply_ado,
    check_unambiguity,
    enumerate_products,
)
from .model import (
    ADO,
    BinOp,
    ClassDecl,
    DeltaModule,
    FieldAccess,
    FieldDecl,
    IntLit,
    MethodCall,
    MethodDecl,
    Null,
    Op,
    OriginalCall,
    Program,
    ProductLine,
    Ref,
    SplError,
    comparable,
    Var,
    EXTENDS,
)
from .syntax import print_program


def canonicalize(program: Program) -> Program:
    """Classes by name; inside a class, fields then methods, each by name."""

    def attr_key(a):
        return (0 if isinstance(a, FieldDecl) else 1, a.name)

    return Program(tuple(
        ClassDecl(c.name, c.superclass, tuple(sorted(c.attrs, key=attr_key)))
        for c in sorted(program.classes, key=lambda c: c.name)
    ))


# ---------------------------------------------------------------------------
# Equivalence


@dataclass(frozen=True)
class Outcome:
    """Result of generating one product: a canonical program or an error."""

    program: Optional[Program] = None
    error: Optional[Tuple[str, str]] = None

    def tag(self) -> str:
        if self.error is not None:
            return f"error {self.error[0]} at {self.error[1]}"
        digest = hashlib.sha1(print_program(self.program).encode()).hexdigest()
        return f"variant {digest[:12]}"


def outcome_table(pl: ProductLine) -> Dict[Product, Outcome]:
    gen = Generator(pl)
    table = {}
    for p in enumerate_products(pl):
        try:
            table[p] = Outcome(program=canonicalize(gen.generate(p).program))
        except GenerationError as exc:
            table[p] = Outcome(error=(exc.kind, str(exc.ref)))
    return table


def _show(p: Product) -> str:
    return "{" + ", ".join(sorted(p)) + "}"


def describe_difference(a: Program, b: Program) -> str:
    """First structural difference between two canonical programs."""
    names_a = [c.name for c in a.classes]
    names_b = [c.name for c in b.classes]
    if names_a != names_b:
        only_a = sorted(set(names_a) - set(names_b))
        only_b = sorted(set(names_b) - set(names_a))
        side = f"class {only_a[0]} only in the first" if only_a else f"class {only_b[0]} only in the second"
        return side
    for ca, cb in zip(a.classes, b.classes):
        if ca.superclass != cb.superclass:
            return f"class {ca.name} extends {ca.superclass} versus {cb.superclass}"
        attrs_a = {x.name: x for x in ca.attrs}
        attrs_b = {x.name: x for x in cb.attrs}
        for n in sorted(set(attrs_a) | set(attrs_b)):
            if n not in attrs_b:
                return f"{ca.name}.{n} only in the first"
            if n not in attrs_a:
                return f"{ca.name}.{n} only in the second"
            if attrs_a[n] != attrs_b[n]:
                return f"{ca.name}.{n} declared differently"
    return "programs differ"


@dataclass
class EquivalenceVerdict:
    equivalent: bool
    witnesses: List[Tuple[Product, str]] = field(default_factory=list)
    table: List[Tuple[Product, Optional[str], Optional[str]]] = field(default_factory=list)

    def __bool__(self):
        return self.equivalent

    def to_dict(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "witnesses": [{"product": sorted(p), "difference": d} for p, d in self.witnesses],
            "products": [
                {"product": sorted(p), "first": a, "second": b} for p, a, b in self.table
            ],
        }

    def to_text(self) -> str:
        if self.equivalent:
            return f"equivalent ({len(self.table)} products)"
        lines = [f"not equivalent: {len(self.witnesses)} differing products"]
        lines += [f"  {_show(p)}: {d}" for p, d in self.witnesses]
        return "\n".join(lines)


def check_equivalence(a: ProductLine, b: ProductLine, *,
                      table_a: Optional[Mapping[Product, Outcome]] = None) -> EquivalenceVerdict:
    """Same products, and per product the same canonical variant or the
    same error (kind and reference).  ``table_a`` may carry a precomputed
    :func:`outcome_table` of ``a``."""
    ta = table_a if table_a is not None else outcome_table(a)
    tb = outcome_table(b)
    verdict = EquivalenceVerdict(True)
    for p in sorted(set(ta) | set(tb), key=F.product_key):
        oa, ob = ta.get(p), tb.get(p)
        verdict.table.append((p, oa.tag() if oa else None, ob.tag() if ob else None))
        if oa is None or ob is None:
            verdict.witnesses.append((p, "product only in the " + ("second" if oa is None else "first")))
        elif oa != ob:
            if oa.error or ob.error:
                diff = f"{oa.tag()} versus {ob.tag()}"
            else:
                diff = describe_difference(oa.program, ob.program)
            verdict.witnesses.append((p, diff))
    verdict.equivalent = not verdict.witnesses
    return verdict


# ---------------------------------------------------------------------------
# Random product lines


class GeneratorExhausted(SplError):
    pass


DEFAULT_WEIGHTS = {
    "adds-class": 3,
    "removes-class": 2,
    "adds-attr": 4,
    "removes-attr": 3,
    "wraps": 2,
    "voids": 1,
    "modifies": 2,
    "extends": 1,
}


@dataclass(frozen=True)
class RandomSplSpec:
    seed: int = 0
    max_features: int = 8
    max_deltas: int = 12
    max_partitions: int = 6
    max_classes: int = 6
    max_attrs: int = 4
    max_ops: int = 3
    weights: Tuple[Tuple[str, int], ...] = tuple(DEFAULT_WEIGHTS.items())
    retries: int = 50


class _Builder:
    def __init__(self, spec: RandomSplSpec, rng: random.Random):
        self.spec = spec
        self.rng = rng
        self.counter = 0
        n_classes = rng.randint(1, spec.max_classes)
        self.classes = [f"C{i}" for i in range(n_classes)]
        # one superclass per class name, pointing to an earlier class, so
        # every product line built here is free of extends cycles
        self.parent = {
            c: ("Object" if i == 0 or rng.random() < 0.4 else f"C{rng.randrange(i)}")
            for i, c in enumerate(self.classes)
        }
        self.fields = [f"f{i}" for i in range(max(1, spec.max_attrs // 2))]
        self.methods = [f"m{i}" for i in range(max(1, spec.max_attrs - len(self.fields)))]
        kinds, weights = zip(*spec.weights)
        self.kinds, self.weights = list(kinds), list(weights)

    def tag(self) -> int:
        self.counter += 1
        return self.counter

    def method(self, name: str, cls: str) -> MethodDecl:
        k = self.tag()
        roll = self.rng.random()
        if roll < 0.3:
            result = IntLit(k)
        elif roll < 0.6:
            result = BinOp("+", FieldAccess(Var("this"), self.rng.choice(self.fields)), IntLit(k))
        else:
            result = MethodCall(Var("this"), self.rng.choice(self.methods), (IntLit(k),))
        params = (("int", "x"),) if self.rng.random() < 0.3 else ()
        return MethodDecl("int", name, params, (), result)

    def attr(self, cls: str, name: str):
        if name in self.fields:
            return FieldDecl(self.rng.choice(["int"] + self.classes), name)
        return self.method(name, cls)

    def class_decl(self, cls: str) -> ClassDecl:
        names = [n for n in self.fields + self.methods if self.rng.random() < 0.5]
        return ClassDecl(cls, self.parent[cls], tuple(self.attr(cls, n) for n in names))

    def op(self) -> ADO:
        rng = self.rng
        kind = rng.choices(self.kinds, self.weights)[0]
        cls = rng.choice(self.classes)
        if kind == "adds-class":
            return ADO(Op.ADDS, Ref(cls), self.class_decl(cls))
        if kind == "removes-class":
            return ADO(Op.REMOVES, Ref(cls))
        if kind == "extends":
            idx = self.classes.index(cls)
            sup = "Object" if idx == 0 else rng.choice(["Object"] + self.classes[:idx])
            return ADO(Op.MODIFIES, Ref(cls, EXTENDS), sup)
        if kind in ("adds-attr", "removes-attr"):
            name = rng.choice(self.fields + self.methods)
            if kind == "removes-attr":
                return ADO(Op.REMOVES, Ref(cls, name))
            return ADO(Op.ADDS, Ref(cls, name), self.attr(cls, name))
        name = rng.choice(self.methods)
        if kind == "wraps":
            body = MethodDecl("int", name, (), (), BinOp("+", OriginalCall(()), IntLit(self.tag())))
        elif kind == "voids":
            body = MethodDecl("int", name, (), (), Null())
        else:
            body = MethodDecl("int", name, (), (), IntLit(self.tag()))
        return ADO(Op.MODIFIES, Ref(cls, name), body)

    def formula(self, features: Sequence[str], depth: int = 2) -> F.Formula:
        rng = self.rng
        if depth == 0 or rng.random() < 0.4:
            atom = F.Atom(rng.choice(features))
            return F.Not(atom) if rng.random() < 0.3 else atom
        left, right = self.formula(features, depth - 1), self.formula(features, depth - 1)
        return F.And(left, right) if rng.random() < 0.6 else F.Or(left, right)


def _partition_sizes(rng: random.Random, n: int, max_parts: int) -> List[int]:
    if n == 0:
        return []
    parts = min(n, rng.randint(1, max(1, max_parts)))
    cuts = sorted(rng.sample(range(1, n), parts - 1))
    return [b - a for a, b in zip([0] + cuts, cuts + [n])]


def _applies(ops: Sequence[ADO], prog: Program) -> Optional[Program]:
    try:
        for o in ops:
            prog = apply_ado(o, prog)
    except GenerationError:
        return None
    return prog


def _candidate(spec: RandomSplSpec, b: _Builder) -> Optional[ProductLine]:
    """Build partition by partition, keeping the program of every product
    and accepting an operation only if it applies wherever its module is
    active and clashes with no co-active module of the same partition."""
    rng = b.rng
    features = tuple(f"F{i}" for i in range(rng.randint(1, spec.max_features)))
    formula = F.TRUE if rng.random() < 0.5 else F.Or(b.formula(features), b.formula(features))
    products = F.models(formula, features)
    if not products:
        return None
    base = Program(tuple(b.class_decl(c) for c in b.classes if rng.random() < 0.6))
    state = {p: base for p in products}
    deltas, activation, order = [], {}, []
    sizes = _partition_sizes(rng, rng.randint(0, spec.max_deltas), spec.max_partitions)
    for size in sizes:
        part: List[Tuple[str, frozenset, Tuple[Ref, ...]]] = []
        updates = {}
        for _ in range(size):
            cond = F.TRUE
            for _ in range(10):
                cond = F.TRUE if rng.random() < 0.1 else b.formula(features)
                if any(F.compile_formula(cond)(p) for p in products):
                    break
            check = F.compile_formula(cond)
            active = frozenset(p for p in products if check(p))
            if not active:
                continue
            taken = [r for _, act, refs in part if act & active for r in refs]
            ops: List[ADO] = []
            local = {p: state[p] for p in active}
            wanted = rng.randint(1, spec.max_ops)
            for _ in range(4 * wanted):
                if len(ops) == wanted:
                    break
                o = b.op()
                if any(comparable(o.ref, r) for r in taken + [x.ref for x in ops]):
                    continue
                after = {p: _applies([o], local[p]) for p in active}
                if any(v is None for v in after.values()):
                    continue
                ops.append(o)
                local = after
            if not ops:
                continue
            name = f"D{len(deltas)}"
            deltas.append(DeltaModule(name, tuple(ops)))
            activation[name] = cond
            part.append((name, active, tuple(o.ref for o in ops)))
            updates[name] = local
        for name, _, _ in part:
            state.update(updates[name])
        if part:
            order.append(tuple(sorted(n for n, _, _ in part)))
    return ProductLine(features, formula, base, tuple(deltas), activation, tuple(order))


def _without(pl: ProductLine, bad: Mapping[str, set]) -> ProductLine:
    deltas = tuple(
        DeltaModule(d.name, tuple(o for o in d.ops if o not in bad.get(d.name, ())))
        for d in pl.deltas
    )
    return ProductLine(pl.features, pl.formula, pl.base, deltas, pl.activation, pl.order)


def _failing_ops(pl: ProductLine) -> Dict[str, set]:
    """Operations that fail in some product, found by skipping failures."""
    steps = [
        (n, F.compile_formula(pl.activation[n]), application_sequence(pl.delta(n).ops))
        for n in linearize_up(pl, pl.delta_names)
    ]
    bad: Dict[str, set] = {}
    for p in enumerate_products(pl):
        prog = pl.base
        for name, cond, ops in steps:
            if not cond(p):
                continue
            for o in ops:
                try:
                    prog = apply_ado(o, prog)
                except GenerationError:
                    bad.setdefault(name, set()).add(o)
    return bad


def _repair(pl: ProductLine) -> ProductLine:
    while True:
        products = enumerate_products(pl)
        dead = {
            d.name for d in pl.deltas
            if not d.ops or not any(F.compile_formula(pl.activation[d.name])(p) for p in products)
        }
        pl = drop_deltas(pl, dead)
        report = check_unambiguity(pl)
        if report.conflicts:
            bad: Dict[str, set] = {}
            for c in report.conflicts:
                clashing = {rb for _, rb in c.refs}
                bad.setdefault(c.second, set()).update(o for o in pl.delta(c.second).ops if o.ref in clashing)
            pl = _without(pl, bad)
            continue
        bad = _failing_ops(pl)
        if not bad:
            return pl
        pl = _without(pl, bad)


def generate_random_spl(spec: RandomSplSpec) -> ProductLine:
    """Deterministic in ``spec.seed``; the result is valid, unambiguous and
    generates every product without errors."""
    rng = random.Random(spec.seed)
    for _ in range(spec.retries):
        b = _Builder(spec, rng)
        pl = _candidate(spec, b)
        if pl is not None:
            return _repair(pl)
    raise GeneratorExhausted(f"no product line with products found for seed {spec.seed}")
