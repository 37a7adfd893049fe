"""Concrete ``.spl`` syntax: tokenizer, parser and deterministic printer.

A file has the sections, in this order::

    features Lit, Add, Neg;
    constraint (Lit && Print);          // optional, defaults to true
    base { class ... }
    delta DNeg when Neg { adds class Neg extends Exp { ... } }
    order DNeg < { DNegPrint, DOptionalPrint } < DremAdd;

``//`` starts a comment running to the end of the line.  The printer emits
fully parenthesized formulas and keeps every stored order, so
``parse_spl(print_spl(pl)) == pl``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import formula as F
from .model import (
    ADO,
    EXTENDS,
    BinOp,
    Cast,
    ClassDecl,
    DeltaModule,
    Expr,
    ExprStmt,
    FieldAccess,
    FieldAssign,
    FieldDecl,
    IntLit,
    LocalDecl,
    MethodCall,
    MethodDecl,
    New,
    Null,
    Op,
    OriginalCall,
    Program,
    ProductLine,
    Ref,
    SplError,
    StrLit,
    ValidationError,
    Var,
    superclass_cycle,
    validate,
)


class SplSyntaxError(SplError):
    """Parse or validation failure with a source location."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


KEYWORDS = {
    "features", "constraint", "base", "delta", "when", "order", "class", "extends",
    "extending", "adds", "removes", "modifies", "readds", "return", "new", "null",
    "this", "original", "true", "false",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>&&|\|\||[{}()\[\];,.=+\-*<!])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, string, op, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SplSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            word = m.group()
            tokens.append(Token("keyword" if word in KEYWORDS else "ident", word, line, col))
        elif kind in ("int", "string", "op"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


def _unquote(literal: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), literal[1:-1])


def _quote(value: str) -> str:
    out = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers ----------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("keyword", "op")

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            self.fail(f"expected {text!r}, found {self.describe(self.tok)}")
        return t

    def ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "ident":
            self.fail(f"expected {what}, found {self.describe(t)}")
        self.i += 1
        return t

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def fail(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise SplSyntaxError(message, tok.line, tok.col)

    # -- product line -----------------------------------------------------
    def product_line(self) -> ProductLine:
        self.expect("features")
        features: List[str] = []
        if not self.at(";"):
            while True:
                t = self.ident("feature name")
                if t.text in features:
                    self.fail(f"duplicate feature {t.text}", t)
                features.append(t.text)
                if not self.accept(","):
                    break
        self.expect(";")
        self.features = set(features)

        constraint = F.TRUE
        if self.accept("constraint"):
            constraint = self.formula()
            self.expect(";")

        base_tok = self.expect("base")
        self.expect("{")
        classes: List[ClassDecl] = []
        class_toks: Dict[str, Token] = {}
        while not self.at("}"):
            start = self.tok
            c = self.class_decl()
            if c.name in class_toks:
                self.fail(f"duplicate class {c.name} in base program", start)
            class_toks[c.name] = start
            classes.append(c)
        self.expect("}")
        base = Program(tuple(classes))
        culprit = superclass_cycle(base)
        if culprit is not None:
            self.fail(f"cyclic extends relation through class {culprit}", class_toks.get(culprit, base_tok))

        deltas: List[DeltaModule] = []
        activation: Dict[str, F.Formula] = {}
        while self.at("delta"):
            self.i += 1
            name_tok = self.ident("delta module name")
            if name_tok.text in activation:
                self.fail(f"duplicate delta module {name_tok.text}", name_tok)
            self.expect("when")
            activation[name_tok.text] = self.formula()
            deltas.append(DeltaModule(name_tok.text, self.delta_body(name_tok.text)))

        order: List[Tuple[str, ...]] = []
        order_tok = self.tok
        if self.accept("order"):
            order = self.order(activation)
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.describe(self.tok)}")
        missing = [d.name for d in deltas if not any(d.name in p for p in order)]
        if missing:
            self.fail(f"application order does not mention delta {missing[0]}", order_tok)

        pl = ProductLine(tuple(features), constraint, base, tuple(deltas), activation, tuple(order))
        try:
            validate(pl)
        except ValidationError as exc:  # pragma: no cover - parser checks come first
            self.fail(str(exc), order_tok)
        return pl

    def order(self, activation) -> List[Tuple[str, ...]]:
        parts: List[Tuple[str, ...]] = []
        seen = set()
        if self.accept(";"):
            return parts
        while True:
            names = []
            if self.accept("{"):
                while True:
                    names.append(self.ident("delta module name"))
                    if not self.accept(","):
                        break
                self.expect("}")
            else:
                names.append(self.ident("delta module name"))
            for t in names:
                if t.text not in activation:
                    self.fail(f"application order mentions undeclared delta {t.text}", t)
                if t.text in seen:
                    self.fail(f"delta {t.text} appears twice in the application order", t)
                seen.add(t.text)
            parts.append(tuple(t.text for t in names))
            if not self.accept("<"):
                break
        self.expect(";")
        return parts

    # -- formulas ---------------------------------------------------------
    def formula(self) -> F.Formula:
        left = self.conjunction()
        while self.accept("||"):
            left = F.Or(left, self.conjunction())
        return left

    def conjunction(self) -> F.Formula:
        left = self.negation()
        while self.accept("&&"):
            left = F.And(left, self.negation())
        return left

    def negation(self) -> F.Formula:
        if self.accept("!"):
            return F.Not(self.negation())
        if self.accept("("):
            inner = self.formula()
            self.expect(")")
            return inner
        if self.accept("true"):
            return F.TRUE
        if self.accept("false"):
            return F.FALSE
        t = self.ident("feature name")
        if t.text not in self.features:
            self.fail(f"unknown feature {t.text}", t)
        return F.Atom(t.text)

    # -- delta bodies -----------------------------------------------------
    def delta_body(self, delta: str) -> Tuple[ADO, ...]:
        self.expect("{")
        ops: List[ADO] = []
        seen: Dict[Ref, Token] = {}

        def add(ado: ADO, tok: Token):
            if ado.ref in seen:
                self.fail(f"delta {delta} targets {ado.ref} twice", tok)
            seen[ado.ref] = tok
            ops.append(ado)

        while not self.at("}"):
            tok = self.tok
            if self.accept("adds") or self.accept("readds"):
                op = Op.ADDS if tok.text == "adds" else Op.READDS
                c = self.class_decl()
                add(ADO(op, Ref(c.name), c), tok)
            elif self.accept("removes"):
                name = self.ident("class name")
                self.accept(";")
                add(ADO(Op.REMOVES, Ref(name.text)), tok)
            elif self.accept("modifies"):
                self.accept("class")
                cname = self.ident("class name").text
                if self.accept("extending"):
                    sup = self.ident("class name")
                    add(ADO(Op.MODIFIES, Ref(cname, EXTENDS), sup.text), sup)
                self.expect("{")
                while not self.at("}"):
                    atok = self.tok
                    add(self.attr_op(cname), atok)
                self.expect("}")
            else:
                self.fail(f"expected a class operation, found {self.describe(tok)}")
        self.expect("}")
        return tuple(ops)

    def attr_op(self, cname: str) -> ADO:
        tok = self.tok
        if self.accept("removes"):
            name = self.ident("attribute name")
            self.accept(";")
            return ADO(Op.REMOVES, Ref(cname, name.text))
        if self.accept("modifies"):
            m = self.attr_decl(allow_original=True)
            if not isinstance(m, MethodDecl):
                self.fail("only methods can be modified", tok)
            return ADO(Op.MODIFIES, Ref(cname, m.name), m)
        if self.accept("adds") or self.accept("readds"):
            a = self.attr_decl()
            return ADO(Op.ADDS if tok.text == "adds" else Op.READDS, Ref(cname, a.name), a)
        self.fail(f"expected an attribute operation, found {self.describe(tok)}")

    # -- IFJ declarations -------------------------------------------------
    def class_decl(self) -> ClassDecl:
        self.expect("class")
        name = self.ident("class name").text
        self.expect("extends")
        sup = self.ident("class name").text
        self.expect("{")
        attrs = []
        names: Dict[str, Token] = {}
        while not self.at("}"):
            tok = self.tok
            a = self.attr_decl()
            if a.name in names:
                self.fail(f"duplicate attribute {name}.{a.name}", tok)
            names[a.name] = tok
            attrs.append(a)
        self.expect("}")
        return ClassDecl(name, sup, tuple(attrs))

    def attr_decl(self, allow_original: bool = False):
        type_tok = self.ident("type name")
        name = self.ident("attribute name")
        if self.accept(";"):
            return FieldDecl(type_tok.text, name.text)
        self.expect("(")
        params: List[Tuple[str, str]] = []
        if not self.at(")"):
            while True:
                ptype = self.ident("parameter type")
                if self.at("this"):
                    self.fail("'this' cannot be a parameter name")
                pname = self.ident("parameter name")
                params.append((ptype.text, pname.text))
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect("{")
        self.allow_original = allow_original
        body = []
        while not self.at("return"):
            if self.tok.kind == "ident" and self.peek().kind == "ident" and self.peek(2).text == "=":
                ltype = self.ident()
                lname = self.ident()
                self.expect("=")
                body.append(LocalDecl(ltype.text, lname.text, self.expr()))
            else:
                body.append(ExprStmt(self.expr()))
            self.expect(";")
        self.expect("return")
        result = self.expr()
        self.expect(";")
        self.expect("}")
        self.allow_original = False
        return MethodDecl(type_tok.text, name.text, tuple(params), tuple(body), result)

    # -- expressions ------------------------------------------------------
    def expr(self) -> Expr:
        start = self.tok
        left = self.additive()
        if self.accept("="):
            if not isinstance(left, FieldAccess):
                self.fail("only fields can be assigned (write e.f = e)", start)
            return FieldAssign(left.target, left.name, self.expr())
        return left

    def additive(self) -> Expr:
        left = self.multiplicative()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.multiplicative())
        return left

    def multiplicative(self) -> Expr:
        left = self.postfix()
        while self.accept("*"):
            left = BinOp("*", left, self.postfix())
        return left

    def postfix(self) -> Expr:
        e = self.primary()
        while self.accept("."):
            name = self.ident("member name").text
            if self.accept("("):
                e = MethodCall(e, name, self.args())
            else:
                e = FieldAccess(e, name)
        return e

    def args(self) -> Tuple[Expr, ...]:
        out = []
        if not self.at(")"):
            while True:
                out.append(self.expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(out)

    _CAST_FOLLOW = ("ident", "int", "string")

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return IntLit(int(t.text))
        if t.kind == "string":
            self.i += 1
            return StrLit(_unquote(t.text))
        if self.accept("null"):
            return Null()
        if self.accept("this"):
            return Var("this")
        if self.accept("new"):
            cls = self.ident("class name").text
            self.expect("(")
            self.expect(")")
            return New(cls)
        if self.accept("original"):
            if not getattr(self, "allow_original", False):
                self.fail("'original' is only allowed in the body of a modified method", t)
            self.expect("(")
            return OriginalCall(self.args())
        if self.accept("-"):
            n = self.tok
            if n.kind != "int":
                self.fail("expected an integer after '-'")
            self.i += 1
            return IntLit(-int(n.text))
        if self.accept("("):
            nxt = self.peek()
            if self.tok.kind == "ident" and nxt.text == ")" and (
                self.peek(2).kind in self._CAST_FOLLOW or self.peek(2).text in ("this", "new", "null", "(", "original")
            ):
                cls = self.ident().text
                self.expect(")")
                return Cast(cls, self.postfix())
            inner = self.expr()
            self.expect(")")
            return inner
        if t.kind == "ident":
            self.i += 1
            if self.at("("):
                self.fail(f"method call {t.text}(...) needs a receiver", t)
            return Var(t.text)
        self.fail(f"expected an expression, found {self.describe(t)}")


def parse_spl(text: str) -> ProductLine:
    """Parse and validate a product line; errors carry line and column."""
    return _Parser(text).product_line()


def parse_formula(text: str, features: Sequence[str]) -> F.Formula:
    p = _Parser(text)
    p.features = set(features)
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.describe(p.tok)}")
    return f


# ---------------------------------------------------------------------------
# Printing

_PREC = {"+": 1, "-": 1, "*": 2}


def expr_to_text(e: Expr) -> str:
    return _expr(e, 0)


def _expr(e: Expr, ctx: int) -> str:
    # ctx: 0 = anywhere, 1 = additive operand, 2 = multiplicative operand, 3 = postfix target
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Null):
        return "null"
    if isinstance(e, IntLit):
        return f"({e.value})" if e.value < 0 else str(e.value)
    if isinstance(e, StrLit):
        return _quote(e.value)
    if isinstance(e, New):
        return f"new {e.cls}()"
    if isinstance(e, OriginalCall):
        return f"original({_args(e.args)})"
    if isinstance(e, FieldAccess):
        return f"{_expr(e.target, 3)}.{e.name}"
    if isinstance(e, MethodCall):
        return f"{_expr(e.target, 3)}.{e.name}({_args(e.args)})"
    if isinstance(e, Cast):
        text = f"({e.cls}) {_expr(e.expr, 3)}"
        return f"({text})" if ctx >= 1 else text
    if isinstance(e, FieldAssign):
        text = f"{_expr(e.target, 3)}.{e.name} = {_expr(e.value, 0)}"
        return f"({text})" if ctx >= 1 else text
    if isinstance(e, BinOp):
        prec = _PREC[e.op]
        text = f"{_expr(e.left, prec)} {e.op} {_expr(e.right, prec + 1)}"
        return f"({text})" if ctx > prec else text
    raise TypeError(f"not an expression: {e!r}")


def _args(args) -> str:
    return ", ".join(_expr(a, 0) for a in args)


def attr_to_text(a) -> str:
    if isinstance(a, FieldDecl):
        return f"{a.type} {a.name};"
    params = ", ".join(f"{t} {n}" for t, n in a.params)
    stmts = []
    for s in a.body:
        if isinstance(s, LocalDecl):
            stmts.append(f"{s.type} {s.name} = {expr_to_text(s.init)};")
        else:
            stmts.append(f"{expr_to_text(s.expr)};")
    stmts.append(f"return {expr_to_text(a.result)};")
    return f"{a.return_type} {a.name}({params}) {{ {' '.join(stmts)} }}"


def class_to_lines(c: ClassDecl, indent: str = "") -> List[str]:
    lines = [f"{indent}class {c.name} extends {c.superclass} {{"]
    lines += [f"{indent}  {attr_to_text(a)}" for a in c.attrs]
    lines.append(f"{indent}}}")
    return lines


def print_program(program: Program) -> str:
    """Render a standalone IFJ program (a base program or a variant)."""
    lines: List[str] = []
    for c in program.classes:
        lines += class_to_lines(c)
    return "\n".join(lines) + ("\n" if lines else "")


def _ops_to_lines(ops: Sequence[ADO]) -> List[str]:
    """Group runs of consecutive attribute operations on one class."""
    lines: List[str] = []
    i = 0
    while i < len(ops):
        o = ops[i]
        if o.ref.is_class:
            if o.op is Op.REMOVES:
                lines.append(f"  removes {o.ref.cls}")
            else:
                body = class_to_lines(o.data, "  ")
                body[0] = f"  {o.op.value} {body[0].lstrip()}"
                lines += body
            i += 1
            continue
        cname = o.ref.cls
        header = f"  modifies {cname}"
        if o.ref.attr == EXTENDS:
            header += f" extending {o.data}"
            i += 1
        run = []
        while i < len(ops) and ops[i].ref.cls == cname and not ops[i].ref.is_class and ops[i].ref.attr != EXTENDS:
            run.append(ops[i])
            i += 1
        lines.append(header + " {")
        for a in run:
            if a.op is Op.REMOVES:
                lines.append(f"    removes {a.ref.attr};")
            else:
                lines.append(f"    {a.op.value} {attr_to_text(a.data)}")
        lines.append("  }")
    return lines


def print_spl(pl: ProductLine) -> str:
    """Deterministic rendering that parses back to an equal product line."""
    out = [f"features {', '.join(pl.features)};" if pl.features else "features;"]
    out.append(f"constraint {F.to_text(pl.formula)};")
    out.append("")
    out.append("base {")
    for c in pl.base.classes:
        out += class_to_lines(c, "  ")
    out.append("}")
    for d in pl.deltas:
        out.append("")
        out.append(f"delta {d.name} when {F.to_text(pl.activation[d.name])} {{")
        out += _ops_to_lines(d.ops)
        out.append("}")
    out.append("")
    parts = [p[0] if len(p) == 1 else "{ " + ", ".join(p) + " }" for p in pl.order]
    out.append(("order " + " < ".join(parts) + ";") if parts else "order;")
    return "\n".join(out) + "\n"
