"""A small language for operators with an involution.

Example::

    dim 2
    involution A = [[1, 0], [0, -1]] order 2
    param a = 3
    L = a*(D[2,0] + D[0,2]) + 2*A - 2*I

Declarations are separated by ``;`` or newlines (newlines inside brackets
and parentheses are ignored); ``#`` starts a comment.  An involution name
in an expression denotes its pullback, ``A^k`` the k-th power (reduced mod
the order), ``I`` the identity, ``D[a1,...,an]`` the derivative with
multi-index ``a``, and ``z`` a primitive root of unity of the declared
conductor.  Products are operator compositions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .involution import InvolutionError, InvolutionMatrix, validate_involution
from .opalgebra import InvOperator
from .scalars import Cyc, ScalarFieldError, format_scalar, simplify
from .symtensor import Poly, linear_substitute

KEYWORDS = {"conductor", "dim", "involution", "order", "param", "D", "I", "z"}


class DSLError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message, self.line, self.col = message, line, col


# ------------------------------------------------------------------- lexer


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, ID, SEP, EOF or the punctuation character itself
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)|(?P<num>\d+(?:/\d+)?)"
                    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<punct>[;=\[\],()+\-*^])")


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    line, line_start, depth, pos = 1, 0, 0, 0
    while pos < len(src):
        mt = _TOKEN.match(src, pos)
        col = pos - line_start + 1
        if not mt:
            raise DSLError(f"unexpected character {src[pos]!r}", line, col)
        kind = mt.lastgroup
        text = mt.group()
        if kind == "nl":
            if depth == 0:
                toks.append(Token("SEP", "\n", line, col))
            line, line_start = line + 1, mt.end()
        elif kind == "num":
            if "/" in text and int(text.split("/")[1]) == 0:
                raise DSLError("zero denominator", line, col)
            toks.append(Token("NUM", text, line, col))
        elif kind == "id":
            toks.append(Token("ID", text, line, col))
        elif kind == "punct":
            if text in "([":
                depth += 1
            elif text in ")]":
                depth = max(0, depth - 1)
            toks.append(Token("SEP" if text == ";" else text, text, line, col))
        pos = mt.end()
    toks.append(Token("EOF", "", line, pos - line_start + 1))
    return toks


# --------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Zeta:
    k: int
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Name:
    name: str
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Pull:
    name: str
    k: int
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Ident:
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Deriv:
    alpha: tuple
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Neg:
    arg: object
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Decl:
    kind: str  # conductor | dim | involution | param | define
    name: str | None
    value: object
    order: int | None = None
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass
class ProgramAST:
    decls: list

    @property
    def conductor(self) -> int:
        return next((d.value for d in self.decls if d.kind == "conductor"), 1)

    @property
    def dim(self) -> int | None:
        return next((d.value for d in self.decls if d.kind == "dim"), None)

    def operator_names(self) -> list[str]:
        return [d.name for d in self.decls if d.kind == "define"]


# ------------------------------------------------------------------ parser


class Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0
        self.scope: dict[str, str] = {}  # name -> involution | param | operator
        self.orders: dict[str, int] = {}
        self.dim: int | None = None
        self.conductor = 1

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    @staticmethod
    def _show(t: Token) -> str:
        return "end of input" if t.kind == "EOF" else "end of statement" if t.kind == "SEP" else repr(t.text)

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise DSLError(msg, tok.line, tok.col)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            self.error(f"expected {want!r}, found {self._show(t)}")
        return self.advance()

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    def integer(self) -> int:
        t = self.expect("NUM")
        if "/" in t.text:
            self.error("expected an integer", t)
        return int(t.text)

    # program := decl (";" decl)*
    def program(self) -> ProgramAST:
        decls = []
        while True:
            while self.at("SEP"):
                self.advance()
            if self.at("EOF"):
                break
            decls.append(self.decl())
            if not (self.at("SEP") or self.at("EOF")):
                self.error(f"expected ';' or newline, found {self.tok.text!r}")
        return ProgramAST(decls)

    def decl(self) -> Decl:
        t = self.tok
        pos = (t.line, t.col)
        if self.at("ID", "conductor"):
            self.advance()
            if self.dim is not None or self.scope:
                self.error("conductor must be declared first", t)
            m = self.integer()
            if m < 1:
                self.error("conductor must be positive", t)
            self.conductor = m
            return Decl("conductor", None, m, pos=pos)
        if self.at("ID", "dim"):
            self.advance()
            if self.dim is not None:
                self.error("dim declared twice", t)
            n = self.integer()
            if n < 1:
                self.error("dim must be positive", t)
            self.dim = n
            return Decl("dim", None, n, pos=pos)
        if self.at("ID", "involution"):
            self.advance()
            name = self.new_name()
            self.expect("=")
            mat_tok = self.tok
            rows = self.matrix()
            self.expect("ID", "order")
            p = self.integer()
            if self.dim is None:
                self.error("dim must be declared before an involution", mat_tok)
            if len(rows) != self.dim or any(len(r) != self.dim for r in rows):
                self.error(f"dimension mismatch: involution matrix must be {self.dim}x{self.dim}", mat_tok)
            self.scope[name] = "involution"
            self.orders[name] = p
            return Decl("involution", name, rows, order=p, pos=pos)
        if self.at("ID", "param"):
            self.advance()
            name = self.new_name()
            self.expect("=")
            value = self.constant()
            self.scope[name] = "param"
            return Decl("param", name, value, pos=pos)
        if self.at("ID"):
            name = self.new_name()
            self.expect("=")
            value = self.expr()
            self.scope[name] = "operator"
            return Decl("define", name, value, pos=pos)
        self.error(f"expected a declaration, found {self.tok.text or self.tok.kind!r}")

    def new_name(self) -> str:
        t = self.expect("ID")
        if t.text in KEYWORDS:
            self.error(f"{t.text!r} is reserved", t)
        if t.text in self.scope:
            self.error(f"{t.text!r} is already defined", t)
        return t.text

    def matrix(self) -> tuple:
        self.expect("[")
        rows = [self.row()]
        while self.at(","):
            self.advance()
            rows.append(self.row())
        self.expect("]")
        return tuple(rows)

    def row(self) -> tuple:
        self.expect("[")
        vals = [self.constant()]
        while self.at(","):
            self.advance()
            vals.append(self.constant())
        self.expect("]")
        return tuple(vals)

    def constant(self):
        """An expression with no derivatives, pullbacks or operator names."""
        start = self.tok
        e = self.expr()
        bad = _first_nonscalar(e)
        if bad is not None:
            self.error("expected a scalar", _tok_at(bad, start))
        return e

    # expr := ["-"] term (("+"|"-") term)*
    def expr(self):
        t = self.tok
        if self.at("-"):
            self.advance()
            node = Neg(self.term(), pos=(t.line, t.col))
        else:
            node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance()
            node = BinOp(op.text, node, self.term(), pos=(op.line, op.col))
        return node

    # term := factor ("*" factor)*
    def term(self):
        node = self.factor()
        while self.at("*"):
            op = self.advance()
            node = BinOp("*", node, self.factor(), pos=(op.line, op.col))
        return node

    def factor(self):
        t = self.tok
        pos = (t.line, t.col)
        if self.at("NUM"):
            self.advance()
            return Num(Fraction(t.text), pos=pos)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if self.at("-"):
            self.advance()
            return Neg(self.factor(), pos=pos)
        if not self.at("ID"):
            self.error(f"unexpected {self._show(t)}")
        self.advance()
        if t.text == "z":
            if self.conductor == 1:
                self.error("z requires a conductor greater than 1", t)
            return Zeta(self.exponent(), pos=pos)
        if t.text == "I":
            return Ident(pos=pos)
        if t.text == "D":
            return self.deriv(t)
        kind = self.scope.get(t.text)
        if kind is None:
            self.error(f"undefined identifier {t.text!r}", t)
        if kind == "involution":
            k = self.exponent()
            return Pull(t.text, k % self.orders[t.text], pos=pos)
        if self.at("^"):
            self.error("'^' applies only to involutions and z")
        return Name(t.text, pos=pos)

    def exponent(self) -> int:
        if not self.at("^"):
            return 1
        self.advance()
        return self.integer()

    def deriv(self, t: Token) -> Deriv:
        self.expect("[")
        alpha = [self.integer()]
        while self.at(","):
            self.advance()
            alpha.append(self.integer())
        self.expect("]")
        if self.dim is None:
            self.error("dim must be declared before D[...]", t)
        if len(alpha) != self.dim:
            self.error(f"dimension mismatch: D has {len(alpha)} indices, dim is {self.dim}", t)
        return Deriv(tuple(alpha), pos=(t.line, t.col))


def _first_nonscalar(e):
    if isinstance(e, (Num, Zeta)):
        return None
    if isinstance(e, Neg):
        return _first_nonscalar(e.arg)
    if isinstance(e, BinOp):
        return _first_nonscalar(e.left) or _first_nonscalar(e.right)
    return e


def _tok_at(node, fallback: Token) -> Token:
    line, col = getattr(node, "pos", (fallback.line, fallback.col))
    return Token("ID", "", line, col)


def parse(src: str) -> ProgramAST:
    """Parse and scope-check a program; errors carry line:column."""
    return Parser(src).program()


# ---------------------------------------------------------------- lowering


@dataclass
class Lowered:
    conductor: int
    dim: int
    involutions: dict
    params: dict
    operators: dict


@dataclass
class _Val:
    inv: str | None
    comps: dict  # power -> Poly


class _Lowerer:
    def __init__(self, ast: ProgramAST):
        self.m = ast.conductor
        self.dim = ast.dim
        self.involutions: dict[str, InvolutionMatrix] = {}
        self.params: dict = {}
        self.values: dict[str, _Val] = {}
        self.ast = ast

    def fail(self, msg, node):
        line, col = getattr(node, "pos", (0, 0))
        raise DSLError(msg, line, col)

    def run(self) -> Lowered:
        ops = {}
        for d in self.ast.decls:
            if d.kind == "involution":
                rows = [[self.scalar(x) for x in row] for row in d.value]
                try:
                    self.involutions[d.name] = validate_involution(rows, d.order)
                except InvolutionError as exc:
                    self.fail(str(exc), d)
            elif d.kind == "param":
                self.params[d.name] = self.scalar(d.value)
            elif d.kind == "define":
                v = self.eval(d.value)
                self.values[d.name] = v
                ops[d.name] = self.to_operator(v, d)
        return Lowered(self.m, self.dim, self.involutions, self.params, ops)

    def scalar(self, e):
        v = self.eval(e)
        return v.comps.get(0, Poly.zero(self.dim or 1)).terms.get((0,) * (self.dim or 1), Fraction(0))

    def to_operator(self, v: _Val, node) -> InvOperator:
        name = v.inv
        if name is None:
            if len(self.involutions) != 1:
                self.fail("operator involves no involution and the program does not declare exactly one", node)
            name = next(iter(self.involutions))
        A = self.involutions[name]
        return InvOperator.from_components(A, {j: P for j, P in v.comps.items()})

    def const(self, c) -> _Val:
        n = self.dim or 1
        return _Val(None, {0: Poly.const(n, c)})

    def eval(self, e) -> _Val:
        n = self.dim or 1
        if isinstance(e, Num):
            return self.const(e.value)
        if isinstance(e, Zeta):
            return self.const(simplify(Cyc.zeta(self.m, e.k)))
        if isinstance(e, Ident):
            return self.const(1)
        if isinstance(e, Deriv):
            return _Val(None, {0: Poly.monomial(e.alpha)})
        if isinstance(e, Pull):
            return _Val(e.name, {e.k: Poly.const(n, 1)})
        if isinstance(e, Name):
            if e.name in self.params:
                return self.const(self.params[e.name])
            return self.values[e.name]
        if isinstance(e, Neg):
            v = self.eval(e.arg)
            return _Val(v.inv, {j: -P for j, P in v.comps.items()})
        if isinstance(e, BinOp):
            a, b = self.eval(e.left), self.eval(e.right)
            inv = self.merge(a, b, e)
            if e.op == "*":
                return self.compose(inv, a, b, e)
            sign = 1 if e.op == "+" else -1
            comps = dict(a.comps)
            for j, P in b.comps.items():
                comps[j] = comps.get(j, Poly.zero(n)) + P * sign
            return _Val(inv, {j: P for j, P in comps.items() if P})
        raise TypeError(f"unknown node {e!r}")

    def merge(self, a: _Val, b: _Val, node) -> str | None:
        if a.inv and b.inv and a.inv != b.inv:
            self.fail(f"mixed involutions {a.inv!r} and {b.inv!r} in one operator", node)
        return a.inv or b.inv

    def compose(self, inv, a: _Val, b: _Val, node) -> _Val:
        """``a b`` with ``D_w (A*)^j = (A*)^j D_{A^j w}``."""
        out: dict[int, Poly] = {}
        A = self.involutions[inv] if inv else None
        for l, Q in a.comps.items():
            for j, P in b.comps.items():
                shifted = Q if j == 0 else linear_substitute(A.power(j), Q)
                t = (l + j) % A.p if A else 0
                try:
                    out[t] = out.get(t, Poly.zero(P.dim)) + shifted * P
                except ScalarFieldError as exc:
                    self.fail(str(exc), node)
        return _Val(inv, {j: P for j, P in out.items() if P})


def lower(ast: ProgramAST) -> Lowered:
    """Expand every defined operator into its components."""
    if ast.dim is None:
        raise DSLError("program declares no dim", 1, 1)
    return _Lowerer(ast).run()


def load(src: str) -> Lowered:
    return lower(parse(src))


# ---------------------------------------------------------------- printing


_PREC = {"+": 1, "-": 1, "*": 2}


def format_expr(e, prec: int = 0) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Zeta):
        return "z" if e.k == 1 else f"z^{e.k}"
    if isinstance(e, Ident):
        return "I"
    if isinstance(e, Deriv):
        return "D[" + ",".join(map(str, e.alpha)) + "]"
    if isinstance(e, Pull):
        return e.name if e.k == 1 else f"{e.name}^{e.k}"
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Neg):
        s = "-" + format_expr(e.arg, 3)
        return f"({s})" if prec > 0 else s
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        right_prec = p + 1 if e.op == "-" else p
        s = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, right_prec)}" if p == 1 else \
            f"{format_expr(e.left, p)}*{format_expr(e.right, p + 1)}"
        return f"({s})" if p < prec else s
    raise TypeError(f"unknown node {e!r}")


def format_program(ast: ProgramAST) -> str:
    lines = []
    for d in ast.decls:
        if d.kind in ("conductor", "dim"):
            lines.append(f"{d.kind} {d.value}")
        elif d.kind == "involution":
            rows = ", ".join("[" + ", ".join(format_expr(x) for x in row) + "]" for row in d.value)
            lines.append(f"involution {d.name} = [{rows}] order {d.order}")
        elif d.kind == "param":
            lines.append(f"param {d.name} = {format_expr(d.value)}")
        else:
            lines.append(f"{d.name} = {format_expr(d.value)}")
    return "\n".join(lines) + "\n"


def format_operator(op: InvOperator, inv_name: str = "A") -> str:
    """Canonical source text ``sum_j A^j * (symbol)`` for an operator."""
    parts = []
    for j, P in enumerate(op.components):
        if not P:
            continue
        terms = []
        for alpha, c in P.sorted_terms():
            atom = "I" if not any(alpha) else "D[" + ",".join(map(str, alpha)) + "]"
            terms.append(f"({format_scalar(c)})*{atom}")
        body = " + ".join(terms)
        if j == 0:
            parts.append(body)
        else:
            pull = inv_name if j == 1 else f"{inv_name}^{j}"
            parts.append(f"{pull}*({body})")
    return " + ".join(parts) or "0*I"
