"""A small arithmetic expression language for user-supplied functions.

Grammar (``^`` binds tightest and is right-associative, then unary minus,
then ``* /``, then ``+ -``)::

    expr    := term (("+" | "-") term)*
    term    := "-" term | unary (("*" | "/") unary)*
    unary   := "-" unary | power

A leading minus negates the whole product that follows it, so ``-s*u``
parses as ``-(s*u)``; negation is exact in floating point, so this never
changes a value.
    power   := primary ("^" unary)?
    primary := NUMBER | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Variables are ``u`` (the time-scale point) and ``s`` (the parameter).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from tsmono.errors import TimeScaleError

__all__ = [
    "Num", "Var", "Neg", "BinOp", "Call", "Expression",
    "ExprSyntaxError", "UnknownIdentifier", "UnboundVariable", "EvalDomainError",
    "parse", "evaluate", "compile_expr", "to_source", "derive_s", "depends_on",
]

VARIABLES = ("u", "s")
FUNCTIONS = {"exp": 1, "log": 1, "sqrt": 1, "abs": 1, "pow": 2}


class ExprSyntaxError(TimeScaleError, ValueError):
    def __init__(self, position: int, expected: Sequence[str], found: str, src: str = ""):
        self.position = position
        self.expected = tuple(expected)
        self.found = found
        super().__init__(
            f"syntax error at position {position}: expected one of "
            f"{', '.join(self.expected)}; found {found!r}"
        )


class UnknownIdentifier(TimeScaleError, ValueError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"unknown identifier {name!r} at position {position}")


class UnboundVariable(TimeScaleError, KeyError):
    pass


class EvalDomainError(TimeScaleError, ArithmeticError):
    pass


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


Expression = (Num, Var, Neg, BinOp, Call)


# -- lexer -------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(src: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(pos, ["number", "name", "operator"], src[pos], src)
        start = m.start(m.lastgroup)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), start))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, variables):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, text, pos = self.peek()
        raise ExprSyntaxError(pos, expected, text or "end of input", self.src)

    def expect(self, op):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != op:
            self.fail([repr(op)])
        return self.take()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(["operator", "end of input"])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.term())
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        kind, text, pos = self.peek()
        if kind == "num":
            self.take()
            return Num(float(text))
        if kind == "name":
            self.take()
            if text in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                close = self.peek()
                if len(args) != FUNCTIONS[text]:
                    raise ExprSyntaxError(
                        close[2], [f"{FUNCTIONS[text]} argument(s) for {text}"],
                        f"{len(args)} argument(s)", self.src,
                    )
                self.expect(")")
                return Call(text, tuple(args))
            if text in self.variables:
                return Var(text)
            raise UnknownIdentifier(text, pos)
        if kind == "op" and text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(["number", "name", "'('", "'-'"])


def parse(src: str, variables: Sequence[str] = VARIABLES):
    """Parse ``src`` into an AST; ``variables`` restricts the admissible names."""
    if not isinstance(src, str) or not src.strip():
        raise ExprSyntaxError(0, ["expression"], "empty input", src or "")
    return _Parser(src, tuple(variables)).parse()


# -- evaluation --------------------------------------------------------------

def _pow(a: float, b: float) -> float:
    if a == 0.0 and b < 0:
        raise EvalDomainError(f"0 raised to negative power {b}")
    if a < 0 and not float(b).is_integer():
        raise EvalDomainError(f"negative base {a} with non-integer exponent {b}")
    try:
        return math.pow(a, b)
    except (OverflowError, ValueError) as exc:
        raise EvalDomainError(f"{a}^{b}: {exc}") from None


def _div(a: float, b: float) -> float:
    if b == 0.0:
        raise EvalDomainError("division by zero")
    return a / b


def _log(x: float) -> float:
    if not x > 0:
        raise EvalDomainError(f"log of non-positive value {x}")
    return math.log(x)


def _sqrt(x: float) -> float:
    if x < 0:
        raise EvalDomainError(f"sqrt of negative value {x}")
    return math.sqrt(x)


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        raise EvalDomainError(f"exp overflow at {x}") from None


_UNARY = {"exp": _exp, "log": _log, "sqrt": _sqrt, "abs": abs}
_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "^": _pow,
}


def _build(node, names):
    if isinstance(node, Num):
        v = node.value
        return lambda env: v
    if isinstance(node, Var):
        idx = names.index(node.name)
        return lambda env: env[idx]
    if isinstance(node, Neg):
        f = _build(node.arg, names)
        return lambda env: -f(env)
    if isinstance(node, BinOp):
        fl, fr, op = _build(node.left, names), _build(node.right, names), _BINARY[node.op]
        return lambda env: op(fl(env), fr(env))
    if isinstance(node, Call):
        if node.fn == "pow":
            fa, fb = (_build(a, names) for a in node.args)
            return lambda env: _pow(fa(env), fb(env))
        fn, fa = _UNARY[node.fn], _build(node.args[0], names)
        return lambda env: fn(fa(env))
    raise TypeError(f"not an expression node: {node!r}")


def compile_expr(node, names: Sequence[str] = VARIABLES) -> Callable[..., float]:
    """Compile to a positional callable ``f(*values)`` in the order of ``names``."""
    names = list(names)
    missing = depends_on(node) - set(names)
    if missing:
        raise UnboundVariable(f"unbound variable(s): {', '.join(sorted(missing))}")
    body = _build(node, names)

    def fn(*values):
        try:
            out = body(values)
        except OverflowError:
            raise EvalDomainError("floating-point overflow") from None
        if not math.isfinite(out):
            raise EvalDomainError(f"non-finite result {out}")
        return out

    return fn


def evaluate(node, bindings: Mapping[str, float]) -> float:
    names = sorted(depends_on(node))
    for n in names:
        if n not in bindings:
            raise UnboundVariable(f"variable {n!r} is not bound")
    return compile_expr(node, names)(*(float(bindings[n]) for n in names))


def depends_on(node) -> set:
    if isinstance(node, Num):
        return set()
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return depends_on(node.arg)
    if isinstance(node, BinOp):
        return depends_on(node.left) | depends_on(node.right)
    return set().union(*(depends_on(a) for a in node.args))


def to_source(node) -> str:
    """Fully parenthesised source text; ``parse(to_source(e))`` evaluates identically."""
    if isinstance(node, Num):
        return f"({node.value!r})" if node.value < 0 or math.copysign(1, node.value) < 0 else repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)}{node.op}{to_source(node.right)})"
    return f"{node.fn}({', '.join(to_source(a) for a in node.args)})"


# -- symbolic differentiation with respect to s ------------------------------

def _is(node, value):
    return isinstance(node, Num) and node.value == value


def _add(a, b):
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return BinOp("+", a, b)


def _sub(a, b):
    if _is(b, 0):
        return a
    if _is(a, 0):
        return _neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    return BinOp("-", a, b)


def _neg(a):
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a, b):
    if _is(a, 0) or _is(b, 0):
        return Num(0.0)
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return BinOp("*", a, b)


def _div_node(a, b):
    if _is(a, 0):
        return Num(0.0)
    if _is(b, 1):
        return a
    return BinOp("/", a, b)


def _pow_node(a, b):
    if _is(b, 1):
        return a
    if _is(b, 0):
        return Num(1.0)
    return BinOp("^", a, b)


def derive_s(node, var: str = "s") -> Optional[object]:
    """Symbolic derivative with respect to ``var``.

    Returns ``None`` when a node has no symbolic rule (``abs`` of an
    s-dependent argument); callers then fall back to finite differences.
    """
    if var not in depends_on(node):
        return Num(0.0)
    if isinstance(node, Var):
        return Num(1.0)
    if isinstance(node, Neg):
        d = derive_s(node.arg, var)
        return None if d is None else _neg(d)
    if isinstance(node, BinOp) or (isinstance(node, Call) and node.fn == "pow"):
        if isinstance(node, Call):
            op, a, b = "^", node.args[0], node.args[1]
        else:
            op, a, b = node.op, node.left, node.right
        da, db = derive_s(a, var), derive_s(b, var)
        if da is None or db is None:
            return None
        if op == "+":
            return _add(da, db)
        if op == "-":
            return _sub(da, db)
        if op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if op == "/":
            if var not in depends_on(b):
                return _div_node(da, b)
            return _div_node(_sub(_mul(da, b), _mul(a, db)), _pow_node(b, Num(2.0)))
        # op == "^"
        if var not in depends_on(b):
            exponent = _sub(b, Num(1.0)) if not isinstance(b, Num) else Num(b.value - 1.0)
            return _mul(_mul(b, _pow_node(a, exponent)), da)
        power = _pow_node(a, b)
        if var not in depends_on(a):
            return _mul(_mul(power, Call("log", (a,))), db)
        inner = _add(_mul(db, Call("log", (a,))), _div_node(_mul(b, da), a))
        return _mul(power, inner)
    if isinstance(node, Call):
        arg = node.args[0]
        d = derive_s(arg, var)
        if d is None:
            return None
        if node.fn == "exp":
            return _mul(node, d)
        if node.fn == "log":
            return _div_node(d, arg)
        if node.fn == "sqrt":
            return _div_node(d, _mul(Num(2.0), node))
        return None
    raise TypeError(f"not an expression node: {node!r}")
