"""Closed-form expressions in the surface parameters ``s`` and ``t``.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' base)?
    base   := number | 's' | 't' | 'pi'
            | func '(' expr ')' | '(' expr ')' | '-' base
    func   := sin | cos | tan | exp | log | sqrt

Unary minus binds tighter than ``^``, so ``-s^2`` is ``(-s)^2``.  Exponents
must be free of ``s`` and ``t``; this keeps :func:`differentiate` closed
over the function set.  Expressions are immutable trees and every
operation here is pure.
"""
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt")
VARIABLES = ("s", "t")
NAMED_CONSTANTS = {"pi": math.pi}


class Expr:
    """Base class of expression nodes."""

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("constants must be finite")


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class NamedConst(Expr):
    name: str


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # 'neg' or a name from FUNCTIONS
    arg: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # add, sub, mul, div, pow
    left: Expr
    right: Expr


# Convenience constructors, mostly for tests and for building derivatives.
def const(x):
    return Const(float(x))


def add(a, b):
    return Binary("add", a, b)


def sub(a, b):
    return Binary("sub", a, b)


def mul(a, b):
    return Binary("mul", a, b)


def div(a, b):
    return Binary("div", a, b)


def pow_(a, b):
    return Binary("pow", a, b)


def neg(a):
    return Unary("neg", a)


def func(name, a):
    return Unary(name, a)


S = Var("s")
T = Var("t")
PI = NamedConst("pi")
ZERO = Const(0.0)
ONE = Const(1.0)


# --------------------------------------------------------------------------
# Tokenizer and parser
# --------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text):
    tokens = []
    pos = 0
    raw = text.encode("utf-8")
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            if not rest.strip():
                break
            stripped = len(rest) - len(rest.lstrip())
            offset = len(text[: pos + stripped].encode("utf-8"))
            raise ParseError(
                "unexpected character %r" % rest.lstrip()[0],
                offset,
                {"number", "identifier", "operator"},
            )
        kind = m.lastgroup
        start = len(text[: m.start(kind)].encode("utf-8"))
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, offset = self.peek()
        if text != value or kind not in ("op",):
            raise ParseError("unexpected %s" % _describe(self.peek()), offset, {value})
        return self.take()

    def parse(self):
        e = self.expr()
        kind, _, offset = self.peek()
        if kind != "end":
            raise ParseError(
                "unexpected %s" % _describe(self.peek()),
                offset,
                {"+", "-", "*", "/", "^", "end of input"},
            )
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = "add" if self.take()[1] == "+" else "sub"
            e = Binary(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = "mul" if self.take()[1] == "*" else "div"
            e = Binary(op, e, self.factor())
        return e

    def factor(self):
        b = self.base()
        if self.peek()[:2] == ("op", "^"):
            _, _, offset = self.take()
            exponent = self.base()
            if free_variables(exponent):
                raise ParseError("exponent must not depend on s or t", offset)
            b = Binary("pow", b, exponent)
        return b

    def base(self):
        kind, text, offset = self.peek()
        if kind == "number":
            self.take()
            return Const(float(text))
        if kind == "name":
            self.take()
            if text in VARIABLES:
                return Var(text)
            if text in NAMED_CONSTANTS:
                return NamedConst(text)
            if text in FUNCTIONS:
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return Unary(text, inner)
            raise UnknownIdentifier(text, offset)
        if kind == "op" and text == "(":
            self.take()
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "op" and text == "-":
            self.take()
            return Unary("neg", self.base())
        raise ParseError(
            "unexpected %s" % _describe(self.peek()),
            offset,
            {"number", "s", "t", "pi", "function", "(", "-"},
        )


def _describe(tok):
    kind, text, _ = tok
    return "end of input" if kind == "end" else "%r" % text


def parse(text):
    """Parse expression text into an :class:`Expr` tree."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0, {"number", "s", "t", "pi", "("})
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "pow": 3}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _fmt_number(x):
    if x == int(x) and abs(x) < 1e15:
        text = str(int(abs(x)))
    else:
        text = repr(abs(x))
    return "-" + text if x < 0 else text


def to_string(e):
    """Render ``e`` so that ``parse(to_string(e))`` rebuilds the same tree.

    Parentheses are emitted only where the grammar needs them.  (A negative
    :class:`Const`, which the parser never produces, is printed as a negated
    literal; it re-parses to an equal value rather than an equal tree.)
    """
    if isinstance(e, Const):
        return _fmt_number(e.value)
    if isinstance(e, (Var, NamedConst)):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            return "-" + _as_base(e.arg)
        return "%s(%s)" % (e.op, to_string(e.arg))
    if isinstance(e, Binary):
        if e.op == "pow":
            return "%s^%s" % (_as_base(e.left), _as_base(e.right))
        p = _PREC[e.op]
        left = to_string(e.left)
        if isinstance(e.left, Binary) and _PREC[e.left.op] < p:
            left = "(%s)" % left
        right = to_string(e.right)
        if isinstance(e.right, Binary) and e.right.op != "pow" and _PREC[e.right.op] <= p:
            right = "(%s)" % right
        if p == 1:
            return "%s %s %s" % (left, _SYMBOL[e.op], right)
        return "%s%s%s" % (left, _SYMBOL[e.op], right)
    raise TypeError("not an expression: %r" % (e,))


def _as_base(e):
    text = to_string(e)
    if isinstance(e, Binary):
        return "(%s)" % text
    return text


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------


def free_variables(e):
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Unary):
        return free_variables(e.arg)
    if isinstance(e, Binary):
        return free_variables(e.left) | free_variables(e.right)
    return set()


def evaluate(e, s=0.0, t=0.0):
    """Evaluate ``e`` at ``(s, t)``.

    ``s`` and ``t`` may be scalars or broadcastable arrays.  Raises
    :class:`DomainError` for log of a non-positive number, sqrt of a
    negative number, division by zero, or any non-finite result.
    """
    scalar = np.ndim(s) == 0 and np.ndim(t) == 0
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(s.shape, t.shape)
    with np.errstate(all="ignore"):
        out = _eval(e, s, t)
    out = np.broadcast_to(out, shape)
    if not np.all(np.isfinite(out)):
        raise DomainError("non-finite value while evaluating %s" % to_string(e))
    return float(out) if scalar else np.array(out)


def _eval(e, s, t):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return s if e.name == "s" else t
    if isinstance(e, NamedConst):
        return NAMED_CONSTANTS[e.name]
    if isinstance(e, Unary):
        x = _eval(e.arg, s, t)
        op = e.op
        if op == "neg":
            return -x
        if op == "log" and np.any(np.asarray(x) <= 0):
            raise DomainError("log of a non-positive number in %s" % to_string(e))
        if op == "sqrt" and np.any(np.asarray(x) < 0):
            raise DomainError("sqrt of a negative number in %s" % to_string(e))
        return getattr(np, op)(x)
    if isinstance(e, Binary):
        a = _eval(e.left, s, t)
        b = _eval(e.right, s, t)
        if e.op == "add":
            return a + b
        if e.op == "sub":
            return a - b
        if e.op == "mul":
            return a * b
        if e.op == "div":
            if np.any(np.asarray(b) == 0):
                raise DomainError("division by zero in %s" % to_string(e))
            return a / b
        # pow: exponent is constant
        a = np.asarray(a, dtype=float)
        if b != int(b) and np.any(a < 0):
            raise DomainError("fractional power of a negative number in %s" % to_string(e))
        if b < 0 and np.any(a == 0):
            raise DomainError("negative power of zero in %s" % to_string(e))
        return np.power(a, b)
    raise TypeError("not an expression: %r" % (e,))


# --------------------------------------------------------------------------
# Differentiation and simplification
# --------------------------------------------------------------------------


def differentiate(e, var):
    """Exact partial derivative of ``e`` with respect to ``'s'`` or ``'t'``."""
    if var not in VARIABLES:
        raise ValueError("can only differentiate with respect to s or t")
    return simplify(_d(e, var))


def _d(e, v):
    if isinstance(e, (Const, NamedConst)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == v else ZERO
    if isinstance(e, Unary):
        u = e.arg
        du = _d(u, v)
        op = e.op
        if op == "neg":
            return neg(du)
        if op == "sin":
            return mul(func("cos", u), du)
        if op == "cos":
            return neg(mul(func("sin", u), du))
        if op == "tan":
            return div(du, pow_(func("cos", u), const(2)))
        if op == "exp":
            return mul(e, du)
        if op == "log":
            return div(du, u)
        if op == "sqrt":
            return div(du, mul(const(2), e))
        raise ValueError(op)
    a, b = e.left, e.right
    if e.op == "add":
        return add(_d(a, v), _d(b, v))
    if e.op == "sub":
        return sub(_d(a, v), _d(b, v))
    if e.op == "mul":
        if v not in free_variables(a):
            return mul(a, _d(b, v))
        if v not in free_variables(b):
            return mul(_d(a, v), b)
        return add(mul(_d(a, v), b), mul(a, _d(b, v)))
    if e.op == "div":
        if v not in free_variables(b):
            return div(_d(a, v), b)
        return div(sub(mul(_d(a, v), b), mul(a, _d(b, v))), pow_(b, const(2)))
    # pow with constant exponent
    return mul(mul(b, pow_(a, sub(b, ONE))), _d(a, v))


def _is(e, x):
    return isinstance(e, Const) and e.value == x


def simplify(e):
    """Constant folding, 0/1 identities and double-negation removal."""
    if isinstance(e, Unary):
        a = simplify(e.arg)
        if e.op == "neg":
            if isinstance(a, Const):
                return Const(-a.value)
            if isinstance(a, Unary) and a.op == "neg":
                return a.arg
            return Unary("neg", a)
        if isinstance(a, Const):
            folded = _fold(Unary(e.op, a))
            if folded is not None:
                return folded
        return Unary(e.op, a)
    if not isinstance(e, Binary):
        return e
    a, b = simplify(e.left), simplify(e.right)
    op = e.op
    if isinstance(a, Const) and isinstance(b, Const):
        folded = _fold(Binary(op, a, b))
        if folded is not None:
            return folded
    if op == "add":
        if _is(a, 0):
            return b
        if _is(b, 0):
            return a
        if isinstance(b, Unary) and b.op == "neg":
            return simplify(sub(a, b.arg))
    elif op == "sub":
        if _is(b, 0):
            return a
        if _is(a, 0):
            return simplify(neg(b))
        if isinstance(b, Unary) and b.op == "neg":
            return simplify(add(a, b.arg))
    elif op == "mul":
        if _is(a, 0) or _is(b, 0):
            return ZERO
        if _is(a, 1):
            return b
        if _is(b, 1):
            return a
        if _is(a, -1):
            return simplify(neg(b))
        if _is(b, -1):
            return simplify(neg(a))
        if isinstance(a, Unary) and a.op == "neg":
            return simplify(neg(mul(a.arg, b)))
        if isinstance(b, Unary) and b.op == "neg":
            return simplify(neg(mul(a, b.arg)))
        if isinstance(b, Const) and not isinstance(a, Const):
            a, b = b, a
        if isinstance(a, Const) and isinstance(b, Binary) and b.op == "mul" and isinstance(b.left, Const):
            return simplify(mul(Const(a.value * b.left.value), b.right))
    elif op == "div":
        if _is(b, 1):
            return a
        if _is(a, 0):
            return ZERO
        if isinstance(a, Unary) and a.op == "neg":
            return simplify(neg(div(a.arg, b)))
    elif op == "pow":
        if _is(b, 1):
            return a
        if _is(b, 0):
            return ONE
    return Binary(op, a, b)


def _fold(e):
    try:
        value = evaluate(e)
    except DomainError:
        return None
    return Const(value)
