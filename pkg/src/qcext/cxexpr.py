"""Closed-form complex expressions in ``z`` and ``conj(z)``.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := number ['i'] | 'i' | 'z' | func '(' expr ')' | '(' expr ')'
    func    := 'conj' | 'exp' | 'log' | 'sqrt'

Expressions are immutable trees. Evaluation is vectorised over numpy arrays
and uses principal branches for ``log`` and ``sqrt``; a non-integer power
``u^w`` is ``exp(w*log(u))``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Conj",
    "Neg",
    "BinOp",
    "Pow",
    "Func",
    "ExprError",
    "ExprSyntaxError",
    "EvaluationError",
    "PoleError",
    "BranchPointError",
    "parse",
    "to_text",
    "evaluate",
    "evaluate_many",
    "wirtinger_dz",
    "wirtinger_dzbar",
    "is_holomorphic",
    "fd_wirtinger",
    "const",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "conj",
    "power",
    "func",
    "Z",
]

FUNCTIONS = ("exp", "log", "sqrt")


class ExprError(ValueError):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvaluationError(ExprError, ArithmeticError):
    """Evaluation failed at a specific point."""

    def __init__(self, message: str, point: complex):
        super().__init__(f"{message} at z={point!r}")
        self.point = complex(point)


class PoleError(EvaluationError):
    pass


class BranchPointError(EvaluationError):
    pass


# --------------------------------------------------------------------------
# Nodes


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return power(self, _coerce(n))

    def __str__(self) -> str:
        return to_text(self)

    def __call__(self, z):
        return evaluate(self, z)


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: complex


@dataclass(frozen=True, eq=False)
class Var(Expr):
    pass


@dataclass(frozen=True, eq=False)
class Conj(Expr):
    arg: Expr


@dataclass(frozen=True, eq=False)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=False)
class BinOp(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=False)
class Pow(Expr):
    base: Expr
    exponent: complex


@dataclass(frozen=True, eq=False)
class Func(Expr):
    name: str
    arg: Expr


Z = Var()
ZERO = Const(0j)
ONE = Const(1 + 0j)


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return Const(complex(x))
    raise TypeError(f"cannot use {type(x).__name__} in an expression")


def _is_const(e: Expr, value=None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


# --------------------------------------------------------------------------
# Smart constructors (constant folding only)


def const(value) -> Const:
    return Const(complex(value))


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    if _is_const(b, 1):
        return a
    if _is_const(a, 0) and not _is_const(b, 0):
        return ZERO
    return BinOp("/", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def conj(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(a.value.conjugate())
    if isinstance(a, Conj):
        return a.arg
    return Conj(a)


def power(base: Expr, exponent) -> Expr:
    if isinstance(exponent, Expr):
        if not isinstance(exponent, Const):
            raise ExprError("exponent must be a constant")
        w = exponent.value
    else:
        w = complex(exponent)
    if w == 0:
        return ONE
    if w == 1:
        return base
    if isinstance(base, Const):
        try:
            return Const(_pow_scalar(base.value, w))
        except ZeroDivisionError:
            pass
    return Pow(base, w)


def func(name: str, arg: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ExprError(f"unknown function {name!r}")
    if isinstance(arg, Const):
        v = arg.value
        if name == "exp":
            return Const(complex(np.exp(v)))
        if name == "sqrt":
            return Const(complex(np.sqrt(v)))
        if v != 0:
            return Const(complex(np.log(v)))
    return Func(name, arg)


def _int_exponent(w: complex):
    if w.imag == 0 and float(w.real).is_integer() and abs(w.real) <= 1 << 20:
        return int(w.real)
    return None


def _pow_scalar(b: complex, w: complex) -> complex:
    n = _int_exponent(w)
    if n is not None:
        if n < 0 and b == 0:
            raise ZeroDivisionError
        return complex(b**n)
    if b == 0:
        if w.real > 0:
            return 0j
        raise ZeroDivisionError
    return complex(np.exp(w * np.log(b)))


# --------------------------------------------------------------------------
# Tokenizer and parser

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i(?![A-Za-z0-9_]))?"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        start = m.start(m.lastgroup) if m.lastgroup != "imag" else m.start("num")
        if m.group("num") is not None:
            value = float(m.group("num"))
            tokens.append(("num", complex(0, value) if m.group("imag") else complex(value), start))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(message, _byte_offset(self.text, tok[2]))

    def expect(self, op):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != op:
            self.error(f"expected {op!r}")
        return self.take()

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise ExprSyntaxError("empty expression", 0)
        e = self.expr()
        if self.peek()[0] != "end":
            self.error("unexpected token")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def unary(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return neg(self.unary())
        if tok[0] == "op" and tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            exp_tok = self.peek()
            exponent = self.unary()
            if not isinstance(exponent, Const):
                self.error("exponent must be a constant", exp_tok)
            return power(base, exponent)
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        kind, value, _ = tok
        if kind == "num":
            self.take()
            return Const(value)
        if kind == "name":
            self.take()
            if value == "z":
                return Z
            if value == "i":
                return Const(1j)
            if value == "conj" or value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return conj(arg) if value == "conj" else func(value, arg)
            self.error(f"unknown identifier {value!r}", tok)
        if kind == "op" and value == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected token {value!r}")


def parse(text) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises :class:`ExprSyntaxError` (with a byte offset) on malformed input,
    including empty input and unknown identifiers.
    """
    if isinstance(text, Expr):
        return text
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Printing


def _fmt_real(x: float) -> str:
    if not math.isfinite(x):
        raise ExprError(f"cannot print non-finite constant {x}")
    return repr(float(x)).replace("inf", "")


def _fmt_const(v: complex) -> str:
    re_, im = _fmt_real(abs(v.real)), _fmt_real(abs(v.imag))
    sign_re = "-" if math.copysign(1.0, v.real) < 0 else ""
    sign_im = "-" if math.copysign(1.0, v.imag) < 0 else "+"
    return f"({sign_re}{re_}{sign_im}{im}i)"


def to_text(e: Expr) -> str:
    """Fully parenthesised text form; ``parse(to_text(e))`` evaluates like ``e``."""
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return "z"
    if isinstance(e, Conj):
        return f"conj({to_text(e.arg)})"
    if isinstance(e, Neg):
        return f"(-{to_text(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Pow):
        return f"({to_text(e.base)}^{_fmt_const(e.exponent)})"
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    raise TypeError(type(e))


# --------------------------------------------------------------------------
# Evaluation


def _witness(z, bad) -> complex:
    zb, bb = np.broadcast_arrays(np.asarray(z), np.asarray(bad))
    return complex(zb[bb][0])


def _int_power(x: np.ndarray, n: int) -> np.ndarray:
    if n < 0:
        return 1.0 / _int_power(x, -n)
    result = np.ones_like(x)
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _eval(e: Expr, z: np.ndarray, memo: dict):
    key = id(e)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, Const):
        out = np.complex128(e.value)
    elif isinstance(e, Var):
        out = z
    elif isinstance(e, Conj):
        out = np.conj(_eval(e.arg, z, memo))
    elif isinstance(e, Neg):
        out = -_eval(e.arg, z, memo)
    elif isinstance(e, BinOp):
        a = _eval(e.left, z, memo)
        b = _eval(e.right, z, memo)
        if e.op == "+":
            out = a + b
        elif e.op == "-":
            out = a - b
        elif e.op == "*":
            out = a * b
        else:
            bad = np.asarray(b) == 0
            if np.any(bad):
                raise PoleError("division by zero", _witness(z, bad))
            out = a / b
    elif isinstance(e, Pow):
        b = _eval(e.base, z, memo)
        n = _int_exponent(e.exponent)
        if n is not None:
            if n < 0:
                bad = np.asarray(b) == 0
                if np.any(bad):
                    raise PoleError("negative power of zero", _witness(z, bad))
            out = _int_power(np.asarray(b, dtype=complex), n)
        else:
            b = np.asarray(b, dtype=complex)
            zero = b == 0
            if np.any(zero) and e.exponent.real <= 0:
                raise PoleError("non-positive power of zero", _witness(z, zero))
            safe = np.where(zero, 1.0, b)
            out = np.where(zero, 0j, np.exp(e.exponent * np.log(safe)))
    elif isinstance(e, Func):
        a = np.asarray(_eval(e.arg, z, memo), dtype=complex)
        if e.name == "exp":
            out = np.exp(a)
        elif e.name == "sqrt":
            out = np.sqrt(a)
        else:
            zero = a == 0
            if np.any(zero):
                raise BranchPointError("log of zero", _witness(z, zero))
            out = np.log(a)
    else:
        raise TypeError(type(e))
    # keep e alive so id() stays unique for the lifetime of memo
    memo[key] = (e, out)
    return out


def evaluate_many(exprs: Iterable[Expr], z, memo: dict | None = None) -> list:
    """Evaluate several expressions at the same points, sharing subtrees."""
    scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(zz)):
        raise ExprError("evaluation point must be finite")
    memo = {} if memo is None else memo
    out = []
    with np.errstate(all="ignore"):
        for e in exprs:
            v = np.broadcast_to(_eval(e, zz, memo), zz.shape)
            out.append(complex(v) if scalar else np.array(v, dtype=complex))
    return out


def evaluate(e: Expr, z) -> Union[complex, np.ndarray]:
    """Evaluate ``e`` at a point or an array of points."""
    return evaluate_many([e], z)[0]


# --------------------------------------------------------------------------
# Wirtinger calculus


def _diff(e: Expr, bar: bool, cache: dict) -> Expr:
    key = (id(e), bar)
    hit = cache.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, Const):
        d = ZERO
    elif isinstance(e, Var):
        d = ZERO if bar else ONE
    elif isinstance(e, Conj):
        # d/dz conj(u) = conj(du/dzbar) and vice versa
        d = conj(_diff(e.arg, not bar, cache))
    elif isinstance(e, Neg):
        d = neg(_diff(e.arg, bar, cache))
    elif isinstance(e, BinOp):
        u, v = e.left, e.right
        du, dv = _diff(u, bar, cache), _diff(v, bar, cache)
        if e.op == "+":
            d = add(du, dv)
        elif e.op == "-":
            d = sub(du, dv)
        elif e.op == "*":
            d = add(mul(du, v), mul(u, dv))
        else:
            d = div(sub(mul(du, v), mul(u, dv)), power(v, 2))
    elif isinstance(e, Pow):
        du = _diff(e.base, bar, cache)
        d = mul(mul(Const(e.exponent), power(e.base, e.exponent - 1)), du)
    elif isinstance(e, Func):
        du = _diff(e.arg, bar, cache)
        if e.name == "exp":
            d = mul(e, du)
        elif e.name == "log":
            d = div(du, e.arg)
        else:
            d = div(du, mul(Const(2), e))
    else:
        raise TypeError(type(e))
    cache[key] = (e, d)
    return d


def wirtinger_dz(e: Expr) -> Expr:
    """Symbolic d/dz treating z and conj(z) as independent."""
    return _diff(e, False, {})


def wirtinger_dzbar(e: Expr) -> Expr:
    """Symbolic d/dzbar treating z and conj(z) as independent."""
    return _diff(e, True, {})


def is_holomorphic(e: Expr) -> bool:
    """True when the tree contains no conj node."""
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Conj):
            return False
        if isinstance(node, (Neg, Func)):
            stack.append(node.arg)
        elif isinstance(node, BinOp):
            stack.extend((node.left, node.right))
        elif isinstance(node, Pow):
            stack.append(node.base)
    return True


def fd_wirtinger(f, z, step=None):
    """Four-point central-difference Wirtinger derivatives ``(f_z, f_zbar)``.

    ``f`` is any vectorised callable. The default step is
    ``1e-6 * max(1, |z|)``.
    """
    zz = np.asarray(z, dtype=complex)
    h = 1e-6 * np.maximum(1.0, np.abs(zz)) if step is None else np.asarray(step, dtype=float)
    dx = (np.asarray(f(zz + h)) - np.asarray(f(zz - h))) / (2 * h)
    dy = (np.asarray(f(zz + 1j * h)) - np.asarray(f(zz - 1j * h))) / (2 * h)
    fz = 0.5 * (dx - 1j * dy)
    fzb = 0.5 * (dx + 1j * dy)
    if np.ndim(z) == 0:
        return complex(fz), complex(fzb)
    return fz, fzb
