"""Forward symbolic differentiation with 0/1 identity simplification."""
from __future__ import annotations

import warnings

from .nodes import BinOp, Call, Neg, Node, Num, Param, Var, free_names


class KinkWarning(UserWarning):
    """Derivative of abs/min/max: valid only away from the kink set."""


def _const(node):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg) and isinstance(node.operand, Num):
        return -node.operand.value
    return None


def num(value: float) -> Node:
    value = float(value)
    return Neg(Num(-value)) if value < 0 else Num(value + 0.0)


def neg(a):
    if isinstance(a, Neg):
        return a.operand
    c = _const(a)
    if c is not None:
        return num(-c)
    return Neg(a)


def add(a, b):
    ca, cb = _const(a), _const(b)
    if ca == 0:
        return b
    if cb == 0:
        return a
    if ca is not None and cb is not None:
        return num(ca + cb)
    return BinOp("+", a, b)


def sub(a, b):
    ca, cb = _const(a), _const(b)
    if cb == 0:
        return a
    if ca == 0:
        return neg(b)
    if ca is not None and cb is not None:
        return num(ca - cb)
    return BinOp("-", a, b)


def mul(a, b):
    ca, cb = _const(a), _const(b)
    if ca == 0 or cb == 0:
        return Num(0.0)
    if ca == 1:
        return b
    if cb == 1:
        return a
    if ca == -1:
        return neg(b)
    if cb == -1:
        return neg(a)
    if ca is not None and cb is not None:
        return num(ca * cb)
    return BinOp("*", a, b)


def div(a, b):
    ca, cb = _const(a), _const(b)
    if ca == 0:
        return Num(0.0)
    if cb == 1:
        return a
    if ca is not None and cb is not None and cb != 0:
        return num(ca / cb)
    return BinOp("/", a, b)


def power(a, b):
    cb = _const(b)
    if cb == 1:
        return a
    if cb == 0:
        return Num(1.0)
    return BinOp("^", a, b)


def call(func, *args):
    return Call(func, tuple(args))


def derivative(node: Node, var: str) -> Node:
    """d(node)/d(var). Warns with :class:`KinkWarning` through abs/min/max."""
    if isinstance(node, Num) or isinstance(node, Param):
        return Num(0.0)
    if isinstance(node, Var):
        return Num(1.0 if node.name == var else 0.0)
    if var not in free_names(node):
        return Num(0.0)
    if isinstance(node, Neg):
        return neg(derivative(node.operand, var))
    if isinstance(node, BinOp):
        u, v = node.left, node.right
        du, dv = derivative(u, var), derivative(v, var)
        if node.op == "+":
            return add(du, dv)
        if node.op == "-":
            return sub(du, dv)
        if node.op == "*":
            return add(mul(du, v), mul(u, dv))
        if node.op == "/":
            return div(sub(mul(du, v), mul(u, dv)), power(v, Num(2.0)))
        if node.op == "^":
            if var not in free_names(v):
                c = _const(v)
                expo = num(c - 1) if c is not None else sub(v, Num(1.0))
                return mul(mul(v, power(u, expo)), du)
            return mul(node, add(mul(dv, call("log", u)), div(mul(v, du), u)))
    if isinstance(node, Call):
        f = node.func
        if f in ("min", "max"):
            warnings.warn(f"derivative of {f} is undefined where its arguments tie", KinkWarning,
                          stacklevel=2)
            u, v = node.args
            du, dv = derivative(u, var), derivative(v, var)
            d = sub(u, v)
            sign = div(d, call("abs", d))
            jump = mul(sign, sub(du, dv))
            both = add(du, dv)
            return div(sub(both, jump) if f == "min" else add(both, jump), Num(2.0))
        (u,) = node.args
        du = derivative(u, var)
        if f == "exp":
            return mul(node, du)
        if f == "log":
            return div(du, u)
        if f == "sin":
            return mul(call("cos", u), du)
        if f == "cos":
            return neg(mul(call("sin", u), du))
        if f == "sqrt":
            return div(du, mul(Num(2.0), node))
        if f == "abs":
            warnings.warn("derivative of abs is undefined at zero", KinkWarning, stacklevel=2)
            return mul(div(u, node), du)
    raise TypeError(f"cannot differentiate {node!r}")
