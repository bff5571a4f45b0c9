"""Tree-walking evaluator; works on floats and on numpy arrays elementwise."""
from __future__ import annotations

import numpy as np

from .nodes import BinOp, Call, Neg, Node, Num, Param, Var
from .parser import DSLError


class DSLDomainError(DSLError, ArithmeticError):
    """Operation outside its domain (log of nonpositive, division by zero, ...)."""


def _any(mask) -> bool:
    return bool(np.any(mask))


def _check_finite(result, what):
    if not _any(~np.isfinite(result)):
        return result
    raise DSLDomainError(f"{what} produced a non-finite value")


def _power(base, expo):
    expo_arr = np.asarray(expo)
    if _any((np.asarray(base) < 0) & (expo_arr != np.round(expo_arr))):
        raise DSLDomainError("negative base with non-integer exponent")
    if _any((np.asarray(base) == 0) & (expo_arr < 0)):
        raise DSLDomainError("zero raised to a negative power")
    with np.errstate(over="ignore"):
        out = np.power(np.asarray(base, dtype=float), expo_arr.astype(float))
    return _check_finite(out, "power")


def _unary(func, a):
    if func == "exp":
        with np.errstate(over="ignore"):
            return _check_finite(np.exp(a), "exp")
    if func == "log":
        if _any(np.asarray(a) <= 0):
            raise DSLDomainError("log of a nonpositive value")
        return np.log(a)
    if func == "sqrt":
        if _any(np.asarray(a) < 0):
            raise DSLDomainError("sqrt of a negative value")
        return np.sqrt(a)
    if func == "sin":
        return np.sin(a)
    if func == "cos":
        return np.cos(a)
    if func == "abs":
        return np.abs(a)
    raise DSLError(f"unknown function {func}")


def evaluate(node: Node, env: dict):
    """Evaluate ``node`` with variables and parameters looked up in ``env``.

    Operands are evaluated left to right; no reassociation takes place, so
    results are bit-reproducible for a fixed tree and input.
    """
    if isinstance(node, Num):
        return node.value
    if isinstance(node, (Var, Param)):
        try:
            return env[node.name]
        except KeyError:
            raise DSLError(f"unbound name {node.name!r}") from None
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, BinOp):
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        op = node.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if _any(np.asarray(b) == 0):
                raise DSLDomainError("division by zero")
            return a / b
        if op == "^":
            return _power(a, b)
        raise DSLError(f"unknown operator {op}")
    if isinstance(node, Call):
        args = [evaluate(a, env) for a in node.args]
        if node.func == "min":
            return np.minimum(args[0], args[1])
        if node.func == "max":
            return np.maximum(args[0], args[1])
        return _unary(node.func, args[0])
    raise TypeError(f"not an expression node: {node!r}")
