"""Arithmetic expression language for potentials F(x, y[, z])."""
from .derive import KinkWarning
from .evaluate import DSLDomainError
from .expression import Expression, differentiate, eval_expression, parse
from .nodes import BinOp, Call, Neg, Num, Param, Var, to_source
from .parser import ArityError, DSLError, DSLSyntaxError, UnknownIdentifier

__all__ = [
    "ArityError", "BinOp", "Call", "DSLDomainError", "DSLError", "DSLSyntaxError", "Expression",
    "KinkWarning", "Neg", "Num", "Param", "UnknownIdentifier", "Var", "differentiate",
    "eval_expression", "parse", "to_source",
]
