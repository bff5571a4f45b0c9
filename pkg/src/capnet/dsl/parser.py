"""Recursive-descent parser for potential expressions.

EBNF (frozen; mirrored in ``docs/grammar.ebnf``)::

    expr   = term , { ( "+" | "-" ) , term } ;
    term   = unary , { ( "*" | "/" ) , unary } ;
    unary  = "-" , unary | power ;
    power  = atom , [ "^" , unary ] ;                (* right-associative *)
    atom   = number | ident | ident , "(" , args , ")" | "(" , expr , ")" ;
    args   = expr , { "," , expr } ;
    number = digits , [ "." , [ digits ] ] , [ exponent ]
           | "." , digits , [ exponent ] ;
    exponent = ( "e" | "E" ) , [ "+" | "-" ] , digits ;
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .nodes import FUNCTIONS, BinOp, Call, Neg, Node, Num, Param, Var


class DSLError(Exception):
    pass


class DSLSyntaxError(DSLError, SyntaxError):
    """Parse failure. ``offset`` is 0-based; ``line``/``column`` are 1-based."""

    def __init__(self, message, src, offset):
        line = src.count("\n", 0, offset) + 1
        col = offset - (src.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{message} (line {line}, column {col})")
        self.msg = message
        self.offset = offset
        self.line = line
        self.column = col


class UnknownIdentifier(DSLSyntaxError):
    pass


class ArityError(DSLSyntaxError):
    pass


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(src: str):
    pos = 0
    out = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {src[pos]!r}", src, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", len(src)))
    return out


class _Parser:
    def __init__(self, src, variables, params):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0
        self.variables = set(variables)
        self.params = set(params)

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message, offset=None, cls=DSLSyntaxError):
        raise cls(message, self.src, self.tok.offset if offset is None else offset)

    def expect(self, text):
        if self.tok.text != text or self.tok.kind not in ("op",):
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            self.error(f"expected {text!r}, found {found}")
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            is_call = self.tok.kind == "op" and self.tok.text == "("
            if tok.text in FUNCTIONS:
                if not is_call:
                    self.error(f"function {tok.text!r} needs an argument list", tok.offset)
                return self.call(tok)
            if is_call:
                self.error(f"unknown function {tok.text!r}", tok.offset, UnknownIdentifier)
            if tok.text in self.variables:
                return Var(tok.text)
            if tok.text in self.params:
                return Param(tok.text)
            self.error(f"unknown identifier {tok.text!r}", tok.offset, UnknownIdentifier)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        self.error(f"expected an operand, found {found}")

    def call(self, name_tok: Token) -> Node:
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.i += 1
            args.append(self.expr())
        self.expect(")")
        arity = FUNCTIONS[name_tok.text]
        if len(args) != arity:
            self.error(f"{name_tok.text} takes {arity} argument(s), got {len(args)}", name_tok.offset,
                       ArityError)
        return Call(name_tok.text, tuple(args))


def parse_node(src: str, variables=("x", "y", "z"), params=()) -> Node:
    clash = set(variables) & set(params)
    if clash:
        raise ValueError(f"names used as both variable and parameter: {sorted(clash)}")
    bad = (set(variables) | set(params)) & set(FUNCTIONS)
    if bad:
        raise ValueError(f"names shadow functions: {sorted(bad)}")
    return _Parser(src, variables, params).parse()
