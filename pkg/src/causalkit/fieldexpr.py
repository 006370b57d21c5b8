"""Arithmetic field expressions compiled to vectorised samplers.

Grammar (standard precedence, ``^`` right-associative and binding tighter
than unary minus applied to its base):

    expr   :=  term (('+' | '-') term)*
    term   :=  unary (('*' | '/') unary)*
    unary  :=  ('+' | '-') unary | power
    power  :=  atom ('^' unary)?
    atom   :=  NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

Variables are ``t`` and ``x1 .. x9`` (spatial components); functions are
``sin, cos, exp, sqrt, abs, min, max``.  ``parse_field_expression`` returns a
pure sampler ``(t, x) -> scalar array`` where ``x`` has shape ``(..., dim)``.
Syntax errors carry the source offset; evaluating ``a/0`` or ``sqrt(-a)``
raises an evaluation error carrying the offending point.
"""
from __future__ import annotations

import re

import numpy as np

from .errors import ExpressionSyntaxError, FieldEvaluationError

_FUNCTIONS = {
    "sin": (np.sin, 1, 1),
    "cos": (np.cos, 1, 1),
    "exp": (np.exp, 1, 1),
    "sqrt": (np.sqrt, 1, 1),
    "abs": (np.abs, 1, 1),
    "min": (None, 2, None),
    "max": (None, 2, None),
}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            # skip over pure whitespace tail
            if src[pos:].strip() == "":
                break
            raise ExpressionSyntaxError(f"unexpected character {src[pos:].lstrip()[0]!r}", pos)
        if m.group("num") is not None:
            tokens.append(("num", float(m.group(0)), m.start() + len(m.group(0)) - len(m.group(0).lstrip())))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", None, len(src)))
    return tokens


# AST nodes are tuples: ("num", v) ("t",) ("x", i) ("neg", a)
# ("bin", op, a, b) ("call", name, [args])


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ExpressionSyntaxError(f"expected {op!r}", pos)
        return self.next()

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected trailing input {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                node = ("bin", val, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                node = ("bin", val, node, self.unary())
            else:
                return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.next()
            inner = self.unary()
            return inner if val == "+" else ("neg", inner)
        return self.power()

    def power(self):
        node = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            node = ("bin", "^", node, self.unary())
        return node

    def atom(self):
        kind, val, pos = self.next()
        if kind == "num":
            return ("num", val)
        if kind == "ident":
            nkind, nval, _ = self.peek()
            if nkind == "op" and nval == "(":
                if val not in _FUNCTIONS:
                    raise ExpressionSyntaxError(f"unknown function {val!r}", pos)
                self.next()
                args = [self.expr()]
                while True:
                    k2, v2, p2 = self.peek()
                    if k2 == "op" and v2 == ",":
                        self.next()
                        args.append(self.expr())
                    else:
                        break
                self.expect_op(")")
                _, min_args, max_args = _FUNCTIONS[val]
                if len(args) < min_args or (max_args is not None and len(args) > max_args):
                    raise ExpressionSyntaxError(
                        f"{val} takes {min_args}{'' if max_args == min_args else '+'} argument(s)", pos
                    )
                return ("call", val, args)
            if val == "t":
                return ("t",)
            m = re.fullmatch(r"x([1-9])", val)
            if m:
                return ("x", int(m.group(1)) - 1)
            raise ExpressionSyntaxError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ExpressionSyntaxError(f"expected a value, found {what}", pos)


def variables_used(node, acc=None):
    """Set of variable names appearing in an AST."""
    if acc is None:
        acc = set()
    tag = node[0]
    if tag == "t":
        acc.add("t")
    elif tag == "x":
        acc.add(f"x{node[1] + 1}")
    elif tag == "neg":
        variables_used(node[1], acc)
    elif tag == "bin":
        variables_used(node[2], acc)
        variables_used(node[3], acc)
    elif tag == "call":
        for a in node[2]:
            variables_used(a, acc)
    return acc


def _eval(node, t, x):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "t":
        return t
    if tag == "x":
        i = node[1]
        if i >= x.shape[-1]:
            raise FieldEvaluationError(f"variable x{i + 1} undefined in dimension {x.shape[-1]}")
        return x[..., i]
    if tag == "neg":
        return -_eval(node[1], t, x)
    if tag == "bin":
        op = node[1]
        a = _eval(node[2], t, x)
        b = _eval(node[3], t, x)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            bad = np.asarray(b) == 0
            if np.any(bad):
                raise FieldEvaluationError("division by zero", t, _first_bad_point(bad, x))
            return a / b
        # '^'
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.asarray(a, dtype=float) ** b
        bad = ~np.isfinite(out)
        if np.any(bad):
            raise FieldEvaluationError("non-finite power", t, _first_bad_point(bad, x))
        return out
    # call
    name = node[1]
    args = [_eval(a, t, x) for a in node[2]]
    if name == "min":
        out = args[0]
        for a in args[1:]:
            out = np.minimum(out, a)
        return out
    if name == "max":
        out = args[0]
        for a in args[1:]:
            out = np.maximum(out, a)
        return out
    fn = _FUNCTIONS[name][0]
    with np.errstate(invalid="ignore"):
        out = fn(np.asarray(args[0], dtype=float))
    bad = ~np.isfinite(out)
    if np.any(bad) and name in ("sqrt",):
        raise FieldEvaluationError(f"{name} domain error", t, _first_bad_point(bad, x))
    return out


def _first_bad_point(bad, x):
    bad = np.broadcast_to(bad, x.shape[:-1] if x.ndim > 1 else bad.shape)
    idx = np.argwhere(bad)
    if idx.size == 0:
        return None
    first = tuple(idx[0])
    return np.array(x[first]) if x.ndim > 1 else np.array(x)


def parse_field_expression(src: str):
    """Compile `src` into a pure sampler ``(t, x) -> ndarray``.

    ``x`` must have shape ``(..., dim)``; the result broadcasts over the
    leading axes.  The returned sampler carries the parsed AST on
    ``sampler.ast`` and the used variables on ``sampler.variables``.
    """
    ast = _Parser(src).parse()
    used = variables_used(ast)

    def sampler(t, x):
        x = np.asarray(x, dtype=float)
        out = _eval(ast, t, x)
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape[:-1]).copy()

    sampler.ast = ast
    sampler.variables = used
    sampler.source = src
    return sampler
