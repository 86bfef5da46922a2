"""Guard expressions over read (``v^r``) and written (``v^w``) variable copies.

Guards are immutable trees. Besides the core forms (``>=``, ``>``, ``=``,
addition, negation, conjunction and negation) the tree keeps the usual sugar
(``<``, ``<=``, ``!=``, disjunction) so that guards print back the way they
were written; evaluation and the SMT translation handle all of them directly.

Textual syntax accepted by :func:`parse_guard`::

    x^w >= 0 && (y^r < 4 || !flag^r)
    amount' > 0.5        # prime marks a written variable (ProM style)
    status == "open"     # strings are double quoted
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

from dpnalign.values import Sort, Value, format_value, parse_decimal

READ = "r"
WRITE = "w"

COMPARISONS = (">=", ">", "=", "!=", "<", "<=")
# mirror image used when the constant is on the left: k op x  <=>  x flip(op) k
FLIPPED = {">=": "<=", ">": "<", "=": "=", "!=": "!=", "<": ">", "<=": ">="}


class GuardError(ValueError):
    pass


class GuardSyntaxError(GuardError):
    pass


class GuardSortError(GuardError):
    pass


class UnboundVariable(KeyError):
    def __init__(self, name: str, mode: str):
        super().__init__(f"{name}^{mode}")
        self.name = name
        self.mode = mode

    def __str__(self) -> str:
        return f"unbound variable {self.name}^{self.mode}"


@dataclass(frozen=True)
class Var:
    name: str
    mode: str = READ

    def __str__(self) -> str:
        return f"{self.name}^{self.mode}"


@dataclass(frozen=True)
class Const:
    value: Value

    def __str__(self) -> str:
        return format_value(self.value)


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Cmp:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise GuardError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: "Expr"


Expr = Union[Var, Const, Add, Neg, Cmp, And, Or, Not]

TRUE = Const(True)


def conj(*args: Expr) -> Expr:
    parts = [a for a in args if a != TRUE]
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def annotated_vars(expr: Expr) -> frozenset:
    """Var(c): the set of ``(name, mode)`` pairs occurring in `expr`."""
    return frozenset((v.name, v.mode) for v in _walk(expr) if isinstance(v, Var))


def _walk(expr: Expr) -> Iterator[Expr]:
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (Add, Cmp)):
            stack.extend((node.left, node.right))
        elif isinstance(node, (Neg, Not)):
            stack.append(node.arg)
        elif isinstance(node, (And, Or)):
            stack.extend(node.args)


def atoms(expr: Expr) -> list:
    """Atomic formulas of a guard: comparisons and bare boolean leaves."""
    if isinstance(expr, (And, Or)):
        return [a for arg in expr.args for a in atoms(arg)]
    if isinstance(expr, Not):
        return atoms(expr.arg)
    return [expr]


def evaluate(expr: Expr, env: Mapping) -> Value:
    """Evaluate `expr` with annotated variables looked up as ``env[(name, mode)]``."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return env[(expr.name, expr.mode)]
        except KeyError:
            raise UnboundVariable(expr.name, expr.mode) from None
    if isinstance(expr, Add):
        return evaluate(expr.left, env) + evaluate(expr.right, env)
    if isinstance(expr, Neg):
        return -evaluate(expr.arg, env)
    if isinstance(expr, Cmp):
        lhs = evaluate(expr.left, env)
        rhs = evaluate(expr.right, env)
        return compare(expr.op, lhs, rhs)
    if isinstance(expr, And):
        return all(evaluate(a, env) for a in expr.args)
    if isinstance(expr, Or):
        return any(evaluate(a, env) for a in expr.args)
    if isinstance(expr, Not):
        return not evaluate(expr.arg, env)
    raise GuardError(f"not a guard expression: {expr!r}")


def compare(op: str, lhs: Value, rhs: Value) -> bool:
    if op == "=":
        return _same_kind(lhs, rhs) and lhs == rhs
    if op == "!=":
        return not (_same_kind(lhs, rhs) and lhs == rhs)
    if op == ">=":
        return lhs >= rhs
    if op == ">":
        return lhs > rhs
    if op == "<=":
        return lhs <= rhs
    if op == "<":
        return lhs < rhs
    raise GuardError(f"unknown comparison {op!r}")


def _same_kind(a: Value, b: Value) -> bool:
    # True == 1 in Python; values of different sorts are never equal here
    return isinstance(a, bool) == isinstance(b, bool) and isinstance(a, str) == isinstance(b, str)


# --- sort checking ---------------------------------------------------------

_LIT = "numeral"  # integer literal, fits both int and rat contexts


def check_sorts(expr: Expr, sorts: Mapping[str, Sort]) -> None:
    """Raise GuardSortError unless `expr` is a well-sorted boolean constraint."""
    if _formula_sort(expr, sorts) is not Sort.BOOL:
        raise GuardSortError(f"guard {to_text(expr)!r} is not a boolean formula")


def _formula_sort(expr: Expr, sorts: Mapping[str, Sort]):
    if isinstance(expr, (And, Or)):
        for a in expr.args:
            if _formula_sort(a, sorts) is not Sort.BOOL:
                raise GuardSortError(f"non-boolean operand {to_text(a)!r}")
        return Sort.BOOL
    if isinstance(expr, Not):
        if _formula_sort(expr.arg, sorts) is not Sort.BOOL:
            raise GuardSortError(f"non-boolean operand {to_text(expr.arg)!r}")
        return Sort.BOOL
    if isinstance(expr, Cmp):
        lhs = _term_sort(expr.left, sorts)
        rhs = _term_sort(expr.right, sorts)
        joined = _join(lhs, rhs)
        if joined is None:
            raise GuardSortError(f"incompatible operands in {to_text(expr)!r}")
        if expr.op not in ("=", "!=") and joined not in (Sort.INT, Sort.RAT, _LIT):
            raise GuardSortError(f"ordering on non-numeric sort in {to_text(expr)!r}")
        return Sort.BOOL
    return _term_sort(expr, sorts)


def _term_sort(expr: Expr, sorts: Mapping[str, Sort]):
    if isinstance(expr, Var):
        try:
            return sorts[expr.name]
        except KeyError:
            raise GuardSortError(f"undeclared variable {expr.name!r}") from None
    if isinstance(expr, Const):
        v = expr.value
        if isinstance(v, bool):
            return Sort.BOOL
        if isinstance(v, str):
            return Sort.STRING
        if isinstance(v, Fraction) and v.denominator != 1:
            return Sort.RAT
        return _LIT
    if isinstance(expr, Add):
        joined = _join(_term_sort(expr.left, sorts), _term_sort(expr.right, sorts))
        if joined not in (Sort.INT, Sort.RAT, _LIT):
            raise GuardSortError(f"addition on non-numeric operands in {to_text(expr)!r}")
        return joined
    if isinstance(expr, Neg):
        s = _term_sort(expr.arg, sorts)
        if s not in (Sort.INT, Sort.RAT, _LIT):
            raise GuardSortError(f"negation of non-numeric operand {to_text(expr)!r}")
        return s
    return _formula_sort(expr, sorts)


def _join(a, b):
    if a == b:
        return a
    if a == _LIT and b in (Sort.INT, Sort.RAT):
        return b
    if b == _LIT and a in (Sort.INT, Sort.RAT):
        return a
    return None


def term_sort(expr: Expr, sorts: Mapping[str, Sort]) -> Sort:
    """Sort of an arithmetic or atomic term; bare integer literals count as int."""
    s = _term_sort(expr, sorts)
    return Sort.INT if s == _LIT else s


# --- printing --------------------------------------------------------------

_PREC = {Or: 1, And: 2, Not: 3, Cmp: 4, Add: 5, Neg: 6}


def to_text(expr: Expr, prime_writes: bool = False) -> str:
    """Render a guard in the syntax accepted by :func:`parse_guard`."""
    return _text(expr, 0, prime_writes)


def _text(expr: Expr, outer: int, prime: bool) -> str:
    if isinstance(expr, Var):
        if prime:
            return expr.name + ("'" if expr.mode == WRITE else "")
        return str(expr)
    if isinstance(expr, Const):
        v = expr.value
        if isinstance(v, Fraction) and v.denominator != 1:
            s = f"{v.numerator}/{v.denominator}"
            return f"({s})" if outer > 0 or v < 0 else s
        if isinstance(v, (int, Fraction)) and not isinstance(v, bool) and v < 0:
            return f"({format_value(v)})"
        return format_value(v)
    prec = _PREC[type(expr)]
    if isinstance(expr, Or):
        body = " || ".join(_text(a, prec + 1, prime) for a in expr.args)
    elif isinstance(expr, And):
        body = " && ".join(_text(a, prec + 1, prime) for a in expr.args)
    elif isinstance(expr, Not):
        body = "!" + _text(expr.arg, prec + 1, prime)
    elif isinstance(expr, Cmp):
        body = f"{_text(expr.left, prec + 1, prime)} {expr.op} {_text(expr.right, prec + 1, prime)}"
    elif isinstance(expr, Add):
        body = f"{_text(expr.left, prec, prime)} + {_text(expr.right, prec + 1, prime)}"
    else:
        body = "-" + _text(expr.arg, prec + 1, prime)
    return f"({body})" if prec < outer else body


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<op>&&|\|\||==|!=|<>|>=|<=|[<>=!&|()+\-/]|≥|≤|≠|∧|∨|¬)
  | (?P<id>[A-Za-z_][A-Za-z0-9_.:]*(?:\^[rw]|')?)
    """,
    re.VERBOSE,
)

_OP_ALIASES = {
    "==": "=", "<>": "!=", "≠": "!=", "≥": ">=", "≤": "<=",
    "&": "&&", "∧": "&&", "|": "||", "∨": "||", "¬": "!",
}
_WORD_OPS = {"and": "&&", "or": "||", "not": "!"}


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise GuardSyntaxError(f"unexpected character {text[pos]!r} at offset {pos} in {text!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        tok = m.group()
        if kind == "op":
            tokens.append(("op", _OP_ALIASES.get(tok, tok)))
        elif kind == "id" and tok.lower() in _WORD_OPS:
            tokens.append(("op", _WORD_OPS[tok.lower()]))
        elif kind == "id" and tok.lower() in ("true", "false"):
            tokens.append(("lit", tok.lower() == "true"))
        elif kind == "num":
            tokens.append(("num", tok))
        elif kind == "str":
            tokens.append(("lit", re.sub(r"\\(.)", r"\1", tok[1:-1])))
        else:
            tokens.append(("id", tok))
    return tokens


class _Parser:
    def __init__(self, text: str, sorts):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.sorts = sorts

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            want = value or "a token"
            raise GuardSyntaxError(f"expected {want!r} at token {self.pos} in {self.text!r}")
        self.pos += 1
        return tok

    def at(self, value) -> bool:
        return self.peek() == ("op", value)

    def parse(self) -> Expr:
        expr = self.disjunction()
        if self.pos != len(self.tokens):
            raise GuardSyntaxError(f"trailing input at token {self.pos} in {self.text!r}")
        return expr

    def disjunction(self):
        args = [self.conjunction()]
        while self.at("||"):
            self.take()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self):
        args = [self.negation()]
        while self.at("&&"):
            self.take()
            args.append(self.negation())
        return args[0] if len(args) == 1 else And(tuple(args))

    def negation(self):
        if self.at("!"):
            self.take()
            return Not(self.negation())
        return self.comparison()

    def comparison(self):
        lhs = self.additive()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in COMPARISONS:
            self.take()
            return Cmp(tok[1], lhs, self.additive())
        return lhs

    def additive(self):
        expr = self.unary()
        while self.at("+") or self.at("-"):
            op = self.take()[1]
            rhs = self.unary()
            expr = Add(expr, rhs if op == "+" else Neg(rhs))
        return expr

    def unary(self):
        if self.at("-"):
            self.take()
            arg = self.unary()
            if isinstance(arg, Const) and not isinstance(arg.value, (bool, str)):
                return Const(-arg.value)
            return Neg(arg)
        return self.primary()

    def primary(self):
        kind, tok = self.peek()
        if kind == "op" and tok == "(":
            self.take()
            expr = self.disjunction()
            self.take(")")
            return expr
        if kind == "lit":
            self.take()
            return Const(tok)
        if kind == "num":
            self.take()
            value = parse_decimal(tok)
            if self.at("/") and self.tokens[self.pos + 1][0] == "num":
                self.take()
                value = value / parse_decimal(self.take()[1])
            if value.denominator == 1 and "." not in tok and "e" not in tok.lower():
                return Const(int(value))
            return Const(value)
        if kind == "id":
            self.take()
            return self.variable(tok)
        raise GuardSyntaxError(f"unexpected token {tok!r} in {self.text!r}")

    def variable(self, tok: str) -> Var:
        if tok.endswith("'"):
            return Var(tok[:-1], WRITE)
        if tok.endswith("^r") or tok.endswith("^w"):
            return Var(tok[:-2], tok[-1])
        sorts = self.sorts
        if sorts is not None and tok not in sorts and tok[-2:] in ("_r", "_w") and tok[:-2] in sorts:
            return Var(tok[:-2], tok[-1])
        return Var(tok, READ)


def parse_guard(text: str, sorts: Mapping[str, Sort] | None = None) -> Expr:
    """Parse guard text; with `sorts` the result is also sort-checked.

    An empty or blank string is the trivially true guard.
    """
    if text is None or not text.strip():
        return TRUE
    expr = _Parser(text, sorts).parse()
    if sorts is not None:
        check_sorts(expr, sorts)
    return expr
