"""Minimal SMT term language: construction, SMT-LIB 2 printing, evaluation.

Terms are plain Python data: a :class:`SymVar`, a constant (``bool``, ``int``
or ``Fraction``) or an application ``App(op, args)``. Fractions print as real
literals, ints as integer numerals, so callers choose the sort of a constant
by its Python type.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

INT, REAL, BOOL = "Int", "Real", "Bool"


@dataclass(frozen=True)
class SymVar:
    name: str
    sort: str
    role: str = "aux"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple


Term = Union[SymVar, App, bool, int, Fraction]


def app(op: str, *args) -> App:
    return App(op, tuple(args))


def and_(*args) -> Term:
    parts = [a for a in args if a is not True]
    if any(a is False for a in parts):
        return False
    if not parts:
        return True
    return parts[0] if len(parts) == 1 else App("and", tuple(parts))


def or_(*args) -> Term:
    parts = [a for a in args if a is not False]
    if any(a is True for a in parts):
        return True
    if not parts:
        return False
    return parts[0] if len(parts) == 1 else App("or", tuple(parts))


def not_(a) -> Term:
    if isinstance(a, bool):
        return not a
    return App("not", (a,))


def implies(a, b) -> Term:
    if b is True:
        return True
    return App("=>", (a, b))


def eq(a, b) -> Term:
    if a is b:
        return True
    return App("=", (a, b))


def ite(c, a, b) -> Term:
    if c is True:
        return a
    if c is False:
        return b
    if a == b and type(a) is type(b):
        return a
    return App("ite", (c, a, b))


def add(*args) -> Term:
    parts = [a for a in args if not (isinstance(a, (int, Fraction)) and not isinstance(a, bool) and a == 0)]
    if not parts:
        return args[0] if args else 0
    return parts[0] if len(parts) == 1 else App("+", tuple(parts))


def ge(a, b) -> App:
    return App(">=", (a, b))


def le(a, b) -> App:
    return App("<=", (a, b))


# --- printing --------------------------------------------------------------

def literal(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        num, den = abs(value.numerator), value.denominator
        body = f"{num}.0" if den == 1 else f"(/ {num}.0 {den}.0)"
        return f"(- {body})" if value < 0 else body
    if isinstance(value, int):
        return f"(- {-value})" if value < 0 else str(value)
    raise TypeError(f"no SMT literal for {value!r}")


def to_smt(term: Term) -> str:
    out = []
    _emit(term, out)
    return "".join(out)


def _emit(term, out):
    # explicit stack: penalty ite-chains can nest deeply on large nets
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, str):
            out.append(t)
        elif isinstance(t, SymVar):
            out.append(quote(t.name))
        elif isinstance(t, App):
            out.append("(" + t.op)
            stack.append(")")
            for a in reversed(t.args):
                stack.append(a)
                stack.append(" ")
        else:
            out.append(literal(t))


def quote(name: str) -> str:
    if all(c.isalnum() or c in "_.!$%&*+-/<=>?@^~" for c in name) and not name[0].isdigit():
        return name
    return "|" + name.replace("|", "_").replace("\\", "_") + "|"


# --- evaluation ------------------------------------------------------------

class EvaluationError(KeyError):
    pass


def evaluate(term: Term, valuation: Mapping[str, object]):
    """Value of `term` when each SymVar takes ``valuation[var.name]``."""
    if isinstance(term, SymVar):
        try:
            return valuation[term.name]
        except KeyError:
            raise EvaluationError(term.name) from None
    if not isinstance(term, App):
        return term
    op, args = term.op, term.args
    if op == "and":
        return all(evaluate(a, valuation) for a in args)
    if op == "or":
        return any(evaluate(a, valuation) for a in args)
    if op == "not":
        return not evaluate(args[0], valuation)
    if op == "=>":
        return (not evaluate(args[0], valuation)) or bool(evaluate(args[1], valuation))
    if op == "ite":
        return evaluate(args[1] if evaluate(args[0], valuation) else args[2], valuation)
    vals = [evaluate(a, valuation) for a in args]
    if op == "=":
        return all(v == vals[0] for v in vals[1:])
    if op == "distinct":
        return len(set(vals)) == len(vals)
    if op == "+":
        return sum(vals[1:], vals[0])
    if op == "-":
        return -vals[0] if len(vals) == 1 else vals[0] - sum(vals[1:])
    if op == "*":
        r = vals[0]
        for v in vals[1:]:
            r = r * v
        return r
    if op in ("<=", "<", ">=", ">"):
        pairs = zip(vals, vals[1:])
        cmp = {"<=": lambda a, b: a <= b, "<": lambda a, b: a < b,
               ">=": lambda a, b: a >= b, ">": lambda a, b: a > b}[op]
        return all(cmp(a, b) for a, b in pairs)
    raise ValueError(f"cannot evaluate operator {op!r}")


def free_vars(term: Term) -> set:
    found = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, SymVar):
            found.add(t)
        elif isinstance(t, App):
            stack.extend(t.args)
    return found


def size(term: Term) -> int:
    n = 0
    stack = [term]
    while stack:
        t = stack.pop()
        n += 1
        if isinstance(t, App):
            stack.extend(t.args)
    return n
